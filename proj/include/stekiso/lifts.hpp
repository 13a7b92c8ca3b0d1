#pragma once
// Isometries of Schreier-glued surfaces that apply one tile symmetry in every
// tile. They are searched for on the Cayley tiling M(G, S) and pushed down to
// coset spaces.
//
// If the symmetry sends the glue side s_i to s_j^d, a tile map phi respects
// the gluing exactly when phi(g s_i) = phi(g) s_j^d for all g and i.

#include <optional>
#include <vector>

#include "stekiso/finite_groups.hpp"
#include "stekiso/tiling.hpp"

namespace stekiso {

struct CayleyLift {
  int symmetry = 0;
  std::vector<int> map;  // element -> element
};

/// All lifts of all declared tile symmetries, in (symmetry, phi(e)) order.
inline std::vector<CayleyLift> cayley_lifts(const FiniteGroup& g, const std::vector<int>& gens, const TileSpec& tile) {
  if (static_cast<int>(gens.size()) != tile.generator_count())
    throw InvalidInput("generator count does not match the tile's glue generators");
  if (static_cast<int>(g.closure(gens).size()) != g.order()) throw InvalidInput("generators do not generate the group");
  const int n = g.order();
  std::vector<CayleyLift> out;
  for (int si = 0; si < static_cast<int>(tile.symmetries().size()); ++si) {
    const auto& sym = tile.symmetries()[si];
    std::vector<int> img;
    for (int i = 0; i < static_cast<int>(gens.size()); ++i) {
      const auto [j, d] = sym.glue_image[2 * i];
      img.push_back(d > 0 ? gens[j] : g.inv(gens[j]));
    }
    for (int x = 0; x < n; ++x) {
      std::vector<int> phi(n, -1), queue{g.identity()};
      phi[g.identity()] = x;
      bool ok = true;
      for (std::size_t q = 0; q < queue.size() && ok; ++q) {
        const int h = queue[q];
        for (std::size_t i = 0; i < gens.size() && ok; ++i) {
          const int nxt = g.mul(h, gens[i]), val = g.mul(phi[h], img[i]);
          if (phi[nxt] < 0) {
            phi[nxt] = val;
            queue.push_back(nxt);
          } else if (phi[nxt] != val) {
            ok = false;
          }
        }
      }
      if (ok) out.push_back({si, std::move(phi)});
    }
  }
  return out;
}

/// phi(k g) = k phi(g): the lift commutes with the deck group and therefore
/// descends to every coset space.
inline bool commutes_with_deck(const FiniteGroup& g, const CayleyLift& lift) {
  for (int k : g.generators())
    for (int x = 0; x < g.order(); ++x)
      if (lift.map[g.mul(k, x)] != g.mul(k, lift.map[x])) return false;
  return true;
}

inline bool is_involutive(const CayleyLift& lift, const TileSpec& tile) {
  const auto& m = tile.symmetries()[lift.symmetry].map;
  if (!m.compose(m).near(Affine2{})) return false;
  for (std::size_t x = 0; x < lift.map.size(); ++x)
    if (lift.map[lift.map[x]] != static_cast<int>(x)) return false;
  return true;
}

inline bool lifts_commute(const CayleyLift& p, const CayleyLift& q, const TileSpec& tile) {
  const auto& a = tile.symmetries()[p.symmetry].map;
  const auto& b = tile.symmetries()[q.symmetry].map;
  if (!a.compose(b).near(b.compose(a))) return false;
  for (std::size_t x = 0; x < p.map.size(); ++x)
    if (p.map[q.map[x]] != q.map[p.map[x]]) return false;
  return true;
}

/// Coset map Hg -> H'phi(g), if well defined and bijective.
inline std::optional<std::vector<int>> descend(const CosetAction& src, const CosetAction& dst, const CayleyLift& lift) {
  if (src.index() != dst.index()) return std::nullopt;
  std::vector<int> map(src.index(), -1);
  for (std::size_t x = 0; x < lift.map.size(); ++x) {
    int& m = map[src.coset_of[x]];
    const int d = dst.coset_of[lift.map[x]];
    if (m >= 0 && m != d) return std::nullopt;
    m = d;
  }
  std::vector<char> hit(map.size(), 0);
  for (int m : map) {
    if (hit[m]) return std::nullopt;
    hit[m] = 1;
  }
  return map;
}

/// Tile map between two glued domains plus the symmetry applied in each tile.
struct DomainMap {
  std::vector<int> tile_map;
  int symmetry = 0;
};

inline Involution involution_on(const CosetAction& ca, const CayleyLift& lift) {
  auto m = descend(ca, ca, lift);
  if (!m) throw GeometryError("lift does not descend to the coset space");
  return {*m, lift.symmetry};
}

}  // namespace stekiso
