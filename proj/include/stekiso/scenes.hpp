#pragma once
// Ready-made pairs: the GL(3,2) surfaces and their sloshing quotients, the
// symmetric-tile density scene, the two-tile mixed boundary pairs, and the
// polygonal disk.

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "stekiso/finite_groups.hpp"
#include "stekiso/lifts.hpp"
#include "stekiso/schreier.hpp"
#include "stekiso/tiles.hpp"
#include "stekiso/tiling.hpp"

namespace stekiso {

struct SurfacePairScene {
  Gl3F2 gl;
  std::vector<int> gens;
  TileSpec tile;
  ColoredGraph graph1, graph2;
  GluedDomain surface1, surface2;
  CayleyLift beta;                      // involution commuting with the deck group
  GluedDomain quotient1, quotient2;     // sloshing domains
  RationalMatrix intertwiner;           // rows: cosets of h1, columns: cosets of h2
};

namespace detail {

inline std::optional<CayleyLift> deck_involution(const FiniteGroup& g, const std::vector<int>& gens, const TileSpec& tile,
                                                 int symmetry) {
  for (auto& l : cayley_lifts(g, gens, tile))
    if (l.symmetry == symmetry && is_involutive(l, tile) && commutes_with_deck(g, l)) return l;
  return std::nullopt;
}

inline SurfacePairScene finish_scene(Gl3F2 gl, std::vector<int> gens, TileSpec tile, CayleyLift beta) {
  SurfacePairScene s{std::move(gl), std::move(gens), std::move(tile), {}, {}, {}, {}, std::move(beta), {}, {}, {}};
  const auto& G = s.gl.group;
  s.graph1 = schreier_graph(G, s.gl.h1, s.gens);
  s.graph2 = schreier_graph(G, s.gl.h2, s.gens);
  s.surface1 = build_surface(s.graph1, s.tile, "M1");
  s.surface2 = build_surface(s.graph2, s.tile, "M2");
  const auto ca1 = coset_action(G, s.gl.h1), ca2 = coset_action(G, s.gl.h2);
  s.quotient1 = quotient_by_involution(s.surface1, involution_on(ca1, s.beta));
  s.quotient2 = quotient_by_involution(s.surface2, involution_on(ca2, s.beta));
  s.quotient1.name = "M1/beta";
  s.quotient2.name = "M2/beta";
  s.intertwiner = intertwiner(G, s.gl.h1, s.gl.h2);
  return s;
}

}  // namespace detail

/// First generating pair (a, b) in index order whose Schreier surfaces admit a
/// deck-commuting involution that reflects every tile in its diagonal, and
/// whose two Schreier graphs have different diameters.
inline SurfacePairScene buser_scene(const TileSpec& tile = buser_tile(), const std::string& symmetry = "diag") {
  Gl3F2 gl = gl3_f2();
  const auto& G = gl.group;
  const int si = tile.symmetry_index(symmetry);
  for (int a = 0; a < G.order(); ++a)
    for (int b = 0; b < G.order(); ++b) {
      if (a == b || a == G.identity() || b == G.identity()) continue;
      if (static_cast<int>(G.closure({a, b}).size()) != G.order()) continue;
      if (graph_diameter(schreier_graph(G, gl.h1, {a, b})) == graph_diameter(schreier_graph(G, gl.h2, {a, b}))) continue;
      auto beta = detail::deck_involution(G, {a, b}, tile, si);
      if (!beta) continue;
      return detail::finish_scene(std::move(gl), {a, b}, tile, std::move(*beta));
    }
  throw GeometryError("no generating pair with the required involution");
}

struct DensityScene {
  SurfacePairScene pair;
  CayleyLift tau;    // maps h1-cosets onto h2-cosets and commutes with beta
  DomainMap tau_map; // quotient1 -> quotient2
};

/// Generators (a, a^{-T}) so that the half-turn of the tile lifts to the
/// inverse-transpose automorphism, which conjugates h1 onto h2. The first
/// such a with a commuting diagonal involution is used.
inline DensityScene density_scene(const TileSpec& tile = cross_tile(), const std::string& beta_symmetry = "diag",
                                  const std::string& tau_symmetry = "rot180") {
  Gl3F2 gl = gl3_f2();
  const auto& G = gl.group;
  const int bi = tile.symmetry_index(beta_symmetry), ti = tile.symmetry_index(tau_symmetry);
  const auto ca1 = coset_action(G, gl.h1), ca2 = coset_action(G, gl.h2);
  for (int a = 0; a < G.order(); ++a) {
    if (a == G.identity()) continue;
    const int b = gl.transpose_of(G.inv(a));
    if (b == G.identity() || b == a) continue;
    if (static_cast<int>(G.closure({a, b}).size()) != G.order()) continue;
    const auto lifts = cayley_lifts(G, {a, b}, tile);
    for (const auto& beta : lifts) {
      if (beta.symmetry != bi || !is_involutive(beta, tile) || !commutes_with_deck(G, beta)) continue;
      for (const auto& tau : lifts) {
        if (tau.symmetry != ti || !lifts_commute(tau, beta, tile)) continue;
        const auto m = descend(ca1, ca2, tau);
        if (!m) continue;
        DensityScene d{detail::finish_scene(gl, {a, b}, tile, beta), tau, {*m, ti}};
        return d;
      }
    }
  }
  throw GeometryError("no generator pair admits the commuting involution and half-turn");
}

// ---------------------------------------------------------------------------
// Two-tile pairs with mixed boundary conditions on the bitten triangle.
//
// Both members consist of two copies of the tile in the same chart. In M the
// copies are glued along the hypotenuse, in M' along the leg La; in P along
// the hypotenuse, in P' along the leg Lb. Boundary classes: "arc" on every
// bite, "D" and "N" elsewhere. With u1, u2 the restrictions to the two tiles
// of M (resp. P), the map u1' = (u1 - u2)/sqrt2, u2' = (u1 + u2)/sqrt2 carries
// eigenfunctions of M to eigenfunctions of M' (resp. P to P').

struct MixedPair {
  GluedDomain first, second;
  Eigen::Matrix2d T;  // rows: tiles of `second`, columns: tiles of `first`
};

namespace detail {

inline std::vector<int> sides_with_tag(const TileSpec& t, const std::string& tag) {
  std::vector<int> out;
  for (int s = 0; s < static_cast<int>(t.sides().size()); ++s)
    if (!t.sides()[s].label.is_glue() && t.sides()[s].label.tag == tag) out.push_back(s);
  return out;
}

/// Two copies glued along every side of class `seam` (same parameter on both
/// copies); `roles[tile]` assigns the D/N class of the remaining legs.
inline GluedDomain two_tile_domain(const TileSpec& tile, const std::string& name, const std::string& seam,
                                   const std::array<std::map<std::string, std::string>, 2>& roles) {
  GluedDomain d;
  d.name = name;
  d.tile = tile;
  d.tile_count = 2;
  for (int s : sides_with_tag(tile, seam)) d.gluings.push_back({{0, s}, {1, s}, false});
  for (int t = 0; t < 2; ++t)
    for (int s = 0; s < static_cast<int>(tile.sides().size()); ++s) {
      const std::string& tag = tile.sides()[s].label.tag;
      if (tag == seam) continue;
      if (tag == "arc") d.boundary.push_back({{t, s}, "arc"});
      else d.boundary.push_back({{t, s}, roles[t].at(tag)});
    }
  d.validate();
  return d;
}

}  // namespace detail

/// which = 'M' or 'P'.
inline MixedPair mixed_pair(char which, const TileSpec& tile = bite_triangle_tile()) {
  MixedPair p;
  const double r = 1 / std::sqrt(2.0);
  p.T << r, -r, r, r;
  if (which == 'M') {
    p.first = detail::two_tile_domain(tile, "M", "hyp", {{{{"La", "N"}, {"Lb", "D"}}, {{"La", "D"}, {"Lb", "D"}}}});
    p.second = detail::two_tile_domain(tile, "M'", "La", {{{{"Lb", "D"}, {"hyp", "D"}}, {{"Lb", "D"}, {"hyp", "N"}}}});
  } else if (which == 'P') {
    p.first = detail::two_tile_domain(tile, "P", "hyp", {{{{"La", "D"}, {"Lb", "N"}}, {{"La", "D"}, {"Lb", "D"}}}});
    p.second = detail::two_tile_domain(tile, "P'", "Lb", {{{{"La", "D"}, {"hyp", "D"}}, {{"La", "D"}, {"hyp", "N"}}}});
  } else {
    throw InvalidInput("mixed pair must be 'M' or 'P'");
  }
  return p;
}

/// Single-tile domain with every free side on the boundary.
inline GluedDomain single_tile_domain(const TileSpec& tile, const std::string& name) {
  GluedDomain d;
  d.name = name;
  d.tile = tile;
  d.tile_count = 1;
  for (int s = 0; s < static_cast<int>(tile.sides().size()); ++s) {
    if (tile.sides()[s].label.is_glue()) throw InvalidInput("single tile domain cannot have glue sides");
    d.boundary.push_back({{0, s}, tile.sides()[s].label.tag});
  }
  d.validate();
  return d;
}

inline Eigen::MatrixXd to_double_matrix(const RationalMatrix& m) {
  Eigen::MatrixXd out(m.rows, m.cols);
  for (int r = 0; r < m.rows; ++r)
    for (int c = 0; c < m.cols; ++c) out(r, c) = m(r, c).convert_to<double>();
  return out;
}

}  // namespace stekiso
