#pragma once
// Polygonal tiles, Schreier-graph gluings, involution quotients and the
// conforming meshes built on them.
//
// A tile carries a coarse triangulation whose boundary edges are the tile's
// sides. Refinement splits every coarse triangle into m^2 congruent pieces, so
// any declared tile symmetry that maps the coarse triangulation to itself also
// stabilizes the refined one. Every tile of a glued domain uses the identical
// refined reference triangulation; gluing only identifies side nodes.

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <numeric>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "stekiso/error.hpp"
#include "stekiso/schreier.hpp"

namespace stekiso {

struct Vec2 {
  double x = 0, y = 0;
  friend Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
  friend Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
  friend Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
  double norm() const { return std::hypot(x, y); }
};

inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double signed_area(Vec2 a, Vec2 b, Vec2 c) { return 0.5 * cross(b - a, c - a); }

/// x' = a x + b y + c,  y' = d x + e y + f
struct Affine2 {
  double a = 1, b = 0, c = 0, d = 0, e = 1, f = 0;
  Vec2 operator()(Vec2 p) const { return {a * p.x + b * p.y + c, d * p.x + e * p.y + f}; }
  double det() const { return a * e - b * d; }
  /// (this ∘ o)(p) = this(o(p))
  Affine2 compose(const Affine2& o) const {
    return {a * o.a + b * o.d, a * o.b + b * o.e, a * o.c + b * o.f + c,
            d * o.a + e * o.d, d * o.b + e * o.e, d * o.c + e * o.f + f};
  }
  bool near(const Affine2& o, double tol = 1e-12) const {
    return std::abs(a - o.a) < tol && std::abs(b - o.b) < tol && std::abs(c - o.c) < tol &&
           std::abs(d - o.d) < tol && std::abs(e - o.e) < tol && std::abs(f - o.f) < tol;
  }
};

struct SideLabel {
  enum class Kind { Glue, Free };
  Kind kind = Kind::Free;
  int generator = -1;  // Glue only
  int sign = +1;       // Glue only: +1 for s_i, -1 for s_i^{-1}
  std::string tag;     // Free only: boundary class

  static SideLabel glue(int generator, int sign) { return {Kind::Glue, generator, sign, {}}; }
  static SideLabel free(std::string tag) { return {Kind::Free, -1, +1, std::move(tag)}; }
  bool is_glue() const { return kind == Kind::Glue; }
};

/// Directed coarse boundary edge, oriented counter-clockwise around the tile.
struct TileSide {
  int from = 0, to = 0;
  SideLabel label;
};

struct TileSymmetry {
  std::string name;
  Affine2 map;

  // Filled in by TileSpec validation.
  std::vector<int> vertex_image;
  std::vector<int> side_image;
  bool orientation_preserving = true;
  std::vector<std::pair<int, int>> glue_image;  // index 2*i + (sign<0) -> (generator, sign)
  std::map<std::string, std::string> free_class_image;
  bool is_identity = false;
};

class TileSpec {
 public:
  TileSpec() = default;
  TileSpec(std::string name, std::vector<Vec2> vertices, std::vector<std::array<int, 3>> triangles,
           std::vector<TileSide> sides, std::vector<TileSymmetry> symmetries = {})
      : name_(std::move(name)), vertices_(std::move(vertices)), triangles_(std::move(triangles)),
        sides_(std::move(sides)), symmetries_(std::move(symmetries)) {
    validate();
  }

  const std::string& name() const { return name_; }
  const std::vector<Vec2>& vertices() const { return vertices_; }
  const std::vector<std::array<int, 3>>& triangles() const { return triangles_; }
  const std::vector<TileSide>& sides() const { return sides_; }
  const std::vector<TileSymmetry>& symmetries() const { return symmetries_; }
  int generator_count() const { return generator_count_; }

  double side_length(int s) const { return (vertices_[sides_[s].to] - vertices_[sides_[s].from]).norm(); }

  int glue_side(int generator, int sign) const {
    for (int s = 0; s < static_cast<int>(sides_.size()); ++s) {
      const auto& l = sides_[s].label;
      if (l.is_glue() && l.generator == generator && l.sign == sign) return s;
    }
    throw InvalidInput("tile has no glue side for generator " + std::to_string(generator));
  }

  std::vector<std::string> free_tags() const {
    std::set<std::string> tags;
    for (const auto& s : sides_)
      if (!s.label.is_glue()) tags.insert(s.label.tag);
    return {tags.begin(), tags.end()};
  }

  int symmetry_index(const std::string& name) const {
    for (int i = 0; i < static_cast<int>(symmetries_.size()); ++i)
      if (symmetries_[i].name == name) return i;
    throw InvalidInput("tile " + name_ + " declares no symmetry '" + name + "'");
  }

  double area() const {
    double a = 0;
    for (const auto& t : triangles_) a += signed_area(vertices_[t[0]], vertices_[t[1]], vertices_[t[2]]);
    return a;
  }

  int find_vertex(Vec2 p, double tol = 1e-9) const {
    for (int i = 0; i < static_cast<int>(vertices_.size()); ++i)
      if ((vertices_[i] - p).norm() < tol) return i;
    return -1;
  }

 private:
  void validate() {
    const int nv = static_cast<int>(vertices_.size());
    if (triangles_.empty()) throw GeometryError("tile " + name_ + " has no triangles");
    for (const auto& t : triangles_) {
      for (int v : t)
        if (v < 0 || v >= nv) throw GeometryError("tile triangle references a missing vertex");
      if (signed_area(vertices_[t[0]], vertices_[t[1]], vertices_[t[2]]) <= 1e-14)
        throw GeometryError("tile " + name_ + " has a triangle that is not counter-clockwise");
    }
    // directed edges: interior edges appear in both directions, boundary edges once
    std::map<std::pair<int, int>, int> directed;
    for (const auto& t : triangles_)
      for (int k = 0; k < 3; ++k) ++directed[{t[k], t[(k + 1) % 3]}];
    std::set<std::pair<int, int>> boundary;
    for (const auto& [e, count] : directed) {
      if (count != 1) throw GeometryError("tile " + name_ + " triangulation repeats a directed edge");
      if (!directed.count({e.second, e.first})) boundary.insert(e);
    }
    std::set<std::pair<int, int>> side_edges;
    for (const auto& s : sides_) {
      if (!side_edges.insert({s.from, s.to}).second) throw GeometryError("duplicate tile side");
      if (!boundary.count({s.from, s.to}))
        throw GeometryError("tile side " + std::to_string(s.from) + "->" + std::to_string(s.to) +
                            " is not a counter-clockwise boundary edge of the triangulation");
    }
    if (side_edges != boundary) throw GeometryError("tile " + name_ + " has boundary edges without a side label");
    // single closed boundary loop
    std::map<int, int> next;
    for (const auto& [u, v] : boundary)
      if (!next.emplace(u, v).second) throw GeometryError("tile boundary is not a simple loop");
    int steps = 0;
    for (int v = next.begin()->first;;) {
      v = next.at(v);
      ++steps;
      if (v == next.begin()->first) break;
      if (steps > static_cast<int>(next.size())) throw GeometryError("tile boundary is not a simple loop");
    }
    if (steps != static_cast<int>(next.size())) throw GeometryError("tile boundary has several loops");
    double shoelace = 0;
    for (const auto& [u, v] : boundary) shoelace += 0.5 * cross(vertices_[u], vertices_[v]);
    if (std::abs(shoelace - area()) > 1e-9 * std::max(1.0, area()))
      throw GeometryError("tile " + name_ + " triangles overlap (area mismatch)");

    // glue sides: exactly one s and one s^{-1} side per generator, equal lengths
    std::map<int, std::array<int, 2>> glue;
    for (int s = 0; s < static_cast<int>(sides_.size()); ++s) {
      const auto& l = sides_[s].label;
      if (!l.is_glue()) continue;
      if (l.generator < 0 || (l.sign != 1 && l.sign != -1)) throw GeometryError("bad glue label");
      auto [it, fresh] = glue.try_emplace(l.generator, std::array<int, 2>{-1, -1});
      int& slot = it->second[l.sign < 0];
      if (slot >= 0) throw GeometryError("generator has two sides with the same sign");
      slot = s;
    }
    generator_count_ = static_cast<int>(glue.size());
    for (const auto& [g, pair] : glue) {
      if (g >= generator_count_) throw GeometryError("glue generators must be numbered 0..n-1");
      if (pair[0] < 0 || pair[1] < 0) throw GeometryError("generator is missing its s or s^-1 side");
      if (std::abs(side_length(pair[0]) - side_length(pair[1])) > 1e-12)
        throw GeometryError("sides s and s^-1 of generator " + std::to_string(g) + " differ in length");
    }
    for (auto& sym : symmetries_) derive_symmetry(sym);
  }

  void derive_symmetry(TileSymmetry& sym) const {
    const int nv = static_cast<int>(vertices_.size());
    if (std::abs(std::abs(sym.map.det()) - 1.0) > 1e-12)
      throw GeometryError("tile symmetry " + sym.name + " is not an isometry");
    sym.orientation_preserving = sym.map.det() > 0;
    sym.is_identity = sym.map.near(Affine2{});
    sym.vertex_image.assign(nv, -1);
    std::vector<char> hit(nv, 0);
    for (int i = 0; i < nv; ++i) {
      const int j = find_vertex(sym.map(vertices_[i]));
      if (j < 0 || hit[j]) throw GeometryError("symmetry " + sym.name + " does not map the vertex set to itself");
      hit[j] = 1;
      sym.vertex_image[i] = j;
    }
    std::set<std::array<int, 3>> tris;
    for (auto t : triangles_) {
      std::sort(t.begin(), t.end());
      tris.insert(t);
    }
    for (const auto& t : triangles_) {
      std::array<int, 3> img{sym.vertex_image[t[0]], sym.vertex_image[t[1]], sym.vertex_image[t[2]]};
      std::sort(img.begin(), img.end());
      if (!tris.count(img))
        throw GeometryError("symmetry " + sym.name + " does not stabilize the coarse triangulation");
    }
    sym.side_image.assign(sides_.size(), -1);
    sym.glue_image.assign(2 * static_cast<std::size_t>(generator_count_), {-1, 0});
    for (int s = 0; s < static_cast<int>(sides_.size()); ++s) {
      int u = sym.vertex_image[sides_[s].from], v = sym.vertex_image[sides_[s].to];
      if (!sym.orientation_preserving) std::swap(u, v);
      int img = -1;
      for (int t = 0; t < static_cast<int>(sides_.size()); ++t)
        if (sides_[t].from == u && sides_[t].to == v) img = t;
      if (img < 0) throw GeometryError("symmetry " + sym.name + " does not map sides to sides");
      sym.side_image[s] = img;
      const auto& l = sides_[s].label;
      const auto& li = sides_[img].label;
      if (l.is_glue() != li.is_glue()) throw GeometryError("symmetry " + sym.name + " mixes glue and free sides");
      if (l.is_glue()) {
        sym.glue_image[2 * l.generator + (l.sign < 0)] = {li.generator, li.sign};
      } else {
        auto [it, fresh] = sym.free_class_image.try_emplace(l.tag, li.tag);
        if (it->second != li.tag) throw GeometryError("symmetry " + sym.name + " splits a free class");
      }
    }
    for (int g = 0; g < generator_count_; ++g) {
      const auto p = sym.glue_image[2 * g], m = sym.glue_image[2 * g + 1];
      if (p.first != m.first || p.second != -m.second)
        throw GeometryError("symmetry " + sym.name + " does not respect s/s^-1 side pairing");
    }
  }

  std::string name_;
  std::vector<Vec2> vertices_;
  std::vector<std::array<int, 3>> triangles_;
  std::vector<TileSide> sides_;
  std::vector<TileSymmetry> symmetries_;
  int generator_count_ = 0;
};

// ---------------------------------------------------------------------------
// Reference triangulation

struct RefMesh {
  int refinement = 1;
  std::vector<Vec2> nodes;
  std::vector<std::array<int, 3>> triangles;
  std::vector<std::vector<int>> side_nodes;          // per tile side, from `from` to `to`
  std::vector<std::vector<int>> symmetry_node_maps;  // per tile symmetry
  std::vector<int> coarse_vertex_node;               // coarse vertex -> node
};

/// Uniform refinement of every coarse triangle into m^2 congruent triangles.
inline RefMesh refine_tile(const TileSpec& tile, int m) {
  if (m < 1) throw InvalidInput("refinement must be >= 1");
  RefMesh rm;
  rm.refinement = m;
  const auto& V = tile.vertices();
  for (const auto& p : V) rm.nodes.push_back(p);
  rm.coarse_vertex_node.resize(V.size());
  std::iota(rm.coarse_vertex_node.begin(), rm.coarse_vertex_node.end(), 0);
  std::map<std::pair<int, int>, std::vector<int>> edge_nodes;  // (lo, hi) -> nodes lo..hi
  auto edge = [&](int u, int v) -> const std::vector<int>& {
    const int lo = std::min(u, v), hi = std::max(u, v);
    auto it = edge_nodes.find({lo, hi});
    if (it != edge_nodes.end()) return it->second;
    std::vector<int> ids{lo};
    for (int k = 1; k < m; ++k) {
      ids.push_back(static_cast<int>(rm.nodes.size()));
      rm.nodes.push_back(V[lo] + (static_cast<double>(k) / m) * (V[hi] - V[lo]));
    }
    ids.push_back(hi);
    return edge_nodes.emplace(std::make_pair(lo, hi), std::move(ids)).first->second;
  };
  auto along = [&](int u, int v, int k) {  // k-th node from u towards v
    const auto& ids = edge(u, v);
    return u < v ? ids[k] : ids[m - k];
  };
  for (const auto& t : tile.triangles()) {
    const int A = t[0], B = t[1], C = t[2];
    // local grid (i, j): A + i/m (B - A) + j/m (C - A)
    std::vector<int> grid(static_cast<std::size_t>(m + 1) * (m + 1), -1);
    auto at = [&](int i, int j) -> int& { return grid[static_cast<std::size_t>(i) * (m + 1) + j]; };
    for (int i = 0; i <= m; ++i)
      for (int j = 0; i + j <= m; ++j) {
        if (j == 0) at(i, j) = along(A, B, i);
        else if (i == 0) at(i, j) = along(A, C, j);
        else if (i + j == m) at(i, j) = along(B, C, j);
        else {
          at(i, j) = static_cast<int>(rm.nodes.size());
          rm.nodes.push_back(V[A] + (static_cast<double>(i) / m) * (V[B] - V[A]) +
                             (static_cast<double>(j) / m) * (V[C] - V[A]));
        }
      }
    for (int i = 0; i < m; ++i)
      for (int j = 0; i + j < m; ++j) {
        rm.triangles.push_back({at(i, j), at(i + 1, j), at(i, j + 1)});
        if (i + j + 1 < m) rm.triangles.push_back({at(i + 1, j), at(i + 1, j + 1), at(i, j + 1)});
      }
  }
  for (const auto& s : tile.sides()) {
    std::vector<int> ids;
    for (int k = 0; k <= m; ++k) ids.push_back(along(s.from, s.to, k));
    rm.side_nodes.push_back(std::move(ids));
  }
  // symmetry node maps by coordinate matching on a hashed grid
  std::map<std::pair<long long, long long>, std::vector<int>> buckets;
  const double cell = 1e-6;
  auto key = [&](Vec2 p) {
    return std::make_pair(static_cast<long long>(std::floor(p.x / cell)), static_cast<long long>(std::floor(p.y / cell)));
  };
  for (int i = 0; i < static_cast<int>(rm.nodes.size()); ++i) buckets[key(rm.nodes[i])].push_back(i);
  auto lookup = [&](Vec2 p) {
    const auto [kx, ky] = key(p);
    for (long long dx = -1; dx <= 1; ++dx)
      for (long long dy = -1; dy <= 1; ++dy) {
        auto it = buckets.find({kx + dx, ky + dy});
        if (it == buckets.end()) continue;
        for (int i : it->second)
          if ((rm.nodes[i] - p).norm() < 1e-9) return i;
      }
    return -1;
  };
  for (const auto& sym : tile.symmetries()) {
    std::vector<int> map(rm.nodes.size());
    for (int i = 0; i < static_cast<int>(rm.nodes.size()); ++i) {
      map[i] = lookup(sym.map(rm.nodes[i]));
      if (map[i] < 0) throw GeometryError("symmetry " + sym.name + " does not stabilize the reference mesh");
    }
    std::set<std::array<int, 3>> tris;
    for (auto t : rm.triangles) {
      std::sort(t.begin(), t.end());
      tris.insert(t);
    }
    for (const auto& t : rm.triangles) {
      std::array<int, 3> img{map[t[0]], map[t[1]], map[t[2]]};
      std::sort(img.begin(), img.end());
      if (!tris.count(img)) throw GeometryError("symmetry " + sym.name + " does not stabilize the reference mesh");
    }
    rm.symmetry_node_maps.push_back(std::move(map));
  }
  return rm;
}

// ---------------------------------------------------------------------------
// Glued domains

struct SideRef {
  int tile = 0, side = 0;
  friend bool operator==(SideRef a, SideRef b) { return a.tile == b.tile && a.side == b.side; }
  friend bool operator<(SideRef a, SideRef b) { return std::tie(a.tile, a.side) < std::tie(b.tile, b.side); }
};

/// Identifies side a with side b. With `reversed` the point at parameter t
/// along a (counter-clockwise) meets parameter 1 - t along b, which is the
/// orientable gluing of two congruent tiles; otherwise t meets t, which glues
/// a tile to its mirror image.
struct Gluing {
  SideRef a, b;
  bool reversed = true;
};

struct BoundarySide {
  SideRef ref;
  std::string tag;
};

/// Tile permutation together with the tile symmetry applied in every tile.
struct Involution {
  std::vector<int> tile_map;
  int symmetry = 0;
};

struct MirrorEdge {
  int tile = 0;
  int from = 0, to = 0;  // coarse vertices of the fixed chord (or of the seam side)
  bool seam = false;
};

inline const std::string kMirrorTag = "mirror";

struct GluedDomain {
  std::string name;
  TileSpec tile;
  int tile_count = 0;
  std::vector<Gluing> gluings;
  std::vector<BoundarySide> boundary;
  std::optional<Involution> involution;
  std::vector<MirrorEdge> mirror_edges;

  /// Partner of a glued side, or nullopt for boundary sides.
  std::optional<std::pair<SideRef, bool>> partner(SideRef s) const {
    for (const auto& g : gluings) {
      if (g.a == s) return std::make_pair(g.b, g.reversed);
      if (g.b == s) return std::make_pair(g.a, g.reversed);
    }
    return std::nullopt;
  }

  std::string boundary_tag(SideRef s) const {
    for (const auto& b : boundary)
      if (b.ref == s) return b.tag;
    throw InvalidInput("side is not a boundary side");
  }

  /// Every (tile, side) is glued exactly once or is boundary exactly once;
  /// glue-labelled sides are never boundary; glued sides have equal length.
  void validate() const {
    const int ns = static_cast<int>(tile.sides().size());
    std::vector<int> use(static_cast<std::size_t>(tile_count) * ns, 0);
    auto slot = [&](SideRef r) -> int& {
      if (r.tile < 0 || r.tile >= tile_count || r.side < 0 || r.side >= ns)
        throw InvalidInput("side reference out of range");
      return use[static_cast<std::size_t>(r.tile) * ns + r.side];
    };
    for (const auto& g : gluings) {
      ++slot(g.a);
      ++slot(g.b);
      if (std::abs(tile.side_length(g.a.side) - tile.side_length(g.b.side)) > 1e-12)
        throw GeometryError("glued sides differ in length");
    }
    for (const auto& b : boundary) {
      if (tile.sides()[b.ref.side].label.is_glue()) throw GeometryError("glue side left on the boundary");
      ++slot(b.ref);
    }
    for (int u : use)
      if (u != 1) throw GeometryError("every tile side must be glued or boundary exactly once");
  }
};

/// Side s_i of tile v is glued to side s_i^{-1} of tile succ_i(v).
inline GluedDomain build_surface(const ColoredGraph& graph, const TileSpec& tile, std::string name = "surface") {
  graph.validate();
  if (graph.color_count() != tile.generator_count())
    throw InvalidInput("graph has " + std::to_string(graph.color_count()) + " colors but tile has " +
                       std::to_string(tile.generator_count()) + " glue generators");
  GluedDomain d;
  d.name = std::move(name);
  d.tile = tile;
  d.tile_count = graph.vertex_count;
  for (int v = 0; v < graph.vertex_count; ++v)
    for (int c = 0; c < graph.color_count(); ++c)
      d.gluings.push_back({{v, tile.glue_side(c, +1)}, {graph.succ[c][v], tile.glue_side(c, -1)}, true});
  for (int v = 0; v < graph.vertex_count; ++v)
    for (int s = 0; s < static_cast<int>(tile.sides().size()); ++s)
      if (!tile.sides()[s].label.is_glue()) d.boundary.push_back({{v, s}, tile.sides()[s].label.tag});
  d.validate();
  return d;
}

/// Checks that `inv` is an order-two isometry of the glued complex and returns
/// the domain annotated for quotienting, with its fixed chords and seams
/// recorded as mirror edges.
inline GluedDomain quotient_by_involution(const GluedDomain& domain, const Involution& inv) {
  const int n = domain.tile_count;
  if (static_cast<int>(inv.tile_map.size()) != n) throw InvalidInput("involution tile map has wrong size");
  if (inv.symmetry < 0 || inv.symmetry >= static_cast<int>(domain.tile.symmetries().size()))
    throw InvalidInput("involution references an undeclared tile symmetry");
  const auto& sym = domain.tile.symmetries()[inv.symmetry];
  for (int v = 0; v < n; ++v) {
    const int w = inv.tile_map[v];
    if (w < 0 || w >= n || inv.tile_map[w] != v) throw GeometryError("tile map is not an involution");
  }
  if (!sym.map.compose(sym.map).near(Affine2{})) throw GeometryError("tile symmetry " + sym.name + " has order > 2");
  bool trivial_map = true;
  for (int v = 0; v < n; ++v) trivial_map &= inv.tile_map[v] == v;
  if (trivial_map && sym.is_identity) throw GeometryError("the identity is not an involution of order two");

  auto image = [&](SideRef s) { return SideRef{inv.tile_map[s.tile], sym.side_image[s.side]}; };
  for (const auto& g : domain.gluings) {
    const auto p = domain.partner(image(g.a));
    if (!p || !(p->first == image(g.b)) || p->second != g.reversed)
      throw GeometryError("involution does not respect the gluing of tile " + std::to_string(g.a.tile));
  }
  for (const auto& b : domain.boundary)
    if (domain.partner(image(b.ref))) throw GeometryError("involution maps a boundary side onto a glued side");

  GluedDomain out = domain;
  out.involution = inv;
  out.mirror_edges.clear();
  for (int v = 0; v < n; ++v) {
    if (inv.tile_map[v] != v) continue;
    std::set<std::pair<int, int>> seen;
    for (const auto& t : domain.tile.triangles())
      for (int k = 0; k < 3; ++k) {
        const int a = t[k], b = t[(k + 1) % 3];
        if (sym.vertex_image[a] == a && sym.vertex_image[b] == b && seen.insert({std::min(a, b), std::max(a, b)}).second)
          out.mirror_edges.push_back({v, std::min(a, b), std::max(a, b), false});
      }
  }
  for (const auto& g : domain.gluings)
    if (image(g.a) == g.b) {
      const auto& s = domain.tile.sides()[g.a.side];
      out.mirror_edges.push_back({g.a.tile, s.from, s.to, true});
    }
  return out;
}

// ---------------------------------------------------------------------------
// Meshes

struct MeshTriangle {
  int tile = 0;
  int ref = 0;  // reference triangle index; geometry comes from the reference mesh
  std::array<int, 3> v{};
};

struct BoundaryEdge {
  int a = 0, b = 0;
  std::string tag;
  double length = 0;
};

struct Mesh {
  std::string name;
  RefMesh ref;
  int tile_count = 0;
  int vertex_count = 0;
  std::vector<std::vector<int>> local_to_global;  // [tile][ref node] -> global vertex
  std::vector<std::pair<int, int>> representative;  // global -> (tile, ref node)
  std::vector<MeshTriangle> triangles;
  std::vector<BoundaryEdge> boundary;
  bool quotient = false;
  bool two_sided = true;  // quotient only: fixed set separates the cover

  int refinement() const { return ref.refinement; }
  Vec2 chart_coord(int v) const { return ref.nodes[representative[v].second]; }
  std::array<Vec2, 3> triangle_coords(const MeshTriangle& t) const {
    const auto& r = ref.triangles[t.ref];
    return {ref.nodes[r[0]], ref.nodes[r[1]], ref.nodes[r[2]]};
  }
  std::vector<std::string> boundary_tags() const {
    std::set<std::string> tags;
    for (const auto& e : boundary) tags.insert(e.tag);
    return {tags.begin(), tags.end()};
  }
  double boundary_length() const {
    double l = 0;
    for (const auto& e : boundary) l += e.length;
    return l;
  }
  double area() const {
    double a = 0;
    for (const auto& t : triangles) {
      const auto c = triangle_coords(t);
      a += std::abs(signed_area(c[0], c[1], c[2]));
    }
    return a;
  }
};

namespace detail {

struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  void unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
};

inline std::pair<int, int> edge_key(int a, int b) { return {std::min(a, b), std::max(a, b)}; }

/// Every edge lies in one or two triangles; the one-triangle edges are
/// exactly the listed boundary edges.
inline void check_conforming(const Mesh& m) {
  std::map<std::pair<int, int>, int> count;
  for (const auto& t : m.triangles) {
    if (t.v[0] == t.v[1] || t.v[1] == t.v[2] || t.v[0] == t.v[2])
      throw GeometryError("gluing collapses a triangle; increase the refinement");
    for (int k = 0; k < 3; ++k) ++count[edge_key(t.v[k], t.v[(k + 1) % 3])];
  }
  std::set<std::pair<int, int>> bnd;
  for (const auto& e : m.boundary)
    if (!bnd.insert(edge_key(e.a, e.b)).second) throw GeometryError("boundary edge listed twice");
  for (const auto& [e, c] : count) {
    if (c > 2) throw GeometryError("edge shared by more than two triangles in mesh " + m.name + "; increase the refinement");
    if ((c == 1) != (bnd.count(e) == 1)) throw GeometryError("boundary edges of mesh " + m.name + " are inconsistent");
  }
  if (bnd.size() != static_cast<std::size_t>(std::count_if(count.begin(), count.end(), [](auto& p) { return p.second == 1; })))
    throw GeometryError("boundary edge is not a mesh edge");
}

// a quotient edge stands for a class and its image; it is named by the smaller tag
inline std::string orbit_tag(const TileSpec& tile, int symmetry, const std::string& tag) {
  const auto& image = tile.symmetries()[symmetry].free_class_image;
  auto it = image.find(tag);
  return it == image.end() ? tag : std::min(tag, it->second);
}

/// Orbit quotient of the cover mesh under the simplicial involution induced
/// by `inv`. Fixed edges become boundary edges tagged `mirror`; other boundary
/// edges carry the smaller of their class and its image under the symmetry.
inline Mesh quotient_mesh(const Mesh& cover, const GluedDomain& domain, const Involution& inv) {
  const auto& node_map = cover.ref.symmetry_node_maps.at(inv.symmetry);
  const int nv = cover.vertex_count;
  std::vector<int> beta(nv, -1);
  for (int t = 0; t < cover.tile_count; ++t)
    for (int p = 0; p < static_cast<int>(cover.ref.nodes.size()); ++p) {
      const int v = cover.local_to_global[t][p];
      const int w = cover.local_to_global[inv.tile_map[t]][node_map[p]];
      if (beta[v] >= 0 && beta[v] != w) throw GeometryError("involution is not well defined on glued nodes");
      beta[v] = w;
    }
  for (int v = 0; v < nv; ++v)
    if (beta[beta[v]] != v) throw GeometryError("induced vertex map is not an involution");

  auto sorted = [](std::array<int, 3> a) {
    std::sort(a.begin(), a.end());
    return a;
  };
  std::map<std::array<int, 3>, int> tri_index;
  for (int i = 0; i < static_cast<int>(cover.triangles.size()); ++i) tri_index[sorted(cover.triangles[i].v)] = i;
  const int nt = static_cast<int>(cover.triangles.size());
  std::vector<int> tri_image(nt);
  for (int i = 0; i < nt; ++i) {
    const auto& v = cover.triangles[i].v;
    auto it = tri_index.find(sorted({beta[v[0]], beta[v[1]], beta[v[2]]}));
    if (it == tri_index.end()) throw GeometryError("involution does not map triangles to triangles");
    if (it->second == i) throw GeometryError("involution fixes a triangle; its mirror must run along mesh edges");
    tri_image[i] = it->second;
  }
  auto fixed_edge = [&](int a, int b) { return beta[a] == a && beta[b] == b; };

  // components of the cover cut along the fixed set
  UnionFind comp(nt);
  std::map<std::pair<int, int>, std::vector<int>> edge_tris;
  for (int i = 0; i < nt; ++i)
    for (int k = 0; k < 3; ++k) {
      const auto& v = cover.triangles[i].v;
      edge_tris[edge_key(v[k], v[(k + 1) % 3])].push_back(i);
    }
  for (const auto& [e, ts] : edge_tris)
    if (ts.size() == 2 && !fixed_edge(e.first, e.second)) comp.unite(ts[0], ts[1]);
  bool two_sided = true;
  for (int i = 0; i < nt; ++i)
    if (comp.find(i) == comp.find(tri_image[i])) two_sided = false;
  std::vector<char> keep(nt, 0);
  for (int i = 0; i < nt; ++i) {
    if (two_sided) keep[i] = comp.find(i) < comp.find(tri_image[i]);
    else keep[i] = i < tri_image[i];
  }

  Mesh q;
  q.name = cover.name + "/" + domain.tile.symmetries()[inv.symmetry].name;
  q.ref = cover.ref;
  q.tile_count = cover.tile_count;
  q.quotient = true;
  q.two_sided = two_sided;
  std::vector<int> orbit_id(nv, -1);
  auto id_of = [&](int v, int tile, int node) {
    const int rep = std::min(v, beta[v]);
    if (orbit_id[rep] < 0) {
      orbit_id[rep] = q.vertex_count++;
      q.representative.push_back({tile, node});
    }
    return orbit_id[rep];
  };
  for (int i = 0; i < nt; ++i) {
    if (!keep[i]) continue;
    const auto& t = cover.triangles[i];
    const auto& r = cover.ref.triangles[t.ref];
    MeshTriangle qt{t.tile, t.ref, {}};
    for (int k = 0; k < 3; ++k) qt.v[k] = id_of(t.v[k], t.tile, r[k]);
    q.triangles.push_back(qt);
  }
  q.local_to_global = cover.local_to_global;
  for (auto& row : q.local_to_global)
    for (int& v : row) v = orbit_id[std::min(v, beta[v])];

  auto orbit_tag = [&](const std::string& tag) { return detail::orbit_tag(domain.tile, inv.symmetry, tag); };
  std::set<std::pair<int, int>> seen;
  for (const auto& e : cover.boundary) {
    const int a = orbit_id[std::min(e.a, beta[e.a])], b = orbit_id[std::min(e.b, beta[e.b])];
    if (seen.insert(edge_key(a, b)).second) q.boundary.push_back({a, b, orbit_tag(e.tag), e.length});
  }
  for (int i = 0; i < nt; ++i) {
    if (!keep[i]) continue;
    const auto& v = cover.triangles[i].v;
    const auto c = cover.triangle_coords(cover.triangles[i]);
    for (int k = 0; k < 3; ++k) {
      const int a = v[k], b = v[(k + 1) % 3];
      if (!fixed_edge(a, b)) continue;
      const int qa = orbit_id[a], qb = orbit_id[b];
      if (seen.insert(edge_key(qa, qb)).second) q.boundary.push_back({qa, qb, kMirrorTag, (c[(k + 1) % 3] - c[k]).norm()});
    }
  }
  check_conforming(q);
  return q;
}

}  // namespace detail

/// Conforming mesh of the glued domain (and of its involution quotient when
/// one is attached). Global vertex ids are assigned in (tile, node) order.
inline Mesh mesh(const GluedDomain& domain, int refinement) {
  domain.validate();
  Mesh m;
  m.name = domain.name;
  m.ref = refine_tile(domain.tile, refinement);
  m.tile_count = domain.tile_count;
  const int np = static_cast<int>(m.ref.nodes.size());
  const int r = refinement;
  detail::UnionFind uf(static_cast<std::size_t>(domain.tile_count) * np);
  auto slot = [np](int tile, int node) { return tile * np + node; };
  for (const auto& g : domain.gluings) {
    const auto& na = m.ref.side_nodes[g.a.side];
    const auto& nb = m.ref.side_nodes[g.b.side];
    for (int k = 0; k <= r; ++k) uf.unite(slot(g.a.tile, na[k]), slot(g.b.tile, nb[g.reversed ? r - k : k]));
  }
  std::vector<int> root_id(static_cast<std::size_t>(domain.tile_count) * np, -1);
  m.local_to_global.assign(domain.tile_count, std::vector<int>(np));
  for (int t = 0; t < domain.tile_count; ++t)
    for (int p = 0; p < np; ++p) {
      int& id = root_id[uf.find(slot(t, p))];
      if (id < 0) {
        id = m.vertex_count++;
        m.representative.push_back({t, p});
      }
      m.local_to_global[t][p] = id;
    }
  for (int t = 0; t < domain.tile_count; ++t)
    for (int i = 0; i < static_cast<int>(m.ref.triangles.size()); ++i) {
      const auto& rt = m.ref.triangles[i];
      m.triangles.push_back({t, i, {m.local_to_global[t][rt[0]], m.local_to_global[t][rt[1]], m.local_to_global[t][rt[2]]}});
    }
  for (const auto& b : domain.boundary) {
    const auto& ids = m.ref.side_nodes[b.ref.side];
    for (int k = 0; k < r; ++k) {
      const double len = (m.ref.nodes[ids[k + 1]] - m.ref.nodes[ids[k]]).norm();
      m.boundary.push_back({m.local_to_global[b.ref.tile][ids[k]], m.local_to_global[b.ref.tile][ids[k + 1]], b.tag, len});
    }
  }
  detail::check_conforming(m);
  if (domain.involution) return detail::quotient_mesh(m, domain, *domain.involution);
  return m;
}

/// Diameter of the vertex adjacency graph (BFS from every vertex).
inline int combinatorial_diameter(const Mesh& m) {
  std::vector<std::vector<int>> adj(m.vertex_count);
  std::set<std::pair<int, int>> edges;
  for (const auto& t : m.triangles)
    for (int k = 0; k < 3; ++k) edges.insert(detail::edge_key(t.v[k], t.v[(k + 1) % 3]));
  for (const auto& [a, b] : edges) {
    adj[a].push_back(b);
    adj[b].push_back(a);
  }
  int diam = 0;
  std::vector<int> dist(m.vertex_count), queue;
  queue.reserve(m.vertex_count);
  for (int s = 0; s < m.vertex_count; ++s) {
    std::fill(dist.begin(), dist.end(), -1);
    queue.assign(1, s);
    dist[s] = 0;
    for (std::size_t i = 0; i < queue.size(); ++i)
      for (int w : adj[queue[i]])
        if (dist[w] < 0) {
          dist[w] = dist[queue[i]] + 1;
          queue.push_back(w);
        }
    if (static_cast<int>(queue.size()) != m.vertex_count) throw GeometryError("mesh is disconnected");
    diam = std::max(diam, dist[queue.back()]);
  }
  return diam;
}

/// Lengths of the closed boundary curves (connected components of the
/// boundary edge graph), sorted ascending.
inline std::vector<double> boundary_component_lengths(const Mesh& m, bool include_mirror = true) {
  detail::UnionFind uf(m.vertex_count);
  std::vector<char> on(m.vertex_count, 0);
  for (const auto& e : m.boundary) {
    if (!include_mirror && e.tag == kMirrorTag) continue;
    uf.unite(e.a, e.b);
    on[e.a] = on[e.b] = 1;
  }
  std::map<int, double> len;
  for (const auto& e : m.boundary) {
    if (!include_mirror && e.tag == kMirrorTag) continue;
    len[uf.find(e.a)] += e.length;
  }
  std::vector<double> out;
  for (const auto& [root, l] : len) out.push_back(l);
  std::sort(out.begin(), out.end());
  return out;
}

// ---------------------------------------------------------------------------
// Text and SVG export

inline void write_mesh_text(std::ostream& os, const Mesh& m) {
  os.precision(17);
  os << "vertices " << m.vertex_count << '\n';
  for (int v = 0; v < m.vertex_count; ++v) {
    const Vec2 p = m.chart_coord(v);
    os << v << ' ' << m.representative[v].first << ' ' << p.x << ' ' << p.y << '\n';
  }
  os << "triangles " << m.triangles.size() << '\n';
  for (const auto& t : m.triangles) os << t.tile << ' ' << t.v[0] << ' ' << t.v[1] << ' ' << t.v[2] << '\n';
  os << "boundary_edges " << m.boundary.size() << '\n';
  for (const auto& e : m.boundary) os << e.a << ' ' << e.b << ' ' << e.tag << '\n';
}

/// Wireframe of every tile chart laid out on a grid; boundary edges drawn by tag.
inline void write_mesh_svg(std::ostream& os, const Mesh& m) {
  double minx = 1e300, miny = 1e300, maxx = -1e300, maxy = -1e300;
  for (const auto& p : m.ref.nodes) {
    minx = std::min(minx, p.x);
    miny = std::min(miny, p.y);
    maxx = std::max(maxx, p.x);
    maxy = std::max(maxy, p.y);
  }
  const double w = maxx - minx, h = maxy - miny, pad = 0.15 * std::max(w, h);
  const int cols = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(m.tile_count))));
  const int rows = (m.tile_count + cols - 1) / cols;
  const double scale = 400.0 / std::max(w, h);
  auto px = [&](int tile, Vec2 p) {
    const double ox = (tile % cols) * (w + pad), oy = (tile / cols) * (h + pad);
    return Vec2{(p.x - minx + ox + pad / 2) * scale, (maxy - p.y + oy + pad / 2) * scale};
  };
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << cols * (w + pad) * scale << "\" height=\""
     << rows * (h + pad) * scale << "\">\n";
  for (const auto& t : m.triangles) {
    const auto c = m.triangle_coords(t);
    os << "<polygon fill=\"none\" stroke=\"#999\" stroke-width=\"0.4\" points=\"";
    for (const auto& p : c) {
      const Vec2 q = px(t.tile, p);
      os << q.x << ',' << q.y << ' ';
    }
    os << "\"/>\n";
  }
  for (int t = 0; t < m.tile_count; ++t) {
    const Vec2 c = px(t, {(minx + maxx) / 2, (miny + maxy) / 2});
    os << "<text x=\"" << c.x << "\" y=\"" << c.y << "\" font-size=\"14\">" << t << "</text>\n";
  }
  os << "</svg>\n";
}

}  // namespace stekiso
