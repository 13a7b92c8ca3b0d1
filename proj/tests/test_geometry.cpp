#include <gtest/gtest.h>

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "stekiso/lifts.hpp"
#include "stekiso/scenes.hpp"
#include "stekiso/tiles.hpp"
#include "stekiso/tiling.hpp"
#include "stekiso/verify.hpp"

using namespace stekiso;

namespace {

constexpr double kPi = 3.14159265358979323846;

int euler_characteristic(const Mesh& m) {
  std::set<std::pair<int, int>> edges;
  for (const auto& t : m.triangles)
    for (int k = 0; k < 3; ++k) edges.insert({std::min(t.v[k], t.v[(k + 1) % 3]), std::max(t.v[k], t.v[(k + 1) % 3])});
  return m.vertex_count - static_cast<int>(edges.size()) + static_cast<int>(m.triangles.size());
}

double free_length(const TileSpec& t) {
  double l = 0;
  for (int s = 0; s < static_cast<int>(t.sides().size()); ++s)
    if (!t.sides()[s].label.is_glue()) l += t.side_length(s);
  return l;
}

const SurfacePairScene& scene() {
  static const SurfacePairScene s = buser_scene();
  return s;
}

}  // namespace

TEST(Tiles, AreasMatchClosedForms) {
  EXPECT_NEAR(buser_tile().area(), 16 - 8 * std::sin(kPi / 8), 1e-12);
  EXPECT_NEAR(polygon_disk_tile(64).area(), 32 * std::sin(2 * kPi / 64), 1e-12);
  EXPECT_NEAR(unit_square_tile().area(), 1.0, 1e-15);
  EXPECT_NEAR(cross_tile().area(), 4 * 1.5 * 1.0 - 1.0, 1e-12);  // two 3x1 bars overlapping in a unit square
  EXPECT_NEAR(bite_triangle_tile().area(), 8 - 0.5 * 8 * std::sin(kPi / 8), 1e-12);
}

TEST(Tiles, DeclaredSymmetriesActOnGlueSides) {
  const auto t = buser_tile();
  EXPECT_EQ(t.generator_count(), 2);
  const auto& diag = t.symmetries()[t.symmetry_index("diag")];
  EXPECT_FALSE(diag.orientation_preserving);
  for (int s = 0; s < static_cast<int>(t.sides().size()); ++s)
    EXPECT_NEAR(t.side_length(s), t.side_length(diag.side_image[s]), 1e-12);
  EXPECT_THROW(t.symmetry_index("rot90"), InvalidInput);
  const auto sq = unit_square_tile();
  EXPECT_EQ(sq.symmetries().size(), 8u);
  EXPECT_EQ(sq.symmetries()[sq.symmetry_index("rot90")].free_class_image.at("bottom"), "right");
}

TEST(Tiles, ValidationRejectsMalformedTiles) {
  const std::vector<Vec2> sq{{0, 0}, {1, 0}, {1, 1}, {0, 1}};
  const std::vector<TileSide> sides{{0, 1, SideLabel::free("a")}, {1, 2, SideLabel::free("a")},
                                    {2, 3, SideLabel::free("a")}, {3, 0, SideLabel::free("a")}};
  EXPECT_NO_THROW(TileSpec("ok", sq, {{0, 1, 2}, {0, 2, 3}}, sides));
  EXPECT_THROW(TileSpec("cw", sq, {{0, 2, 1}, {0, 3, 2}}, sides), GeometryError);
  EXPECT_THROW(TileSpec("hole", sq, {{0, 1, 2}}, sides), GeometryError);
  auto unpaired = sides;
  unpaired[0].label = SideLabel::glue(0, +1);
  EXPECT_THROW(TileSpec("unpaired", sq, {{0, 1, 2}, {0, 2, 3}}, unpaired), GeometryError);
  const std::vector<Vec2> rect{{0, 0}, {2, 0}, {2, 1}, {0, 1}};
  auto uneven = sides;
  uneven[0].label = SideLabel::glue(0, +1);
  uneven[1].label = SideLabel::glue(0, -1);
  EXPECT_THROW(TileSpec("uneven", rect, {{0, 1, 2}, {0, 2, 3}}, uneven), GeometryError);
  TileSymmetry shear{"shear", {1, 1, 0, 0, 1, 0}};
  EXPECT_THROW(TileSpec("shear", sq, {{0, 1, 2}, {0, 2, 3}}, sides, {shear}), GeometryError);
  TileSymmetry flip{"flip", {-1, 0, 1, 0, 1, 0}};  // maps the triangulation diagonal 0-2 onto 1-3
  EXPECT_THROW(TileSpec("flip", sq, {{0, 1, 2}, {0, 2, 3}}, sides, {flip}), GeometryError);
}

TEST(Tiles, TextRoundTripForEveryBuiltin) {
  for (const char* name : {"buser", "cross", "bite_triangle", "disk64", "unit_square"}) {
    const auto t = builtin_tile(name);
    std::stringstream ss;
    write_tile_text(ss, t);
    const auto u = read_tile_text(ss);
    ASSERT_EQ(u.vertices().size(), t.vertices().size()) << name;
    for (std::size_t i = 0; i < t.vertices().size(); ++i) EXPECT_EQ((u.vertices()[i] - t.vertices()[i]).norm(), 0.0);
    EXPECT_EQ(u.triangles(), t.triangles());
    EXPECT_EQ(u.sides().size(), t.sides().size());
    EXPECT_EQ(u.symmetries().size(), t.symmetries().size());
    EXPECT_EQ(u.free_tags(), t.free_tags());
  }
  std::stringstream bad("tile x\nvertex 0\n");
  EXPECT_THROW(read_tile_text(bad), InvalidInput);
}

TEST(Tiles, ShippedTileFilesMatchBuiltins) {
  for (const char* name : {"buser", "cross", "bite_triangle", "disk64", "unit_square"}) {
    std::ifstream in(std::string(STEKISO_DATA_DIR) + "/tiles/" + name + ".tile");
    ASSERT_TRUE(in) << name;
    const auto u = read_tile_text(in);
    const auto t = builtin_tile(name);
    ASSERT_EQ(u.vertices().size(), t.vertices().size());
    for (std::size_t i = 0; i < t.vertices().size(); ++i) EXPECT_LT((u.vertices()[i] - t.vertices()[i]).norm(), 1e-15);
    EXPECT_NEAR(u.area(), t.area(), 1e-14);
  }
}

TEST(Refinement, CountsAndAreaAreExact) {
  const auto t = buser_tile();
  std::set<std::pair<int, int>> edges;
  for (const auto& tr : t.triangles())
    for (int k = 0; k < 3; ++k) edges.insert({std::min(tr[k], tr[(k + 1) % 3]), std::max(tr[k], tr[(k + 1) % 3])});
  const int V = static_cast<int>(t.vertices().size()), E = static_cast<int>(edges.size()),
            T = static_cast<int>(t.triangles().size());
  for (int m : {1, 2, 3, 5}) {
    const auto r = refine_tile(t, m);
    EXPECT_EQ(static_cast<int>(r.nodes.size()), V + E * (m - 1) + T * (m - 1) * (m - 2) / 2);
    EXPECT_EQ(static_cast<int>(r.triangles.size()), T * m * m);
    double a = 0;
    for (const auto& tr : r.triangles) {
      const double s = signed_area(r.nodes[tr[0]], r.nodes[tr[1]], r.nodes[tr[2]]);
      EXPECT_GT(s, 0);
      a += s;
    }
    EXPECT_NEAR(a, t.area(), 1e-12);
  }
  EXPECT_THROW(refine_tile(t, 0), InvalidInput);
}

TEST(Refinement, SymmetryNodeMapsAreIsometries) {
  const auto t = cross_tile();
  const auto r = refine_tile(t, 4);
  for (std::size_t s = 0; s < t.symmetries().size(); ++s) {
    const auto& map = r.symmetry_node_maps[s];
    std::set<int> image(map.begin(), map.end());
    EXPECT_EQ(image.size(), r.nodes.size());
    for (std::size_t i = 0; i < r.nodes.size(); ++i)
      EXPECT_LT((t.symmetries()[s].map(r.nodes[i]) - r.nodes[map[i]]).norm(), 1e-12);
  }
}

TEST(Surfaces, EulerCharacteristicAndMeasures) {
  const auto& s = scene();
  const auto t = s.tile;
  for (const auto* d : {&s.surface1, &s.surface2}) {
    for (int m : {2, 3}) {
      const Mesh mesh1 = mesh(*d, m);
      // 7 disks joined along 14 disjoint arcs
      EXPECT_EQ(euler_characteristic(mesh1), 7 - 14);
      EXPECT_NEAR(mesh1.area(), 7 * t.area(), 1e-10);
      EXPECT_NEAR(mesh1.boundary_length(), 7 * free_length(t), 1e-10);
      EXPECT_FALSE(mesh1.quotient);
    }
  }
}

TEST(Surfaces, SelfGluedTilesNeedRefinementTwo) {
  EXPECT_THROW(mesh(scene().surface1, 1), GeometryError);
}

TEST(Surfaces, DiametersDifferButBoundaryLengthsAgree) {
  const auto& s = scene();
  const Mesh m1 = mesh(s.surface1, 2), m2 = mesh(s.surface2, 2);
  const auto r = nonisometry_evidence(m1, m2);
  EXPECT_TRUE(r.diameters_differ());
  EXPECT_NEAR(r.length1, r.length2, 1e-10);
  const auto self = nonisometry_evidence(m1, m1);
  EXPECT_EQ(self.diameter1, self.diameter2);
  EXPECT_EQ(self.components1, self.components2);
  EXPECT_THROW(nonisometry_evidence(m1, mesh(s.surface2, 3)), InvalidInput);
}

TEST(Lifts, OnlyTheIdentityLeftTranslationCommutesWithTheDeckGroup) {
  const auto& s = scene();
  const auto lifts = cayley_lifts(s.gl.group, s.gens, s.tile);
  const int id = s.tile.symmetry_index("id");
  int translations = 0, commuting = 0;
  for (const auto& l : lifts) {
    if (l.symmetry != id) continue;
    ++translations;
    commuting += commutes_with_deck(s.gl.group, l);
  }
  EXPECT_EQ(translations, 168);
  EXPECT_EQ(commuting, 1);  // GL(3,2) has trivial centre
}

TEST(Lifts, SceneInvolutionIsVerified) {
  const auto& s = scene();
  EXPECT_TRUE(is_involutive(s.beta, s.tile));
  EXPECT_TRUE(commutes_with_deck(s.gl.group, s.beta));
  EXPECT_EQ(s.tile.symmetries()[s.beta.symmetry].name, "diag");
  for (const auto* q : {&s.quotient1, &s.quotient2}) {
    ASSERT_TRUE(q->involution.has_value());
    EXPECT_FALSE(q->mirror_edges.empty());
  }
}

TEST(Quotients, MeasuresHalveAndMirrorIsAdded) {
  const auto& s = scene();
  for (int m : {2, 4}) {
    GluedDomain cover = s.quotient1;
    cover.involution.reset();
    const Mesh mc = mesh(cover, m), mq = mesh(s.quotient1, m);
    EXPECT_TRUE(mq.quotient);
    EXPECT_TRUE(mq.two_sided);
    EXPECT_NEAR(mq.area(), mc.area() / 2, 1e-10);
    double free = 0, mirror = 0;
    for (const auto& e : mq.boundary) (e.tag == kMirrorTag ? mirror : free) += e.length;
    EXPECT_NEAR(free, mc.boundary_length() / 2, 1e-10);
    EXPECT_GT(mirror, 0);
    // fixed vertices are counted once, the others pair up
    int fixed = 0;
    std::set<int> mirror_vertices;
    for (const auto& e : mq.boundary)
      if (e.tag == kMirrorTag) mirror_vertices.insert({e.a, e.b});
    fixed = static_cast<int>(mirror_vertices.size());
    EXPECT_EQ(2 * mq.vertex_count - fixed, mc.vertex_count);
  }
}

TEST(Quotients, InvalidInvolutionsAreRejected) {
  const auto& s = scene();
  const int id = s.tile.symmetry_index("id");
  std::vector<int> identity(7);
  std::iota(identity.begin(), identity.end(), 0);
  EXPECT_THROW(quotient_by_involution(s.surface1, {identity, id}), GeometryError);
  std::vector<int> cycle{1, 2, 0, 3, 4, 5, 6};
  EXPECT_THROW(quotient_by_involution(s.surface1, {cycle, s.beta.symmetry}), GeometryError);
  // the diagonal reflection applied tile-by-tile does not respect the gluing
  EXPECT_THROW(quotient_by_involution(s.surface1, {identity, s.beta.symmetry}), GeometryError);
}

TEST(DensityScene, TauIsAVerifiedIsometryBetweenTheQuotients) {
  const auto d = density_scene();
  const auto& G = d.pair.gl.group;
  EXPECT_EQ(d.pair.gens[1], d.pair.gl.transpose_of(G.inv(d.pair.gens[0])));
  EXPECT_TRUE(lifts_commute(d.tau, d.pair.beta, d.pair.tile));
  const Mesh q1 = mesh(d.pair.quotient1, 2), q2 = mesh(d.pair.quotient2, 2);
  const auto iso = verify_isometry(q1, q2, d.tau_map);
  EXPECT_EQ(iso.tag_map.at(kMirrorTag), kMirrorTag);
  bool moves_a_class = false;
  for (const auto& [from, to] : iso.tag_map) moves_a_class |= from != to;
  EXPECT_TRUE(moves_a_class);
  DomainMap wrong = d.tau_map;
  wrong.symmetry = d.pair.tile.symmetry_index("id");
  EXPECT_THROW(verify_isometry(q1, q2, wrong), GeometryError);
}

TEST(MixedPairs, MembersHaveEqualAreaAndArcLength) {
  for (char w : {'M', 'P'}) {
    const auto p = mixed_pair(w);
    const Mesh a = mesh(p.first, 3), b = mesh(p.second, 3);
    EXPECT_NEAR(a.area(), b.area(), 1e-12);
    auto arc = [](const Mesh& m) {
      double l = 0;
      for (const auto& e : m.boundary)
        if (e.tag == "arc") l += e.length;
      return l;
    };
    EXPECT_NEAR(arc(a), arc(b), 1e-12);
    EXPECT_GT(arc(a), 0);
    const Eigen::Matrix2d I = p.T.transpose() * p.T;
    EXPECT_LE((I - Eigen::Matrix2d::Identity()).cwiseAbs().maxCoeff(), 1e-12);
  }
  EXPECT_THROW(mixed_pair('Q'), InvalidInput);
}
