#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "stekiso/scenes.hpp"
#include "stekiso/verify.hpp"

using namespace stekiso;

namespace {

const SurfacePairScene& scene() {
  static const SurfacePairScene s = buser_scene();
  return s;
}

BoundaryConditionMap mixed_bc(BoundaryCondition arc) {
  return {{"D", BoundaryCondition::dirichlet()}, {"N", BoundaryCondition::neumann()}, {"arc", arc}};
}

TileSpec scaled(const TileSpec& t, double s) {
  std::vector<Vec2> v;
  for (const auto& p : t.vertices()) v.push_back(s * p);
  std::vector<TileSymmetry> syms;
  for (const auto& y : t.symmetries()) syms.push_back({y.name, {y.map.a, y.map.b, s * y.map.c, y.map.d, y.map.e, s * y.map.f}});
  return TileSpec(t.name() + "_scaled", v, t.triangles(), t.sides(), syms);
}

}  // namespace

TEST(Compare, SelfComparisonAndParameterChecks) {
  const auto a = assemble(mesh(scene().surface1, 2), {{"*", BoundaryCondition::steklov(1.0)}});
  const auto s = steklov_spectrum(a, 0.0, 10);
  const auto r = compare_spectra(s, s, 1e-8);
  EXPECT_TRUE(r.pass);
  EXPECT_EQ(r.max_discrepancy(), 0.0);
  EXPECT_THROW(compare_spectra(s, steklov_spectrum(a, 0.5, 10), 1e-8), InvalidInput);
  EXPECT_THROW(compare_spectra(s, steklov_spectrum(a, 0.0, 9), 1e-8), InvalidInput);
  EXPECT_THROW(compare_spectra(s, robin_spectrum(a, 0.0, 10), 1e-8), InvalidInput);
  // denominator max(|x|, 1) near zero
  EXPECT_DOUBLE_EQ(relative_discrepancy(1e-14, -1e-14), 2e-14);
  EXPECT_DOUBLE_EQ(relative_discrepancy(100, 101), 1.0 / 101);
}

TEST(Compare, SquareAndDiskDiffer) {
  const auto sq = assemble(mesh(single_tile_domain(unit_square_tile(), "square"), 8), {{"*", BoundaryCondition::steklov(1.0)}});
  const auto dk = assemble(mesh(single_tile_domain(polygon_disk_tile(64), "disk"), 4), {{"*", BoundaryCondition::steklov(1.0)}});
  const auto r = compare_spectra(steklov_spectrum(sq, 0.0, 6), steklov_spectrum(dk, 0.0, 6), 1e-8, "square", "disk");
  EXPECT_FALSE(r.pass);
  const auto j = to_json(r);
  EXPECT_EQ(j["pair"][0], "square");
  EXPECT_EQ(j["points"][0]["parameter"], "alpha");
  EXPECT_FALSE(j["pass"].get<bool>());
}

TEST(Transplantation, IdentityIsADofPermutation) {
  const Mesh m = mesh(scene().surface1, 2);
  const auto a = assemble(m, {{"*", BoundaryCondition::steklov(1.0)}});
  const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(7, 7);
  const auto T = transplantation_operator(I, m, a, m, a);
  EXPECT_EQ(T.nonZeros(), a.free_count());
  EXPECT_EQ((Eigen::MatrixXd(T) - Eigen::MatrixXd::Identity(a.free_count(), a.free_count())).cwiseAbs().maxCoeff(), 0.0);
  const auto r = check_intertwining(T, T, a, a);
  EXPECT_EQ(r.max_residual(), 0.0);
  EXPECT_TRUE(r.invertible);
  EXPECT_THROW(transplantation_operator(Eigen::MatrixXd::Identity(6, 7), m, a, m, a), InvalidInput);
}

TEST(Transplantation, RejectsDiscontinuousTileMatrices) {
  const Mesh m = mesh(scene().surface1, 2);
  const auto a = assemble(m, {{"*", BoundaryCondition::steklov(1.0)}});
  Eigen::MatrixXd T = Eigen::MatrixXd::Identity(7, 7);
  T(0, 0) = 2;  // breaks continuity across every side of tile 0
  EXPECT_THROW(transplantation_operator(T, m, a, m, a), GeometryError);
}

TEST(Transplantation, BuserPairIntertwinesExactly) {
  const auto& s = scene();
  const Mesh m1 = mesh(s.surface1, 2), m2 = mesh(s.surface2, 2);
  const Eigen::MatrixXd T = to_double_matrix(s.intertwiner);
  for (const auto& bc : {BoundaryConditionMap{{"*", BoundaryCondition::steklov(1.0)}},
                         BoundaryConditionMap{{"*", BoundaryCondition::robin(0.7)}},
                         BoundaryConditionMap{{"*", BoundaryCondition::dirichlet()}}}) {
    const auto a1 = assemble(m1, bc), a2 = assemble(m2, bc);
    const auto Td = transplantation_operator(T, m2, a2, m1, a1);
    const auto Rd = transplantation_operator(T.transpose(), m1, a1, m2, a2);
    const auto r = check_intertwining(Td, Rd, a2, a1);
    EXPECT_LE(r.max_residual(), 1e-12);
    EXPECT_TRUE(r.invertible);
  }
}

TEST(Transplantation, MixedPairsIntertwineAndMapEigenvectors) {
  for (char w : {'M', 'P'}) {
    const auto p = mixed_pair(w);
    const Mesh a = mesh(p.first, 3), b = mesh(p.second, 3);
    const auto aa = assemble(a, mixed_bc(BoundaryCondition::robin(0.5))), ab = assemble(b, mixed_bc(BoundaryCondition::robin(0.5)));
    const auto Td = transplantation_operator(p.T, a, aa, b, ab);
    const auto Rd = transplantation_operator(p.T.transpose(), b, ab, a, aa);
    const auto r = check_intertwining(Td, Rd, aa, ab);
    EXPECT_LE(r.max_residual(), 1e-12) << w;
    // eigenvectors of the first member are carried to eigenvectors of the second
    const auto s = robin_spectrum(aa, 0.0, 6, true);
    for (int j = 0; j < 6; ++j) {
      const Eigen::VectorXd u = aa.restrict(s.vectors.col(j));
      const Eigen::VectorXd v = Td * u;
      ASSERT_GT(v.norm(), 0);
      const Eigen::VectorXd res = ab.K_eff * v - s.values[j] * (ab.M_free * v);
      EXPECT_LT(res.norm(), 1e-9 * (std::abs(s.values[j]) + 1) * (ab.M_free * v).norm() * 100);
    }
  }
}

TEST(Implication, IntertwiningImpliesSpectralAgreement) {
  // property over the example suite: vanishing residuals and invertible Tdof
  // force the comparison to pass for every problem kind
  const auto& s = scene();
  struct Case {
    const GluedDomain *x, *y;
    Eigen::MatrixXd T;
    BoundaryConditionMap bc;
  };
  std::vector<Case> cases;
  const Eigen::MatrixXd T = to_double_matrix(s.intertwiner);
  cases.push_back({&s.surface2, &s.surface1, T, {{"*", BoundaryCondition::steklov(1.0)}}});
  const auto pm = mixed_pair('M'), pp = mixed_pair('P');
  cases.push_back({&pm.first, &pm.second, pm.T, mixed_bc(BoundaryCondition::steklov(1.0))});
  cases.push_back({&pp.first, &pp.second, pp.T, mixed_bc(BoundaryCondition::steklov(1.0))});
  for (const auto& c : cases) {
    const Mesh mx = mesh(*c.x, 2), my = mesh(*c.y, 2);
    const auto ax = assemble(mx, c.bc), ay = assemble(my, c.bc);
    const auto r = check_intertwining(transplantation_operator(c.T, mx, ax, my, ay),
                                      transplantation_operator(c.T.transpose(), my, ay, mx, ax), ax, ay);
    ASSERT_LE(r.max_residual(), 1e-12);
    ASSERT_TRUE(r.invertible);
    EXPECT_TRUE(compare_spectra(steklov_spectrum(ax, 0.4, 12), steklov_spectrum(ay, 0.4, 12), 1e-8).pass);
    EXPECT_TRUE(compare_spectra(robin_spectrum(ax, 1.3, 12), robin_spectrum(ay, 1.3, 12), 1e-8).pass);
    EXPECT_TRUE(compare_spectra(neumann_spectrum(ax, 12), neumann_spectrum(ay, 12), 1e-8).pass);
  }
}

TEST(NegativeControls, PerturbedTileOnOneSideFails) {
  const auto& s = scene();
  const GluedDomain other = build_surface(s.graph2, scaled(s.tile, 1.01), "M2 scaled");
  const auto a1 = assemble(mesh(s.surface1, 2), {{"*", BoundaryCondition::steklov(1.0)}});
  const auto a2 = assemble(mesh(other, 2), {{"*", BoundaryCondition::steklov(1.0)}});
  EXPECT_FALSE(compare_spectra(steklov_spectrum(a1, 0.0, 10), steklov_spectrum(a2, 0.0, 10), 1e-8).pass);
}

TEST(NegativeControls, MismatchedSloshingDensityFails) {
  const auto& s = scene();
  EXPECT_TRUE(sloshing_pair_check(s.quotient1, s.quotient2, {{"*", 1.0}}, {{"*", 1.0}}, {0.0}, 10, 1e-8, 2).pass);
  EXPECT_FALSE(sloshing_pair_check(s.quotient1, s.quotient2, {{"*", 1.0}}, {{"*", 1.1}}, {0.0}, 10, 1e-8, 2).pass);
  EXPECT_THROW(sloshing_pair_check(s.surface1, s.surface2, {{"*", 1.0}}, {{"*", 1.0}}, {0.0}, 10, 1e-8, 2), InvalidInput);
}

TEST(Sloshing, TileConsistentNonconstantDensityPasses) {
  const auto& s = scene();
  const Mesh q = mesh(s.quotient1, 2);
  std::map<std::string, double> rho;
  double v = 0.5;
  for (const auto& tag : q.boundary_tags())
    if (tag != kMirrorTag) rho[tag] = (v += 0.3);
  const auto r = sloshing_pair_check(s.quotient1, s.quotient2, rho, rho, {0.0, 1.5}, 15, 1e-8, 2);
  EXPECT_TRUE(r.pass) << to_json(r).dump();
}

TEST(Density, TauPullbackPassesAndInvariantDensityIsDegenerate) {
  const auto d = density_scene();
  const Mesh q = mesh(d.pair.quotient1, 2);
  std::map<std::string, double> rho, flat;
  double v = 1.0;
  for (const auto& tag : q.boundary_tags())
    if (tag != kMirrorTag) {
      rho[tag] = (v += 0.25);
      flat[tag] = 1.0;
    }
  const auto r = density_pair_check(d.pair.quotient1, d.pair.quotient2, d.tau_map, rho, {0.0, 1.0}, 15, 1e-8, 2);
  EXPECT_TRUE(r.pass);
  EXPECT_FALSE(r.degenerate);
  EXPECT_GT(r.density_difference, 0.1);
  const auto f = density_pair_check(d.pair.quotient1, d.pair.quotient2, d.tau_map, flat, {0.0}, 15, 1e-8, 2);
  EXPECT_TRUE(f.degenerate);
  EXPECT_TRUE(f.comparison.pass);
  EXPECT_FALSE(f.pass);
  std::map<std::string, double> missing = rho;
  missing.erase(missing.begin());
  EXPECT_THROW(density_pair_check(d.pair.quotient1, d.pair.quotient2, d.tau_map, missing, {0.0}, 5, 1e-8, 2), InvalidInput);
}

TEST(Density, RandomDensityPairsFail) {
  const auto d = density_scene();
  const Mesh q = mesh(d.pair.quotient1, 2);
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.5, 2.0);
  for (int trial = 0; trial < 3; ++trial) {
    std::map<std::string, double> r1, r2;
    for (const auto& tag : q.boundary_tags())
      if (tag != kMirrorTag) {
        r1[tag] = u(rng);
        r2[tag] = u(rng);
      }
    EXPECT_FALSE(density_comparison(q, r1, r2, {0.0, 1.0}, 15, 1e-8).pass);
  }
}

TEST(Doubling, CoverSpectrumIsTheMergeOfMirrorProblems) {
  const auto& s = scene();
  for (const char* problem : {"steklov", "neumann"}) {
    const auto r = doubling_check(s.quotient2, {{"*", 1.0}}, problem, 0.0, 20, 1e-8, 2);
    EXPECT_TRUE(r.pass) << problem << " " << r.discrepancy;
    EXPECT_FALSE(r.odd.empty());
  }
  // densities keyed by quotient classes; each cover class inherits its orbit's value
  std::map<std::string, double> rho;
  double v = 1.0;
  for (const auto& tag : mesh(s.quotient2, 2).boundary_tags())
    if (tag != kMirrorTag) rho[tag] = (v += 0.3);
  const auto r = doubling_check(s.quotient2, rho, "steklov", 0.5, 20, 1e-8, 2);
  EXPECT_TRUE(r.pass) << r.discrepancy;
  EXPECT_THROW(doubling_check(s.surface1, {{"*", 1.0}}, "steklov", 0.0, 5, 1e-8, 2), InvalidInput);
}

TEST(Isometry, SceneQuotientsAreIsometricToThemselvesOnly) {
  const auto& s = scene();
  const Mesh q1 = mesh(s.quotient1, 2), q2 = mesh(s.quotient2, 2);
  std::vector<int> id(7);
  std::iota(id.begin(), id.end(), 0);
  const auto self = verify_isometry(q1, q1, {id, s.tile.symmetry_index("id")});
  for (const auto& [from, to] : self.tag_map) EXPECT_EQ(from, to);
  EXPECT_THROW(verify_isometry(q1, q2, {id, s.tile.symmetry_index("id")}), GeometryError);
}
