#pragma once
// Verification pipelines: spectrum comparison, discrete transplantation,
// isometry checks between glued meshes, sloshing and density pairs, the
// doubling identity and nonisometry evidence.

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SparseLU>

#include "json.hpp"
#include "stekiso/finite_groups.hpp"
#include "stekiso/lifts.hpp"
#include "stekiso/spectral.hpp"
#include "stekiso/tiling.hpp"

namespace stekiso {

using json = nlohmann::ordered_json;

struct Tolerances {
  double exact = 1e-12;     // algebraic identities
  double spectral = 1e-8;   // eigenvalue agreement
  double oracle = 1e-2;     // analytic oracles at the finest refinement
};

// ---------------------------------------------------------------------------
// Spectrum comparison

inline double relative_discrepancy(double x, double y) {
  return std::abs(x - y) / std::max({std::abs(x), std::abs(y), 1.0});
}

struct ComparisonPoint {
  std::string parameter;  // "alpha" or "sigma" or "none"
  double value = 0;
  double discrepancy = 0;
  int worst_index = 0;
  bool pass = false;
  std::vector<double> first, second;
};

struct ComparisonReport {
  std::string first_id, second_id;
  std::string problem;
  int k = 0;
  double tolerance = 0;
  std::vector<ComparisonPoint> points;
  bool pass = true;
  json metadata = json::object();

  void add(ComparisonPoint p) {
    pass = pass && p.pass;
    points.push_back(std::move(p));
  }
  double max_discrepancy() const {
    double m = 0;
    for (const auto& p : points) m = std::max(m, p.discrepancy);
    return m;
  }
};

inline ComparisonPoint compare_values(const std::vector<double>& a, const std::vector<double>& b, double tol) {
  if (a.size() != b.size()) throw InvalidInput("spectra have different lengths");
  ComparisonPoint p;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = relative_discrepancy(a[i], b[i]);
    if (d > p.discrepancy) {
      p.discrepancy = d;
      p.worst_index = static_cast<int>(i);
    }
  }
  p.pass = p.discrepancy <= tol;
  p.first = a;
  p.second = b;
  return p;
}

inline ComparisonReport compare_spectra(const Spectrum& s1, const Spectrum& s2, double tol,
                                        const std::string& id1 = "first", const std::string& id2 = "second") {
  if (s1.kind != s2.kind) throw InvalidInput("cannot compare " + to_string(s1.kind) + " with " + to_string(s2.kind));
  if (s1.values.size() != s2.values.size()) throw InvalidInput("spectra have different k");
  if (s1.alpha != s2.alpha || s1.sigma != s2.sigma) throw InvalidInput("spectra were computed at different parameters");
  ComparisonReport r;
  r.first_id = id1;
  r.second_id = id2;
  r.problem = to_string(s1.kind);
  r.k = static_cast<int>(s1.values.size());
  r.tolerance = tol;
  auto p = compare_values(s1.values, s2.values, tol);
  if (s1.kind == ProblemKind::Steklov) {
    p.parameter = "alpha";
    p.value = s1.alpha;
  } else if (s1.kind == ProblemKind::Robin) {
    p.parameter = "sigma";
    p.value = s1.sigma;
  } else {
    p.parameter = "none";
  }
  r.add(std::move(p));
  r.metadata["refinement"] = s1.refinement;
  r.metadata["solver"] = s1.solver;
  r.metadata["dofs"] = {s1.dofs, s2.dofs};
  return r;
}

/// Appends the points of `other` (same ids and problem) to `r`.
inline void merge_report(ComparisonReport& r, const ComparisonReport& other) {
  for (const auto& p : other.points) r.add(p);
}

inline json to_json(const ComparisonReport& r) {
  json j;
  j["pair"] = {r.first_id, r.second_id};
  j["problem"] = r.problem;
  j["k"] = r.k;
  j["tolerance"] = r.tolerance;
  j["pass"] = r.pass;
  j["max_discrepancy"] = r.max_discrepancy();
  json pts = json::array();
  for (const auto& p : r.points) {
    json q;
    q["parameter"] = p.parameter;
    q["value"] = p.value;
    q["discrepancy"] = p.discrepancy;
    q["worst_index"] = p.worst_index;
    q["pass"] = p.pass;
    q["first"] = p.first;
    q["second"] = p.second;
    pts.push_back(q);
  }
  j["points"] = pts;
  j["metadata"] = r.metadata;
  return j;
}

// ---------------------------------------------------------------------------
// Transplantation

/// Tile-wise transplantation between the non-Dirichlet vertex spaces of two
/// meshes built from the same reference tile:
///   (Tdof u)(tile j, node p) = sum_i T(j, i) u(tile i, node p).
/// Every representative of a destination vertex must give the same
/// combination, and destination Dirichlet vertices must receive zero.
inline SparseMatrix transplantation_operator(const Eigen::MatrixXd& T, const Mesh& src, const SpectralAssembly& a_src,
                                             const Mesh& dst, const SpectralAssembly& a_dst, double tol = 1e-14) {
  if (src.ref.nodes.size() != dst.ref.nodes.size() || src.refinement() != dst.refinement())
    throw InvalidInput("transplantation needs meshes of the same tile and refinement");
  for (std::size_t p = 0; p < src.ref.nodes.size(); ++p)
    if ((src.ref.nodes[p] - dst.ref.nodes[p]).norm() > 1e-14) throw InvalidInput("meshes use different reference tiles");
  if (T.rows() != dst.tile_count || T.cols() != src.tile_count) throw InvalidInput("tile matrix has the wrong shape");
  const int np = static_cast<int>(src.ref.nodes.size());
  std::vector<std::map<int, double>> rows(a_dst.free_count());
  std::vector<char> set(a_dst.free_count(), 0);
  for (int j = 0; j < dst.tile_count; ++j)
    for (int p = 0; p < np; ++p) {
      std::map<int, double> row;
      for (int i = 0; i < src.tile_count; ++i) {
        if (T(j, i) == 0) continue;
        const int f = a_src.free_index[src.local_to_global[i][p]];
        if (f >= 0) row[f] += T(j, i);
      }
      for (auto it = row.begin(); it != row.end();) it = std::abs(it->second) <= tol ? row.erase(it) : std::next(it);
      const int fd = a_dst.free_index[dst.local_to_global[j][p]];
      if (fd < 0) {
        if (!row.empty()) throw GeometryError("transplantation does not vanish on a Dirichlet vertex");
        continue;
      }
      if (!set[fd]) {
        rows[fd] = std::move(row);
        set[fd] = 1;
        continue;
      }
      auto& ref = rows[fd];
      bool same = ref.size() == row.size();
      for (auto a = ref.begin(), b = row.begin(); same && a != ref.end(); ++a, ++b)
        same = a->first == b->first && std::abs(a->second - b->second) <= tol;
      if (!same) throw GeometryError("transplantation is discontinuous across a gluing");
    }
  std::vector<Eigen::Triplet<double>> t;
  for (int r = 0; r < a_dst.free_count(); ++r)
    for (const auto& [c, v] : rows[r]) t.emplace_back(r, c, v);
  SparseMatrix out(a_dst.free_count(), a_src.free_count());
  out.setFromTriplets(t.begin(), t.end());
  return out;
}

struct IntertwiningReport {
  // ||A_dst Tdof - R^T A_src|| / (||A_dst|| ||Tdof||), R the transplantation by T^T backwards
  std::map<std::string, double> residual;
  // ||A_dst Tdof - Tdof A_src|| / (||A_dst|| ||Tdof||): vanishes only for vertex-orthogonal Tdof
  std::map<std::string, double> commutator;
  bool square = false;
  bool invertible = false;
  double max_residual() const {
    double m = 0;
    for (const auto& [k, v] : residual) m = std::max(m, v);
    return m;
  }
};

inline json to_json(const IntertwiningReport& r) {
  json j;
  j["residual"] = r.residual;
  j["commutator"] = r.commutator;
  j["max_residual"] = r.max_residual();
  j["square"] = r.square;
  j["invertible"] = r.invertible;
  return j;
}

inline IntertwiningReport check_intertwining(const SparseMatrix& Tdof, const SparseMatrix& Rdof, const SpectralAssembly& a_src,
                                             const SpectralAssembly& a_dst) {
  if (Tdof.rows() != a_dst.free_count() || Tdof.cols() != a_src.free_count() || Rdof.rows() != a_src.free_count() ||
      Rdof.cols() != a_dst.free_count())
    throw InvalidInput("transplantation operators do not match the assemblies");
  IntertwiningReport r;
  const double tn = detail::inf_norm(Tdof);
  auto rel = [&](const SparseMatrix& ad, const SparseMatrix& as, const std::string& name) {
    const double scale = std::max(detail::inf_norm(ad), detail::inf_norm(as)) * std::max(tn, 1e-300);
    if (scale == 0) {
      r.residual[name] = 0;
      r.commutator[name] = 0;
      return;
    }
    const SparseMatrix lhs = ad * Tdof;
    r.residual[name] = detail::inf_norm(SparseMatrix(lhs - SparseMatrix(Rdof.transpose()) * as)) / scale;
    if (Tdof.rows() == Tdof.cols()) r.commutator[name] = detail::inf_norm(SparseMatrix(lhs - Tdof * as)) / scale;
  };
  rel(a_dst.K_eff, a_src.K_eff, "K");
  rel(a_dst.M_free, a_src.M_free, "M");
  rel(a_dst.B_rho, a_src.B_rho, "B_rho");
  r.square = Tdof.rows() == Tdof.cols();
  if (r.square) {
    // LU with partial pivoting; a failed or inaccurate solve counts as singular
    SparseMatrix tc = Tdof;
    tc.makeCompressed();
    Eigen::SparseLU<SparseMatrix> lu;
    lu.compute(tc);
    if (lu.info() == Eigen::Success && std::isfinite(lu.logAbsDeterminant())) {
      const Eigen::VectorXd b = Eigen::VectorXd::LinSpaced(tc.rows(), 1.0, 2.0);
      const Eigen::VectorXd x = lu.solve(b);
      r.invertible = lu.info() == Eigen::Success && x.allFinite() && (tc * x - b).norm() <= 1e-10 * b.norm();
    }
  }
  return r;
}

// ---------------------------------------------------------------------------
// Isometries between glued meshes

struct IsometryCheck {
  std::vector<int> vertex_map;                   // mesh1 vertex -> mesh2 vertex
  std::map<std::string, std::string> tag_map;    // boundary class of mesh1 -> class of its image
};

/// Verifies that (tile t, node p) -> (tile_map[t], sym(p)) is a simplicial
/// isomorphism mesh1 -> mesh2 carrying boundary edges to boundary edges.
inline IsometryCheck verify_isometry(const Mesh& m1, const Mesh& m2, const DomainMap& map) {
  if (m1.ref.nodes.size() != m2.ref.nodes.size() || static_cast<int>(map.tile_map.size()) != m1.tile_count)
    throw GeometryError("isometry check needs meshes of the same tile and refinement");
  if (m1.vertex_count != m2.vertex_count || m1.triangles.size() != m2.triangles.size())
    throw GeometryError("meshes have different sizes");
  const auto& node_map = m1.ref.symmetry_node_maps.at(map.symmetry);
  IsometryCheck out;
  out.vertex_map.assign(m1.vertex_count, -1);
  for (int t = 0; t < m1.tile_count; ++t)
    for (std::size_t p = 0; p < m1.ref.nodes.size(); ++p) {
      const int v = m1.local_to_global[t][p];
      const int w = m2.local_to_global[map.tile_map[t]][node_map[p]];
      if (out.vertex_map[v] >= 0 && out.vertex_map[v] != w) throw GeometryError("map is not well defined on glued vertices");
      out.vertex_map[v] = w;
    }
  std::vector<char> hit(m2.vertex_count, 0);
  for (int w : out.vertex_map) {
    if (w < 0 || hit[w]) throw GeometryError("map is not a bijection of vertices");
    hit[w] = 1;
  }
  auto key = [](std::array<int, 3> a) {
    std::sort(a.begin(), a.end());
    return a;
  };
  std::set<std::array<int, 3>> tris2;
  for (const auto& t : m2.triangles) tris2.insert(key(t.v));
  for (const auto& t : m1.triangles)
    if (!tris2.count(key({out.vertex_map[t.v[0]], out.vertex_map[t.v[1]], out.vertex_map[t.v[2]]})))
      throw GeometryError("map does not carry triangles to triangles");
  std::map<std::pair<int, int>, std::string> edges2;
  for (const auto& e : m2.boundary) edges2[detail::edge_key(e.a, e.b)] = e.tag;
  for (const auto& e : m1.boundary) {
    auto it = edges2.find(detail::edge_key(out.vertex_map[e.a], out.vertex_map[e.b]));
    if (it == edges2.end()) throw GeometryError("map does not carry boundary edges to boundary edges");
    auto [pos, fresh] = out.tag_map.try_emplace(e.tag, it->second);
    if (pos->second != it->second) throw GeometryError("boundary class " + e.tag + " is split by the map");
  }
  return out;
}

// ---------------------------------------------------------------------------
// Pair checks

inline BoundaryConditionMap steklov_bc(const std::map<std::string, double>& rho) {
  BoundaryConditionMap bc;
  for (const auto& [tag, r] : rho) bc[tag] = BoundaryCondition::steklov(r);
  bc[kMirrorTag] = BoundaryCondition::neumann();
  return bc;
}

/// Mixed Neumann-Steklov spectra of two involution quotients with density rho
/// on free classes and zero on mirror edges.
inline ComparisonReport sloshing_pair_check(const GluedDomain& q1, const GluedDomain& q2, const std::map<std::string, double>& rho1,
                                            const std::map<std::string, double>& rho2, const std::vector<double>& alphas,
                                            int k, double tol, int refinement) {
  if (!q1.involution || !q2.involution) throw InvalidInput("sloshing check needs two involution quotients");
  const Mesh m1 = mesh(q1, refinement), m2 = mesh(q2, refinement);
  const auto a1 = assemble(m1, steklov_bc(rho1)), a2 = assemble(m2, steklov_bc(rho2));
  ComparisonReport r;
  r.first_id = q1.name;
  r.second_id = q2.name;
  r.problem = "steklov";
  r.k = k;
  r.tolerance = tol;
  for (double alpha : alphas) {
    const auto s1 = steklov_spectrum(a1, alpha, k), s2 = steklov_spectrum(a2, alpha, k);
    merge_report(r, compare_spectra(s1, s2, tol, q1.name, q2.name));
  }
  r.metadata["refinement"] = refinement;
  r.metadata["dofs"] = {a1.free_count(), a2.free_count()};
  return r;
}

struct DensityReport {
  ComparisonReport comparison;
  std::map<std::string, double> rho, pulled_back;
  double density_difference = 0;  // max |rho - tau* rho|
  bool degenerate = false;        // rho is tau-invariant: equality is trivial
  bool pass = false;              // comparison passes and the pair is not degenerate
};

inline json to_json(const DensityReport& r) {
  json j = to_json(r.comparison);
  j["rho"] = r.rho;
  j["tau_pullback_rho"] = r.pulled_back;
  j["density_difference"] = r.density_difference;
  j["degenerate"] = r.degenerate;
  j["pass"] = r.pass;
  return j;
}

/// tau maps domain1 onto domain2 (which realizes the conjugate subgroup);
/// compares Stek(M1, rho) with Stek(M1, rho o tau).
inline DensityReport density_pair_check(const GluedDomain& d1, const GluedDomain& d2, const DomainMap& tau,
                                        const std::map<std::string, double>& rho, const std::vector<double>& alphas, int k,
                                        double tol, int refinement) {
  const Mesh m1 = mesh(d1, refinement), m2 = mesh(d2, refinement);
  const auto iso = verify_isometry(m1, m2, tau);
  DensityReport out;
  out.rho = rho;
  for (const auto& [tag, image] : iso.tag_map) {
    if (tag == kMirrorTag) continue;
    if (!rho.count(tag) || !rho.count(image)) throw InvalidInput("density missing for boundary class " + tag);
    out.pulled_back[tag] = rho.at(image);
    out.density_difference = std::max(out.density_difference, std::abs(rho.at(tag) - rho.at(image)));
  }
  out.degenerate = out.density_difference <= 1e-12;
  const auto a = assemble(m1, steklov_bc(rho)), b = assemble(m1, steklov_bc(out.pulled_back));
  auto& r = out.comparison;
  r.first_id = d1.name + ":rho";
  r.second_id = d1.name + ":tau*rho";
  r.problem = "steklov";
  r.k = k;
  r.tolerance = tol;
  for (double alpha : alphas) merge_report(r, compare_spectra(steklov_spectrum(a, alpha, k), steklov_spectrum(b, alpha, k), tol));
  r.metadata["refinement"] = refinement;
  out.pass = r.pass && !out.degenerate;
  return out;
}

/// Same comparison for an arbitrary pair of densities on one domain.
inline ComparisonReport density_comparison(const Mesh& m, const std::map<std::string, double>& rho1,
                                           const std::map<std::string, double>& rho2, const std::vector<double>& alphas, int k,
                                           double tol) {
  const auto a = assemble(m, steklov_bc(rho1)), b = assemble(m, steklov_bc(rho2));
  ComparisonReport r;
  r.first_id = m.name + ":rho1";
  r.second_id = m.name + ":rho2";
  r.problem = "steklov";
  r.k = k;
  r.tolerance = tol;
  for (double alpha : alphas) merge_report(r, compare_spectra(steklov_spectrum(a, alpha, k), steklov_spectrum(b, alpha, k), tol));
  return r;
}

// ---------------------------------------------------------------------------
// Doubling

struct DoublingReport {
  std::vector<double> surface, even, odd, merged;
  double discrepancy = 0;
  bool pass = false;
};

inline json to_json(const DoublingReport& r) {
  return json{{"surface", r.surface}, {"even", r.even}, {"odd", r.odd}, {"merged", r.merged},
              {"discrepancy", r.discrepancy}, {"pass", r.pass}};
}

/// The spectrum of the cover equals the sorted union of the quotient spectra
/// with Neumann and with Dirichlet conditions on the mirror.
/// `problem` is "steklov" (at alpha) or "neumann".
inline DoublingReport doubling_check(const GluedDomain& quotient, const std::map<std::string, double>& rho,
                                     const std::string& problem, double alpha, int k, double tol, int refinement) {
  if (!quotient.involution) throw InvalidInput("doubling check needs an involution quotient");
  GluedDomain cover = quotient;
  cover.involution.reset();
  cover.mirror_edges.clear();
  const Mesh mc = mesh(cover, refinement), mq = mesh(quotient, refinement);
  if (!mq.two_sided) throw GeometryError("mirror does not separate the cover; odd functions have no planar model");
  BoundaryConditionMap bc_even = steklov_bc(rho), bc_odd = steklov_bc(rho);
  bc_odd[kMirrorTag] = BoundaryCondition::dirichlet();
  // cover classes take the density of their orbit
  BoundaryConditionMap bc_cover;
  for (const auto& tag : mc.boundary_tags()) {
    const auto q = detail::orbit_tag(quotient.tile, quotient.involution->symmetry, tag);
    if (rho.count(q)) bc_cover[tag] = BoundaryCondition::steklov(rho.at(q));
  }
  if (rho.count("*")) bc_cover["*"] = BoundaryCondition::steklov(rho.at("*"));
  const auto ac = assemble(mc, bc_cover), ae = assemble(mq, bc_even), ao = assemble(mq, bc_odd);
  auto solve = [&](const SpectralAssembly& a) {
    if (problem == "steklov") return steklov_spectrum(a, alpha, k).values;
    if (problem == "neumann") return neumann_spectrum(a, k).values;
    throw InvalidInput("doubling check supports steklov and neumann");
  };
  DoublingReport r;
  r.surface = solve(ac);
  r.even = solve(ae);
  r.odd = solve(ao);
  r.merged = r.even;
  r.merged.insert(r.merged.end(), r.odd.begin(), r.odd.end());
  std::sort(r.merged.begin(), r.merged.end());
  r.merged.resize(k);
  for (int i = 0; i < k; ++i) r.discrepancy = std::max(r.discrepancy, relative_discrepancy(r.surface[i], r.merged[i]));
  r.pass = r.discrepancy <= tol;
  return r;
}

// ---------------------------------------------------------------------------
// Nonisometry evidence

struct NonisometryReport {
  int diameter1 = 0, diameter2 = 0;
  std::vector<double> components1, components2;
  double length1 = 0, length2 = 0;
  bool diameters_differ() const { return diameter1 != diameter2; }
};

inline NonisometryReport nonisometry_evidence(const Mesh& m1, const Mesh& m2) {
  if (m1.refinement() != m2.refinement()) throw InvalidInput("nonisometry evidence needs equal refinement");
  NonisometryReport r;
  r.diameter1 = combinatorial_diameter(m1);
  r.diameter2 = combinatorial_diameter(m2);
  r.components1 = boundary_component_lengths(m1);
  r.components2 = boundary_component_lengths(m2);
  r.length1 = m1.boundary_length();
  r.length2 = m2.boundary_length();
  return r;
}

inline json to_json(const NonisometryReport& r) {
  return json{{"diameters", {r.diameter1, r.diameter2}},
              {"diameters_differ", r.diameters_differ()},
              {"boundary_components", {r.components1.size(), r.components2.size()}},
              {"component_lengths", {r.components1, r.components2}},
              {"boundary_length", {r.length1, r.length2}}};
}

}  // namespace stekiso
