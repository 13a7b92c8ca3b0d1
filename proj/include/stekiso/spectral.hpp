#pragma once
// P1 finite elements on glued meshes: stiffness, mass and boundary mass
// matrices, Dirichlet / Neumann / Robin volume spectra, and the Steklov
// spectrum at frequency alpha through the Schur complement onto the boundary
// degrees of freedom that carry density.

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>

#include "stekiso/eigensolver.hpp"
#include "stekiso/error.hpp"
#include "stekiso/tiling.hpp"

namespace stekiso {

struct BoundaryCondition {
  enum class Kind { Dirichlet, Neumann, Robin, Steklov };
  Kind kind = Kind::Neumann;
  double value = 0;  // sigma for Robin, rho for Steklov

  static BoundaryCondition dirichlet() { return {Kind::Dirichlet, 0}; }
  static BoundaryCondition neumann() { return {Kind::Neumann, 0}; }
  static BoundaryCondition robin(double sigma) { return {Kind::Robin, sigma}; }
  static BoundaryCondition steklov(double rho) {
    if (!(rho >= 0)) throw InvalidInput("Steklov density must be nonnegative");
    return {Kind::Steklov, rho};
  }
  std::string describe() const {
    std::ostringstream os;
    os.precision(17);
    switch (kind) {
      case Kind::Dirichlet: return "dirichlet";
      case Kind::Neumann: return "neumann";
      case Kind::Robin: os << "robin:" << value; return os.str();
      case Kind::Steklov: os << "steklov:" << value; return os.str();
    }
    return "?";
  }
};

/// Per boundary tag; the key "*" covers tags that are not listed. Mirror
/// edges default to Neumann when neither they nor "*" are listed.
using BoundaryConditionMap = std::map<std::string, BoundaryCondition>;

inline BoundaryCondition parse_boundary_condition(const std::string& text) {
  const auto colon = text.find(':');
  const std::string kind = text.substr(0, colon);
  double v = 0;
  if (colon != std::string::npos) {
    try {
      std::size_t used = 0;
      v = std::stod(text.substr(colon + 1), &used);
      if (used != text.size() - colon - 1) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      throw InvalidInput("bad boundary condition value in '" + text + "'");
    }
  }
  if (kind == "dirichlet" || kind == "D") return BoundaryCondition::dirichlet();
  if (kind == "neumann" || kind == "N") return BoundaryCondition::neumann();
  if (kind == "robin" || kind == "R") return BoundaryCondition::robin(v);
  if (kind == "steklov" || kind == "S") return BoundaryCondition::steklov(colon == std::string::npos ? 1.0 : v);
  throw InvalidInput("unknown boundary condition '" + text + "'");
}

inline std::string describe(const BoundaryConditionMap& bc) {
  std::string out;
  for (const auto& [tag, c] : bc) out += (out.empty() ? "" : " ") + tag + "=" + c.describe();
  return out;
}

struct SpectralAssembly {
  int vertex_count = 0;
  int refinement = 0;
  std::string mesh_name;
  BoundaryConditionMap bc;     // resolved: one entry per boundary tag of the mesh
  SparseMatrix K, M;           // natural matrices on all vertices
  std::map<std::string, SparseMatrix> B;  // unweighted boundary mass per tag
  std::vector<int> free_dofs;  // vertices not on a Dirichlet edge, ascending
  std::vector<int> free_index; // vertex -> position in free_dofs or -1
  SparseMatrix K_eff;          // free block of K - sum_robin sigma_c B_c
  SparseMatrix M_free;
  SparseMatrix B_rho;          // free block of sum_steklov rho_c B_c

  int free_count() const { return static_cast<int>(free_dofs.size()); }
  bool has_dirichlet() const { return free_count() < vertex_count; }
  Eigen::VectorXd restrict(const Eigen::VectorXd& u) const {
    Eigen::VectorXd r(free_count());
    for (int i = 0; i < free_count(); ++i) r[i] = u[free_dofs[i]];
    return r;
  }
  Eigen::VectorXd extend(const Eigen::VectorXd& r) const {
    Eigen::VectorXd u = Eigen::VectorXd::Zero(vertex_count);
    for (int i = 0; i < free_count(); ++i) u[free_dofs[i]] = r[i];
    return u;
  }
};

namespace detail {

struct LocalMatrices {
  Eigen::Matrix3d K, M;
};

inline LocalMatrices p1_local(const std::array<Vec2, 3>& p) {
  const double area = signed_area(p[0], p[1], p[2]);
  if (!(area > 0)) throw GeometryError("degenerate or inverted triangle");
  Eigen::Matrix<double, 2, 3> g;  // gradients times 2*area
  for (int i = 0; i < 3; ++i) {
    const Vec2 a = p[(i + 1) % 3], b = p[(i + 2) % 3];
    g(0, i) = a.y - b.y;
    g(1, i) = b.x - a.x;
  }
  LocalMatrices lm;
  lm.K = g.transpose() * g / (4 * area);
  lm.M = Eigen::Matrix3d::Constant(area / 12);
  lm.M.diagonal().setConstant(area / 6);
  return lm;
}

inline SparseMatrix select(const SparseMatrix& a, const std::vector<int>& rows, const std::vector<int>& cols) {
  std::vector<int> rpos(a.rows(), -1), cpos(a.cols(), -1);
  for (std::size_t i = 0; i < rows.size(); ++i) rpos[rows[i]] = static_cast<int>(i);
  for (std::size_t i = 0; i < cols.size(); ++i) cpos[cols[i]] = static_cast<int>(i);
  std::vector<Eigen::Triplet<double>> t;
  for (int k = 0; k < a.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(a, k); it; ++it)
      if (rpos[it.row()] >= 0 && cpos[it.col()] >= 0) t.emplace_back(rpos[it.row()], cpos[it.col()], it.value());
  SparseMatrix out(static_cast<int>(rows.size()), static_cast<int>(cols.size()));
  out.setFromTriplets(t.begin(), t.end());
  return out;
}

}  // namespace detail

inline SpectralAssembly assemble(const Mesh& mesh, const BoundaryConditionMap& bc) {
  SpectralAssembly a;
  a.vertex_count = mesh.vertex_count;
  a.refinement = mesh.refinement();
  a.mesh_name = mesh.name;
  for (const auto& tag : mesh.boundary_tags()) {
    auto it = bc.find(tag);
    if (it == bc.end()) it = bc.find("*");
    if (it != bc.end()) a.bc[tag] = it->second;
    else if (tag == kMirrorTag) a.bc[tag] = BoundaryCondition::neumann();
    else throw InvalidInput("boundary class '" + tag + "' has no boundary condition");
  }
  for (const auto& [tag, c] : bc)
    if (tag != "*" && tag != kMirrorTag && !a.bc.count(tag)) throw InvalidInput("boundary condition given for unknown class '" + tag + "'");

  // per reference triangle, computed once and reused by every tile
  std::vector<detail::LocalMatrices> local;
  for (const auto& t : mesh.ref.triangles)
    local.push_back(detail::p1_local({mesh.ref.nodes[t[0]], mesh.ref.nodes[t[1]], mesh.ref.nodes[t[2]]}));
  std::vector<Eigen::Triplet<double>> tk, tm;
  tk.reserve(9 * mesh.triangles.size());
  tm.reserve(9 * mesh.triangles.size());
  for (const auto& t : mesh.triangles) {
    const auto& lm = local[t.ref];
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        tk.emplace_back(t.v[i], t.v[j], lm.K(i, j));
        tm.emplace_back(t.v[i], t.v[j], lm.M(i, j));
      }
  }
  const int n = mesh.vertex_count;
  a.K.resize(n, n);
  a.M.resize(n, n);
  a.K.setFromTriplets(tk.begin(), tk.end());
  a.M.setFromTriplets(tm.begin(), tm.end());
  std::map<std::string, std::vector<Eigen::Triplet<double>>> tb;
  std::vector<char> dirichlet(n, 0);
  for (const auto& e : mesh.boundary) {
    auto& t = tb[e.tag];
    const double d = e.length / 3, o = e.length / 6;
    t.emplace_back(e.a, e.a, d);
    t.emplace_back(e.b, e.b, d);
    t.emplace_back(e.a, e.b, o);
    t.emplace_back(e.b, e.a, o);
    if (a.bc.at(e.tag).kind == BoundaryCondition::Kind::Dirichlet) dirichlet[e.a] = dirichlet[e.b] = 1;
  }
  for (auto& [tag, t] : tb) {
    SparseMatrix b(n, n);
    b.setFromTriplets(t.begin(), t.end());
    a.B.emplace(tag, std::move(b));
  }
  a.free_index.assign(n, -1);
  for (int v = 0; v < n; ++v)
    if (!dirichlet[v]) {
      a.free_index[v] = static_cast<int>(a.free_dofs.size());
      a.free_dofs.push_back(v);
    }
  SparseMatrix keff = a.K, brho(n, n);
  for (const auto& [tag, c] : a.bc) {
    if (c.kind == BoundaryCondition::Kind::Robin) keff -= c.value * a.B.at(tag);
    if (c.kind == BoundaryCondition::Kind::Steklov) brho += c.value * a.B.at(tag);
  }
  a.K_eff = detail::select(keff, a.free_dofs, a.free_dofs);
  a.M_free = detail::select(a.M, a.free_dofs, a.free_dofs);
  a.B_rho = detail::select(brho, a.free_dofs, a.free_dofs);
  a.K_eff.prune(0.0);
  a.B_rho.prune(0.0);
  return a;
}

// ---------------------------------------------------------------------------
// Spectra

enum class ProblemKind { Dirichlet, Neumann, Robin, Steklov };

inline std::string to_string(ProblemKind k) {
  switch (k) {
    case ProblemKind::Dirichlet: return "dirichlet";
    case ProblemKind::Neumann: return "neumann";
    case ProblemKind::Robin: return "robin";
    case ProblemKind::Steklov: return "steklov";
  }
  return "?";
}

struct Spectrum {
  ProblemKind kind = ProblemKind::Steklov;
  double alpha = 0;
  double sigma = 0;
  std::string bc;  // boundary condition map, including the density
  int refinement = 0;
  int dofs = 0;
  double tolerance = 0;
  std::string solver;
  double max_residual = 0;
  std::vector<double> values;
  Eigen::MatrixXd vectors;  // optional, one column per value, on all vertices
};

namespace detail {

inline Spectrum volume_spectrum(const SpectralAssembly& a, const SparseMatrix& A, const SparseMatrix& M, int k,
                                bool want_vectors, const EigenOptions& opt, const std::vector<int>& dofs) {
  if (A.rows() == 0) throw InvalidInput("no degrees of freedom");
  const auto r = smallest_eigenpairs(A, M, std::min<int>(k, static_cast<int>(A.rows())), opt);
  if (r.values.size() < k) throw InvalidInput("requested more eigenvalues than degrees of freedom");
  Spectrum s;
  s.refinement = a.refinement;
  s.dofs = static_cast<int>(A.rows());
  s.tolerance = opt.tol;
  s.solver = r.method;
  s.max_residual = r.max_residual;
  s.values.assign(r.values.data(), r.values.data() + r.values.size());
  s.bc = describe(a.bc);
  if (want_vectors) {
    s.vectors = Eigen::MatrixXd::Zero(a.vertex_count, k);
    for (int j = 0; j < k; ++j)
      for (std::size_t i = 0; i < dofs.size(); ++i) s.vectors(dofs[i], j) = r.vectors(static_cast<Eigen::Index>(i), j);
  }
  return s;
}

}  // namespace detail

/// Eigenvalues alpha of (K - sigma B_rho - sum_robin sigma_c B_c) u = alpha M u
/// on the non-Dirichlet vertices: the Steklov classes carry the Robin
/// parameter sigma (scaled by their density), Robin classes their own value.
inline Spectrum robin_spectrum(const SpectralAssembly& a, double sigma, int k, bool want_vectors = false,
                               const EigenOptions& opt = {}) {
  const SparseMatrix A = a.K_eff - sigma * a.B_rho;
  auto s = detail::volume_spectrum(a, A, a.M_free, k, want_vectors, opt, a.free_dofs);
  s.kind = ProblemKind::Robin;
  s.sigma = sigma;
  return s;
}

inline Spectrum neumann_spectrum(const SpectralAssembly& a, int k, bool want_vectors = false, const EigenOptions& opt = {}) {
  auto s = robin_spectrum(a, 0.0, k, want_vectors, opt);
  s.kind = ProblemKind::Neumann;
  return s;
}

/// Volume spectrum with the density-carrying boundary vertices clamped as well.
inline Spectrum dirichlet_spectrum(const SpectralAssembly& a, int k, bool want_vectors = false, const EigenOptions& opt = {}) {
  std::vector<int> interior, dofs;
  const Eigen::VectorXd d = a.B_rho.diagonal();
  for (int i = 0; i < a.free_count(); ++i)
    if (!(d[i] > 0)) {
      interior.push_back(i);
      dofs.push_back(a.free_dofs[i]);
    }
  const SparseMatrix A = detail::select(a.K_eff, interior, interior), M = detail::select(a.M_free, interior, interior);
  auto s = detail::volume_spectrum(a, A, M, k, want_vectors, opt, dofs);
  s.kind = ProblemKind::Dirichlet;
  return s;
}

/// Schur complement of K_eff - alpha M onto the active boundary vertices
/// (free vertices where the density is positive).
struct DtNMatrix {
  double alpha = 0;
  std::vector<int> active;    // positions in the free numbering
  std::vector<int> interior;  // the eliminated free positions
  Eigen::MatrixXd S;          // symmetrized
  Eigen::MatrixXd B;          // B_rho restricted to active vertices
  double asymmetry = 0;       // ||S - S^T||_inf before symmetrization, relative to ||S||_inf
  double pivot_margin = 0;    // min |pivot| / ||A_ii||_inf
  int negative_pivots = 0;    // interior Dirichlet eigenvalues below alpha
  std::shared_ptr<Eigen::SimplicialLDLT<SparseMatrix>> interior_solver;
  SparseMatrix A_ib;

  /// Discrete harmonic extension (at frequency alpha) of active-vertex data
  /// to all free vertices.
  Eigen::VectorXd extend_free(const Eigen::VectorXd& x, int free_count) const {
    Eigen::VectorXd u = Eigen::VectorXd::Zero(free_count);
    for (std::size_t i = 0; i < active.size(); ++i) u[active[i]] = x[static_cast<Eigen::Index>(i)];
    if (!interior.empty()) {
      const Eigen::VectorXd ui = -interior_solver->solve(A_ib * x);
      for (std::size_t i = 0; i < interior.size(); ++i) u[interior[i]] = ui[static_cast<Eigen::Index>(i)];
    }
    return u;
  }
};

struct DtNOptions {
  double pivot_margin = 1e-8;
  int chunk = 64;
};

inline DtNMatrix dtn_matrix(const SpectralAssembly& a, double alpha, const DtNOptions& opt = {}) {
  DtNMatrix d;
  d.alpha = alpha;
  const Eigen::VectorXd diag = a.B_rho.diagonal();
  for (int i = 0; i < a.free_count(); ++i) (diag[i] > 0 ? d.active : d.interior).push_back(i);
  if (d.active.empty()) throw InvalidInput("no boundary vertex carries positive density");
  const SparseMatrix A = a.K_eff - alpha * a.M_free;
  const SparseMatrix A_bb = detail::select(A, d.active, d.active);
  d.S = Eigen::MatrixXd(A_bb);
  d.B = Eigen::MatrixXd(detail::select(a.B_rho, d.active, d.active));
  if (!d.interior.empty()) {
    const SparseMatrix A_ii = detail::select(A, d.interior, d.interior);
    d.A_ib = detail::select(A, d.interior, d.active);
    d.interior_solver = std::make_shared<Eigen::SimplicialLDLT<SparseMatrix>>(A_ii);
    if (d.interior_solver->info() != Eigen::Success) throw FrequencyTooClose("interior factorization failed", 0);
    const auto& D = d.interior_solver->vectorD();
    d.pivot_margin = D.cwiseAbs().minCoeff() / detail::inf_norm(A_ii);
    d.negative_pivots = static_cast<int>((D.array() < 0).count());
    if (!(d.pivot_margin >= opt.pivot_margin)) {
      std::ostringstream os;
      os << "alpha = " << alpha << " is too close to the interior Dirichlet spectrum (pivot margin " << d.pivot_margin
         << ")";
      throw FrequencyTooClose(os.str(), d.pivot_margin);
    }
    const SparseMatrix A_bi = d.A_ib.transpose();
    const int nb = static_cast<int>(d.active.size());
    for (int c0 = 0; c0 < nb; c0 += opt.chunk) {
      const int w = std::min(opt.chunk, nb - c0);
      const Eigen::MatrixXd rhs = Eigen::MatrixXd(d.A_ib.middleCols(c0, w));
      const Eigen::MatrixXd x = d.interior_solver->solve(rhs);
      d.S.middleCols(c0, w) -= A_bi * x;
    }
  }
  const double norm = d.S.cwiseAbs().rowwise().sum().maxCoeff();
  d.asymmetry = (d.S - d.S.transpose()).cwiseAbs().rowwise().sum().maxCoeff() / std::max(norm, 1e-300);
  d.S = 0.5 * (d.S + d.S.transpose()).eval();
  return d;
}

/// Smallest k eigenvalues sigma of S(alpha) x = sigma B_rho x.
inline Spectrum steklov_spectrum(const SpectralAssembly& a, double alpha, int k, bool want_vectors = false,
                                 const DtNOptions& opt = {}) {
  const DtNMatrix d = dtn_matrix(a, alpha, opt);
  const int nb = static_cast<int>(d.active.size());
  if (k > nb) throw InvalidInput("requested " + std::to_string(k) + " Steklov eigenvalues but only " + std::to_string(nb) +
                                 " boundary degrees of freedom carry density");
  const auto r = dense_smallest(d.S, d.B, k);
  Spectrum s;
  s.kind = ProblemKind::Steklov;
  s.alpha = alpha;
  s.bc = describe(a.bc);
  s.refinement = a.refinement;
  s.dofs = nb;
  s.tolerance = 1e-12;
  s.solver = "schur-complement+dense";
  s.max_residual = r.max_residual;
  s.values.assign(r.values.data(), r.values.data() + k);
  if (want_vectors) {
    s.vectors.resize(a.vertex_count, k);
    for (int j = 0; j < k; ++j) s.vectors.col(j) = a.extend(d.extend_free(r.vectors.col(j), a.free_count()));
  }
  return s;
}

/// (u^T K_eff u - alpha u^T M u) / (u^T B_rho u) for a vector on all vertices;
/// entries on Dirichlet vertices are ignored.
inline double rayleigh_quotient(const SpectralAssembly& a, const Eigen::VectorXd& u, double alpha) {
  if (u.size() != a.vertex_count) throw InvalidInput("vector length does not match the vertex count");
  const Eigen::VectorXd r = a.restrict(u);
  const double den = r.dot(a.B_rho * r);
  if (!(den > 0)) throw InvalidInput("Rayleigh quotient denominator u^T B_rho u is zero");
  return (r.dot(a.K_eff * r) - alpha * r.dot(a.M_free * r)) / den;
}

// ---------------------------------------------------------------------------
// Export

inline void write_spectrum_csv(std::ostream& os, const Spectrum& s, bool header = true) {
  if (header) os << "index,eigenvalue,problem,alpha,sigma,refinement\n";
  os.precision(17);
  for (std::size_t i = 0; i < s.values.size(); ++i)
    os << i << ',' << s.values[i] << ',' << to_string(s.kind) << ',' << s.alpha << ',' << s.sigma << ',' << s.refinement
       << '\n';
}

inline void write_triplets(std::ostream& os, const SparseMatrix& a) {
  os.precision(17);
  for (int k = 0; k < a.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(a, k); it; ++it) os << it.row() << ' ' << it.col() << ' ' << it.value() << '\n';
}

inline void write_triplets(std::ostream& os, const Eigen::MatrixXd& a) {
  os.precision(17);
  for (Eigen::Index c = 0; c < a.cols(); ++c)
    for (Eigen::Index r = 0; r < a.rows(); ++r)
      if (a(r, c) != 0) os << r << ' ' << c << ' ' << a(r, c) << '\n';
}

}  // namespace stekiso
