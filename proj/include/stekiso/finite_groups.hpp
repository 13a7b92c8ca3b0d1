#pragma once
// Finite groups as multiplication tables: closure from generators, subgroups,
// conjugacy classes, right coset actions, Gassmann (almost-conjugacy) tests and
// exact intertwiners between coset permutation representations.

#include <algorithm>
#include <cstdint>
#include <functional>
#include <istream>
#include <map>
#include <numeric>
#include <optional>
#include <ostream>
#include <random>
#include <sstream>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "stekiso/error.hpp"

namespace stekiso {

/// Permutation of {0, ..., d-1} given by its image list.
using Permutation = std::vector<int>;

/// 3x3 matrix over F_2 packed into 9 bits; bit 3*r + c holds entry (r, c).
struct F2Matrix3 {
  std::uint16_t bits = 0;

  static constexpr F2Matrix3 identity() { return F2Matrix3{0b100010001}; }

  constexpr bool at(int r, int c) const { return (bits >> (3 * r + c)) & 1u; }
  constexpr void set(int r, int c, bool v) {
    const auto mask = static_cast<std::uint16_t>(1u << (3 * r + c));
    bits = v ? static_cast<std::uint16_t>(bits | mask) : static_cast<std::uint16_t>(bits & ~mask);
  }

  friend constexpr F2Matrix3 operator*(F2Matrix3 a, F2Matrix3 b) {
    F2Matrix3 out;
    for (int r = 0; r < 3; ++r)
      for (int c = 0; c < 3; ++c) {
        bool v = false;
        for (int k = 0; k < 3; ++k) v ^= a.at(r, k) && b.at(k, c);
        out.set(r, c, v);
      }
    return out;
  }
  friend constexpr bool operator==(F2Matrix3 a, F2Matrix3 b) { return a.bits == b.bits; }

  constexpr F2Matrix3 transpose() const {
    F2Matrix3 out;
    for (int r = 0; r < 3; ++r)
      for (int c = 0; c < 3; ++c) out.set(c, r, at(r, c));
    return out;
  }

  constexpr bool invertible() const {
    // determinant over F_2 by cofactor expansion along the first row
    const bool m0 = (at(1, 1) && at(2, 2)) != (at(1, 2) && at(2, 1));
    const bool m1 = (at(1, 0) && at(2, 2)) != (at(1, 2) && at(2, 0));
    const bool m2 = (at(1, 0) && at(2, 1)) != (at(1, 1) && at(2, 0));
    return ((at(0, 0) && m0) != (at(0, 1) && m1)) != (at(0, 2) && m2);
  }

  /// Rows separated by '/', e.g. "100/010/001".
  std::string label() const {
    std::string s;
    for (int r = 0; r < 3; ++r) {
      if (r) s += '/';
      for (int c = 0; c < 3; ++c) s += at(r, c) ? '1' : '0';
    }
    return s;
  }
};

struct GroupBuildOptions {
  std::size_t closure_cap = 1'000'000;
  // The multiplication table is materialized, so its n^2 entries bound the
  // usable order well below the closure cap.
  std::size_t table_cap = 20'000;
};

class FiniteGroup {
 public:
  FiniteGroup() = default;

  /// Validates the table (identity, inverses, closure, associativity) and
  /// caches conjugacy classes. Associativity is checked exhaustively for
  /// n <= 500 and on 200000 sampled triples above that.
  FiniteGroup(int order, std::vector<int> table, int identity, std::vector<std::string> labels = {},
              std::vector<int> generators = {})
      : n_(order), table_(std::move(table)), identity_(identity), labels_(std::move(labels)),
        generators_(std::move(generators)) {
    if (n_ <= 0) throw InvalidInput("group order must be positive");
    if (table_.size() != static_cast<std::size_t>(n_) * static_cast<std::size_t>(n_))
      throw InvalidInput("multiplication table has wrong size");
    if (identity_ < 0 || identity_ >= n_) throw InvalidInput("identity index out of range");
    for (int v : table_)
      if (v < 0 || v >= n_) throw InvalidInput("multiplication table is not closed");
    for (int g = 0; g < n_; ++g)
      if (mul(identity_, g) != g || mul(g, identity_) != g)
        throw InvalidInput("identity element does not act trivially");
    inv_.assign(n_, -1);
    for (int g = 0; g < n_; ++g) {
      for (int h = 0; h < n_; ++h)
        if (mul(g, h) == identity_) {
          inv_[g] = h;
          break;
        }
      if (inv_[g] < 0 || mul(inv_[g], g) != identity_)
        throw InvalidInput("element " + std::to_string(g) + " has no two-sided inverse");
    }
    check_associativity();
    if (labels_.empty())
      for (int g = 0; g < n_; ++g) labels_.push_back(std::to_string(g));
    if (generators_.empty()) generators_ = greedy_generators();
    compute_classes();
  }

  int order() const { return n_; }
  int identity() const { return identity_; }
  int mul(int a, int b) const { return table_[static_cast<std::size_t>(a) * n_ + b]; }
  int inv(int a) const { return inv_[a]; }
  /// x g x^{-1}
  int conjugate(int x, int g) const { return mul(mul(x, g), inv(x)); }
  const std::vector<int>& table() const { return table_; }
  const std::vector<std::string>& labels() const { return labels_; }
  const std::vector<int>& generators() const { return generators_; }

  const std::vector<std::vector<int>>& conjugacy_classes() const { return classes_; }
  int class_of(int g) const { return class_of_[g]; }

  /// Elements generated by `gens` (as a sorted index list).
  std::vector<int> closure(const std::vector<int>& gens) const {
    std::vector<char> seen(n_, 0);
    std::vector<int> out{identity_};
    seen[identity_] = 1;
    for (std::size_t i = 0; i < out.size(); ++i)
      for (int s : gens) {
        const int p = mul(out[i], s);
        if (!seen[p]) {
          seen[p] = 1;
          out.push_back(p);
        }
      }
    std::sort(out.begin(), out.end());
    return out;
  }

  int element_order(int g) const {
    int k = 1;
    for (int x = g; x != identity_; x = mul(x, g)) ++k;
    return k;
  }

 private:
  void check_associativity() const {
    auto bad = [&](int a, int b, int c) { return mul(mul(a, b), c) != mul(a, mul(b, c)); };
    if (n_ <= 500) {
      for (int a = 0; a < n_; ++a)
        for (int b = 0; b < n_; ++b)
          for (int c = 0; c < n_; ++c)
            if (bad(a, b, c)) throw InvalidInput("multiplication table is not associative");
      return;
    }
    std::mt19937_64 rng(0x5eed);
    std::uniform_int_distribution<int> pick(0, n_ - 1);
    for (int t = 0; t < 200000; ++t)
      if (bad(pick(rng), pick(rng), pick(rng)))
        throw InvalidInput("multiplication table is not associative (sampled)");
  }

  std::vector<int> greedy_generators() const {
    std::vector<int> gens;
    std::vector<int> current = closure(gens);
    for (int g = 0; g < n_ && static_cast<int>(current.size()) < n_; ++g)
      if (!std::binary_search(current.begin(), current.end(), g)) {
        gens.push_back(g);
        current = closure(gens);
      }
    return gens;
  }

  void compute_classes() {
    class_of_.assign(n_, -1);
    for (int g = 0; g < n_; ++g) {
      if (class_of_[g] >= 0) continue;
      const int id = static_cast<int>(classes_.size());
      std::vector<int> cls;
      for (int x = 0; x < n_; ++x) {
        const int c = conjugate(x, g);
        if (class_of_[c] < 0) {
          class_of_[c] = id;
          cls.push_back(c);
        }
      }
      std::sort(cls.begin(), cls.end());
      classes_.push_back(std::move(cls));
    }
  }

  int n_ = 0;
  std::vector<int> table_;
  int identity_ = 0;
  std::vector<std::string> labels_;
  std::vector<int> generators_;
  std::vector<int> inv_;
  std::vector<std::vector<int>> classes_;
  std::vector<int> class_of_;
};

/// Breadth-first closure of `gens` under right multiplication; element 0 of
/// the result is `identity`, generators occupy the indices stored in
/// `generators()`.
template <class Elem, class Mul, class Hash, class Label>
FiniteGroup close_under(const std::vector<Elem>& gens, const Elem& identity, Mul mul, Hash hash,
                        Label label, const GroupBuildOptions& opts = {}) {
  std::vector<Elem> elems{identity};
  std::unordered_map<Elem, int, Hash> index(16, hash);
  index.emplace(identity, 0);
  for (std::size_t i = 0; i < elems.size(); ++i)
    for (const Elem& s : gens) {
      Elem p = mul(elems[i], s);
      if (index.find(p) == index.end()) {
        if (elems.size() >= opts.closure_cap)
          throw CapExceeded("group closure exceeds cap of " + std::to_string(opts.closure_cap));
        index.emplace(p, static_cast<int>(elems.size()));
        elems.push_back(std::move(p));
      }
    }
  const std::size_t n = elems.size();
  if (n > opts.table_cap)
    throw CapExceeded("group of order " + std::to_string(n) + " exceeds table cap " +
                      std::to_string(opts.table_cap));
  std::vector<int> table(n * n);
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b) table[a * n + b] = index.at(mul(elems[a], elems[b]));
  std::vector<std::string> labels;
  labels.reserve(n);
  for (const auto& e : elems) labels.push_back(label(e));
  std::vector<int> gen_idx;
  for (const auto& s : gens) gen_idx.push_back(index.at(s));
  return FiniteGroup(static_cast<int>(n), std::move(table), 0, std::move(labels), std::move(gen_idx));
}

namespace detail {
struct PermutationHash {
  std::size_t operator()(const Permutation& p) const noexcept {
    std::size_t h = 1469598103934665603ull;
    for (int v : p) h = (h ^ static_cast<std::size_t>(v)) * 1099511628211ull;
    return h;
  }
};
struct F2Hash {
  std::size_t operator()(F2Matrix3 m) const noexcept { return m.bits; }
};
}  // namespace detail

/// Permutations compose left to right: (p*q)(i) = q(p(i)), i.e. the right
/// action convention i^(pq) = (i^p)^q.
inline FiniteGroup build_group(const std::vector<Permutation>& gens, const GroupBuildOptions& opts = {}) {
  if (gens.empty()) throw InvalidInput("at least one generator is required");
  const std::size_t d = gens.front().size();
  for (const auto& g : gens) {
    if (g.size() != d) throw InvalidInput("generators act on sets of different size");
    std::vector<char> hit(d, 0);
    for (int v : g) {
      if (v < 0 || static_cast<std::size_t>(v) >= d || hit[v]) throw InvalidInput("generator is not a permutation");
      hit[v] = 1;
    }
  }
  Permutation id(d);
  std::iota(id.begin(), id.end(), 0);
  auto mul = [](const Permutation& p, const Permutation& q) {
    Permutation r(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) r[i] = q[p[i]];
    return r;
  };
  auto label = [](const Permutation& p) {
    std::string s = "[";
    for (std::size_t i = 0; i < p.size(); ++i) s += (i ? " " : "") + std::to_string(p[i]);
    return s + "]";
  };
  return close_under(gens, id, mul, detail::PermutationHash{}, label, opts);
}

inline FiniteGroup build_group(const std::vector<F2Matrix3>& gens, const GroupBuildOptions& opts = {}) {
  if (gens.empty()) throw InvalidInput("at least one generator is required");
  for (auto g : gens)
    if (!g.invertible()) throw InvalidInput("matrix " + g.label() + " is not invertible over F2");
  return close_under(gens, F2Matrix3::identity(), std::multiplies<>{}, detail::F2Hash{},
                     [](F2Matrix3 m) { return m.label(); }, opts);
}

class Subgroup {
 public:
  Subgroup() = default;

  /// Validates membership of the identity, closure and Lagrange.
  Subgroup(const FiniteGroup& g, std::vector<int> members) : members_(std::move(members)) {
    std::sort(members_.begin(), members_.end());
    members_.erase(std::unique(members_.begin(), members_.end()), members_.end());
    mask_.assign(g.order(), 0);
    for (int m : members_) {
      if (m < 0 || m >= g.order()) throw InvalidInput("subgroup member out of range");
      mask_[m] = 1;
    }
    if (!contains(g.identity())) throw InvalidInput("subgroup does not contain the identity");
    for (int a : members_) {
      if (!contains(g.inv(a))) throw InvalidInput("subgroup is not closed under inverses");
      for (int b : members_)
        if (!contains(g.mul(a, b))) throw InvalidInput("subgroup is not closed under multiplication");
    }
    if (g.order() % order() != 0) throw InvalidInput("subgroup order does not divide group order");
  }

  static Subgroup generated(const FiniteGroup& g, const std::vector<int>& gens) {
    return Subgroup(g, g.closure(gens));
  }
  static Subgroup whole(const FiniteGroup& g) {
    std::vector<int> all(g.order());
    std::iota(all.begin(), all.end(), 0);
    return Subgroup(g, std::move(all));
  }
  static Subgroup trivial(const FiniteGroup& g) { return Subgroup(g, {g.identity()}); }

  int order() const { return static_cast<int>(members_.size()); }
  const std::vector<int>& members() const { return members_; }
  bool contains(int g) const { return g >= 0 && g < static_cast<int>(mask_.size()) && mask_[g]; }
  friend bool operator==(const Subgroup& a, const Subgroup& b) { return a.members_ == b.members_; }

 private:
  std::vector<int> members_;
  std::vector<char> mask_;
};

/// x H x^{-1}
inline Subgroup conjugate_subgroup(const FiniteGroup& g, const Subgroup& h, int x) {
  std::vector<int> m;
  m.reserve(h.members().size());
  for (int a : h.members()) m.push_back(g.conjugate(x, a));
  return Subgroup(g, std::move(m));
}

/// Right action of G on the right cosets H\G.
struct CosetAction {
  std::vector<int> representatives;  // smallest element of each coset
  std::vector<int> coset_of;         // element -> coset index
  std::vector<int> perm;             // perm[g * index + c] = coset of (rep_c * g)

  int index() const { return static_cast<int>(representatives.size()); }
  int act(int coset, int g) const { return perm[static_cast<std::size_t>(g) * index() + coset]; }
  Permutation permutation(int g) const {
    return Permutation(perm.begin() + static_cast<std::ptrdiff_t>(g) * index(),
                       perm.begin() + static_cast<std::ptrdiff_t>(g + 1) * index());
  }
};

inline CosetAction coset_action(const FiniteGroup& g, const Subgroup& h) {
  CosetAction ca;
  ca.coset_of.assign(g.order(), -1);
  for (int x = 0; x < g.order(); ++x) {
    if (ca.coset_of[x] >= 0) continue;
    const int id = ca.index();
    ca.representatives.push_back(x);
    for (int m : h.members()) ca.coset_of[g.mul(m, x)] = id;
  }
  const int idx = ca.index();
  ca.perm.resize(static_cast<std::size_t>(g.order()) * idx);
  for (int x = 0; x < g.order(); ++x)
    for (int c = 0; c < idx; ++c) ca.perm[static_cast<std::size_t>(x) * idx + c] = ca.coset_of[g.mul(ca.representatives[c], x)];
  return ca;
}

/// Gassmann test by class counts: |C ∩ H| = |C ∩ H'| for every conjugacy class C.
inline bool almost_conjugate(const FiniteGroup& g, const Subgroup& h1, const Subgroup& h2) {
  const auto& classes = g.conjugacy_classes();
  std::vector<int> c1(classes.size(), 0), c2(classes.size(), 0);
  for (int m : h1.members()) ++c1[g.class_of(m)];
  for (int m : h2.members()) ++c2[g.class_of(m)];
  return c1 == c2;
}

/// Fixed-point counts of every element on H\G versus H'\G.
inline bool permutation_character_equal(const FiniteGroup& g, const Subgroup& h1, const Subgroup& h2) {
  const CosetAction a1 = coset_action(g, h1), a2 = coset_action(g, h2);
  for (int x = 0; x < g.order(); ++x) {
    int f1 = 0, f2 = 0;
    for (int c = 0; c < a1.index(); ++c) f1 += a1.act(c, x) == c;
    for (int c = 0; c < a2.index(); ++c) f2 += a2.act(c, x) == c;
    if (f1 != f2) return false;
  }
  return true;
}

/// Exhaustive search for x with x H x^{-1} = H'; returns the first conjugator.
inline std::optional<int> find_conjugator(const FiniteGroup& g, const Subgroup& h1, const Subgroup& h2) {
  if (h1.order() != h2.order()) return std::nullopt;
  for (int x = 0; x < g.order(); ++x) {
    bool ok = true;
    for (int m : h1.members())
      if (!h2.contains(g.conjugate(x, m))) {
        ok = false;
        break;
      }
    if (ok) return x;
  }
  return std::nullopt;
}

inline bool are_conjugate_subgroups(const FiniteGroup& g, const Subgroup& h1, const Subgroup& h2) {
  return find_conjugator(g, h1, h2).has_value();
}

// ---------------------------------------------------------------------------
// Exact rational matrices and intertwiners

using Rational = boost::multiprecision::cpp_rational;

struct RationalMatrix {
  int rows = 0, cols = 0;
  std::vector<Rational> a;

  RationalMatrix() = default;
  RationalMatrix(int r, int c) : rows(r), cols(c), a(static_cast<std::size_t>(r) * c, Rational(0)) {}
  static RationalMatrix identity(int n) {
    RationalMatrix m(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = 1;
    return m;
  }

  Rational& operator()(int r, int c) { return a[static_cast<std::size_t>(r) * cols + c]; }
  const Rational& operator()(int r, int c) const { return a[static_cast<std::size_t>(r) * cols + c]; }

  friend RationalMatrix operator*(const RationalMatrix& x, const RationalMatrix& y) {
    if (x.cols != y.rows) throw InvalidInput("rational matrix shape mismatch");
    RationalMatrix z(x.rows, y.cols);
    for (int i = 0; i < x.rows; ++i)
      for (int k = 0; k < x.cols; ++k) {
        if (x(i, k) == 0) continue;
        for (int j = 0; j < y.cols; ++j) z(i, j) += x(i, k) * y(k, j);
      }
    return z;
  }
  friend bool operator==(const RationalMatrix& x, const RationalMatrix& y) {
    return x.rows == y.rows && x.cols == y.cols && x.a == y.a;
  }

  RationalMatrix transpose() const {
    RationalMatrix t(cols, rows);
    for (int i = 0; i < rows; ++i)
      for (int j = 0; j < cols; ++j) t(j, i) = (*this)(i, j);
    return t;
  }

  std::vector<double> to_double() const {
    std::vector<double> out;
    out.reserve(a.size());
    for (const auto& v : a) out.push_back(static_cast<double>(v));
    return out;
  }
};

/// Exact determinant by fraction-valued Gaussian elimination.
inline Rational determinant(RationalMatrix m) {
  if (m.rows != m.cols) throw InvalidInput("determinant of a non-square matrix");
  const int n = m.rows;
  Rational det = 1;
  for (int c = 0; c < n; ++c) {
    int p = c;
    while (p < n && m(p, c) == 0) ++p;
    if (p == n) return Rational(0);
    if (p != c) {
      for (int j = 0; j < n; ++j) std::swap(m(p, j), m(c, j));
      det = -det;
    }
    det *= m(c, c);
    for (int r = c + 1; r < n; ++r) {
      if (m(r, c) == 0) continue;
      const Rational f = m(r, c) / m(c, c);
      for (int j = c; j < n; ++j) m(r, j) -= f * m(c, j);
    }
  }
  return det;
}

/// Basis of the right nullspace of `m` (each basis vector has one free
/// variable set to 1), via reduced row echelon form.
inline std::vector<std::vector<Rational>> nullspace(RationalMatrix m) {
  const int rows = m.rows, cols = m.cols;
  std::vector<int> pivot_col;
  int r = 0;
  for (int c = 0; c < cols && r < rows; ++c) {
    int p = r;
    while (p < rows && m(p, c) == 0) ++p;
    if (p == rows) continue;
    if (p != r)
      for (int j = 0; j < cols; ++j) std::swap(m(p, j), m(r, j));
    const Rational piv = m(r, c);
    for (int j = c; j < cols; ++j) m(r, j) /= piv;
    for (int i = 0; i < rows; ++i) {
      if (i == r || m(i, c) == 0) continue;
      const Rational f = m(i, c);
      for (int j = c; j < cols; ++j) m(i, j) -= f * m(r, j);
    }
    pivot_col.push_back(c);
    ++r;
  }
  std::vector<char> is_pivot(cols, 0);
  for (int c : pivot_col) is_pivot[c] = 1;
  std::vector<std::vector<Rational>> basis;
  for (int f = 0; f < cols; ++f) {
    if (is_pivot[f]) continue;
    std::vector<Rational> v(cols, Rational(0));
    v[f] = 1;
    for (int i = 0; i < static_cast<int>(pivot_col.size()); ++i) v[pivot_col[i]] = -m(i, f);
    basis.push_back(std::move(v));
  }
  return basis;
}

/// Coset permutation matrix with P[c][c*g] = 1, so (P f)(c) = f(c g) and
/// P(g1 g2) = P(g1) P(g2).
inline RationalMatrix coset_permutation_matrix(const CosetAction& ca, int g) {
  RationalMatrix p(ca.index(), ca.index());
  for (int c = 0; c < ca.index(); ++c) p(c, ca.act(c, g)) = 1;
  return p;
}

/// True iff T P'(g) = P(g) T for every element g (exact).
inline bool is_intertwiner(const RationalMatrix& t, const FiniteGroup& g, const CosetAction& a,
                           const CosetAction& a2) {
  if (t.rows != a.index() || t.cols != a2.index()) return false;
  for (int x = 0; x < g.order(); ++x) {
    // (T P'(x))_{ij} = T_{i, j x^{-1}},  (P(x) T)_{ij} = T_{i x, j}
    const int xi = g.inv(x);
    for (int i = 0; i < t.rows; ++i)
      for (int j = 0; j < t.cols; ++j)
        if (t(i, a2.act(j, xi)) != t(a.act(i, x), j)) return false;
  }
  return true;
}

/// Invertible T with T P'(g) = P(g) T, mapping functions on H'\G to functions
/// on H\G; normalized so that T maps the all-ones vector to itself.
///
/// The intertwining system for the stored generators is solved exactly over
/// the rationals; nullspace combinations are tried deterministically until
/// one is invertible, and the result is re-checked on all group elements.
inline RationalMatrix intertwiner(const FiniteGroup& g, const Subgroup& h1, const Subgroup& h2) {
  const CosetAction a1 = coset_action(g, h1), a2 = coset_action(g, h2);
  const int n = a1.index();
  if (a2.index() != n) throw InvalidInput("subgroups have different index");
  const int unknowns = n * n;
  auto var = [n](int i, int j) { return i * n + j; };
  const auto& gens = g.generators();
  RationalMatrix sys(static_cast<int>(gens.size()) * unknowns, unknowns);
  int row = 0;
  for (int s : gens) {
    const int si = g.inv(s);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j, ++row) {
        sys(row, var(i, a2.act(j, si))) += 1;
        sys(row, var(a1.act(i, s), j)) -= 1;
      }
  }
  const auto basis = nullspace(std::move(sys));
  if (basis.empty()) throw SolverError("intertwining system has only the zero solution");
  std::mt19937 rng(1);
  std::uniform_int_distribution<int> coef(1, 9);
  for (int attempt = 0; attempt < 64; ++attempt) {
    RationalMatrix t(n, n);
    for (std::size_t b = 0; b < basis.size(); ++b) {
      // first attempts use single basis vectors, later ones random combinations
      Rational c = attempt < static_cast<int>(basis.size()) ? Rational(attempt == static_cast<int>(b) ? 1 : 0)
                                                           : Rational(coef(rng));
      if (c == 0) continue;
      for (int k = 0; k < unknowns; ++k) t.a[k] += c * basis[b][k];
    }
    if (determinant(t) == 0) continue;
    Rational row_sum = 0;
    for (int j = 0; j < n; ++j) row_sum += t(0, j);
    if (row_sum == 0) continue;
    for (auto& v : t.a) v /= row_sum;
    if (!is_intertwiner(t, g, a1, a2))
      throw SolverError("intertwiner fails the relation on a non-generator element");
    return t;
  }
  throw SolverError("no invertible intertwiner found; subgroups may not be Gassmann equivalent");
}

// ---------------------------------------------------------------------------
// GL(3, F_2) with the stabilizer-of-first-row subgroup and its transpose

struct Gl3F2 {
  FiniteGroup group;
  Subgroup h1;  // first row (1, 0, 0)
  Subgroup h2;  // transposes of h1
  std::vector<F2Matrix3> matrices;  // element index -> matrix

  int index_of(F2Matrix3 m) const {
    for (std::size_t i = 0; i < matrices.size(); ++i)
      if (matrices[i] == m) return static_cast<int>(i);
    throw InvalidInput("matrix " + m.label() + " is not in GL(3,2)");
  }
  int transpose_of(int g) const { return index_of(matrices[g].transpose()); }
};

inline F2Matrix3 f2_from_label(const std::string& s) {
  F2Matrix3 m;
  int k = 0;
  for (char ch : s) {
    if (ch == '/') continue;
    if ((ch != '0' && ch != '1') || k >= 9) throw InvalidInput("bad F2 matrix label '" + s + "'");
    m.set(k / 3, k % 3, ch == '1');
    ++k;
  }
  if (k != 9) throw InvalidInput("bad F2 matrix label '" + s + "'");
  return m;
}

inline Gl3F2 gl3_f2() {
  // cyclic coordinate permutation and an elementary transvection generate GL(3,2)
  const F2Matrix3 cyc = f2_from_label("010/001/100");
  const F2Matrix3 tv = f2_from_label("110/010/001");
  Gl3F2 out;
  out.group = build_group(std::vector<F2Matrix3>{cyc, tv});
  for (const auto& l : out.group.labels()) out.matrices.push_back(f2_from_label(l));
  std::vector<int> m1, m2;
  for (int g = 0; g < out.group.order(); ++g) {
    const F2Matrix3 m = out.matrices[g];
    if (m.at(0, 0) && !m.at(0, 1) && !m.at(0, 2)) {
      m1.push_back(g);
      m2.push_back(out.index_of(m.transpose()));
    }
  }
  out.h1 = Subgroup(out.group, m1);
  out.h2 = Subgroup(out.group, m2);
  return out;
}

// ---------------------------------------------------------------------------
// Plain-text table format

struct GroupFile {
  FiniteGroup group;
  std::vector<std::pair<std::string, Subgroup>> subgroups;

  const Subgroup& subgroup(const std::string& name) const {
    for (const auto& [n, s] : subgroups)
      if (n == name) return s;
    throw InvalidInput("group file has no subgroup named '" + name + "'");
  }
};

inline void write_group_text(std::ostream& os, const FiniteGroup& g,
                             const std::vector<std::pair<std::string, Subgroup>>& subgroups = {}) {
  const int n = g.order();
  os << "order " << n << '\n';
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) os << (b ? " " : "") << g.mul(a, b);
    os << '\n';
  }
  os << "identity " << g.identity() << '\n';
  for (const auto& [name, h] : subgroups) {
    os << "subgroup " << name << ':';
    for (int m : h.members()) os << ' ' << m;
    os << '\n';
  }
}

inline GroupFile read_group_text(std::istream& is) {
  std::string word;
  int n = 0;
  if (!(is >> word >> n) || word != "order" || n <= 0) throw InvalidInput("group file must start with 'order n'");
  std::vector<int> table(static_cast<std::size_t>(n) * n);
  for (auto& v : table)
    if (!(is >> v)) throw InvalidInput("group file: truncated multiplication table");
  int identity = -1;
  if (!(is >> word >> identity) || word != "identity") throw InvalidInput("group file: expected 'identity i'");
  GroupFile gf;
  gf.group = FiniteGroup(n, std::move(table), identity);
  std::string line;
  while (std::getline(is, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::istringstream ls(line);
    std::string kw, name;
    ls >> kw >> name;
    if (kw != "subgroup" || name.empty() || name.back() != ':')
      throw InvalidInput("group file: bad subgroup line '" + line + "'");
    name.pop_back();
    std::vector<int> members;
    for (int m; ls >> m;) members.push_back(m);
    gf.subgroups.emplace_back(name, Subgroup(gf.group, std::move(members)));
  }
  return gf;
}

}  // namespace stekiso
