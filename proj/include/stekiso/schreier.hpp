#pragma once
// Edge-colored Cayley and Schreier graphs and their adjacency spectra.

#include <algorithm>
#include <ostream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "stekiso/finite_groups.hpp"

namespace stekiso {

/// Colored graph where every color is a permutation of the vertices:
/// succ[c][v] is the endpoint of the c-colored edge leaving v.
struct ColoredGraph {
  int vertex_count = 0;
  std::vector<std::string> colors;
  std::vector<std::vector<int>> succ;

  int color_count() const { return static_cast<int>(colors.size()); }
  int pred(int color, int v) const {
    const auto& s = succ[color];
    return static_cast<int>(std::find(s.begin(), s.end(), v) - s.begin());
  }

  void validate() const {
    if (colors.empty()) throw InvalidInput("colored graph needs at least one color");
    if (succ.size() != colors.size()) throw InvalidInput("one successor map per color is required");
    for (const auto& s : succ) {
      if (static_cast<int>(s.size()) != vertex_count) throw InvalidInput("successor map has wrong length");
      std::vector<char> hit(vertex_count, 0);
      for (int v : s) {
        if (v < 0 || v >= vertex_count || hit[v]) throw InvalidInput("successor map is not a bijection");
        hit[v] = 1;
      }
    }
  }
};

namespace detail {
inline std::vector<std::string> generator_names(const FiniteGroup& g, const std::vector<int>& gens) {
  std::vector<std::string> names;
  for (std::size_t i = 0; i < gens.size(); ++i) {
    if (gens[i] < 0 || gens[i] >= g.order()) throw InvalidInput("generator index out of range");
    names.push_back(i < 26 ? std::string(1, static_cast<char>('a' + i)) : "s" + std::to_string(i));
  }
  return names;
}
}  // namespace detail

inline ColoredGraph cayley_graph(const FiniteGroup& g, const std::vector<int>& gens) {
  ColoredGraph out;
  out.vertex_count = g.order();
  out.colors = detail::generator_names(g, gens);
  for (int s : gens) {
    if (s == g.identity()) throw InvalidInput("the identity cannot be used as a generator");
    std::vector<int> succ(g.order());
    for (int x = 0; x < g.order(); ++x) succ[x] = g.mul(x, s);
    out.succ.push_back(std::move(succ));
  }
  return out;
}

/// Vertices are right cosets Hg; the s-colored edge goes Hg -> Hgs. Fixed
/// points of a generator become loops.
inline ColoredGraph schreier_graph(const FiniteGroup& g, const Subgroup& h, const std::vector<int>& gens) {
  const CosetAction ca = coset_action(g, h);
  ColoredGraph out;
  out.vertex_count = ca.index();
  out.colors = detail::generator_names(g, gens);
  for (int s : gens) {
    if (s == g.identity()) throw InvalidInput("the identity cannot be used as a generator");
    out.succ.push_back(ca.permutation(s));
  }
  return out;
}

/// A with A[v][succ_c(v)] += 1 summed over colors; loops count once in A and
/// therefore twice on the diagonal of A + A^T.
inline Eigen::MatrixXd adjacency_matrix(const ColoredGraph& gr) {
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(gr.vertex_count, gr.vertex_count);
  for (const auto& s : gr.succ)
    for (int v = 0; v < gr.vertex_count; ++v) a(v, s[v]) += 1.0;
  return a;
}

/// Ascending eigenvalues of A + A^T.
inline std::vector<double> symmetrized_adjacency_spectrum(const ColoredGraph& gr) {
  const Eigen::MatrixXd a = adjacency_matrix(gr);
  const Eigen::MatrixXd sym = a + a.transpose();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym, Eigen::EigenvaluesOnly);
  const auto& ev = es.eigenvalues();
  std::vector<double> out(ev.data(), ev.data() + ev.size());
  std::sort(out.begin(), out.end());
  return out;
}

/// Graph diameter of the underlying undirected graph (BFS from every vertex).
inline int graph_diameter(const ColoredGraph& gr) {
  int diam = 0;
  for (int src = 0; src < gr.vertex_count; ++src) {
    std::vector<int> dist(gr.vertex_count, -1);
    std::vector<int> queue{src};
    dist[src] = 0;
    for (std::size_t i = 0; i < queue.size(); ++i) {
      const int v = queue[i];
      for (int c = 0; c < gr.color_count(); ++c)
        for (int w : {gr.succ[c][v], gr.pred(c, v)})
          if (dist[w] < 0) {
            dist[w] = dist[v] + 1;
            queue.push_back(w);
          }
    }
    for (int d : dist) {
      if (d < 0) throw InvalidInput("graph is disconnected");
      diam = std::max(diam, d);
    }
  }
  return diam;
}

/// One line per color: `NAME: succ(0) succ(1) ...`.
inline void write_graph_text(std::ostream& os, const ColoredGraph& gr) {
  os << "vertices " << gr.vertex_count << '\n';
  for (int c = 0; c < gr.color_count(); ++c) {
    os << gr.colors[c] << ':';
    for (int v : gr.succ[c]) os << ' ' << v;
    os << '\n';
  }
}

inline void write_graph_dot(std::ostream& os, const ColoredGraph& gr, const std::string& name = "schreier") {
  static const char* palette[] = {"red", "blue", "darkgreen", "orange", "purple", "brown"};
  os << "digraph " << name << " {\n";
  for (int v = 0; v < gr.vertex_count; ++v) os << "  " << v << ";\n";
  for (int c = 0; c < gr.color_count(); ++c)
    for (int v = 0; v < gr.vertex_count; ++v)
      os << "  " << v << " -> " << gr.succ[c][v] << " [color=" << palette[c % 6] << ", label=\"" << gr.colors[c]
         << "\"];\n";
  os << "}\n";
}

}  // namespace stekiso
