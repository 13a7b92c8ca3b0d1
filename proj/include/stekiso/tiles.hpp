#pragma once
// Shipped tiles and the plain-text tile file format.
//
//   tile NAME
//   vertex X Y
//   triangle I J K
//   side I J glue GENERATOR +|-
//   side I J free TAG
//   symmetry NAME A B C D E F        (x' = A x + B y + C, y' = D x + E y + F)
//
// Blank lines and lines starting with '#' are ignored.

#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "stekiso/tiling.hpp"

namespace stekiso {

namespace detail {

/// Fan triangulation of a star-shaped polygon from an interior center; the
/// boundary is given counter-clockwise with one label per edge.
struct FanBuilder {
  std::vector<Vec2> vertices;
  std::vector<int> loop;
  std::vector<SideLabel> labels;

  int add(Vec2 p, SideLabel next_edge) {
    vertices.push_back(p);
    loop.push_back(static_cast<int>(vertices.size()) - 1);
    labels.push_back(std::move(next_edge));
    return loop.back();
  }

  TileSpec build(const std::string& name, Vec2 center, std::vector<TileSymmetry> syms) const {
    auto v = vertices;
    const int c = static_cast<int>(v.size());
    v.push_back(center);
    std::vector<std::array<int, 3>> tris;
    std::vector<TileSide> sides;
    for (std::size_t k = 0; k < loop.size(); ++k) {
      const int a = loop[k], b = loop[(k + 1) % loop.size()];
      tris.push_back({c, a, b});
      sides.push_back({a, b, labels[k]});
    }
    return TileSpec(name, std::move(v), std::move(tris), std::move(sides), std::move(syms));
  }
};

inline constexpr double kPi = 3.14159265358979323846;

}  // namespace detail

/// Square of side 4 with polygonal quarter-circle bites (radius 1) at the
/// corners. Middle thirds of the sides are glue sides: top a, right a^-1,
/// bottom b, left b^-1. Corner arcs are free classes k0..k3 counter-clockwise
/// from (0,0).
inline TileSpec buser_tile(int arc_segments = 4) {
  if (arc_segments < 2 || arc_segments % 2) throw InvalidInput("arc segment count must be even");
  detail::FanBuilder f;
  auto arc = [&](Vec2 center, double start, const std::string& tag) {
    for (int j = 0; j < arc_segments; ++j) {
      const double t = start - (detail::kPi / 2) * j / arc_segments;
      f.add({center.x + std::cos(t), center.y + std::sin(t)}, SideLabel::free(tag));
    }
  };
  f.add({1, 0}, SideLabel::glue(1, +1));
  arc({4, 0}, detail::kPi, "k1");
  f.add({4, 1}, SideLabel::glue(0, -1));
  arc({4, 4}, 1.5 * detail::kPi, "k2");
  f.add({3, 4}, SideLabel::glue(0, +1));
  arc({0, 4}, 0.0, "k3");
  f.add({0, 3}, SideLabel::glue(1, -1));
  arc({0, 0}, 0.5 * detail::kPi, "k0");
  // snap the arc endpoints that fall on the square sides
  for (auto& p : f.vertices) {
    p.x = std::abs(p.x - std::round(p.x)) < 1e-12 ? std::round(p.x) : p.x;
    p.y = std::abs(p.y - std::round(p.y)) < 1e-12 ? std::round(p.y) : p.y;
  }
  return f.build("buser", {2, 2},
                 {{"id", {1, 0, 0, 0, 1, 0}},
                  {"rot180", {-1, 0, 4, 0, -1, 4}},
                  {"diag", {0, 1, 0, 1, 0, 0}},
                  {"antidiag", {0, -1, 4, -1, 0, 4}}});
}

/// Plus-shaped tile: arms of half-width 1/2 reaching to +-3/2. Arm ends are
/// the glue sides (top a, right a^-1, bottom b, left b^-1); the eight arm
/// flanks are free classes f0..f7 counter-clockwise starting at the right
/// flank of the bottom arm.
inline TileSpec cross_tile() {
  detail::FanBuilder f;
  const double w = 0.5, L = 1.5, m = 1.0;
  int k = 0;
  auto flank = [&](Vec2 a, Vec2 mid) {
    const std::string tag = "f" + std::to_string(k++);
    f.add(a, SideLabel::free(tag));
    f.add(mid, SideLabel::free(tag));
  };
  f.add({-w, -L}, SideLabel::glue(1, +1));
  flank({w, -L}, {w, -m});
  flank({w, -w}, {m, -w});
  f.add({L, -w}, SideLabel::glue(0, -1));
  flank({L, w}, {m, w});
  flank({w, w}, {w, m});
  f.add({w, L}, SideLabel::glue(0, +1));
  flank({-w, L}, {-w, m});
  flank({-w, w}, {-m, w});
  f.add({-L, w}, SideLabel::glue(1, -1));
  flank({-L, -w}, {-m, -w});
  flank({-w, -w}, {-w, -m});
  return f.build("cross", {0, 0},
                 {{"id", {1, 0, 0, 0, 1, 0}},
                  {"rot180", {-1, 0, 0, 0, -1, 0}},
                  {"diag", {0, 1, 0, 1, 0, 0}},
                  {"antidiag", {0, -1, 0, -1, 0, 0}}});
}

/// Right isosceles triangle O=(0,0), A=(4,0), B=(0,4) with a half-disk of
/// radius 1 centred at (1.7, 0) removed from the leg OA. Free classes:
/// `La` (leg OA outside the bite), `arc`, `hyp` (AB), `Lb` (leg BO).
inline TileSpec bite_triangle_tile(int arc_segments = 8) {
  if (arc_segments < 2 || arc_segments % 2) throw InvalidInput("arc segment count must be even");
  const double cx = 1.7;
  std::vector<Vec2> v;
  std::vector<TileSide> sides;
  std::vector<std::array<int, 3>> tris;
  auto vert = [&](Vec2 p) {
    v.push_back(p);
    return static_cast<int>(v.size()) - 1;
  };
  const int O = vert({0, 0});
  std::vector<int> arc;
  for (int j = 0; j <= arc_segments; ++j) {
    const double t = detail::kPi - detail::kPi * j / arc_segments;
    Vec2 p{cx + std::cos(t), std::sin(t)};
    if (j == 0 || j == arc_segments) p.y = 0;
    if (j == arc_segments / 2) p.x = cx;
    arc.push_back(vert(p));
  }
  const int top = arc[arc_segments / 2];
  const int La_mid = vert({cx + 1 + (4 - cx - 1) / 2, 0});
  const int A = vert({4, 0});
  const Vec2 hq{cx, 4 - cx};
  std::vector<int> hyp_right;  // A -> hq exclusive of A
  for (int j = 1; j <= 5; ++j) hyp_right.push_back(vert(Vec2{4, 0} + (j / 5.0) * (hq - Vec2{4, 0})));
  const int H = hyp_right.back();
  std::vector<int> hyp_left;  // hq -> B exclusive of hq
  for (int j = 1; j <= 4; ++j) hyp_left.push_back(vert(hq + (j / 4.0) * (Vec2{0, 4} - hq)));
  std::vector<int> leg_b;  // B -> O exclusive of both
  for (int j = 1; j < 6; ++j) leg_b.push_back(vert({0, 4 - 4.0 * j / 6}));
  const int chord_mid = vert({cx, (v[top].y + hq.y) / 2});
  const int ZL = vert({0.6, 1.5});
  const int ZR = vert({2.7, 1.1});

  auto side = [&](int a, int b, const std::string& tag) { sides.push_back({a, b, SideLabel::free(tag)}); };
  // left region, counter-clockwise: O, arc[0..top], chord, hyp to B, leg down to O
  std::vector<int> left{O};
  side(O, arc[0], "La");
  for (int j = 0; j <= arc_segments / 2; ++j) left.push_back(arc[j]);
  for (int j = 0; j < arc_segments / 2; ++j) side(arc[j], arc[j + 1], "arc");
  left.push_back(chord_mid);
  left.push_back(H);
  int prev = H;
  for (int p : hyp_left) {
    left.push_back(p);
    side(prev, p, "hyp");
    prev = p;
  }
  for (int p : leg_b) {
    left.push_back(p);
    side(prev, p, "Lb");
    prev = p;
  }
  side(prev, O, "Lb");
  // right region: arc[top..end], leg to A, hyp up to hq, chord down to top
  std::vector<int> right;
  for (int j = arc_segments / 2; j <= arc_segments; ++j) right.push_back(arc[j]);
  for (int j = arc_segments / 2; j < arc_segments; ++j) side(arc[j], arc[j + 1], "arc");
  right.push_back(La_mid);
  right.push_back(A);
  side(arc.back(), La_mid, "La");
  side(La_mid, A, "La");
  prev = A;
  for (int p : hyp_right) {
    right.push_back(p);
    side(prev, p, "hyp");
    prev = p;
  }
  right.push_back(chord_mid);
  for (std::size_t k = 0; k < left.size(); ++k) tris.push_back({ZL, left[k], left[(k + 1) % left.size()]});
  for (std::size_t k = 0; k < right.size(); ++k) tris.push_back({ZR, right[k], right[(k + 1) % right.size()]});
  return TileSpec("bite_triangle", std::move(v), std::move(tris), std::move(sides));
}

/// Regular n-gon inscribed in the unit circle, one free class `rim`.
inline TileSpec polygon_disk_tile(int n = 64) {
  if (n < 3) throw InvalidInput("polygon needs at least 3 sides");
  detail::FanBuilder f;
  for (int j = 0; j < n; ++j) {
    const double t = 2 * detail::kPi * j / n;
    f.add({std::cos(t), std::sin(t)}, SideLabel::free("rim"));
  }
  return f.build("disk" + std::to_string(n), {0, 0}, {});
}

/// Unit square with free classes bottom/right/top/left and its dihedral symmetries.
inline TileSpec unit_square_tile() {
  detail::FanBuilder f;
  f.add({0, 0}, SideLabel::free("bottom"));
  f.add({1, 0}, SideLabel::free("right"));
  f.add({1, 1}, SideLabel::free("top"));
  f.add({0, 1}, SideLabel::free("left"));
  return f.build("unit_square", {0.5, 0.5},
                 {{"id", {1, 0, 0, 0, 1, 0}},
                  {"rot90", {0, -1, 1, 1, 0, 0}},
                  {"rot180", {-1, 0, 1, 0, -1, 1}},
                  {"rot270", {0, 1, 0, -1, 0, 1}},
                  {"flipx", {-1, 0, 1, 0, 1, 0}},
                  {"flipy", {1, 0, 0, 0, -1, 1}},
                  {"diag", {0, 1, 0, 1, 0, 0}},
                  {"antidiag", {0, -1, 1, -1, 0, 1}}});
}

inline TileSpec builtin_tile(const std::string& name) {
  if (name == "buser") return buser_tile();
  if (name == "cross") return cross_tile();
  if (name == "bite_triangle") return bite_triangle_tile();
  if (name == "disk64") return polygon_disk_tile(64);
  if (name == "unit_square") return unit_square_tile();
  throw InvalidInput("unknown builtin tile '" + name + "'");
}

inline void write_tile_text(std::ostream& os, const TileSpec& t) {
  os.precision(17);
  os << "tile " << t.name() << '\n';
  for (const auto& p : t.vertices()) os << "vertex " << p.x << ' ' << p.y << '\n';
  for (const auto& tr : t.triangles()) os << "triangle " << tr[0] << ' ' << tr[1] << ' ' << tr[2] << '\n';
  for (const auto& s : t.sides()) {
    os << "side " << s.from << ' ' << s.to << ' ';
    if (s.label.is_glue()) os << "glue " << s.label.generator << ' ' << (s.label.sign > 0 ? '+' : '-') << '\n';
    else os << "free " << s.label.tag << '\n';
  }
  for (const auto& s : t.symmetries()) {
    const auto& m = s.map;
    os << "symmetry " << s.name << ' ' << m.a << ' ' << m.b << ' ' << m.c << ' ' << m.d << ' ' << m.e << ' ' << m.f
       << '\n';
  }
}

inline TileSpec read_tile_text(std::istream& is) {
  std::string name = "tile", line;
  std::vector<Vec2> v;
  std::vector<std::array<int, 3>> tris;
  std::vector<TileSide> sides;
  std::vector<TileSymmetry> syms;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    std::istringstream ss(line);
    std::string key;
    if (!(ss >> key) || key[0] == '#') continue;
    auto fail = [&] { throw InvalidInput("tile file line " + std::to_string(lineno) + ": cannot parse '" + line + "'"); };
    if (key == "tile") {
      if (!(ss >> name)) fail();
    } else if (key == "vertex") {
      Vec2 p;
      if (!(ss >> p.x >> p.y)) fail();
      v.push_back(p);
    } else if (key == "triangle") {
      std::array<int, 3> t{};
      if (!(ss >> t[0] >> t[1] >> t[2])) fail();
      tris.push_back(t);
    } else if (key == "side") {
      TileSide s;
      std::string kind;
      if (!(ss >> s.from >> s.to >> kind)) fail();
      if (kind == "glue") {
        int g;
        std::string sign;
        if (!(ss >> g >> sign) || (sign != "+" && sign != "-")) fail();
        s.label = SideLabel::glue(g, sign == "+" ? 1 : -1);
      } else if (kind == "free") {
        std::string tag;
        if (!(ss >> tag)) fail();
        s.label = SideLabel::free(tag);
      } else {
        fail();
      }
      sides.push_back(std::move(s));
    } else if (key == "symmetry") {
      TileSymmetry s;
      auto& m = s.map;
      if (!(ss >> s.name >> m.a >> m.b >> m.c >> m.d >> m.e >> m.f)) fail();
      syms.push_back(std::move(s));
    } else {
      fail();
    }
  }
  return TileSpec(name, std::move(v), std::move(tris), std::move(sides), std::move(syms));
}

}  // namespace stekiso
