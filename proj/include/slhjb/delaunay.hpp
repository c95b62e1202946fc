#pragma once

// Bowyer-Watson Delaunay triangulation of a planar point set.

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <utility>
#include <vector>

#include "slhjb/error.hpp"
#include "slhjb/vec.hpp"

namespace slhjb::detail {

/// Positive when d lies strictly inside the circumcircle of the
/// counterclockwise triangle (a, b, c).
inline long double in_circle(const Vec<2>& a, const Vec<2>& b, const Vec<2>& c, const Vec<2>& d) {
  const long double adx = a[0] - d[0], ady = a[1] - d[1];
  const long double bdx = b[0] - d[0], bdy = b[1] - d[1];
  const long double cdx = c[0] - d[0], cdy = c[1] - d[1];
  const long double ad = adx * adx + ady * ady;
  const long double bd = bdx * bdx + bdy * bdy;
  const long double cd = cdx * cdx + cdy * cdy;
  return adx * (bdy * cd - bd * cdy) - ady * (bdx * cd - bd * cdx) + ad * (bdx * cdy - bdy * cdx);
}

inline double orient(const Vec<2>& a, const Vec<2>& b, const Vec<2>& c) {
  return (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]);
}

/// Triangles (counterclockwise index triples into `points`) of the Delaunay
/// triangulation. The first `hull` points must list a convex polygon
/// counterclockwise whose fan from point 0 is Delaunay (a rectangle, say), and
/// every other point must lie in its closure. With hull = 0 a super triangle
/// is used instead. Remaining points are inserted in the given order.
inline std::vector<std::array<int, 3>> delaunay(const std::vector<Vec<2>>& points, int hull = 0) {
  const int n = static_cast<int>(points.size());
  if (n < 3) throw Error(ErrorKind::bad_params, "Delaunay triangulation needs at least 3 points");
  if (hull != 0 && (hull < 3 || hull > n)) throw Error(ErrorKind::bad_params, "hull size must lie in [3, n]");
  std::vector<Vec<2>> pts = points;
  std::vector<std::array<int, 3>> tris;
  if (hull == 0) {
    Vec<2> lo = points[0], hi = points[0];
    for (const auto& p : points)
      for (int d = 0; d < 2; ++d) lo[d] = std::min(lo[d], p[d]), hi[d] = std::max(hi[d], p[d]);
    const Vec<2> mid = 0.5 * (lo + hi);
    const double span = std::max(hi[0] - lo[0], hi[1] - lo[1]) * 64.0 + 1.0;
    pts.push_back(mid + Vec<2>{-span, -span});
    pts.push_back(mid + Vec<2>{span, -span});
    pts.push_back(mid + Vec<2>{0.0, span});
    tris.push_back({n, n + 1, n + 2});
  } else {
    for (int k = 1; k + 1 < hull; ++k) tris.push_back({0, k, k + 1});
  }

  auto contains = [&](const std::array<int, 3>& t, const Vec<2>& p) {
    for (int e = 0; e < 3; ++e)
      if (orient(pts[t[e]], pts[t[(e + 1) % 3]], p) < 0.0) return false;
    return true;
  };
  using Edge = std::pair<int, int>;
  auto key = [](int u, int v) { return Edge{std::min(u, v), std::max(u, v)}; };

  for (int ip = hull; ip < n; ++ip) {
    const Vec<2>& p = pts[ip];
    const int nt = static_cast<int>(tris.size());
    std::vector<char> in_cavity(nt, 0), seed(nt, 0);
    for (int t = 0; t < nt; ++t) {
      seed[t] = contains(tris[t], p);
      in_cavity[t] = seed[t] || in_circle(pts[tris[t][0]], pts[tris[t][1]], pts[tris[t][2]], p) > 0;
    }
    // Near-cocircular ties can leave the cavity disconnected or not
    // star-shaped around p; keep the component of the containing triangles
    // and peel off triangles with an edge that p does not see.
    while (true) {
      std::map<Edge, std::vector<int>> owners;
      for (int t = 0; t < nt; ++t)
        if (in_cavity[t])
          for (int e = 0; e < 3; ++e) owners[key(tris[t][e], tris[t][(e + 1) % 3])].push_back(t);
      std::vector<char> reached(nt, 0);
      std::vector<int> stack;
      for (int t = 0; t < nt; ++t)
        if (seed[t]) reached[t] = 1, stack.push_back(t);
      while (!stack.empty()) {
        const int t = stack.back();
        stack.pop_back();
        for (int e = 0; e < 3; ++e)
          for (int o : owners[key(tris[t][e], tris[t][(e + 1) % 3])])
            if (!reached[o]) reached[o] = 1, stack.push_back(o);
      }
      bool changed = false;
      for (int t = 0; t < nt; ++t)
        if (in_cavity[t] && !reached[t]) in_cavity[t] = 0, changed = true;
      for (int t = 0; t < nt; ++t) {
        if (!in_cavity[t] || seed[t]) continue;
        for (int e = 0; e < 3; ++e) {
          const int u = tris[t][e], v = tris[t][(e + 1) % 3];
          if (owners[key(u, v)].size() == 1 && orient(pts[u], pts[v], p) <= 0.0) {
            in_cavity[t] = 0;
            changed = true;
            break;
          }
        }
      }
      if (!changed) break;
    }
    std::map<Edge, int> edge_count;
    for (int t = 0; t < nt; ++t)
      if (in_cavity[t])
        for (int e = 0; e < 3; ++e) ++edge_count[key(tris[t][e], tris[t][(e + 1) % 3])];
    std::vector<std::array<int, 3>> keep;
    for (int t = 0; t < nt; ++t) {
      if (!in_cavity[t]) {
        keep.push_back(tris[t]);
        continue;
      }
      for (int e = 0; e < 3; ++e) {
        const int u = tris[t][e], v = tris[t][(e + 1) % 3];
        if (edge_count[key(u, v)] != 1 || orient(pts[u], pts[v], p) <= 0.0) continue;
        keep.push_back({u, v, ip});
      }
    }
    tris = std::move(keep);
  }
  std::vector<std::array<int, 3>> out;
  for (const auto& t : tris)
    if (t[0] < n && t[1] < n && t[2] < n) out.push_back(t);
  return out;
}

}  // namespace slhjb::detail
