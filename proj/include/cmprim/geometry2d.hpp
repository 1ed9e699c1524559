#pragma once

// Convex polygons in the plane: hull, containment, clipping, Chebyshev center.

#include "cmprim/core.hpp"

#include <algorithm>
#include <limits>
#include <vector>

namespace cmprim {

/// Vertices in counter-clockwise order, no repeated closing vertex.
using Polygon = std::vector<Vec2>;

inline double cross2(const Vec2& a, const Vec2& b) { return a.x() * b.y() - a.y() * b.x(); }

inline double signed_area(const Polygon& poly) {
  double a = 0.0;
  for (std::size_t i = 0; i < poly.size(); ++i) a += cross2(poly[i], poly[(i + 1) % poly.size()]);
  return 0.5 * a;
}

inline double area(const Polygon& poly) { return std::abs(signed_area(poly)); }

/// Counter-clockwise convex hull (Andrew's monotone chain); collinear points dropped.
inline Polygon convex_hull(std::vector<Vec2> pts) {
  std::sort(pts.begin(), pts.end(), [](const Vec2& a, const Vec2& b) {
    return a.x() < b.x() || (a.x() == b.x() && a.y() < b.y());
  });
  pts.erase(std::unique(pts.begin(), pts.end(), [](const Vec2& a, const Vec2& b) { return (a - b).norm() < 1e-15; }),
            pts.end());
  if (pts.size() < 3) return pts;
  Polygon hull(2 * pts.size());
  std::size_t k = 0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    while (k >= 2 && cross2(hull[k - 1] - hull[k - 2], pts[i] - hull[k - 2]) <= 0.0) --k;
    hull[k++] = pts[i];
  }
  for (std::size_t i = pts.size() - 1, t = k + 1; i-- > 0;) {
    while (k >= t && cross2(hull[k - 1] - hull[k - 2], pts[i] - hull[k - 2]) <= 0.0) --k;
    hull[k++] = pts[i];
  }
  hull.resize(k - 1);
  return hull;
}

/// Boundary counts as inside, within `tol` (a distance).
inline bool contains(const Polygon& poly, const Vec2& p, double tol = 1e-12) {
  if (poly.size() < 3) return false;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const Vec2& a = poly[i];
    const Vec2& b = poly[(i + 1) % poly.size()];
    const Vec2 e = b - a;
    const double len = e.norm();
    if (len == 0.0) continue;
    if (cross2(e, p - a) / len < -tol) return false;
  }
  return true;
}

/// Sutherland-Hodgman clip of `subject` by the convex CCW polygon `clipper`.
inline Polygon clip_convex(const Polygon& subject, const Polygon& clipper) {
  Polygon out = subject;
  for (std::size_t i = 0; i < clipper.size() && !out.empty(); ++i) {
    const Vec2& a = clipper[i];
    const Vec2& b = clipper[(i + 1) % clipper.size()];
    const Vec2 e = b - a;
    auto side = [&](const Vec2& p) { return cross2(e, p - a); };
    Polygon in = std::move(out);
    out.clear();
    for (std::size_t j = 0; j < in.size(); ++j) {
      const Vec2& cur = in[j];
      const Vec2& prev = in[(j + in.size() - 1) % in.size()];
      const double sc = side(cur), sp = side(prev);
      if (sc >= 0.0) {
        if (sp < 0.0) out.push_back(prev + (cur - prev) * (sp / (sp - sc)));
        out.push_back(cur);
      } else if (sp >= 0.0) {
        out.push_back(prev + (cur - prev) * (sp / (sp - sc)));
      }
    }
  }
  if (out.size() < 3) return {};
  // Drop near-duplicate vertices produced by clipping through existing corners.
  Polygon cleaned;
  for (const auto& p : out)
    if (cleaned.empty() || (p - cleaned.back()).norm() > 1e-14) cleaned.push_back(p);
  while (cleaned.size() > 1 && (cleaned.front() - cleaned.back()).norm() <= 1e-14) cleaned.pop_back();
  if (cleaned.size() < 3 || area(cleaned) <= 0.0) return {};
  return cleaned;
}

struct ChebyshevResult {
  Vec2 center = Vec2::Zero();
  double radius = 0.0;
};

/// Deepest interior point of a convex polygon, found as the optimal vertex of
/// the LP  max r  s.t.  n_i . p - r >= n_i . a_i  (inward edge normals n_i).
/// The LP is tiny, so every vertex (triple of active constraints) is
/// enumerated; among optimal points the lexicographically smallest wins.
inline ChebyshevResult chebyshev_center(const Polygon& poly) {
  ChebyshevResult best;
  const std::size_t m = poly.size();
  if (m == 0) return best;
  if (m < 3 || area(poly) <= 0.0) {
    Vec2 c = Vec2::Zero();
    for (const auto& p : poly) c += p;
    best.center = c / static_cast<double>(m);
    return best;
  }
  std::vector<Vec2> normals;
  std::vector<double> offsets;
  double scale = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const Vec2 e = poly[(i + 1) % m] - poly[i];
    const double len = e.norm();
    if (len <= 0.0) continue;
    const Vec2 n(-e.y() / len, e.x() / len);
    normals.push_back(n);
    offsets.push_back(n.dot(poly[i]));
    scale = std::max(scale, len);
  }
  const std::size_t k = normals.size();
  const double feas_tol = 1e-12 * std::max(1.0, scale);
  const double tie_tol = 1e-11 * std::max(1.0, scale);
  bool found = false;
  for (std::size_t a = 0; a < k; ++a)
    for (std::size_t b = a + 1; b < k; ++b)
      for (std::size_t c = b + 1; c < k; ++c) {
        Eigen::Matrix3d A;
        Eigen::Vector3d rhs;
        const std::size_t idx[3] = {a, b, c};
        for (int r = 0; r < 3; ++r) {
          A(r, 0) = normals[idx[r]].x();
          A(r, 1) = normals[idx[r]].y();
          A(r, 2) = -1.0;
          rhs(r) = offsets[idx[r]];
        }
        const Eigen::FullPivLU<Eigen::Matrix3d> lu(A);
        if (!lu.isInvertible()) continue;
        const Eigen::Vector3d sol = lu.solve(rhs);
        if (sol(2) < -feas_tol) continue;
        const Vec2 p(sol(0), sol(1));
        bool feasible = true;
        for (std::size_t i = 0; i < k && feasible; ++i)
          if (normals[i].dot(p) - sol(2) < offsets[i] - feas_tol) feasible = false;
        if (!feasible) continue;
        const double r = sol(2);
        const bool better = !found || r > best.radius + tie_tol ||
                            (r >= best.radius - tie_tol &&
                             (p.x() < best.center.x() - tie_tol ||
                              (std::abs(p.x() - best.center.x()) <= tie_tol && p.y() < best.center.y())));
        if (better) {
          best.radius = r;
          best.center = p;
          found = true;
        }
      }
  if (!found) {
    Vec2 c = Vec2::Zero();
    for (const auto& p : poly) c += p;
    best.center = c / static_cast<double>(m);
  }
  return best;
}

}  // namespace cmprim
