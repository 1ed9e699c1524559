#include "cmprim/geometry2d.hpp"
#include "cmprim/so3.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace cmprim;

namespace {

double edge_distance(const Polygon& poly, const Vec2& p) {
  double d = INFINITY;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const Vec2 a = poly[i], b = poly[(i + 1) % poly.size()];
    const Vec2 e = (b - a).normalized();
    d = std::min(d, cross2(e, p - a));
  }
  return d;
}

struct GridOracle {
  Vec2 center;
  double radius;
};

/// Max-min edge distance over a regular grid.
GridOracle brute_force_center(const Polygon& poly, double step) {
  double x0 = INFINITY, y0 = INFINITY, x1 = -INFINITY, y1 = -INFINITY;
  for (const auto& p : poly) {
    x0 = std::min(x0, p.x());
    y0 = std::min(y0, p.y());
    x1 = std::max(x1, p.x());
    y1 = std::max(y1, p.y());
  }
  GridOracle best{Vec2::Zero(), -INFINITY};
  for (double x = x0; x <= x1; x += step)
    for (double y = y0; y <= y1; y += step) {
      const double d = edge_distance(poly, Vec2(x, y));
      if (d > best.radius) best = {Vec2(x, y), d};
    }
  return best;
}

Polygon random_convex(std::mt19937& rng, int n, double scale) {
  std::uniform_real_distribution<double> u(-scale, scale);
  std::vector<Vec2> pts;
  for (int i = 0; i < n; ++i) pts.emplace_back(u(rng), u(rng));
  return convex_hull(pts);
}

}  // namespace

TEST(Hull, SquareWithInteriorPoint) {
  const auto h = convex_hull({{0, 0}, {1, 0}, {1, 1}, {0, 1}, {0.5, 0.5}, {1, 0.5}});
  EXPECT_EQ(h.size(), 4u);
  EXPECT_GT(signed_area(h), 0.0);
  EXPECT_NEAR(area(h), 1.0, 1e-15);
}

TEST(Clip, OffsetSquares) {
  const Polygon a{{0, 0}, {1, 0}, {1, 1}, {0, 1}};
  const Polygon b{{0.5, 0}, {1.5, 0}, {1.5, 1}, {0.5, 1}};
  const auto c = clip_convex(a, b);
  EXPECT_NEAR(area(c), 0.5, 1e-15);
  for (const auto& p : c) {
    EXPECT_GE(p.x(), 0.5 - 1e-15);
    EXPECT_LE(p.x(), 1.0 + 1e-15);
  }
}

TEST(Clip, Disjoint) {
  const Polygon a{{0, 0}, {1, 0}, {1, 1}, {0, 1}};
  const Polygon b{{2, 0}, {3, 0}, {3, 1}, {2, 1}};
  EXPECT_TRUE(clip_convex(a, b).empty());
}

TEST(Chebyshev, UnitSquare) {
  const auto r = chebyshev_center({{0, 0}, {1, 0}, {1, 1}, {0, 1}});
  EXPECT_NEAR(r.radius, 0.5, 1e-12);
  EXPECT_LT((r.center - Vec2(0.5, 0.5)).norm(), 1e-12);
}

TEST(Chebyshev, RightTriangle) {
  const Polygon tri{{0, 0}, {1, 0}, {0, 1}};
  const auto r = chebyshev_center(tri);
  const auto oracle = brute_force_center(tri, 1e-3);
  EXPECT_NEAR(r.radius, oracle.radius, 2e-3);
  EXPECT_NEAR(r.radius, (2.0 - std::sqrt(2.0)) / 2.0, 1e-12);
  EXPECT_LT((r.center - Vec2(r.radius, r.radius)).norm(), 1e-12);
}

TEST(Chebyshev, RectangleTieBreak) {
  const auto r = chebyshev_center({{0, 0}, {2, 0}, {2, 1}, {0, 1}});
  EXPECT_NEAR(r.radius, 0.5, 1e-12);
  EXPECT_LT((r.center - Vec2(0.5, 0.5)).norm(), 1e-12);
}

TEST(Chebyshev, RandomPolygonsAgainstGridOracle) {
  std::mt19937 rng(5);
  std::uniform_int_distribution<int> nd(3, 9);
  for (int i = 0; i < 20; ++i) {
    const auto poly = random_convex(rng, nd(rng), 0.3);
    if (poly.size() < 3) continue;
    const auto r = chebyshev_center(poly);
    const auto o = brute_force_center(poly, 1e-3);
    EXPECT_NEAR(r.radius, o.radius, 2e-3);
    EXPECT_NEAR(edge_distance(poly, r.center), r.radius, 1e-9);
  }
}

TEST(Clip, RandomIntersectionsContainedInInputs) {
  std::mt19937 rng(9);
  std::normal_distribution<double> n(0.0, 0.05);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<Polygon> quads;
    for (int i = 0; i < 50; ++i) {
      std::vector<Vec2> pts;
      for (int k = 0; k < 4; ++k) {
        const double a = kPi / 2 * k + 0.3 * u(rng);
        const double r = 0.2 + 0.1 * std::abs(u(rng));
        pts.emplace_back(r * std::cos(a) + n(rng) * 0.2, r * std::sin(a) + n(rng) * 0.2);
      }
      auto q = convex_hull(pts);
      if (contains(q, Vec2::Zero())) quads.push_back(q);
    }
    ASSERT_FALSE(quads.empty());
    Polygon phi = quads.front();
    double min_area = area(phi);
    for (std::size_t i = 1; i < quads.size(); ++i) {
      phi = clip_convex(phi, quads[i]);
      min_area = std::min(min_area, area(quads[i]));
    }
    ASSERT_GE(phi.size(), 3u);
    EXPECT_LE(area(phi), min_area + 1e-15);
    for (const auto& v : phi)
      for (const auto& q : quads) EXPECT_TRUE(contains(q, v, 1e-9));
    // Monte-Carlo: a point is in phi iff it is in every quad.
    for (int s = 0; s < 2000; ++s) {
      const Vec2 p(0.4 * u(rng), 0.4 * u(rng));
      bool all = true;
      for (const auto& q : quads) all = all && contains(q, p, 0.0);
      const bool in_phi = contains(phi, p, 0.0);
      if (std::abs(edge_distance(phi, p)) > 1e-9) EXPECT_EQ(all, in_phi);
    }
  }
}
