#pragma once

// Desired-direction learning: each step bounds the admissible directions by a
// widened sector between its motion and the reversed wrench. The sectors are
// projected to a 2-D angle map, outliers are voted out, and the deepest point
// of the common intersection becomes the learned direction.

#include "cmprim/core.hpp"
#include "cmprim/geometry2d.hpp"
#include "cmprim/so3.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <vector>

namespace cmprim {

/// Polar angle map: the direction's tilt from +z times the unit vector of its azimuth.
inline Vec2 vec2ang(const Vec3& p) {
  const double n = p.norm();
  if (!(n > 0.0) || !std::isfinite(n)) throw Error(ErrorCode::ZeroVector, "vec2ang of a zero vector");
  const Vec3 u = p / n;
  const double r = std::acos(std::clamp(u.z(), -1.0, 1.0));
  const double g = std::atan2(u.y(), u.x());
  return {r * std::cos(g), r * std::sin(g)};
}

inline Vec3 ang2vec(const Vec2& theta) {
  const double r = theta.norm();
  if (!(r < kPi)) throw Error(ErrorCode::OutOfDomain, "angle vector norm must be below pi");
  if (r == 0.0) return Vec3::UnitZ();
  const double s = std::sin(r) / r;
  return Vec3(s * theta.x(), s * theta.y(), std::cos(r)).normalized();
}

/// Minimal rotation taking `mean_dir` onto +z. An antiparallel input turns by pi about x.
inline Mat3 align_to_z(const Vec3& mean_dir) {
  const double n = mean_dir.norm();
  if (!(n > 0.0)) throw Error(ErrorCode::ZeroVector, "align_to_z of a zero vector");
  const Vec3 u = mean_dir / n;
  const Vec3 axis = u.cross(Vec3::UnitZ());
  const double s = axis.norm();
  const double c = u.z();
  if (s < 1e-12) {
    if (c > 0.0) return Mat3::Identity();
    return Eigen::AngleAxisd(kPi, Vec3::UnitX()).toRotationMatrix();
  }
  return Eigen::AngleAxisd(std::atan2(s, c), axis / s).toRotationMatrix();
}

struct AngleRectangle {
  Polygon corners;  // CCW hull of the projected corner directions
  std::size_t step_index = 0;
  bool degenerate = false;
};

enum class SectorStatus { Ok, Degenerate, Contrary };

struct SectorOutcome {
  SectorStatus status = SectorStatus::Ok;
  std::optional<AngleRectangle> rect;  // absent for Contrary
};

inline constexpr double kSectorAngleTol = 1e-3;

/// Builds the angle-space quadrilateral for one step from its unit motion
/// direction `psi` and unit wrench direction `pi_hat`.
inline SectorOutcome sector_rectangle(const Vec3& psi, const Vec3& pi_hat, const LearnerConfig& cfg, const Mat3& R,
                                      std::size_t step_index = 0) {
  SectorOutcome out;
  const double spread = angle_between(psi, Vec3(-pi_hat));
  const double t_xi = std::tan(deg2rad(cfg.xi_deg));
  const double t_eta = std::tan(deg2rad(cfg.eta_deg));
  Vec3 e1, e2;
  if (spread > kPi - kSectorAngleTol) {
    out.status = SectorStatus::Contrary;
    return out;
  }
  if (spread < kSectorAngleTol) {
    out.status = SectorStatus::Degenerate;
    e1 = any_orthogonal(psi);
    e2 = psi.cross(e1).normalized();
  } else {
    e1 = (-pi_hat - psi).normalized();
    e2 = (-pi_hat.cross(psi)).normalized();
  }
  const Vec3 d1 = t_xi * e1;
  const Vec3 d2 = t_eta * e2;
  const Vec3 pts3[4] = {psi - d1 + d2, psi - d1 - d2, -pi_hat + d1 + d2, -pi_hat + d1 - d2};
  std::vector<Vec2> pts;
  for (const auto& p : pts3) pts.push_back(vec2ang(R * p));
  AngleRectangle rect;
  rect.corners = convex_hull(pts);
  rect.step_index = step_index;
  rect.degenerate = out.status == SectorStatus::Degenerate;
  out.rect = std::move(rect);
  return out;
}

struct VoteResult {
  Vec2 cell = Vec2::Zero();
  std::size_t count = 0;
};

/// Counts, for every grid cell center over the joint bounding box, how many
/// rectangles contain it. Ties go to the cell closest to the origin, then to
/// the lexicographically smallest center.
inline VoteResult vote_grid(const std::vector<AngleRectangle>& rects, double grid_res) {
  if (rects.empty()) throw Error(ErrorCode::NoUsableSteps, "vote_grid needs at least one rectangle");
  if (!(grid_res > 0.0)) throw Error(ErrorCode::InvalidConfig, "grid_res must be positive");
  double x0 = INFINITY, y0 = INFINITY, x1 = -INFINITY, y1 = -INFINITY;
  for (const auto& r : rects)
    for (const auto& p : r.corners) {
      x0 = std::min(x0, p.x());
      y0 = std::min(y0, p.y());
      x1 = std::max(x1, p.x());
      y1 = std::max(y1, p.y());
    }
  const auto nx = static_cast<std::size_t>(std::max(1.0, std::ceil((x1 - x0) / grid_res)));
  const auto ny = static_cast<std::size_t>(std::max(1.0, std::ceil((y1 - y0) / grid_res)));
  std::vector<std::size_t> counts(nx * ny, 0);
  auto center = [&](std::size_t i, std::size_t j) {
    return Vec2(x0 + (static_cast<double>(i) + 0.5) * grid_res, y0 + (static_cast<double>(j) + 0.5) * grid_res);
  };
  for (const auto& r : rects) {
    if (r.corners.size() < 3) continue;
    double rx0 = INFINITY, ry0 = INFINITY, rx1 = -INFINITY, ry1 = -INFINITY;
    for (const auto& p : r.corners) {
      rx0 = std::min(rx0, p.x());
      ry0 = std::min(ry0, p.y());
      rx1 = std::max(rx1, p.x());
      ry1 = std::max(ry1, p.y());
    }
    const auto i0 = static_cast<std::size_t>(std::max(0.0, std::floor((rx0 - x0) / grid_res - 0.5)));
    const auto j0 = static_cast<std::size_t>(std::max(0.0, std::floor((ry0 - y0) / grid_res - 0.5)));
    const std::size_t i1 = std::min(nx - 1, static_cast<std::size_t>(std::max(0.0, std::ceil((rx1 - x0) / grid_res))));
    const std::size_t j1 = std::min(ny - 1, static_cast<std::size_t>(std::max(0.0, std::ceil((ry1 - y0) / grid_res))));
    for (std::size_t i = i0; i <= i1; ++i)
      for (std::size_t j = j0; j <= j1; ++j)
        if (contains(r.corners, center(i, j))) ++counts[i * ny + j];
  }
  VoteResult best;
  bool have = false;
  auto better = [](const Vec2& a, const Vec2& b) {
    const double na = a.norm(), nb = b.norm();
    if (na != nb) return na < nb;
    if (a.x() != b.x()) return a.x() < b.x();
    return a.y() < b.y();
  };
  for (std::size_t i = 0; i < nx; ++i)
    for (std::size_t j = 0; j < ny; ++j) {
      const std::size_t c = counts[i * ny + j];
      const Vec2 p = center(i, j);
      if (!have || c > best.count || (c == best.count && better(p, best.cell))) {
        best = {p, c};
        have = true;
      }
    }
  if (best.count == 0) {
    // Every rectangle is thinner than a cell: fall back to rectangle vertex means.
    for (const auto& r : rects) {
      if (r.corners.empty()) continue;
      Vec2 p = Vec2::Zero();
      for (const auto& q : r.corners) p += q;
      p /= static_cast<double>(r.corners.size());
      std::size_t c = 0;
      for (const auto& s : rects)
        if (contains(s.corners, p)) ++c;
      if (c > best.count || (c == best.count && better(p, best.cell))) best = {p, c};
    }
  }
  return best;
}

inline std::vector<std::size_t> select_inliers(const std::vector<AngleRectangle>& rects, const Vec2& cell) {
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < rects.size(); ++i)
    if (contains(rects[i].corners, cell, 1e-12)) idx.push_back(i);
  return idx;
}

/// Intersection of the selected rectangles by successive convex clipping. A
/// numerically empty result falls back to a grid_res square around `cell`.
inline Polygon intersect_rectangles(const std::vector<AngleRectangle>& rects, const std::vector<std::size_t>& which,
                                    const Vec2& cell, double grid_res) {
  Polygon phi;
  bool first = true;
  for (std::size_t i : which) {
    if (first) {
      phi = rects[i].corners;
      first = false;
    } else {
      phi = clip_convex(phi, rects[i].corners);
    }
    if (phi.size() < 3) break;
  }
  if (phi.size() < 3 || area(phi) <= 0.0) {
    const double h = 0.5 * grid_res;
    phi = {cell + Vec2(-h, -h), cell + Vec2(h, -h), cell + Vec2(h, h), cell + Vec2(-h, h)};
  }
  return phi;
}

struct DesiredDirectionResult {
  std::optional<Vec3> direction;
  double inlier_ratio = 0.0;
  Polygon intersection;
  Vec2 center = Vec2::Zero();  // Chebyshev center of the intersection, in angle space
  double chebyshev_radius = 0.0;
  std::size_t n_rectangles = 0;
  std::size_t n_inliers = 0;

  Mat3 align = Mat3::Identity();
  VoteResult vote;
  std::vector<AngleRectangle> rectangles;
  std::vector<std::size_t> inliers;
  std::size_t n_degenerate = 0;
  std::size_t n_contrary = 0;
  bool free_space = false;  // no usable wrench: sectors built from motion alone
};

/// Runs the full direction search on the concatenation of all demonstrations.
/// Steps need both a motion and a wrench direction. When fewer than two such
/// steps exist but the channel moved, the motion directions alone are used
/// (degenerate sectors around each motion, square with half-width xi so the
/// center of their overlap is unique).
inline DesiredDirectionResult learn_desired_direction(const std::vector<std::vector<MotionStep>>& demos,
                                                      Channel channel, const LearnerConfig& cfg) {
  struct Item {
    Vec3 psi, pi;
    std::size_t index;
  };
  std::vector<Item> items, motion_only;
  std::size_t index = 0;
  for (const auto& steps : demos)
    for (const auto& s : steps) {
      const auto& m = s.motion_dir(channel);
      const auto& w = s.wrench_dir(channel);
      if (m) {
        motion_only.push_back({*m, w ? *w : Vec3(-*m), index});
        if (w) items.push_back({*m, *w, index});
      }
      ++index;
    }
  DesiredDirectionResult res;
  if (items.size() < 2) {
    if (motion_only.size() < 2)
      throw Error(ErrorCode::NoUsableSteps,
                  std::string("fewer than 2 usable ") + to_string(channel) + " steps for the direction search");
    for (auto& it : motion_only) it.pi = -it.psi;
    items = std::move(motion_only);
    res.free_space = true;
  }

  Vec3 mean = Vec3::Zero();
  for (const auto& it : items) mean += it.psi;
  mean /= static_cast<double>(items.size());
  if (mean.norm() < 1e-6) mean = items.front().psi;
  res.align = align_to_z(mean);

  LearnerConfig sector_cfg = cfg;
  if (res.free_space) sector_cfg.eta_deg = cfg.xi_deg;
  for (const auto& it : items) {
    auto sec = sector_rectangle(it.psi, it.pi, sector_cfg, res.align, it.index);
    if (sec.status == SectorStatus::Contrary) {
      ++res.n_contrary;
      continue;
    }
    if (sec.status == SectorStatus::Degenerate) ++res.n_degenerate;
    res.rectangles.push_back(std::move(*sec.rect));
  }
  if (res.rectangles.empty())
    throw Error(ErrorCode::NoUsableSteps, std::string("every ") + to_string(channel) + " step has a contrary wrench");

  res.n_rectangles = res.rectangles.size();
  res.vote = vote_grid(res.rectangles, cfg.grid_res);
  res.inliers = select_inliers(res.rectangles, res.vote.cell);
  res.n_inliers = res.inliers.size();
  res.inlier_ratio = static_cast<double>(res.n_inliers) / static_cast<double>(res.n_rectangles);
  res.intersection = intersect_rectangles(res.rectangles, res.inliers, res.vote.cell, cfg.grid_res);
  const auto cc = chebyshev_center(res.intersection);
  res.center = cc.center;
  res.chebyshev_radius = cc.radius;
  if (res.inlier_ratio >= cfg.zeta && res.center.norm() < kPi)
    res.direction = (res.align.transpose() * ang2vec(res.center)).normalized();
  return res;
}

/// Ratio of total translation to total rotation over all steps, in m/rad.
inline double compute_pitch(const std::vector<std::vector<MotionStep>>& demos, const LearnerConfig& cfg) {
  double dx = 0.0, db = 0.0;
  for (const auto& steps : demos)
    for (const auto& s : steps) {
      dx += s.dx.norm();
      db += s.dbeta.norm();
    }
  if (!(db >= cfg.motion_floor_rot)) throw Error(ErrorCode::NoRotation, "total rotation below the motion floor");
  return dx / db;
}

}  // namespace cmprim
