#pragma once

// Windowed differencing of raw recordings into MotionSteps.

#include "cmprim/core.hpp"
#include "cmprim/so3.hpp"

#include <vector>

namespace cmprim {

namespace detail {

inline std::optional<Vec3> unit_if_above(const Vec3& v, double floor) {
  const double n = v.norm();
  if (!(n >= floor) || n == 0.0) return std::nullopt;
  return Vec3(v / n);
}

}  // namespace detail

/// Splits the demonstration into consecutive, non-overlapping windows of
/// `cfg.window` samples, so N samples give floor(N / window) steps. A window's
/// increments are taken first-to-last and its wrench is the window mean. The
/// trailing partial window is discarded.
///
/// Tool-frame recordings yield tool-frame increments (dx expressed in the
/// window's first orientation, dbeta = log(B_first^T B_last)). World-frame
/// recordings yield the spatial rotation increment log(B_last B_first^T) so that
/// dbeta matches the frame of the recorded torque.
inline std::vector<MotionStep> aggregate(const Demonstration& demo, const LearnerConfig& cfg) {
  validate_demonstration(demo);
  if (cfg.window < 1) throw Error(ErrorCode::InvalidConfig, "window must be >= 1");
  const std::size_t w = static_cast<std::size_t>(cfg.window);
  const std::size_t n = demo.samples.size();
  // Window k covers samples [k*w, k*w + w - 1].
  const std::size_t count = n / w;
  if (count < 2)
    throw Error(ErrorCode::TooShort,
                "demonstration '" + demo.id + "' yields " + std::to_string(count) + " windows, need 2");

  std::vector<MotionStep> steps;
  steps.reserve(count);
  for (std::size_t k = 0; k < count; ++k) {
    const auto& first = demo.samples[k * w];
    const auto& last = demo.samples[k * w + w - 1];
    MotionStep s;
    const Vec3 dp = last.pose.position - first.pose.position;
    const Quat rel_body = first.pose.orientation.conjugate() * last.pose.orientation;
    Vec3 dbeta;
    try {
      dbeta = rotation_log(rel_body);
    } catch (const Error&) {
      throw Error(ErrorCode::InvalidWindow, "window " + std::to_string(k) + " rotates by ~pi", k);
    }
    if (demo.frame == Frame::Tool) {
      s.dx = first.pose.orientation.conjugate() * dp;
      s.dbeta = dbeta;
    } else {
      s.dx = dp;
      s.dbeta = first.pose.orientation * dbeta;
    }
    Vec3 f = Vec3::Zero(), t = Vec3::Zero();
    for (std::size_t i = k * w; i < (k + 1) * w; ++i) {
      f += demo.samples[i].force;
      t += demo.samples[i].torque;
    }
    s.f_raw = f / static_cast<double>(w);
    s.t_raw = t / static_cast<double>(w);
    s.v_hat = detail::unit_if_above(s.dx, cfg.motion_floor_trans);
    s.w_hat = detail::unit_if_above(s.dbeta, cfg.motion_floor_rot);
    s.f_hat = detail::unit_if_above(s.f_raw, cfg.wrench_floor_force);
    s.t_hat = detail::unit_if_above(s.t_raw, cfg.wrench_floor_torque);
    steps.push_back(s);
  }
  return steps;
}

/// Arithmetic mean of the present unit motion directions, deliberately not
/// renormalized: its norm measures directional consistency.
inline Vec3 mean_direction(const std::vector<MotionStep>& steps, Channel channel) {
  Vec3 sum = Vec3::Zero();
  std::size_t count = 0;
  for (const auto& s : steps) {
    if (const auto& d = s.motion_dir(channel)) {
      sum += *d;
      ++count;
    }
  }
  if (count == 0) throw Error(ErrorCode::NoMotion, std::string("no ") + to_string(channel) + " motion in any step");
  return sum / static_cast<double>(count);
}

inline std::size_t count_motion_steps(const std::vector<MotionStep>& steps, Channel channel) {
  std::size_t c = 0;
  for (const auto& s : steps)
    if (s.motion_dir(channel)) ++c;
  return c;
}

}  // namespace cmprim
