#pragma once

// Synthetic kinesthetic teaching: a simulated teacher pushes the tool with a
// noisy intent wrench while a virtual F/T sensor records the contact wrench.

#include "cmprim/core.hpp"
#include "cmprim/sim/controller.hpp"
#include "cmprim/sim/solver.hpp"
#include "cmprim/so3.hpp"

#include <cstdint>
#include <deque>
#include <random>
#include <string>

namespace cmprim::sim {

struct TeacherSpec {
  std::string id = "demo";
  Pose start;
  // Intent force and torque; each direction is read in `*_frame`.
  Vec3 force_dir = Vec3::Zero();
  double force = 0.0;  // N
  Frame force_frame = Frame::World;
  Vec3 torque_dir = Vec3::Zero();
  double torque = 0.0;  // N m
  Frame torque_frame = Frame::World;
  // Corrective torque toward the goal orientation, N m per rad of error.
  double align_gain = 0.0;
  double align_max = INFINITY;  // N m, saturation of the corrective torque
  // Noise: direction wobble (deg, Ornstein-Uhlenbeck with time constant
  // noise_tau), torque jitter (N m, same process) and white sensor noise.
  double dir_noise_deg = 0.0;
  double noise_tau = 0.3;
  double torque_jitter = 0.0;
  Vec3 jitter_axes = Vec3::Ones();  // per world axis scale of the torque jitter
  double sensor_noise_force = 0.0;
  double sensor_noise_torque = 0.0;
  double duration = 10.0;  // s, upper bound
  double rate = 100.0;     // Hz
  Frame record_frame = Frame::Tool;
  bool stop_at_goal = true;
  double stuck_time = 1.0;  // s without motion before giving up
  std::uint64_t seed = 1;
};

namespace detail {

/// Three independent Ornstein-Uhlenbeck processes with stationary std `sigma`.
class OuNoise {
 public:
  OuNoise(double sigma, double tau, std::mt19937_64& rng) : sigma_(sigma), tau_(tau), rng_(rng) {
    if (sigma_ > 0.0)
      for (int i = 0; i < 3; ++i) x_(i) = sigma_ * n_(rng_);
  }

  const Vec3& step(double dt) {
    if (sigma_ <= 0.0) return x_;
    const double a = std::exp(-dt / tau_);
    const double b = sigma_ * std::sqrt(1.0 - a * a);
    for (int i = 0; i < 3; ++i) x_(i) = a * x_(i) + b * n_(rng_);
    return x_;
  }

 private:
  double sigma_, tau_;
  std::mt19937_64& rng_;
  std::normal_distribution<double> n_{0.0, 1.0};
  Vec3 x_ = Vec3::Zero();
};

inline Vec3 wobble(const Vec3& dir, const Vec3& noise) {
  if (dir.norm() == 0.0) return dir;
  const Vec3 d = dir.normalized();
  const Vec3 perp = noise - d * d.dot(noise);
  return (d + perp).normalized();
}

}  // namespace detail

/// Simulates one teaching run and returns the recording. Throws TeacherStuck
/// when the tool stops moving for `stuck_time` away from the goal.
inline Demonstration generate_demo(const Environment& env, const TeacherSpec& spec) {
  if (!(spec.rate > 0.0)) throw Error(ErrorCode::InvalidConfig, "rate must be positive");
  if (!(spec.duration > 0.0)) throw Error(ErrorCode::InvalidConfig, "duration must be positive");
  env.validate();
  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> white(0.0, 1.0);
  detail::OuNoise dir_noise(deg2rad(spec.dir_noise_deg), spec.noise_tau, rng);
  detail::OuNoise tq_noise(spec.torque_jitter, spec.noise_tau, rng);

  const double sample_dt = 1.0 / spec.rate;
  const int sub = std::max(1, static_cast<int>(std::ceil(sample_dt / env.dt - 1e-9)));
  const double h = sample_dt / sub;

  Demonstration demo;
  demo.id = spec.id;
  demo.frame = spec.record_frame;
  Pose pose = spec.start;
  project_out(env, pose);
  std::deque<std::pair<double, Pose>> history;
  WarmStart warm;
  const auto n_samples = static_cast<std::size_t>(std::floor(spec.duration * spec.rate)) + 1;

  for (std::size_t k = 0; k < n_samples; ++k) {
    const double t = k * sample_dt;
    const Vec3 fn = dir_noise.step(sample_dt);
    const Vec3 tn = tq_noise.step(sample_dt);
    const Mat3 B = pose.rotation();
    Wrench cmd;
    const Vec3 fdir = detail::wobble(spec.force_dir, fn);
    cmd.force = spec.force * (spec.force_frame == Frame::Tool ? Vec3(B * fdir) : fdir);
    const Vec3 tdir = detail::wobble(spec.torque_dir, fn);
    cmd.torque = spec.torque * (spec.torque_frame == Frame::Tool ? Vec3(B * tdir) : tdir);
    if (spec.align_gain > 0.0) {
      Vec3 align = spec.align_gain * rotation_log_unchecked(env.goal.pose.orientation * pose.orientation.conjugate());
      if (align.norm() > spec.align_max) align *= spec.align_max / align.norm();
      cmd.torque += align;
    }
    cmd.torque += tn.cwiseProduct(spec.jitter_axes);

    // The recorded wrench is the mean contact wrench over the sample interval.
    Wrench acc;
    const Pose at_sample = pose;
    for (int i = 0; i < sub; ++i) {
      const auto st = integrate(env, pose, cmd, h, &warm);
      acc.force += st.solve.contact.force / sub;
      acc.torque += st.solve.contact.torque / sub;
      pose = st.pose;
    }
    if (!env.bounds.contains(pose.position)) throw Error(ErrorCode::Diverged, "teacher left the workspace");
    const Wrench rec = to_frame(acc, at_sample, spec.record_frame);
    WrenchSample s;
    s.t = t;
    s.pose = at_sample;
    s.force = rec.force;
    s.torque = rec.torque;
    if (spec.sensor_noise_force > 0.0)
      s.force += spec.sensor_noise_force * Vec3(white(rng), white(rng), white(rng));
    if (spec.sensor_noise_torque > 0.0)
      s.torque += spec.sensor_noise_torque * Vec3(white(rng), white(rng), white(rng));
    demo.samples.push_back(s);

    if (spec.stop_at_goal && env.goal.reached(pose)) {
      WrenchSample last = s;
      last.t = t + sample_dt;
      last.pose = pose;
      demo.samples.push_back(last);
      break;
    }
    history.emplace_back(t, at_sample);
    while (!history.empty() && history.front().first < t - spec.stuck_time) history.pop_front();
    if (t >= spec.stuck_time) {
      double moved = 0.0, turned = 0.0;
      for (const auto& [_, p] : history) {
        moved = std::max(moved, (p.position - pose.position).norm());
        turned = std::max(turned, angle_between(p.orientation, pose.orientation));
      }
      if (moved < 1e-5 && turned < 1e-4 && !env.goal.reached(pose))
        throw Error(ErrorCode::TeacherStuck, "no motion for " + std::to_string(spec.stuck_time) + " s at t=" +
                                                 std::to_string(t));
    }
  }
  validate_demonstration(demo);
  return demo;
}

}  // namespace cmprim::sim
