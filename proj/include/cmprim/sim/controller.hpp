#pragma once

// Impedance-controlled execution of a learned primitive: a feed-forward
// target moves along the desired directions and the tool is pulled toward it
// through the learned stiffness.

#include "cmprim/core.hpp"
#include "cmprim/sim/solver.hpp"
#include "cmprim/so3.hpp"

#include <vector>

namespace cmprim::sim {

struct BodyState {
  Pose pose;
  std::vector<std::size_t> contact_set;  // indices into the last contact list that carried force
  WarmStart warm;
};

struct ControllerStep {
  BodyState state;
  Pose target;
  Wrench command;   // world frame
  Wrench measured;  // environment wrench on the tool, in the primitive's frame
};

/// Advances the target by nu*dt*v_d and lambda*dt*w_d, then applies
/// F = K_f (x* - x), T = K_o log(B^T B*) (tool-frame primitives express both
/// in the current tool frame).
inline Wrench impedance_wrench(const CompliantPrimitive& prim, const Pose& pose, const Pose& target) {
  const Mat3 B = pose.rotation();
  Wrench w;
  if (prim.frame == Frame::Tool) {
    w.force = B * (prim.K_f * (B.transpose() * (target.position - pose.position)));
    const Vec3 e = rotation_log_unchecked(pose.orientation.conjugate() * target.orientation);
    w.torque = B * (prim.K_o * e);
  } else {
    w.force = prim.K_f * (target.position - pose.position);
    w.torque = prim.K_o * rotation_log_unchecked(target.orientation * pose.orientation.conjugate());
  }
  return w;
}

inline Pose advance_target(const CompliantPrimitive& prim, const Pose& pose, Pose target, double dt) {
  if (prim.frame == Frame::Tool) {
    if (prim.v_d) target.position += prim.nu * dt * (pose.orientation * *prim.v_d);
    if (prim.w_d) target.orientation = (target.orientation * rotation_exp(prim.lambda * dt * *prim.w_d)).normalized();
  } else {
    if (prim.v_d) target.position += prim.nu * dt * *prim.v_d;
    if (prim.w_d) target.orientation = (rotation_exp(prim.lambda * dt * *prim.w_d) * target.orientation).normalized();
  }
  return target;
}

inline Wrench to_frame(const Wrench& w, const Pose& pose, Frame frame) {
  if (frame == Frame::World) return w;
  const Mat3 Bt = pose.rotation().transpose();
  return {Bt * w.force, Bt * w.torque};
}

inline ControllerStep step_controller(const BodyState& state, const CompliantPrimitive& prim, const Pose& target,
                                      double dt, const Environment& env) {
  if (!(dt > 0.0)) throw Error(ErrorCode::InvalidConfig, "dt must be positive");
  ControllerStep out;
  out.target = advance_target(prim, state.pose, target, dt);
  out.command = impedance_wrench(prim, state.pose, out.target);
  out.state.warm = state.warm;
  const auto step = integrate(env, state.pose, out.command, dt, &out.state.warm);
  out.state.pose = step.pose;
  for (std::size_t i = 0; i < step.solve.forces.size(); ++i)
    if (step.solve.forces[i].norm() > 0.0) out.state.contact_set.push_back(i);
  out.measured = to_frame(step.solve.contact, state.pose, prim.frame);
  if (!env.bounds.contains(out.state.pose.position) || !out.state.pose.valid())
    throw Error(ErrorCode::Diverged, "tool left the workspace bounds");
  return out;
}

struct TrajectorySample {
  double t = 0.0;
  Pose pose;
  Wrench measured;
};

struct ReproduceResult {
  std::vector<TrajectorySample> trajectory;
  bool success = false;
  bool diverged = false;
  std::size_t steps = 0;
  double final_position_error = 0.0;
  double final_orientation_error = 0.0;
};

/// Runs the primitive from `start` until the goal region is reached or
/// `max_steps` elapse. Divergence counts as failure.
inline ReproduceResult reproduce(const CompliantPrimitive& prim, const Environment& env, const Pose& start,
                                 std::size_t max_steps, double dt, std::size_t record_every = 1) {
  if (!env.bounds.contains(start.position)) throw Error(ErrorCode::InvalidConfig, "start outside workspace bounds");
  ReproduceResult r;
  BodyState s{start, {}, {}};
  project_out(env, s.pose);
  Pose target = s.pose;
  r.trajectory.push_back({0.0, s.pose, {}});
  r.success = env.goal.reached(s.pose);
  while (!r.success && r.steps < max_steps) {
    ControllerStep c;
    try {
      c = step_controller(s, prim, target, dt, env);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::Diverged) throw;
      r.diverged = true;
      break;
    }
    ++r.steps;
    s = c.state;
    target = c.target;
    r.success = env.goal.reached(s.pose);
    if (r.steps % record_every == 0 || r.success) r.trajectory.push_back({r.steps * dt, s.pose, c.measured});
  }
  r.final_position_error = env.goal.position_error(s.pose.position);
  r.final_orientation_error = env.goal.orientation_error(s.pose.orientation);
  return r;
}

}  // namespace cmprim::sim
