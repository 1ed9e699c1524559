#pragma once

// End-to-end learning: windowing, work analysis, desired directions and
// compliant axes for both channels, assembled into a CompliantPrimitive.

#include "cmprim/compliance.hpp"
#include "cmprim/core.hpp"
#include "cmprim/direction.hpp"
#include "cmprim/preproc.hpp"
#include "cmprim/work.hpp"

#include <array>
#include <optional>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

namespace cmprim {

struct ChannelReport {
  std::size_t motion_steps = 0;
  WorkProfile work;
  bool three_dof = false;
  std::optional<DesiredDirectionResult> direction;
  std::optional<ComplianceResult> compliance;
  std::vector<Vec3> demo_means;  // per-demonstration mean motion directions
};

struct LearnReport {
  CompliantPrimitive primitive;
  std::array<ChannelReport, 2> channels;  // indexed by Channel
  std::vector<std::string> warnings;
  std::vector<std::string> demo_ids;
  std::vector<std::size_t> steps_per_demo;
  LearnerConfig config;

  ChannelReport& channel(Channel c) { return channels[static_cast<std::size_t>(c)]; }
  const ChannelReport& channel(Channel c) const { return channels[static_cast<std::size_t>(c)]; }
};

/// Speeds for a screw motion: the faster channel runs at its nominal speed and
/// the other follows through the pitch, so nu = pitch * lambda.
inline std::pair<double, double> screw_speeds(double pitch, const LearnerConfig& cfg) {
  if (pitch > 0.0 && cfg.speed_nu / pitch <= cfg.speed_lambda) return {cfg.speed_nu, cfg.speed_nu / pitch};
  return {pitch * cfg.speed_lambda, cfg.speed_lambda};
}

inline LearnReport learn_primitive(const std::vector<Demonstration>& demos, const LearnerConfig& cfg) {
  cfg.validate();
  if (demos.empty()) throw Error(ErrorCode::NoInput, "no demonstrations given");
  LearnReport rep;
  rep.config = cfg;
  const Frame frame = demos.front().frame;
  std::vector<std::vector<MotionStep>> per_demo;
  for (const auto& d : demos) {
    if (d.frame != frame) throw Error(ErrorCode::InvalidConfig, "demonstrations mix tool and world frames");
    per_demo.push_back(aggregate(d, cfg));
    rep.demo_ids.push_back(d.id);
    rep.steps_per_demo.push_back(per_demo.back().size());
  }
  std::vector<MotionStep> all;
  for (const auto& s : per_demo) all.insert(all.end(), s.begin(), s.end());

  CompliantPrimitive prim;
  prim.frame = frame;
  bool any_motion = false;
  for (Channel c : {Channel::Translation, Channel::Rotation}) {
    auto& ch = rep.channel(c);
    const std::string name = to_string(c);
    ch.motion_steps = count_motion_steps(all, c);
    ch.work = work_profile(all, c);
    const double k = cfg.stiffness(c);
    Mat3& K = c == Channel::Translation ? prim.K_f : prim.K_o;
    std::optional<Vec3>& dir = c == Channel::Translation ? prim.v_d : prim.w_d;
    if (ch.motion_steps == 0) {
      rep.warnings.push_back("no " + name + " motion above the floor: channel kept stiff");
      K = k * Mat3::Identity();
      continue;
    }
    any_motion = true;
    ch.three_dof = is_three_dof_compliant(ch.work, cfg.sigma_work);
    if (ch.three_dof) {
      K.setZero();
      (c == Channel::Translation ? prim.trans_3dof_compliant : prim.rot_3dof_compliant) = true;
      continue;
    }
    try {
      ch.direction = learn_desired_direction(per_demo, c, cfg);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::NoUsableSteps) throw;
      rep.warnings.push_back(name + " direction search skipped: " + e.what());
    }
    if (ch.direction) {
      if (ch.direction->n_contrary > 0)
        rep.warnings.push_back(std::to_string(ch.direction->n_contrary) + " " + name +
                               " steps dropped for a wrench opposing the motion");
      if (ch.direction->free_space)
        rep.warnings.push_back(name + " direction learned from motion only (no contact wrench)");
      dir = ch.direction->direction;
    }
    for (const auto& steps : per_demo) {
      try {
        ch.demo_means.push_back(mean_direction(steps, c));
      } catch (const Error&) {
        ch.demo_means.push_back(Vec3::Zero());
      }
    }
    ch.compliance = select_num_axes(ch.demo_means, dir, cfg);
    K = stiffness_matrix(ch.compliance->axes, k);
  }
  if (!any_motion) throw Error(ErrorCode::NoUsableSteps, "no motion in either channel");
  if (prim.trans_3dof_compliant && prim.rot_3dof_compliant)
    rep.warnings.push_back("both channels are 3-DOF compliant: the primitive exerts no wrench");

  if (prim.v_d && prim.w_d) {
    prim.pitch = compute_pitch(per_demo, cfg);
    std::tie(prim.nu, prim.lambda) = screw_speeds(*prim.pitch, cfg);
  } else {
    prim.nu = prim.v_d ? cfg.speed_nu : 0.0;
    prim.lambda = prim.w_d ? cfg.speed_lambda : 0.0;
  }
  rep.primitive = CompliantPrimitive::make(prim, cfg.stiffness_trans, cfg.stiffness_rot);
  return rep;
}

}  // namespace cmprim
