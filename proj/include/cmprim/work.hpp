#pragma once

// Work-sign analysis: decides whether all translational (or rotational)
// degrees of freedom were driven by the environment.

#include "cmprim/core.hpp"

#include <vector>

namespace cmprim {

inline constexpr double kEnergyFloor = 1e-9;  // J

struct WorkProfile {
  std::vector<double> per_step_work;
  double w_env = 0.0;
  double w_tot = 0.0;
  double ratio = 0.0;
  bool no_work = true;
};

/// Work per step is the recorded (environment) wrench dotted with the
/// windowed increment; positive values are work done by the environment.
inline WorkProfile work_profile(const std::vector<MotionStep>& steps, Channel channel) {
  WorkProfile p;
  p.per_step_work.reserve(steps.size());
  for (const auto& s : steps) {
    const double w = s.wrench(channel).dot(s.increment(channel));
    p.per_step_work.push_back(w);
    p.w_tot += std::abs(w);
    if (w > 0.0) p.w_env += w;
  }
  p.no_work = !(p.w_tot >= kEnergyFloor);
  p.ratio = p.no_work ? 0.0 : p.w_env / p.w_tot;
  return p;
}

inline bool is_three_dof_compliant(const WorkProfile& profile, double sigma_work) {
  if (!(sigma_work > 0.0 && sigma_work <= 1.0))
    throw Error(ErrorCode::InvalidConfig, "sigma_work must lie in (0, 1]");
  return !profile.no_work && profile.ratio >= sigma_work;
}

}  // namespace cmprim
