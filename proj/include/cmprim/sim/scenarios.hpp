#pragma once

// Bundled contact scenarios and the teachers that demonstrate them.

#include "cmprim/sim/teacher.hpp"
#include "cmprim/sim/world.hpp"

#include <optional>
#include <string>
#include <vector>

namespace cmprim::sim {

struct Scenario {
  Environment env;
  std::vector<TeacherSpec> teachers;  // default demonstrations
  std::vector<Pose> starts;           // default reproduction starts
  double max_time = 20.0;             // s, reproduction budget
  LearnerConfig learner;              // settings used to learn and replay this task
};

// ---------------------------------------------------------------- valley

struct ValleyParams {
  double mu = 0.7;
  double start_height = 0.03;  // m above the valley line
  double force = 3.0;          // N
  double noise_deg = 2.0;
};

/// Two 45 degree plates meeting along the y axis; a point tool slides down to
/// the valley line.
inline Environment valley_env(const ValleyParams& p = {}) {
  Environment env;
  env.name = "valley";
  const double s = 1.0 / std::sqrt(2.0);
  env.facets.push_back({Vec3::Zero(), Vec3(s, 0, s), p.mu, {}, "left"});
  env.facets.push_back({Vec3::Zero(), Vec3(-s, 0, s), p.mu, {}, "right"});
  env.probes.push_back({Vec3::Zero(), 0.0});
  env.goal.pose = Pose{};
  env.goal.tol_pos = 1e-3;
  env.goal.free_axes = {false, true, false};
  env.bounds = {Vec3(-0.2, -0.2, -0.05), Vec3(0.2, 0.2, 0.2)};
  return env;
}

/// side = -1 starts on the left plate, +1 on the right.
inline TeacherSpec valley_teacher(int side, const ValleyParams& p = {}, std::uint64_t seed = 1) {
  TeacherSpec t;
  t.id = side < 0 ? "valley-left" : "valley-right";
  t.start.position = Vec3(side * p.start_height, 0.0, p.start_height);
  t.force_dir = -Vec3::UnitZ();
  t.force = p.force;
  t.dir_noise_deg = p.noise_deg;
  t.duration = 10.0;
  t.record_frame = Frame::World;
  t.seed = seed;
  return t;
}

inline Scenario valley_scenario(const ValleyParams& p = {}) {
  Scenario sc;
  sc.env = valley_env(p);
  sc.teachers = {valley_teacher(-1, p, 11), valley_teacher(+1, p, 12)};
  sc.starts = {Pose{Vec3(-p.start_height, 0.0, p.start_height), Quat::Identity()}};
  sc.max_time = 20.0;
  return sc;
}

}  // namespace cmprim::sim

namespace cmprim::sim {

// ----------------------------------------------------------------- peg2d

struct PegParams {
  double radius = 0.0165;      // m
  double clearance = 0.00025;  // m
  double length = 0.08;        // m
  double tip_radius = 0.003;   // m, rounding of the tip corners
  double hole_depth = 0.04;    // m
  double mu = 0.3;
  double angle_deg = 20.0;     // initial tilt
  double start_depth = 0.002;  // m, how far the leading corner starts below the rim
  double force = 5.0;          // N, push along the peg axis
  double align_gain = 10.0;    // N m/rad, teacher's corrective torque
  double align_max = 1.0;      // N m
  double torque_jitter = 0.25; // N m, hand tremor
  double out_of_plane = 1.0;   // jitter scale about x and z relative to y
  double noise_deg = 0.0;
  double goal_tol_pos = 1.5e-3;
  double goal_tol_rot_deg = 2.0;
  double ref_height = 0.1;     // m, tool reference (wrist) above the tip center
};

/// Square chamferless hole in a table with a matching square peg. The tilt
/// error lies in the xz-plane. The tool frame sits at the center of the peg tip
/// with z along the peg axis.
inline Environment peg2d_env(const PegParams& p = {}) {
  Environment env;
  env.name = "peg2d";
  const double w = p.radius + p.clearance;
  const double H = p.hole_depth;
  const Vec3 X = Vec3::UnitX(), Y = Vec3::UnitY(), Z = Vec3::UnitZ();
  // Table top around the opening, split into four convex pieces.
  env.facets.push_back({Vec3(-w, 0, 0), Z, p.mu, {{Vec3(-w, 0, 0), -X}}, "table-left"});
  env.facets.push_back({Vec3(w, 0, 0), Z, p.mu, {{Vec3(w, 0, 0), X}}, "table-right"});
  env.facets.push_back({Vec3(0, w, 0), Z, p.mu, {{Vec3(0, w, 0), Y}, {Vec3(-w, 0, 0), X}, {Vec3(w, 0, 0), -X}}, "table-back"});
  env.facets.push_back({Vec3(0, -w, 0), Z, p.mu, {{Vec3(0, -w, 0), -Y}, {Vec3(-w, 0, 0), X}, {Vec3(w, 0, 0), -X}}, "table-front"});
  const std::vector<HalfSpace> depth{{Vec3::Zero(), -Z}, {Vec3(0, 0, -H), Z}};
  auto wall = [&](const Vec3& n, const std::string& name) {
    Facet f{-w * n, n, p.mu, depth, name};
    return f;
  };
  env.facets.push_back(wall(X, "wall-left"));
  env.facets.push_back(wall(-X, "wall-right"));
  env.facets.push_back(wall(Y, "wall-front"));
  env.facets.push_back(wall(-Y, "wall-back"));
  env.facets.push_back({Vec3(0, 0, -H), Z, p.mu, {}, "hole-bottom"});
  env.edges.push_back({Vec3(-w, 0, 0), Y, p.mu, "rim-left"});
  env.edges.push_back({Vec3(w, 0, 0), Y, p.mu, "rim-right"});
  env.edges.push_back({Vec3(0, -w, 0), X, p.mu, "rim-front"});
  env.edges.push_back({Vec3(0, w, 0), X, p.mu, "rim-back"});
  const double r = p.radius, rho = p.tip_radius, c = r - rho, z0 = -p.ref_height;
  for (double sx : {1.0, -1.0})
    for (double sy : {1.0, -1.0}) env.probes.push_back({Vec3(sx * c, sy * c, z0 + rho), rho});
  const HalfSpace lo{Vec3(0, 0, z0 + rho), Z}, hi{Vec3(0, 0, z0 + p.length), -Z};
  env.faces.push_back({Vec3(r, 0, 0), X, {lo, hi, {Vec3(0, -r, 0), Y}, {Vec3(0, r, 0), -Y}}});
  env.faces.push_back({Vec3(-r, 0, 0), -X, {lo, hi, {Vec3(0, -r, 0), Y}, {Vec3(0, r, 0), -Y}}});
  env.faces.push_back({Vec3(0, r, 0), Y, {lo, hi, {Vec3(-r, 0, 0), X}, {Vec3(r, 0, 0), -X}}});
  env.faces.push_back({Vec3(0, -r, 0), -Y, {lo, hi, {Vec3(-r, 0, 0), X}, {Vec3(r, 0, 0), -X}}});
  env.faces.push_back({Vec3(0, 0, z0), -Z, {{Vec3(-c, 0, 0), X}, {Vec3(c, 0, 0), -X}, {Vec3(0, -c, 0), Y}, {Vec3(0, c, 0), -Y}}});
  env.goal.pose = Pose{Vec3(0, 0, -H + p.ref_height), Quat::Identity()};
  env.goal.tol_pos = p.goal_tol_pos;
  env.goal.tol_rot = deg2rad(p.goal_tol_rot_deg);
  env.goal.rot_axis = Vec3::UnitZ();
  env.bounds = {Vec3(-0.2, -0.2, -0.05), Vec3(0.2, 0.2, 0.3)};
  env.damping_force = 600.0;
  env.damping_torque = 60.0;
  env.margin = 2e-3;
  return env;
}

/// Tilted start with the leading (+x) tip corner just inside the hole.
inline Pose peg2d_start(const PegParams& p, double angle_deg) {
  const double a = deg2rad(angle_deg);
  Pose s;
  s.orientation = Quat(Eigen::AngleAxisd(a, Vec3::UnitY()));
  const double w = p.radius + p.clearance;
  const Vec3 corner_body(p.radius - p.tip_radius, 0, p.tip_radius - p.ref_height);
  const Vec3 corner_world(w - p.tip_radius - 0.5e-3, 0, -p.start_depth);
  s.position = corner_world - s.orientation * corner_body;
  return s;
}

inline TeacherSpec peg2d_teacher(const PegParams& p, double angle_deg, std::uint64_t seed = 1) {
  TeacherSpec t;
  t.id = "peg2d-" + std::to_string(static_cast<int>(std::lround(angle_deg))) + "deg-" + std::to_string(seed);
  t.start = peg2d_start(p, angle_deg);
  t.force_dir = -Vec3::UnitZ();
  t.force = p.force;
  t.force_frame = Frame::Tool;
  t.align_gain = p.align_gain;
  t.align_max = p.align_max;
  t.torque_jitter = p.torque_jitter;
  t.jitter_axes = Vec3(p.out_of_plane, 1.0, p.out_of_plane);
  t.dir_noise_deg = p.noise_deg;
  t.duration = 20.0;
  t.record_frame = Frame::Tool;
  t.seed = seed;
  return t;
}

/// Three demonstrations at `angle_deg`; reproduction starts from 5 to 35 deg.
inline Scenario peg2d_scenario(const PegParams& p = {}) {
  Scenario sc;
  sc.env = peg2d_env(p);
  for (std::uint64_t seed : {4, 5, 6}) sc.teachers.push_back(peg2d_teacher(p, p.angle_deg, seed));
  for (double a : {5.0, 10.0, 15.0, 20.0, 25.0, 30.0, 35.0}) sc.starts.push_back(peg2d_start(p, a));
  sc.max_time = 30.0;
  sc.learner.stiffness_trans = 2000.0;
  sc.learner.stiffness_rot = 5.0;
  return sc;
}

}  // namespace cmprim::sim

namespace cmprim::sim {

// ------------------------------------------------------------------ edge

struct EdgeParams {
  double length = 0.15;       // m, wrist to tip
  double tip_radius = 0.002;  // m
  double step_height = 0.03;  // m
  double mu = 0.5;
  double force = 2.0;         // N, push along the bar
  double torque = 1.0;        // N m, tilting intent about -y
  double tilt_deg = 30.0;     // goal tilt
  double noise_deg = 3.0;
  double torque_jitter = 0.05;  // N m
};

/// A bar whose tip sits in the inside corner between a floor and a step. The
/// teacher tilts the bar so the tip levers against the step face, and the
/// corner dictates how the wrist translates.
inline Environment edge_env(const EdgeParams& p = {}) {
  Environment env;
  env.name = "edge";
  const Vec3 X = Vec3::UnitX(), Z = Vec3::UnitZ();
  env.facets.push_back({Vec3::Zero(), Z, p.mu, {{Vec3::Zero(), -X}}, "floor"});
  env.facets.push_back({Vec3::Zero(), -X, p.mu, {{Vec3::Zero(), Z}, {Vec3(0, 0, p.step_height), -Z}}, "step-face"});
  env.facets.push_back({Vec3(0, 0, p.step_height), Z, p.mu, {{Vec3::Zero(), X}}, "step-top"});
  env.probes.push_back({Vec3(0, 0, -p.length), p.tip_radius});
  env.goal.pose = Pose{Vec3::Zero(), Quat(Eigen::AngleAxisd(-deg2rad(p.tilt_deg), Vec3::UnitY()))};
  env.goal.tol_pos = 1e-3;
  env.goal.free_axes = {true, true, true};
  env.goal.tol_rot = deg2rad(2.0);
  env.goal.rot_axis = Vec3::UnitZ();
  env.bounds = {Vec3(-0.3, -0.2, -0.05), Vec3(0.2, 0.2, 0.4)};
  return env;
}

/// Upright bar with the tip resting in the corner.
inline Pose edge_start(const EdgeParams& p = {}) {
  return Pose{Vec3(-p.tip_radius, 0.0, p.tip_radius + p.length), Quat::Identity()};
}

inline TeacherSpec edge_teacher(const EdgeParams& p = {}, std::uint64_t seed = 1) {
  TeacherSpec t;
  t.id = "edge-" + std::to_string(seed);
  t.start = edge_start(p);
  t.force_dir = -Vec3::UnitZ();
  t.force = p.force;
  t.force_frame = Frame::Tool;
  t.torque_dir = -Vec3::UnitY();
  t.torque = p.torque;
  t.torque_frame = Frame::World;
  t.dir_noise_deg = p.noise_deg;
  t.torque_jitter = p.torque_jitter;
  t.duration = 20.0;
  t.record_frame = Frame::Tool;
  t.seed = seed;
  return t;
}

inline Scenario edge_scenario(const EdgeParams& p = {}) {
  Scenario sc;
  sc.env = edge_env(p);
  sc.teachers = {edge_teacher(p, 31)};
  sc.starts = {edge_start(p)};
  sc.max_time = 20.0;
  return sc;
}

}  // namespace cmprim::sim

namespace cmprim::sim {

// ---------------------------------------------------------------- couple

struct CoupleParams {
  int sides = 8;              // facets approximating the cone
  double slope_deg = 45.0;    // facet inclination from horizontal
  double mu = 0.3;
  double start_radius = 0.03; // m, horizontal distance of the demo starts from the axis
  double force = 3.0;         // N
  double noise_deg = 2.0;
};

/// A coupler tip guided into a conical receptacle (apex at the origin), the
/// cone approximated by inward-facing facets.
inline Environment couple_env(const CoupleParams& p = {}) {
  Environment env;
  env.name = "couple";
  const double a = deg2rad(p.slope_deg);
  for (int k = 0; k < p.sides; ++k) {
    const double phi = 2.0 * kPi * k / p.sides;
    const Vec3 n(-std::sin(a) * std::cos(phi), -std::sin(a) * std::sin(phi), std::cos(a));
    env.facets.push_back({Vec3::Zero(), n, p.mu, {}, "cone-" + std::to_string(k)});
  }
  env.probes.push_back({Vec3::Zero(), 0.0});
  env.goal.pose = Pose{};
  env.goal.tol_pos = 1e-3;
  env.bounds = {Vec3(-0.2, -0.2, -0.05), Vec3(0.2, 0.2, 0.2)};
  return env;
}

/// Point on the cone surface at horizontal radius r and azimuth phi, lifted by `lift`.
inline Pose couple_start(const CoupleParams& p, double r, double phi, double lift = 1e-3) {
  const Vec3 h(r * std::cos(phi), r * std::sin(phi), 0.0);
  const double t = std::tan(deg2rad(p.slope_deg));
  double z = 0.0;
  for (int k = 0; k < p.sides; ++k) {
    const double psi = 2.0 * kPi * k / p.sides;
    z = std::max(z, t * (h.x() * std::cos(psi) + h.y() * std::sin(psi)));
  }
  return Pose{Vec3(h.x(), h.y(), z + lift), Quat::Identity()};
}

inline TeacherSpec couple_teacher(const CoupleParams& p, double phi, std::uint64_t seed = 1) {
  TeacherSpec t;
  t.id = "couple-" + std::to_string(static_cast<int>(std::lround(phi * 180.0 / kPi))) + "deg";
  t.start = couple_start(p, p.start_radius, phi);
  t.force_dir = -Vec3::UnitZ();
  t.force = p.force;
  t.dir_noise_deg = p.noise_deg;
  t.duration = 10.0;
  t.record_frame = Frame::World;
  t.seed = seed;
  return t;
}

inline Scenario couple_scenario(const CoupleParams& p = {}) {
  Scenario sc;
  sc.env = couple_env(p);
  for (int k = 0; k < 4; ++k) sc.teachers.push_back(couple_teacher(p, 0.5 * kPi * k + 0.2, 41 + k));
  for (double phi : {0.7, 2.5, 4.4}) sc.starts.push_back(couple_start(p, 0.025, phi));
  sc.max_time = 20.0;
  return sc;
}

}  // namespace cmprim::sim

namespace cmprim::sim {

inline const std::vector<std::string>& scenario_names() {
  static const std::vector<std::string> names{"valley", "peg2d", "edge", "couple"};
  return names;
}

/// Bundled scenario with default parameters; nullopt for an unknown name.
inline std::optional<Scenario> builtin_scenario(const std::string& name) {
  if (name == "valley") return valley_scenario();
  if (name == "peg2d") return peg2d_scenario();
  if (name == "edge") return edge_scenario();
  if (name == "couple") return couple_scenario();
  return std::nullopt;
}

}  // namespace cmprim::sim
