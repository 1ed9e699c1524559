#pragma once

// Contact world: planar facets, edges, a rigid tool described by probe
// spheres and flat faces, a goal region and a workspace box.

#include "cmprim/core.hpp"
#include "cmprim/so3.hpp"

#include <array>
#include <optional>
#include <string>
#include <vector>

namespace cmprim::sim {

/// Points q with n . (q - p) >= 0.
struct HalfSpace {
  Vec3 p = Vec3::Zero();
  Vec3 n = Vec3::UnitZ();

  bool inside(const Vec3& q, double tol = 0.0) const { return n.dot(q - p) >= -tol; }
};

/// Oriented plane; the body lives on the +n side. Contact is only possible
/// where the foot point lies inside every limit half-space.
struct Facet {
  Vec3 p = Vec3::Zero();
  Vec3 n = Vec3::UnitZ();
  double mu = 0.0;
  std::vector<HalfSpace> limits;
  std::string name;
};

/// A convex environment edge: a straight line (or a single point when `dir`
/// is absent) that can touch probe spheres and body faces.
struct Edge {
  Vec3 p = Vec3::Zero();
  std::optional<Vec3> dir;
  double mu = 0.0;
  std::string name;
};

/// Sphere rigidly attached to the body (radius 0 gives a point probe).
struct Probe {
  Vec3 p = Vec3::Zero();  // body frame
  double radius = 0.0;
};

/// Flat body face with outward normal `n`, bounded by `extent` half-spaces,
/// all in the body frame.
struct BodyFace {
  Vec3 p = Vec3::Zero();
  Vec3 n = Vec3::UnitZ();
  std::vector<HalfSpace> extent;
};

struct Goal {
  Pose pose;
  double tol_pos = 1e-3;
  std::optional<double> tol_rot;  // absent: orientation not checked
  std::array<bool, 3> free_axes{false, false, false};  // world axes ignored by the position test
  // When set, only the direction of this body axis is compared (spin about it is free).
  std::optional<Vec3> rot_axis;

  double position_error(const Vec3& x) const {
    Vec3 d = x - pose.position;
    for (int i = 0; i < 3; ++i)
      if (free_axes[i]) d(i) = 0.0;
    return d.norm();
  }
  double orientation_error(const Quat& q) const {
    if (rot_axis) return angle_between(Vec3(q * *rot_axis), Vec3(pose.orientation * *rot_axis));
    return angle_between(q, pose.orientation);
  }
  bool reached(const Pose& p) const {
    return position_error(p.position) <= tol_pos && (!tol_rot || orientation_error(p.orientation) <= *tol_rot);
  }
};

struct Bounds {
  Vec3 lo = Vec3::Constant(-1.0);
  Vec3 hi = Vec3::Constant(1.0);

  bool contains(const Vec3& x) const { return (x.array() >= lo.array()).all() && (x.array() <= hi.array()).all(); }
};

struct Environment {
  std::string name;
  std::vector<Facet> facets;
  std::vector<Edge> edges;
  std::vector<Probe> probes;
  std::vector<BodyFace> faces;
  Goal goal;
  Bounds bounds;
  double damping_force = 100.0;  // N s/m
  double damping_torque = 10.0;  // N m s/rad
  double dt = 0.005;             // s
  double margin = 5e-3;          // m, speculative contact distance

  void validate() const {
    auto fail = [](const std::string& m) { throw Error(ErrorCode::InvalidConfig, m); };
    for (const auto& f : facets) {
      if (std::abs(f.n.norm() - 1.0) > 1e-9) fail("facet normal not unit");
      if (f.mu < 0.0) fail("negative friction");
    }
    for (const auto& e : edges) {
      if (e.dir && std::abs(e.dir->norm() - 1.0) > 1e-9) fail("edge direction not unit");
      if (e.mu < 0.0) fail("negative friction");
    }
    for (const auto& b : faces)
      if (std::abs(b.n.norm() - 1.0) > 1e-9) fail("face normal not unit");
    for (const auto& p : probes)
      if (p.radius < 0.0) fail("negative probe radius");
    if (!(goal.tol_pos > 0.0) || (goal.tol_rot && !(*goal.tol_rot > 0.0))) fail("goal tolerances must be positive");
    if (!(damping_force > 0.0 && damping_torque > 0.0 && dt > 0.0)) fail("damping and dt must be positive");
  }
};

enum class ContactKind { ProbeFacet, ProbeEdge, FaceEdge };

/// A potential contact. `normal` points from the environment into the body
/// (the direction the body may move freely); `point` is in world coordinates.
struct Contact {
  ContactKind kind = ContactKind::ProbeFacet;
  std::size_t env_index = 0;
  std::size_t body_index = 0;
  Vec3 point = Vec3::Zero();
  Vec3 normal = Vec3::UnitZ();
  double gap = 0.0;
  double mu = 0.0;
};

/// Contacts with gap below `margin`. Pairs deeper than `max_depth` are
/// ignored as belonging to a different feature.
inline std::vector<Contact> find_contacts(const Environment& env, const Pose& pose, double margin,
                                          double max_depth = 2e-3) {
  std::vector<Contact> out;
  const Mat3 B = pose.rotation();
  const Vec3& x = pose.position;
  for (std::size_t bi = 0; bi < env.probes.size(); ++bi) {
    const auto& pr = env.probes[bi];
    const Vec3 pw = x + B * pr.p;
    for (std::size_t fi = 0; fi < env.facets.size(); ++fi) {
      const auto& f = env.facets[fi];
      const double d = f.n.dot(pw - f.p);
      const double gap = d - pr.radius;
      if (gap >= margin || gap < -max_depth) continue;
      const Vec3 foot = pw - d * f.n;
      bool ok = true;
      for (const auto& h : f.limits) ok = ok && h.inside(foot);
      if (!ok) continue;
      out.push_back({ContactKind::ProbeFacet, fi, bi, Vec3(pw - pr.radius * f.n), f.n, gap, f.mu});
    }
    if (pr.radius <= 0.0) continue;
    for (std::size_t ei = 0; ei < env.edges.size(); ++ei) {
      const auto& e = env.edges[ei];
      const Vec3 c = e.dir ? Vec3(e.p + *e.dir * e.dir->dot(pw - e.p)) : e.p;
      const Vec3 sep = pw - c;
      const double dist = sep.norm();
      if (dist <= 1e-12) continue;
      const double gap = dist - pr.radius;
      if (gap >= margin || gap < -max_depth) continue;
      out.push_back({ContactKind::ProbeEdge, ei, bi, c, Vec3(sep / dist), gap, e.mu});
    }
  }
  for (std::size_t bi = 0; bi < env.faces.size(); ++bi) {
    const auto& fc = env.faces[bi];
    const Vec3 nw = B * fc.n;
    const Vec3 aw = x + B * fc.p;
    for (std::size_t ei = 0; ei < env.edges.size(); ++ei) {
      const auto& e = env.edges[ei];
      // Edge point nearest to the body reference; for an edge parallel to the
      // face any point along it gives the same gap.
      const Vec3 c = e.dir ? Vec3(e.p + *e.dir * e.dir->dot(x - e.p)) : e.p;
      const double gap = nw.dot(c - aw);
      if (gap >= margin || gap < -max_depth) continue;
      const Vec3 local = B.transpose() * (c - x);
      const Vec3 on_face = local - fc.n * fc.n.dot(local - fc.p);
      bool ok = true;
      for (const auto& h : fc.extent) ok = ok && h.inside(on_face);
      if (!ok) continue;
      out.push_back({ContactKind::FaceEdge, ei, bi, c, Vec3(-nw), gap, e.mu});
    }
  }
  return out;
}

inline double min_gap(const Environment& env, const Pose& pose) {
  double g = INFINITY;
  for (const auto& c : find_contacts(env, pose, 1e-3)) g = std::min(g, c.gap);
  return g;
}

}  // namespace cmprim::sim
