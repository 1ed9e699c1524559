#pragma once

// SO(3) exponential/logarithm on unit quaternions.

#include "cmprim/core.hpp"

#include <cmath>
#include <numbers>

namespace cmprim {

inline constexpr double kPi = std::numbers::pi;

inline double deg2rad(double d) { return d * kPi / 180.0; }
inline double rad2deg(double r) { return r * 180.0 / kPi; }

/// Rotation vector (axis * angle) with angle in [0, pi].
/// Throws AngleNearPi within 1e-6 of pi, where the axis sign is ill-conditioned.
inline Vec3 rotation_log(const Quat& q_in) {
  Quat q = q_in.normalized();
  if (q.w() < 0.0) q.coeffs() = -q.coeffs();
  const Vec3 v = q.vec();
  const double n = v.norm();
  const double angle = 2.0 * std::atan2(n, q.w());
  if (angle > kPi - 1e-6) throw Error(ErrorCode::AngleNearPi, "rotation angle within 1e-6 of pi");
  if (n < 1e-12) return (2.0 / q.w()) * v;
  return (angle / n) * v;
}

/// Like rotation_log, but returns the angle-pi vector instead of throwing.
inline Vec3 rotation_log_unchecked(const Quat& q_in) {
  Quat q = q_in.normalized();
  if (q.w() < 0.0) q.coeffs() = -q.coeffs();
  const Vec3 v = q.vec();
  const double n = v.norm();
  if (n < 1e-12) return (2.0 / std::max(q.w(), 1e-300)) * v;
  return (2.0 * std::atan2(n, q.w()) / n) * v;
}

inline Quat rotation_exp(const Vec3& w) {
  const double theta = w.norm();
  const double half = 0.5 * theta;
  // sin(theta/2)/theta, with its Taylor expansion near zero
  const double k = theta < 1e-8 ? 0.5 - theta * theta / 48.0 : std::sin(half) / theta;
  Quat q(std::cos(half), k * w.x(), k * w.y(), k * w.z());
  q.normalize();
  return q;
}

/// Distance between two rotations that ignores the q / -q double cover.
inline double quat_distance(const Quat& a, const Quat& b) {
  return std::min((a.coeffs() - b.coeffs()).norm(), (a.coeffs() + b.coeffs()).norm());
}

/// Rotation angle between two orientations, in [0, pi].
inline double angle_between(const Quat& a, const Quat& b) {
  const double d = std::abs(a.normalized().dot(b.normalized()));
  return 2.0 * std::acos(std::min(1.0, d));
}

inline Mat3 skew(const Vec3& w) {
  Mat3 W;
  W << 0.0, -w.z(), w.y(), w.z(), 0.0, -w.x(), -w.y(), w.x(), 0.0;
  return W;
}

inline double angle_between(const Vec3& a, const Vec3& b) {
  return std::atan2(a.cross(b).norm(), a.dot(b));
}

/// Some unit vector orthogonal to `v` (v need not be normalized).
inline Vec3 any_orthogonal(const Vec3& v) {
  const Vec3 a = v.normalized();
  const Vec3 helper = std::abs(a.x()) < 0.9 ? Vec3::UnitX() : Vec3::UnitY();
  return a.cross(helper).normalized();
}

}  // namespace cmprim
