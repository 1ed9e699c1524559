#pragma once

// Domain types shared by every learning and simulation stage.

#include <Eigen/Dense>

#include <cmath>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace cmprim {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Quat = Eigen::Quaterniond;

enum class ErrorCode {
  EmptyDemo,
  NonMonotoneTime,
  NonFiniteValue,
  AngleNearPi,
  OutOfDomain,
  TooShort,
  InvalidWindow,
  NoMotion,
  ZeroVector,
  NoUsableSteps,
  NoRotation,
  NoInput,
  NonOrthonormalAxes,
  InvalidPrimitive,
  InvalidConfig,
  Diverged,
  TeacherStuck,
  UnknownScenario,
  Parse,
};

inline const char* to_string(ErrorCode c) {
  switch (c) {
    case ErrorCode::EmptyDemo: return "EmptyDemo";
    case ErrorCode::NonMonotoneTime: return "NonMonotoneTime";
    case ErrorCode::NonFiniteValue: return "NonFiniteValue";
    case ErrorCode::AngleNearPi: return "AngleNearPi";
    case ErrorCode::OutOfDomain: return "OutOfDomain";
    case ErrorCode::TooShort: return "TooShort";
    case ErrorCode::InvalidWindow: return "InvalidWindow";
    case ErrorCode::NoMotion: return "NoMotion";
    case ErrorCode::ZeroVector: return "ZeroVector";
    case ErrorCode::NoUsableSteps: return "NoUsableSteps";
    case ErrorCode::NoRotation: return "NoRotation";
    case ErrorCode::NoInput: return "NoInput";
    case ErrorCode::NonOrthonormalAxes: return "NonOrthonormalAxes";
    case ErrorCode::InvalidPrimitive: return "InvalidPrimitive";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::Diverged: return "Diverged";
    case ErrorCode::TeacherStuck: return "TeacherStuck";
    case ErrorCode::UnknownScenario: return "UnknownScenario";
    case ErrorCode::Parse: return "Parse";
  }
  return "Unknown";
}

/// Exception carrying a machine-readable code. `index` names the offending
/// sample or step when one exists.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, std::string what, std::optional<std::size_t> index = std::nullopt)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code), index_(index) {}

  ErrorCode code() const noexcept { return code_; }
  std::optional<std::size_t> index() const noexcept { return index_; }

 private:
  ErrorCode code_;
  std::optional<std::size_t> index_;
};

enum class Channel { Translation, Rotation };

inline const char* to_string(Channel c) { return c == Channel::Translation ? "translation" : "rotation"; }

/// Frame in which a recording's wrench (and the learned primitive) is expressed.
enum class Frame { Tool, World };

inline const char* to_string(Frame f) { return f == Frame::Tool ? "tool" : "world"; }

inline Frame frame_from_string(const std::string& s) {
  if (s == "tool") return Frame::Tool;
  if (s == "world") return Frame::World;
  throw Error(ErrorCode::Parse, "unknown frame '" + s + "'");
}

inline bool all_finite(const Vec3& v) { return v.allFinite(); }

struct Pose {
  Vec3 position = Vec3::Zero();
  Quat orientation = Quat::Identity();

  Mat3 rotation() const { return orientation.toRotationMatrix(); }

  bool valid() const {
    return position.allFinite() && orientation.coeffs().allFinite() &&
           std::abs(orientation.norm() - 1.0) <= 1e-9;
  }
};

struct WrenchSample {
  double t = 0.0;
  Pose pose;
  Vec3 force = Vec3::Zero();
  Vec3 torque = Vec3::Zero();

  bool finite() const {
    return std::isfinite(t) && pose.position.allFinite() && pose.orientation.coeffs().allFinite() &&
           force.allFinite() && torque.allFinite();
  }
};

struct Demonstration {
  std::string id;
  std::vector<WrenchSample> samples;
  Frame frame = Frame::Tool;
};

/// Throws Error{EmptyDemo | NonMonotoneTime | NonFiniteValue} naming the first
/// offending sample.
inline void validate_demonstration(const Demonstration& demo) {
  if (demo.samples.size() < 2)
    throw Error(ErrorCode::EmptyDemo, "demonstration '" + demo.id + "' needs at least 2 samples",
                demo.samples.size());
  for (std::size_t i = 0; i < demo.samples.size(); ++i) {
    const auto& s = demo.samples[i];
    if (!s.finite())
      throw Error(ErrorCode::NonFiniteValue, "sample " + std::to_string(i) + " has a non-finite value", i);
    if (std::abs(s.pose.orientation.norm() - 1.0) > 1e-9)
      throw Error(ErrorCode::NonFiniteValue, "sample " + std::to_string(i) + " has a non-unit quaternion", i);
    if (i > 0 && !(s.t > demo.samples[i - 1].t))
      throw Error(ErrorCode::NonMonotoneTime, "timestamp of sample " + std::to_string(i) + " does not increase", i);
  }
}

/// One windowed increment of a demonstration. Unit directions are present only
/// when the underlying magnitude clears its floor.
struct MotionStep {
  Vec3 dx = Vec3::Zero();
  Vec3 dbeta = Vec3::Zero();
  std::optional<Vec3> v_hat;
  std::optional<Vec3> w_hat;
  std::optional<Vec3> f_hat;
  std::optional<Vec3> t_hat;
  Vec3 f_raw = Vec3::Zero();
  Vec3 t_raw = Vec3::Zero();

  const Vec3& increment(Channel c) const { return c == Channel::Translation ? dx : dbeta; }
  const Vec3& wrench(Channel c) const { return c == Channel::Translation ? f_raw : t_raw; }
  const std::optional<Vec3>& motion_dir(Channel c) const { return c == Channel::Translation ? v_hat : w_hat; }
  const std::optional<Vec3>& wrench_dir(Channel c) const { return c == Channel::Translation ? f_hat : t_hat; }
};

struct LearnerConfig {
  double eta_deg = 20.0;
  double xi_deg = 10.0;
  int window = 20;
  double sigma_work = 0.7;
  double zeta = 0.6;
  double grid_res = 0.01;
  double motion_floor_trans = 1e-4;
  double motion_floor_rot = 1e-3;
  double wrench_floor_force = 0.5;
  double wrench_floor_torque = 0.05;
  double sigma_demo = 0.1;
  double stiffness_trans = 500.0;
  double stiffness_rot = 50.0;
  double speed_nu = 0.02;
  // Rotation speed used when only a rotational direction exists (no pitch).
  double speed_lambda = 0.2;

  double motion_floor(Channel c) const { return c == Channel::Translation ? motion_floor_trans : motion_floor_rot; }
  double wrench_floor(Channel c) const { return c == Channel::Translation ? wrench_floor_force : wrench_floor_torque; }
  double stiffness(Channel c) const { return c == Channel::Translation ? stiffness_trans : stiffness_rot; }

  void validate() const {
    auto fail = [](const std::string& m) { throw Error(ErrorCode::InvalidConfig, m); };
    if (!(eta_deg > 0.0 && eta_deg < 90.0)) fail("eta_deg must lie in (0, 90)");
    if (!(xi_deg > 0.0 && xi_deg < 90.0)) fail("xi_deg must lie in (0, 90)");
    if (window < 1) fail("window must be >= 1");
    if (!(sigma_work > 0.0 && sigma_work <= 1.0)) fail("sigma_work must lie in (0, 1]");
    if (!(zeta > 0.0 && zeta <= 1.0)) fail("zeta must lie in (0, 1]");
    if (!(grid_res > 0.0)) fail("grid_res must be positive");
    if (!(motion_floor_trans > 0.0 && motion_floor_rot > 0.0)) fail("motion floors must be positive");
    if (!(wrench_floor_force > 0.0 && wrench_floor_torque > 0.0)) fail("wrench floors must be positive");
    if (!(sigma_demo > 0.0)) fail("sigma_demo must be positive");
    if (!(stiffness_trans > 0.0 && stiffness_rot > 0.0)) fail("stiffness must be positive");
    if (!(speed_nu >= 0.0 && speed_lambda >= 0.0)) fail("speeds must be non-negative");
  }
};

/// A learned linear compliant primitive. Construct through `make()` so the
/// stiffness-spectrum and orthogonality invariants are checked.
struct CompliantPrimitive {
  std::optional<Vec3> v_d;
  std::optional<Vec3> w_d;
  Mat3 K_f = Mat3::Zero();
  Mat3 K_o = Mat3::Zero();
  std::optional<double> pitch;
  double nu = 0.0;
  double lambda = 0.0;
  bool trans_3dof_compliant = false;
  bool rot_3dof_compliant = false;
  Frame frame = Frame::Tool;

  const std::optional<Vec3>& direction(Channel c) const { return c == Channel::Translation ? v_d : w_d; }
  const Mat3& stiffness(Channel c) const { return c == Channel::Translation ? K_f : K_o; }

  /// Checks every invariant; throws InvalidPrimitive on violation.
  void check(double k_trans, double k_rot) const;

  static CompliantPrimitive make(CompliantPrimitive p, double k_trans, double k_rot) {
    p.check(k_trans, k_rot);
    return p;
  }
};

namespace detail {

inline void check_stiffness(const Mat3& K, double k, const std::optional<Vec3>& dir, const char* name) {
  auto fail = [&](const std::string& m) { throw Error(ErrorCode::InvalidPrimitive, std::string(name) + ": " + m); };
  if (!K.allFinite()) fail("non-finite entries");
  if ((K - K.transpose()).cwiseAbs().maxCoeff() > 1e-9 * std::max(1.0, k)) fail("not symmetric");
  Eigen::SelfAdjointEigenSolver<Mat3> es(K);
  for (int i = 0; i < 3; ++i) {
    const double ev = es.eigenvalues()(i);
    const bool zero = std::abs(ev) <= 1e-6 * k;
    const bool stiff = std::abs(ev - k) <= 1e-6 * k;
    if (!zero && !stiff) fail("eigenvalue " + std::to_string(ev) + " not in {0, k}");
    if (zero && dir && std::abs(es.eigenvectors().col(i).dot(*dir)) > 1e-6)
      fail("compliant axis not orthogonal to the desired direction");
  }
}

inline void check_unit(const std::optional<Vec3>& v, const char* name) {
  if (v && std::abs(v->norm() - 1.0) > 1e-9)
    throw Error(ErrorCode::InvalidPrimitive, std::string(name) + " is not a unit vector");
}

}  // namespace detail

inline void CompliantPrimitive::check(double k_trans, double k_rot) const {
  detail::check_unit(v_d, "v_d");
  detail::check_unit(w_d, "w_d");
  detail::check_stiffness(K_f, k_trans, v_d, "K_f");
  detail::check_stiffness(K_o, k_rot, w_d, "K_o");
  if (pitch.has_value() != (v_d.has_value() && w_d.has_value()))
    throw Error(ErrorCode::InvalidPrimitive, "pitch must be present iff both directions exist");
  if (pitch) {
    const double ref = std::max(std::abs(nu), 1e-300);
    if (std::abs(nu - *pitch * lambda) > 1e-9 * ref)
      throw Error(ErrorCode::InvalidPrimitive, "nu must equal pitch * lambda");
  }
  if (trans_3dof_compliant && (v_d || K_f.cwiseAbs().maxCoeff() > 0.0))
    throw Error(ErrorCode::InvalidPrimitive, "3-DOF compliant translation must have K_f = 0 and no v_d");
  if (rot_3dof_compliant && (w_d || K_o.cwiseAbs().maxCoeff() > 0.0))
    throw Error(ErrorCode::InvalidPrimitive, "3-DOF compliant rotation must have K_o = 0 and no w_d");
}

}  // namespace cmprim
