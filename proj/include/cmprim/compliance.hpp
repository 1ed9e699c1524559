#pragma once

// Compliant-axis selection: per-demonstration mean motions that are not
// explained by the desired direction are fitted by a low-rank subspace whose
// rank is chosen with an information criterion.

#include "cmprim/core.hpp"
#include "cmprim/so3.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <optional>
#include <vector>

namespace cmprim {

inline std::vector<Vec3> remove_desired_component(const std::vector<Vec3>& means, const Vec3& dir) {
  std::vector<Vec3> out;
  out.reserve(means.size());
  for (const auto& m : means) {
    Vec3 r = m - m.dot(dir) * dir;
    r -= r.dot(dir) * dir;  // second pass trims rounding
    out.push_back(r);
  }
  return out;
}

struct PcaResult {
  Vec3 eigenvalues = Vec3::Zero();     // descending
  Mat3 eigenvectors = Mat3::Identity();  // columns, matching eigenvalues
};

namespace detail {

inline Vec3 canonical_sign(Vec3 v) {
  Eigen::Index i = 0;
  v.cwiseAbs().maxCoeff(&i);
  return v(i) < 0.0 ? Vec3(-v) : v;
}

}  // namespace detail

/// Eigen-decomposition of the uncentered second moment sum(v v^T) / J.
/// Each eigenvector's largest-magnitude component is made positive.
inline PcaResult pca_ranks(const std::vector<Vec3>& vectors) {
  if (vectors.empty()) throw Error(ErrorCode::NoInput, "pca_ranks needs at least one vector");
  Mat3 S = Mat3::Zero();
  for (const auto& v : vectors) S += v * v.transpose();
  S /= static_cast<double>(vectors.size());
  Eigen::SelfAdjointEigenSolver<Mat3> es(S);
  PcaResult r;
  for (int i = 0; i < 3; ++i) {
    r.eigenvalues(i) = std::max(0.0, es.eigenvalues()(2 - i));
    r.eigenvectors.col(i) = detail::canonical_sign(es.eigenvectors().col(2 - i).normalized());
  }
  return r;
}

/// PCA restricted to the plane orthogonal to `dir`; `dir` becomes the last
/// eigenvector so every leading axis is exactly orthogonal to it.
inline PcaResult pca_ranks_orthogonal(const std::vector<Vec3>& vectors, const Vec3& dir) {
  if (vectors.empty()) throw Error(ErrorCode::NoInput, "pca_ranks needs at least one vector");
  const Vec3 a = any_orthogonal(dir);
  const Vec3 b = dir.cross(a).normalized();
  Eigen::Matrix2d S = Eigen::Matrix2d::Zero();
  for (const auto& v : vectors) {
    const Vec2 p(v.dot(a), v.dot(b));
    S += p * p.transpose();
  }
  S /= static_cast<double>(vectors.size());
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(S);
  PcaResult r;
  for (int i = 0; i < 2; ++i) {
    const Eigen::Vector2d e = es.eigenvectors().col(1 - i);
    Vec3 u = (e.x() * a + e.y() * b).normalized();
    u -= u.dot(dir) * dir;
    r.eigenvalues(i) = std::max(0.0, es.eigenvalues()(1 - i));
    r.eigenvectors.col(i) = detail::canonical_sign(u.normalized());
  }
  r.eigenvalues(2) = 0.0;
  r.eigenvectors.col(2) = dir;
  return r;
}

/// Residuals after projecting out the first `d` principal axes.
inline std::vector<Vec3> residuals(const std::vector<Vec3>& vectors, const PcaResult& pca, int d) {
  if (d < 0 || d > 3) throw Error(ErrorCode::InvalidConfig, "rank must lie in 0..3");
  Mat3 P = Mat3::Zero();
  for (int i = 0; i < d; ++i) P += pca.eigenvectors.col(i) * pca.eigenvectors.col(i).transpose();
  std::vector<Vec3> out;
  out.reserve(vectors.size());
  for (const auto& v : vectors) out.push_back(d == 3 ? Vec3::Zero() : Vec3(v - P * v));
  return out;
}

inline std::vector<Vec3> residuals(const std::vector<Vec3>& vectors, int d) {
  return residuals(vectors, pca_ranks(vectors), d);
}

/// Log density of an isotropic 3-D Gaussian N(0, sigma^2 I).
inline double log_gauss3(const Vec3& e, double sigma) {
  const double s2 = sigma * sigma;
  return -1.5 * std::log(2.0 * kPi * s2) - e.squaredNorm() / (2.0 * s2);
}

struct ComplianceResult {
  int n_axes = 0;
  std::vector<Vec3> axes;
  std::array<double, 4> bic{};  // +inf for excluded ranks; NaN when bypassed (J = 1)
  std::vector<Vec3> residuals;
  std::vector<Vec3> inputs;  // means after removing the desired component
  PcaResult pca;
  bool single_demo = false;
};

inline ComplianceResult select_num_axes(const std::vector<Vec3>& means, const std::optional<Vec3>& dir,
                                        const LearnerConfig& cfg) {
  if (means.empty()) throw Error(ErrorCode::NoInput, "no demonstration means");
  if (!(cfg.sigma_demo > 0.0)) throw Error(ErrorCode::InvalidConfig, "sigma_demo must be positive");
  ComplianceResult r;
  r.inputs = dir ? remove_desired_component(means, *dir) : means;
  r.pca = dir ? pca_ranks_orthogonal(r.inputs, *dir) : pca_ranks(r.inputs);
  const int d_max = dir ? 2 : 3;
  const std::size_t J = means.size();

  if (J == 1) {
    r.single_demo = true;
    r.bic.fill(std::numeric_limits<double>::quiet_NaN());
    r.n_axes = d_max;
    for (int d = 0; d <= d_max; ++d) {
      const auto eps = residuals(r.inputs, r.pca, d);
      if (eps.front().norm() < 2.0 * cfg.sigma_demo) {
        r.n_axes = d;
        break;
      }
    }
  } else {
    const double lnJ = std::log(static_cast<double>(J));
    double best = std::numeric_limits<double>::infinity();
    for (int d = 0; d <= 3; ++d) {
      if (d > d_max) {
        r.bic[d] = std::numeric_limits<double>::infinity();
        continue;
      }
      double logL = 0.0;
      for (const auto& e : residuals(r.inputs, r.pca, d)) logL += log_gauss3(e, cfg.sigma_demo);
      r.bic[d] = lnJ * d - 2.0 * logL;
      if (r.bic[d] < best) {
        best = r.bic[d];
        r.n_axes = d;
      }
    }
  }
  for (int i = 0; i < r.n_axes; ++i) r.axes.push_back(r.pca.eigenvectors.col(i));
  r.residuals = residuals(r.inputs, r.pca, r.n_axes);
  return r;
}

/// k (I - sum u u^T): stiff everywhere except along the compliant axes.
inline Mat3 stiffness_matrix(const std::vector<Vec3>& axes, double k) {
  if (axes.size() > 3) throw Error(ErrorCode::NonOrthonormalAxes, "more than three axes");
  for (std::size_t i = 0; i < axes.size(); ++i) {
    if (std::abs(axes[i].norm() - 1.0) > 1e-9) throw Error(ErrorCode::NonOrthonormalAxes, "axis is not unit");
    for (std::size_t j = i + 1; j < axes.size(); ++j)
      if (std::abs(axes[i].dot(axes[j])) > 1e-9) throw Error(ErrorCode::NonOrthonormalAxes, "axes not orthogonal");
  }
  Mat3 P = Mat3::Zero();
  for (const auto& u : axes) P += u * u.transpose();
  Mat3 K = k * (Mat3::Identity() - P);
  K = 0.5 * (K + K.transpose());
  if (axes.size() == 3) K.setZero();
  return K;
}

}  // namespace cmprim
