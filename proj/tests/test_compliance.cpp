#include "cmprim/compliance.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace cmprim;

namespace {

/// Independent BIC evaluation: explicit projector and Gaussian log-density.
int oracle_num_axes(const std::vector<Vec3>& means, const std::vector<Vec3>& basis, double sigma, int d_max) {
  const double J = static_cast<double>(means.size());
  double best = INFINITY;
  int arg = 0;
  for (int d = 0; d <= d_max; ++d) {
    double neg2logL = 0.0;
    for (const auto& m : means) {
      Vec3 e = m;
      for (int i = 0; i < d; ++i) e -= basis[i] * basis[i].dot(m);
      neg2logL += 3.0 * std::log(2.0 * M_PI * sigma * sigma) + e.squaredNorm() / (sigma * sigma);
    }
    const double bic = std::log(J) * d + neg2logL;
    if (bic < best) {
      best = bic;
      arg = d;
    }
  }
  return arg;
}

std::vector<Vec3> basis_of(const PcaResult& p) {
  return {p.eigenvectors.col(0), p.eigenvectors.col(1), p.eigenvectors.col(2)};
}

}  // namespace

TEST(RemoveDesired, Examples) {
  EXPECT_LT(remove_desired_component({Vec3(1, 0, 0)}, Vec3::UnitX())[0].norm(), 1e-15);
  EXPECT_LT((remove_desired_component({Vec3(1, 1, 0)}, Vec3::UnitX())[0] - Vec3::UnitY()).norm(), 1e-15);
}

TEST(RemoveDesired, OrthogonalityProperty) {
  std::mt19937 rng(1);
  std::normal_distribution<double> n(0.0, 1.0);
  for (int i = 0; i < 1000; ++i) {
    const Vec3 dir = Vec3(n(rng), n(rng), n(rng)).normalized();
    const auto out = remove_desired_component({Vec3(n(rng), n(rng), n(rng))}, dir);
    EXPECT_LT(std::abs(out[0].dot(dir)), 1e-12);
  }
}

TEST(Pca, Examples) {
  EXPECT_LT(pca_ranks({Vec3::Zero(), Vec3::Zero()}).eigenvalues.norm(), 1e-15);
  const auto p = pca_ranks({Vec3(1, 0, 0), Vec3(-1, 0, 0)});
  EXPECT_NEAR(p.eigenvalues(0), 1.0, 1e-15);
  EXPECT_NEAR(p.eigenvalues(1), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(p.eigenvectors.col(0).x()), 1.0, 1e-15);
}

TEST(Pca, PlanarCloud) {
  std::mt19937 rng(2);
  std::normal_distribution<double> n(0.0, 1.0);
  const Vec3 a = Vec3(1, 2, 0).normalized(), b = Vec3(0, 0, 1);
  std::vector<Vec3> v;
  for (int i = 0; i < 50; ++i) v.push_back(n(rng) * a + n(rng) * b);
  const auto p = pca_ranks(v);
  EXPECT_LT(p.eigenvalues(2), 1e-12);
  for (const auto& e : residuals(v, 2)) EXPECT_LT(e.norm(), 1e-9);
}

TEST(Residuals, Extremes) {
  const std::vector<Vec3> v = {Vec3(1, 2, 3), Vec3(-1, 0, 1)};
  const auto r0 = residuals(v, 0);
  EXPECT_LT((r0[0] - v[0]).norm(), 1e-15);
  for (const auto& e : residuals(v, 3)) EXPECT_EQ(e.norm(), 0.0);
}

TEST(SelectAxes, NearOriginGivesZero) {
  LearnerConfig cfg;
  const std::vector<Vec3> m = {Vec3(0.005, 0, 0), Vec3(0, -0.008, 0.001), Vec3(0.002, 0.002, -0.006)};
  const auto r = select_num_axes(m, std::nullopt, cfg);
  EXPECT_EQ(r.n_axes, 0);
  EXPECT_EQ(r.n_axes, oracle_num_axes(m, basis_of(r.pca), cfg.sigma_demo, 3));
  // Hand value: BIC_0 = sum_j (3 ln(2 pi 0.01) + |m_j|^2 / 0.01).
  double hand = 0.0;
  for (const auto& v : m) hand += 3.0 * std::log(2.0 * M_PI * 0.01) + v.squaredNorm() / 0.01;
  EXPECT_NEAR(r.bic[0], hand, 1e-9);
}

TEST(SelectAxes, TwoDemosOnALine) {
  LearnerConfig cfg;
  const std::vector<Vec3> m = {Vec3(0.01, 0.8, -0.005), Vec3(-0.004, -0.8, 0.01)};
  const auto r = select_num_axes(m, Vec3::UnitZ(), cfg);
  ASSERT_EQ(r.n_axes, 1);
  EXPECT_LT(rad2deg(std::acos(std::abs(r.axes[0].dot(Vec3::UnitY())))), 2.0);
  EXPECT_EQ(r.n_axes, oracle_num_axes(r.inputs, basis_of(r.pca), cfg.sigma_demo, 2));
}

TEST(SelectAxes, PlaneWithDirection) {
  LearnerConfig cfg;
  const std::vector<Vec3> m = {Vec3(0.3, 0.8, 0.0), Vec3(0.2, 0.0, 0.8), Vec3(0.5, -0.56, -0.56)};
  const auto r = select_num_axes(m, Vec3::UnitX(), cfg);
  EXPECT_EQ(r.n_axes, 2);
  for (const auto& a : r.axes) EXPECT_LT(std::abs(a.dot(Vec3::UnitX())), 1e-9);
}

TEST(SelectAxes, SingleDemoFallback) {
  LearnerConfig cfg;
  EXPECT_EQ(select_num_axes({Vec3(0.05, 0.0, 0.0)}, std::nullopt, cfg).n_axes, 0);
  const auto r = select_num_axes({Vec3(0.0, 0.7, 0.0)}, Vec3::UnitX(), cfg);
  EXPECT_EQ(r.n_axes, 1);
  EXPECT_TRUE(r.single_demo);
}

TEST(SelectAxes, NoInput) {
  try {
    select_num_axes({}, std::nullopt, LearnerConfig{});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NoInput);
  }
}

TEST(SelectAxes, EqualLikelihoodPrefersSmaller) {
  // Means exactly on one axis: d = 1, 2, 3 all explain them perfectly.
  LearnerConfig cfg;
  const auto r = select_num_axes({Vec3(0.5, 0, 0), Vec3(-0.5, 0, 0), Vec3(0.4, 0, 0)}, std::nullopt, cfg);
  EXPECT_EQ(r.n_axes, 1);
  EXPECT_NEAR(r.bic[1], r.bic[2] - std::log(3.0), 1e-9);
}

TEST(SelectAxes, PropertiesOverRandomInputs) {
  std::mt19937 rng(6);
  std::normal_distribution<double> n(0.0, 1.0);
  std::uniform_int_distribution<int> jd(1, 6);
  std::uniform_real_distribution<double> sc(0.01, 0.6);
  for (int trial = 0; trial < 500; ++trial) {
    const int J = jd(rng);
    std::vector<Vec3> m;
    for (int j = 0; j < J; ++j) m.push_back(sc(rng) * Vec3(n(rng), n(rng), n(rng)));
    std::optional<Vec3> dir;
    if (trial % 2) dir = Vec3(n(rng), n(rng), n(rng)).normalized();
    LearnerConfig cfg;
    const auto r = select_num_axes(m, dir, cfg);
    EXPECT_LE(r.n_axes, J);
    if (dir) {
      EXPECT_LE(r.n_axes, 2);
      for (const auto& a : r.axes) EXPECT_LT(std::abs(a.dot(*dir)), 1e-9);
    }
    for (std::size_t i = 0; i < r.axes.size(); ++i) {
      EXPECT_NEAR(r.axes[i].norm(), 1.0, 1e-9);
      for (std::size_t k = i + 1; k < r.axes.size(); ++k) EXPECT_LT(std::abs(r.axes[i].dot(r.axes[k])), 1e-9);
    }
    // Scaling the means and sigma together keeps the decision.
    for (double c : {0.1, 7.0}) {
      std::vector<Vec3> ms;
      for (const auto& v : m) ms.push_back(c * v);
      LearnerConfig cc = cfg;
      cc.sigma_demo *= c;
      const auto rs = select_num_axes(ms, dir, cc);
      EXPECT_EQ(rs.n_axes, r.n_axes);
    }
  }
}

TEST(Stiffness, Examples) {
  EXPECT_LT((stiffness_matrix({}, 500.0) - 500.0 * Mat3::Identity()).norm(), 1e-12);
  EXPECT_LT(stiffness_matrix({Vec3::UnitX(), Vec3::UnitY(), Vec3::UnitZ()}, 500.0).norm(), 1e-12);
  const Mat3 K = stiffness_matrix({Vec3::UnitY()}, 500.0);
  EXPECT_LT((K - Mat3(Vec3(500, 0, 500).asDiagonal())).norm(), 1e-12);
  EXPECT_THROW(stiffness_matrix({Vec3::UnitY(), Vec3(1, 1, 0).normalized()}, 500.0), Error);
  EXPECT_THROW(stiffness_matrix({Vec3(0, 2, 0)}, 500.0), Error);
}

TEST(Stiffness, SpectrumProperty) {
  std::mt19937 rng(10);
  std::normal_distribution<double> n(0.0, 1.0);
  for (int trial = 0; trial < 300; ++trial) {
    const Mat3 Q = Eigen::Quaterniond(n(rng), n(rng), n(rng), n(rng)).normalized().toRotationMatrix();
    const int count = trial % 4;
    std::vector<Vec3> axes;
    for (int i = 0; i < count; ++i) axes.push_back(Q.col(i));
    const double k = 50.0;
    const Mat3 K = stiffness_matrix(axes, k);
    Eigen::SelfAdjointEigenSolver<Mat3> es(K);
    int zeros = 0;
    for (int i = 0; i < 3; ++i) {
      const double ev = es.eigenvalues()(i);
      EXPECT_TRUE(std::abs(ev) <= 1e-9 * k || std::abs(ev - k) <= 1e-9 * k);
      zeros += std::abs(ev) <= 1e-9 * k;
    }
    EXPECT_EQ(zeros, count);
  }
}
