#include "cmprim/core.hpp"
#include "cmprim/so3.hpp"

#include <gtest/gtest.h>

#include <limits>
#include <random>

using namespace cmprim;

namespace {

Demonstration two_samples(double t0, double t1) {
  Demonstration d;
  d.id = "d";
  WrenchSample a, b;
  a.t = t0;
  b.t = t1;
  d.samples = {a, b};
  return d;
}

}  // namespace

TEST(ValidateDemonstration, MinimalValid) { EXPECT_NO_THROW(validate_demonstration(two_samples(0.0, 0.01))); }

TEST(ValidateDemonstration, RepeatedTimestamp) {
  try {
    validate_demonstration(two_samples(0.0, 0.0));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NonMonotoneTime);
    ASSERT_TRUE(e.index());
    EXPECT_EQ(*e.index(), 1u);
  }
}

TEST(ValidateDemonstration, NonFiniteForce) {
  auto d = two_samples(0.0, 0.01);
  d.samples[1].force.y() = std::numeric_limits<double>::quiet_NaN();
  try {
    validate_demonstration(d);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NonFiniteValue);
    EXPECT_EQ(*e.index(), 1u);
  }
}

TEST(ValidateDemonstration, TooFewSamples) {
  Demonstration d;
  d.samples.resize(1);
  try {
    validate_demonstration(d);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::EmptyDemo);
  }
}

TEST(So3, LogExpRoundTrip) {
  std::mt19937 rng(7);
  std::normal_distribution<double> n(0.0, 1.0);
  std::uniform_real_distribution<double> u(0.0, kPi - 1e-3);
  for (int i = 0; i < 2000; ++i) {
    Vec3 axis(n(rng), n(rng), n(rng));
    axis.normalize();
    const Vec3 w = axis * u(rng);
    const Vec3 back = rotation_log(rotation_exp(w));
    EXPECT_LT((back - w).norm(), 1e-9);
  }
}

TEST(So3, SmallAngles) {
  const Vec3 w(1e-10, -2e-10, 3e-10);
  EXPECT_LT((rotation_log(rotation_exp(w)) - w).norm(), 1e-20);
  EXPECT_NEAR(rotation_exp(Vec3(0, 0, kPi / 2)).toRotationMatrix()(1, 0), 1.0, 1e-12);
}

TEST(So3, NearPiThrows) {
  const Quat q(Eigen::AngleAxisd(kPi, Vec3::UnitX()));
  try {
    rotation_log(q);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::AngleNearPi);
  }
}

TEST(So3, DoubleCoverIgnored) {
  const Quat q(Eigen::AngleAxisd(0.3, Vec3::UnitY()));
  Quat neg = q;
  neg.coeffs() = -q.coeffs();
  EXPECT_LT((rotation_log(q) - rotation_log(neg)).norm(), 1e-15);
  EXPECT_NEAR(quat_distance(q, neg), 0.0, 1e-15);
}

TEST(Primitive, CheckRejectsBadSpectrum) {
  CompliantPrimitive p;
  p.K_f = 250.0 * Mat3::Identity();
  p.K_o = 50.0 * Mat3::Identity();
  EXPECT_THROW(p.check(500.0, 50.0), Error);
  p.K_f = Vec3(500.0, 0.0, 500.0).asDiagonal();
  EXPECT_NO_THROW(p.check(500.0, 50.0));
  p.v_d = Vec3::UnitY();  // compliant axis y is not orthogonal to v_d
  EXPECT_THROW(p.check(500.0, 50.0), Error);
}

TEST(Primitive, PitchRequiresBothDirections) {
  CompliantPrimitive p;
  p.K_f = 500.0 * Mat3::Identity();
  p.K_o = 50.0 * Mat3::Identity();
  p.v_d = Vec3::UnitZ();
  p.pitch = 0.1;
  EXPECT_THROW(p.check(500.0, 50.0), Error);
  p.w_d = Vec3::UnitZ();
  p.lambda = 0.2;
  p.nu = 0.02;
  EXPECT_NO_THROW(p.check(500.0, 50.0));
  p.nu = 0.03;
  EXPECT_THROW(p.check(500.0, 50.0), Error);
}

TEST(Primitive, ThreeDofMeansZeroStiffness) {
  CompliantPrimitive p;
  p.K_o = 50.0 * Mat3::Identity();
  p.trans_3dof_compliant = true;
  EXPECT_NO_THROW(p.check(500.0, 50.0));
  p.v_d = Vec3::UnitX();
  EXPECT_THROW(p.check(500.0, 50.0), Error);
}

TEST(Config, Validation) {
  LearnerConfig c;
  EXPECT_NO_THROW(c.validate());
  c.zeta = 0.0;
  EXPECT_THROW(c.validate(), Error);
  c = LearnerConfig{};
  c.eta_deg = 90.0;
  EXPECT_THROW(c.validate(), Error);
}
