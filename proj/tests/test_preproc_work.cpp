#include "cmprim/preproc.hpp"
#include "cmprim/work.hpp"
#include "test_util.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace cmprim;
using testutil::sampled;
using testutil::step_from;

namespace {

std::pair<Vec3, Vec3> no_wrench(double) { return {Vec3::Zero(), Vec3::Zero()}; }

}  // namespace

TEST(Aggregate, PureTranslationTwoWindows) {
  const auto d = sampled(40, 100.0, [](double t) { return Pose{Vec3(0.05 * t, 0, 0), Quat::Identity()}; }, no_wrench);
  const auto steps = aggregate(d, LearnerConfig{});
  ASSERT_EQ(steps.size(), 2u);
  for (const auto& s : steps) {
    ASSERT_TRUE(s.v_hat);
    EXPECT_LT((*s.v_hat - Vec3::UnitX()).norm(), 1e-12);
    EXPECT_FALSE(s.w_hat);
    EXPECT_FALSE(s.f_hat);
  }
}

TEST(Aggregate, StationaryWithForce) {
  const auto d = sampled(60, 100.0, [](double) { return Pose{}; },
                         [](double) { return std::pair{Vec3(0, 0, 3.0), Vec3::Zero()}; });
  for (const auto& s : aggregate(d, LearnerConfig{})) {
    EXPECT_FALSE(s.v_hat);
    EXPECT_FALSE(s.w_hat);
    ASSERT_TRUE(s.f_hat);
    EXPECT_LT((*s.f_hat - Vec3::UnitZ()).norm(), 1e-12);
    EXPECT_FALSE(s.t_hat);
  }
}

TEST(Aggregate, HelixRotationAxis) {
  const auto d = sampled(
      200, 100.0,
      [](double t) {
        const double a = 0.8 * t;
        return Pose{Vec3(0.02 * std::cos(a), 0.02 * std::sin(a), 0.01 * t),
                    Quat(Eigen::AngleAxisd(a, Vec3::UnitZ()))};
      },
      no_wrench);
  const auto steps = aggregate(d, LearnerConfig{});
  ASSERT_EQ(steps.size(), 10u);
  for (const auto& s : steps) {
    ASSERT_TRUE(s.v_hat);
    ASSERT_TRUE(s.w_hat);
    EXPECT_LT((*s.w_hat - Vec3::UnitZ()).norm(), 1e-6);
    EXPECT_NEAR(s.dbeta.norm(), 0.8 * 0.19, 1e-9);
  }
}

TEST(Aggregate, ToolFrameExpressesIncrementInBody) {
  const Quat q(Eigen::AngleAxisd(kPi / 2, Vec3::UnitZ()));
  const auto d = sampled(40, 100.0, [&](double t) { return Pose{Vec3(0.05 * t, 0, 0), q}; }, no_wrench);
  const auto steps = aggregate(d, LearnerConfig{});
  EXPECT_LT((*steps[0].v_hat - Vec3(0, -1, 0)).norm(), 1e-12);
  auto dw = d;
  dw.frame = Frame::World;
  EXPECT_LT((*aggregate(dw, LearnerConfig{})[0].v_hat - Vec3::UnitX()).norm(), 1e-12);
}

TEST(Aggregate, TooShort) {
  const auto d = sampled(39, 100.0, [](double t) { return Pose{Vec3(t, 0, 0), Quat::Identity()}; }, no_wrench);
  try {
    aggregate(d, LearnerConfig{});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::TooShort);
  }
}

TEST(Aggregate, CountAndUnitNormsProperty) {
  std::mt19937 rng(11);
  std::uniform_int_distribution<int> wdist(1, 30);
  std::normal_distribution<double> n(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    LearnerConfig cfg;
    cfg.window = wdist(rng);
    std::uniform_int_distribution<int> ndist(2 * cfg.window, 10 * cfg.window);
    const int N = ndist(rng);
    Demonstration d;
    Pose p;
    for (int i = 0; i < N; ++i) {
      WrenchSample s;
      s.t = i * 0.01;
      p.position += 1e-3 * Vec3(n(rng), n(rng), n(rng));
      p.orientation = (p.orientation * rotation_exp(0.01 * Vec3(n(rng), n(rng), n(rng)))).normalized();
      s.pose = p;
      s.force = Vec3(n(rng), n(rng), n(rng));
      s.torque = 0.1 * Vec3(n(rng), n(rng), n(rng));
      d.samples.push_back(s);
    }
    const auto steps = aggregate(d, cfg);
    ASSERT_EQ(steps.size(), static_cast<std::size_t>(N / cfg.window));
    for (const auto& s : steps) {
      for (const auto* u : {&s.v_hat, &s.w_hat, &s.f_hat, &s.t_hat})
        if (*u) EXPECT_NEAR((*u)->norm(), 1.0, 1e-9);
      EXPECT_EQ(s.v_hat.has_value(), s.dx.norm() >= cfg.motion_floor_trans);
      EXPECT_EQ(s.w_hat.has_value(), s.dbeta.norm() >= cfg.motion_floor_rot);
      EXPECT_LE(s.dbeta.norm(), kPi);
    }
  }
}

TEST(MeanDirection, Examples) {
  const auto x = step_from(Vec3(1e-3, 0, 0), Vec3::Zero(), Vec3::Zero(), Vec3::Zero());
  const auto mx = step_from(Vec3(-1e-3, 0, 0), Vec3::Zero(), Vec3::Zero(), Vec3::Zero());
  const auto y = step_from(Vec3(0, 1e-3, 0), Vec3::Zero(), Vec3::Zero(), Vec3::Zero());
  const auto z = step_from(Vec3(0, 0, 1e-3), Vec3::Zero(), Vec3::Zero(), Vec3::Zero());
  EXPECT_LT((mean_direction({x, x}, Channel::Translation) - Vec3::UnitX()).norm(), 1e-15);
  EXPECT_LT(mean_direction({x, mx}, Channel::Translation).norm(), 1e-15);
  EXPECT_LT((mean_direction({x, y, z}, Channel::Translation) - Vec3::Constant(1.0 / 3.0)).norm(), 1e-15);
  try {
    mean_direction({x}, Channel::Rotation);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NoMotion);
  }
}

namespace {

std::vector<MotionStep> steps_with_work(const std::vector<double>& works) {
  std::vector<MotionStep> steps;
  for (double w : works) steps.push_back(step_from(Vec3(1e-3, 0, 0), Vec3::Zero(), Vec3(w * 1e3, 0, 0), Vec3::Zero()));
  return steps;
}

}  // namespace

TEST(Work, Arithmetic) {
  const auto p = work_profile(steps_with_work({2, -1, 1, -2}), Channel::Translation);
  EXPECT_NEAR(p.w_env, 3.0, 1e-12);
  EXPECT_NEAR(p.w_tot, 6.0, 1e-12);
  EXPECT_NEAR(p.ratio, 0.5, 1e-12);
  EXPECT_FALSE(p.no_work);
  EXPECT_DOUBLE_EQ(work_profile(steps_with_work({1, 2, 3}), Channel::Translation).ratio, 1.0);
}

TEST(Work, NoWork) {
  const auto p = work_profile(steps_with_work({0, 0}), Channel::Translation);
  EXPECT_TRUE(p.no_work);
  EXPECT_EQ(p.ratio, 0.0);
  EXPECT_FALSE(is_three_dof_compliant(p, 0.7));
}

TEST(Work, Threshold) {
  WorkProfile p;
  p.no_work = false;
  p.ratio = 0.8;
  EXPECT_TRUE(is_three_dof_compliant(p, 0.7));
  p.ratio = 0.5;
  EXPECT_FALSE(is_three_dof_compliant(p, 0.7));
  EXPECT_THROW(is_three_dof_compliant(p, 0.0), Error);
}

TEST(Work, ScaleAndSignProperties) {
  std::mt19937 rng(3);
  std::normal_distribution<double> n(0.0, 1.0);
  for (int trial = 0; trial < 300; ++trial) {
    std::vector<MotionStep> steps;
    for (int i = 0; i < 12; ++i)
      steps.push_back(step_from(1e-3 * Vec3(n(rng), n(rng), n(rng)), 1e-2 * Vec3(n(rng), n(rng), n(rng)),
                                Vec3(n(rng), n(rng), n(rng)), Vec3(n(rng), n(rng), n(rng))));
    for (Channel c : {Channel::Translation, Channel::Rotation}) {
      const auto base = work_profile(steps, c);
      for (double k : {0.1, 10.0}) {
        auto scaled = steps;
        for (auto& s : scaled) {
          s.f_raw *= k;
          s.t_raw *= k;
        }
        const auto p = work_profile(scaled, c);
        EXPECT_NEAR(p.ratio, base.ratio, 1e-12);
        EXPECT_EQ(is_three_dof_compliant(p, 0.7), is_three_dof_compliant(base, 0.7));
      }
      auto flipped = steps;
      for (auto& s : flipped) {
        s.f_raw = -s.f_raw;
        s.t_raw = -s.t_raw;
      }
      EXPECT_NEAR(work_profile(flipped, c).ratio, 1.0 - base.ratio, 1e-12);
    }
  }
}
