#include "cmprim/io.hpp"
#include "cmprim/pipeline.hpp"
#include "cmprim/sim/scenarios.hpp"
#include "cmprim/sim/teacher.hpp"
#include "test_util.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace cmprim;
using testutil::sampled;

namespace {

std::vector<Demonstration> valley_demos() {
  const auto sc = sim::valley_scenario();
  std::vector<Demonstration> demos;
  for (const auto& t : sc.teachers) demos.push_back(sim::generate_demo(sc.env, t));
  return demos;
}

Demonstration scaled(Demonstration d, double cf, double ct) {
  for (auto& s : d.samples) {
    s.force *= cf;
    s.torque *= ct;
  }
  return d;
}

}  // namespace

TEST(Pipeline, FreeSpacePushGivesStiffDirection) {
  const auto d = sampled(300, 100.0, [](double t) { return Pose{Vec3(0.02 * t, 0, 0), Quat::Identity()}; },
                         [](double) { return std::pair{Vec3::Zero(), Vec3::Zero()}; });
  const LearnerConfig cfg;
  const auto rep = learn_primitive({d}, cfg);
  const auto& p = rep.primitive;
  ASSERT_TRUE(p.v_d);
  EXPECT_LT(angle_between(*p.v_d, Vec3::UnitX()), 1e-6);
  ASSERT_TRUE(rep.channel(Channel::Translation).compliance);
  EXPECT_EQ(rep.channel(Channel::Translation).compliance->n_axes, 0);
  EXPECT_LT((p.K_f - cfg.stiffness_trans * Mat3::Identity()).norm(), 1e-9);
  EXPECT_FALSE(p.w_d);
  EXPECT_LT((p.K_o - cfg.stiffness_rot * Mat3::Identity()).norm(), 1e-9);
}

TEST(Pipeline, ValleyDemosGiveBisectorAndTransverseAxis) {
  const auto rep = learn_primitive(valley_demos(), LearnerConfig{});
  const auto& p = rep.primitive;
  ASSERT_TRUE(p.v_d);
  EXPECT_LT(angle_between(*p.v_d, -Vec3::UnitZ()), deg2rad(5.0));
  const auto& c = rep.channel(Channel::Translation).compliance;
  ASSERT_TRUE(c);
  ASSERT_EQ(c->n_axes, 1);
  EXPECT_LT(std::min(angle_between(c->axes[0], Vec3::UnitX()), angle_between(c->axes[0], -Vec3::UnitX())),
            deg2rad(5.0));
  EXPECT_FALSE(p.w_d);
  EXPECT_LT((p.K_o - 50.0 * Mat3::Identity()).norm(), 1e-9);
}

TEST(Pipeline, DeterministicReports) {
  const auto demos = valley_demos();
  const auto a = io::to_json(learn_primitive(demos, LearnerConfig{})).dump();
  const auto b = io::to_json(learn_primitive(demos, LearnerConfig{})).dump();
  EXPECT_EQ(a, b);
}

TEST(Pipeline, ChannelIndependenceUnderTranslationEdits) {
  const auto sc = sim::edge_scenario();
  const auto demo = sim::generate_demo(sc.env, sc.teachers[0]);
  std::mt19937 rng(29);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const auto base = io::to_json(learn_primitive({demo}, sc.learner));
  for (int trial = 0; trial < 5; ++trial) {
    Demonstration edited = demo;
    for (auto& s : edited.samples) s.force += Vec3(u(rng), u(rng), u(rng));
    const auto rep = io::to_json(learn_primitive({edited}, sc.learner));
    EXPECT_EQ(rep["rotation"], base["rotation"]) << "trial " << trial;
    EXPECT_EQ(rep["primitive"]["w_d"], base["primitive"]["w_d"]);
    EXPECT_EQ(rep["primitive"]["K_o"], base["primitive"]["K_o"]);
  }
}

TEST(Pipeline, WorkDecisionsInvariantToWrenchScale) {
  std::vector<std::vector<Demonstration>> sets{valley_demos()};
  const auto edge = sim::edge_scenario();
  sets.push_back({sim::generate_demo(edge.env, edge.teachers[0])});
  const LearnerConfig cfg;
  for (const auto& demos : sets)
    for (double c : {0.1, 10.0}) {
      std::vector<Demonstration> s;
      for (const auto& d : demos) s.push_back(scaled(d, c, c));
      for (std::size_t i = 0; i < demos.size(); ++i) {
        const auto a = aggregate(demos[i], cfg), b = aggregate(s[i], cfg);
        for (Channel ch : {Channel::Translation, Channel::Rotation}) {
          const auto wa = work_profile(a, ch), wb = work_profile(b, ch);
          EXPECT_EQ(is_three_dof_compliant(wa, cfg.sigma_work), is_three_dof_compliant(wb, cfg.sigma_work));
          if (!wa.no_work) {
            EXPECT_NEAR(wa.ratio, wb.ratio, 1e-12);
          }
        }
      }
    }
}

TEST(Pipeline, HelixGivesPitchAndScrewSpeeds) {
  // Screw motion along and about z with matching contact wrench opposing it
  // is reported as a screw primitive with nu = pitch * lambda.
  const double pitch = 0.01;
  const auto d = sampled(
      400, 100.0,
      [&](double t) {
        return Pose{Vec3(0, 0, pitch * 0.3 * t), Quat(Eigen::AngleAxisd(0.3 * t, Vec3::UnitZ()))};
      },
      [](double t) { return std::pair{Vec3(0.3 * std::sin(t), 0.3 * std::cos(t), -2.0), Vec3(0, 0, -0.2)}; },
      "helix", Frame::World);
  const auto rep = learn_primitive({d}, LearnerConfig{});
  const auto& p = rep.primitive;
  ASSERT_TRUE(p.v_d);
  ASSERT_TRUE(p.w_d);
  ASSERT_TRUE(p.pitch);
  EXPECT_NEAR(*p.pitch, pitch, 1e-3 * pitch);
  EXPECT_NEAR(p.nu, *p.pitch * p.lambda, 1e-9 * p.nu);
}

TEST(Pipeline, NoMotionIsAnError) {
  const auto d = sampled(100, 100.0, [](double) { return Pose{}; },
                         [](double) { return std::pair{Vec3(0, 0, 3), Vec3::Zero()}; });
  try {
    learn_primitive({d}, LearnerConfig{});
    FAIL() << "expected NoUsableSteps";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NoUsableSteps);
  }
}

TEST(Pipeline, EmptyInputIsAnError) {
  try {
    learn_primitive({}, LearnerConfig{});
    FAIL() << "expected NoInput";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NoInput);
  }
}

TEST(Pipeline, MixedFramesRejected) {
  auto a = sampled(100, 100.0, [](double t) { return Pose{Vec3(0.02 * t, 0, 0), Quat::Identity()}; },
                   [](double) { return std::pair{Vec3::Zero(), Vec3::Zero()}; });
  auto b = a;
  b.frame = Frame::World;
  EXPECT_THROW(learn_primitive({a, b}, LearnerConfig{}), Error);
}

TEST(Pipeline, BothChannelsThreeDofWarns) {
  // Motion along +x and about +z, both driven by a wrench pointing the same way.
  const auto d = sampled(
      200, 100.0,
      [](double t) { return Pose{Vec3(0.02 * t, 0, 0), Quat(Eigen::AngleAxisd(0.2 * t, Vec3::UnitZ()))}; },
      [](double) { return std::pair{Vec3(2, 0, 0), Vec3(0, 0, 0.3)}; }, "limp", Frame::World);
  const auto rep = learn_primitive({d}, LearnerConfig{});
  EXPECT_TRUE(rep.primitive.trans_3dof_compliant);
  EXPECT_TRUE(rep.primitive.rot_3dof_compliant);
  EXPECT_EQ(rep.primitive.K_f.norm(), 0.0);
  EXPECT_EQ(rep.primitive.K_o.norm(), 0.0);
  EXPECT_FALSE(rep.warnings.empty());
}

TEST(Pipeline, PegDemosCarryBothDirections) {
  const sim::PegParams pp;
  const auto env = sim::peg2d_env(pp);
  std::vector<Demonstration> demos;
  for (std::uint64_t s : {4, 5, 6}) demos.push_back(sim::generate_demo(env, sim::peg2d_teacher(pp, 20.0, s)));
  const auto rep = learn_primitive(demos, LearnerConfig{});
  ASSERT_TRUE(rep.primitive.v_d);
  ASSERT_TRUE(rep.primitive.w_d);
  EXPECT_LT(angle_between(*rep.primitive.v_d, -Vec3::UnitZ()), deg2rad(20.0));
  EXPECT_LT(angle_between(*rep.primitive.w_d, -Vec3::UnitY()), deg2rad(20.0));
}
