// Acceptance runner: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include "cmprim/io.hpp"
#include "cmprim/pipeline.hpp"
#include "cmprim/sim/controller.hpp"
#include "cmprim/sim/scenarios.hpp"
#include "cmprim/sim/teacher.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <functional>
#include <future>
#include <iostream>
#include <random>
#include <sstream>

using namespace cmprim;

namespace {

// Pinned tolerances and budgets.
constexpr double kRoundTripTol = 1e-9;
constexpr double kRoundTripBudget = 1.0;  // s
constexpr double kChebStep = 1e-3;        // rad
constexpr double kChebBudget = 10.0;
constexpr double kValleyAngleTol = 5.0;  // deg
constexpr double kValleyBudget = 30.0;
constexpr double kPegTrendBudget = 60.0;
constexpr double kEdgeBudget = 10.0;
constexpr double kBicNoise = 0.05;
constexpr int kBicTrials = 100;
constexpr int kBicDemos = 3;
constexpr double kBicRate = 0.95;
constexpr double kBicOracleTol = 1e-9;
constexpr double kBicBudget = 10.0;
constexpr double kGeneralizeBudget = 60.0;
constexpr double kSpectrumRelTol = 1e-6;
constexpr double kOrthTol = 1e-6;

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Learned {
  CompliantPrimitive prim;
  LearnerConfig cfg;
  std::string where;
};

// Every primitive learned during the run, checked by criterion 9.
std::vector<Learned> g_learned;
std::mutex g_learned_mu;

LearnReport learn(const std::vector<Demonstration>& demos, const LearnerConfig& cfg, const std::string& where) {
  auto rep = learn_primitive(demos, cfg);
  std::lock_guard lock(g_learned_mu);
  g_learned.push_back({rep.primitive, cfg, where});
  return rep;
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

Vec3 random_unit(std::mt19937& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  Vec3 v;
  do v = Vec3(n(rng), n(rng), n(rng));
  while (v.norm() < 1e-6);
  return v.normalized();
}

double axis_angle_deg(const Vec3& a, const Vec3& b) { return rad2deg(std::min(angle_between(a, b), angle_between(a, -b))); }

std::vector<Demonstration> scenario_demos(const sim::Scenario& sc) {
  std::vector<Demonstration> demos;
  for (const auto& t : sc.teachers) demos.push_back(sim::generate_demo(sc.env, t));
  return demos;
}

sim::ReproduceResult run(const CompliantPrimitive& prim, const sim::Scenario& sc, const Pose& start) {
  const auto steps = static_cast<std::size_t>(std::ceil(sc.max_time / sc.env.dt));
  return sim::reproduce(prim, sc.env, start, steps, sc.env.dt, 1000000);
}

// ------------------------------------------------------------------ 1

Outcome projection_round_trip() {
  std::mt19937 rng(1);
  double worst = 0.0;
  for (int i = 0; i < 100000; ++i) {
    Vec3 v;
    do v = random_unit(rng);
    while (v.z() <= -1.0 + 1e-6);
    worst = std::max(worst, (ang2vec(vec2ang(v)) - v).norm());
  }
  return {worst < kRoundTripTol, fmt("max error %.3g", worst)};
}

// ------------------------------------------------------------------ 2

double dist_to_segment(const Vec2& p, const Vec2& a, const Vec2& b) {
  const Vec2 ab = b - a;
  const double t = std::clamp((p - a).dot(ab) / ab.squaredNorm(), 0.0, 1.0);
  return (p - (a + t * ab)).norm();
}

bool inside_convex(const Polygon& poly, const Vec2& p) {
  const double s = signed_area(poly) > 0 ? 1.0 : -1.0;
  for (std::size_t i = 0; i < poly.size(); ++i)
    if (s * cross2(poly[(i + 1) % poly.size()] - poly[i], p - poly[i]) < 0.0) return false;
  return true;
}

Outcome chebyshev_oracle() {
  std::mt19937 rng(2);
  std::uniform_real_distribution<double> u(-0.15, 0.15);
  std::uniform_int_distribution<int> npts(3, 12);
  double worst_r = 0.0, worst_c = 0.0, worst_self = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    Polygon poly;
    do {
      std::vector<Vec2> pts;
      const int n = npts(rng);
      for (int i = 0; i < n; ++i) pts.emplace_back(u(rng), u(rng));
      poly = convex_hull(pts);
    } while (poly.size() < 3 || area(poly) < 1e-3);

    auto depth = [&](const Vec2& p) {
      if (!inside_convex(poly, p)) return -1.0;
      double d = INFINITY;
      for (std::size_t i = 0; i < poly.size(); ++i) d = std::min(d, dist_to_segment(p, poly[i], poly[(i + 1) % poly.size()]));
      return d;
    };
    Vec2 lo = poly[0], hi = poly[0];
    for (const auto& p : poly) lo = lo.cwiseMin(p), hi = hi.cwiseMax(p);
    std::vector<std::pair<double, Vec2>> grid;
    double best = -1.0;
    for (double x = lo.x(); x <= hi.x(); x += kChebStep)
      for (double y = lo.y(); y <= hi.y(); y += kChebStep) {
        const double d = depth(Vec2(x, y));
        if (d < 0.0) continue;
        grid.push_back({d, Vec2(x, y)});
        best = std::max(best, d);
      }
    // Depth is 1-Lipschitz, so the grid can only tell the optimum apart from
    // points within step/sqrt(2) of the grid maximum. Those points form the
    // oracle's center set, and the true center lies next to one of them.
    const double resolution = kChebStep / std::sqrt(2.0);
    const auto c = chebyshev_center(poly);
    double gap = INFINITY;
    for (const auto& [d, p] : grid)
      if (d >= best - resolution) gap = std::min(gap, (c.center - p).norm());
    worst_r = std::max(worst_r, std::abs(c.radius - best));
    worst_c = std::max(worst_c, gap);
    worst_self = std::max(worst_self, std::abs(depth(c.center) - c.radius));
  }
  return {worst_r <= 2 * kChebStep && worst_c <= kChebStep && worst_self <= 1e-9,
          fmt("max radius gap %.3g rad, max center gap %.3g rad, max depth-vs-radius gap %.2g rad", worst_r, worst_c,
              worst_self)};
}

// ------------------------------------------------------------------ 3

Outcome valley() {
  const auto sc = sim::valley_scenario();
  const auto rep = learn(scenario_demos(sc), sc.learner, "valley");
  const auto& p = rep.primitive;
  std::ostringstream why;
  bool ok = true;
  if (!p.v_d || rad2deg(angle_between(*p.v_d, -Vec3::UnitZ())) > kValleyAngleTol) ok = false, why << "v_d off; ";
  const auto& c = rep.channel(Channel::Translation).compliance;
  if (!c || c->n_axes != 1 || axis_angle_deg(c->axes[0], Vec3::UnitX()) > kValleyAngleTol)
    ok = false, why << "compliant axes wrong; ";
  if (p.w_d || (p.K_o - sc.learner.stiffness_rot * Mat3::Identity()).norm() > 1e-9) ok = false, why << "rotation not stiff; ";

  std::mt19937 rng(3);
  std::uniform_real_distribution<double> mag(0.01, 0.04), y(-0.02, 0.02);
  int reached = 0;
  double worst = 0.0;
  for (int i = 0; i < 5; ++i) {
    const double side = i % 2 ? 1.0 : -1.0;  // alternate faces
    const double x = side * mag(rng);
    const auto r = run(p, sc, Pose{Vec3(x, y(rng), std::abs(x)), Quat::Identity()});
    reached += r.success;
    worst = std::max(worst, r.final_position_error);
  }
  if (reached != 5) ok = false;
  why << fmt("v_d error %.2f deg, %d/5 starts reached, worst final error %.3g m",
             p.v_d ? rad2deg(angle_between(*p.v_d, -Vec3::UnitZ())) : 180.0, reached, worst);
  return {ok, why.str()};
}

// ------------------------------------------------------------------ 4

Outcome peg_trend() {
  const sim::PegParams pp;
  const auto env = sim::peg2d_env(pp);
  const LearnerConfig cfg = sim::peg2d_scenario(pp).learner;
  const std::vector<double> angles{5.0, 10.0, 15.0, 20.0};
  std::vector<std::future<LearnReport>> jobs;
  for (double a : angles)
    jobs.push_back(std::async(std::launch::async, [&, a] {
      std::vector<Demonstration> demos;
      for (std::uint64_t s : {1, 2, 3}) demos.push_back(sim::generate_demo(env, sim::peg2d_teacher(pp, a, s)));
      return learn(demos, cfg, fmt("peg %.0f deg", a));
    }));
  std::vector<double> ratio;
  std::vector<bool> has_wd;
  for (auto& j : jobs) {
    const auto rep = j.get();
    const auto& d = rep.channel(Channel::Rotation).direction;
    ratio.push_back(d ? d->inlier_ratio : 0.0);
    has_wd.push_back(rep.primitive.w_d.has_value());
  }
  bool ok = !has_wd[0] && !has_wd[1] && has_wd[3];
  for (std::size_t i = 1; i < ratio.size(); ++i) ok = ok && ratio[i] >= ratio[i - 1];
  std::ostringstream why;
  why << "ratios";
  for (std::size_t i = 0; i < angles.size(); ++i) why << fmt(" %.0f:%.2f%s", angles[i], ratio[i], has_wd[i] ? "*" : "");
  why << " (* = w_d present)";
  return {ok, why.str()};
}

// ------------------------------------------------------------------ 5

Outcome edge() {
  const auto sc = sim::edge_scenario();
  const auto rep = learn(scenario_demos(sc), sc.learner, "edge");
  const auto& t = rep.channel(Channel::Translation);
  const auto& r = rep.channel(Channel::Rotation);
  const bool ok = t.work.ratio >= sc.learner.sigma_work && t.three_dof && rep.primitive.trans_3dof_compliant &&
                  r.work.ratio < sc.learner.sigma_work && !r.three_dof && rep.primitive.w_d.has_value();
  return {ok, fmt("translation ratio %.3f (3-DOF %s), rotation ratio %.3f (w_d %s)", t.work.ratio,
                  t.three_dof ? "yes" : "no", r.work.ratio, rep.primitive.w_d ? "present" : "absent")};
}

// ------------------------------------------------------------------ 6

// Instances whose means each have one nonzero coordinate, so the scatter is
// diagonal and the principal axes are the coordinate axes.
struct BicInstance {
  std::vector<Vec3> means;
  int expected;
};

double hand_bic(const std::vector<Vec3>& means, int d, double sigma) {
  // Sum of squares per coordinate, largest first, gives the eigenvalues.
  std::array<double, 3> ev{0, 0, 0};
  for (const auto& m : means)
    for (int i = 0; i < 3; ++i) ev[i] += m(i) * m(i);
  std::sort(ev.begin(), ev.end(), std::greater<>());
  double rss = 0.0;
  for (int i = d; i < 3; ++i) rss += ev[i];
  const double J = static_cast<double>(means.size());
  const double logL = -1.5 * J * std::log(2.0 * kPi * sigma * sigma) - rss / (2.0 * sigma * sigma);
  return std::log(J) * d - 2.0 * logL;
}

Outcome bic_selection() {
  const LearnerConfig cfg;
  std::ostringstream why;
  bool ok = true;

  const std::vector<BicInstance> fixed{
      {{Vec3(0.02, 0, 0), Vec3(0, 0.01, 0), Vec3(0, 0, -0.015)}, 0},
      {{Vec3(0.5, 0, 0), Vec3(-0.4, 0, 0), Vec3(0, 0.02, 0)}, 1},
      {{Vec3(0.5, 0, 0), Vec3(0, -0.6, 0), Vec3(0, 0, 0.02)}, 2},
  };
  double oracle_gap = 0.0;
  for (const auto& inst : fixed) {
    const auto r = select_num_axes(inst.means, std::nullopt, cfg);
    int best = 0;
    for (int d = 0; d <= 3; ++d) {
      const double h = hand_bic(inst.means, d, cfg.sigma_demo);
      oracle_gap = std::max(oracle_gap, std::abs(r.bic[d] - h) / std::max(1.0, std::abs(h)));
      if (h < hand_bic(inst.means, best, cfg.sigma_demo)) best = d;
    }
    if (r.n_axes != inst.expected || best != inst.expected) ok = false;
  }
  if (oracle_gap > kBicOracleTol) ok = false;
  why << fmt("oracle gap %.2g;", oracle_gap);

  // Per-demo means: J = 3 points at the origin, on a random line through it,
  // or on a random plane through it, each with iid N(0, 0.05^2) per coordinate.
  const char* names[] = {"origin", "line", "plane"};
  for (int dim = 0; dim < 3; ++dim) {
    std::mt19937 rng(600 + dim);
    std::normal_distribution<double> noise(0.0, kBicNoise);
    std::uniform_real_distribution<double> coef(-1.0, 1.0);
    int correct = 0;
    for (int trial = 0; trial < kBicTrials; ++trial) {
      const Vec3 a = random_unit(rng);
      const Vec3 b = a.cross(random_unit(rng)).normalized();
      std::vector<Vec3> means;
      for (int j = 0; j < kBicDemos; ++j) {
        Vec3 m(noise(rng), noise(rng), noise(rng));
        if (dim >= 1) m += coef(rng) * a;
        if (dim >= 2) m += coef(rng) * b;
        means.push_back(m);
      }
      correct += select_num_axes(means, std::nullopt, cfg).n_axes == dim;
    }
    const double rate = correct / static_cast<double>(kBicTrials);
    if (rate < kBicRate) ok = false;
    why << fmt(" %s %d/%d", names[dim], correct, kBicTrials);
  }
  return {ok, why.str()};
}

// ------------------------------------------------------------------ 7

Outcome generalization() {
  const sim::PegParams pp;
  const auto sc = sim::peg2d_scenario(pp);
  const auto rep = learn(scenario_demos(sc), sc.learner, "peg2d scenario");
  const std::vector<double> angles{5.0, 10.0, 15.0, 20.0, 25.0, 30.0, 35.0};
  std::vector<std::future<bool>> jobs;
  for (double a : angles)
    jobs.push_back(std::async(std::launch::async,
                              [&, a] { return run(rep.primitive, sc, sim::peg2d_start(pp, a)).success; }));
  bool ok = true;
  std::ostringstream why;
  for (std::size_t i = 0; i < angles.size(); ++i) {
    const bool s = jobs[i].get();
    if (angles[i] <= 20.0 && !s) ok = false;
    if (angles[i] >= 30.0 && s) ok = false;
    why << fmt("%s%.0f:%s", i ? " " : "", angles[i], s ? "success" : "failure");
  }
  return {ok, why.str()};
}

// ------------------------------------------------------------------ 8

Demonstration scaled(Demonstration d, double c) {
  for (auto& s : d.samples) {
    s.force *= c;
    s.torque *= c;
  }
  return d;
}

Outcome work_invariance(const std::string& data_dir) {
  bool ok = true;
  int decisions = 0;
  std::ostringstream bad;
  for (const auto& name : sim::scenario_names()) {
    const auto sc = io::scenario_from_json(io::read_json(data_dir + "/scenarios/" + name + ".json"));
    const auto demos = scenario_demos(sc);
    for (double c : {0.1, 10.0})
      for (const auto& d : demos) {
        const auto a = aggregate(d, sc.learner), b = aggregate(scaled(d, c), sc.learner);
        for (Channel ch : {Channel::Translation, Channel::Rotation}) {
          ++decisions;
          if (is_three_dof_compliant(work_profile(a, ch), sc.learner.sigma_work) !=
              is_three_dof_compliant(work_profile(b, ch), sc.learner.sigma_work)) {
            ok = false;
            bad << " " << d.id << "/" << to_string(ch) << "@" << c;
          }
        }
      }
  }
  return {ok, fmt("%d decisions compared", decisions) + (ok ? "" : ", changed:" + bad.str())};
}

// ------------------------------------------------------------------ 9

Outcome spectra() {
  bool ok = true;
  double worst_eig = 0.0, worst_orth = 0.0;
  std::ostringstream bad;
  for (const auto& l : g_learned)
    for (Channel ch : {Channel::Translation, Channel::Rotation}) {
      const Mat3& K = l.prim.stiffness(ch);
      const double k = l.cfg.stiffness(ch);
      const Eigen::SelfAdjointEigenSolver<Mat3> es(0.5 * (K + K.transpose()));
      for (int i = 0; i < 3; ++i) {
        const double lam = es.eigenvalues()(i);
        const double gap = std::min(std::abs(lam), std::abs(lam - k)) / k;
        worst_eig = std::max(worst_eig, gap);
        if (gap > kSpectrumRelTol) ok = false, bad << " " << l.where;
        if (std::abs(lam) <= kSpectrumRelTol * k && l.prim.direction(ch)) {
          const double dot = std::abs(es.eigenvectors().col(i).dot(*l.prim.direction(ch)));
          worst_orth = std::max(worst_orth, dot);
          if (dot > kOrthTol) ok = false, bad << " " << l.where;
        }
      }
    }
  return {ok && !g_learned.empty(),
          fmt("%zu primitives, max eigenvalue gap %.2g k, max axis-direction dot %.2g", g_learned.size(), worst_eig,
              worst_orth) +
              bad.str()};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"cmprim acceptance checks"};
  std::string data_dir = "data";
  app.add_option("--data", data_dir, "directory holding scenarios/*.json");
  CLI11_PARSE(app, argc, argv);

  struct Criterion {
    int id;
    const char* name;
    double budget;  // s, 0 for none
    std::function<Outcome()> check;
  };
  const std::vector<Criterion> criteria{
      {1, "projection round trip", kRoundTripBudget, projection_round_trip},
      {2, "Chebyshev center oracle", kChebBudget, chebyshev_oracle},
      {3, "valley", kValleyBudget, valley},
      {4, "peg inlier-ratio trend", kPegTrendBudget, peg_trend},
      {5, "edge 3-DOF detection", kEdgeBudget, edge},
      {6, "BIC model selection", kBicBudget, bic_selection},
      {7, "peg generalization", kGeneralizeBudget, generalization},
      {8, "work-ratio scale invariance", 0.0, [&] { return work_invariance(data_dir); }},
      {9, "stiffness spectra", 0.0, spectra},
  };

  int failed = 0;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.check();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    bool pass = o.pass;
    std::string budget;
    if (c.budget > 0.0) {
      budget = fmt(", budget %.0f s", c.budget);
      if (secs >= c.budget) pass = false;
    }
    failed += !pass;
    std::cout << "criterion " << c.id << " " << (pass ? "PASS" : "FAIL") << ": " << c.name << ": " << o.detail
              << fmt(" (%.2f s%s)", secs, budget.c_str()) << std::endl;
  }
  std::cout << (criteria.size() - failed) << "/" << criteria.size() << " criteria passed" << std::endl;
  return failed == 0 ? 0 : 1;
}
