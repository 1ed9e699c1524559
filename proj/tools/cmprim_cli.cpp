// cmprim: learn compliant motion primitives from demonstrations, generate
// synthetic demonstrations and replay primitives in the contact simulator.

#include "cmprim/io.hpp"
#include "cmprim/pipeline.hpp"
#include "cmprim/sim/controller.hpp"
#include "cmprim/sim/scenarios.hpp"
#include "cmprim/sim/teacher.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

using namespace cmprim;
namespace io = cmprim::io;

namespace {

struct Globals {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
};

int fail(int code, const std::string& msg) {
  std::cerr << "error: " << msg << "\n";
  return code;
}

bool is_input_error(ErrorCode c) {
  switch (c) {
    case ErrorCode::Parse:
    case ErrorCode::EmptyDemo:
    case ErrorCode::NonMonotoneTime:
    case ErrorCode::NonFiniteValue:
    case ErrorCode::InvalidConfig:
    case ErrorCode::InvalidPrimitive:
    case ErrorCode::UnknownScenario:
      return true;
    default:
      return false;
  }
}

LearnerConfig load_config(const Globals& g, LearnerConfig base = {}) {
  if (g.config.empty()) return base;
  return io::config_from_json(io::read_json(g.config), base);
}

/// A bundled scenario name or a path to a scenario JSON file.
sim::Scenario load_scenario(const std::string& name) {
  if (io::ends_with(name, ".json")) return io::scenario_from_json(io::read_json(name));
  auto sc = sim::builtin_scenario(name);
  if (!sc) {
    std::string known;
    for (const auto& n : sim::scenario_names()) known += (known.empty() ? "" : ", ") + n;
    throw Error(ErrorCode::UnknownScenario, "unknown scenario '" + name + "' (known: " + known + ")");
  }
  return *sc;
}

Pose parse_pose(const std::string& text) {
  std::vector<double> v;
  std::stringstream ss(text);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    try {
      v.push_back(std::stod(cell));
    } catch (const std::exception&) {
      throw Error(ErrorCode::Parse, "bad number '" + cell + "' in --pose");
    }
  }
  if (v.size() != 3 && v.size() != 7) throw Error(ErrorCode::Parse, "--pose takes x,y,z or x,y,z,qw,qx,qy,qz");
  Pose p;
  p.position = Vec3(v[0], v[1], v[2]);
  if (v.size() == 7) p.orientation = Quat(v[3], v[4], v[5], v[6]).normalized();
  return p;
}

void print_summary(const LearnReport& rep) {
  const auto& p = rep.primitive;
  for (Channel c : {Channel::Translation, Channel::Rotation}) {
    const auto& ch = rep.channel(c);
    std::cout << to_string(c) << ": work ratio " << ch.work.ratio << (ch.three_dof ? " (3-DOF compliant)" : "");
    if (ch.direction) std::cout << ", inlier ratio " << ch.direction->inlier_ratio;
    const auto& d = p.direction(c);
    if (d) std::cout << ", direction [" << d->transpose() << "]";
    else std::cout << ", no direction";
    if (ch.compliance) std::cout << ", D=" << ch.compliance->n_axes;
    std::cout << "\n";
  }
  if (p.pitch) std::cout << "pitch " << *p.pitch << " m/rad\n";
  std::cout << "nu " << p.nu << " m/s, lambda " << p.lambda << " rad/s\n";
  for (const auto& w : rep.warnings) std::cout << "warning: " << w << "\n";
}

// ------------------------------------------------------------------ learn

int cmd_learn(const Globals& g, const std::vector<std::string>& files) {
  std::vector<Demonstration> demos;
  LearnerConfig cfg;
  try {
    cfg = load_config(g);
    for (const auto& f : files) demos.push_back(io::read_demo(f));
  } catch (const Error& e) {
    return fail(2, e.what());
  }
  LearnReport rep;
  try {
    rep = learn_primitive(demos, cfg);
  } catch (const Error& e) {
    return fail(3, e.what());
  }
  print_summary(rep);
  if (!g.out.empty()) {
    try {
      io::write_text(g.out, io::to_json(rep, g.seed).dump(1) + "\n");
    } catch (const Error& e) {
      return fail(2, e.what());
    }
  }
  return 0;
}

// --------------------------------------------------------------- simulate

struct SimulateArgs {
  std::string scenario;
  std::string side;
  std::optional<std::size_t> teacher;
  std::optional<double> angle;
  std::optional<double> noise;
  std::optional<double> jitter;
};

int cmd_simulate(const Globals& g, const SimulateArgs& a) {
  sim::TeacherSpec t;
  sim::Scenario sc;
  try {
    sc = load_scenario(a.scenario);
    if (a.angle) {
      if (sc.env.name != "peg2d") throw Error(ErrorCode::InvalidConfig, "--angle applies to the peg2d scenario");
      t = sim::peg2d_teacher(sim::PegParams{}, *a.angle, g.seed.value_or(1));
    } else if (!a.side.empty()) {
      if (sc.env.name != "valley") throw Error(ErrorCode::InvalidConfig, "--side applies to the valley scenario");
      if (a.side != "left" && a.side != "right") throw Error(ErrorCode::InvalidConfig, "--side is left or right");
      t = sim::valley_teacher(a.side == "left" ? -1 : 1);
    } else {
      const std::size_t i = a.teacher.value_or(0);
      if (i >= sc.teachers.size())
        throw Error(ErrorCode::InvalidConfig, "scenario has " + std::to_string(sc.teachers.size()) + " teachers");
      t = sc.teachers[i];
    }
    if (g.seed) t.seed = *g.seed;
    if (a.noise) t.dir_noise_deg = *a.noise;
    if (a.jitter) t.torque_jitter = *a.jitter;
  } catch (const Error& e) {
    return fail(2, e.what());
  }
  Demonstration demo;
  try {
    demo = sim::generate_demo(sc.env, t);
  } catch (const Error& e) {
    return fail(3, e.what());
  }
  std::cout << demo.id << ": " << demo.samples.size() << " samples over " << demo.samples.back().t << " s\n";
  if (!g.out.empty()) {
    try {
      io::write_demo(g.out, demo, t.seed);
    } catch (const Error& e) {
      return fail(2, e.what());
    }
  }
  return 0;
}

// -------------------------------------------------------------- reproduce

struct ReproduceArgs {
  std::string primitive;
  std::string scenario;
  std::size_t start = 0;
  std::string pose;
  std::optional<double> angle;
  std::optional<double> max_time;
};

int cmd_reproduce(const Globals& g, const ReproduceArgs& a) {
  io::PrimitiveFile pf;
  sim::Scenario sc;
  Pose start;
  try {
    pf = io::read_primitive(a.primitive);
    sc = load_scenario(a.scenario);
    if (!a.pose.empty()) {
      start = parse_pose(a.pose);
    } else if (a.angle) {
      if (sc.env.name != "peg2d") throw Error(ErrorCode::InvalidConfig, "--angle applies to the peg2d scenario");
      start = sim::peg2d_start(sim::PegParams{}, *a.angle);
    } else {
      if (a.start >= sc.starts.size())
        throw Error(ErrorCode::InvalidConfig, "scenario has " + std::to_string(sc.starts.size()) + " starts");
      start = sc.starts[a.start];
    }
    if (!sc.env.bounds.contains(start.position)) throw Error(ErrorCode::InvalidConfig, "start outside the workspace");
  } catch (const Error& e) {
    return fail(2, e.what());
  }
  const double T = a.max_time.value_or(sc.max_time);
  const auto steps = static_cast<std::size_t>(std::ceil(T / sc.env.dt));
  const auto r = sim::reproduce(pf.primitive, sc.env, start, steps, sc.env.dt);
  std::cout << (r.success ? "success" : "failure") << " after " << r.steps * sc.env.dt << " s, position error "
            << r.final_position_error << " m, orientation error " << r.final_orientation_error << " rad"
            << (r.diverged ? " (diverged)" : "") << "\n";
  if (!g.out.empty()) {
    try {
      io::write_text(g.out, io::trajectory_to_csv(r, sc.env.goal, g.seed));
    } catch (const Error& e) {
      return fail(2, e.what());
    }
  }
  return r.success ? 0 : 1;
}

// ---------------------------------------------------------------- inspect

struct Svg {
  double x0 = INFINITY, y0 = INFINITY, x1 = -INFINITY, y1 = -INFINITY;
  std::vector<std::string> items;

  void extend(double x, double y) {
    x0 = std::min(x0, x), x1 = std::max(x1, x);
    y0 = std::min(y0, y), y1 = std::max(y1, y);
  }
  void polyline(const std::vector<std::pair<double, double>>& pts, const std::string& style, bool closed) {
    std::ostringstream s;
    s << "<" << (closed ? "polygon" : "polyline") << " points=\"";
    for (const auto& [x, y] : pts) {
      extend(x, y);
      s << x << "," << -y << " ";
    }
    s << "\" style=\"" << style << "\"/>";
    items.push_back(s.str());
  }
  void dot(double x, double y, const std::string& color) {
    extend(x, y);
    std::ostringstream s;
    s << "<circle cx=\"" << x << "\" cy=\"" << -y << "\" r=\"" << 0.01 * std::max(1e-9, std::max(x1 - x0, y1 - y0))
      << "\" fill=\"" << color << "\"/>";
    items.push_back(s.str());
  }
  std::string str() const {
    const double w = std::max(x1 - x0, 1e-9), h = std::max(y1 - y0, 1e-9), m = 0.05 * std::max(w, h);
    std::ostringstream s;
    s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"600\" height=\"600\" viewBox=\"" << x0 - m << " "
      << -y1 - m << " " << w + 2 * m << " " << h + 2 * m << "\" preserveAspectRatio=\"none\">\n";
    for (const auto& i : items) s << i << "\n";
    s << "</svg>\n";
    return s.str();
  }
};

using io::json;

std::vector<std::pair<double, double>> points(const json& arr) {
  std::vector<std::pair<double, double>> pts;
  for (const auto& c : arr) pts.emplace_back(c[0].get<double>(), c[1].get<double>());
  return pts;
}

int inspect_rectangles(const json& ch, std::ostream& csv, Svg& svg) {
  if (!ch.contains("direction") || ch["direction"].is_null())
    return fail(2, "report has no direction stage for this channel");
  const auto& d = ch["direction"];
  csv << "kind,index,n,x1,y1,x2,y2,...\n";
  const double stroke = 0.002;
  for (const auto& r : d["rectangles"]) {
    const auto pts = points(r["corners"]);
    csv << "rect," << r["step"].get<std::size_t>() << "," << pts.size();
    for (const auto& [x, y] : pts) csv << "," << x << "," << y;
    csv << "\n";
    if (pts.size() > 1)
      svg.polyline(pts, "fill:steelblue;fill-opacity:0.08;stroke:steelblue;stroke-width:" + std::to_string(stroke), true);
  }
  const auto phi = points(d["intersection"]);
  csv << "phi,-1," << phi.size();
  for (const auto& [x, y] : phi) csv << "," << x << "," << y;
  csv << "\n";
  if (phi.size() > 1) svg.polyline(phi, "fill:orange;fill-opacity:0.6;stroke:red;stroke-width:0.003", true);
  svg.dot(d["center"][0].get<double>(), d["center"][1].get<double>(), "black");
  return 0;
}

int inspect_workseries(const json& rep, std::ostream& csv, Svg& svg) {
  const auto& wt = rep["translation"]["work"]["per_step_work"];
  const auto& wr = rep["rotation"]["work"]["per_step_work"];
  csv << "step,w_translation,w_rotation\n";
  const std::size_t n = std::max(wt.size(), wr.size());
  auto at = [](const json& a, std::size_t i) { return i < a.size() ? a[i].get<double>() : 0.0; };
  std::vector<std::pair<double, double>> pt, pr;
  double scale_t = 1e-12, scale_r = 1e-12;
  for (std::size_t i = 0; i < n; ++i) scale_t = std::max(scale_t, std::abs(at(wt, i)));
  for (std::size_t i = 0; i < n; ++i) scale_r = std::max(scale_r, std::abs(at(wr, i)));
  for (std::size_t i = 0; i < n; ++i) {
    csv << i << "," << at(wt, i) << "," << at(wr, i) << "\n";
    pt.emplace_back(static_cast<double>(i) / std::max<std::size_t>(1, n - 1), at(wt, i) / scale_t);
    pr.emplace_back(static_cast<double>(i) / std::max<std::size_t>(1, n - 1), at(wr, i) / scale_r);
  }
  svg.polyline({{0.0, 0.0}, {1.0, 0.0}}, "stroke:gray;stroke-width:0.003", false);
  svg.polyline(pt, "fill:none;stroke:steelblue;stroke-width:0.005", false);
  svg.polyline(pr, "fill:none;stroke:darkred;stroke-width:0.005", false);
  return 0;
}

int inspect_pca(const json& ch, std::ostream& csv, Svg& svg) {
  if (!ch.contains("compliance") || ch["compliance"].is_null())
    return fail(2, "report has no compliance stage for this channel");
  const auto& c = ch["compliance"];
  csv << "kind,index,x,y,z\n";
  auto row = [&](const char* kind, std::size_t i, const json& v) {
    csv << kind << "," << i << "," << v[0].get<double>() << "," << v[1].get<double>() << "," << v[2].get<double>()
        << "\n";
  };
  for (std::size_t i = 0; i < c["inputs"].size(); ++i) row("input", i, c["inputs"][i]);
  for (std::size_t i = 0; i < c["residuals"].size(); ++i) row("residual", i, c["residuals"][i]);
  row("eigenvalues", 0, c["pca"]["eigenvalues"]);
  for (std::size_t i = 0; i < c["axes"].size(); ++i) row("axis", i, c["axes"][i]);
  csv << "bic,0";
  for (const auto& b : c["bic"]) csv << "," << (b.is_null() ? std::string("inf") : std::to_string(b.get<double>()));
  csv << "\nn_axes," << c["n_axes"].get<int>() << "\n";
  // Projection of the inputs on the plane of the two leading eigenvectors.
  const auto& ev = c["pca"]["eigenvectors"];
  for (const auto& v : c["inputs"]) {
    double a = 0, b = 0;
    for (int k = 0; k < 3; ++k) {
      a += v[k].get<double>() * ev[k][0].get<double>();
      b += v[k].get<double>() * ev[k][1].get<double>();
    }
    svg.dot(a, b, "steelblue");
  }
  svg.dot(0.0, 0.0, "black");
  return 0;
}

int cmd_inspect(const Globals& g, const std::string& report, const std::string& what, const std::string& channel) {
  json rep;
  try {
    rep = io::read_json(report);
    if (!rep.is_object() || !rep.contains("translation") || !rep.contains("rotation"))
      throw Error(ErrorCode::Parse, "'" + report + "' is not a learn report");
  } catch (const Error& e) {
    return fail(2, e.what());
  }
  if (channel != "translation" && channel != "rotation") return fail(2, "--channel is translation or rotation");
  std::ostringstream csv;
  Svg svg;
  int rc = 2;
  try {
    if (what == "rectangles") rc = inspect_rectangles(rep[channel], csv, svg);
    else if (what == "workseries") rc = inspect_workseries(rep, csv, svg);
    else if (what == "pca") rc = inspect_pca(rep[channel], csv, svg);
    else return fail(2, "unknown stage '" + what + "'");
  } catch (const json::exception& e) {
    return fail(2, std::string("malformed report: ") + e.what());
  }
  if (rc != 0) return rc;
  if (g.out.empty()) {
    std::cout << csv.str();
    return 0;
  }
  std::string stem = g.out;
  if (io::ends_with(stem, ".csv") || io::ends_with(stem, ".svg")) stem.resize(stem.size() - 4);
  try {
    io::write_text(stem + ".csv", csv.str());
    io::write_text(stem + ".svg", svg.str());
  } catch (const Error& e) {
    return fail(2, e.what());
  }
  return 0;
}

// ------------------------------------------------------------------ sweep

int cmd_sweep(const Globals& g, const std::string& scenario, const std::string& primitive, unsigned threads) {
  sim::Scenario sc;
  CompliantPrimitive prim;
  try {
    sc = load_scenario(scenario);
    if (!primitive.empty()) {
      prim = io::read_primitive(primitive).primitive;
    } else {
      LearnerConfig cfg = load_config(g, sc.learner);
      std::vector<Demonstration> demos;
      for (auto t : sc.teachers) {
        if (g.seed) t.seed = *g.seed + demos.size();
        demos.push_back(sim::generate_demo(sc.env, t));
      }
      prim = learn_primitive(demos, cfg).primitive;
    }
  } catch (const Error& e) {
    return fail(is_input_error(e.code()) ? 2 : 3, e.what());
  }
  const auto steps = static_cast<std::size_t>(std::ceil(sc.max_time / sc.env.dt));
  std::vector<sim::ReproduceResult> results(sc.starts.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i; (i = next++) < sc.starts.size();)
      results[i] = sim::reproduce(prim, sc.env, sc.starts[i], steps, sc.env.dt, 1000000);
  };
  std::vector<std::thread> pool;
  for (unsigned k = 0; k < std::max(1u, threads); ++k) pool.emplace_back(worker);
  for (auto& t : pool) t.join();

  std::ostringstream csv;
  if (g.seed) csv << "# seed=" << *g.seed << "\n";
  csv << "start,px,py,pz,qw,qx,qy,qz,success,time,position_error,orientation_error\n";
  std::size_t ok = 0;
  for (std::size_t i = 0; i < results.size(); ++i) {
    const auto& s = sc.starts[i];
    const auto& r = results[i];
    ok += r.success;
    csv << i << "," << s.position.x() << "," << s.position.y() << "," << s.position.z() << "," << s.orientation.w()
        << "," << s.orientation.x() << "," << s.orientation.y() << "," << s.orientation.z() << "," << r.success << ","
        << r.steps * sc.env.dt << "," << r.final_position_error << "," << r.final_orientation_error << "\n";
  }
  std::cout << ok << "/" << results.size() << " starts reached the goal\n";
  if (g.out.empty()) {
    std::cout << csv.str();
  } else {
    try {
      io::write_text(g.out, csv.str());
    } catch (const Error& e) {
      return fail(2, e.what());
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Learn and replay compliant motion primitives"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  std::uint64_t seed = 0;
  app.add_option("--config", g.config, "Learner config JSON (keys of LearnerConfig)");
  auto* seed_opt = app.add_option("--seed", seed, "Seed for every stochastic path");
  app.add_option("--out", g.out, "Output path");

  auto* learn = app.add_subcommand("learn", "Learn a primitive from demonstration files");
  std::vector<std::string> demo_files;
  learn->add_option("demos", demo_files, "Demonstration files (.json or .csv)")->required();

  auto* simulate = app.add_subcommand("simulate", "Generate a synthetic demonstration");
  SimulateArgs sa;
  simulate->add_option("scenario", sa.scenario, "Scenario name or scenario JSON")->required();
  simulate->add_option("--side", sa.side, "valley: left or right face");
  simulate->add_option("--teacher", sa.teacher, "Index of the scenario teacher");
  simulate->add_option("--angle", sa.angle, "peg2d: initial tilt in degrees");
  simulate->add_option("--noise", sa.noise, "Direction noise std in degrees");
  simulate->add_option("--jitter", sa.jitter, "Torque jitter std in N m");

  auto* reproduce = app.add_subcommand("reproduce", "Replay a primitive in a scenario");
  ReproduceArgs ra;
  reproduce->add_option("primitive", ra.primitive, "Primitive or learn report JSON")->required();
  reproduce->add_option("scenario", ra.scenario, "Scenario name or scenario JSON")->required();
  reproduce->add_option("--start", ra.start, "Index of the scenario start pose");
  reproduce->add_option("--pose", ra.pose, "Start pose x,y,z[,qw,qx,qy,qz]");
  reproduce->add_option("--angle", ra.angle, "peg2d: initial tilt in degrees");
  reproduce->add_option("--max-time", ra.max_time, "Time budget in seconds");

  auto* inspect = app.add_subcommand("inspect", "Export plot data from a learn report");
  std::string report, what, channel = "translation";
  inspect->add_option("report", report, "Learn report JSON")->required();
  inspect->add_option("what", what, "rectangles, workseries or pca")->required();
  inspect->add_option("--channel", channel, "translation or rotation");

  auto* sweep = app.add_subcommand("sweep", "Replay from every scenario start in parallel");
  std::string sweep_scenario, sweep_primitive;
  unsigned threads = std::max(1u, std::thread::hardware_concurrency());
  sweep->add_option("scenario", sweep_scenario, "Scenario name or scenario JSON")->required();
  sweep->add_option("--primitive", sweep_primitive, "Use this primitive instead of learning from the scenario");
  sweep->add_option("--threads", threads, "Worker threads");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }
  if (seed_opt->count() > 0) g.seed = seed;

  try {
    if (*learn) return cmd_learn(g, demo_files);
    if (*simulate) return cmd_simulate(g, sa);
    if (*reproduce) return cmd_reproduce(g, ra);
    if (*inspect) return cmd_inspect(g, report, what, channel);
    if (*sweep) return cmd_sweep(g, sweep_scenario, sweep_primitive, threads);
  } catch (const Error& e) {
    return fail(is_input_error(e.code()) ? 2 : 3, e.what());
  } catch (const std::exception& e) {
    return fail(3, e.what());
  }
  return 2;
}
