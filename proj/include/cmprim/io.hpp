#pragma once

// JSON and CSV formats for demonstrations, configs, primitives, learn
// reports, scenarios and reproduction trajectories.

#include "cmprim/core.hpp"
#include "cmprim/pipeline.hpp"
#include "cmprim/sim/controller.hpp"
#include "cmprim/sim/scenarios.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdint>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace cmprim::io {

using json = nlohmann::json;

// ------------------------------------------------------------ primitives

inline json to_json(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }
inline json to_json(const Vec2& v) { return json::array({v.x(), v.y()}); }
inline json quat_json(const Quat& q) { return json::array({q.w(), q.x(), q.y(), q.z()}); }

inline json to_json(const Mat3& m) {
  json rows = json::array();
  for (int r = 0; r < 3; ++r) rows.push_back(json::array({m(r, 0), m(r, 1), m(r, 2)}));
  return rows;
}

inline json opt_json(const std::optional<Vec3>& v) { return v ? to_json(*v) : json(nullptr); }
inline json opt_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

/// Non-finite numbers have no JSON spelling; they are written as null.
inline json num_json(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

namespace detail {

[[noreturn]] inline void parse_fail(const std::string& what) { throw Error(ErrorCode::Parse, what); }

inline double num(const json& j, const char* what) {
  if (!j.is_number()) parse_fail(std::string(what) + " must be a number");
  return j.get<double>();
}

template <int N>
Eigen::Matrix<double, N, 1> vec(const json& j, const char* what) {
  if (!j.is_array() || j.size() != N) parse_fail(std::string(what) + " must be an array of " + std::to_string(N));
  Eigen::Matrix<double, N, 1> v;
  for (int i = 0; i < N; ++i) v(i) = num(j[i], what);
  return v;
}

inline Vec3 vec3(const json& j, const char* what) { return vec<3>(j, what); }

inline std::optional<Vec3> opt_vec3(const json& obj, const char* key) {
  if (!obj.contains(key) || obj.at(key).is_null()) return std::nullopt;
  return vec3(obj.at(key), key);
}

inline std::optional<double> opt_num(const json& obj, const char* key) {
  if (!obj.contains(key) || obj.at(key).is_null()) return std::nullopt;
  return num(obj.at(key), key);
}

inline Quat quat(const json& j, const char* what) {
  const auto v = vec<4>(j, what);
  return Quat(v(0), v(1), v(2), v(3));
}

inline Mat3 mat3(const json& j, const char* what) {
  if (!j.is_array() || j.size() != 3) parse_fail(std::string(what) + " must be a 3x3 array");
  Mat3 m;
  for (int r = 0; r < 3; ++r) m.row(r) = vec3(j[r], what).transpose();
  return m;
}

inline const json& field(const json& obj, const char* key) {
  if (!obj.is_object()) parse_fail(std::string("expected an object holding '") + key + "'");
  if (!obj.contains(key)) parse_fail(std::string("missing field '") + key + "'");
  return obj.at(key);
}

inline std::string str(const json& obj, const char* key) {
  const auto& j = field(obj, key);
  if (!j.is_string()) parse_fail(std::string(key) + " must be a string");
  return j.get<std::string>();
}

/// Converts library exceptions raised while reading into Parse errors.
template <typename F>
auto guarded(F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const Error&) {
    throw;
  } catch (const std::exception& e) {
    parse_fail(e.what());
  }
}

}  // namespace detail

inline std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Parse, "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::InvalidConfig, "cannot write '" + path + "'");
  out << text;
  if (!out) throw Error(ErrorCode::InvalidConfig, "write to '" + path + "' failed");
}

inline json parse_json(const std::string& text) {
  return detail::guarded([&] { return json::parse(text); });
}

inline json read_json(const std::string& path) { return parse_json(read_text(path)); }

inline bool ends_with(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

// ------------------------------------------------------------------ pose

inline json to_json(const Pose& p) { return {{"p", to_json(p.position)}, {"q", quat_json(p.orientation)}}; }

inline Pose pose_from_json(const json& j) {
  Pose p{detail::vec3(detail::field(j, "p"), "p"), detail::quat(detail::field(j, "q"), "q")};
  if (!p.valid()) detail::parse_fail("pose is not finite or its quaternion is not unit");
  return p;
}

// --------------------------------------------------------- demonstration

inline json to_json(const Demonstration& d, std::optional<std::uint64_t> seed = std::nullopt) {
  json samples = json::array();
  for (const auto& s : d.samples)
    samples.push_back({{"t", s.t},
                       {"p", to_json(s.pose.position)},
                       {"q", quat_json(s.pose.orientation)},
                       {"f", to_json(s.force)},
                       {"tq", to_json(s.torque)}});
  json j{{"id", d.id}, {"frame", to_string(d.frame)}, {"samples", samples}};
  if (seed) j["seed"] = *seed;
  return j;
}

/// Parses and validates a demonstration object.
inline Demonstration demo_from_json(const json& j) {
  Demonstration d = detail::guarded([&] {
    Demonstration d;
    d.id = j.contains("id") ? detail::str(j, "id") : "demo";
    d.frame = j.contains("frame") ? frame_from_string(detail::str(j, "frame")) : Frame::Tool;
    const auto& arr = detail::field(j, "samples");
    if (!arr.is_array()) detail::parse_fail("samples must be an array");
    for (const auto& s : arr) {
      WrenchSample w;
      w.t = detail::num(detail::field(s, "t"), "t");
      w.pose.position = detail::vec3(detail::field(s, "p"), "p");
      w.pose.orientation = detail::quat(detail::field(s, "q"), "q");
      w.force = detail::vec3(detail::field(s, "f"), "f");
      w.torque = detail::vec3(detail::field(s, "tq"), "tq");
      d.samples.push_back(w);
    }
    return d;
  });
  validate_demonstration(d);
  return d;
}

inline constexpr const char* kDemoCsvHeader = "t,px,py,pz,qw,qx,qy,qz,fx,fy,fz,tx,ty,tz";

namespace detail {

inline std::string fmt(double x) {
  std::ostringstream ss;
  ss.precision(17);
  ss << x;
  return ss.str();
}

inline std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream ss(line);
  while (std::getline(ss, cur, sep)) out.push_back(cur);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

inline std::string trim(std::string s) {
  while (!s.empty() && (s.back() == '\r' || s.back() == ' ')) s.pop_back();
  std::size_t i = 0;
  while (i < s.size() && s[i] == ' ') ++i;
  return s.substr(i);
}

inline double to_double(const std::string& s, std::size_t line) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (trim(s.substr(used)).empty()) return v;
  } catch (const std::exception&) {
  }
  throw Error(ErrorCode::Parse, "line " + std::to_string(line) + ": '" + s + "' is not a number");
}

}  // namespace detail

/// CSV variant: optional `# key=value` lines (id, frame, seed), the column
/// header, then one row per sample.
inline std::string demo_to_csv(const Demonstration& d, std::optional<std::uint64_t> seed = std::nullopt) {
  std::ostringstream out;
  if (seed) out << "# seed=" << *seed << "\n";
  out << "# id=" << d.id << "\n# frame=" << to_string(d.frame) << "\n" << kDemoCsvHeader << "\n";
  for (const auto& s : d.samples) {
    const auto& p = s.pose.position;
    const auto& q = s.pose.orientation;
    const double row[] = {s.t,         p.x(),       p.y(),       p.z(),        q.w(),        q.x(),        q.y(),
                          q.z(),       s.force.x(), s.force.y(), s.force.z(),  s.torque.x(), s.torque.y(), s.torque.z()};
    for (std::size_t i = 0; i < 14; ++i) out << (i ? "," : "") << detail::fmt(row[i]);
    out << "\n";
  }
  return out.str();
}

inline Demonstration demo_from_csv(const std::string& text, const std::string& default_id = "demo") {
  Demonstration d;
  d.id = default_id;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  bool header = false;
  while (std::getline(in, line)) {
    ++lineno;
    line = detail::trim(line);
    if (line.empty()) continue;
    if (line[0] == '#') {
      const auto eq = line.find('=');
      if (eq == std::string::npos) continue;
      const std::string key = detail::trim(line.substr(1, eq - 1)), value = detail::trim(line.substr(eq + 1));
      if (key == "id") d.id = value;
      if (key == "frame") d.frame = frame_from_string(value);
      continue;
    }
    if (!header) {
      if (line != kDemoCsvHeader) throw Error(ErrorCode::Parse, "expected header '" + std::string(kDemoCsvHeader) + "'");
      header = true;
      continue;
    }
    const auto cells = detail::split(line, ',');
    if (cells.size() != 14) throw Error(ErrorCode::Parse, "line " + std::to_string(lineno) + ": expected 14 columns");
    double v[14];
    for (std::size_t i = 0; i < 14; ++i) v[i] = detail::to_double(cells[i], lineno);
    WrenchSample s;
    s.t = v[0];
    s.pose.position = Vec3(v[1], v[2], v[3]);
    s.pose.orientation = Quat(v[4], v[5], v[6], v[7]);
    s.force = Vec3(v[8], v[9], v[10]);
    s.torque = Vec3(v[11], v[12], v[13]);
    d.samples.push_back(s);
  }
  if (!header) throw Error(ErrorCode::Parse, "missing CSV header");
  validate_demonstration(d);
  return d;
}

/// Reads a demonstration; `.csv` files use the CSV variant, anything else JSON.
inline Demonstration read_demo(const std::string& path) {
  const std::string text = read_text(path);
  if (ends_with(path, ".csv")) return demo_from_csv(text);
  return demo_from_json(parse_json(text));
}

inline void write_demo(const std::string& path, const Demonstration& d, std::optional<std::uint64_t> seed = std::nullopt) {
  write_text(path, ends_with(path, ".csv") ? demo_to_csv(d, seed) : to_json(d, seed).dump(1) + "\n");
}

// ---------------------------------------------------------------- config

inline json to_json(const LearnerConfig& c) {
  return {{"eta_deg", c.eta_deg},
          {"xi_deg", c.xi_deg},
          {"window", c.window},
          {"sigma_work", c.sigma_work},
          {"zeta", c.zeta},
          {"grid_res", c.grid_res},
          {"motion_floor_trans", c.motion_floor_trans},
          {"motion_floor_rot", c.motion_floor_rot},
          {"wrench_floor_force", c.wrench_floor_force},
          {"wrench_floor_torque", c.wrench_floor_torque},
          {"sigma_demo", c.sigma_demo},
          {"stiffness_trans", c.stiffness_trans},
          {"stiffness_rot", c.stiffness_rot},
          {"speed_nu", c.speed_nu},
          {"speed_lambda", c.speed_lambda}};
}

/// Applies the keys present in `j` on top of `base`; unknown keys are errors.
inline LearnerConfig config_from_json(const json& j, LearnerConfig base = {}) {
  if (!j.is_object()) detail::parse_fail("config must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (key == "window") {
      if (!value.is_number_integer()) detail::parse_fail("window must be an integer");
      base.window = value.get<int>();
      continue;
    }
    double* slot = nullptr;
    if (key == "eta_deg") slot = &base.eta_deg;
    if (key == "xi_deg") slot = &base.xi_deg;
    if (key == "sigma_work") slot = &base.sigma_work;
    if (key == "zeta") slot = &base.zeta;
    if (key == "grid_res") slot = &base.grid_res;
    if (key == "motion_floor_trans") slot = &base.motion_floor_trans;
    if (key == "motion_floor_rot") slot = &base.motion_floor_rot;
    if (key == "wrench_floor_force") slot = &base.wrench_floor_force;
    if (key == "wrench_floor_torque") slot = &base.wrench_floor_torque;
    if (key == "sigma_demo") slot = &base.sigma_demo;
    if (key == "stiffness_trans") slot = &base.stiffness_trans;
    if (key == "stiffness_rot") slot = &base.stiffness_rot;
    if (key == "speed_nu") slot = &base.speed_nu;
    if (key == "speed_lambda") slot = &base.speed_lambda;
    if (!slot) detail::parse_fail("unknown config key '" + key + "'");
    *slot = detail::num(value, key.c_str());
  }
  base.validate();
  return base;
}

// ------------------------------------------------------------- primitive

inline json to_json(const CompliantPrimitive& p) {
  return {{"v_d", opt_json(p.v_d)},
          {"w_d", opt_json(p.w_d)},
          {"K_f", to_json(p.K_f)},
          {"K_o", to_json(p.K_o)},
          {"pitch", opt_json(p.pitch)},
          {"nu", p.nu},
          {"lambda", p.lambda},
          {"trans_3dof_compliant", p.trans_3dof_compliant},
          {"rot_3dof_compliant", p.rot_3dof_compliant},
          {"frame", to_string(p.frame)}};
}

/// Primitive file: the primitive plus the learner settings it was built with
/// and the ids of the demonstrations it came from.
inline json primitive_file_json(const CompliantPrimitive& p, const LearnerConfig& cfg,
                                const std::vector<std::string>& demo_ids,
                                std::optional<std::uint64_t> seed = std::nullopt) {
  json j = to_json(p);
  j["config"] = to_json(cfg);
  j["demo_ids"] = demo_ids;
  if (seed) j["seed"] = *seed;
  return j;
}

struct PrimitiveFile {
  CompliantPrimitive primitive;
  LearnerConfig config;
  std::vector<std::string> demo_ids;
};

namespace detail {

inline bool flag(const json& obj, const char* key) {
  const auto& j = field(obj, key);
  if (!j.is_boolean()) parse_fail(std::string(key) + " must be a boolean");
  return j.get<bool>();
}

}  // namespace detail

/// Accepts a primitive file or a learn report (reads its "primitive" member).
/// The stiffness invariants are checked against the stored config.
inline PrimitiveFile primitive_from_json(const json& root) {
  return detail::guarded([&] {
    const json& j = root.is_object() && root.contains("primitive") ? root.at("primitive") : root;
    const json& cfg_src = root.is_object() && root.contains("config") ? root.at("config")
                          : j.is_object() && j.contains("config")   ? j.at("config")
                                                                    : json::object();
    PrimitiveFile f;
    f.config = config_from_json(cfg_src);
    CompliantPrimitive& p = f.primitive;
    p.v_d = detail::opt_vec3(j, "v_d");
    p.w_d = detail::opt_vec3(j, "w_d");
    p.K_f = detail::mat3(detail::field(j, "K_f"), "K_f");
    p.K_o = detail::mat3(detail::field(j, "K_o"), "K_o");
    p.pitch = detail::opt_num(j, "pitch");
    p.nu = detail::num(detail::field(j, "nu"), "nu");
    p.lambda = detail::num(detail::field(j, "lambda"), "lambda");
    p.trans_3dof_compliant = detail::flag(j, "trans_3dof_compliant");
    p.rot_3dof_compliant = detail::flag(j, "rot_3dof_compliant");
    p.frame = j.contains("frame") ? frame_from_string(detail::str(j, "frame")) : Frame::Tool;
    const json& ids = root.contains("demo_ids") ? root.at("demo_ids") : j.value("demo_ids", json::array());
    for (const auto& id : ids) f.demo_ids.push_back(id.get<std::string>());
    p.check(f.config.stiffness_trans, f.config.stiffness_rot);
    return f;
  });
}

inline PrimitiveFile read_primitive(const std::string& path) { return primitive_from_json(read_json(path)); }

// ---------------------------------------------------------------- report

inline json to_json(const ChannelReport& ch) {
  json j{{"motion_steps", ch.motion_steps},
         {"work",
          {{"per_step_work", ch.work.per_step_work},
           {"w_env", ch.work.w_env},
           {"w_tot", ch.work.w_tot},
           {"ratio", ch.work.ratio},
           {"no_work", ch.work.no_work}}},
         {"three_dof", ch.three_dof}};
  json means = json::array();
  for (const auto& m : ch.demo_means) means.push_back(to_json(m));
  j["demo_means"] = means;
  if (ch.direction) {
    const auto& d = *ch.direction;
    json rects = json::array();
    for (const auto& r : d.rectangles) {
      json corners = json::array();
      for (const auto& c : r.corners) corners.push_back(to_json(c));
      rects.push_back({{"step", r.step_index}, {"degenerate", r.degenerate}, {"corners", corners}});
    }
    json inter = json::array();
    for (const auto& c : d.intersection) inter.push_back(to_json(c));
    j["direction"] = {{"direction", opt_json(d.direction)},
                      {"inlier_ratio", d.inlier_ratio},
                      {"n_rectangles", d.n_rectangles},
                      {"n_inliers", d.n_inliers},
                      {"n_degenerate", d.n_degenerate},
                      {"n_contrary", d.n_contrary},
                      {"free_space", d.free_space},
                      {"center", to_json(d.center)},
                      {"chebyshev_radius", d.chebyshev_radius},
                      {"vote", {{"cell", to_json(d.vote.cell)}, {"count", d.vote.count}}},
                      {"align", to_json(d.align)},
                      {"rectangles", rects},
                      {"inliers", d.inliers},
                      {"intersection", inter}};
  } else {
    j["direction"] = nullptr;
  }
  if (ch.compliance) {
    const auto& c = *ch.compliance;
    json axes = json::array(), inputs = json::array(), res = json::array(), bic = json::array();
    for (const auto& a : c.axes) axes.push_back(to_json(a));
    for (const auto& a : c.inputs) inputs.push_back(to_json(a));
    for (const auto& a : c.residuals) res.push_back(to_json(a));
    for (double b : c.bic) bic.push_back(num_json(b));
    j["compliance"] = {{"n_axes", c.n_axes},
                       {"axes", axes},
                       {"bic", bic},
                       {"inputs", inputs},
                       {"residuals", res},
                       {"single_demo", c.single_demo},
                       {"pca", {{"eigenvalues", to_json(c.pca.eigenvalues)}, {"eigenvectors", to_json(c.pca.eigenvectors)}}}};
  } else {
    j["compliance"] = nullptr;
  }
  return j;
}

inline json to_json(const LearnReport& r, std::optional<std::uint64_t> seed = std::nullopt) {
  json j{{"primitive", to_json(r.primitive)},
         {"config", to_json(r.config)},
         {"demo_ids", r.demo_ids},
         {"steps_per_demo", r.steps_per_demo},
         {"warnings", r.warnings},
         {"translation", to_json(r.channel(Channel::Translation))},
         {"rotation", to_json(r.channel(Channel::Rotation))}};
  if (seed) j["seed"] = *seed;
  return j;
}

// ----------------------------------------------------------- environment

namespace detail {

inline json halfspaces_json(const std::vector<sim::HalfSpace>& hs) {
  json a = json::array();
  for (const auto& h : hs) a.push_back({{"p", to_json(h.p)}, {"n", to_json(h.n)}});
  return a;
}

inline std::vector<sim::HalfSpace> halfspaces(const json& obj, const char* key) {
  std::vector<sim::HalfSpace> out;
  if (!obj.contains(key)) return out;
  for (const auto& h : obj.at(key)) out.push_back({vec3(field(h, "p"), "p"), vec3(field(h, "n"), "n")});
  return out;
}

}  // namespace detail

inline json to_json(const sim::Environment& env) {
  json facets = json::array(), edges = json::array(), probes = json::array(), faces = json::array();
  for (const auto& f : env.facets)
    facets.push_back({{"name", f.name},
                      {"p", to_json(f.p)},
                      {"n", to_json(f.n)},
                      {"mu", f.mu},
                      {"limits", detail::halfspaces_json(f.limits)}});
  for (const auto& e : env.edges)
    edges.push_back({{"name", e.name}, {"p", to_json(e.p)}, {"dir", opt_json(e.dir)}, {"mu", e.mu}});
  for (const auto& p : env.probes) probes.push_back({{"p", to_json(p.p)}, {"radius", p.radius}});
  for (const auto& b : env.faces)
    faces.push_back({{"p", to_json(b.p)}, {"n", to_json(b.n)}, {"extent", detail::halfspaces_json(b.extent)}});
  const auto& g = env.goal;
  return {{"name", env.name},
          {"facets", facets},
          {"edges", edges},
          {"probes", probes},
          {"faces", faces},
          {"goal",
           {{"pose", to_json(g.pose)},
            {"tol_pos", g.tol_pos},
            {"tol_rot", opt_json(g.tol_rot)},
            {"free_axes", g.free_axes},
            {"rot_axis", opt_json(g.rot_axis)}}},
          {"bounds", {{"lo", to_json(env.bounds.lo)}, {"hi", to_json(env.bounds.hi)}}},
          {"damping_force", env.damping_force},
          {"damping_torque", env.damping_torque},
          {"dt", env.dt},
          {"margin", env.margin}};
}

/// Missing optional members keep their defaults; the result is validated.
inline sim::Environment environment_from_json(const json& j) {
  sim::Environment env = detail::guarded([&] {
    using namespace detail;
    sim::Environment env;
    env.name = j.value("name", std::string("custom"));
    for (const auto& f : field(j, "facets"))
      env.facets.push_back({vec3(field(f, "p"), "p"), vec3(field(f, "n"), "n"), num(field(f, "mu"), "mu"),
                            halfspaces(f, "limits"), f.value("name", std::string())});
    if (j.contains("edges"))
      for (const auto& e : j.at("edges"))
        env.edges.push_back({vec3(field(e, "p"), "p"), opt_vec3(e, "dir"), num(field(e, "mu"), "mu"),
                             e.value("name", std::string())});
    if (j.contains("probes"))
      for (const auto& p : j.at("probes"))
        env.probes.push_back({vec3(field(p, "p"), "p"), p.contains("radius") ? num(p.at("radius"), "radius") : 0.0});
    if (j.contains("faces"))
      for (const auto& b : j.at("faces"))
        env.faces.push_back({vec3(field(b, "p"), "p"), vec3(field(b, "n"), "n"), halfspaces(b, "extent")});
    const auto& g = field(j, "goal");
    env.goal.pose = pose_from_json(field(g, "pose"));
    env.goal.tol_pos = num(field(g, "tol_pos"), "tol_pos");
    env.goal.tol_rot = opt_num(g, "tol_rot");
    if (g.contains("free_axes")) env.goal.free_axes = g.at("free_axes").get<std::array<bool, 3>>();
    env.goal.rot_axis = opt_vec3(g, "rot_axis");
    const auto& b = field(j, "bounds");
    env.bounds = {vec3(field(b, "lo"), "lo"), vec3(field(b, "hi"), "hi")};
    if (j.contains("damping_force")) env.damping_force = num(j.at("damping_force"), "damping_force");
    if (j.contains("damping_torque")) env.damping_torque = num(j.at("damping_torque"), "damping_torque");
    if (j.contains("dt")) env.dt = num(j.at("dt"), "dt");
    if (j.contains("margin")) env.margin = num(j.at("margin"), "margin");
    return env;
  });
  env.validate();
  return env;
}

// --------------------------------------------------------------- teacher

inline json to_json(const sim::TeacherSpec& t) {
  return {{"id", t.id},
          {"start", to_json(t.start)},
          {"force_dir", to_json(t.force_dir)},
          {"force", t.force},
          {"force_frame", to_string(t.force_frame)},
          {"torque_dir", to_json(t.torque_dir)},
          {"torque", t.torque},
          {"torque_frame", to_string(t.torque_frame)},
          {"align_gain", t.align_gain},
          {"align_max", num_json(t.align_max)},
          {"dir_noise_deg", t.dir_noise_deg},
          {"noise_tau", t.noise_tau},
          {"torque_jitter", t.torque_jitter},
          {"jitter_axes", to_json(t.jitter_axes)},
          {"sensor_noise_force", t.sensor_noise_force},
          {"sensor_noise_torque", t.sensor_noise_torque},
          {"duration", t.duration},
          {"rate", t.rate},
          {"record_frame", to_string(t.record_frame)},
          {"stop_at_goal", t.stop_at_goal},
          {"stuck_time", t.stuck_time},
          {"seed", t.seed}};
}

inline sim::TeacherSpec teacher_from_json(const json& j) {
  return detail::guarded([&] {
    using namespace detail;
    sim::TeacherSpec t;
    t.id = j.value("id", t.id);
    t.start = pose_from_json(field(j, "start"));
    auto number = [&](const char* key, double& slot) {
      if (j.contains(key)) slot = num(j.at(key), key);
    };
    auto vector = [&](const char* key, Vec3& slot) {
      if (j.contains(key)) slot = vec3(j.at(key), key);
    };
    auto frame = [&](const char* key, Frame& slot) {
      if (j.contains(key)) slot = frame_from_string(str(j, key));
    };
    vector("force_dir", t.force_dir);
    number("force", t.force);
    frame("force_frame", t.force_frame);
    vector("torque_dir", t.torque_dir);
    number("torque", t.torque);
    frame("torque_frame", t.torque_frame);
    number("align_gain", t.align_gain);
    if (j.contains("align_max")) t.align_max = j.at("align_max").is_null() ? INFINITY : num(j.at("align_max"), "align_max");
    number("dir_noise_deg", t.dir_noise_deg);
    number("noise_tau", t.noise_tau);
    number("torque_jitter", t.torque_jitter);
    vector("jitter_axes", t.jitter_axes);
    number("sensor_noise_force", t.sensor_noise_force);
    number("sensor_noise_torque", t.sensor_noise_torque);
    number("duration", t.duration);
    number("rate", t.rate);
    frame("record_frame", t.record_frame);
    if (j.contains("stop_at_goal")) t.stop_at_goal = flag(j, "stop_at_goal");
    number("stuck_time", t.stuck_time);
    if (j.contains("seed")) t.seed = j.at("seed").get<std::uint64_t>();
    return t;
  });
}

// -------------------------------------------------------------- scenario

inline json to_json(const sim::Scenario& sc) {
  json teachers = json::array(), starts = json::array();
  for (const auto& t : sc.teachers) teachers.push_back(to_json(t));
  for (const auto& s : sc.starts) starts.push_back(to_json(s));
  return {{"environment", to_json(sc.env)},
          {"teachers", teachers},
          {"starts", starts},
          {"max_time", sc.max_time},
          {"learner", to_json(sc.learner)}};
}

inline sim::Scenario scenario_from_json(const json& j) {
  return detail::guarded([&] {
    sim::Scenario sc;
    sc.env = environment_from_json(detail::field(j, "environment"));
    if (j.contains("teachers"))
      for (const auto& t : j.at("teachers")) sc.teachers.push_back(teacher_from_json(t));
    if (j.contains("starts"))
      for (const auto& s : j.at("starts")) sc.starts.push_back(pose_from_json(s));
    if (j.contains("max_time")) sc.max_time = detail::num(j.at("max_time"), "max_time");
    if (j.contains("learner")) sc.learner = config_from_json(j.at("learner"));
    return sc;
  });
}

// ------------------------------------------------------------ trajectory

inline constexpr const char* kTrajectoryCsvHeader = "t,px,py,pz,qw,qx,qy,qz,fx,fy,fz,tx,ty,tz,success";

/// One row per recorded sample; `success` marks rows inside the goal region.
inline std::string trajectory_to_csv(const sim::ReproduceResult& r, const sim::Goal& goal,
                                     std::optional<std::uint64_t> seed = std::nullopt) {
  std::ostringstream out;
  if (seed) out << "# seed=" << *seed << "\n";
  out << kTrajectoryCsvHeader << "\n";
  for (const auto& s : r.trajectory) {
    const auto& p = s.pose.position;
    const auto& q = s.pose.orientation;
    const auto& f = s.measured.force;
    const auto& t = s.measured.torque;
    const double row[] = {s.t, p.x(), p.y(), p.z(), q.w(), q.x(), q.y(), q.z(), f.x(), f.y(), f.z(), t.x(), t.y(), t.z()};
    for (std::size_t i = 0; i < 14; ++i) out << (i ? "," : "") << detail::fmt(row[i]);
    out << "," << (goal.reached(s.pose) ? 1 : 0) << "\n";
  }
  return out.str();
}

}  // namespace cmprim::io
