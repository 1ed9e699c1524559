#pragma once

// Quasi-static motion under a commanded wrench: the body twist satisfies
// D u = w_cmd + sum_i G_i^T f_i with Coulomb contact forces f_i, found by
// blocked projected Gauss-Seidel.

#include "cmprim/sim/world.hpp"

#include <vector>

namespace cmprim::sim {

using Vec6 = Eigen::Matrix<double, 6, 1>;

struct Wrench {
  Vec3 force = Vec3::Zero();
  Vec3 torque = Vec3::Zero();
};

struct SolveResult {
  Vec3 v = Vec3::Zero();      // reference-point velocity, world
  Vec3 omega = Vec3::Zero();  // angular velocity, world
  Wrench contact;             // total environment wrench on the body, world, about the reference
  std::vector<Contact> contacts;
  std::vector<Vec3> forces;   // per-contact force, world
  int sweeps = 0;
};

/// Contact forces from the previous step, used to seed the next solve.
struct WarmStart {
  std::vector<Contact> contacts;
  std::vector<Vec3> local;  // (normal, t1, t2) components
};

namespace detail {

/// Contact-local 3x3 Coulomb problem: find f = (f_n, f_t1, f_t2) with
/// w = W f + b, f_n >= 0, w_n >= 0, f_n w_n = 0, |f_t| <= mu f_n and
/// f_t = -mu f_n w_t / |w_t| when sliding.
inline Vec3 solve_local(const Mat3& W, const Vec3& b, double mu) {
  if (b(0) >= 0.0) return Vec3::Zero();
  const Eigen::FullPivLU<Mat3> lu(W);
  if (lu.isInvertible()) {
    const Vec3 f = lu.solve(-b);
    if (f(0) >= 0.0 && std::hypot(f(1), f(2)) <= mu * f(0)) return f;
  }
  double fn = -b(0) / W(0, 0);
  const Vec2 w_t0 = W.block<2, 1>(1, 0) * fn + b.tail<2>();
  if (mu <= 0.0 || w_t0.norm() < 1e-15) return Vec3(fn, 0.0, 0.0);
  // Sliding: search the slip angle phi so that the tangential velocity points
  // along s = (cos phi, sin phi) with friction -mu f_n s.
  struct Eval {
    Vec3 f;
    double h, along;
    bool ok;
  };
  auto eval = [&](double phi) {
    const Vec2 sd(std::cos(phi), std::sin(phi));
    const Vec3 dir(1.0, -mu * sd.x(), -mu * sd.y());
    const double den = W.row(0).dot(dir);
    Eval e{Vec3::Zero(), 0.0, 0.0, den > 1e-15};
    if (!e.ok) return e;
    e.f = (-b(0) / den) * dir;
    const Vec2 wt = W.block<2, 3>(1, 0) * e.f + b.tail<2>();
    e.h = sd.x() * wt.y() - sd.y() * wt.x();
    e.along = sd.dot(wt);
    return e;
  };
  const Vec2 guess = w_t0.normalized();
  constexpr int kScan = 64;
  const double step = 2.0 * M_PI / kScan;
  Vec3 best = Vec3::Zero();
  double best_score = -INFINITY;
  Eval prev = eval(0.0);
  for (int k = 1; k <= kScan; ++k) {
    double lo = (k - 1) * step, hi = k * step;
    Eval e_hi = eval(hi);
    if (prev.ok && e_hi.ok && (prev.h <= 0.0) != (e_hi.h <= 0.0)) {
      Eval e_lo = prev;
      for (int it = 0; it < 50; ++it) {
        const double mid = 0.5 * (lo + hi);
        const Eval e_mid = eval(mid);
        if (!e_mid.ok) break;
        if ((e_lo.h <= 0.0) == (e_mid.h <= 0.0)) {
          lo = mid;
          e_lo = e_mid;
        } else {
          hi = mid;
        }
      }
      const double phi = 0.5 * (lo + hi);
      const Eval r = eval(phi);
      if (r.ok && r.along >= 0.0) {
        const double score = Vec2(std::cos(phi), std::sin(phi)).dot(guess);
        if (score > best_score) {
          best_score = score;
          best = r.f;
        }
      }
    }
    prev = e_hi;
  }
  if (best_score > -INFINITY) return best;
  return Vec3(fn, 0.0, 0.0);
}

}  // namespace detail

namespace detail {

/// Lemke's complementary pivoting for w = A z + q, w, z >= 0, w.z = 0.
/// Returns false on ray termination or when the pivot budget runs out.
inline bool lemke(const Eigen::MatrixXd& A, const Eigen::VectorXd& q, Eigen::VectorXd& z) {
  const Eigen::Index n = q.size();
  z = Eigen::VectorXd::Zero(n);
  Eigen::Index t = 0;
  if (n == 0 || q.minCoeff(&t) >= 0.0) return true;
  // Tableau [I, -A, -e, q]; variables 0..n-1 are w, n..2n-1 are z, 2n is z0.
  const Eigen::Index z0 = 2 * n, rhs = 2 * n + 1;
  Eigen::MatrixXd T(n, 2 * n + 2);
  T << Eigen::MatrixXd::Identity(n, n), -A, -Eigen::VectorXd::Ones(n), q;
  std::vector<Eigen::Index> basis(n);
  for (Eigen::Index i = 0; i < n; ++i) basis[i] = i;
  const double tol = 1e-12 * std::max(1.0, T.leftCols(rhs).cwiseAbs().maxCoeff());
  auto pivot = [&](Eigen::Index r, Eigen::Index col) {
    T.row(r) /= T(r, col);
    for (Eigen::Index i = 0; i < n; ++i)
      if (i != r && T(i, col) != 0.0) T.row(i) -= T(i, col) * T.row(r);
    const Eigen::Index out = basis[r];
    basis[r] = col;
    return out;
  };
  Eigen::Index leaving = pivot(t, z0);
  for (int it = 0; it < 50 * n + 50; ++it) {
    const Eigen::Index entering = leaving < n ? leaving + n : leaving - n;
    Eigen::Index r = -1;
    double best = INFINITY;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (T(i, entering) <= tol) continue;
      const double ratio = std::max(T(i, rhs), 0.0) / T(i, entering);
      // Prefer letting z0 leave on ties so the run terminates.
      if (ratio < best - 1e-14 || (ratio <= best + 1e-14 && basis[i] == z0)) {
        best = ratio;
        r = i;
      }
    }
    if (r < 0) return false;
    leaving = pivot(r, entering);
    if (leaving == z0) {
      for (Eigen::Index i = 0; i < n; ++i)
        if (basis[i] >= n && basis[i] < 2 * n) z(basis[i] - n) = std::max(T(i, rhs), 0.0);
      return true;
    }
  }
  return false;
}

/// Contact forces from the linear complementarity form of the quasi-static
/// problem with each friction cone replaced by a pyramid of `kDirs` faces.
/// `f` receives local (normal, t1, t2) forces.
inline bool solve_contacts_lcp(const std::vector<Eigen::Matrix<double, 3, 6>>& G, const Vec6& Mdiag, const Vec6& w,
                               const std::vector<Contact>& contacts, double dt, std::vector<Vec3>& f) {
  constexpr int kDirs = 16;
  const std::size_t m = contacts.size();
  std::vector<Vec6> cols;            // generalized direction of each force variable
  std::vector<Vec3> local;           // same, in contact coordinates
  std::vector<std::size_t> owner;    // contact of each force variable
  std::vector<double> bias;          // normal rows only
  std::vector<Eigen::Index> normal_var(m), first_dir(m, -1);
  std::vector<double> mu(m, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    normal_var[i] = static_cast<Eigen::Index>(cols.size());
    cols.push_back(G[i].row(0).transpose());
    local.emplace_back(1.0, 0.0, 0.0);
    owner.push_back(i);
    mu[i] = contacts[i].gap > 1e-7 ? 0.0 : contacts[i].mu;
  }
  for (std::size_t i = 0; i < m; ++i) {
    if (mu[i] <= 0.0) continue;
    first_dir[i] = static_cast<Eigen::Index>(cols.size());
    for (int k = 0; k < kDirs; ++k) {
      const double a = 2.0 * M_PI * k / kDirs;
      const Vec3 d(0.0, std::cos(a), std::sin(a));
      cols.push_back(G[i].transpose() * d);
      local.push_back(d);
      owner.push_back(i);
    }
  }
  const auto nf = static_cast<Eigen::Index>(cols.size());
  std::vector<std::size_t> fric;
  for (std::size_t i = 0; i < m; ++i)
    if (first_dir[i] >= 0) fric.push_back(i);
  const Eigen::Index n = nf + static_cast<Eigen::Index>(fric.size());
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n);
  Eigen::VectorXd q = Eigen::VectorXd::Zero(n);
  const Vec6 u0 = Mdiag.cwiseProduct(w);
  for (Eigen::Index r = 0; r < nf; ++r) {
    const Vec6 mr = Mdiag.cwiseProduct(cols[r]);
    for (Eigen::Index c = 0; c < nf; ++c) A(r, c) = cols[c].dot(mr);
    q(r) = cols[r].dot(u0);
  }
  for (std::size_t i = 0; i < m; ++i) q(normal_var[i]) += std::max(contacts[i].gap, 0.0) / dt;
  for (std::size_t k = 0; k < fric.size(); ++k) {
    const std::size_t i = fric[k];
    const Eigen::Index lam = nf + static_cast<Eigen::Index>(k);
    A(lam, normal_var[i]) = mu[i];
    for (int d = 0; d < kDirs; ++d) {
      A(lam, first_dir[i] + d) = -1.0;
      A(first_dir[i] + d, lam) = 1.0;
    }
  }
  Eigen::VectorXd z;
  if (!lemke(A, q, z)) return false;
  if (!z.allFinite()) return false;
  std::vector<Vec3> g(m, Vec3::Zero());
  for (Eigen::Index c = 0; c < nf; ++c) g[owner[c]] += z(c) * local[c];
  f = g;
  return true;
}

}  // namespace detail

inline SolveResult solve_quasi_static(const Environment& env, const Pose& pose, const Wrench& cmd, double dt,
                                      double margin, WarmStart* warm = nullptr) {
  SolveResult res;
  res.contacts = find_contacts(env, pose, margin);
  const std::size_t m = res.contacts.size();
  const double mf = 1.0 / env.damping_force, mo = 1.0 / env.damping_torque;
  Vec6 Mdiag;
  Mdiag << mf, mf, mf, mo, mo, mo;
  Vec6 w;
  w << cmd.force, cmd.torque;
  Vec6 u = Mdiag.cwiseProduct(w);

  std::vector<Eigen::Matrix<double, 3, 6>> G(m);
  std::vector<Mat3> frames(m);
  std::vector<Mat3> Wii(m);
  for (std::size_t i = 0; i < m; ++i) {
    const auto& c = res.contacts[i];
    const Vec3 r = c.point - pose.position;
    const Vec3 t1 = any_orthogonal(c.normal);
    const Vec3 t2 = c.normal.cross(t1);
    const Vec3 axes[3] = {c.normal, t1, t2};
    for (int k = 0; k < 3; ++k) {
      G[i].block<1, 3>(k, 0) = axes[k].transpose();
      G[i].block<1, 3>(k, 3) = r.cross(axes[k]).transpose();
      frames[i].col(k) = axes[k];
    }
    Wii[i] = G[i] * Mdiag.asDiagonal() * G[i].transpose();
  }
  std::vector<Vec3> f(m, Vec3::Zero());
  if (warm) {
    for (std::size_t i = 0; i < m; ++i) {
      const auto& c = res.contacts[i];
      for (std::size_t j = 0; j < warm->contacts.size(); ++j) {
        const auto& o = warm->contacts[j];
        if (o.kind == c.kind && o.env_index == c.env_index && o.body_index == c.body_index) {
          f[i] = warm->local[j];
          break;
        }
      }
      u += Mdiag.cwiseProduct(G[i].transpose() * f[i]);
    }
  }
  // Pivoting solves the problem with pyramid friction cones. Projected
  // Gauss-Seidel on the round cones then refines it, or does the whole job
  // (seeded from the previous step) when pivoting fails. Redundant contacts
  // can trade force without changing the motion, so convergence is judged on
  // the body twist.
  const std::vector<Vec3> f_warm = f;
  const bool direct = m > 0 && detail::solve_contacts_lcp(G, Mdiag, w, res.contacts, dt, f);
  const std::vector<Vec3> f_direct = f;
  if (direct) {
    u = Mdiag.cwiseProduct(w);
    for (std::size_t i = 0; i < m; ++i) u += Mdiag.cwiseProduct(G[i].transpose() * f[i]);
  } else {
    f = f_warm;
  }
  const double vtol = 1e-7 * std::max(1e-3, Mdiag.cwiseProduct(w).norm());
  const int max_sweeps = direct ? 4 : 1000;
  bool converged = m == 0;
  for (int sweep = 0; sweep < max_sweeps && m > 0; ++sweep) {
    const Vec6 u_prev = u;
    for (std::size_t i = 0; i < m; ++i) {
      const auto& c = res.contacts[i];
      Vec3 b = G[i] * (u - Mdiag.cwiseProduct(G[i].transpose() * f[i]));
      b(0) += std::max(c.gap, 0.0) / dt;
      // A contact that is not touching yet only blocks penetration.
      const double mu = c.gap > 1e-7 ? 0.0 : c.mu;
      const Vec3 fi = detail::solve_local(Wii[i], b, mu);
      const Vec3 df = fi - f[i];
      if (df.squaredNorm() > 0.0) {
        u += Mdiag.cwiseProduct(G[i].transpose() * df);
        f[i] = fi;
      }
    }
    res.sweeps = sweep + 1;
    if ((u - u_prev).norm() <= vtol) {
      converged = true;
      break;
    }
  }
  if (direct && !converged) f = f_direct;
  u = Mdiag.cwiseProduct(w);
  for (std::size_t i = 0; i < m; ++i) u += Mdiag.cwiseProduct(G[i].transpose() * f[i]);
  if (warm) {
    warm->contacts = res.contacts;
    warm->local = f;
  }
  res.v = u.head<3>();
  res.omega = u.tail<3>();
  res.forces.resize(m);
  for (std::size_t i = 0; i < m; ++i) {
    const Vec3 fw = frames[i] * f[i];
    res.forces[i] = fw;
    res.contact.force += fw;
    res.contact.torque += (res.contacts[i].point - pose.position).cross(fw);
  }
  return res;
}

/// Environment wrench on a body at rest in `pose` when `applied` acts on it.
/// Only touching features (gap below 1 nm) take part.
inline Wrench contact_wrench(const Pose& pose, const Wrench& applied, const Environment& env) {
  return solve_quasi_static(env, pose, applied, env.dt, 1e-9).contact;
}

namespace detail {

/// Smallest translation d with n_i . d >= c_i for all rows, by enumerating
/// active sets of up to three constraints. Returns false if none is found.
inline bool min_norm_translation(const std::vector<Vec3>& n, const std::vector<double>& c, Vec3& best) {
  const std::size_t m = n.size();
  auto feasible = [&](const Vec3& d) {
    for (std::size_t i = 0; i < m; ++i)
      if (n[i].dot(d) < c[i] - 1e-15) return false;
    return true;
  };
  bool found = false;
  double best_norm = INFINITY;
  auto consider = [&](const Vec3& d) {
    if (d.norm() < best_norm && feasible(d)) {
      best = d;
      best_norm = d.norm();
      found = true;
    }
  };
  consider(Vec3::Zero());
  std::vector<std::size_t> set;
  auto try_set = [&]() {
    const auto k = static_cast<Eigen::Index>(set.size());
    Eigen::MatrixXd N(k, 3);
    Eigen::VectorXd rhs(k);
    for (Eigen::Index a = 0; a < k; ++a) {
      N.row(a) = n[set[a]].transpose();
      rhs(a) = c[set[a]];
    }
    const Eigen::MatrixXd A = N * N.transpose();
    const Eigen::FullPivLU<Eigen::MatrixXd> lu(A);
    if (!lu.isInvertible()) return;
    const Eigen::VectorXd lambda = lu.solve(rhs);
    if ((lambda.array() < 0.0).any()) return;
    consider(Vec3(N.transpose() * lambda));
  };
  for (std::size_t i = 0; i < m; ++i) {
    set = {i};
    try_set();
    for (std::size_t j = i + 1; j < m; ++j) {
      set = {i, j};
      try_set();
      for (std::size_t k = j + 1; k < m; ++k) {
        set = {i, j, k};
        try_set();
      }
    }
  }
  return found;
}

}  // namespace detail

namespace detail {

/// Worst gap over contacts currently inside the margin.
inline double worst_gap(const Environment& env, const Pose& pose) {
  double worst = 0.0;
  for (const auto& c : find_contacts(env, pose, 0.0)) worst = std::min(worst, c.gap);
  return worst;
}

/// Small rigid correction (translation and rotation, weighted by the mobility)
/// that removes penetration at first order, by projected Gauss-Seidel on the
/// normal impulses.
inline void twist_correction(const Environment& env, Pose& pose) {
  const auto contacts = find_contacts(env, pose, 1e-6);
  const std::size_t m = contacts.size();
  if (m == 0) return;
  Vec6 Md;
  Md << Vec3::Constant(1.0 / env.damping_force), Vec3::Constant(1.0 / env.damping_torque);
  std::vector<Vec6> g(m);
  Eigen::VectorXd target(m);
  for (std::size_t i = 0; i < m; ++i) {
    const auto& c = contacts[i];
    g[i] << c.normal, (c.point - pose.position).cross(c.normal);
    target(i) = std::max(-c.gap, 0.0) + (c.gap < 0.0 ? 1e-12 : 0.0);
  }
  Eigen::VectorXd lambda = Eigen::VectorXd::Zero(m);
  Vec6 d = Vec6::Zero();
  for (int sweep = 0; sweep < 500; ++sweep) {
    double change = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      const double a = g[i].dot(Md.cwiseProduct(g[i]));
      if (a <= 0.0) continue;
      const double l = std::max(0.0, lambda(i) + (target(i) - g[i].dot(d)) / a);
      const double dl = l - lambda(i);
      if (dl != 0.0) {
        d += Md.cwiseProduct(g[i]) * dl;
        lambda(i) = l;
        change = std::max(change, std::abs(dl) * std::sqrt(a));
      }
    }
    if (change < 1e-14) break;
  }
  pose.position += d.head<3>();
  pose.orientation = (rotation_exp(d.tail<3>()) * pose.orientation).normalized();
}

}  // namespace detail

/// Pushes the body out of any penetration, preferring the smallest pure
/// translation and falling back to a small rigid correction with rotation
/// when no translation clears every contact. Returns the remaining worst
/// penetration (<= 0 is clean).
inline double project_out(const Environment& env, Pose& pose, int max_iter = 20) {
  const Pose start = pose;
  for (int it = 0; it < max_iter; ++it) {
    const auto contacts = find_contacts(env, pose, 1e-6);
    double worst = 0.0;
    for (const auto& c : contacts) worst = std::min(worst, c.gap);
    if (worst >= -1e-10) return detail::worst_gap(env, pose);
    std::vector<Vec3> n;
    std::vector<double> req;
    for (const auto& c : contacts) {
      n.push_back(c.normal);
      req.push_back(std::max(-c.gap, 0.0) + (c.gap < 0.0 ? 1e-13 : 0.0));
    }
    Vec3 d;
    if (!detail::min_norm_translation(n, req, d)) break;
    // Nearly opposed normals (a wedged body) would need a large slide.
    if (d.norm() > 4.0 * -worst + 1e-9) break;
    pose.position += d;
  }
  if (detail::worst_gap(env, pose) >= -1e-10) return detail::worst_gap(env, pose);
  pose = start;
  for (int it = 0; it < max_iter && detail::worst_gap(env, pose) < -1e-10; ++it) detail::twist_correction(env, pose);
  return detail::worst_gap(env, pose);
}

struct StepOutcome {
  Pose pose;
  SolveResult solve;
};

/// One quasi-static integration step. Rotation is integrated in the world
/// frame, B <- exp(omega dt) B. A step that leaves unresolvable penetration is
/// retried with smaller dt.
inline StepOutcome integrate(const Environment& env, const Pose& pose, const Wrench& cmd, double dt,
                             WarmStart* warm = nullptr) {
  StepOutcome out;
  double h = dt;
  const WarmStart seed = warm ? *warm : WarmStart{};
  for (int attempt = 0; attempt < 6; ++attempt, h *= 0.5) {
    if (warm) *warm = seed;
    out.solve = solve_quasi_static(env, pose, cmd, h, env.margin, warm);
    Pose next;
    next.position = pose.position + out.solve.v * h;
    next.orientation = (rotation_exp(out.solve.omega * h) * pose.orientation).normalized();
    if (project_out(env, next) >= -1e-9) {
      out.pose = next;
      return out;
    }
  }
  // Give up on the rotation part for this step.
  Pose next = pose;
  next.position += out.solve.v * h;
  project_out(env, next);
  out.pose = next;
  return out;
}

}  // namespace cmprim::sim
