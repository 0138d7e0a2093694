#include "ocpcert/second_order.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <stdexcept>

namespace ocpcert {

std::string to_string(ConeKind kind) {
  switch (kind) {
    case ConeKind::PS2: return "PS2";
    case ConeKind::Phat2: return "Phat2";
    case ConeKind::Pstar2: return "Pstar2";
  }
  return "?";
}

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::Pass: return "PASS";
    case Verdict::Fail: return "FAIL";
    case Verdict::Vacuous: return "VACUOUS";
    case Verdict::NotCertified: return "NOT_CERTIFIED";
  }
  return "?";
}

namespace {

struct FracData {
  Vec x, xdot, f1, E;
  Mat A;
};

FracData frac_data(const ProblemSpec& spec, double u, const Vec& x) {
  FracData d;
  d.x = x;
  d.A = dynamics_jacobian(spec, u, x);
  d.f1 = spec.f1(x);
  d.xdot = eval_dynamics(spec, u, x);
  d.E = d.A * d.f1 - spec.f1.jacobian(x) * d.xdot;
  return d;
}

/// One RK4 step of w' = A w + c(tau) F over [0, theta h], w(0) = 0.
Vec forced(const FracData& dm, const FracData& d1, const Vec& F0, const Vec& Fm,
           const Vec& F1, double c0, double cm, double c1, double L) {
  const Vec k1 = c0 * F0;
  const Vec k2 = dm.A * (0.5 * L * k1) + cm * Fm;
  const Vec k3 = dm.A * (0.5 * L * k2) + cm * Fm;
  const Vec k4 = d1.A * (L * k3) + c1 * F1;
  return (L / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

StepMap make_step(const FracData& d0, const FracData& dm, const FracData& d1, double theta, double h) {
  const double L = theta * h;
  const int n = static_cast<int>(d0.x.size());
  const Mat I = Mat::Identity(n, n);
  const Mat K1 = d0.A;
  const Mat K2 = dm.A * (I + 0.5 * L * K1);
  const Mat K3 = dm.A * (I + 0.5 * L * K2);
  const Mat K4 = d1.A * (I + L * K3);
  StepMap s;
  s.S = I + (L / 6.0) * (K1 + 2.0 * K2 + 2.0 * K3 + K4);
  // y(tau) = y_k (1 - tau) + y_{k+1} tau, tau in units of h
  s.aE = forced(dm, d1, d0.E, dm.E, d1.E, 1.0, 1.0 - 0.5 * theta, 1.0 - theta, L);
  s.bE = forced(dm, d1, d0.E, dm.E, d1.E, 0.0, 0.5 * theta, theta, L);
  s.af = forced(dm, d1, d0.f1, dm.f1, d1.f1, 1.0, 1.0 - 0.5 * theta, 1.0 - theta, L);
  s.bf = forced(dm, d1, d0.f1, dm.f1, d1.f1, 0.0, 0.5 * theta, theta, L);
  return s;
}

}  // namespace

LinearizedSystem::LinearizedSystem(const ProblemSpec& spec, const Trajectory& traj)
    : dense_(spec, traj), idx_(index_arcs(traj)) {
  const int N = traj.intervals();
  iv_.resize(N);
  on_c_.resize(N);
  A_.resize(N + 1);
  E_.resize(N + 1);
  f1_.resize(N + 1);
  for (int k = 0; k < N; ++k) {
    on_c_[k] = traj.arcs[idx_.interval_arc[k]].kind == ArcKind::C;
    const double u = traj.u[k];
    const double h = traj.grid.step(k);
    std::array<FracData, kNumFrac> d;
    for (int f = 0; f < kNumFrac; ++f) d[f] = frac_data(spec, u, dense_.x(k, f));
    auto& iv = iv_[k];
    for (int i = 0; i < 3; ++i) {
      const FracData& g = d[kGaussFrac[i]];
      iv.x[i] = g.x;
      iv.xdot[i] = g.xdot;
      iv.f1[i] = g.f1;
      iv.E[i] = g.E;
      iv.A[i] = g.A;
      iv.step[i] = make_step(d[F0], d[kGaussHalfFrac[i]], g, kGaussNodes[i], h);
    }
    iv.step[3] = make_step(d[F0], d[FH], d[F1], 1.0, h);
    A_[k] = d[F0].A;
    E_[k] = d[F0].E;
    f1_[k] = d[F0].f1;
    if (k == N - 1) {
      A_[N] = d[F1].A;
      E_[N] = d[F1].E;
      f1_[N] = d[F1].f1;
    }
  }
}

Mat linearized_state(const LinearizedSystem& lin, const std::vector<double>& v, const Vec& z0) {
  const int N = lin.intervals();
  if (static_cast<int>(v.size()) != N) throw DimensionError("direction v has the wrong length");
  Mat z(z0.size(), N + 1);
  z.col(0) = z0;
  for (int k = 0; k < N; ++k) {
    const StepMap& s = lin.interval(k).step[3];
    z.col(k + 1) = s.S * z.col(k) + v[k] * (s.af + s.bf);
  }
  return z;
}

Mat propagate_xi(const LinearizedSystem& lin, const std::vector<double>& y_begin, const std::vector<double>& y_end,
                 const Vec& xi0) {
  const int N = lin.intervals();
  if (static_cast<int>(y_begin.size()) != N || static_cast<int>(y_end.size()) != N) {
    throw DimensionError("direction y has the wrong length");
  }
  Mat xi(xi0.size(), N + 1);
  xi.col(0) = xi0;
  for (int k = 0; k < N; ++k) {
    const StepMap& s = lin.interval(k).step[3];
    xi.col(k + 1) = s.S * xi.col(k) + y_begin[k] * s.aE + y_end[k] * s.bE;
  }
  return xi;
}

TransformedDirection transform_direction(const Trajectory& traj, const LinearizedSystem& lin, const std::vector<double>& v,
                           const Vec& z0) {
  const int N = lin.intervals();
  const Mat z = linearized_state(lin, v, z0);
  TransformedDirection d;
  d.y_begin.resize(N);
  d.y_end.resize(N);
  d.xi.resize(z.rows(), N + 1);
  double Y = 0.0;
  d.xi.col(0) = z.col(0);
  for (int k = 0; k < N; ++k) {
    d.y_begin[k] = Y;
    Y += v[k] * traj.grid.step(k);
    d.y_end[k] = Y;
    d.xi.col(k + 1) = z.col(k + 1) - Y * lin.f1(k + 1);
  }
  d.h = Y;
  return d;
}

double closed_form_R(const ProblemSpec& spec, const Vec& x, const RowVec& p, double nu) {
  double r = p.dot(spec.bracket011()(x));
  if (nu != 0.0) r += g_gradient(spec, x).dot(spec.f1.jacobian(x) * spec.f1(x)) * nu;
  return r;
}

PointCoefficients point_coefficients(const ProblemSpec& spec, double u, const Vec& x, const RowVec& p, double nu,
                                     bool on_c) {
  PointCoefficients c;
  const Mat A = dynamics_jacobian(spec, u, x);
  const Mat J1 = spec.f1.jacobian(x);
  const Vec f1 = spec.f1(x);
  const Vec xdot = eval_dynamics(spec, u, x);
  const Vec E = A * f1 - J1 * xdot;
  const Vec pt = p.transpose();
  c.Hxx = spec.f0.weighted_hessian(pt, x) + u * spec.f1.weighted_hessian(pt, x);
  c.Hux = p * J1;
  RowVec pdot = -p * A;
  if (on_c) pdot -= nu * g_gradient(spec, x);
  const RowVec Hux_dot = pdot * J1 + (spec.f1.weighted_hessian(pt, x) * xdot).transpose();
  c.M = f1.transpose() * c.Hxx - Hux_dot - c.Hux * A;
  const double d_Hux_f1 = Hux_dot.dot(f1) + c.Hux.dot(J1 * xdot);
  c.R = f1.dot(c.Hxx * f1) - 2.0 * c.Hux.dot(E) - d_Hux_f1;
  c.R_cf = closed_form_R(spec, x, p, on_c ? nu : 0.0);
  return c;
}

NodeCoefficients assemble_M_R(const ProblemSpec& spec, const Trajectory& traj, const LinearizedSystem& lin,
                              const Multiplier& lambda, const Tolerances& tol) {
  const int N = traj.intervals();
  NodeCoefficients out;
  for (int k = 0; k <= N; ++k) {
    const int j = std::min(k, N - 1);
    const bool on_c = lin.on_c(j);
    const Vec xk = traj.state(k);
    const RowVec p = lambda.p(k);
    const double nu = on_c ? compute_nu(spec, xk, p, tol.fo_min) : 0.0;
    const PointCoefficients c = point_coefficients(spec, traj.u[j], xk, p, nu, on_c);
    out.M.push_back(c.M);
    out.R.push_back(c.R);
    out.R_cf.push_back(c.R_cf);
    out.nu.push_back(nu);
  }
  return out;
}

FormData prepare_form(const ProblemSpec& spec, const Trajectory& traj, const LinearizedSystem& lin,
                      const Multiplier& lambda, const Tolerances& tol) {
  const int N = traj.intervals();
  const CostateSamples cs = sample_costate(spec, traj, lin.dense(), lambda, tol);
  FormData f;
  f.lambda = &lambda;
  f.samples = cs;
  f.pts.resize(N);
  f.nu.resize(N);
  f.gxx.resize(N);
  for (int k = 0; k < N; ++k) {
    const bool on_c = lin.on_c(k);
    for (int i = 0; i < 3; ++i) {
      const Vec& x = lin.interval(k).x[i];
      f.nu[k][i] = cs.nu[k][i];
      f.pts[k][i] = point_coefficients(spec, traj.u[k], x, cs.p[k][i], cs.nu[k][i], on_c);
      if (on_c) f.gxx[k][i] = g_hessian(spec, x);
    }
  }
  const Vec x0 = traj.state(0), xT = traj.state(N);
  f.D2l = endpoint_lagrangian_hessian(spec, lambda.beta, lambda.psi, x0, xT);
  f.Hux_T = lambda.p_left.row(N) * spec.f1.jacobian(xT);
  f.f1_T = spec.f1(xT);
  for (const auto& a : lambda.measure.atoms) {
    if (a.mass == 0.0) continue;
    const Vec xk = traj.state(a.node);
    FormData::AtomTerm t;
    t.node = a.node;
    t.mass = a.mass;
    t.gxx = g_hessian(spec, xk);
    t.gf1p = g_gradient(spec, xk) * spec.f1.jacobian(xk);
    t.f1 = spec.f1(xk);
    f.atoms.push_back(t);
  }
  return f;
}

double eval_Q(const Trajectory& traj, const LinearizedSystem& lin, const FormData& form,
              const std::vector<double>& v, const Vec& z0) {
  const int N = lin.intervals();
  const Mat z = linearized_state(lin, v, z0);
  double sum = 0.0;
  for (int k = 0; k < N; ++k) {
    const double h = traj.grid.step(k);
    const auto& iv = lin.interval(k);
    for (int i = 0; i < 3; ++i) {
      const StepMap& s = iv.step[i];
      const Vec zt = s.S * z.col(k) + v[k] * (s.af + s.bf);
      const PointCoefficients& c = form.pts[k][i];
      double val = zt.dot(c.Hxx * zt) + 2.0 * v[k] * c.Hux.dot(zt);
      if (lin.on_c(k)) val += form.nu[k][i] * zt.dot(form.gxx[k][i] * zt);
      sum += kGaussWeights[i] * h * val;
    }
  }
  const Vec e = endpoint_point(z.col(0), z.col(N));
  sum += e.dot(form.D2l * e);
  for (const auto& a : form.atoms) sum += a.mass * z.col(a.node).dot(a.gxx * z.col(a.node));
  return sum;
}

namespace {
/// y at an atom node: the C-side value when an adjacent interval is C,
/// otherwise the left interval's end value.
double node_y(const LinearizedSystem& lin, const TransformedDirection& d, int k) {
  const int N = lin.intervals();
  if (k == 0) return 0.0;
  if (k == N) return d.h;
  if (lin.on_c(k)) return d.y_begin[k];
  return d.y_end[k - 1];
}
}  // namespace

double eval_Omega(const Trajectory& traj, const LinearizedSystem& lin, const FormData& form,
                  const TransformedDirection& dir) {
  const int N = lin.intervals();
  double sum = 0.0;
  for (int k = 0; k < N; ++k) {
    const double h = traj.grid.step(k);
    const auto& iv = lin.interval(k);
    const double yb = dir.y_begin[k], ye = dir.y_end[k];
    for (int i = 0; i < 3; ++i) {
      const StepMap& s = iv.step[i];
      const double th = kGaussNodes[i];
      const Vec xt = s.S * dir.xi.col(k) + yb * s.aE + ye * s.bE;
      const double yt = (1.0 - th) * yb + th * ye;
      const PointCoefficients& c = form.pts[k][i];
      double val = xt.dot(c.Hxx * xt) + 2.0 * yt * c.M.dot(xt) + c.R * yt * yt;
      if (lin.on_c(k)) {
        const Vec w = xt + yt * iv.f1[i];
        val += form.nu[k][i] * w.dot(form.gxx[k][i] * w);
      }
      sum += kGaussWeights[i] * h * val;
    }
  }
  const Vec xiT = dir.xi.col(N);
  sum += 2.0 * dir.h * form.Hux_T.dot(xiT) + dir.h * dir.h * form.Hux_T.dot(form.f1_T);
  const Vec e = endpoint_point(dir.xi.col(0), xiT + dir.h * form.f1_T);
  sum += e.dot(form.D2l * e);
  for (const auto& a : form.atoms) {
    const double y = node_y(lin, dir, a.node);
    const Vec w = dir.xi.col(a.node) + y * a.f1;
    sum += a.mass * w.dot(a.gxx * w);
    if (a.node > 0 && a.node < N) {
      sum += a.mass * (2.0 * y * a.gf1p.dot(dir.xi.col(a.node)) + y * y * a.gf1p.dot(a.f1));
    }
  }
  return sum;
}

double eval_gamma(const Trajectory& traj, const TransformedDirection& dir) {
  double s = 0.0;
  for (int k = 0; k < traj.intervals(); ++k) {
    const double a = dir.y_begin[k], b = dir.y_end[k];
    s += traj.grid.step(k) / 3.0 * (a * a + a * b + b * b);
  }
  return s + dir.h * dir.h + dir.xi0().squaredNorm();
}

// ---------------------------------------------------------------------------
// cones

namespace {

RowVec unit_row(int size, int index) {
  RowVec r = RowVec::Zero(size);
  r(index) = 1.0;
  return r;
}

}  // namespace

ConeBasis build_cone(const ProblemSpec& spec, const Trajectory& traj, const LinearizedSystem& lin,
                     const std::vector<FormData>& forms, ConeKind which, const Tolerances& tol) {
  const int n = spec.n;
  const int N = traj.intervals();
  const ArcIndex& idx = lin.arcs();
  const auto& arcs = traj.arcs;
  ConeBasis cone;
  cone.which = which;

  // variables: xi0, y (one per B arc, one per S interval), h
  int nv = n;
  cone.interval_var.assign(N, -1);
  std::vector<int> arc_var(arcs.size(), -1);
  for (int k = 0; k < N; ++k) {
    const int j = idx.interval_arc[k];
    const ArcKind kind = arcs[j].kind;
    if (kind == ArcKind::C) continue;
    if (is_bang(kind)) {
      if (arc_var[j] < 0) arc_var[j] = nv++;
      cone.interval_var[k] = arc_var[j];
    } else {
      cone.interval_var[k] = nv++;
    }
  }
  cone.h_var = nv++;
  cone.num_vars = nv;

  cone.kappa.assign(N + 1, RowVec());
  for (std::size_t j = 0; j < arcs.size(); ++j) {
    if (arcs[j].kind != ArcKind::C) continue;
    for (int k = idx.first_node[j]; k <= idx.last_node[j]; ++k) {
      const Vec xk = traj.state(k);
      const RowVec dg = g_gradient(spec, xk);
      const double den = dg.dot(spec.f1(xk));
      if (!(std::abs(den) > tol.fo_min)) throw ConeError("first-order constraint margin fails at node " + std::to_string(k));
      cone.kappa[k] = dg / den;
    }
  }

  // xi maps and per-interval y rows
  cone.Xi.resize(N + 1);
  cone.Xi[0] = Mat::Zero(n, nv);
  cone.Xi[0].leftCols(n).setIdentity();
  std::vector<RowVec> Yb(N), Ye(N);
  std::vector<int> active(N);
  int used = n;
  for (int k = 0; k < N; ++k) {
    const StepMap& s = lin.interval(k).step[3];
    if (lin.on_c(k)) {
      const Mat lhs = Mat::Identity(n, n) + s.bE * cone.kappa[k + 1];
      const Mat rhs = (s.S - s.aE * cone.kappa[k]) * cone.Xi[k];
      cone.Xi[k + 1] = lhs.partialPivLu().solve(rhs);
      Yb[k] = -cone.kappa[k] * cone.Xi[k];
      Ye[k] = -cone.kappa[k + 1] * cone.Xi[k + 1];
    } else {
      const int c = cone.interval_var[k];
      used = std::max(used, c + 1);
      cone.Xi[k + 1] = s.S * cone.Xi[k] + (s.aE + s.bE) * unit_row(nv, c);
      Yb[k] = Ye[k] = unit_row(nv, c);
    }
    active[k] = used;
  }

  // constraints
  std::vector<RowVec> rows;
  auto add_row = [&](const RowVec& r, const std::string& label) {
    rows.push_back(r);
    cone.row_labels.push_back(label);
  };
  const Vec x0 = traj.state(0), xT = traj.state(N);
  const Vec f1T = spec.f1(xT);
  Mat P(2 * n, nv);
  P.topRows(n) = cone.Xi[0];
  P.bottomRows(n) = cone.Xi[N] + f1T * unit_row(nv, cone.h_var);
  const Mat Jend = endpoint_jacobian(spec, x0, xT);
  const Vec Phi = endpoint_constraints(spec, x0, xT);
  add_row(Jend.row(0) * P, "cost");
  for (int i = 0; i < spec.n1 + spec.n2; ++i) {
    if (i < spec.n1) {
      add_row(Jend.row(1 + i) * P, "Phi_" + std::to_string(i + 1));
    } else if (std::abs(Phi(i)) <= tol.tol_g) {
      add_row(Jend.row(1 + i) * P, "Phi_" + std::to_string(i + 1) + " (active)");
    }
  }
  if (is_bang(arcs.front().kind)) add_row(unit_row(nv, arc_var[0]), "y = 0 on initial B arc");
  if (is_bang(arcs.back().kind)) {
    add_row(unit_row(nv, arc_var[arcs.size() - 1]) - unit_row(nv, cone.h_var), "y = h on terminal B arc");
  }
  if (which == ConeKind::PS2) {
    for (std::size_t j = 1; j < arcs.size(); ++j) {
      const ArcKind a = arcs[j - 1].kind, b = arcs[j].kind;
      const bool junction = (is_bang(a) && b == ArcKind::C) || (a == ArcKind::C && is_bang(b)) || (is_bang(a) && is_bang(b));
      if (!junction) continue;
      const int k = idx.first_node[j];
      add_row(Ye[k - 1] - Yb[k], "y continuous at " + to_string(a) + "-" + to_string(b) + " junction");
    }
  }
  bool terminal_atom = false;
  for (const auto& f : forms) {
    if (f.lambda && f.lambda->measure.mass_at(N) > tol.jump_tol) terminal_atom = true;
  }
  const bool t_in_c = arcs.back().kind == ArcKind::C;
  cone.terminal_limit = t_in_c && (which == ConeKind::PS2 || (which == ConeKind::Pstar2 && terminal_atom));
  if (cone.terminal_limit) add_row(Ye[N - 1] - unit_row(nv, cone.h_var), "lim y = h at T");

  double max_norm = 0.0;
  for (const auto& r : rows) max_norm = std::max(max_norm, r.norm());
  std::vector<RowVec> kept;
  std::vector<std::string> labels;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const double nr = rows[i].norm();
    if (nr > 1e-13 * std::max(1.0, max_norm)) {
      kept.push_back(rows[i] / nr);
      labels.push_back(cone.row_labels[i]);
    }
  }
  cone.row_labels = labels;
  cone.constraints.resize(static_cast<int>(kept.size()), nv);
  for (std::size_t i = 0; i < kept.size(); ++i) cone.constraints.row(static_cast<int>(i)) = kept[i];

  if (kept.empty()) {
    cone.rank = 0;
    cone.Z = Mat::Identity(nv, nv);
  } else {
    Eigen::ColPivHouseholderQR<Mat> qr(cone.constraints.transpose());
    qr.setThreshold(1e-10);
    cone.rank = static_cast<int>(qr.rank());
    const Mat Q = qr.householderQ();
    cone.Z = Q.rightCols(nv - cone.rank);
  }

  // gamma
  Mat G = Mat::Zero(nv, nv);
  G.topLeftCorner(n, n).setIdentity();
  G(cone.h_var, cone.h_var) += 1.0;
  for (int k = 0; k < N; ++k) {
    const double h = traj.grid.step(k);
    if (lin.on_c(k)) {
      const Mat cross = Yb[k].transpose() * Ye[k];
      G += (h / 3.0) * (Yb[k].transpose() * Yb[k] + 0.5 * (cross + cross.transpose()) + Ye[k].transpose() * Ye[k]);
    } else {
      G(cone.interval_var[k], cone.interval_var[k]) += h;
    }
  }
  cone.G = cone.Z.transpose() * G * cone.Z;
  cone.G = 0.5 * (cone.G + cone.G.transpose()).eval();

  // Omega per multiplier
  for (const auto& form : forms) {
    Mat Om = Mat::Zero(nv, nv);
    for (int k = 0; k < N; ++k) {
      const int c = active[k];
      const double h = traj.grid.step(k);
      const auto& iv = lin.interval(k);
      Mat W(3 * (n + 1), c);
      Mat D = Mat::Zero(3 * (n + 1), 3 * (n + 1));
      for (int i = 0; i < 3; ++i) {
        const StepMap& s = iv.step[i];
        const double th = kGaussNodes[i];
        W.block(i * (n + 1), 0, n, c) =
            (s.S * cone.Xi[k] + s.aE * Yb[k] + s.bE * Ye[k]).leftCols(c);
        W.block(i * (n + 1) + n, 0, 1, c) = ((1.0 - th) * Yb[k] + th * Ye[k]).leftCols(c);
        const PointCoefficients& pc = form.pts[k][i];
        Mat K(n + 1, n + 1);
        K.topLeftCorner(n, n) = pc.Hxx;
        K.block(n, 0, 1, n) = pc.M;
        K.block(0, n, n, 1) = pc.M.transpose();
        K(n, n) = pc.R;
        if (lin.on_c(k)) {
          const Mat& gx = form.gxx[k][i];
          const Vec& f1 = iv.f1[i];
          const double nu = form.nu[k][i];
          K.topLeftCorner(n, n) += nu * gx;
          const RowVec cross = nu * f1.transpose() * gx;
          K.block(n, 0, 1, n) += cross;
          K.block(0, n, n, 1) += cross.transpose();
          K(n, n) += nu * f1.dot(gx * f1);
        }
        D.block(i * (n + 1), i * (n + 1), n + 1, n + 1) = kGaussWeights[i] * h * K;
      }
      Om.topLeftCorner(c, c).noalias() += W.transpose() * (D * W);
    }
    // terminal and endpoint terms
    const RowVec r = form.Hux_T * cone.Xi[N];
    Om.row(cone.h_var) += r;
    Om.col(cone.h_var) += r.transpose();
    Om(cone.h_var, cone.h_var) += form.Hux_T.dot(form.f1_T);
    Om += P.transpose() * form.D2l * P;
    for (const auto& a : form.atoms) {
      RowVec Y;
      if (a.node == 0) {
        Y = RowVec::Zero(nv);
      } else if (a.node == N) {
        Y = unit_row(nv, cone.h_var);
      } else if (lin.on_c(a.node)) {
        Y = Yb[a.node];
      } else {
        Y = Ye[a.node - 1];
      }
      const Mat Zk = cone.Xi[a.node] + a.f1 * Y;
      Om += a.mass * Zk.transpose() * a.gxx * Zk;
      if (a.node > 0 && a.node < N) {
        const RowVec q = a.gf1p * cone.Xi[a.node];
        Om += a.mass * (Y.transpose() * q + q.transpose() * Y);
        Om += a.mass * a.gf1p.dot(a.f1) * Y.transpose() * Y;
      }
    }
    Mat red = cone.Z.transpose() * Om * cone.Z;
    cone.Omega.push_back(0.5 * (red + red.transpose()));
  }
  return cone;
}

TransformedDirection cone_direction(const Trajectory& traj, const LinearizedSystem& lin, const ConeBasis& cone,
                            const Vec& w) {
  const int N = traj.intervals();
  TransformedDirection d;
  d.xi.resize(cone.Xi[0].rows(), N + 1);
  for (int k = 0; k <= N; ++k) d.xi.col(k) = cone.Xi[k] * w;
  d.y_begin.resize(N);
  d.y_end.resize(N);
  for (int k = 0; k < N; ++k) {
    if (lin.on_c(k)) {
      d.y_begin[k] = -cone.kappa[k].dot(d.xi.col(k));
      d.y_end[k] = -cone.kappa[k + 1].dot(d.xi.col(k + 1));
    } else {
      d.y_begin[k] = d.y_end[k] = w(cone.interval_var[k]);
    }
  }
  d.h = w(cone.h_var);
  return d;
}

namespace {

struct Pencil {
  Vec values;
  Mat vectors;  // G-orthonormal columns
};

Pencil solve_pencil(const Mat& Om, const Mat& G) {
  Eigen::GeneralizedSelfAdjointEigenSolver<Mat> es(Om, G);
  if (es.info() != Eigen::Success) throw ConeError("generalized eigenproblem failed");
  return {es.eigenvalues(), es.eigenvectors()};
}

Witness make_witness(const Trajectory& traj, const LinearizedSystem& lin, const std::vector<FormData>& forms,
                     const ConeBasis& cone, const Vec& c, int l) {
  Witness w;
  w.lambda_index = l;
  w.w = cone.Z * c;
  const double num = c.dot(cone.Omega[l] * c);
  const double den = c.dot(cone.G * c);
  w.rayleigh = num / den;
  const TransformedDirection d = cone_direction(traj, lin, cone, w.w);
  w.omega = eval_Omega(traj, lin, forms[l], d);
  w.gamma = eval_gamma(traj, d);
  return w;
}

}  // namespace

MaxFormResult max_form_test(const std::vector<Mat>& Omegas, const Mat& G, double tol) {
  if (Omegas.empty()) throw std::invalid_argument("max-form test needs at least one multiplier");
  MaxFormResult r;
  std::vector<Pencil> pencils;
  r.mu_min = kInf;
  for (std::size_t l = 0; l < Omegas.size(); ++l) {
    pencils.push_back(solve_pencil(Omegas[l], G));
    const double m = pencils.back().values(0);
    r.mu_per_lambda.push_back(m);
    if (m < r.mu_min) {
      r.mu_min = m;
      r.lambda = static_cast<int>(l);
    }
  }
  r.coeffs = pencils[r.lambda].vectors.col(0);
  for (std::size_t l = 0; l < Omegas.size(); ++l) {
    const Pencil& pz = pencils[l];
    for (int e = 0; e < pz.values.size() && pz.values(e) < -tol; ++e) {
      const Vec c = pz.vectors.col(e);
      const double g = c.dot(G * c);
      bool rescued = false;
      for (std::size_t o = 0; o < Omegas.size(); ++o) {
        if (o != l && c.dot(Omegas[o] * c) / g >= -tol) rescued = true;
      }
      if (!rescued) {
        r.verdict = Verdict::Fail;
        r.lambda = static_cast<int>(l);
        r.coeffs = c;
        return r;
      }
    }
  }
  return r;
}

NecessaryResult necessary_test(const Trajectory& traj, const LinearizedSystem& lin,
                               const std::vector<FormData>& forms, const ConeBasis& cone, const Tolerances& tol) {
  if (forms.empty()) throw std::invalid_argument("necessary test needs at least one multiplier");
  NecessaryResult r;
  r.dim = cone.dim();
  if (r.dim == 0) {
    r.verdict = Verdict::Vacuous;
    r.note = "cone is {0}";
    return r;
  }
  const MaxFormResult m = max_form_test(cone.Omega, cone.G, tol.nec_tol);
  r.verdict = m.verdict;
  r.mu_min = m.mu_min;
  r.mu_per_lambda = m.mu_per_lambda;
  r.witness = make_witness(traj, lin, forms, cone, m.coeffs, m.lambda);
  if (m.verdict == Verdict::Fail) r.note = "violating direction found; not certified by the provided multipliers";
  return r;
}

SufficientResult sufficient_test(const ProblemSpec& spec, const Trajectory& traj, const LinearizedSystem& lin,
                                 const std::vector<FormData>& forms, const ConeBasis& cone, const Tolerances& tol) {
  if (forms.empty()) throw std::invalid_argument("sufficient test needs at least one multiplier");
  SufficientResult r;
  r.dim = cone.dim();
  r.alpha_min = kInf;
  for (const auto& f : forms) {
    const NodeCoefficients nc = assemble_M_R(spec, traj, lin, *f.lambda, tol);
    for (int k = 0; k <= traj.intervals(); ++k) {
      double a = nc.R[k];
      if (nc.nu[k] != 0.0) {
        const Vec xk = traj.state(k);
        const Vec f1 = spec.f1(xk);
        a += f1.dot(g_hessian(spec, xk) * f1) * nc.nu[k];
      }
      r.alpha_min = std::min(r.alpha_min, a);
    }
  }
  r.legendre = r.alpha_min > tol.leg_tol ? Verdict::Pass : Verdict::NotCertified;
  if (r.dim == 0) {
    r.coercivity = Verdict::Vacuous;
    r.rho_min = r.rho_best = kInf;
  } else {
    r.rho_min = kInf;
    r.rho_best = -kInf;
    int best_l = 0;
    Vec best_c;
    for (std::size_t l = 0; l < forms.size(); ++l) {
      const Pencil pz = solve_pencil(cone.Omega[l], cone.G);
      r.rho_per_lambda.push_back(pz.values(0));
      r.rho_min = std::min(r.rho_min, pz.values(0));
      if (pz.values(0) > r.rho_best) {
        r.rho_best = pz.values(0);
        best_l = static_cast<int>(l);
        best_c = pz.vectors.col(0);
      }
    }
    r.witness = make_witness(traj, lin, forms, cone, best_c, best_l);
    r.coercivity = r.rho_best > tol.suf_tol ? Verdict::Pass : Verdict::NotCertified;
  }
  const bool ok = r.legendre == Verdict::Pass &&
                  (r.coercivity == Verdict::Pass || r.coercivity == Verdict::Vacuous);
  r.verdict = ok ? Verdict::Pass : Verdict::NotCertified;
  return r;
}

}  // namespace ocpcert
