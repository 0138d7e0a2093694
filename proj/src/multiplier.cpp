#include "ocpcert/multiplier.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace ocpcert {

double Measure::mass_at(int node) const {
  double m = 0.0;
  for (const auto& a : atoms) {
    if (a.node == node) m += a.mass;
  }
  return m;
}

double compute_nu(const ProblemSpec& spec, const Vec& x, const RowVec& p, double fo_min) {
  const RowVec dg = g_gradient(spec, x);
  const double den = dg.dot(spec.f1(x));
  if (!(std::abs(den) > fo_min)) throw NumericalError("|g'f1| below fo_min while computing nu");
  return p.dot(spec.bracket10()(x)) / den;
}

Mat costate_generator(const ProblemSpec& spec, double u, const Vec& x, bool on_c, double fo_min) {
  Mat K = -dynamics_jacobian(spec, u, x);
  if (on_c) {
    const RowVec dg = g_gradient(spec, x);
    const double den = dg.dot(spec.f1(x));
    if (!(std::abs(den) > fo_min)) throw NumericalError("|g'f1| below fo_min in the costate equation");
    K -= spec.bracket10()(x) * dg / den;
  }
  return K;
}

std::vector<Atom> resolve_atoms(const Trajectory& traj, const std::vector<Atom>& atoms) {
  const ArcIndex idx = index_arcs(traj);
  std::vector<int> allowed{0, traj.intervals()};
  for (std::size_t j = 1; j < idx.first_node.size(); ++j) allowed.push_back(idx.first_node[j]);
  std::vector<Atom> out;
  for (const auto& a : atoms) {
    Atom r = a;
    if (r.node < 0) r.node = traj.grid.find_node(a.time);
    if (r.node < 0 || std::find(allowed.begin(), allowed.end(), r.node) == allowed.end()) {
      std::ostringstream os;
      os << "atom at t=" << a.time << " is not at a junction or endpoint";
      throw ValidationError(os.str());
    }
    r.time = traj.grid.t[r.node];
    auto it = std::find_if(out.begin(), out.end(), [&](const Atom& b) { return b.node == r.node; });
    if (it != out.end()) {
      it->mass += r.mass;
    } else {
      out.push_back(r);
    }
  }
  std::sort(out.begin(), out.end(), [](const Atom& a, const Atom& b) { return a.node < b.node; });
  return out;
}

namespace {

RowVec rk4_backward(const RowVec& p1, const Mat& K1, const Mat& Kh, const Mat& K0, double h) {
  const RowVec k1 = p1 * K1;
  const RowVec k2 = (p1 - 0.5 * h * k1) * Kh;
  const RowVec k3 = (p1 - 0.5 * h * k2) * Kh;
  const RowVec k4 = (p1 - h * k3) * K0;
  return p1 - (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

bool interval_on_c(const Trajectory& traj, const ArcIndex& idx, int k) {
  return traj.arcs[idx.interval_arc[k]].kind == ArcKind::C;
}

}  // namespace

Multiplier integrate_costate(const ProblemSpec& spec, const Trajectory& traj, const DenseStates& dense,
                             double beta, const RowVec& psi, const std::vector<Atom>& atoms,
                             const Tolerances& tol) {
  const ArcIndex idx = index_arcs(traj);
  const int N = traj.intervals();
  const int n = spec.n;
  Multiplier m;
  m.beta = beta;
  m.psi = psi;
  m.measure.atoms = resolve_atoms(traj, atoms);
  m.p_left.resize(N + 1, n);
  m.p_right.resize(N + 1, n);

  const Vec x0 = traj.state(0), xT = traj.state(N);
  const RowVec grad = endpoint_lagrangian_gradient(spec, beta, psi, x0, xT);
  m.p_right.row(N) = grad.tail(n);
  m.p_left.row(N) = m.p_right.row(N) + m.measure.mass_at(N) * g_gradient(spec, xT);
  for (int k = N - 1; k >= 0; --k) {
    const bool on_c = interval_on_c(traj, idx, k);
    const double u = traj.u[k];
    const Mat K1 = costate_generator(spec, u, dense.x(k, F1), on_c, tol.fo_min);
    const Mat Kh = costate_generator(spec, u, dense.x(k, FH), on_c, tol.fo_min);
    const Mat K0 = costate_generator(spec, u, dense.x(k, F0), on_c, tol.fo_min);
    m.p_right.row(k) = rk4_backward(m.p_left.row(k + 1), K1, Kh, K0, traj.grid.step(k));
    const double mass = m.measure.mass_at(k);
    m.p_left.row(k) = m.p_right.row(k);
    if (mass != 0.0) m.p_left.row(k) += mass * g_gradient(spec, traj.state(k));
    if (!m.p_left.row(k).allFinite()) throw NumericalError("non-finite costate", k);
  }
  m.p0_residual = m.p_left.row(0) + grad.head(n);

  m.measure.nu.assign(N + 1, 0.0);
  for (std::size_t j = 0; j < traj.arcs.size(); ++j) {
    if (traj.arcs[j].kind != ArcKind::C) continue;
    for (int k = idx.first_node[j]; k <= idx.last_node[j]; ++k) {
      m.measure.nu[k] = compute_nu(spec, traj.state(k), m.p_in_arc(k, static_cast<int>(j), idx), tol.fo_min);
    }
  }
  return m;
}

Multiplier integrate_costate(const ProblemSpec& spec, const Trajectory& traj, double beta, const RowVec& psi,
                             const std::vector<Atom>& atoms, const Tolerances& tol) {
  return integrate_costate(spec, traj, DenseStates(spec, traj), beta, psi, atoms, tol);
}

CostateSamples sample_costate(const ProblemSpec& spec, const Trajectory& traj, const DenseStates& dense,
                              const Multiplier& lambda, const Tolerances& tol) {
  const ArcIndex idx = index_arcs(traj);
  const int N = traj.intervals();
  CostateSamples s;
  s.p.resize(N);
  s.pdot.resize(N);
  s.nu.resize(N);
  for (int k = 0; k < N; ++k) {
    const bool on_c = interval_on_c(traj, idx, k);
    const double u = traj.u[k];
    const double h = traj.grid.step(k);
    const RowVec p1 = lambda.p_left.row(k + 1);
    const Mat K1 = costate_generator(spec, u, dense.x(k, F1), on_c, tol.fo_min);
    for (int i = 0; i < 3; ++i) {
      const Vec& xg = dense.x(k, kGaussFrac[i]);
      const Mat Kg = costate_generator(spec, u, xg, on_c, tol.fo_min);
      const Mat Km = costate_generator(spec, u, dense.x(k, kGaussBackFrac[i]), on_c, tol.fo_min);
      const RowVec pg = rk4_backward(p1, K1, Km, Kg, (1.0 - kGaussNodes[i]) * h);
      s.p[k][i] = pg;
      s.pdot[k][i] = pg * Kg;
      s.nu[k][i] = on_c ? compute_nu(spec, xg, pg, tol.fo_min) : 0.0;
    }
  }
  return s;
}

// ---------------------------------------------------------------------------
// fit

namespace {

enum class RowType { Eq, Ge, Le };

struct FitLayout {
  int dim = 0;
  std::vector<int> psi_index;  // per Psi row: parameter index or -1 (fixed 0)
  std::vector<bool> psi_nonneg;
  std::vector<int> atom_nodes;
  int first_mass = 0;
};

struct FitRows {
  Mat rows;  // linear part
  std::vector<RowType> type;
  RowVec norm_coeff;  // normalization, linear part
};

struct Unpacked {
  double beta;
  RowVec psi;
  std::vector<Atom> atoms;
};

Unpacked unpack(const ProblemSpec& spec, const Trajectory& traj, const FitLayout& L, const Vec& theta) {
  Unpacked u{theta(0), RowVec::Zero(spec.n1 + spec.n2), {}};
  for (int i = 0; i < spec.n1 + spec.n2; ++i) {
    if (L.psi_index[i] >= 0) u.psi(i) = theta(L.psi_index[i]);
  }
  for (std::size_t a = 0; a < L.atom_nodes.size(); ++a) {
    const int node = L.atom_nodes[a];
    u.atoms.push_back({node, traj.grid.t[node], theta(L.first_mass + static_cast<int>(a))});
  }
  return u;
}

double abs_psi_sum(const FitLayout& L, const Vec& theta) {
  double s = 0.0;
  for (int idx : L.psi_index) {
    if (idx >= 0) s += std::abs(theta(idx));
  }
  return s;
}

void evaluate(const FitLayout& L, const FitRows& R, const Vec& theta, Vec& r, Mat& J) {
  const int m = static_cast<int>(R.rows.rows());
  r.resize(m + 1);
  J.setZero(m + 1, L.dim);
  const Vec lin = R.rows * theta;
  for (int i = 0; i < m; ++i) {
    const double v = lin(i);
    bool active = true;
    if (R.type[i] == RowType::Ge) active = v < 0.0;
    if (R.type[i] == RowType::Le) active = v > 0.0;
    r(i) = active ? v : 0.0;
    if (active) J.row(i) = R.rows.row(i);
  }
  r(m) = R.norm_coeff.dot(theta) + abs_psi_sum(L, theta) - 1.0;
  J.row(m) = R.norm_coeff;
  for (int idx : L.psi_index) {
    if (idx >= 0 && theta(idx) != 0.0) J(m, idx) += theta(idx) > 0.0 ? 1.0 : -1.0;
  }
}

}  // namespace

FitResult fit_multiplier(const ProblemSpec& spec, const Trajectory& traj, const MultiplierSeed& seed,
                         const Tolerances& tol) {
  const ArcIndex idx = index_arcs(traj);
  const DenseStates dense(spec, traj);
  const int N = traj.intervals();
  const int n = spec.n;
  const int m_rows = spec.n1 + spec.n2;
  const Vec x0 = traj.state(0), xT = traj.state(N);

  FitLayout L;
  L.dim = 1;
  const Vec Phi = endpoint_constraints(spec, x0, xT);
  for (int i = 0; i < m_rows; ++i) {
    const bool ineq = i >= spec.n1;
    if (ineq && std::abs(Phi(i)) > tol.tol_g) {
      L.psi_index.push_back(-1);
    } else {
      L.psi_index.push_back(L.dim++);
    }
    L.psi_nonneg.push_back(ineq);
  }
  std::vector<int> cand{0};
  for (std::size_t j = 1; j < idx.first_node.size(); ++j) cand.push_back(idx.first_node[j]);
  cand.push_back(N);
  const std::vector<Atom> seed_atoms = resolve_atoms(traj, seed.atoms);
  for (int k : cand) {
    if (std::abs(g_value(spec, traj.state(k))) <= tol.tol_g &&
        std::find(L.atom_nodes.begin(), L.atom_nodes.end(), k) == L.atom_nodes.end()) {
      L.atom_nodes.push_back(k);
    }
  }
  for (const auto& a : seed_atoms) {
    if (std::find(L.atom_nodes.begin(), L.atom_nodes.end(), a.node) == L.atom_nodes.end()) {
      L.atom_nodes.push_back(a.node);
    }
  }
  L.first_mass = L.dim;
  L.dim += static_cast<int>(L.atom_nodes.size());

  Vec lb = Vec::Zero(L.dim);
  for (int i = 0; i < m_rows; ++i) {
    if (L.psi_index[i] >= 0 && !L.psi_nonneg[i]) lb(L.psi_index[i]) = -kInf;
  }

  // Costate is linear in theta: one backward sweep per unit vector.
  std::vector<Multiplier> basis;
  for (int j = 0; j < L.dim; ++j) {
    Vec e = Vec::Zero(L.dim);
    e(j) = 1.0;
    const Unpacked u = unpack(spec, traj, L, e);
    basis.push_back(integrate_costate(spec, traj, dense, u.beta, u.psi, u.atoms, tol));
  }

  std::vector<RowVec> rows;
  FitRows R;
  auto add = [&](RowType t, auto&& value_of) {
    RowVec row(L.dim);
    for (int j = 0; j < L.dim; ++j) row(j) = value_of(basis[j]);
    rows.push_back(row);
    R.type.push_back(t);
  };
  for (std::size_t j = 0; j < traj.arcs.size(); ++j) {
    const int arc = static_cast<int>(j);
    const ArcKind kind = traj.arcs[j].kind;
    const RowType t = kind == ArcKind::Bminus ? RowType::Ge : kind == ArcKind::Bplus ? RowType::Le : RowType::Eq;
    for (int k = idx.first_node[j]; k <= idx.last_node[j]; ++k) {
      const Vec f1k = spec.f1(traj.state(k));
      add(t, [&](const Multiplier& b) { return b.p_in_arc(k, arc, idx).dot(f1k); });
      if (kind == ArcKind::C) add(RowType::Ge, [&](const Multiplier& b) { return b.measure.nu[k]; });
    }
  }
  for (int i = 0; i < n; ++i) add(RowType::Eq, [&](const Multiplier& b) { return b.p0_residual(i); });
  R.rows.resize(static_cast<int>(rows.size()), L.dim);
  for (std::size_t i = 0; i < rows.size(); ++i) R.rows.row(static_cast<int>(i)) = rows[i];

  R.norm_coeff = RowVec::Zero(L.dim);
  R.norm_coeff(0) = 1.0;
  for (int j = L.first_mass; j < L.dim; ++j) R.norm_coeff(j) = 1.0;
  for (int j = 0; j < L.dim; ++j) {
    double integral = 0.0;
    for (int k = 0; k < N; ++k) {
      if (traj.arcs[idx.interval_arc[k]].kind != ArcKind::C) continue;
      integral += 0.5 * traj.grid.step(k) * (basis[j].measure.nu[k] + basis[j].measure.nu[k + 1]);
    }
    R.norm_coeff(j) += integral;
  }

  Vec theta = Vec::Zero(L.dim);
  theta(0) = seed.beta;
  for (int i = 0; i < m_rows && i < seed.psi.size(); ++i) {
    if (L.psi_index[i] >= 0) theta(L.psi_index[i]) = seed.psi(i);
  }
  for (const auto& a : seed_atoms) {
    for (std::size_t s = 0; s < L.atom_nodes.size(); ++s) {
      if (L.atom_nodes[s] == a.node) theta(L.first_mass + static_cast<int>(s)) = a.mass;
    }
  }
  theta = theta.cwiseMax(lb);

  Vec r;
  Mat J;
  int it = 0;
  bool converged = false;
  const int max_iter = static_cast<int>(tol.max_iter);
  for (; it < max_iter; ++it) {
    evaluate(L, R, theta, r, J);
    const double cost = 0.5 * r.squaredNorm();
    if (r.cwiseAbs().maxCoeff() < 1e-14) {
      converged = true;
      break;
    }
    const Vec grad = J.transpose() * r;
    std::vector<int> free;
    for (int j = 0; j < L.dim; ++j) {
      if (!(theta(j) <= lb(j) && grad(j) > 0.0)) free.push_back(j);
    }
    if (free.empty()) break;
    Mat Jf(J.rows(), static_cast<int>(free.size()));
    for (std::size_t c = 0; c < free.size(); ++c) Jf.col(static_cast<int>(c)) = J.col(free[c]);
    Mat H = Jf.transpose() * Jf;
    const double damping = 1e-12 * std::max(1.0, H.diagonal().maxCoeff());
    H.diagonal().array() += damping;
    Vec gf(static_cast<int>(free.size()));
    for (std::size_t c = 0; c < free.size(); ++c) gf(static_cast<int>(c)) = grad(free[c]);
    const Vec df = H.ldlt().solve(-gf);
    Vec delta = Vec::Zero(L.dim);
    for (std::size_t c = 0; c < free.size(); ++c) delta(free[c]) = df(static_cast<int>(c));

    bool accepted = false;
    Vec trial;
    for (double alpha = 1.0; alpha > 1e-10; alpha *= 0.5) {
      trial = (theta + alpha * delta).cwiseMax(lb);
      Vec rt;
      Mat Jt;
      evaluate(L, R, trial, rt, Jt);
      if (0.5 * rt.squaredNorm() < cost) {
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      converged = true;  // stationary point of the merit function
      break;
    }
    const double step = (trial - theta).norm();
    theta = trial;
    if (step <= 1e-15 * (1.0 + theta.norm())) {
      converged = true;
      break;
    }
  }
  evaluate(L, R, theta, r, J);
  const double residual = r.cwiseAbs().maxCoeff();
  if (!converged && residual > tol.fit_tol) {
    throw FitError("multiplier fit did not converge in " + std::to_string(max_iter) + " iterations (residual " +
                   std::to_string(residual) + ")");
  }
  if (residual > tol.fit_tol) {
    std::ostringstream os;
    os << "multiplier fit residual " << residual << " above fit_tol " << tol.fit_tol;
    throw FitError(os.str());
  }
  if (theta(0) > 1e-12) theta /= theta(0);
  const Unpacked u = unpack(spec, traj, L, theta);
  std::vector<Atom> atoms;
  for (const auto& a : u.atoms) {
    if (a.mass != 0.0) atoms.push_back(a);
  }
  FitResult out;
  out.multiplier = integrate_costate(spec, traj, dense, u.beta, u.psi, atoms, tol);
  out.residual = residual;
  out.iterations = it;
  return out;
}

// ---------------------------------------------------------------------------
// checks

StationarityReport check_stationarity(const ProblemSpec& spec, const Trajectory& traj, const Multiplier& lambda,
                                      const Tolerances& tol) {
  const ArcIndex idx = index_arcs(traj);
  StationarityReport rep;
  const double pmax = std::max(lambda.p_left.cwiseAbs().maxCoeff(), lambda.p_right.cwiseAbs().maxCoeff());
  rep.threshold = tol.stat_tol * (1.0 + pmax);
  for (std::size_t j = 0; j < traj.arcs.size(); ++j) {
    ArcStationarity a;
    a.arc = static_cast<int>(j);
    a.kind = traj.arcs[j].kind;
    a.time = traj.arcs[j].t_start;
    for (int k = idx.first_node[j]; k <= idx.last_node[j]; ++k) {
      const double hu = lambda.p_in_arc(k, a.arc, idx).dot(spec.f1(traj.state(k)));
      double v = 0.0;
      switch (a.kind) {
        case ArcKind::Bminus: v = std::max(0.0, -hu); break;
        case ArcKind::Bplus: v = std::max(0.0, hu); break;
        default: v = std::abs(hu); break;
      }
      if (v > a.worst) {
        a.worst = v;
        a.time = traj.grid.t[k];
      }
    }
    a.passed = a.worst <= rep.threshold;
    rep.passed = rep.passed && a.passed;
    rep.worst = std::max(rep.worst, a.worst);
    rep.arcs.push_back(a);
  }
  return rep;
}

JumpReport check_jumps(const ProblemSpec& spec, const Trajectory& traj, const Multiplier& lambda,
                       const Tolerances& tol) {
  const ArcIndex idx = index_arcs(traj);
  const int N = traj.intervals();
  JumpReport rep;
  auto fill = [&](int k, bool interior) {
    JumpRow row;
    row.node = k;
    row.time = traj.grid.t[k];
    row.interior = interior;
    const Vec xk = traj.state(k);
    const RowVec dg = g_gradient(spec, xk);
    const Vec f1k = spec.f1(xk);
    const RowVec dp = lambda.p_right.row(k) - lambda.p_left.row(k);
    row.mass = lambda.measure.mass_at(k);
    row.dp_residual = (dp + row.mass * dg).cwiseAbs().maxCoeff();
    row.dHu = dp.dot(f1k);
    if (interior) {
      row.du = control_limits(spec, traj, idx, k, tol.fo_min).jump();
      row.du_dHu = row.du * row.dHu;
      row.dmu_ddg = row.mass * row.du * dg.dot(f1k);
      row.continuity_required =
          std::abs(row.du) >= tol.jump_min && std::abs(g_value(spec, xk)) <= tol.tol_g;
    }
    row.passed = row.dp_residual <= tol.jump_tol && std::abs(row.du_dHu) <= tol.jump_tol &&
                 std::abs(row.dmu_ddg) <= tol.jump_tol && (!row.continuity_required || row.mass <= tol.jump_tol);
    rep.passed = rep.passed && row.passed;
    rep.rows.push_back(row);
  };
  if (lambda.measure.mass_at(0) != 0.0) fill(0, false);
  for (std::size_t j = 1; j < idx.first_node.size(); ++j) fill(idx.first_node[j], true);
  if (lambda.measure.mass_at(N) != 0.0) fill(N, false);
  return rep;
}

ComplementarityReport check_strict_complementarity(const ProblemSpec& spec, const Trajectory& traj,
                                                   const std::vector<Multiplier>& lambdas, const Tolerances& tol) {
  if (lambdas.empty()) throw std::invalid_argument("strict complementarity needs at least one multiplier");
  const ArcIndex idx = index_arcs(traj);
  const int N = traj.intervals();
  ComplementarityReport rep;
  auto best = [&](int k, double sign, auto&& p_of) {
    double b = -kInf;
    const Vec f1k = spec.f1(traj.state(k));
    for (const auto& l : lambdas) b = std::max(b, sign * p_of(l).dot(f1k));
    return b;
  };
  for (std::size_t j = 0; j < traj.arcs.size(); ++j) {
    const ArcKind kind = traj.arcs[j].kind;
    if (!is_bang(kind)) continue;
    const double sign = kind == ArcKind::Bminus ? 1.0 : -1.0;
    ComplementarityRow row;
    row.where = "arc " + std::to_string(j) + " interior";
    row.kind = kind;
    row.margin = kInf;
    for (int k = idx.first_node[j] + 1; k < idx.last_node[j]; ++k) {
      const double v = best(k, sign, [&](const Multiplier& l) { return RowVec(l.p_right.row(k)); });
      if (v < row.margin) {
        row.margin = v;
        row.time = traj.grid.t[k];
      }
    }
    row.passed = row.margin > tol.sc_margin;
    rep.rows.push_back(row);
    if (idx.first_node[j] == 0) {
      ComplementarityRow e{"t=0", kind, best(0, sign, [](const Multiplier& l) { return RowVec(l.p_left.row(0)); }),
                           0.0, true};
      e.passed = e.margin > tol.sc_margin;
      rep.rows.push_back(e);
    }
    if (idx.last_node[j] == N) {
      ComplementarityRow e{"t=T", kind, best(N, sign, [&](const Multiplier& l) { return RowVec(l.p_right.row(N)); }),
                           traj.grid.t[N], true};
      e.passed = e.margin > tol.sc_margin;
      rep.rows.push_back(e);
    }
  }
  for (const auto& r : rep.rows) rep.strict_passed = rep.strict_passed && r.passed;

  // support of dmu equal to C for at least one multiplier
  bool any_c = false;
  for (const auto& a : traj.arcs) any_c = any_c || a.kind == ArcKind::C;
  if (!any_c) {
    rep.weak_passed = true;
    for (const auto& l : lambdas) {
      for (const auto& a : l.measure.atoms) rep.weak_passed = rep.weak_passed && a.mass <= tol.jump_tol;
    }
    rep.weak_min_nu = kInf;
    rep.note = "no C arc";
    return rep;
  }
  rep.weak_passed = false;
  rep.weak_min_nu = -kInf;
  for (const auto& l : lambdas) {
    double mn = kInf;
    for (std::size_t j = 0; j < traj.arcs.size(); ++j) {
      if (traj.arcs[j].kind != ArcKind::C) continue;
      for (int k = idx.first_node[j] + 1; k < idx.last_node[j]; ++k) mn = std::min(mn, l.measure.nu[k]);
    }
    bool atoms_in_c = true;
    for (const auto& a : l.measure.atoms) {
      if (a.mass <= tol.jump_tol) continue;
      bool inside = false;
      for (std::size_t j = 0; j < traj.arcs.size(); ++j) {
        if (traj.arcs[j].kind == ArcKind::C && idx.node_in_arc(a.node, static_cast<int>(j))) inside = true;
      }
      atoms_in_c = atoms_in_c && inside;
    }
    rep.weak_min_nu = std::max(rep.weak_min_nu, mn);
    if (mn > tol.sc_margin && atoms_in_c) rep.weak_passed = true;
  }
  return rep;
}

MultiplierValidity validate_multiplier(const ProblemSpec& spec, const Trajectory& traj, const Multiplier& lambda,
                                       const Tolerances& tol) {
  MultiplierValidity v;
  const int N = traj.intervals();
  const Vec x0 = traj.state(0), xT = traj.state(N);
  double size = std::abs(lambda.beta) + lambda.psi.cwiseAbs().sum();
  for (const auto& a : lambda.measure.atoms) size += std::abs(a.mass);
  for (double nu : lambda.measure.nu) size += std::abs(nu);
  v.nontrivial = size > 1e-12;
  if (!v.nontrivial) v.problems.push_back("(beta, Psi, dmu) vanishes");
  if (lambda.beta < 0.0) v.problems.push_back("beta < 0");
  const Vec Phi = endpoint_constraints(spec, x0, xT);
  for (int i = spec.n1; i < spec.n1 + spec.n2; ++i) {
    if (lambda.psi(i) < -tol.stat_tol) v.problems.push_back("Psi_" + std::to_string(i + 1) + " < 0");
    if (std::abs(lambda.psi(i) * Phi(i)) > tol.stat_tol) {
      v.problems.push_back("Psi_" + std::to_string(i + 1) + " Phi_" + std::to_string(i + 1) + " != 0");
    }
  }
  for (const auto& a : lambda.measure.atoms) {
    if (a.mass < 0.0) v.problems.push_back("negative atom at t=" + std::to_string(a.time));
    if (a.mass != 0.0 && std::abs(g_value(spec, traj.state(a.node))) > tol.tol_g) {
      v.problems.push_back("atom where g is inactive, t=" + std::to_string(a.time));
    }
  }
  v.signs_ok = v.problems.size() == (v.nontrivial ? 0u : 1u);
  v.min_nu = 0.0;
  for (double nu : lambda.measure.nu) v.min_nu = std::min(v.min_nu, nu);
  if (v.min_nu < -1e-9) v.problems.push_back("negative density on C");
  const double pmax = std::max(lambda.p_left.cwiseAbs().maxCoeff(), lambda.p_right.cwiseAbs().maxCoeff());
  v.p0_residual = lambda.p0_residual.cwiseAbs().maxCoeff();
  if (v.p0_residual > tol.stat_tol * (1.0 + pmax)) v.problems.push_back("initial costate boundary residual");
  v.passed = v.problems.empty();
  return v;
}

}  // namespace ocpcert
