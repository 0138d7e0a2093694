#include "ocpcert/properties.hpp"

#include <cmath>

namespace ocpcert {

Prepared::Prepared(Instance in, const Tolerances& tol)
    : inst(std::move(in)),
      lambda(integrate_costate(inst.spec, inst.traj, inst.seed.beta, inst.seed.psi,
                               resolve_atoms(inst.traj, inst.seed.atoms), tol)),
      lin(inst.spec, inst.traj),
      form(prepare_form(inst.spec, inst.traj, lin, lambda, tol)) {}

namespace {

/// int p f1 v over the grid by Gauss quadrature.
double first_variation(const Trajectory& traj, const LinearizedSystem& lin,
                       const FormData& form, const std::vector<double>& v) {
  const CostateSamples& cs = form.samples;
  double s = 0.0;
  for (int k = 0; k < traj.intervals(); ++k) {
    const auto& iv = lin.interval(k);
    double hu = 0.0;
    for (int i = 0; i < 3; ++i) hu += kGaussWeights[i] * cs.p[k][i].dot(iv.f1[i]);
    s += traj.grid.step(k) * hu * v[k];
  }
  return s;
}

}  // namespace

IdentitySides integral_identity(const ProblemSpec& spec, const Trajectory& traj, const LinearizedSystem& lin,
                                const FormData& form, const std::vector<double>& v, const Vec& z0) {
  const int N = traj.intervals();
  const Mat z = linearized_state(lin, v, z0);
  IdentitySides r;
  for (int k = 0; k < N; ++k) {
    if (!lin.on_c(k)) continue;
    const auto& iv = lin.interval(k);
    for (int i = 0; i < 3; ++i) {
      const StepMap& s = iv.step[i];
      const Vec zt = s.S * z.col(k) + v[k] * (s.af + s.bf);
      r.lhs += kGaussWeights[i] * traj.grid.step(k) * form.nu[k][i] * g_gradient(spec, iv.x[i]).dot(zt);
    }
  }
  for (const auto& a : form.lambda->measure.atoms) {
    r.lhs += a.mass * g_gradient(spec, traj.state(a.node)).dot(z.col(a.node));
  }
  const RowVec dl = endpoint_lagrangian_gradient(spec, form.lambda->beta, form.lambda->psi, traj.state(0),
                                                 traj.state(N));
  r.lhs += dl.dot(endpoint_point(z.col(0), z.col(N)));
  r.rhs = first_variation(traj, lin, form, v);
  return r;
}

double lagrangian_value(const ProblemSpec& spec, const Trajectory& traj, const FormData& form) {
  const int N = traj.intervals();
  const Multiplier& m = *form.lambda;
  double L = endpoint_lagrangian(spec, m.beta, m.psi, traj.state(0), traj.state(N));
  const DenseStates dense(spec, traj);
  const ArcIndex idx = index_arcs(traj);
  for (int k = 0; k < N; ++k) {
    if (traj.arcs[idx.interval_arc[k]].kind != ArcKind::C) continue;
    for (int i = 0; i < 3; ++i) {
      L += kGaussWeights[i] * traj.grid.step(k) * form.nu[k][i] * g_value(spec, dense.x(k, kGaussFrac[i]));
    }
  }
  for (const auto& a : m.measure.atoms) L += a.mass * g_value(spec, traj.state(a.node));
  return L;
}

std::vector<ExpansionSample> lagrangian_expansion(const ProblemSpec& spec, const Trajectory& traj,
                                                  const LinearizedSystem& lin, const FormData& form,
                                                  const std::vector<double>& v, const Vec& z0,
                                                  const std::vector<double>& eps) {
  const double L0 = lagrangian_value(spec, traj, form);
  const double d1 = first_variation(traj, lin, form, v);
  const double Q = eval_Q(traj, lin, form, v, z0);
  std::vector<ExpansionSample> out;
  for (double e : eps) {
    std::vector<double> u = traj.u;
    for (std::size_t k = 0; k < u.size(); ++k) u[k] += e * v[k];
    Trajectory pert = integrate_state(spec, u, traj.state(0) + e * z0, traj.grid);
    pert.arcs = traj.arcs;
    ExpansionSample s;
    s.eps = e;
    s.residual = lagrangian_value(spec, pert, form) - L0 - e * d1 - 0.5 * e * e * Q;
    s.ratio = std::abs(s.residual) / (e * e);
    out.push_back(s);
  }
  return out;
}

}  // namespace ocpcert
