#include "ocpcert/problem.hpp"

#include <cmath>

namespace ocpcert {

PolyMap make_map(int num_vars, std::vector<Poly> components) {
  return PolyMap(num_vars, std::move(components));
}

void ProblemSpec::finalize() {
  if (n <= 0) throw ValidationError("n must be positive");
  if (n1 < 0 || n2 < 0) throw ValidationError("n1 and n2 must be nonnegative");
  if (f0.num_vars() != n || f0.num_outputs() != n) throw DimensionError("f0 must be a field on R^" + std::to_string(n));
  if (f1.num_vars() != n || f1.num_outputs() != n) throw DimensionError("f1 must be a field on R^" + std::to_string(n));
  if (g.num_vars() != n) throw DimensionError("g must be a polynomial in " + std::to_string(n) + " variables");
  if (phi.num_vars() != 2 * n) throw DimensionError("phi must be a polynomial in (x0, xT)");
  if (Phi.num_outputs() != n1 + n2) {
    throw DimensionError("Phi has " + std::to_string(Phi.num_outputs()) + " rows, n1 + n2 = " +
                         std::to_string(n1 + n2));
  }
  if (Phi.num_outputs() > 0 && Phi.num_vars() != 2 * n) throw DimensionError("Phi must be a map on (x0, xT)");
  if (std::isnan(u_min) || std::isnan(u_max) || !(u_min < u_max)) throw ValidationError("need u_min < u_max");
  if (!(T > 0.0) || !std::isfinite(T)) throw ValidationError("horizon T must be positive and finite");

  if (Phi.num_outputs() == 0) Phi = PolyMap::zero(0, 2 * n);
  br01_ = lie_bracket(f0, f1);
  br10_ = lie_bracket(f1, f0);
  br011_ = lie_bracket(br01_, f1);
  g_map_ = PolyMap(n, {g});
  std::vector<Poly> ends{phi};
  for (const auto& c : Phi.components()) ends.push_back(c);
  end_map_ = PolyMap(2 * n, std::move(ends));
  finalized_ = true;
}

bool ProblemSpec::operator==(const ProblemSpec& o) const {
  auto same = [](double a, double b) { return a == b || (std::isnan(a) && std::isnan(b)); };
  return name == o.name && n == o.n && n1 == o.n1 && n2 == o.n2 && f0 == o.f0 && f1 == o.f1 && g == o.g &&
         phi == o.phi && Phi == o.Phi && same(u_min, o.u_min) && same(u_max, o.u_max) && same(T, o.T);
}

namespace {
void require(const ProblemSpec& spec) {
  if (!spec.finalized()) throw ValidationError("problem '" + spec.name + "' used before finalize()");
}
void check_x(const ProblemSpec& spec, const Vec& x) {
  require(spec);
  if (x.size() != spec.n) {
    throw DimensionError("state has dimension " + std::to_string(x.size()) + ", expected " + std::to_string(spec.n));
  }
}
}  // namespace

Vec eval_dynamics(const ProblemSpec& spec, double u, const Vec& x) {
  check_x(spec, x);
  return spec.f0(x) + u * spec.f1(x);
}

Mat dynamics_jacobian(const ProblemSpec& spec, double u, const Vec& x) {
  check_x(spec, x);
  return spec.f0.jacobian(x) + u * spec.f1.jacobian(x);
}

HamiltonianEval eval_hamiltonian(const ProblemSpec& spec, double u, const Vec& x, const RowVec& p) {
  check_x(spec, x);
  if (p.size() != spec.n) throw DimensionError("costate has dimension " + std::to_string(p.size()));
  HamiltonianEval h;
  const Vec f1x = spec.f1(x);
  const Mat J1 = spec.f1.jacobian(x);
  h.H_u = p.dot(f1x);
  h.H = p.dot(spec.f0(x)) + u * h.H_u;
  h.H_ux = p * J1;
  h.H_x = p * spec.f0.jacobian(x) + u * h.H_ux;
  const Vec pt = p.transpose();
  h.H_xx = spec.f0.weighted_hessian(pt, x) + u * spec.f1.weighted_hessian(pt, x);
  return h;
}

double g_value(const ProblemSpec& spec, const Vec& x) {
  check_x(spec, x);
  return spec.g(x);
}

RowVec g_gradient(const ProblemSpec& spec, const Vec& x) {
  require(spec);
  check_x(spec, x);
  return spec.g_map().jacobian(x).row(0);
}

Mat g_hessian(const ProblemSpec& spec, const Vec& x) {
  require(spec);
  check_x(spec, x);
  return spec.g_map().weighted_hessian(Vec::Ones(1), x);
}

Vec endpoint_point(const Vec& x0, const Vec& xT) {
  Vec e(x0.size() + xT.size());
  e << x0, xT;
  return e;
}

namespace {
Vec endpoint_weights(const ProblemSpec& spec, double beta, const RowVec& psi) {
  if (psi.size() != spec.n1 + spec.n2) {
    throw DimensionError("Psi has dimension " + std::to_string(psi.size()) + ", expected " +
                         std::to_string(spec.n1 + spec.n2));
  }
  Vec w(1 + psi.size());
  w(0) = beta;
  w.tail(psi.size()) = psi.transpose();
  return w;
}
}  // namespace

double endpoint_lagrangian(const ProblemSpec& spec, double beta, const RowVec& psi, const Vec& x0,
                           const Vec& xT) {
  require(spec);
  return endpoint_weights(spec, beta, psi).dot(spec.endpoint_map()(endpoint_point(x0, xT)));
}

RowVec endpoint_lagrangian_gradient(const ProblemSpec& spec, double beta, const RowVec& psi,
                                    const Vec& x0, const Vec& xT) {
  require(spec);
  return endpoint_weights(spec, beta, psi).transpose() * spec.endpoint_map().jacobian(endpoint_point(x0, xT));
}

Mat endpoint_lagrangian_hessian(const ProblemSpec& spec, double beta, const RowVec& psi, const Vec& x0,
                                const Vec& xT) {
  require(spec);
  return spec.endpoint_map().weighted_hessian(endpoint_weights(spec, beta, psi), endpoint_point(x0, xT));
}

double cost(const ProblemSpec& spec, const Vec& x0, const Vec& xT) {
  return spec.phi(endpoint_point(x0, xT));
}

Vec endpoint_constraints(const ProblemSpec& spec, const Vec& x0, const Vec& xT) {
  return spec.Phi(endpoint_point(x0, xT));
}

Mat endpoint_jacobian(const ProblemSpec& spec, const Vec& x0, const Vec& xT) {
  require(spec);
  return spec.endpoint_map().jacobian(endpoint_point(x0, xT));
}

}  // namespace ocpcert
