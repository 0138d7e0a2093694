// Randomized invariants over generated instances. Each case draws from a
// fixed seed so failures replay.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <memory>

#include "ocpcert/properties.hpp"
#include "support.hpp"

using namespace ocpcert;
using testing_support::Gen;

namespace {

const Tolerances kTol;

struct Pool {
  std::vector<std::unique_ptr<Prepared>> items;
  explicit Pool(Gen& g, int random_count, int N) {
    for (const auto& name : registry_names()) items.push_back(std::make_unique<Prepared>(registry_get(name), kTol));
    for (int r = 0; r < random_count; ++r) {
      items.push_back(std::make_unique<Prepared>(g.instance(2 + r % 3, N), kTol));
    }
  }
};

}  // namespace

TEST_CASE("field Jacobians agree with central differences") {
  Gen g(101);
  for (int r = 0; r < 20; ++r) {
    const int n = g.integer(1, 4);
    const VectorField F = g.field(n, 3);
    const Vec x = g.vec(n);
    const Mat J = F.jacobian(x);
    for (int j = 0; j < n; ++j) {
      const double h = 1e-5;
      const Vec e = Vec::Unit(n, j) * h;
      const Vec fd = (F(x + e) - F(x - e)) / (2 * h);
      CHECK((fd - J.col(j)).cwiseAbs().maxCoeff() <= 1e-6 * (1 + J.col(j).cwiseAbs().maxCoeff()));
    }
  }
}

TEST_CASE("bracket antisymmetry with exact integer coefficients") {
  Gen g(102);
  using IPoly = Polynomial<long long>;
  using IField = PolynomialMap<long long>;
  for (int r = 0; r < 20; ++r) {
    const int n = g.integer(1, 4);
    auto field = [&] {
      std::vector<IPoly> c;
      for (int i = 0; i < n; ++i) {
        IPoly p(n);
        for (int t = 0; t < 5; ++t) {
          Exponents e(n, 0);
          for (int d = g.integer(0, 3); d > 0; --d) e[g.integer(0, n - 1)] += 1;
          p.add_term(e, g.integer(-5, 5));
        }
        c.push_back(p);
      }
      return IField(n, c);
    };
    const IField X = field(), Y = field();
    CHECK(lie_bracket(X, Y) + lie_bracket(Y, X) == IField::zero(n, n));
  }
}

TEST_CASE("Q equals Omega on random directions") {
  Gen g(103);
  Pool pool(g, 20, 60);
  for (const auto& P : pool.items) {
    for (int t = 0; t < 50; ++t) {
      const auto v = g.control(P->traj().intervals());
      const Vec z0 = g.vec(P->spec().n, -1, 1);
      const double Q = eval_Q(P->traj(), P->lin, P->form, v, z0);
      const double Om = eval_Omega(P->traj(), P->lin, P->form, transform_direction(P->traj(), P->lin, v, z0));
      CHECK(std::abs(Q - Om) <= 1e-7 * (1 + std::abs(Q)));
    }
  }
}

TEST_CASE("integral identity on random directions") {
  Gen g(104);
  Pool pool(g, 10, 60);
  for (const auto& P : pool.items) {
    for (int t = 0; t < 20; ++t) {
      const auto v = g.control(P->traj().intervals());
      const Vec z0 = g.vec(P->spec().n, -1, 1);
      CHECK(integral_identity(P->spec(), P->traj(), P->lin, P->form, v, z0).gap() <= 1e-6);
    }
  }
}

TEST_CASE("forms scale quadratically") {
  Gen g(105);
  Pool pool(g, 5, 40);
  for (const auto& P : pool.items) {
    const auto v = g.control(P->traj().intervals());
    const Vec z0 = g.vec(P->spec().n, -1, 1);
    const double c = g.uniform(-3, 3);
    std::vector<double> vc = v;
    for (auto& x : vc) x *= c;
    const double Q1 = eval_Q(P->traj(), P->lin, P->form, v, z0);
    const double Qc = eval_Q(P->traj(), P->lin, P->form, vc, c * z0);
    CHECK(std::abs(Qc - c * c * Q1) <= 1e-10 * (1 + std::abs(Qc)));
    const TransformedDirection d = transform_direction(P->traj(), P->lin, v, z0);
    const TransformedDirection dc = transform_direction(P->traj(), P->lin, vc, c * z0);
    const double O1 = eval_Omega(P->traj(), P->lin, P->form, d);
    const double Oc = eval_Omega(P->traj(), P->lin, P->form, dc);
    CHECK(std::abs(Oc - c * c * O1) <= 1e-10 * (1 + std::abs(Oc)));
    CHECK(eval_gamma(P->traj(), dc) == doctest::Approx(c * c * eval_gamma(P->traj(), d)).epsilon(1e-12));
  }
}

TEST_CASE("R assembly equals the closed form") {
  Gen g(106);
  Pool pool(g, 10, 40);
  for (const auto& P : pool.items) {
    const NodeCoefficients nc = assemble_M_R(P->spec(), P->traj(), P->lin, P->lambda, kTol);
    for (std::size_t k = 0; k < nc.R.size(); ++k) CHECK(std::abs(nc.R[k] - nc.R_cf[k]) <= 1e-8);
  }
}

TEST_CASE("costate densities of fitted multipliers are nonnegative") {
  for (const auto& name : registry_names()) {
    const Instance in = registry_get(name, 100);
    const FitResult f =
        fit_multiplier(in.spec, in.traj, MultiplierSeed{0.0, RowVec::Zero(in.spec.n1 + in.spec.n2), {}}, kTol);
    for (double nu : f.multiplier.measure.nu) CHECK(nu >= -1e-9);
  }
}

TEST_CASE("Rayleigh quotients of random cone directions never undercut the eigen-solve") {
  Gen g(107);
  for (double q : {-1.0, -3.0}) {
    Prepared P(synthetic::lqs(1.0, q, 1.0, 40), kTol);
    const std::vector<FormData> forms{P.form};
    const ConeBasis cone = build_cone(P.spec(), P.traj(), P.lin, forms, ConeKind::PS2, kTol);
    const NecessaryResult r = necessary_test(P.traj(), P.lin, forms, cone, kTol);
    for (int t = 0; t < 2000; ++t) {
      Vec c(cone.dim());
      for (int i = 0; i < c.size(); ++i) c(i) = g.normal();
      CHECK(c.dot(cone.Omega[0] * c) / c.dot(cone.G * c) >= r.mu_min - 1e-9);
    }
  }
}

TEST_CASE("Lagrangian remainder is third order") {
  Gen g(108);
  std::vector<Instance> ins{synthetic::nonlinear(200)};
  for (int r = 0; r < 3; ++r) ins.push_back(g.instance(2 + r, 100));
  for (auto& in : ins) {
    Prepared P(std::move(in), kTol);
    std::vector<double> v(P.traj().intervals());
    for (int k = 0; k < P.traj().intervals(); ++k) v[k] = std::sin(2.0 * P.traj().grid.t[k]) + 0.3 * g.normal();
    const auto e = lagrangian_expansion(P.spec(), P.traj(), P.lin, P.form, v, g.vec(P.spec().n, -1, 1),
                                        {1e-1, 1e-2, 1e-3});
    CHECK(e[1].ratio * 3.0 <= e[0].ratio);
    CHECK(e[2].ratio * 3.0 <= e[1].ratio);
  }
}
