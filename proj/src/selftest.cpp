#include "ocpcert/selftest.hpp"

#include <cmath>
#include <cstdio>
#include <functional>
#include <memory>
#include <numbers>
#include <random>

#include "ocpcert/properties.hpp"
#include "ocpcert/report.hpp"

namespace ocpcert {

bool SelftestResult::passed() const {
  for (const auto& p : properties) {
    if (!p.passed) return false;
  }
  return true;
}

std::string SelftestResult::text() const {
  std::string out = "selftest seed=" + std::to_string(seed) + "\n";
  int ok = 0;
  char buf[256];
  for (const auto& p : properties) {
    std::snprintf(buf, sizeof buf, "%-26s worst=%.3e limit=%.1e %s", p.name.c_str(), p.worst, p.limit,
                  p.passed ? "PASS" : "FAIL");
    out += buf;
    if (!p.detail.empty()) out += "  (" + p.detail + ")";
    out += "\n";
    ok += p.passed ? 1 : 0;
  }
  out += "summary: " + std::to_string(ok) + "/" + std::to_string(properties.size()) + " passed\n";
  return out;
}

namespace {

using Rng = std::mt19937_64;

struct Suite {
  Rng rng;
  Tolerances tol;
  bool corrupt = false;
  std::vector<PropertyResult> out;

  double uniform(double a, double b) { return std::uniform_real_distribution<double>(a, b)(rng); }
  double normal() { return std::normal_distribution<double>()(rng); }

  Vec random_vec(int n, double a = -2.0, double b = 2.0) {
    Vec v(n);
    for (int i = 0; i < n; ++i) v(i) = uniform(a, b);
    return v;
  }

  std::vector<double> random_v(int N) {
    std::vector<double> v(N);
    for (auto& x : v) x = normal();
    return v;
  }

  /// Records max(value) <= limit; exceptions count as failures.
  void check(const std::string& name, double limit, const std::function<double()>& body,
             const std::string& detail = "") {
    PropertyResult r;
    r.name = name;
    r.limit = limit;
    r.detail = detail;
    try {
      r.worst = body();
      r.passed = r.worst <= limit;
    } catch (const std::exception& e) {
      r.worst = INFINITY;
      r.passed = false;
      r.detail = e.what();
    }
    out.push_back(r);
  }

  Instance registry(const std::string& name) {
    Instance in = registry_get(name);
    if (corrupt) {
      for (int k = 1; k < in.traj.x.cols(); ++k) in.traj.x.col(k).array() += 1e-3;
    }
    return in;
  }

  Instance random_instance(int n, int N) {
    for (int attempt = 0;; ++attempt) {
      try {
        Instance in = synthetic::random_instance(rng, n, N);
        Prepared probe(in, tol);
        return in;
      } catch (const std::exception&) {
        if (attempt > 20) throw;
      }
    }
  }
};

double jacobian_fd(Suite& s) {
  double worst = 0.0;
  std::vector<VectorField> fields;
  for (const auto& name : registry_names()) {
    const Instance in = registry_get(name, 8);
    fields.push_back(in.spec.f0);
    fields.push_back(in.spec.f1);
  }
  for (int r = 0; r < 4; ++r) {
    const Instance in = s.random_instance(2 + r % 3, 8);
    fields.push_back(in.spec.f0);
    fields.push_back(in.spec.f1);
  }
  for (const auto& f : fields) {
    for (int t = 0; t < 100; ++t) {
      const Vec x = s.random_vec(f.num_vars());
      const Mat J = f.jacobian(x);
      const double h = 1e-5;
      for (int j = 0; j < f.num_vars(); ++j) {
        Vec xp = x, xm = x;
        xp(j) += h;
        xm(j) -= h;
        const Vec fd = (f(xp) - f(xm)) / (2 * h);
        worst = std::max(worst, (fd - J.col(j)).cwiseAbs().maxCoeff() / (1.0 + J.col(j).cwiseAbs().maxCoeff()));
      }
    }
  }
  return worst;
}

/// Integer-coefficient fields make bracket identities exact.
double bracket_algebra(Suite& s) {
  using IPoly = Polynomial<long long>;
  using IField = PolynomialMap<long long>;
  auto random_field = [&](int n) {
    std::vector<IPoly> comps;
    for (int i = 0; i < n; ++i) {
      IPoly p(n);
      for (int t = 0; t < 5; ++t) {
        Exponents e(n, 0);
        e[static_cast<int>(s.uniform(0, n - 1e-9))] += static_cast<int>(s.uniform(0, 3 - 1e-9));
        p.add_term(e, static_cast<long long>(s.uniform(-5, 5)));
      }
      comps.push_back(p);
    }
    return IField(n, comps);
  };
  double violations = 0.0;
  for (int r = 0; r < 10; ++r) {
    const int n = 2 + r % 3;
    const IField X = random_field(n), Y = random_field(n), Z = random_field(n);
    const long long a = static_cast<long long>(s.uniform(-4, 4)), b = static_cast<long long>(s.uniform(-4, 4));
    if (!((lie_bracket(X, Y) + lie_bracket(Y, X)) == IField::zero(n, n))) violations += 1;
    if (!(lie_bracket(X, X) == IField::zero(n, n))) violations += 1;
    if (!(lie_bracket(a * X + b * Z, Y) == a * lie_bracket(X, Y) + b * lie_bracket(Z, Y))) violations += 1;
  }
  return violations;
}

double hamiltonian_identities(Suite& s) {
  double worst = 0.0;
  for (int r = 0; r < 5; ++r) {
    const Instance in = s.random_instance(2 + r % 3, 8);
    const ProblemSpec& sp = in.spec;
    const int n = sp.n;
    for (int t = 0; t < 20; ++t) {
      const Vec x = s.random_vec(n);
      const RowVec p = s.random_vec(n).transpose();
      const double u = s.uniform(-2, 2);
      const HamiltonianEval H = eval_hamiltonian(sp, u, x, p);
      double Hxx_err = 0.0;
      Mat ref = Mat::Zero(n, n);
      for (int i = 0; i < n; ++i) {
        const Vec e = Vec::Unit(n, i);
        ref += p(i) * (sp.f0.weighted_hessian(e, x) + u * sp.f1.weighted_hessian(e, x));
      }
      Hxx_err = (H.H_xx - ref).cwiseAbs().maxCoeff();
      const Vec f = sp.f0(x) + u * sp.f1(x);
      const double e1 = std::abs(H.H - p.dot(f));
      const double e2 = std::abs(H.H_u - p.dot(sp.f1(x)));
      const double e3 = (H.H_ux - p * sp.f1.jacobian(x)).cwiseAbs().maxCoeff();
      const double e4 = (H.H_x - p * (sp.f0.jacobian(x) + u * sp.f1.jacobian(x))).cwiseAbs().maxCoeff();
      const double scale = 1.0 + std::abs(H.H) + H.H_xx.cwiseAbs().maxCoeff();
      worst = std::max({worst, e1 / scale, e2 / scale, e3 / scale, e4 / scale, Hxx_err / scale});
    }
  }
  return worst;
}

}  // namespace

SelftestResult run_selftest(std::uint64_t seed, bool corrupt) {
  Suite s{Rng(seed), Tolerances{}, corrupt, {}};
  const Tolerances& tol = s.tol;

  s.check("jacobian_vs_fd", 1e-6, [&] { return jacobian_fd(s); });
  s.check("bracket_algebra", 0.0, [&] { return bracket_algebra(s); }, "exact integer coefficients");
  s.check("hamiltonian_identities", 1e-12, [&] { return hamiltonian_identities(s); });

  s.check("dynamics_residual", tol.tol_dyn, [&] {
    double w = 0.0;
    for (const auto& name : registry_names()) w = std::max(w, dynamics_residual(s.registry(name).spec, s.registry(name).traj).value);
    return w;
  });
  s.check("reintegration", 1e-8, [&] {
    double w = 0.0;
    for (const auto& name : registry_names()) {
      const Instance in = s.registry(name);
      const Trajectory re = integrate_state(in.spec, in.traj.u, in.traj.state(0), in.traj.grid);
      w = std::max(w, (re.x - in.traj.x).cwiseAbs().maxCoeff());
    }
    return w;
  });
  s.check("feedback_law_on_C", 10.0 * tol.tol_g / tol.fo_min, [&] {
    double w = 0.0;
    for (const auto& name : registry_names()) {
      const Instance in = s.registry(name);
      const ArcIndex idx = index_arcs(in.traj);
      for (int k = 0; k < in.traj.intervals(); ++k) {
        if (in.traj.arcs[idx.interval_arc[k]].kind != ArcKind::C) continue;
        const double law = 0.5 * (constrained_control(in.spec, in.traj.state(k), tol.fo_min) +
                                  constrained_control(in.spec, in.traj.state(k + 1), tol.fo_min));
        w = std::max(w, std::abs(in.traj.u[k] - law));
      }
    }
    return w;
  });
  s.check("validate_arcs_idempotent", 0.0, [&] {
    double diff = 0.0;
    for (const auto& name : registry_names()) {
      const Instance in = s.registry(name);
      const auto a = validate_arcs(in.spec, in.traj, tol), b = validate_arcs(in.spec, in.traj, tol);
      if (a.size() != b.size()) return 1.0;
      for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i].message != b[i].message || a[i].value != b[i].value) diff += 1;
      }
    }
    return diff;
  });
  s.check("nu_nonnegative", 1e-9, [&] {
    double w = 0.0;
    for (const auto& name : registry_names()) {
      const Instance in = s.registry(name);
      const FitResult fit = fit_multiplier(in.spec, in.traj, MultiplierSeed{0.0, RowVec::Zero(in.spec.n1 + in.spec.n2), {}}, tol);
      for (double nu : fit.multiplier.measure.nu) w = std::max(w, -nu);
    }
    return w;
  }, "negative part of nu on fitted multipliers");

  // second-order suites on shared instances
  std::vector<std::unique_ptr<Prepared>> probs;
  try {
    for (const auto& name : registry_names()) probs.push_back(std::make_unique<Prepared>(registry_get(name), tol));
    probs.push_back(std::make_unique<Prepared>(synthetic::nonlinear(200), tol));
    for (int r = 0; r < 20; ++r) probs.push_back(std::make_unique<Prepared>(s.random_instance(2 + r % 3, 100), tol));
  } catch (const std::exception& e) {
    s.out.push_back({"instance_setup", INFINITY, 0.0, false, e.what()});
  }

  s.check("integral_identity", 1e-6, [&] {
    double w = 0.0;
    for (const auto& P : probs) {
      for (int t = 0; t < 20; ++t) {
        const auto v = s.random_v(P->traj().intervals());
        const Vec z0 = s.random_vec(P->spec().n, -1, 1);
        w = std::max(w, integral_identity(P->spec(), P->traj(), P->lin, P->form, v, z0).gap());
      }
    }
    return w;
  });
  s.check("lagrangian_expansion", 1.0 / 3.0, [&] {
    double w = 0.0;
    for (std::size_t i = 2; i < 5 && i < probs.size(); ++i) {
      const auto& P = *probs[i];
      std::vector<double> v(P.traj().intervals());
      for (int k = 0; k < P.traj().intervals(); ++k) v[k] = std::sin(2.0 * P.traj().grid.t[k]) + 0.3 * s.normal();
      const Vec z0 = s.random_vec(P.spec().n, -1, 1);
      const auto e = lagrangian_expansion(P.spec(), P.traj(), P.lin, P.form, v, z0, {1e-1, 1e-2, 1e-3});
      w = std::max({w, e[1].ratio / e[0].ratio, e[2].ratio / e[1].ratio});
    }
    return w;
  }, "largest ratio(eps/10)/ratio(eps)");
  s.check("transform_inverse", 1e-9, [&] {
    double w = 0.0;
    for (const auto& P : probs) {
      for (int t = 0; t < 5; ++t) {
        const auto v = s.random_v(P->traj().intervals());
        const Vec z0 = s.random_vec(P->spec().n, -1, 1);
        const TransformedDirection d = transform_direction(P->traj(), P->lin, v, z0);
        const Mat xi = propagate_xi(P->lin, d.y_begin, d.y_end, z0);
        const Mat z = linearized_state(P->lin, v, z0);
        double scale = 1.0 + z.cwiseAbs().maxCoeff();
        w = std::max(w, (xi - d.xi).cwiseAbs().maxCoeff() / scale);
      }
    }
    return w;
  });
  s.check("q_equals_omega", 1e-7, [&] {
    double w = 0.0;
    for (const auto& P : probs) {
      for (int t = 0; t < 50; ++t) {
        const auto v = s.random_v(P->traj().intervals());
        const Vec z0 = s.random_vec(P->spec().n, -1, 1);
        const double Q = eval_Q(P->traj(), P->lin, P->form, v, z0);
        const double Om = eval_Omega(P->traj(), P->lin, P->form, transform_direction(P->traj(), P->lin, v, z0));
        w = std::max(w, std::abs(Q - Om) / (1.0 + std::abs(Q)));
      }
    }
    return w;
  });
  s.check("homogeneity", 1e-10, [&] {
    double w = 0.0;
    for (const auto& P : probs) {
      const auto v = s.random_v(P->traj().intervals());
      const Vec z0 = s.random_vec(P->spec().n, -1, 1);
      std::vector<double> v2 = v;
      for (auto& x : v2) x *= 2.0;
      const double Q1 = eval_Q(P->traj(), P->lin, P->form, v, z0);
      const double Q2 = eval_Q(P->traj(), P->lin, P->form, v2, 2.0 * z0);
      TransformedDirection d = transform_direction(P->traj(), P->lin, v, z0);
      const double O1 = eval_Omega(P->traj(), P->lin, P->form, d);
      d.xi *= 2.0;
      d.h *= 2.0;
      for (auto& y : d.y_begin) y *= 2.0;
      for (auto& y : d.y_end) y *= 2.0;
      const double O2 = eval_Omega(P->traj(), P->lin, P->form, d);
      w = std::max({w, std::abs(Q2 - 4 * Q1) / (1 + std::abs(Q2)), std::abs(O2 - 4 * O1) / (1 + std::abs(O2))});
    }
    return w;
  });
  s.check("E_equals_bracket", 1e-9, [&] {
    double w = 0.0;
    for (const auto& P : probs) {
      for (int k = 0; k <= P->traj().intervals(); ++k) {
        w = std::max(w, (P->lin.E(k) - P->spec().bracket01()(P->traj().state(k))).cwiseAbs().maxCoeff());
      }
    }
    return w;
  });
  s.check("R_closed_form", 1e-8, [&] {
    double w = 0.0;
    for (const auto& P : probs) {
      const NodeCoefficients nc = assemble_M_R(P->spec(), P->traj(), P->lin, P->lambda, tol);
      for (std::size_t k = 0; k < nc.R.size(); ++k) w = std::max(w, std::abs(nc.R[k] - nc.R_cf[k]));
    }
    return w;
  });
  s.check("R_control_invariance", 0.0, [&] {
    double w = 0.0;
    for (const auto& P : probs) {
      const auto& tr = P->traj();
      for (int k = 0; k < tr.intervals(); k += 7) {
        const Vec x = tr.state(k);
        const RowVec p = P->lambda.p(k);
        const double nu = P->lambda.measure.nu[k];
        const bool c = P->lin.on_c(k);
        const double a = point_coefficients(P->spec(), tr.u[k], x, p, nu, c).R_cf;
        const double b = point_coefficients(P->spec(), tr.u[k] + s.uniform(-1, 1), x, p, nu, c).R_cf;
        w = std::max(w, std::abs(a - b));
      }
    }
    return w;
  });
  s.check("witness_consistency", 1e-9, [&] {
    double w = 0.0;
    for (double q : {-1.0, -3.0}) {
      Prepared P(synthetic::lqs(1.0, q, 1.0, 50), tol);
      const std::vector<FormData> forms{P.form};
      const ConeBasis cone = build_cone(P.spec(), P.traj(), P.lin, forms, ConeKind::PS2, tol);
      const NecessaryResult r = necessary_test(P.traj(), P.lin, forms, cone, tol);
      w = std::max(w, std::abs(r.witness.rayleigh - r.witness.omega / r.witness.gamma));
    }
    return w;
  });
  s.check("rayleigh_sampling", 1e-9, [&] {
    Prepared P(synthetic::lqs(1.0, -1.0, 1.0, 50), tol);
    const std::vector<FormData> forms{P.form};
    const ConeBasis cone = build_cone(P.spec(), P.traj(), P.lin, forms, ConeKind::PS2, tol);
    const NecessaryResult r = necessary_test(P.traj(), P.lin, forms, cone, tol);
    double below = 0.0;
    for (int t = 0; t < 10000; ++t) {
      Vec c(cone.dim());
      for (int i = 0; i < c.size(); ++i) c(i) = s.normal();
      const double q = c.dot(cone.Omega[0] * c) / c.dot(cone.G * c);
      below = std::max(below, r.mu_min - q);
    }
    return below;
  }, "10000 random cone directions never beat the eigen-solve");
  s.check("grid_refinement", 0.0, [&] {
    const std::vector<int> Ns{25, 50, 100, 200};
    std::vector<double> mu, rho;
    for (int N : Ns) {
      Prepared F(synthetic::lqs(1.0, -3.0, 1.0, N), tol);
      Prepared P(synthetic::lqs(1.0, -1.0, 1.0, N), tol);
      const std::vector<FormData> ff{F.form}, pf{P.form};
      mu.push_back(necessary_test(F.traj(), F.lin, ff,
                                  build_cone(F.spec(), F.traj(), F.lin, ff, ConeKind::PS2, tol), tol).mu_min);
      rho.push_back(sufficient_test(P.spec(), P.traj(), P.lin, pf,
                                    build_cone(P.spec(), P.traj(), P.lin, pf, ConeKind::Pstar2, tol), tol).rho_best);
    }
    double off = 0.0;
    for (const auto* seq : {&mu, &rho}) {
      for (std::size_t i = 0; i + 2 < seq->size(); ++i) {
        const double ratio = ((*seq)[i + 1] - (*seq)[i]) / ((*seq)[i + 2] - (*seq)[i + 1]);
        off = std::max(off, std::max(2.5 - ratio, ratio - 6.0));
      }
    }
    return std::max(off, 0.0);
  }, "distance of the step ratios from [2.5, 6]");
  s.check("file_roundtrip", 0.0, [&] {
    double bad = 0.0;
    for (const auto& name : registry_names()) {
      const Instance in = registry_get(name, 40);
      const std::string p1 = serialize_problem(in.spec), t1 = serialize_trajectory(in.traj);
      if (serialize_problem(parse_problem(p1)) != p1) bad += 1;
      if (serialize_trajectory(parse_trajectory(t1)) != t1) bad += 1;
      if (!(parse_problem(p1) == in.spec)) bad += 1;
    }
    return bad;
  });
  s.check("report_roundtrip", 0.0, [&] {
    CertifyOptions o;
    o.registry = "REG1";
    o.order = Order::Sufficient;
    o.grid = 40;
    const std::string a = serialize_report(run_certify(o).report);
    return serialize_report(parse_report(a)) == a ? 0.0 : 1.0;
  });

  SelftestResult res;
  res.seed = seed;
  res.properties = std::move(s.out);
  return res;
}

}  // namespace ocpcert
