#include "ocpcert/registry.hpp"

#include <cmath>
#include <numbers>

namespace ocpcert {

namespace {

Poly var(int n, int i) { return Poly::variable(n, i); }
Poly cst(int n, double c) { return Poly::constant(n, c); }

Trajectory simulate(const ProblemSpec& spec, const Grid& grid, std::vector<double> u, const Vec& x0,
                    ArcStructure arcs) {
  Trajectory tr = integrate_state(spec, u, x0, grid);
  tr.arcs = std::move(arcs);
  return tr;
}

/// Fixes x(0) = x0 through the first n rows of Phi.
std::vector<Poly> fixed_initial_state(int n, const Vec& x0) {
  std::vector<Poly> rows;
  for (int i = 0; i < n; ++i) rows.push_back(var(2 * n, i) - cst(2 * n, x0(i)));
  return rows;
}

/// The first n rows of Phi fix x(0) and leave p unaffected, so their
/// multipliers can absorb the initial boundary residual.
void close_initial_boundary(Instance& in) {
  const Multiplier m = integrate_costate(in.spec, in.traj, in.seed.beta, in.seed.psi,
                                         resolve_atoms(in.traj, in.seed.atoms), Tolerances{});
  in.seed.psi.head(in.spec.n) -= m.p0_residual;
}

Instance reg1(int N) {
  ProblemSpec s;
  s.name = "REG1";
  s.n = 2;
  s.n1 = 2;
  s.f0 = make_map(2, {Poly(2), var(2, 0)});
  s.f1 = make_map(2, {cst(2, 1.0), Poly(2)});
  s.g = -var(2, 0);
  s.phi = var(4, 2) + var(4, 3);
  s.Phi = make_map(4, fixed_initial_state(2, Vec::Unit(2, 0)));
  s.u_min = -1.0;
  s.u_max = 1.0;
  s.T = 2.0;
  s.finalize();
  const ArcStructure arcs{{ArcKind::Bminus, 0.0, 1.0}, {ArcKind::C, 1.0, 2.0}};
  const Grid grid = arc_grid(s.T, N, arcs);
  auto u = sample_midpoints(grid, [](double t) { return t < 1.0 ? -1.0 : 0.0; });
  Instance in{s, simulate(s, grid, u, Vec::Unit(2, 0), arcs), {}};
  in.seed.beta = 1.0;
  in.seed.psi = RowVec::Constant(2, -1.0);
  in.seed.atoms = {{-1, 2.0, 1.0}};
  return in;
}

Instance cb1(int N) {
  ProblemSpec s;
  s.name = "CB1";
  s.n = 3;
  s.n1 = 3;
  s.f0 = make_map(3, {Poly(3), cst(3, 1.0), var(3, 0)});
  s.f1 = make_map(3, {cst(3, 1.0), Poly(3), Poly(3)});
  // -(x2 - 1)^2 - x1
  const Poly d = var(3, 1) - cst(3, 1.0);
  s.g = -(d * d) - var(3, 0);
  s.phi = var(6, 5);
  s.Phi = make_map(6, fixed_initial_state(3, Vec::Unit(3, 0)));
  s.u_min = -1.0;
  s.u_max = 1.0;
  s.T = 2.0;
  s.finalize();
  const ArcStructure arcs{{ArcKind::Bminus, 0.0, 1.0}, {ArcKind::C, 1.0, 1.5}, {ArcKind::Bminus, 1.5, 2.0}};
  const Grid grid = arc_grid(s.T, N, arcs);
  auto u = sample_midpoints(grid, [](double t) { return (t > 1.0 && t < 1.5) ? -2.0 * (t - 1.0) : -1.0; });
  Instance in{s, simulate(s, grid, u, Vec::Unit(3, 0), arcs), {}};
  in.seed.beta = 1.0;
  in.seed.psi = RowVec(3);
  in.seed.psi << -1.0, 0.75, -1.0;
  in.seed.atoms = {{-1, 1.5, 0.5}};
  return in;
}

}  // namespace

Grid arc_grid(double T, int N, const ArcStructure& arcs) {
  Grid g = Grid::uniform(T, N);
  for (std::size_t j = 1; j < arcs.size(); ++j) {
    const int k = g.find_node(arcs[j].t_start);
    if (k < 0) {
      throw ValidationError("junction t=" + std::to_string(arcs[j].t_start) + " is not a node of the " +
                            std::to_string(N) + "-interval grid");
    }
    g.t[k] = arcs[j].t_start;
  }
  return g;
}

std::vector<std::string> registry_names() { return {"REG1", "CB1"}; }

Instance registry_get(const std::string& name, int N) {
  if (N < 2) throw std::invalid_argument("grid needs at least 2 intervals");
  if (name == "REG1") return reg1(N);
  if (name == "CB1") return cb1(N);
  throw std::invalid_argument("unknown registry instance '" + name + "' (known: REG1, CB1)");
}

namespace synthetic {

Instance lqs(double c, double q, double T, int N) {
  ProblemSpec s;
  s.name = "LQS";
  s.n = 3;
  s.n1 = 4;
  const Poly x1 = var(3, 0), x2 = var(3, 1);
  s.f0 = make_map(3, {Poly(3), x1, 0.5 * c * (x1 * x1) + 0.5 * q * (x2 * x2)});
  s.f1 = make_map(3, {cst(3, 1.0), Poly(3), Poly(3)});
  s.g = cst(3, -1.0);
  s.phi = var(6, 5);
  auto rows = fixed_initial_state(3, Vec::Zero(3));
  rows.push_back(var(6, 3));
  s.Phi = make_map(6, rows);
  s.T = T;
  s.finalize();
  const ArcStructure arcs{{ArcKind::S, 0.0, T}};
  const Grid grid = Grid::uniform(T, N);
  Instance in{s, simulate(s, grid, std::vector<double>(N, 0.0), Vec::Zero(3), arcs), {}};
  in.seed.beta = 1.0;
  in.seed.psi = RowVec::Zero(4);
  in.seed.psi(2) = -1.0;
  return in;
}

Instance bs_regulator(int N) {
  ProblemSpec s;
  s.name = "BS";
  s.n = 2;
  s.n1 = 3;
  const Poly x1 = var(2, 0);
  s.f0 = make_map(2, {Poly(2), x1 * x1});
  s.f1 = make_map(2, {cst(2, 1.0), Poly(2)});
  s.g = cst(2, -1.0);
  s.phi = var(4, 3);
  auto rows = fixed_initial_state(2, Vec::Unit(2, 0));
  rows.push_back(var(4, 2));
  s.Phi = make_map(4, rows);
  s.u_min = -1.0;
  s.u_max = 1.0;
  s.T = 2.0;
  s.finalize();
  const ArcStructure arcs{{ArcKind::Bminus, 0.0, 1.0}, {ArcKind::S, 1.0, 2.0}};
  const Grid grid = arc_grid(s.T, N, arcs);
  auto u = sample_midpoints(grid, [](double t) { return t < 1.0 ? -1.0 : 0.0; });
  Instance in{s, simulate(s, grid, u, Vec::Unit(2, 0), arcs), {}};
  in.seed.beta = 1.0;
  in.seed.psi = RowVec::Zero(3);
  in.seed.psi << -1.0, -1.0, 0.0;
  return in;
}

Instance curv1(double b, int N) {
  const double a = 0.5;
  ProblemSpec s;
  s.name = "CURV1";
  s.n = 3;
  s.n1 = 3;
  const Poly x1 = var(3, 0), x2 = var(3, 1);
  s.f0 = make_map(3, {Poly(3), cst(3, 1.0) + b * x1, x1 + a * (x1 * x1)});
  s.f1 = make_map(3, {cst(3, 1.0), Poly(3), Poly(3)});
  s.g = -0.25 * (x2 * x2) - x1;
  s.phi = var(6, 5);
  Vec x0(3);
  x0 << 1.0, -1.0 - 0.5 * b, 0.0;
  s.Phi = make_map(6, fixed_initial_state(3, x0));
  s.u_min = -1.0;
  s.u_max = 1.0;
  s.T = 2.0;
  s.finalize();
  const ArcStructure arcs{{ArcKind::Bminus, 0.0, 1.0}, {ArcKind::C, 1.0, 2.0}};
  const Grid grid = arc_grid(s.T, N, arcs);
  Trajectory tr;
  tr.grid = grid;
  tr.arcs = arcs;
  tr.u.resize(N);
  tr.x.resize(3, N + 1);
  tr.x.col(0) = x0;
  for (int k = 0; k < N; ++k) {
    const double h = grid.step(k);
    const Vec xk = tr.x.col(k);
    double u = -1.0;
    if (grid.t[k] >= 1.0 - 1e-12) {
      // secant iteration on u -> g(RK4(x_k, u))
      u = constrained_control(s, xk, 1e-12);
      double u_prev = u + 1e-3;
      double g_prev = g_value(s, rk4_step(s, u_prev, xk, h));
      for (int it = 0; it < 50; ++it) {
        const double gu = g_value(s, rk4_step(s, u, xk, h));
        if (std::abs(gu) < 1e-15 || gu == g_prev) break;
        const double next = u - gu * (u - u_prev) / (gu - g_prev);
        u_prev = u;
        g_prev = gu;
        u = next;
      }
    }
    tr.u[k] = u;
    tr.x.col(k + 1) = rk4_step(s, u, xk, h);
  }
  Instance in{s, tr, {}};
  in.seed.beta = 1.0;
  in.seed.psi = RowVec::Zero(3);
  return in;
}

Instance bang_only(int N) {
  ProblemSpec s;
  s.name = "BANG";
  s.n = 2;
  s.n1 = 2;
  s.n2 = 1;
  s.f0 = make_map(2, {Poly(2), var(2, 0)});
  s.f1 = make_map(2, {cst(2, 1.0), Poly(2)});
  s.g = cst(2, -1.0);
  s.phi = var(4, 3);
  auto rows = fixed_initial_state(2, Vec::Unit(2, 0));
  rows.push_back(var(4, 2) - cst(4, 10.0));
  s.Phi = make_map(4, rows);
  s.u_min = -1.0;
  s.u_max = 1.0;
  s.T = 1.0;
  s.finalize();
  const ArcStructure arcs{{ArcKind::Bminus, 0.0, 1.0}};
  const Grid grid = Grid::uniform(1.0, N);
  Instance in{s, simulate(s, grid, std::vector<double>(N, -1.0), Vec::Unit(2, 0), arcs), {}};
  in.seed.beta = 1.0;
  in.seed.psi = RowVec::Zero(3);
  in.seed.psi << -1.0, -1.0, 0.0;
  return in;
}

Instance nonlinear(int N) {
  ProblemSpec s;
  s.name = "NL1";
  s.n = 3;
  s.n1 = 3;
  const Poly x1 = var(3, 0), x2 = var(3, 1), x3 = var(3, 2);
  s.f0 = make_map(3, {-0.5 * x2, x1 + 0.3 * (x1 * x1), x1 * x2 + 0.5 * (x2 * x3)});
  s.f1 = make_map(3, {cst(3, 1.0) + 0.2 * x2, 0.1 * x1, Poly(3)});
  s.g = cst(3, -1.0);
  const Poly yT2 = var(6, 4), yT3 = var(6, 5);
  s.phi = yT3 + 0.5 * (yT2 * yT2) + 0.2 * (yT2 * yT3);
  Vec x0(3);
  x0 << 0.3, -0.2, 0.1;
  s.Phi = make_map(6, fixed_initial_state(3, x0));
  s.T = 1.0;
  s.finalize();
  const ArcStructure arcs{{ArcKind::S, 0.0, 1.0}};
  const Grid grid = Grid::uniform(1.0, N);
  auto u = sample_midpoints(grid, [](double t) { return 0.5 * std::cos(3.0 * t); });
  Instance in{s, simulate(s, grid, u, x0, arcs), {}};
  in.seed.beta = 1.0;
  in.seed.psi = RowVec::Zero(3);
  close_initial_boundary(in);
  return in;
}

Instance random_instance(std::mt19937_64& rng, int n, int N) {
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  auto random_quadratic = [&](int nv, double scale) {
    Poly p(nv);
    p.add_term(Exponents(nv, 0), scale * U(rng));
    for (int i = 0; i < nv; ++i) {
      Exponents e(nv, 0);
      e[i] = 1;
      p.add_term(e, scale * U(rng));
      for (int j = i; j < nv; ++j) {
        Exponents f = e;
        f[j] += 1;
        p.add_term(f, scale * U(rng));
      }
    }
    return p;
  };
  ProblemSpec s;
  s.name = "RAND";
  s.n = n;
  s.n1 = n + 1;
  s.n2 = 1;
  std::vector<Poly> f0, f1;
  for (int i = 0; i < n; ++i) {
    f0.push_back(random_quadratic(n, 0.5));
    Poly c = random_quadratic(n, 0.2);
    if (i == 0) c += Poly::constant(n, 1.0);
    f1.push_back(c);
  }
  s.f0 = make_map(n, f0);
  s.f1 = make_map(n, f1);
  s.g = random_quadratic(n, 0.2) - var(n, 0);
  s.phi = random_quadratic(2 * n, 1.0);
  Vec x0(n);
  for (int i = 0; i < n; ++i) x0(i) = 0.5 * U(rng);
  auto rows = fixed_initial_state(n, x0);
  rows.push_back(random_quadratic(2 * n, 1.0));
  rows.push_back(random_quadratic(2 * n, 1.0));
  s.Phi = make_map(2 * n, rows);
  s.T = 1.0;
  s.finalize();
  const ArcStructure arcs{{ArcKind::S, 0.0, 0.25}, {ArcKind::C, 0.25, 0.75}, {ArcKind::S, 0.75, 1.0}};
  const Grid grid = arc_grid(1.0, N, arcs);
  const double a = U(rng), w = 1.0 + 2.0 * std::abs(U(rng));
  auto u = sample_midpoints(grid, [&](double t) { return a * std::cos(w * t); });
  Instance in{s, simulate(s, grid, u, x0, arcs), {}};
  in.seed.beta = 0.5 + 0.5 * std::abs(U(rng));
  in.seed.psi = RowVec::Zero(n + 2);
  in.seed.psi(n) = U(rng);
  in.seed.psi(n + 1) = std::abs(U(rng));
  in.seed.atoms = {{-1, 0.25, std::abs(U(rng))}, {-1, 0.75, std::abs(U(rng))}, {-1, 1.0, std::abs(U(rng))}};
  close_initial_boundary(in);
  return in;
}

}  // namespace synthetic

}  // namespace ocpcert
