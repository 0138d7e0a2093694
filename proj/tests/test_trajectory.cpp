#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>

#include "ocpcert/registry.hpp"
#include "ocpcert/trajectory.hpp"
#include "support.hpp"

using namespace ocpcert;
using testing_support::Gen;

namespace {

bool has_violation(const std::vector<Finding>& f, FindingKind kind) {
  return std::any_of(f.begin(), f.end(), [&](const Finding& x) { return x.kind == kind && x.violation; });
}
int violations(const std::vector<Finding>& f) {
  return static_cast<int>(std::count_if(f.begin(), f.end(), [](const Finding& x) { return x.violation; }));
}

}  // namespace

TEST_CASE("grid basics") {
  const Grid g = Grid::uniform(2.0, 8);
  CHECK(g.nodes() == 9);
  CHECK(g.step(3) == doctest::Approx(0.25));
  CHECK(g.find_node(1.0) == 4);
  CHECK(g.find_node(1.0 + 1e-12) == 4);
  CHECK(g.find_node(1.1) == -1);
  Grid bad = g;
  bad.t[3] = bad.t[2];
  CHECK_THROWS_AS(bad.validate(), ValidationError);
  CHECK_THROWS_AS(Grid::uniform(1.0, 0), ValidationError);
}

TEST_CASE("REG1 state is reproduced exactly by RK4") {
  const Instance in = registry_get("REG1");
  const Trajectory re = integrate_state(in.spec, in.traj.u, in.traj.state(0), in.traj.grid);
  CHECK(re.x(0, 200) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(std::abs(re.x(1, 200) - 0.5) <= 1e-8);
  CHECK(std::abs(re.x(0, 400)) <= 1e-8);
  CHECK(std::abs(re.x(1, 400) - 0.5) <= 1e-8);
  CHECK(dynamics_residual(in.spec, in.traj).value <= 1e-12);
}

TEST_CASE("zero dynamics keep the state constant") {
  ProblemSpec s;
  s.n = 2;
  s.f0 = VectorField::zero(2, 2);
  s.f1 = VectorField::zero(2, 2);
  s.g = Poly::constant(2, -1.0);
  s.phi = Poly(4);
  s.Phi = PolyMap::zero(0, 4);
  s.finalize();
  Vec x0(2);
  x0 << 0.3, -4.0;
  const Trajectory tr = integrate_state(s, std::vector<double>(10, 1.0), x0, Grid::uniform(1.0, 10));
  for (int k = 0; k <= 10; ++k) CHECK(tr.state(k) == x0);
}

TEST_CASE("CB1 state on the constrained arc") {
  const Instance in = registry_get("CB1", 400);
  const int k15 = in.traj.grid.find_node(1.5);
  REQUIRE(k15 == 300);
  CHECK(std::abs(in.traj.x(0, k15) + 0.25) <= 1e-7);
  // the midpoint-sampled control gives a discrete cost 5/24 - h^2/12
  const double h = 2.0 / 400;
  CHECK(std::abs(in.traj.x(2, 400) - (5.0 / 24.0 - h * h / 12.0)) <= 1e-12);
}

TEST_CASE("blow-up is reported with the node") {
  ProblemSpec s;
  s.n = 1;
  Poly x = Poly::variable(1, 0);
  s.f0 = make_map(1, {x * x * x});
  s.f1 = VectorField::zero(1, 1);
  s.g = Poly::constant(1, -1.0);
  s.phi = Poly(2);
  s.Phi = PolyMap::zero(0, 2);
  s.finalize();
  try {
    integrate_state(s, std::vector<double>(50, 0.0), Vec::Constant(1, 100.0), Grid::uniform(1.0, 50));
    FAIL("expected NumericalError");
  } catch (const NumericalError& e) {
    CHECK(e.node > 0);
    CHECK(std::string(e.what()).find("at node") != std::string::npos);
  }
  CHECK_THROWS_AS(integrate_state(s, std::vector<double>(3, 0.0), Vec::Ones(1), Grid::uniform(1.0, 50)),
                  DimensionError);
}

TEST_CASE("registry arcs validate cleanly") {
  for (const auto& name : registry_names()) {
    const Instance in = registry_get(name);
    const auto f = validate_arcs(in.spec, in.traj, Tolerances{});
    CHECK_MESSAGE(violations(f) == 0, name);
  }
  // CB1 exits C with the control already at u_min
  const Instance cb = registry_get("CB1");
  const auto f = validate_arcs(cb.spec, cb.traj, Tolerances{});
  CHECK(std::any_of(f.begin(), f.end(), [](const Finding& x) {
    return x.kind == FindingKind::Note && x.message.find("t=1.5") != std::string::npos;
  }));
}

TEST_CASE("validate_arcs flags the structural defects") {
  const Tolerances tol;
  Instance in = registry_get("REG1", 40);

  Instance a = in;
  a.traj.u[3] = -0.5;  // off the bound on B-
  CHECK(has_violation(validate_arcs(a.spec, a.traj, tol), FindingKind::BoundMismatch));

  Instance b = in;
  b.traj.arcs[1].t_start = 1.05;  // not a node
  CHECK(has_violation(validate_arcs(b.spec, b.traj, tol), FindingKind::Partition));

  Instance c = in;
  c.traj.arcs = {{ArcKind::C, 0.0, 2.0}};  // g = -x1 is inactive on [0,1)
  CHECK(has_violation(validate_arcs(c.spec, c.traj, tol), FindingKind::ConstraintActivity));

  Instance d = in;
  d.traj.arcs = {{ArcKind::S, 0.0, 1.0}, {ArcKind::C, 1.0, 2.0}};  // u = u_min on an S arc
  CHECK(has_violation(validate_arcs(d.spec, d.traj, tol), FindingKind::BoundsDistance));

  Instance e = in;
  for (int k = 20; k < 40; ++k) e.traj.u[k] = 1.5;  // C arc off the feedback law by more than 10 tol_g / fo_min
  CHECK(has_violation(validate_arcs(e.spec, e.traj, tol), FindingKind::FeedbackLaw));

  Instance f = in;
  f.traj.arcs = {{ArcKind::Bminus, 0.0, 1.0}, {ArcKind::Bminus, 1.0, 2.0}};
  CHECK(has_violation(validate_arcs(f.spec, f.traj, tol), FindingKind::Partition));
}

TEST_CASE("S-C junction without a control jump is a violation") {
  const Tolerances tol;
  Instance in = registry_get("REG1", 40);
  // C on [0,1] is wrong, but the junction test only needs continuous u at t=1
  in.traj.arcs = {{ArcKind::S, 0.0, 1.0}, {ArcKind::C, 1.0, 2.0}};
  for (int k = 0; k < 20; ++k) in.traj.u[k] = 0.0;
  CHECK(has_violation(validate_arcs(in.spec, in.traj, tol), FindingKind::JunctionJump));
}

TEST_CASE("validate_arcs is pure") {
  Gen g(3);
  for (int r = 0; r < 5; ++r) {
    const Instance in = g.instance(2 + r % 2, 20);
    const auto a = validate_arcs(in.spec, in.traj, Tolerances{});
    const auto b = validate_arcs(in.spec, in.traj, Tolerances{});
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
      CHECK(a[i].message == b[i].message);
      CHECK(a[i].value == b[i].value);
    }
  }
}

TEST_CASE("first-order constraint margin") {
  const Tolerances tol;
  const Instance r = registry_get("REG1");
  const FirstOrderMargin m = check_first_order(r.spec, r.traj, tol);
  CHECK(m.passed);
  CHECK(m.margin == doctest::Approx(1.0));
  const Instance c = registry_get("CB1");
  CHECK(check_first_order(c.spec, c.traj, tol).margin == doctest::Approx(1.0));

  Instance deg = r;  // g depends on x2 only, f1 = e1
  deg.spec.g = -Poly::variable(2, 1);
  deg.spec.finalize();
  const FirstOrderMargin d = check_first_order(deg.spec, deg.traj, tol);
  CHECK_FALSE(d.passed);
  CHECK(d.margin == 0.0);

  const Instance b = synthetic::bang_only(10);
  const FirstOrderMargin n = check_first_order(b.spec, b.traj, tol);
  CHECK(n.passed);
  CHECK(n.margin == kInf);
  CHECK(n.note == "no C arc");
}

TEST_CASE("constrained feedback control") {
  const Instance r = registry_get("REG1");
  CHECK(constrained_control(r.spec, r.traj.state(300), 1e-6) == 0.0);
  const Instance c = registry_get("CB1");
  for (int k = 200; k <= 300; k += 25) {
    CHECK(constrained_control(c.spec, c.traj.state(k), 1e-6) ==
          doctest::Approx(-2.0 * (c.traj.grid.t[k] - 1.0)).epsilon(1e-9));
  }
  Instance deg = r;
  deg.spec.g = -Poly::variable(2, 1);
  deg.spec.finalize();
  CHECK_THROWS_AS(constrained_control(deg.spec, deg.traj.state(300), 1e-6), NumericalError);
}

TEST_CASE("C-arc controls follow the feedback law") {
  for (const auto& name : registry_names()) {
    const Instance in = registry_get(name);
    const ArcIndex idx = index_arcs(in.traj);
    for (int k = 0; k < in.traj.intervals(); ++k) {
      if (in.traj.arcs[idx.interval_arc[k]].kind != ArcKind::C) continue;
      const double law = 0.5 * (constrained_control(in.spec, in.traj.state(k), 1e-6) +
                                 constrained_control(in.spec, in.traj.state(k + 1), 1e-6));
      CHECK(std::abs(in.traj.u[k] - law) <= 1e-9);
    }
  }
}

TEST_CASE("one-sided control limits at junctions") {
  const Instance c = registry_get("CB1");
  const ArcIndex idx = index_arcs(c.traj);
  const ControlLimits at1 = control_limits(c.spec, c.traj, idx, 200, 1e-6);
  CHECK(at1.left == -1.0);
  CHECK(at1.right == doctest::Approx(0.0));
  const ControlLimits at15 = control_limits(c.spec, c.traj, idx, 300, 1e-6);
  CHECK(at15.jump() == doctest::Approx(0.0));
}

TEST_CASE("random reintegration reproduces the stored states") {
  Gen g(4);
  for (int r = 0; r < 5; ++r) {
    const Instance in = g.instance(2 + r % 3, 40);
    const Trajectory re = integrate_state(in.spec, in.traj.u, in.traj.state(0), in.traj.grid);
    CHECK((re.x - in.traj.x).cwiseAbs().maxCoeff() <= 1e-12);
  }
}
