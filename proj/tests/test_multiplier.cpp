#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "ocpcert/multiplier.hpp"
#include "ocpcert/registry.hpp"
#include "support.hpp"

using namespace ocpcert;
using testing_support::Gen;

namespace {

Multiplier seeded(const Instance& in) {
  return integrate_costate(in.spec, in.traj, in.seed.beta, in.seed.psi, resolve_atoms(in.traj, in.seed.atoms),
                           Tolerances{});
}

MultiplierSeed zero_seed(const ProblemSpec& s) { return {0.0, RowVec::Zero(s.n1 + s.n2), {}}; }

}  // namespace

TEST_CASE("nu from the costate") {
  const Instance r = registry_get("REG1");
  RowVec p(2);
  p << 0, 1;
  CHECK(compute_nu(r.spec, r.traj.state(300), p, 1e-6) == doctest::Approx(1.0));
  CHECK(compute_nu(r.spec, r.traj.state(300), RowVec::Zero(2), 1e-6) == 0.0);
  Instance deg = r;
  deg.spec.g = -Poly::variable(2, 1);
  deg.spec.finalize();
  CHECK_THROWS_AS(compute_nu(deg.spec, deg.traj.state(300), p, 1e-6), NumericalError);
}

TEST_CASE("atoms must sit at junctions or endpoints") {
  const Instance r = registry_get("REG1");
  CHECK(resolve_atoms(r.traj, {{-1, 1.0, 0.2}}).at(0).node == 200);
  CHECK(resolve_atoms(r.traj, {{-1, 0.0, 0.2}}).at(0).node == 0);
  CHECK(resolve_atoms(r.traj, {{-1, 2.0, 0.2}}).at(0).node == 400);
  CHECK_THROWS_AS(resolve_atoms(r.traj, {{-1, 0.5, 0.2}}), ValidationError);
}

TEST_CASE("REG1 costate by hand") {
  // B-: p1' = -p2, p2' = 0;  C: generator vanishes;  atom 1 at T with g' = (-1, 0)
  const Instance r = registry_get("REG1");
  const Multiplier m = seeded(r);
  for (int k = 0; k <= 400; k += 10) {
    const double t = r.traj.grid.t[k];
    const RowVec p = m.p_left.row(k);
    CHECK(std::abs(p(1) - 1.0) <= 1e-9);
    CHECK(std::abs(p(0) - (t < 1.0 ? 1.0 - t : 0.0)) <= 1e-9);
    if (t > 1.0) CHECK(std::abs(m.measure.nu[k] - 1.0) <= 1e-9);
    if (t < 1.0) CHECK(m.measure.nu[k] == 0.0);
  }
  CHECK(m.p_right(400, 0) == doctest::Approx(1.0));
  CHECK(m.p_right(400, 1) == doctest::Approx(1.0));
  CHECK(m.p0_residual.cwiseAbs().maxCoeff() <= 1e-12);
  CHECK(m.measure.mass_at(400) == 1.0);
  CHECK(m.measure.mass_at(200) == 0.0);
}

TEST_CASE("CB1 costate by hand") {
  // B- on [1.5,2]: p1 = 2 - t; atom 1/2 at 1.5 with g' = (-1,-1,0);
  // C: p1 = 0, p2 = -3/4 + (t-1)^2, nu = 1;  B- on [0,1]: p1 = 1 - t, p2 = -3/4
  const Instance c = registry_get("CB1");
  const Multiplier m = seeded(c);
  for (int k = 0; k <= 400; k += 5) {
    const double t = c.traj.grid.t[k];
    const RowVec p = m.p_right.row(std::min(k, 399));
    if (k == 400) break;
    double p1, p2;
    if (t < 1.0) {
      p1 = 1.0 - t;
      p2 = -0.75;
    } else if (t < 1.5) {
      p1 = 0.0;
      p2 = -0.75 + (t - 1.0) * (t - 1.0);
      CHECK(std::abs(m.measure.nu[k] - 1.0) <= 1e-6);
    } else {
      p1 = 2.0 - t;
      p2 = 0.0;
    }
    CHECK(std::abs(p(0) - p1) <= 1e-6);
    CHECK(std::abs(p(1) - p2) <= 1e-6);
    CHECK(std::abs(p(2) - 1.0) <= 1e-12);
  }
  CHECK(m.p0_residual.cwiseAbs().maxCoeff() <= 1e-6);
}

TEST_CASE("REG1 fit from a zero seed") {
  const Instance r = registry_get("REG1");
  const FitResult f = fit_multiplier(r.spec, r.traj, zero_seed(r.spec), Tolerances{});
  const Multiplier& m = f.multiplier;
  CHECK(f.residual <= 1e-8);
  CHECK(m.beta == doctest::Approx(1.0));
  CHECK(m.psi(0) == doctest::Approx(-1.0));
  CHECK(m.psi(1) == doctest::Approx(-1.0));
  REQUIRE(m.measure.atoms.size() == 1);
  CHECK(m.measure.atoms[0].node == 400);
  CHECK(std::abs(m.measure.atoms[0].mass - 1.0) <= 1e-6);
  for (int k = 0; k <= 400; ++k) CHECK(std::abs(m.p_left(k, 1) - 1.0) <= 1e-6);
  for (int k = 201; k < 400; ++k) CHECK(std::abs(m.p_right(k, 0)) <= 1e-6);
}

TEST_CASE("CB1 fit reproduces the seed multiplier") {
  const Instance c = registry_get("CB1");
  const Multiplier ref = seeded(c);
  const FitResult f = fit_multiplier(c.spec, c.traj, zero_seed(c.spec), Tolerances{});
  CHECK(f.residual <= 1e-6);
  CHECK((f.multiplier.p_right - ref.p_right).cwiseAbs().maxCoeff() <= 1e-6);
  CHECK(f.multiplier.measure.mass_at(300) == doctest::Approx(0.5));
  const StationarityReport st = check_stationarity(c.spec, c.traj, f.multiplier, Tolerances{});
  CHECK(st.passed);
}

TEST_CASE("fit without state constraint activity has no atoms") {
  const Instance b = synthetic::bang_only(50);
  const FitResult f = fit_multiplier(b.spec, b.traj, zero_seed(b.spec), Tolerances{});
  CHECK(f.multiplier.measure.atoms.empty());
  CHECK(f.multiplier.psi(0) == doctest::Approx(-1.0));
  CHECK(f.multiplier.psi(1) == doctest::Approx(-1.0));
  CHECK(f.multiplier.psi(2) == 0.0);
}

TEST_CASE("fit fails when no multiplier exists") {
  // S everywhere forces p1 = 0, hence p2 = beta = 0 and no mass at T
  Instance r = registry_get("REG1", 40);
  r.traj.arcs = {{ArcKind::S, 0.0, 2.0}};
  CHECK_THROWS_AS(fit_multiplier(r.spec, r.traj, zero_seed(r.spec), Tolerances{}), FitError);
}

TEST_CASE("stationarity catches a sign flip") {
  const Instance r = registry_get("REG1");
  const Multiplier m = seeded(r);
  CHECK(check_stationarity(r.spec, r.traj, m, Tolerances{}).passed);
  Multiplier flipped = m;
  flipped.p_left *= -1.0;
  flipped.p_right *= -1.0;
  const StationarityReport st = check_stationarity(r.spec, r.traj, flipped, Tolerances{});
  CHECK_FALSE(st.passed);
  CHECK_FALSE(st.arcs[0].passed);
  CHECK(st.arcs[0].worst == doctest::Approx(1.0));
  CHECK(st.arcs[1].passed);
}

TEST_CASE("jump conditions at registry junctions") {
  const Instance r = registry_get("REG1");
  const JumpReport jr = check_jumps(r.spec, r.traj, seeded(r), Tolerances{});
  CHECK(jr.passed);
  REQUIRE(jr.rows.size() == 2);
  CHECK(jr.rows[0].node == 200);
  CHECK(jr.rows[0].du == doctest::Approx(1.0));
  CHECK(jr.rows[0].mass == 0.0);  // mu continuous at the junction
  CHECK(std::abs(jr.rows[0].dHu) <= 1e-12);
  CHECK_FALSE(jr.rows[1].interior);
  CHECK(jr.rows[1].mass == 1.0);
  CHECK(jr.rows[1].dp_residual <= 1e-12);

  const Instance c = registry_get("CB1");
  const JumpReport jc = check_jumps(c.spec, c.traj, seeded(c), Tolerances{});
  CHECK(jc.passed);
  REQUIRE(jc.rows.size() == 2);
  CHECK(jc.rows[1].mass == 0.5);
  CHECK(jc.rows[1].dHu == doctest::Approx(0.5));
  CHECK(std::abs(jc.rows[1].du) <= 1e-9);

  const Instance b = synthetic::bang_only(20);
  CHECK(check_jumps(b.spec, b.traj, seeded(b), Tolerances{}).rows.empty());
}

TEST_CASE("a mass at a junction where u jumps breaks the jump conditions") {
  Instance r = registry_get("REG1");
  r.seed.atoms.push_back({-1, 1.0, 0.3});
  const JumpReport jr = check_jumps(r.spec, r.traj, seeded(r), Tolerances{});
  CHECK_FALSE(jr.passed);
  CHECK(jr.rows[0].continuity_required);
}

TEST_CASE("strict complementarity") {
  const Tolerances tol;
  const Instance r = registry_get("REG1");
  const ComplementarityReport rr = check_strict_complementarity(r.spec, r.traj, {seeded(r)}, tol);
  CHECK(rr.passed());
  CHECK(rr.rows[0].margin == doctest::Approx(0.005));
  CHECK(rr.rows[1].where == "t=0");
  CHECK(rr.weak_min_nu == doctest::Approx(1.0));

  // a terminal B- arc with H_u(T) = p1(T) = 0
  const Instance c = registry_get("CB1");
  const ComplementarityReport rc = check_strict_complementarity(c.spec, c.traj, {seeded(c)}, tol);
  CHECK_FALSE(rc.strict_passed);
  CHECK(rc.rows.back().where == "t=T");
  CHECK(rc.rows.back().margin == doctest::Approx(0.0));
  CHECK(rc.weak_passed);

  const Instance l = synthetic::lqs(1.0, -1.0, 1.0, 20);
  const ComplementarityReport rl = check_strict_complementarity(l.spec, l.traj, {seeded(l)}, tol);
  CHECK(rl.rows.empty());
  CHECK(rl.passed());

  Instance z = r;
  z.seed = {0.0, RowVec::Zero(2), {}};
  CHECK_FALSE(check_strict_complementarity(z.spec, z.traj, {seeded(z)}, tol).strict_passed);
  CHECK_THROWS_AS(check_strict_complementarity(r.spec, r.traj, {}, tol), std::invalid_argument);
}

TEST_CASE("multiplier validity") {
  const Tolerances tol;
  const Instance r = registry_get("REG1");
  CHECK(validate_multiplier(r.spec, r.traj, seeded(r), tol).passed);
  Instance bad = r;
  bad.seed.atoms = {{-1, 0.0, 0.5}};
  const MultiplierValidity v = validate_multiplier(bad.spec, bad.traj, seeded(bad), tol);
  CHECK_FALSE(v.passed);
  Instance zero = r;
  zero.seed = {0.0, RowVec::Zero(2), {}};
  CHECK_FALSE(validate_multiplier(zero.spec, zero.traj, seeded(zero), tol).nontrivial);
}

TEST_CASE("fitted densities are nonnegative") {
  for (const auto& name : registry_names()) {
    const Instance in = registry_get(name);
    const FitResult f = fit_multiplier(in.spec, in.traj, zero_seed(in.spec), Tolerances{});
    for (double nu : f.multiplier.measure.nu) CHECK(nu >= -1e-9);
  }
}

TEST_CASE("costate is linear in the seed") {
  Gen g(21);
  for (int r = 0; r < 3; ++r) {
    const Instance in = g.instance(2 + r, 40);
    const auto atoms = resolve_atoms(in.traj, in.seed.atoms);
    const Multiplier a = integrate_costate(in.spec, in.traj, in.seed.beta, in.seed.psi, atoms, Tolerances{});
    auto doubled = atoms;
    for (auto& x : doubled) x.mass *= 2.0;
    const Multiplier b =
        integrate_costate(in.spec, in.traj, 2.0 * in.seed.beta, 2.0 * in.seed.psi, doubled, Tolerances{});
    CHECK((b.p_left - 2.0 * a.p_left).cwiseAbs().maxCoeff() <= 1e-9 * (1 + a.p_left.cwiseAbs().maxCoeff()));
  }
}
