#pragma once

#include <random>
#include <string>
#include <vector>

#include "ocpcert/multiplier.hpp"
#include "ocpcert/problem.hpp"
#include "ocpcert/trajectory.hpp"

namespace ocpcert {

inline constexpr int kDefaultGrid = 400;

struct Instance {
  ProblemSpec spec;
  Trajectory traj;
  MultiplierSeed seed;
};

std::vector<std::string> registry_names();
/// REG1 or CB1 on a uniform grid of N intervals; junctions must be nodes.
Instance registry_get(const std::string& name, int N = kDefaultGrid);

/// Uniform grid with the arcs' junction times checked to be nodes.
Grid arc_grid(double T, int N, const ArcStructure& arcs);

/// Per-interval control from a function of the interval midpoint.
template <typename F>
std::vector<double> sample_midpoints(const Grid& grid, F&& f) {
  std::vector<double> u(grid.intervals());
  for (int k = 0; k < grid.intervals(); ++k) u[k] = f(0.5 * (grid.t[k] + grid.t[k + 1]));
  return u;
}

/// Instances outside the registry used by tests and the selftest.
namespace synthetic {

/// x1' = u, x2' = x1, x3' = c x1^2/2 + q x2^2/2 around x = 0 with x0 and
/// x1(T) fixed. The smallest cone eigenvalue is c + q (2T/pi)^2.
Instance lqs(double c, double q, double T, int N);

/// x1' = u in [-1, 1], x2' = x1^2, x0 = (1, 0), x1(2) = 0; B- then S.
Instance bs_regulator(int N);

/// B- then C with a curved constraint boundary; the C control is obtained by
/// tracking g(x_{k+1}) = 0.
Instance curv1(double b, int N);

/// Double integrator on a single B- arc with an inactive terminal inequality.
Instance bang_only(int N);

/// Unbounded-control instance whose Lagrangian is not quadratic in the
/// perturbation size.
Instance nonlinear(int N);

/// Random degree-2 instance with n states and arcs S, C, S. Costate data come
/// from the seed; the trajectory need not be optimal.
Instance random_instance(std::mt19937_64& rng, int n, int N);

}  // namespace synthetic

}  // namespace ocpcert
