#pragma once

#include <array>
#include <vector>

#include "ocpcert/trajectory.hpp"

namespace ocpcert {

/// Per-interval sample fractions shared by every quadrature and sub-step.
enum Frac : int { F0, FQ, FG1H, FG1, FH, FG3H, F3Q, FG3, FG1P, FG3P, F1, kNumFrac };

/// 3-point Gauss-Legendre on [0, 1].
inline const std::array<double, 3> kGaussNodes = {0.5 - 0.3872983346207417, 0.5, 0.5 + 0.3872983346207417};
inline const std::array<double, 3> kGaussWeights = {5.0 / 18.0, 8.0 / 18.0, 5.0 / 18.0};
inline constexpr std::array<int, 3> kGaussFrac = {FG1, FH, FG3};
/// midpoint fraction of the forward sub-step [0, theta] for each Gauss point
inline constexpr std::array<int, 3> kGaussHalfFrac = {FG1H, FQ, FG3H};
/// midpoint fraction of the backward sub-step [theta, 1]
inline constexpr std::array<int, 3> kGaussBackFrac = {FG1P, F3Q, FG3P};

double fraction_value(int f);

/// States at the fixed fractions of every interval, each obtained by one RK4
/// sub-step from the left node (the right node is the stored state).
class DenseStates {
 public:
  DenseStates(const ProblemSpec& spec, const Trajectory& traj);
  const Vec& x(int k, int f) const { return x_[k][f]; }
  int intervals() const { return static_cast<int>(x_.size()); }

 private:
  std::vector<std::array<Vec, kNumFrac>> x_;
};

}  // namespace ocpcert
