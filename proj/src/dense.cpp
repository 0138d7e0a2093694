#include "ocpcert/dense.hpp"

namespace ocpcert {

double fraction_value(int f) {
  const double g1 = kGaussNodes[0], g3 = kGaussNodes[2];
  switch (f) {
    case F0: return 0.0;
    case FQ: return 0.25;
    case FG1H: return 0.5 * g1;
    case FG1: return g1;
    case FH: return 0.5;
    case FG3H: return 0.5 * g3;
    case F3Q: return 0.75;
    case FG3: return g3;
    case FG1P: return 0.5 * (1.0 + g1);
    case FG3P: return 0.5 * (1.0 + g3);
    case F1: return 1.0;
    default: break;
  }
  throw std::out_of_range("bad fraction id");
}

DenseStates::DenseStates(const ProblemSpec& spec, const Trajectory& traj) {
  const int N = traj.intervals();
  x_.resize(N);
  for (int k = 0; k < N; ++k) {
    const Vec xk = traj.state(k);
    const double h = traj.grid.step(k);
    for (int f = 0; f < kNumFrac; ++f) {
      if (f == F0) {
        x_[k][f] = xk;
      } else if (f == F1) {
        x_[k][f] = traj.state(k + 1);
      } else {
        x_[k][f] = rk4_step(spec, traj.u[k], xk, fraction_value(f) * h);
      }
    }
  }
}

}  // namespace ocpcert
