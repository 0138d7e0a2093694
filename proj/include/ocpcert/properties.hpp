#pragma once

#include <vector>

#include "ocpcert/registry.hpp"
#include "ocpcert/second_order.hpp"

namespace ocpcert {

/// Instance with its seed multiplier, linearization and form data. Not
/// copyable: the form points at the multiplier.
struct Prepared {
  Prepared(Instance in, const Tolerances& tol);
  Prepared(const Prepared&) = delete;
  Prepared& operator=(const Prepared&) = delete;

  Instance inst;
  Multiplier lambda;
  LinearizedSystem lin;
  FormData form;

  const ProblemSpec& spec() const { return inst.spec; }
  const Trajectory& traj() const { return inst.traj; }
};

/// Both sides of  int g'z dmu + Dl(z_0, z_T) = int H_u v  for the linearized
/// state z driven by (v, z0).
struct IdentitySides {
  double lhs = 0.0;
  double rhs = 0.0;
  double gap() const { return std::abs(lhs - rhs); }
};
IdentitySides integral_identity(const ProblemSpec& spec, const Trajectory& traj, const LinearizedSystem& lin,
                                const FormData& form, const std::vector<double>& v, const Vec& z0);

/// L(u, x0) = l(x0, xT) + int g(x) dmu with dmu frozen at the multiplier's.
double lagrangian_value(const ProblemSpec& spec, const Trajectory& traj, const FormData& form);

struct ExpansionSample {
  double eps = 0.0;
  double residual = 0.0;  ///< L - L^ - eps int H_u v - eps^2 Q / 2
  double ratio = 0.0;     ///< |residual| / eps^2
};
std::vector<ExpansionSample> lagrangian_expansion(const ProblemSpec& spec, const Trajectory& traj,
                                                  const LinearizedSystem& lin, const FormData& form,
                                                  const std::vector<double>& v, const Vec& z0,
                                                  const std::vector<double>& eps);

}  // namespace ocpcert
