#pragma once

#include <Eigen/Dense>

#include <limits>
#include <string>

#include "ocpcert/polynomial.hpp"

namespace ocpcert {

using Vec = Eigen::VectorXd;
using RowVec = Eigen::RowVectorXd;
using Mat = Eigen::MatrixXd;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Control-affine problem with scalar control, scalar state constraint
/// g(x) <= 0 and Mayer cost. Endpoint functions live on (x0, xT), i.e. 2n
/// variables ordered x0_1..x0_n, xT_1..xT_n. The first n1 rows of Phi are
/// equalities, the last n2 are "<= 0".
struct ProblemSpec {
  std::string name;
  int n = 0;
  int n1 = 0;
  int n2 = 0;
  VectorField f0;
  VectorField f1;
  Poly g;
  Poly phi;
  PolyMap Phi;
  double u_min = -kInf;
  double u_max = kInf;
  double T = 1.0;

  /// Checks dimensions/bounds and caches brackets; must be called before use.
  void finalize();
  bool finalized() const { return finalized_; }

  const VectorField& bracket01() const { return br01_; }   ///< [f0, f1]
  const VectorField& bracket10() const { return br10_; }   ///< [f1, f0]
  const VectorField& bracket011() const { return br011_; } ///< [[f0, f1], f1]
  const PolyMap& g_map() const { return g_map_; }
  /// outputs (phi, Phi_1, ..., Phi_m)
  const PolyMap& endpoint_map() const { return end_map_; }

  bool operator==(const ProblemSpec& o) const;

 private:
  bool finalized_ = false;
  VectorField br01_, br10_, br011_;
  PolyMap g_map_, end_map_;
};

/// Builds a vector field / map from per-component polynomials.
PolyMap make_map(int num_vars, std::vector<Poly> components);

struct HamiltonianEval {
  double H = 0.0;
  double H_u = 0.0;
  RowVec H_x;
  RowVec H_ux;
  Mat H_xx;
};

Vec eval_dynamics(const ProblemSpec& spec, double u, const Vec& x);
/// A = f0'(x) + u f1'(x)
Mat dynamics_jacobian(const ProblemSpec& spec, double u, const Vec& x);
HamiltonianEval eval_hamiltonian(const ProblemSpec& spec, double u, const Vec& x, const RowVec& p);

double g_value(const ProblemSpec& spec, const Vec& x);
RowVec g_gradient(const ProblemSpec& spec, const Vec& x);
Mat g_hessian(const ProblemSpec& spec, const Vec& x);

/// Stacked (x0, xT).
Vec endpoint_point(const Vec& x0, const Vec& xT);

/// l = beta*phi + Psi*Phi and its derivatives on (x0, xT).
double endpoint_lagrangian(const ProblemSpec& spec, double beta, const RowVec& psi, const Vec& x0,
                           const Vec& xT);
RowVec endpoint_lagrangian_gradient(const ProblemSpec& spec, double beta, const RowVec& psi,
                                    const Vec& x0, const Vec& xT);
Mat endpoint_lagrangian_hessian(const ProblemSpec& spec, double beta, const RowVec& psi,
                                const Vec& x0, const Vec& xT);

double cost(const ProblemSpec& spec, const Vec& x0, const Vec& xT);
Vec endpoint_constraints(const ProblemSpec& spec, const Vec& x0, const Vec& xT);
/// Jacobian of (phi; Phi) w.r.t. (x0, xT): (1+n1+n2) x 2n.
Mat endpoint_jacobian(const ProblemSpec& spec, const Vec& x0, const Vec& xT);

}  // namespace ocpcert
