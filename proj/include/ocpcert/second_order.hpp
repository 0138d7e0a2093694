#pragma once

#include <array>
#include <string>
#include <vector>

#include "ocpcert/multiplier.hpp"

namespace ocpcert {

/// w(theta) = S w_k + a y_k + b y_{k+1} for w' = A w + y F with y linear on
/// the interval; one RK4 step over [0, theta h].
struct StepMap {
  Mat S;
  Vec aE, bE;  ///< forcing E (transformed variables)
  Vec af, bf;  ///< forcing f1 (linearized state)
};

struct IntervalLinearization {
  std::array<Vec, 3> x, xdot, f1, E;
  std::array<Mat, 3> A;
  std::array<StepMap, 4> step;  ///< Gauss points 0..2, interval end 3
};

/// A = f0' + u f1', E = A f1 - f1' xdot and f1 along the trajectory, plus the
/// one-step maps of the linearized and transformed equations.
/// Node quantities use the interval to the right (left at the last node).
class LinearizedSystem {
 public:
  LinearizedSystem(const ProblemSpec& spec, const Trajectory& traj);

  int intervals() const { return static_cast<int>(iv_.size()); }
  const Mat& A(int k) const { return A_[k]; }
  const Vec& E(int k) const { return E_[k]; }
  const Vec& f1(int k) const { return f1_[k]; }
  const IntervalLinearization& interval(int k) const { return iv_[k]; }
  const DenseStates& dense() const { return dense_; }
  const ArcIndex& arcs() const { return idx_; }
  bool on_c(int k) const { return on_c_[k]; }

 private:
  DenseStates dense_;
  ArcIndex idx_;
  std::vector<bool> on_c_;
  std::vector<Mat> A_;
  std::vector<Vec> E_, f1_;
  std::vector<IntervalLinearization> iv_;
};

/// y is linear on each interval from y_begin[k] to y_end[k] (constant when
/// equal); xi holds node values as columns.
struct TransformedDirection {
  std::vector<double> y_begin;
  std::vector<double> y_end;
  double h = 0.0;
  Mat xi;
  Vec xi0() const { return xi.col(0); }
};

/// z' = A z + v f1 from z0 with v constant per interval; columns are nodes.
Mat linearized_state(const LinearizedSystem& lin, const std::vector<double>& v, const Vec& z0);
/// xi' = A xi + y E from xi0 with the direction's (possibly discontinuous) y.
Mat propagate_xi(const LinearizedSystem& lin, const std::vector<double>& y_begin,
                 const std::vector<double>& y_end, const Vec& xi0);

/// y = int v (exact at nodes), xi = z - y f1, h = y_T.
TransformedDirection transform_direction(const Trajectory& traj, const LinearizedSystem& lin, const std::vector<double>& v,
                           const Vec& z0);

/// Coefficients at one point; pdot = -p A - nu g' (the nu term only on C).
struct PointCoefficients {
  Mat Hxx;
  RowVec Hux;
  RowVec M;
  double R = 0.0;
  double R_cf = 0.0;  ///< p [[f0,f1],f1] + g' f1' f1 nu
};
PointCoefficients point_coefficients(const ProblemSpec& spec, double u, const Vec& x, const RowVec& p, double nu,
                                     bool on_c);
double closed_form_R(const ProblemSpec& spec, const Vec& x, const RowVec& p, double nu);

struct NodeCoefficients {
  std::vector<RowVec> M;
  std::vector<double> R;
  std::vector<double> R_cf;
  std::vector<double> nu;
};
NodeCoefficients assemble_M_R(const ProblemSpec& spec, const Trajectory& traj, const LinearizedSystem& lin,
                              const Multiplier& lambda, const Tolerances& tol);

/// Everything the quadratic forms need for one multiplier.
struct FormData {
  const Multiplier* lambda = nullptr;
  CostateSamples samples;
  std::vector<std::array<PointCoefficients, 3>> pts;
  std::vector<std::array<double, 3>> nu;
  std::vector<std::array<Mat, 3>> gxx;  ///< only on C intervals
  Mat D2l;
  RowVec Hux_T;  ///< left limit at T
  Vec f1_T;
  struct AtomTerm {
    int node;
    double mass;
    Mat gxx;
    RowVec gf1p;  ///< g' f1'
    Vec f1;
  };
  std::vector<AtomTerm> atoms;
};
FormData prepare_form(const ProblemSpec& spec, const Trajectory& traj, const LinearizedSystem& lin,
                      const Multiplier& lambda, const Tolerances& tol);

double eval_Q(const Trajectory& traj, const LinearizedSystem& lin, const FormData& form,
              const std::vector<double>& v, const Vec& z0);
double eval_Omega(const Trajectory& traj, const LinearizedSystem& lin, const FormData& form,
                  const TransformedDirection& dir);
double eval_gamma(const Trajectory& traj, const TransformedDirection& dir);

enum class ConeKind { PS2, Phat2, Pstar2 };
std::string to_string(ConeKind kind);

struct ConeBasis {
  ConeKind which = ConeKind::PS2;
  int num_vars = 0;
  int rank = 0;
  Mat constraints;            ///< normalized rows over the variables
  std::vector<std::string> row_labels;
  Mat Z;                      ///< orthonormal nullspace basis, num_vars x dim
  Mat G;                      ///< gamma Gram matrix on the basis
  std::vector<Mat> Omega;     ///< per multiplier, on the basis
  bool terminal_limit = false;  ///< lim y = h at T imposed
  int dim() const { return static_cast<int>(Z.cols()); }

  // variable layout: xi0 (n), y variables, h
  std::vector<int> interval_var;  ///< per interval, -1 on C
  int h_var = 0;
  std::vector<Mat> Xi;        ///< node maps xi_k = Xi[k] w
  std::vector<RowVec> kappa;  ///< g'/(g'f1) on C nodes, empty elsewhere
};

/// Builds the discretized cone and the reduced Omega / gamma matrices.
ConeBasis build_cone(const ProblemSpec& spec, const Trajectory& traj, const LinearizedSystem& lin,
                     const std::vector<FormData>& forms, ConeKind which, const Tolerances& tol);

/// Direction encoded by variable vector w.
TransformedDirection cone_direction(const Trajectory& traj, const LinearizedSystem& lin, const ConeBasis& cone,
                            const Vec& w);

enum class Verdict { Pass, Fail, Vacuous, NotCertified };
std::string to_string(Verdict v);

struct Witness {
  int lambda_index = -1;
  double rayleigh = 0.0;
  double omega = 0.0;
  double gamma = 0.0;
  Vec w;  ///< variable vector
};

/// Max-over-multipliers test on a pencil family (Omega_l, G). A direction
/// with Rayleigh quotient below -tol for some l violates only when no other
/// l' has quotient >= -tol on it.
struct MaxFormResult {
  Verdict verdict = Verdict::Pass;
  double mu_min = 0.0;
  std::vector<double> mu_per_lambda;
  int lambda = 0;  ///< multiplier of the reported direction
  Vec coeffs;      ///< reported direction in basis coordinates
};
MaxFormResult max_form_test(const std::vector<Mat>& Omegas, const Mat& G, double tol);

struct NecessaryResult {
  Verdict verdict = Verdict::Vacuous;
  int dim = 0;
  double mu_min = 0.0;             ///< most negative Rayleigh quotient found
  std::vector<double> mu_per_lambda;
  Witness witness;
  std::string note;
};
NecessaryResult necessary_test(const Trajectory& traj, const LinearizedSystem& lin,
                               const std::vector<FormData>& forms, const ConeBasis& cone, const Tolerances& tol);

struct SufficientResult {
  Verdict legendre = Verdict::NotCertified;
  Verdict coercivity = Verdict::NotCertified;
  Verdict verdict = Verdict::NotCertified;
  double alpha_min = 0.0;
  double rho_min = 0.0;   ///< smallest over the multipliers
  double rho_best = 0.0;  ///< largest over the multipliers (decides the verdict)
  std::vector<double> rho_per_lambda;
  int dim = 0;
  Witness witness;
};
/// Throws std::invalid_argument for an empty multiplier list.
SufficientResult sufficient_test(const ProblemSpec& spec, const Trajectory& traj, const LinearizedSystem& lin,
                                 const std::vector<FormData>& forms, const ConeBasis& cone, const Tolerances& tol);

}  // namespace ocpcert
