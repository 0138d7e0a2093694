#pragma once

#include <array>
#include <string>
#include <vector>

#include "ocpcert/dense.hpp"
#include "ocpcert/trajectory.hpp"

namespace ocpcert {

struct Atom {
  int node = -1;
  double time = 0.0;
  double mass = 0.0;
};

/// Density on C (per node, zero elsewhere) plus atoms at junctions / {0, T}.
struct Measure {
  std::vector<double> nu;
  std::vector<Atom> atoms;
  double mass_at(int node) const;
};

/// Finite data a multiplier is generated from.
struct MultiplierSeed {
  double beta = 0.0;
  RowVec psi;
  std::vector<Atom> atoms;  ///< node may be -1; resolved from time
};

/// Rows of p_left / p_right are p(t_k-) / p(t_k+); p_left row 0 is p_0 and
/// p_right row N is p_T. They differ only at atoms.
struct Multiplier {
  double beta = 0.0;
  RowVec psi;
  Mat p_left;
  Mat p_right;
  Measure measure;
  RowVec p0_residual;  ///< p_0 + D_{x0} l

  int nodes() const { return static_cast<int>(p_left.rows()); }
  /// Right limit, left limit at the last node.
  RowVec p(int k) const { return k + 1 < nodes() ? p_right.row(k) : p_left.row(k); }
  /// Value seen from inside arc j (left limit at its last node, right limit otherwise).
  RowVec p_in_arc(int k, int j, const ArcIndex& idx) const {
    return k == idx.last_node[j] ? RowVec(p_left.row(k)) : RowVec(p_right.row(k));
  }
  MultiplierSeed seed() const { return {beta, psi, measure.atoms}; }
};

/// nu = p [f1, f0](x) / (g'(x) f1(x)); throws NumericalError below fo_min.
double compute_nu(const ProblemSpec& spec, const Vec& x, const RowVec& p, double fo_min);

/// Matrix K with p' = p K: K = -A, minus [f1,f0] g' / (g' f1) on C.
Mat costate_generator(const ProblemSpec& spec, double u, const Vec& x, bool on_c, double fo_min);

/// Attaches node indices to atom times; throws ValidationError when an atom
/// is not at a junction or endpoint.
std::vector<Atom> resolve_atoms(const Trajectory& traj, const std::vector<Atom>& atoms);

/// Backward RK4 from p_T = D_{xT} l with stage-wise nu on C and atom jumps.
Multiplier integrate_costate(const ProblemSpec& spec, const Trajectory& traj, const DenseStates& dense,
                             double beta, const RowVec& psi, const std::vector<Atom>& atoms,
                             const Tolerances& tol);
Multiplier integrate_costate(const ProblemSpec& spec, const Trajectory& traj, double beta, const RowVec& psi,
                             const std::vector<Atom>& atoms, const Tolerances& tol);

/// p, p' and nu at the Gauss points of every interval.
struct CostateSamples {
  std::vector<std::array<RowVec, 3>> p;
  std::vector<std::array<RowVec, 3>> pdot;
  std::vector<std::array<double, 3>> nu;
};
CostateSamples sample_costate(const ProblemSpec& spec, const Trajectory& traj, const DenseStates& dense,
                              const Multiplier& lambda, const Tolerances& tol);

struct FitResult {
  Multiplier multiplier;
  double residual = 0.0;  ///< max row violation before rescaling
  int iterations = 0;
};

/// Damped, projected Gauss-Newton over (beta, Psi, atom masses); atoms are
/// allowed at junctions and endpoints where g is active. Throws FitError.
FitResult fit_multiplier(const ProblemSpec& spec, const Trajectory& traj, const MultiplierSeed& seed,
                         const Tolerances& tol);

struct ArcStationarity {
  int arc = 0;
  ArcKind kind = ArcKind::S;
  double worst = 0.0;  ///< largest violation (0 when satisfied)
  double time = 0.0;
  bool passed = true;
};

struct StationarityReport {
  std::vector<ArcStationarity> arcs;
  double threshold = 0.0;
  double worst = 0.0;
  bool passed = true;
};
StationarityReport check_stationarity(const ProblemSpec& spec, const Trajectory& traj, const Multiplier& lambda,
                                      const Tolerances& tol);

struct JumpRow {
  int node = 0;
  double time = 0.0;
  bool interior = true;
  double du = 0.0;        ///< [u]
  double dHu = 0.0;       ///< [H_u]
  double mass = 0.0;      ///< [mu]
  double dp_residual = 0.0;  ///< |[p] + [mu] g'|
  double du_dHu = 0.0;       ///< [u][H_u]
  double dmu_ddg = 0.0;      ///< [mu][d/dt g] = [mu][u] g'f1
  bool continuity_required = false;  ///< [u] != 0 and g active
  bool passed = true;
};

struct JumpReport {
  std::vector<JumpRow> rows;
  bool passed = true;
};
JumpReport check_jumps(const ProblemSpec& spec, const Trajectory& traj, const Multiplier& lambda,
                       const Tolerances& tol);

struct ComplementarityRow {
  std::string where;  ///< "arc i interior", "t=0", "t=T"
  ArcKind kind = ArcKind::Bminus;
  double margin = 0.0;  ///< min over points of the best signed H_u
  double time = 0.0;
  bool passed = true;
};

struct ComplementarityReport {
  std::vector<ComplementarityRow> rows;
  bool strict_passed = true;
  bool weak_passed = true;
  double weak_min_nu = 0.0;  ///< best (over multipliers) min of nu on C nodes
  std::string note;
  bool passed() const { return strict_passed && weak_passed; }
};
/// Throws std::invalid_argument for an empty list.
ComplementarityReport check_strict_complementarity(const ProblemSpec& spec, const Trajectory& traj,
                                                   const std::vector<Multiplier>& lambdas, const Tolerances& tol);

/// Sign, complementarity, nontriviality and boundary checks.
struct MultiplierValidity {
  bool nontrivial = true;
  bool signs_ok = true;
  double p0_residual = 0.0;
  double min_nu = 0.0;
  std::vector<std::string> problems;
  bool passed = true;
};
MultiplierValidity validate_multiplier(const ProblemSpec& spec, const Trajectory& traj, const Multiplier& lambda,
                                       const Tolerances& tol);

}  // namespace ocpcert
