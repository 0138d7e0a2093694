#pragma once

#include <string>
#include <vector>

#include "ocpcert/problem.hpp"
#include "ocpcert/tolerances.hpp"

namespace ocpcert {

enum class ArcKind { Bminus, Bplus, C, S };

std::string to_string(ArcKind kind);
ArcKind arc_kind_from_string(const std::string& s);
inline bool is_bang(ArcKind k) { return k == ArcKind::Bminus || k == ArcKind::Bplus; }

struct Arc {
  ArcKind kind = ArcKind::S;
  double t_start = 0.0;
  double t_end = 0.0;
  bool operator==(const Arc&) const = default;
};

using ArcStructure = std::vector<Arc>;

/// Nodes 0 = t_0 < ... < t_N = T.
struct Grid {
  std::vector<double> t;

  static Grid uniform(double T, int N);
  int intervals() const { return static_cast<int>(t.size()) - 1; }
  int nodes() const { return static_cast<int>(t.size()); }
  double step(int k) const { return t[k + 1] - t[k]; }
  double horizon() const { return t.back(); }
  /// Node index equal to time tau (relative tolerance 1e-9 of T), -1 if none.
  int find_node(double tau) const;
  void validate() const;
};

/// Per-interval control, per-node state (columns of x).
struct Trajectory {
  Grid grid;
  std::vector<double> u;
  Mat x;
  ArcStructure arcs;

  int intervals() const { return grid.intervals(); }
  Vec state(int k) const { return x.col(k); }
};

/// Interval/node bookkeeping for a declared arc structure.
struct ArcIndex {
  std::vector<int> interval_arc;  ///< arc owning each interval
  std::vector<int> first_node;    ///< per arc
  std::vector<int> last_node;     ///< per arc
  /// Arc of the node's right interval (left interval at the last node).
  int arc_of_node(int k) const;
  /// True when node k lies in the closed arc j.
  bool node_in_arc(int k, int j) const { return first_node[j] <= k && k <= last_node[j]; }
};

/// Throws ValidationError when arcs do not partition [0, T] on grid nodes.
ArcIndex index_arcs(const Trajectory& traj);

/// One classical RK4 step with the control held fixed.
Vec rk4_step(const ProblemSpec& spec, double u, const Vec& x, double h);

/// Throws NumericalError naming the first node with a non-finite state.
Trajectory integrate_state(const ProblemSpec& spec, const std::vector<double>& u, const Vec& x0,
                           const Grid& grid);

/// max_k |RK4(x_k) - x_{k+1}| / (1 + |x_{k+1}|), with the node where it occurs.
struct DynamicsResidual {
  double value = 0.0;
  int node = -1;
};
DynamicsResidual dynamics_residual(const ProblemSpec& spec, const Trajectory& traj);

enum class FindingKind { Partition, BoundsDistance, JunctionJump, BoundMismatch, ConstraintActivity, FeedbackLaw, Note };
std::string to_string(FindingKind kind);

struct Finding {
  FindingKind kind = FindingKind::Note;
  bool violation = false;
  double value = 0.0;
  double time = 0.0;
  std::string message;
};

/// Structural and geometric checks of the declared arcs. Pure.
std::vector<Finding> validate_arcs(const ProblemSpec& spec, const Trajectory& traj, const Tolerances& tol);

/// One-sided limits of the control at an interior node: the bound on B
/// arcs, the feedback law at the node on C arcs, linear extrapolation of the
/// interval samples on S arcs.
struct ControlLimits {
  double left = 0.0;
  double right = 0.0;
  double jump() const { return right - left; }
};
ControlLimits control_limits(const ProblemSpec& spec, const Trajectory& traj, const ArcIndex& idx, int k,
                             double fo_min);

struct FirstOrderMargin {
  double margin = kInf;  ///< min over C nodes of |g'(x) f1(x)|
  int node = -1;
  bool passed = true;
  std::string note;
};
FirstOrderMargin check_first_order(const ProblemSpec& spec, const Trajectory& traj, const Tolerances& tol);

/// Feedback control keeping d/dt g(x) = 0.
double constrained_control(const ProblemSpec& spec, const Vec& x, double fo_min);

}  // namespace ocpcert
