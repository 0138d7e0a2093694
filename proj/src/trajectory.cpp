#include "ocpcert/trajectory.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace ocpcert {

std::string to_string(ArcKind kind) {
  switch (kind) {
    case ArcKind::Bminus: return "Bminus";
    case ArcKind::Bplus: return "Bplus";
    case ArcKind::C: return "C";
    case ArcKind::S: return "S";
  }
  return "?";
}

ArcKind arc_kind_from_string(const std::string& s) {
  if (s == "Bminus") return ArcKind::Bminus;
  if (s == "Bplus") return ArcKind::Bplus;
  if (s == "C") return ArcKind::C;
  if (s == "S") return ArcKind::S;
  throw ValidationError("unknown arc kind '" + s + "'");
}

std::string to_string(FindingKind kind) {
  switch (kind) {
    case FindingKind::Partition: return "Partition";
    case FindingKind::BoundsDistance: return "BoundsDistance";
    case FindingKind::JunctionJump: return "JunctionJump";
    case FindingKind::BoundMismatch: return "BoundMismatch";
    case FindingKind::ConstraintActivity: return "ConstraintActivity";
    case FindingKind::FeedbackLaw: return "FeedbackLaw";
    case FindingKind::Note: return "Note";
  }
  return "?";
}

Grid Grid::uniform(double T, int N) {
  if (N < 1) throw ValidationError("grid needs at least one interval");
  Grid g;
  g.t.resize(N + 1);
  for (int k = 0; k <= N; ++k) g.t[k] = T * static_cast<double>(k) / N;
  g.t[N] = T;
  return g;
}

int Grid::find_node(double tau) const {
  const double tol = 1e-9 * std::max(1.0, std::abs(horizon()));
  auto it = std::lower_bound(t.begin(), t.end(), tau - tol);
  if (it != t.end() && std::abs(*it - tau) <= tol) return static_cast<int>(it - t.begin());
  return -1;
}

void Grid::validate() const {
  if (t.size() < 2) throw ValidationError("grid needs at least two nodes");
  if (t.front() != 0.0) throw ValidationError("grid must start at 0");
  for (std::size_t k = 0; k + 1 < t.size(); ++k) {
    if (!(t[k + 1] > t[k])) throw ValidationError("grid not strictly increasing at node " + std::to_string(k + 1));
  }
}

int ArcIndex::arc_of_node(int k) const {
  const int N = static_cast<int>(interval_arc.size());
  return interval_arc[std::min(k, N - 1)];
}

ArcIndex index_arcs(const Trajectory& traj) {
  traj.grid.validate();
  const auto& arcs = traj.arcs;
  if (arcs.empty()) throw ValidationError("no arcs declared");
  const int N = traj.intervals();
  ArcIndex idx;
  idx.interval_arc.assign(N, -1);
  int expect = 0;
  for (std::size_t j = 0; j < arcs.size(); ++j) {
    const int a = traj.grid.find_node(arcs[j].t_start);
    const int b = traj.grid.find_node(arcs[j].t_end);
    if (a < 0 || b < 0) {
      throw ValidationError("arc " + std::to_string(j) + " endpoint is not a grid node");
    }
    if (a != expect) throw ValidationError("arcs do not partition [0,T] at arc " + std::to_string(j));
    if (b <= a) throw ValidationError("arc " + std::to_string(j) + " is empty");
    if (j > 0 && arcs[j].kind == arcs[j - 1].kind) {
      throw ValidationError("consecutive arcs " + std::to_string(j - 1) + " and " + std::to_string(j) +
                            " have the same kind");
    }
    for (int i = a; i < b; ++i) idx.interval_arc[i] = static_cast<int>(j);
    idx.first_node.push_back(a);
    idx.last_node.push_back(b);
    expect = b;
  }
  if (expect != N) throw ValidationError("arcs do not cover [0,T]");
  return idx;
}

Vec rk4_step(const ProblemSpec& spec, double u, const Vec& x, double h) {
  const Vec k1 = eval_dynamics(spec, u, x);
  const Vec k2 = eval_dynamics(spec, u, x + 0.5 * h * k1);
  const Vec k3 = eval_dynamics(spec, u, x + 0.5 * h * k2);
  const Vec k4 = eval_dynamics(spec, u, x + h * k3);
  return x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

Trajectory integrate_state(const ProblemSpec& spec, const std::vector<double>& u, const Vec& x0,
                           const Grid& grid) {
  grid.validate();
  const int N = grid.intervals();
  if (static_cast<int>(u.size()) != N) {
    throw DimensionError("control has " + std::to_string(u.size()) + " samples for " + std::to_string(N) +
                         " intervals");
  }
  if (x0.size() != spec.n) throw DimensionError("initial state has wrong dimension");
  Trajectory tr;
  tr.grid = grid;
  tr.u = u;
  tr.x.resize(spec.n, N + 1);
  tr.x.col(0) = x0;
  if (!x0.allFinite()) throw NumericalError("non-finite state", 0);
  for (int k = 0; k < N; ++k) {
    tr.x.col(k + 1) = rk4_step(spec, u[k], tr.x.col(k), grid.step(k));
    if (!tr.x.col(k + 1).allFinite()) throw NumericalError("non-finite state", k + 1);
  }
  return tr;
}

DynamicsResidual dynamics_residual(const ProblemSpec& spec, const Trajectory& traj) {
  DynamicsResidual r;
  for (int k = 0; k < traj.intervals(); ++k) {
    const Vec next = rk4_step(spec, traj.u[k], traj.state(k), traj.grid.step(k));
    const Vec stored = traj.state(k + 1);
    const double e = (next - stored).norm() / (1.0 + stored.norm());
    if (!(e <= r.value)) {
      r.value = e;
      r.node = k + 1;
    }
  }
  return r;
}

namespace {
std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}
}  // namespace

std::vector<Finding> validate_arcs(const ProblemSpec& spec, const Trajectory& traj, const Tolerances& tol) {
  std::vector<Finding> out;
  ArcIndex idx;
  try {
    idx = index_arcs(traj);
  } catch (const ValidationError& e) {
    out.push_back({FindingKind::Partition, true, 0.0, 0.0, e.what()});
    return out;
  }
  const auto& t = traj.grid.t;
  const bool finite_bounds = std::isfinite(spec.u_min) && std::isfinite(spec.u_max);
  const double dist_min = finite_bounds ? tol.dist_min * (spec.u_max - spec.u_min) : tol.dist_min;

  for (std::size_t j = 0; j < traj.arcs.size(); ++j) {
    const Arc& arc = traj.arcs[j];
    const int a = idx.first_node[j], b = idx.last_node[j];
    if (is_bang(arc.kind)) {
      const double bound = arc.kind == ArcKind::Bminus ? spec.u_min : spec.u_max;
      if (!std::isfinite(bound)) {
        out.push_back({FindingKind::BoundMismatch, true, bound, arc.t_start,
                       to_string(arc.kind) + " arc declared against an infinite bound"});
        continue;
      }
      for (int i = a; i < b; ++i) {
        if (traj.u[i] != bound) {
          out.push_back({FindingKind::BoundMismatch, true, traj.u[i] - bound, t[i],
                         "control " + fmt(traj.u[i]) + " on " + to_string(arc.kind) + " interval " +
                             std::to_string(i) + " differs from bound " + fmt(bound)});
          break;
        }
      }
    } else {
      double worst = kInf;
      int at = a;
      for (int i = a; i < b; ++i) {
        const double d = std::min(traj.u[i] - spec.u_min, spec.u_max - traj.u[i]);
        if (d < worst) {
          worst = d;
          at = i;
        }
      }
      if (worst < dist_min) {
        out.push_back({FindingKind::BoundsDistance, true, worst, t[at],
                       "control within " + fmt(worst) + " of a bound on " + to_string(arc.kind) +
                           " arc (minimum " + fmt(dist_min) + ")"});
      }
    }
    for (int k = a; k <= b; ++k) {
      const double gv = g_value(spec, traj.state(k));
      if (arc.kind == ArcKind::C ? std::abs(gv) > tol.tol_g : gv > tol.tol_g) {
        out.push_back({FindingKind::ConstraintActivity, true, gv, t[k],
                       arc.kind == ArcKind::C ? "state constraint not active on C arc at node " + std::to_string(k)
                                              : "state constraint violated at node " + std::to_string(k)});
        break;
      }
    }
    if (arc.kind == ArcKind::C) {
      const double limit = 10.0 * tol.tol_g / tol.fo_min;
      for (int i = a; i < b; ++i) {
        double law;
        try {
          law = 0.5 * (constrained_control(spec, traj.state(i), tol.fo_min) +
                       constrained_control(spec, traj.state(i + 1), tol.fo_min));
        } catch (const NumericalError& e) {
          out.push_back({FindingKind::FeedbackLaw, true, 0.0, t[i], e.what()});
          break;
        }
        if (std::abs(traj.u[i] - law) > limit) {
          out.push_back({FindingKind::FeedbackLaw, true, traj.u[i] - law, t[i],
                         "control departs from the constraint feedback law on interval " + std::to_string(i)});
          break;
        }
      }
    }
  }

  for (std::size_t j = 1; j < traj.arcs.size(); ++j) {
    const int k = idx.first_node[j];
    const ArcKind left = traj.arcs[j - 1].kind, right = traj.arcs[j].kind;
    const double jump = control_limits(spec, traj, idx, k, tol.fo_min).jump();
    const bool cs = (left == ArcKind::C && right == ArcKind::S) || (left == ArcKind::S && right == ArcKind::C);
    const std::string name = to_string(left) + "-" + to_string(right) + " junction at t=" + fmt(t[k]);
    if (cs && std::abs(jump) < tol.jump_min) {
      out.push_back({FindingKind::JunctionJump, true, jump, t[k], "no control jump at " + name});
    } else if (!cs && std::abs(jump) < tol.jump_min) {
      out.push_back({FindingKind::Note, false, jump, t[k], "control continuous at " + name});
    }
  }
  return out;
}

ControlLimits control_limits(const ProblemSpec& spec, const Trajectory& traj, const ArcIndex& idx, int k,
                             double fo_min) {
  // interval i touches node k; i2 is the next interval away from k
  auto side = [&](int i, int i2) {
    const int j = idx.interval_arc[i];
    const ArcKind kind = traj.arcs[j].kind;
    if (kind == ArcKind::Bminus) return spec.u_min;
    if (kind == ArcKind::Bplus) return spec.u_max;
    if (kind == ArcKind::C) {
      try {
        return constrained_control(spec, traj.state(k), fo_min);
      } catch (const NumericalError&) {
        return traj.u[i];
      }
    }
    const bool same = i2 >= 0 && i2 < traj.intervals() && idx.interval_arc[i2] == j;
    if (!same) return traj.u[i];
    const double hi = traj.grid.step(i), h2 = traj.grid.step(i2);
    return traj.u[i] + (traj.u[i] - traj.u[i2]) * (0.5 * hi) / (0.5 * (hi + h2));
  };
  return {side(k - 1, k - 2), side(k, k + 1)};
}

FirstOrderMargin check_first_order(const ProblemSpec& spec, const Trajectory& traj, const Tolerances& tol) {
  FirstOrderMargin r;
  const ArcIndex idx = index_arcs(traj);
  bool any = false;
  for (std::size_t j = 0; j < traj.arcs.size(); ++j) {
    if (traj.arcs[j].kind != ArcKind::C) continue;
    any = true;
    for (int k = idx.first_node[j]; k <= idx.last_node[j]; ++k) {
      const Vec xk = traj.state(k);
      const double m = std::abs(g_gradient(spec, xk).dot(spec.f1(xk)));
      if (m < r.margin) {
        r.margin = m;
        r.node = k;
      }
    }
  }
  if (!any) r.note = "no C arc";
  r.passed = r.margin >= tol.fo_min;
  return r;
}

double constrained_control(const ProblemSpec& spec, const Vec& x, double fo_min) {
  const RowVec dg = g_gradient(spec, x);
  const double den = dg.dot(spec.f1(x));
  if (!(std::abs(den) > fo_min)) throw NumericalError("|g'f1| = " + fmt(std::abs(den)) + " below fo_min");
  return -dg.dot(spec.f0(x)) / den;
}

}  // namespace ocpcert
