#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "ocpcert/io.hpp"
#include "ocpcert/registry.hpp"
#include "ocpcert/second_order.hpp"

namespace ocpcert {

enum class Order { First, Second, Sufficient };
std::string to_string(Order o);
Order order_from_string(const std::string& s);

struct CertifyOptions {
  std::string registry;  ///< registry name, or empty when files are given
  std::string problem_path;
  std::string trajectory_path;
  std::vector<std::string> multiplier_paths;
  bool fit = false;  ///< fit a multiplier instead of using the seed / files
  Order order = Order::First;
  int grid = kDefaultGrid;  ///< registry instances only
  Tolerances tol;
  std::string csv_dir;
  bool full_matrices = false;  ///< emit cone matrices regardless of size
  int qomega_samples = 20;
  std::uint64_t sample_seed = 0;
};

struct CertifyResult {
  Json report;
  std::vector<std::pair<std::string, Verdict>> verdicts;
  int exit_code = 0;
};

/// 0 iff every verdict is PASS or VACUOUS, 1 otherwise.
int exit_code_for(const std::vector<std::pair<std::string, Verdict>>& verdicts);

/// Runs the stages in dependency order. Input problems (unreadable or
/// malformed files, unknown registry names) throw; stage failures are
/// recorded in the report.
CertifyResult run_certify(const CertifyOptions& opts);

/// Per-node t, u, x, p, nu, g, H_u, R for one multiplier.
std::string nodes_csv(const ProblemSpec& spec, const Trajectory& traj, const LinearizedSystem& lin,
                      const Multiplier& lambda, const Tolerances& tol);
/// Per-node t, A (row major), E, M for one multiplier.
std::string linearization_csv(const ProblemSpec& spec, const Trajectory& traj, const LinearizedSystem& lin,
                              const Multiplier& lambda, const Tolerances& tol);

std::string serialize_report(const Json& report);
Json parse_report(const std::string& text);

}  // namespace ocpcert
