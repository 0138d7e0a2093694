#pragma once

#include <json.hpp>

#include <string>
#include <vector>

#include "ocpcert/multiplier.hpp"
#include "ocpcert/problem.hpp"
#include "ocpcert/trajectory.hpp"

namespace ocpcert {

using Json = nlohmann::ordered_json;

inline constexpr int kFormatVersion = 1;

/// Multiplier document contents. p rows are right limits (left limit at the
/// last node); p_left only lists nodes where the two differ.
struct MultiplierFile {
  double beta = 0.0;
  RowVec psi;
  std::vector<Atom> atoms;
  Mat p;
  std::vector<double> nu;
};

MultiplierFile to_file(const Multiplier& lambda);

Json problem_to_json(const ProblemSpec& spec);
ProblemSpec problem_from_json(const Json& j);
Json trajectory_to_json(const Trajectory& traj);
Trajectory trajectory_from_json(const Json& j);
Json multiplier_to_json(const MultiplierFile& m);
MultiplierFile multiplier_from_json(const Json& j);

/// Parses text; syntax errors carry line and column.
Json parse_json(const std::string& text, const std::string& what);
/// Two-space indented text with a trailing newline.
std::string dump_json(const Json& j);

std::string serialize_problem(const ProblemSpec& spec);
ProblemSpec parse_problem(const std::string& text);
std::string serialize_trajectory(const Trajectory& traj);
Trajectory parse_trajectory(const std::string& text);
std::string serialize_multiplier(const MultiplierFile& m);
MultiplierFile parse_multiplier(const std::string& text);

/// Extended reals: finite numbers or the strings "inf" / "-inf".
Json real_to_json(double v);
double real_from_json(const Json& j, const std::string& where);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);
std::string sha256_hex(const std::string& data);

}  // namespace ocpcert
