#include "ocpcert/io.hpp"

#include <openssl/evp.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace ocpcert {

namespace {

void require(bool ok, const std::string& msg) {
  if (!ok) throw ParseError(msg);
}

const Json& field(const Json& j, const char* key, const std::string& where) {
  require(j.is_object(), where + ": expected an object");
  auto it = j.find(key);
  require(it != j.end(), where + ": missing field '" + key + "'");
  return *it;
}

int int_field(const Json& j, const char* key, const std::string& where) {
  const Json& v = field(j, key, where);
  require(v.is_number_integer(), where + "." + key + ": expected an integer");
  return v.get<int>();
}

void check_header(const Json& j, const std::string& format) {
  const Json& f = field(j, "format", format);
  require(f.is_string() && f.get<std::string>() == format, "expected format '" + format + "'");
  const int v = int_field(j, "version", format);
  require(v == kFormatVersion, format + ": unsupported version " + std::to_string(v));
}

Json header(const std::string& format) {
  Json j;
  j["format"] = format;
  j["version"] = kFormatVersion;
  return j;
}

Json poly_to_json(const Poly& p, const std::vector<std::string>& names) {
  Json j = Json::object();
  for (const auto& [e, c] : p.terms()) j[format_monomial(e, names)] = c;
  return j;
}

Poly poly_from_json(const Json& j, const std::vector<std::string>& names, const std::string& where) {
  require(j.is_object(), where + ": expected a coefficient table");
  Poly p(static_cast<int>(names.size()));
  for (auto it = j.begin(); it != j.end(); ++it) {
    require(it.value().is_number(), where + "[" + it.key() + "]: expected a number");
    Exponents e;
    try {
      e = parse_monomial(it.key(), names);
    } catch (const ParseError& err) {
      throw ParseError(where + ": " + err.what());
    }
    require(p.coefficient(e) == 0.0, where + ": duplicate monomial '" + it.key() + "'");
    p.add_term(e, it.value().get<double>());
  }
  return p;
}

Json map_to_json(const PolyMap& m, const std::vector<std::string>& names) {
  Json j = Json::array();
  for (const auto& c : m.components()) j.push_back(poly_to_json(c, names));
  return j;
}

std::vector<Poly> polys_from_json(const Json& j, const std::vector<std::string>& names, const std::string& where) {
  require(j.is_array(), where + ": expected an array of coefficient tables");
  std::vector<Poly> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    out.push_back(poly_from_json(j[i], names, where + "[" + std::to_string(i) + "]"));
  }
  return out;
}

Json vec_to_json(const Eigen::Ref<const RowVec>& v) {
  Json j = Json::array();
  for (int i = 0; i < v.size(); ++i) j.push_back(v(i));
  return j;
}

RowVec vec_from_json(const Json& j, const std::string& where) {
  require(j.is_array(), where + ": expected an array");
  RowVec v(static_cast<int>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    require(j[i].is_number(), where + ": expected numbers");
    v(static_cast<int>(i)) = j[i].get<double>();
  }
  return v;
}

std::vector<double> doubles_from_json(const Json& j, const std::string& where) {
  const RowVec v = vec_from_json(j, where);
  return std::vector<double>(v.data(), v.data() + v.size());
}

Mat rows_from_json(const Json& j, int width, const std::string& where) {
  require(j.is_array(), where + ": expected an array of rows");
  Mat m(static_cast<int>(j.size()), width);
  for (std::size_t k = 0; k < j.size(); ++k) {
    const RowVec r = vec_from_json(j[k], where + "[" + std::to_string(k) + "]");
    require(r.size() == width, where + "[" + std::to_string(k) + "]: expected " + std::to_string(width) + " entries");
    m.row(static_cast<int>(k)) = r;
  }
  return m;
}

}  // namespace

Json real_to_json(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

double real_from_json(const Json& j, const std::string& where) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    if (j.get<std::string>() == "inf") return kInf;
    if (j.get<std::string>() == "-inf") return -kInf;
  }
  throw ParseError(where + ": expected a number, \"inf\" or \"-inf\"");
}

Json parse_json(const std::string& text, const std::string& what) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    const std::size_t pos = std::min<std::size_t>(e.byte, text.size());
    int line = 1, col = 1;
    for (std::size_t i = 0; i + 1 < pos; ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    std::string msg = e.what();
    const auto cut = msg.find(": ", msg.find("parse error"));
    if (cut != std::string::npos) msg = msg.substr(cut + 2);
    throw ParseError(what + ": " + msg, line, col);
  }
}

std::string dump_json(const Json& j) { return j.dump(2) + "\n"; }

Json problem_to_json(const ProblemSpec& spec) {
  const auto xs = state_variable_names(spec.n);
  const auto es = endpoint_variable_names(spec.n);
  Json j = header("ocpcert-problem");
  j["name"] = spec.name;
  j["n"] = spec.n;
  j["n1"] = spec.n1;
  j["n2"] = spec.n2;
  j["T"] = spec.T;
  j["bounds"] = {{"u_min", real_to_json(spec.u_min)}, {"u_max", real_to_json(spec.u_max)}};
  j["f0"] = map_to_json(spec.f0, xs);
  j["f1"] = map_to_json(spec.f1, xs);
  j["g"] = poly_to_json(spec.g, xs);
  j["phi"] = poly_to_json(spec.phi, es);
  j["Phi"] = map_to_json(spec.Phi, es);
  return j;
}

ProblemSpec problem_from_json(const Json& j) {
  check_header(j, "ocpcert-problem");
  ProblemSpec s;
  const Json& name = field(j, "name", "problem");
  require(name.is_string(), "problem.name: expected a string");
  s.name = name.get<std::string>();
  s.n = int_field(j, "n", "problem");
  s.n1 = int_field(j, "n1", "problem");
  s.n2 = int_field(j, "n2", "problem");
  require(s.n > 0 && s.n1 >= 0 && s.n2 >= 0, "problem: dimensions must be n > 0, n1 >= 0, n2 >= 0");
  s.T = real_from_json(field(j, "T", "problem"), "problem.T");
  const Json& b = field(j, "bounds", "problem");
  s.u_min = real_from_json(field(b, "u_min", "problem.bounds"), "problem.bounds.u_min");
  s.u_max = real_from_json(field(b, "u_max", "problem.bounds"), "problem.bounds.u_max");
  const auto xs = state_variable_names(s.n);
  const auto es = endpoint_variable_names(s.n);
  s.f0 = make_map(s.n, polys_from_json(field(j, "f0", "problem"), xs, "problem.f0"));
  s.f1 = make_map(s.n, polys_from_json(field(j, "f1", "problem"), xs, "problem.f1"));
  s.g = poly_from_json(field(j, "g", "problem"), xs, "problem.g");
  s.phi = poly_from_json(field(j, "phi", "problem"), es, "problem.phi");
  s.Phi = make_map(2 * s.n, polys_from_json(field(j, "Phi", "problem"), es, "problem.Phi"));
  try {
    s.finalize();
  } catch (const std::invalid_argument& e) {
    throw ParseError(std::string("problem: ") + e.what());
  }
  return s;
}

Json trajectory_to_json(const Trajectory& traj) {
  Json j = header("ocpcert-trajectory");
  j["n"] = static_cast<int>(traj.x.rows());
  j["t"] = traj.grid.t;
  j["u"] = traj.u;
  Json xs = Json::array();
  for (int k = 0; k < traj.x.cols(); ++k) xs.push_back(vec_to_json(traj.x.col(k).transpose()));
  j["x"] = xs;
  Json arcs = Json::array();
  for (const auto& a : traj.arcs) {
    arcs.push_back({{"kind", to_string(a.kind)}, {"t_start", a.t_start}, {"t_end", a.t_end}});
  }
  j["arcs"] = arcs;
  return j;
}

Trajectory trajectory_from_json(const Json& j) {
  check_header(j, "ocpcert-trajectory");
  Trajectory tr;
  const int n = int_field(j, "n", "trajectory");
  require(n > 0, "trajectory.n must be positive");
  tr.grid.t = doubles_from_json(field(j, "t", "trajectory"), "trajectory.t");
  tr.u = doubles_from_json(field(j, "u", "trajectory"), "trajectory.u");
  tr.x = rows_from_json(field(j, "x", "trajectory"), n, "trajectory.x").transpose();
  require(tr.grid.t.size() >= 2, "trajectory.t: need at least two nodes");
  require(tr.u.size() + 1 == tr.grid.t.size(), "trajectory.u: expected one value per interval");
  require(tr.x.cols() == static_cast<int>(tr.grid.t.size()), "trajectory.x: expected one state per node");
  const Json& arcs = field(j, "arcs", "trajectory");
  require(arcs.is_array() && !arcs.empty(), "trajectory.arcs: expected a nonempty array");
  for (std::size_t i = 0; i < arcs.size(); ++i) {
    const std::string where = "trajectory.arcs[" + std::to_string(i) + "]";
    Arc a;
    const Json& kind = field(arcs[i], "kind", where);
    require(kind.is_string(), where + ".kind: expected a string");
    try {
      a.kind = arc_kind_from_string(kind.get<std::string>());
    } catch (const std::invalid_argument& e) {
      throw ParseError(where + ": " + e.what());
    }
    a.t_start = real_from_json(field(arcs[i], "t_start", where), where + ".t_start");
    a.t_end = real_from_json(field(arcs[i], "t_end", where), where + ".t_end");
    tr.arcs.push_back(a);
  }
  return tr;
}

MultiplierFile to_file(const Multiplier& lambda) {
  MultiplierFile m;
  m.beta = lambda.beta;
  m.psi = lambda.psi;
  m.atoms = lambda.measure.atoms;
  m.p.resize(lambda.nodes(), lambda.p_left.cols());
  for (int k = 0; k < lambda.nodes(); ++k) m.p.row(k) = lambda.p(k);
  m.nu = lambda.measure.nu;
  return m;
}

Json multiplier_to_json(const MultiplierFile& m) {
  Json j = header("ocpcert-multiplier");
  j["beta"] = m.beta;
  j["psi"] = vec_to_json(m.psi);
  Json atoms = Json::array();
  for (const auto& a : m.atoms) atoms.push_back({{"time", a.time}, {"mass", a.mass}});
  j["atoms"] = atoms;
  Json p = Json::array();
  for (int k = 0; k < m.p.rows(); ++k) p.push_back(vec_to_json(m.p.row(k)));
  j["p"] = p;
  j["nu"] = m.nu;
  return j;
}

MultiplierFile multiplier_from_json(const Json& j) {
  check_header(j, "ocpcert-multiplier");
  MultiplierFile m;
  m.beta = real_from_json(field(j, "beta", "multiplier"), "multiplier.beta");
  m.psi = vec_from_json(field(j, "psi", "multiplier"), "multiplier.psi");
  const Json& atoms = field(j, "atoms", "multiplier");
  require(atoms.is_array(), "multiplier.atoms: expected an array");
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    const std::string where = "multiplier.atoms[" + std::to_string(i) + "]";
    Atom a;
    a.time = real_from_json(field(atoms[i], "time", where), where + ".time");
    a.mass = real_from_json(field(atoms[i], "mass", where), where + ".mass");
    m.atoms.push_back(a);
  }
  if (j.contains("p")) {
    const Json& p = j["p"];
    const int width = p.is_array() && !p.empty() && p[0].is_array() ? static_cast<int>(p[0].size()) : 0;
    m.p = rows_from_json(p, width, "multiplier.p");
  }
  if (j.contains("nu")) m.nu = doubles_from_json(j["nu"], "multiplier.nu");
  return m;
}

std::string serialize_problem(const ProblemSpec& spec) { return dump_json(problem_to_json(spec)); }
ProblemSpec parse_problem(const std::string& text) { return problem_from_json(parse_json(text, "problem")); }
std::string serialize_trajectory(const Trajectory& traj) { return dump_json(trajectory_to_json(traj)); }
Trajectory parse_trajectory(const std::string& text) {
  return trajectory_from_json(parse_json(text, "trajectory"));
}
std::string serialize_multiplier(const MultiplierFile& m) { return dump_json(multiplier_to_json(m)); }
MultiplierFile parse_multiplier(const std::string& text) {
  return multiplier_from_json(parse_json(text, "multiplier"));
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::string& path, const std::string& text) {
  const std::filesystem::path parent = std::filesystem::path(path).parent_path();
  std::error_code ec;
  if (!parent.empty()) std::filesystem::create_directories(parent, ec);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
}

std::string sha256_hex(const std::string& data) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("SHA-256 failed");
  }
  std::ostringstream os;
  for (unsigned int i = 0; i < len; ++i) os << std::hex << std::setw(2) << std::setfill('0') << int(md[i]);
  return os.str();
}

}  // namespace ocpcert
