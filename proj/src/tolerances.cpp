#include "ocpcert/tolerances.hpp"

#include <cstdlib>
#include <stdexcept>

namespace ocpcert {

namespace {
template <typename F>
void for_each_field(Tolerances& t, F&& f) {
  f("tol_dyn", t.tol_dyn, true);
  f("tol_g", t.tol_g, true);
  f("dist_min", t.dist_min, false);
  f("jump_min", t.jump_min, false);
  f("fo_min", t.fo_min, false);
  f("fit_tol", t.fit_tol, true);
  f("max_iter", t.max_iter, false);
  f("stat_tol", t.stat_tol, true);
  f("jump_tol", t.jump_tol, true);
  f("sc_margin", t.sc_margin, false);
  f("nec_tol", t.nec_tol, true);
  f("leg_tol", t.leg_tol, false);
  f("suf_tol", t.suf_tol, false);
  f("qomega_tol", t.qomega_tol, true);
}
}  // namespace

Tolerances Tolerances::profile(const std::string& name) {
  Tolerances t;
  double factor = 1.0;
  if (name == "strict") {
    factor = 0.1;
  } else if (name == "loose") {
    factor = 10.0;
  } else if (name != "default" && !name.empty()) {
    throw std::invalid_argument("unknown tolerance profile '" + name + "'");
  }
  for_each_field(t, [&](const char*, double& v, bool residual) {
    if (residual) v *= factor;
  });
  return t;
}

Tolerances Tolerances::from_environment() {
  const char* env = std::getenv("OCPCERT_TOL_PROFILE");
  return profile(env ? env : "default");
}

void Tolerances::set(const std::string& key, double value) {
  bool found = false;
  for_each_field(*this, [&](const char* name, double& v, bool) {
    if (key == name) {
      v = value;
      found = true;
    }
  });
  if (!found) throw std::invalid_argument("unknown tolerance '" + key + "'");
  if (!(value >= 0.0)) throw std::invalid_argument("tolerance '" + key + "' must be nonnegative");
}

void Tolerances::apply_override(const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos) throw std::invalid_argument("expected key=value, got '" + assignment + "'");
  const std::string key = assignment.substr(0, eq);
  const std::string val = assignment.substr(eq + 1);
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(val, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != val.size()) throw std::invalid_argument("bad number in '" + assignment + "'");
  set(key, v);
}

std::vector<std::pair<std::string, double>> Tolerances::items() const {
  std::vector<std::pair<std::string, double>> out;
  Tolerances copy = *this;
  for_each_field(copy, [&](const char* name, double& v, bool) { out.emplace_back(name, v); });
  return out;
}

}  // namespace ocpcert
