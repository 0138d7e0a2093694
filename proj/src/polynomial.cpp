#include "ocpcert/polynomial.hpp"

#include <cctype>

namespace ocpcert {

std::string format_monomial(const Exponents& e, const std::vector<std::string>& names) {
  if (e.size() != names.size()) throw DimensionError("monomial/name count mismatch");
  std::string out;
  for (std::size_t i = 0; i < e.size(); ++i) {
    if (e[i] == 0) continue;
    if (!out.empty()) out += '*';
    out += names[i];
    if (e[i] > 1) out += '^' + std::to_string(e[i]);
  }
  return out.empty() ? "1" : out;
}

Exponents parse_monomial(const std::string& text, const std::vector<std::string>& names) {
  Exponents e(names.size(), 0);
  std::size_t pos = 0;
  auto skip_ws = [&] {
    while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
  };
  const auto first = text.find_first_not_of(" \t");
  const auto last = text.find_last_not_of(" \t");
  if (first != std::string::npos && text.substr(first, last - first + 1) == "1") return e;
  bool expect_factor = true;
  while (true) {
    skip_ws();
    if (pos >= text.size()) break;
    if (!expect_factor) {
      if (text[pos] != '*') throw ParseError("expected '*' in monomial '" + text + "'");
      ++pos;
      expect_factor = true;
      continue;
    }
    std::size_t start = pos;
    while (pos < text.size() &&
           (std::isalnum(static_cast<unsigned char>(text[pos])) || text[pos] == '_')) {
      ++pos;
    }
    const std::string name = text.substr(start, pos - start);
    std::size_t idx = names.size();
    for (std::size_t i = 0; i < names.size(); ++i) {
      if (names[i] == name) idx = i;
    }
    if (idx == names.size()) throw ParseError("unknown variable '" + name + "' in monomial '" + text + "'");
    int power = 1;
    skip_ws();
    if (pos < text.size() && text[pos] == '^') {
      ++pos;
      skip_ws();
      std::size_t ds = pos;
      while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) ++pos;
      if (ds == pos) throw ParseError("missing exponent in monomial '" + text + "'");
      power = std::stoi(text.substr(ds, pos - ds));
      if (power < 1) throw ParseError("exponent must be positive in monomial '" + text + "'");
    }
    e[idx] += power;
    expect_factor = false;
  }
  if (expect_factor) throw ParseError("incomplete monomial '" + text + "'");
  return e;
}

std::vector<std::string> state_variable_names(int n) {
  std::vector<std::string> v;
  for (int i = 1; i <= n; ++i) v.push_back("x" + std::to_string(i));
  return v;
}

std::vector<std::string> endpoint_variable_names(int n) {
  std::vector<std::string> v;
  for (int i = 1; i <= n; ++i) v.push_back("x0_" + std::to_string(i));
  for (int i = 1; i <= n; ++i) v.push_back("xT_" + std::to_string(i));
  return v;
}

}  // namespace ocpcert
