#pragma once

#include <random>
#include <vector>

#include "ocpcert/registry.hpp"

namespace testing_support {

using namespace ocpcert;

/// Hand-rolled generators over a seeded engine.
struct Gen {
  std::mt19937_64 rng;
  explicit Gen(std::uint64_t seed) : rng(seed) {}

  double uniform(double a, double b) { return std::uniform_real_distribution<double>(a, b)(rng); }
  double normal() { return std::normal_distribution<double>()(rng); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

  Vec vec(int n, double a = -2.0, double b = 2.0) {
    Vec v(n);
    for (int i = 0; i < n; ++i) v(i) = uniform(a, b);
    return v;
  }
  RowVec row(int n) { return vec(n).transpose(); }

  std::vector<double> control(int N) {
    std::vector<double> v(N);
    for (auto& x : v) x = normal();
    return v;
  }

  /// Random polynomial of total degree <= deg.
  Poly poly(int nv, int deg, double scale = 1.0) {
    Poly p(nv);
    for (int t = 0; t < 6; ++t) {
      Exponents e(nv, 0);
      int d = integer(0, deg);
      while (d-- > 0) e[integer(0, nv - 1)] += 1;
      p.add_term(e, scale * uniform(-1, 1));
    }
    return p;
  }
  VectorField field(int n, int deg, double scale = 1.0) {
    std::vector<Poly> c;
    for (int i = 0; i < n; ++i) c.push_back(poly(n, deg, scale));
    return make_map(n, c);
  }

  /// Random instance that survives multiplier preparation.
  Instance instance(int n, int N);
};

}  // namespace testing_support
