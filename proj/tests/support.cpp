#include "support.hpp"

#include "ocpcert/properties.hpp"

namespace testing_support {

Instance Gen::instance(int n, int N) {
  for (int attempt = 0;; ++attempt) {
    try {
      Instance in = synthetic::random_instance(rng, n, N);
      Prepared probe(in, Tolerances{});
      return in;
    } catch (const std::exception&) {
      if (attempt > 20) throw;
    }
  }
}

}  // namespace testing_support
