#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace nbcpp {

// Lattice dimension, infection rate, torus side.
struct ModelParams {
  int d = 5;
  double lambda = 1.0;
  int L = 15;

  std::int64_t sites() const {
    std::int64_t n = 1;
    for (int i = 0; i < d; ++i) n *= L;
    return n;
  }
  // per-site reset rate
  double reset_rate() const { return 1.0 / (2.0 * lambda * d); }
  // drift coefficient of the inter-event flow
  double drift() const { return reset_rate() - 1.0; }
  // reset + one infection-in per ordered neighbor pair
  double total_rate() const {
    return static_cast<double>(sites()) * (1.0 + reset_rate());
  }

  // empty when valid; each entry names the offending field
  std::vector<std::string> validate() const;
  // d >= 3 and lambda above the explicit threshold (needs d >= 3)
  bool supercritical() const;
};

}  // namespace nbcpp
