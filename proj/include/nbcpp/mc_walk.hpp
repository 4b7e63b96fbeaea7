#pragma once

#include <cstdint>

#include "nbcpp/lattice.hpp"

// Monte Carlo oracles for the discrete-time simple random walk. These back
// the statistical cross-checks of the quadrature engine; horizons are finite,
// so each estimate carries a bias bound from the return-probability tail.

namespace nbcpp::mc_walk {

struct Estimate {
  double value = 0;
  double std_err = 0;
  double bias_bound = 0;  // one-sided truncation bias
};

// fraction of walks from O that do not revisit O within `horizon` steps
Estimate escape_probability(int d, std::int64_t walkers, std::int64_t horizon,
                            std::uint64_t seed);

// fraction of walks from O that visit x within `horizon` steps
Estimate hitting_probability(const lattice::Point& x, int d,
                             std::int64_t walkers, std::int64_t horizon,
                             std::uint64_t seed);

// mean number of visits to O (counting the start) within `horizon` steps
Estimate green_visits(int d, std::int64_t walkers, std::int64_t horizon,
                      std::uint64_t seed);

// upper bound for sum_{n > horizon} p_n(O,O) of the discrete walk
double return_tail_bound(int d, std::int64_t horizon);

}  // namespace nbcpp::mc_walk
