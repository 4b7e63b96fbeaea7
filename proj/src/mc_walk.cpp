#include "nbcpp/mc_walk.hpp"

#include <cmath>
#include <stdexcept>

#include "nbcpp/rng.hpp"

namespace nbcpp::mc_walk {

namespace {

struct WalkState {
  int pos[lattice::kMaxDim] = {};
  int nonzero = 0;  // number of nonzero coordinates

  inline void step(int axis, int dir) {
    int& c = pos[axis];
    if (c == 0) {
      ++nonzero;
    }
    c += dir;
    if (c == 0) --nonzero;
  }
  inline bool at_origin() const { return nonzero == 0; }
};

}  // namespace

double return_tail_bound(int d, std::int64_t horizon) {
  // p_{2m}(O,O) ~ 2 (d / 4 pi m)^{d/2}; sum the tail as an integral
  const double hd = 0.5 * d;
  const double m0 = 0.5 * static_cast<double>(horizon);
  return 2.0 * std::pow(d / (4.0 * M_PI), hd) * std::pow(m0, 1.0 - hd) /
         (hd - 1.0);
}

Estimate escape_probability(int d, std::int64_t walkers, std::int64_t horizon,
                            std::uint64_t seed) {
  if (d < 3) throw std::domain_error("escape mc: needs d >= 3");
  std::int64_t escaped = 0;
  for (std::int64_t wk = 0; wk < walkers; ++wk) {
    rng::FastStream s(seed, static_cast<std::uint64_t>(wk));
    WalkState x;
    bool returned = false;
    for (std::int64_t n = 0; n < horizon; ++n) {
      const std::uint64_t r = s.bounded(static_cast<std::uint64_t>(2 * d));
      x.step(static_cast<int>(r >> 1), (r & 1) ? 1 : -1);
      if (x.at_origin()) {
        returned = true;
        break;
      }
    }
    if (!returned) ++escaped;
  }
  Estimate e;
  e.value = static_cast<double>(escaped) / static_cast<double>(walkers);
  e.std_err = std::sqrt(e.value * (1.0 - e.value) /
                        static_cast<double>(walkers));
  e.bias_bound = return_tail_bound(d, horizon);
  return e;
}

Estimate hitting_probability(const lattice::Point& x, int d,
                             std::int64_t walkers, std::int64_t horizon,
                             std::uint64_t seed) {
  if (x.d != d) throw std::invalid_argument("hitting mc: dimension mismatch");
  std::int64_t hits = 0;
  const bool target_is_origin = l1_norm(x) == 0;
  for (std::int64_t wk = 0; wk < walkers; ++wk) {
    rng::FastStream s(seed, static_cast<std::uint64_t>(wk));
    int pos[lattice::kMaxDim] = {};
    bool hit = target_is_origin;  // n = 0 counts
    for (std::int64_t n = 0; !hit && n < horizon; ++n) {
      const std::uint64_t r = s.bounded(static_cast<std::uint64_t>(2 * d));
      pos[r >> 1] += (r & 1) ? 1 : -1;
      bool eq = true;
      for (int i = 0; i < d; ++i)
        if (pos[i] != x.c[i]) {
          eq = false;
          break;
        }
      hit = eq;
    }
    if (hit) ++hits;
  }
  Estimate e;
  e.value = static_cast<double>(hits) / static_cast<double>(walkers);
  e.std_err =
      std::sqrt(e.value * (1.0 - e.value) / static_cast<double>(walkers));
  e.bias_bound = return_tail_bound(d, horizon);
  return e;
}

Estimate green_visits(int d, std::int64_t walkers, std::int64_t horizon,
                      std::uint64_t seed) {
  if (d < 3) throw std::domain_error("green mc: needs d >= 3");
  double sum = 0, sum_sq = 0;
  for (std::int64_t wk = 0; wk < walkers; ++wk) {
    rng::FastStream s(seed, static_cast<std::uint64_t>(wk));
    WalkState x;
    double visits = 1.0;
    for (std::int64_t n = 0; n < horizon; ++n) {
      const std::uint64_t r = s.bounded(static_cast<std::uint64_t>(2 * d));
      x.step(static_cast<int>(r >> 1), (r & 1) ? 1 : -1);
      if (x.at_origin()) visits += 1.0;
    }
    sum += visits;
    sum_sq += visits * visits;
  }
  const double n = static_cast<double>(walkers);
  Estimate e;
  e.value = sum / n;
  e.std_err = std::sqrt((sum_sq / n - e.value * e.value) / n);
  e.bias_bound = return_tail_bound(d, horizon) / (1.0 /* visits per return */);
  return e;
}

}  // namespace nbcpp::mc_walk
