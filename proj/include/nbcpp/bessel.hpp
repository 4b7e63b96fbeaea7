#pragma once

#include <vector>

namespace nbcpp::bessel {

// Fills out[0..n_max] with e^{-x} I_n(x), x >= 0.
// Backward (Miller) recurrence normalized with I_0 + 2 sum I_n = e^x,
// accurate to ~1e-14 relative over the full range used here.
void i_scaled(double x, int n_max, double* out);

inline std::vector<double> i_scaled(double x, int n_max) {
  std::vector<double> v(static_cast<std::size_t>(n_max) + 1);
  i_scaled(x, n_max, v.data());
  return v;
}

inline double i0_scaled(double x) {
  double v[1];
  i_scaled(x, 0, v);
  return v[0];
}

}  // namespace nbcpp::bessel
