#include "nbcpp/bessel.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace nbcpp::bessel {

void i_scaled(double x, int n_max, double* out) {
  if (x < 0 || !(x == x)) throw std::domain_error("bessel: x must be >= 0");
  if (x == 0.0) {
    out[0] = 1.0;
    for (int n = 1; n <= n_max; ++n) out[n] = 0.0;
    return;
  }

  // The start order must cover every order contributing to the
  // normalization sum: I_n(x)/e^x ~ exp(-n^2/2x), so n ~ 8.7 sqrt(x)
  // brings the missed mass below 1e-16.
  const int tail = static_cast<int>(std::ceil(8.7 * std::sqrt(x)));
  const int start = n_max + tail + 40;

  std::vector<double> buf(static_cast<std::size_t>(start) + 1);
  double ip1 = 0.0;   // I_{k+1} (unnormalized)
  double ik = 1e-280; // I_k seed
  buf[start] = ik;
  double sum = 0.0;   // accumulates I_0 + 2*sum_{n>=1} I_n
  const double two_over_x = 2.0 / x;

  for (int k = start; k >= 1; --k) {
    const double im1 = ip1 + two_over_x * k * ik;
    ip1 = ik;
    ik = im1;
    buf[k - 1] = ik;
    if (k - 1 >= 1) sum += 2.0 * ik;
    if (ik > 1e270) {  // rescale everything accumulated so far
      const double s = 1e-270;
      ik *= s;
      ip1 *= s;
      sum *= s;
      const int lo = k - 1;
      for (int j = lo; j <= start; ++j) buf[j] *= s;
    }
  }
  sum += buf[0];

  const double norm = 1.0 / sum;  // = e^{-x} / I-scale
  for (int n = 0; n <= n_max; ++n) out[n] = buf[n] * norm;
}

}  // namespace nbcpp::bessel
