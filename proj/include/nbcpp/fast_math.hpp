#pragma once

#include <bit>
#include <cstdint>

// Branch-free double-precision log/exp for the simulator's batch passes.
// Pure arithmetic (auto-vectorizable), deterministic, ~2 ulp worst case over
// the domains used: log on [2^-53, 1], exp on [-708, 0].

namespace nbcpp::fastmath {

// natural log for x in [2^-53, 1]; no zero/inf/nan handling
inline double log_unit(double x) {
  std::uint64_t bits = std::bit_cast<std::uint64_t>(x);
  // normalize mantissa to [sqrt(1/2), sqrt(2))
  const std::uint64_t mant = bits & 0x000FFFFFFFFFFFFFull;
  const std::uint64_t adj = mant >= 0x0006A09E667F3BCDull ? 1 : 0;
  const std::int64_t e =
      static_cast<std::int64_t>(bits >> 52) - 1023 + static_cast<std::int64_t>(adj);
  const std::uint64_t mbits =
      (mant | 0x3FF0000000000000ull) - (adj << 52);
  const double m = std::bit_cast<double>(mbits);
  // atanh series: log m = 2 atanh(s), s = (m-1)/(m+1), |s| <= 0.1716
  const double s = (m - 1.0) / (m + 1.0);
  const double z = s * s;
  double p = 2.0 / 21.0;
  p = p * z + 2.0 / 19.0;
  p = p * z + 2.0 / 17.0;
  p = p * z + 2.0 / 15.0;
  p = p * z + 2.0 / 13.0;
  p = p * z + 2.0 / 11.0;
  p = p * z + 2.0 / 9.0;
  p = p * z + 2.0 / 7.0;
  p = p * z + 2.0 / 5.0;
  p = p * z + 2.0 / 3.0;
  p = p * z + 2.0;
  constexpr double kLn2Hi = 0x1.62e42fefa39efp-1;
  constexpr double kLn2Lo = 0x1.abc9e3b39803fp-56;
  const double de = static_cast<double>(e);
  return de * kLn2Hi + (de * kLn2Lo + s * p);
}

// e^x for |x| <= 708; no overflow/subnormal/nan handling
inline double exp_finite(double x) {
  constexpr double kLog2E = 0x1.71547652b82fep+0;
  constexpr double kLn2Hi = 0x1.62e42fefa39efp-1;
  constexpr double kLn2Lo = 0x1.abc9e3b39803fp-56;
  const double kf = x * kLog2E + 0x1.8p52 - 0x1.8p52;  // nearest int
  const double r = (x - kf * kLn2Hi) - kf * kLn2Lo;
  // Taylor to r^13/13!, |r| <= 0.347
  double p = 1.0 / 6227020800.0;
  p = p * r + 1.0 / 479001600.0;
  p = p * r + 1.0 / 39916800.0;
  p = p * r + 1.0 / 3628800.0;
  p = p * r + 1.0 / 362880.0;
  p = p * r + 1.0 / 40320.0;
  p = p * r + 1.0 / 5040.0;
  p = p * r + 1.0 / 720.0;
  p = p * r + 1.0 / 120.0;
  p = p * r + 1.0 / 24.0;
  p = p * r + 1.0 / 6.0;
  p = p * r + 0.5;
  p = p * r + 1.0;
  p = p * r + 1.0;
  const std::int64_t k = static_cast<std::int64_t>(kf);
  const std::uint64_t sc = static_cast<std::uint64_t>(1023 + k) << 52;
  return p * std::bit_cast<double>(sc);
}

}  // namespace nbcpp::fastmath
