#include "nbcpp/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "nbcpp/rng.hpp"

namespace nbcpp::stats {

double mean(std::span<const double> xs) {
  double s = 0;
  for (double x : xs) s += x;
  return s / static_cast<double>(xs.size());
}

double variance(std::span<const double> xs) {
  const double m = mean(xs);
  double s = 0;
  for (double x : xs) s += (x - m) * (x - m);
  return s / static_cast<double>(xs.size() - 1);
}

double std_error_of_mean(std::span<const double> xs) {
  return std::sqrt(variance(xs) / static_cast<double>(xs.size()));
}

namespace {
double central_moment(std::span<const double> xs, int k) {
  const double m = mean(xs);
  double s = 0;
  for (double x : xs) s += std::pow(x - m, k);
  return s / static_cast<double>(xs.size());
}
}  // namespace

double skewness(std::span<const double> xs) {
  const double m2 = central_moment(xs, 2);
  return central_moment(xs, 3) / std::pow(m2, 1.5);
}

double excess_kurtosis(std::span<const double> xs) {
  const double m2 = central_moment(xs, 2);
  return central_moment(xs, 4) / (m2 * m2) - 3.0;
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x * M_SQRT1_2); }

double normal_quantile(double p) {
  if (!(p > 0 && p < 1)) throw std::domain_error("quantile: p in (0,1)");
  // Acklam's rational approximation, then one Newton polish step
  static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                             -2.759285104469687e+02, 1.383577518672690e+02,
                             -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                             -1.556989798598866e+02, 6.680131188771972e+01,
                             -1.328068155288572e+01};
  static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                             -2.400758277161838e+00, -2.549732539343734e+00,
                             4.374664141464968e+00,  2.938163982698783e+00};
  static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                             2.445134137142996e+00, 3.754408661907416e+00};
  const double plow = 0.02425;
  double x;
  if (p < plow) {
    const double q = std::sqrt(-2 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1);
  } else if (p <= 1 - plow) {
    const double q = p - 0.5, r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) *
        q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1);
  } else {
    const double q = std::sqrt(-2 * std::log(1 - p));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1);
  }
  const double e = normal_cdf(x) - p;
  const double u = e * std::sqrt(2 * M_PI) * std::exp(0.5 * x * x);
  return x - u / (1 + 0.5 * x * u);
}

std::vector<double> covariance_matrix(
    const std::vector<std::vector<double>>& cols) {
  const int m = static_cast<int>(cols.size());
  const std::int64_t n = static_cast<std::int64_t>(cols.front().size());
  std::vector<double> mu(m);
  for (int i = 0; i < m; ++i) mu[i] = mean(cols[i]);
  std::vector<double> cov(static_cast<std::size_t>(m) * m, 0.0);
  for (int i = 0; i < m; ++i) {
    for (int j = i; j < m; ++j) {
      double s = 0;
      for (std::int64_t k = 0; k < n; ++k)
        s += (cols[i][k] - mu[i]) * (cols[j][k] - mu[j]);
      cov[i * m + j] = cov[j * m + i] = s / static_cast<double>(n - 1);
    }
  }
  return cov;
}

double jackknife_se(std::int64_t n,
                    const std::function<double(std::int64_t)>& loo) {
  std::vector<double> vals(static_cast<std::size_t>(n));
  for (std::int64_t i = 0; i < n; ++i) vals[i] = loo(i);
  const double m = mean(vals);
  double s = 0;
  for (double v : vals) s += (v - m) * (v - m);
  return std::sqrt(s * static_cast<double>(n - 1) / static_cast<double>(n));
}

double covariance_jackknife_se(std::span<const double> x,
                               std::span<const double> y) {
  const std::int64_t n = static_cast<std::int64_t>(x.size());
  double sx = 0, sy = 0, sxy = 0;
  for (std::int64_t i = 0; i < n; ++i) {
    sx += x[i];
    sy += y[i];
    sxy += x[i] * y[i];
  }
  return jackknife_se(n, [&](std::int64_t i) {
    const double m = static_cast<double>(n - 1);
    const double ax = (sx - x[i]) / m;
    const double ay = (sy - y[i]) / m;
    return (sxy - x[i] * y[i]) / m - ax * ay;
  });
}

VarianceRatio variance_ratio(std::span<const double> xs, double reference,
                             int resamples, std::uint64_t seed) {
  if (xs.size() < 2) throw std::invalid_argument("variance_ratio: need >= 2");
  VarianceRatio out;
  const double v = variance(xs);
  if (v == 0.0 || reference == 0.0) {
    out.degenerate = true;
    return out;
  }
  out.ratio = v / reference;
  const std::int64_t n = static_cast<std::int64_t>(xs.size());
  std::vector<double> boot(static_cast<std::size_t>(resamples));
  rng::Stream rs(seed, rng::kBootstrapStream);
  std::vector<double> take(static_cast<std::size_t>(n));
  for (int b = 0; b < resamples; ++b) {
    for (std::int64_t i = 0; i < n; ++i)
      take[i] = xs[rs.bounded(static_cast<std::uint64_t>(n))];
    boot[b] = variance(take) / reference;
  }
  std::sort(boot.begin(), boot.end());
  const auto pick = [&](double q) {
    const double pos = q * (resamples - 1);
    const int lo = static_cast<int>(pos);
    const int hi = std::min(lo + 1, resamples - 1);
    const double f = pos - lo;
    return boot[lo] * (1 - f) + boot[hi] * f;
  };
  out.ci_lo = pick(0.025);
  out.ci_hi = pick(0.975);
  return out;
}

KsResult ks_normal_test(std::span<const double> zs) {
  const std::int64_t n = static_cast<std::int64_t>(zs.size());
  if (n < 8) throw std::invalid_argument("ks: need >= 8 samples");
  std::vector<double> s(zs.begin(), zs.end());
  std::sort(s.begin(), s.end());
  double d = 0;
  for (std::int64_t i = 0; i < n; ++i) {
    const double f = normal_cdf(s[i]);
    d = std::max(d, std::abs(f - static_cast<double>(i) / n));
    d = std::max(d, std::abs(static_cast<double>(i + 1) / n - f));
  }
  const double rn = std::sqrt(static_cast<double>(n));
  const double lam = d * (rn + 0.12 + 0.11 / rn);
  double p = 0;
  for (int k = 1; k <= 100; ++k) {
    const double term = 2.0 * ((k & 1) ? 1.0 : -1.0) *
                        std::exp(-2.0 * k * k * lam * lam);
    p += term;
    if (std::abs(term) < 1e-12) break;
  }
  KsResult out;
  out.statistic = d;
  out.p_value = std::clamp(p, 0.0, 1.0);
  out.skewness = skewness(zs);
  out.excess_kurtosis = excess_kurtosis(zs);
  return out;
}

FddResult fdd_covariance(const std::vector<std::vector<double>>& cols,
                         std::span<const double> times, double scale) {
  if (cols.size() != times.size() || cols.empty() || cols.size() > 5)
    throw std::invalid_argument("fdd: need 1..5 time columns");
  if (cols.front().size() < 1000)
    throw std::invalid_argument("fdd: need >= 1000 samples");
  FddResult out;
  out.covariance = covariance_matrix(cols);
  const int m = static_cast<int>(cols.size());
  out.target.resize(static_cast<std::size_t>(m) * m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) {
      const double tgt = scale * std::min(times[i], times[j]);
      out.target[i * m + j] = tgt;
      const double dev = std::abs(out.covariance[i * m + j] - tgt) /
                         (tgt == 0 ? 1.0 : std::abs(tgt));
      out.max_rel_dev = std::max(out.max_rel_dev, dev);
    }
  return out;
}

}  // namespace nbcpp::stats
