#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace nbcpp::stats {

double mean(std::span<const double> xs);
double variance(std::span<const double> xs);  // unbiased
double std_error_of_mean(std::span<const double> xs);
double skewness(std::span<const double> xs);
double excess_kurtosis(std::span<const double> xs);

double normal_cdf(double x);
double normal_quantile(double p);  // Acklam rational approximation + polish

// covariance matrix of column-major samples: data[k] holds column k
std::vector<double> covariance_matrix(
    const std::vector<std::vector<double>>& cols);

// delete-one jackknife standard error of an arbitrary statistic; the
// callback must evaluate the statistic with observation i removed
double jackknife_se(std::int64_t n,
                    const std::function<double(std::int64_t)>& leave_one_out);

// jackknife SE of Cov(x, y)
double covariance_jackknife_se(std::span<const double> x,
                               std::span<const double> y);

struct VarianceRatio {
  bool degenerate = false;
  double ratio = 0;
  double ci_lo = 0, ci_hi = 0;  // bootstrap percentile 95%
};
// sample Var(xs) / reference, bootstrap over `resamples` draws
VarianceRatio variance_ratio(std::span<const double> xs, double reference,
                             int resamples, std::uint64_t seed);

struct KsResult {
  double statistic = 0;
  double p_value = 0;
  double skewness = 0;
  double excess_kurtosis = 0;
};
// one-sample Kolmogorov-Smirnov against the standard normal
KsResult ks_normal_test(std::span<const double> zs);

struct FddResult {
  std::vector<double> covariance;  // m x m row-major
  std::vector<double> target;      // reference min(t_i, t_j) scale
  double max_rel_dev = 0;
};
// empirical covariance of (X_{t_1},...,X_{t_m}) against scale*min(t_i,t_j)
FddResult fdd_covariance(const std::vector<std::vector<double>>& cols,
                         std::span<const double> times, double scale);

}  // namespace nbcpp::stats
