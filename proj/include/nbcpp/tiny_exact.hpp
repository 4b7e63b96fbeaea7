#pragma once

#include <vector>

#include "nbcpp/params.hpp"

// Exact first and second moments on tiny tori by dense matrix exponential
// of the closed moment ODE systems (first moments: the walk generator;
// second moments: the pair generator). Independent of both the event engine
// and the series kernels, so it cross-validates them.

namespace nbcpp::oracle {

// dense row-major expm by Pade-13 scaling and squaring
std::vector<double> expm(const std::vector<double>& a, int n);

struct TinyMoments {
  std::int64_t n_sites = 0;
  std::vector<double> first;   // E eta_t(x), site-indexed
  std::vector<double> second;  // E eta_t(a) eta_t(b), pair-indexed a*n+b
};

// requires L^d <= 16 sites; from the all-ones start
TinyMoments tiny_torus_moments(const ModelParams& par, double t);

}  // namespace nbcpp::oracle
