#pragma once

#include <vector>

#include "nbcpp/lattice.hpp"
#include "nbcpp/params.hpp"

namespace nbcpp::sim {

// Resolvent tables on the torus. The torus resolvent equals the Z^d
// resolvent summed over lattice images, and the image sum factorizes per
// coordinate, so one periodized 1-d kernel per quadrature node covers all
// sites. theta * sum_x g(x) = 1 holds exactly in the limit and to quadrature
// accuracy here.
struct TorusTables {
  lattice::Torus geom;
  double theta = 0;
  double lambda = 0;
  std::vector<double> g;     // g_theta per site
  std::vector<double> v_qv;  // (g^2(x) + lambda sum_{y~x} g^2(y)) / (2 lambda d)
  double g_sum = 0;          // sum_x g(x)
  double g_sq_sum = 0;       // sum_x g(x)^2
};

TorusTables build_torus_tables(const ModelParams& par, double theta);

}  // namespace nbcpp::sim
