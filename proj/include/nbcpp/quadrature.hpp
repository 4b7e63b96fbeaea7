#pragma once

#include <functional>
#include <vector>

namespace nbcpp::quad {

// Gauss-Legendre nodes/weights on [-1, 1], computed once per order by Newton
// iteration on P_n (machine-precision, no constant tables).
struct GaussRule {
  std::vector<double> x, w;
  explicit GaussRule(int n);
};

const GaussRule& gauss_rule(int n);  // cached by order

// integral of f over [a, b] with a single order-n rule
double gauss(const std::function<double(double)>& f, double a, double b, int n);

// Adaptive bisection, error estimated from an embedded G10/G21 pair.
// Stops when |err| <= max(abs_tol, rel_tol * |I|) per interval.
double integrate(const std::function<double(double)>& f, double a, double b,
                 double abs_tol, double rel_tol = 1e-13, int max_depth = 48);

// Composite panels 0,1,2,4,...,t_end (geometric), one Gauss rule per panel.
// Suited to integrands that vary on the scale of their argument.
struct PanelGrid {
  std::vector<double> nodes, weights;
  double t_end = 0;
};
PanelGrid geometric_grid(double t_end, int per_panel = 24);

// Upper incomplete gamma Gamma(a, x) by Lentz continued fraction; requires
// x > 0 and converges fast for x >~ 1 (any real a).
double upper_gamma(double a, double x);

}  // namespace nbcpp::quad
