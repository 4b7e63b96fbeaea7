#pragma once

#include <vector>

#include "nbcpp/lattice.hpp"
#include "nbcpp/quadrature.hpp"

// Simple-random-walk analytics on Z^d for the rate-1 continuous-time walk
// with generator L h(x) = (1/2d) sum_{y~x} (h(y) - h(x)).
//
// p_t factorizes over coordinates into rate-1/d one-dimensional walks, so
// p_t(O,x) = prod_j e^{-t/d} I_{|x_j|}(t/d). Time integrals are evaluated on
// shared geometric Gauss grids with per-node Bessel tables plus closed-form
// algebraic tails from the large-time expansion of the kernel.

namespace nbcpp::walk {

using lattice::Point;

// ---- transition probabilities ------------------------------------------

double transition_probability(double t, const Point& x, int d);

// Independent oracle: uniformized series e^{-t} sum_n t^n/n! P^n(O,x) over
// the discrete-step walk, truncated with a certified Poisson tail bound.
struct SeriesValue {
  double value;
  double tail_bound;
};
SeriesValue transition_probability_series(double t, const Point& x, int d,
                                          double tol = 1e-10);

// sum_{|y|_1 <= r} p_t(O,y), evaluated by canonical orbits
double transition_mass_in_ball(double t, int d, int r);

// ---- shared quadrature grid with Bessel tables ---------------------------

struct KernelGrid {
  int d = 0;
  int n_max = 0;
  double theta = 0;
  double t_end = 0;
  std::vector<double> u;                 // node times
  std::vector<double> w;                 // node weights * e^{-theta u}
  std::vector<std::vector<double>> tab;  // [node][order]: e^{-u/d} I_ord(u/d)

  // g_theta(x) for canonical x (coordinates within [0, n_max]);
  // includes the algebraic tail when theta == 0.
  double value(const Point& x) const;
  double tail(const Point& x) const;  // closed-form integral over [t_end, inf)
};

KernelGrid make_kernel_grid(int d, double theta, int n_max, double t_end = 0,
                            int per_panel = 24);

// ---- Green function, escape and hitting probabilities --------------------

double green_function(const Point& x, int d, double tol = 1e-12);
double escape_probability(int d);                         // 1 / G(O), cached
double hitting_probability(const Point& x, int d);        // G(x) / G(O)
double resolvent(double theta, const Point& x, int d);    // g_theta(x)

// Closed-form far-field Green function (local-CLT expansion, relative error
// O(|x|^-4)); valid for |x| >~ 20.
double green_far(const Point& x, int d);

// ---- derived constants ----------------------------------------------------

double lambda_critical(int d);                // 1/(2d(2 gamma_d - 1))
double h_constant(int d, double lambda);      // supercriticality constant
bool supercritical(int d, double lambda);

// int_0^inf s p_s(O,O) ds (= sum_x g_0(x)^2), d >= 5
double s_weighted_return_integral(int d);

// the same quantity by honest lattice summation of g_0(x)^2:
// exact quadrature inside |x| <= r_quad, closed-form far field to r_far,
// zeta-function tail beyond.
struct LatticeSum {
  double value = 0;
  double zeta_tail = 0;  // contribution of |x| > r_far
  int r_quad = 0, r_far = 0;
};
LatticeSum green_square_lattice_sum(int d);

double clt_constant(int d, double lambda);          // s-weighted quadrature route
double clt_constant_lattice(int d, double lambda);  // lattice-sum route

// Epstein zeta sum_{x != 0} |x|_2^{-s} on Z^d, s > d (incomplete-gamma form)
double epstein_zeta(int d, double s);

// ---- bundled tables (CLI payload) -----------------------------------------

struct RWTables {
  int d = 0;
  double lambda = 0, theta = 0, tol = 0;
  int radius = 0;
  double gamma_d = 0, h = 0, lambda_crit = 0;
  double c1 = 0;  // NaN when d < 5 or subcritical
  bool supercritical = false;
  double t_end = 0;  // quadrature horizon metadata
  std::vector<Point> points;
  std::vector<double> green, phi, g_theta;
};

RWTables build_tables(int d, double lambda, double theta, int radius,
                      double tol = 1e-10);

}  // namespace nbcpp::walk
