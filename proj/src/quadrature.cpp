#include "nbcpp/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>

namespace nbcpp::quad {

GaussRule::GaussRule(int n) : x(n), w(n) {
  // roots of P_n by Newton from Chebyshev initial guesses
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double z = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double pp = 0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = 0.0;
      for (int j = 0; j < n; ++j) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j + 1.0) * z * p1 - j * p2) / (j + 1.0);
      }
      pp = n * (z * p0 - p1) / (z * z - 1.0);
      const double dz = p0 / pp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    x[i] = -z;
    x[n - 1 - i] = z;
    w[i] = w[n - 1 - i] = 2.0 / ((1.0 - z * z) * pp * pp);
  }
}

const GaussRule& gauss_rule(int n) {
  static std::map<int, GaussRule> cache;
  static std::mutex mu;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, GaussRule(n)).first;
  return it->second;
}

double gauss(const std::function<double(double)>& f, double a, double b,
             int n) {
  const GaussRule& r = gauss_rule(n);
  const double h = 0.5 * (b - a), m = 0.5 * (a + b);
  double s = 0;
  for (int i = 0; i < n; ++i) s += r.w[i] * f(m + h * r.x[i]);
  return s * h;
}

namespace {

double integrate_rec(const std::function<double(double)>& f, double a,
                     double b, double abs_tol, double rel_tol, int depth) {
  const double coarse = gauss(f, a, b, 10);
  const double fine = gauss(f, a, b, 21);
  const double err = std::abs(fine - coarse);
  if (err <= std::max(abs_tol, rel_tol * std::abs(fine)) || depth <= 0)
    return fine;
  const double m = 0.5 * (a + b);
  return integrate_rec(f, a, m, 0.5 * abs_tol, rel_tol, depth - 1) +
         integrate_rec(f, m, b, 0.5 * abs_tol, rel_tol, depth - 1);
}

}  // namespace

double integrate(const std::function<double(double)>& f, double a, double b,
                 double abs_tol, double rel_tol, int max_depth) {
  if (!(b >= a)) throw std::invalid_argument("integrate: b < a");
  if (a == b) return 0.0;
  return integrate_rec(f, a, b, abs_tol, rel_tol, max_depth);
}

PanelGrid geometric_grid(double t_end, int per_panel) {
  PanelGrid g;
  const GaussRule& r = gauss_rule(per_panel);
  double lo = 0.0, hi = 1.0;
  while (lo < t_end) {
    if (hi > t_end) hi = t_end;
    const double h = 0.5 * (hi - lo), m = 0.5 * (hi + lo);
    for (int i = 0; i < per_panel; ++i) {
      g.nodes.push_back(m + h * r.x[i]);
      g.weights.push_back(h * r.w[i]);
    }
    lo = hi;
    hi = 2.0 * hi;
  }
  g.t_end = t_end;
  return g;
}

double upper_gamma(double a, double x) {
  if (!(x > 0)) throw std::domain_error("upper_gamma: x must be > 0");
  // Gamma(a,x) = e^{-x} x^a * CF, CF = 1/(x+1-a- 1(1-a)/(x+3-a- ...))
  const double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / (b == 0 ? tiny : b);
  double h = d;
  for (int i = 1; i <= 400; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < 1e-16) break;
  }
  return std::exp(-x + a * std::log(x)) * h;
}

}  // namespace nbcpp::quad
