#include "nbcpp/walk.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <mutex>
#include <stdexcept>
#include <unordered_map>

#include "nbcpp/bessel.hpp"

namespace nbcpp::walk {

namespace {

constexpr int kAsymOrder = 8;  // kernel tail expansion length

double ceil_pow2(double x) {
  double p = 1.0;
  while (p < x) p *= 2.0;
  return p;
}

int max_abs_coord(const Point& x) {
  int m = 0;
  for (int i = 0; i < x.d; ++i) m = std::max(m, std::abs(x.c[i]));
  return m;
}

// coefficients of e^{-v} I_n(v) = (2 pi v)^{-1/2} sum_k a_k(n) v^{-k}
void coord_asym_coeffs(int n, double* a) {
  const double mu = 4.0 * n * n;
  a[0] = 1.0;
  for (int k = 1; k < kAsymOrder; ++k) {
    const double odd = 2.0 * k - 1.0;
    a[k] = -a[k - 1] * (mu - odd * odd) / (8.0 * k);
  }
}

// product of the per-coordinate expansions, truncated at kAsymOrder
void point_asym_coeffs(const Point& x, double* c) {
  double acc[kAsymOrder], term[kAsymOrder], next[kAsymOrder];
  coord_asym_coeffs(std::abs(x.c[0]), acc);
  for (int j = 1; j < x.d; ++j) {
    coord_asym_coeffs(std::abs(x.c[j]), term);
    for (int k = 0; k < kAsymOrder; ++k) {
      double s = 0;
      for (int i = 0; i <= k; ++i) s += acc[i] * term[k - i];
      next[k] = s;
    }
    std::copy(next, next + kAsymOrder, acc);
  }
  std::copy(acc, acc + kAsymOrder, c);
}

double poisson_tail_cutoff(double t, double tol, int& n_out) {
  // smallest N with P(Poisson(t) > N) < tol
  double term = std::exp(-t), cum = term;
  int n = 0;
  while (1.0 - cum >= tol) {
    ++n;
    term *= t / n;
    cum += term;
    if (n > 100000) break;
  }
  n_out = n;
  return std::max(0.0, 1.0 - cum);
}

}  // namespace

double transition_probability(double t, const Point& x, int d) {
  if (!(t >= 0)) throw std::domain_error("transition_probability: t must be >= 0");
  if (d < 1 || d > lattice::kMaxDim)
    throw std::domain_error("transition_probability: bad dimension");
  const int m = max_abs_coord(x);
  std::vector<double> tab = bessel::i_scaled(t / d, m);
  double p = 1.0;
  for (int i = 0; i < d; ++i) p *= tab[std::abs(x.c[i])];
  return std::clamp(p, 0.0, 1.0);
}

SeriesValue transition_probability_series(double t, const Point& x, int d,
                                          double tol) {
  if (!(t >= 0)) throw std::domain_error("series: t must be >= 0");
  int n_max = 0;
  const double tail = poisson_tail_cutoff(t, tol, n_max);
  if (l1_norm(x) > n_max) return {0.0, tail};

  std::vector<Point> pts;
  std::unordered_map<Point, int, lattice::PointHash> index;
  lattice::for_each_canonical_l1(d, n_max, [&](const Point& p) {
    index.emplace(p, static_cast<int>(pts.size()));
    pts.push_back(p);
  });
  const int np = static_cast<int>(pts.size());

  // moves to canonical neighbors; -1 marks "outside the ball" (value 0)
  std::vector<int> nbr(static_cast<std::size_t>(np) * 2 * d);
  for (int i = 0; i < np; ++i) {
    for (int axis = 0; axis < d; ++axis) {
      for (int s = 0; s < 2; ++s) {
        Point q = pts[i];
        q.c[axis] += s ? 1 : -1;
        const Point cq = lattice::canonical(q);
        auto it = index.find(cq);
        nbr[(static_cast<std::size_t>(i) * 2 + s) * d + axis] =
            it == index.end() ? -1 : it->second;
      }
    }
  }

  const int target = index.at(lattice::canonical(x));
  std::vector<double> cur(np, 0.0), nxt(np, 0.0);
  cur[index.at(Point::zero(d))] = 1.0;

  double coeff = std::exp(-t);
  double acc = coeff * cur[target];
  const double inv2d = 1.0 / (2.0 * d);
  for (int n = 1; n <= n_max; ++n) {
    for (int i = 0; i < np; ++i) {
      double s = 0;
      const int* row = &nbr[static_cast<std::size_t>(i) * 2 * d];
      for (int k = 0; k < 2 * d; ++k) {
        const int j = row[k];
        if (j >= 0) s += cur[j];
      }
      nxt[i] = s * inv2d;
    }
    cur.swap(nxt);
    coeff *= t / n;
    acc += coeff * cur[target];
  }
  return {acc, tail};
}

double transition_mass_in_ball(double t, int d, int r) {
  std::vector<double> tab = bessel::i_scaled(t / d, r);
  double total = 0;
  lattice::for_each_canonical_l1(d, r, [&](const Point& p) {
    double v = 1.0;
    for (int i = 0; i < d; ++i) v *= tab[p.c[i]];
    total += lattice::orbit_size(p) * v;
  });
  return total;
}

// ---- KernelGrid -----------------------------------------------------------

KernelGrid make_kernel_grid(int d, double theta, int n_max, double t_end,
                            int per_panel) {
  if (theta < 0) throw std::domain_error("resolvent: theta must be >= 0");
  if (theta == 0 && d < 3)
    throw std::domain_error("green function diverges for d <= 2");
  KernelGrid g;
  g.d = d;
  g.theta = theta;
  g.n_max = n_max;
  if (t_end <= 0) {
    t_end = std::max(4096.0, ceil_pow2(8.0 * d * n_max * n_max));
    if (theta > 0) t_end = std::max(64.0, std::min(t_end, ceil_pow2(45.0 / theta)));
  }
  g.t_end = t_end;
  quad::PanelGrid pg = quad::geometric_grid(t_end, per_panel);
  g.u = pg.nodes;
  g.w = pg.weights;
  g.tab.resize(g.u.size());
  for (std::size_t i = 0; i < g.u.size(); ++i) {
    g.tab[i] = bessel::i_scaled(g.u[i] / d, n_max);
    if (theta > 0) g.w[i] *= std::exp(-theta * g.u[i]);
  }
  return g;
}

double KernelGrid::value(const Point& x) const {
  double s = 0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    double p = w[i];
    for (int j = 0; j < d; ++j) p *= tab[i][std::abs(x.c[j])];
    s += p;
  }
  if (theta == 0) s += tail(x);
  return s;
}

double KernelGrid::tail(const Point& x) const {
  // int_{t_end}^inf prod_j e^{-u/d} I_{x_j}(u/d) du, via the 1/v expansion
  // (v = u/d); exact down to the truncation of the expansion.
  double c[kAsymOrder];
  point_asym_coeffs(x, c);
  const double V = t_end / d;
  const double pref = d * std::pow(2.0 * M_PI, -0.5 * d);
  double s = 0;
  double vpow = std::pow(V, 1.0 - 0.5 * d);
  for (int k = 0; k < kAsymOrder; ++k) {
    s += c[k] * vpow / (0.5 * d + k - 1.0);
    vpow /= V;
  }
  return pref * s;
}

// ---- Green / escape / hitting / resolvent --------------------------------

double green_function(const Point& x, int d, double /*tol*/) {
  if (d < 3) throw std::domain_error("green function diverges for d <= 2");
  KernelGrid g = make_kernel_grid(d, 0.0, max_abs_coord(x));
  return g.value(x);
}

double escape_probability(int d) {
  if (d < 3) throw std::domain_error("escape probability needs d >= 3");
  static std::map<int, double> cache;
  static std::mutex mu;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(d);
  if (it == cache.end())
    it = cache.emplace(d, 1.0 / green_function(Point::zero(d), d)).first;
  return it->second;
}

double hitting_probability(const Point& x, int d) {
  if (d < 3) throw std::domain_error("hitting probability needs d >= 3");
  KernelGrid g = make_kernel_grid(d, 0.0, max_abs_coord(x));
  const double go = g.value(Point::zero(d));
  return std::clamp(g.value(x) / go, 0.0, 1.0);
}

double resolvent(double theta, const Point& x, int d) {
  if (theta < 0) throw std::domain_error("resolvent: theta must be >= 0");
  if (theta == 0) return green_function(x, d);
  KernelGrid g = make_kernel_grid(d, theta, max_abs_coord(x));
  return g.value(x);
}

double green_far(const Point& x, int d) {
  const double q = 0.5 * static_cast<double>(l2_sq(x));
  if (q <= 0) throw std::domain_error("green_far: x must be nonzero");
  double s4 = 0;
  for (int i = 0; i < d; ++i) {
    const double c2 = static_cast<double>(x.c[i]) * x.c[i];
    s4 += c2 * c2;
  }
  const double hd = 0.5 * d;
  const double pref = d * std::pow(2.0 * M_PI, -hd);
  const double lead = std::tgamma(hd - 1.0) * std::pow(q, 1.0 - hd);
  const double rad = -(d / 8.0) * std::tgamma(hd) * std::pow(q, -hd);
  const double quart =
      (s4 / 24.0) * std::tgamma(hd + 2.0) * std::pow(q, -hd - 2.0);
  return pref * (lead + rad + quart);
}

// ---- constants -------------------------------------------------------------

double lambda_critical(int d) {
  const double g = escape_probability(d);
  return 1.0 / (2.0 * d * (2.0 * g - 1.0));
}

double h_constant(int d, double lambda) {
  if (lambda <= 0) throw std::domain_error("h_constant: lambda must be > 0");
  const double g = escape_probability(d);
  return (2.0 * lambda * d * (2.0 * g - 1.0) - 1.0) / (1.0 + 2.0 * d * lambda);
}

bool supercritical(int d, double lambda) {
  return d >= 3 && h_constant(d, lambda) > 0.0;
}

double s_weighted_return_integral(int d) {
  if (d < 5)
    throw std::domain_error("s-weighted return integral diverges for d <= 4");
  KernelGrid g = make_kernel_grid(d, 0.0, 0, 65536.0);
  double s = 0;
  for (std::size_t i = 0; i < g.u.size(); ++i)
    s += g.w[i] * g.u[i] * std::pow(g.tab[i][0], d);
  // tail: int_T^inf u (2 pi u / d)^{-d/2} sum_k c_k (d/u)^k du
  double c[kAsymOrder];
  point_asym_coeffs(Point::zero(d), c);
  const double V = g.t_end / d;
  const double pref = d * d * std::pow(2.0 * M_PI, -0.5 * d);
  double vpow = std::pow(V, 2.0 - 0.5 * d);
  for (int k = 0; k < kAsymOrder; ++k) {
    s += pref * c[k] * vpow / (0.5 * d + k - 2.0);
    vpow /= V;
  }
  return s;
}

double epstein_zeta(int d, double s) {
  if (!(s > d)) throw std::domain_error("epstein_zeta: need s > d");
  const double hs = 0.5 * s, hc = 0.5 * (d - s);
  double acc = 2.0 / (s - d) - 2.0 / s;
  lattice::for_each_canonical_box(d, 7, [&](const Point& p) {
    const double n2 = static_cast<double>(l2_sq(p));
    if (n2 == 0 || n2 > 49.5) return;
    const double z = M_PI * n2;
    const double t1 = quad::upper_gamma(hs, z) * std::pow(z, -hs);
    const double t2 = quad::upper_gamma(hc, z) * std::pow(z, -hc);
    acc += lattice::orbit_size(p) * (t1 + t2);
  });
  return acc * std::pow(M_PI, hs) / std::tgamma(hs);
}

LatticeSum green_square_lattice_sum(int d) {
  if (d < 5)
    throw std::domain_error("sum of g_0^2 diverges for d <= 4");
  const int r_quad = d == 5 ? 48 : 36;
  const int r_far = d == 5 ? 130 : 90;
  LatticeSum out;
  out.r_quad = r_quad;
  out.r_far = r_far;

  const KernelGrid grid = make_kernel_grid(d, 0.0, r_quad);
  const std::size_t nn = grid.u.size();

  // exact zone: canonical enumeration with per-axis partial node products
  double sum = 0;
  {
    std::vector<std::vector<double>> partial(d + 1,
                                             std::vector<double>(nn, 0.0));
    partial[0] = grid.w;
    Point p = Point::zero(d);
    const long long r2 = 1ll * r_quad * r_quad;
    std::function<void(int, int, long long)> rec = [&](int axis, int hi,
                                                       long long used) {
      if (axis == d) {
        double v = 0;
        const double* last = partial[d].data();
        for (std::size_t i = 0; i < nn; ++i) v += last[i];
        v += grid.tail(p);
        sum += lattice::orbit_size(p) * v * v;
        return;
      }
      for (int c = std::min(hi, static_cast<int>(std::floor(
                                    std::sqrt(static_cast<double>(r2 - used)))));
           c >= 0; --c) {
        p.c[axis] = c;
        const std::vector<double>& prev = partial[axis];
        std::vector<double>& next = partial[axis + 1];
        for (std::size_t i = 0; i < nn; ++i) next[i] = prev[i] * grid.tab[i][c];
        rec(axis + 1, c, used + 1ll * c * c);
      }
    };
    rec(0, r_quad, 0);
  }

  // far zone + zeta partial sum
  const double s_exp = 2.0 * d - 4.0;
  double zeta_partial = 0;
  double far_sum = 0;
  const long long rq2 = 1ll * r_quad * r_quad;
  lattice::for_each_canonical_l2(d, r_far, [&](const Point& p) {
    const long long n2 = l2_sq(p);
    if (n2 == 0) return;
    const double orbit = lattice::orbit_size(p);
    zeta_partial += orbit * std::pow(static_cast<double>(n2), -0.5 * s_exp);
    if (n2 > rq2) {
      const double gf = green_far(p, d);
      far_sum += orbit * gf * gf;
    }
  });

  const double hd = 0.5 * d;
  const double c_d = hd * std::tgamma(hd - 1.0) * std::pow(M_PI, -hd);
  out.zeta_tail = c_d * c_d * (epstein_zeta(d, s_exp) - zeta_partial);
  out.value = sum + far_sum + out.zeta_tail;
  return out;
}

double clt_constant(int d, double lambda) {
  if (d < 5)
    throw std::domain_error("clt constant: double integral diverges for d <= 4");
  const double h = h_constant(d, lambda);
  if (h <= 0) throw std::domain_error("clt constant: subcritical parameters");
  return 2.0 * escape_probability(d) * s_weighted_return_integral(d) / h;
}

double clt_constant_lattice(int d, double lambda) {
  if (d < 5)
    throw std::domain_error("clt constant: double integral diverges for d <= 4");
  const double h = h_constant(d, lambda);
  if (h <= 0) throw std::domain_error("clt constant: subcritical parameters");
  return 2.0 * escape_probability(d) * green_square_lattice_sum(d).value / h;
}

// ---- tables ---------------------------------------------------------------

RWTables build_tables(int d, double lambda, double theta, int radius,
                      double tol) {
  if (d < 3) throw std::domain_error("tables need d >= 3");
  if (radius < 0) throw std::domain_error("tables: radius must be >= 0");
  RWTables t;
  t.d = d;
  t.lambda = lambda;
  t.theta = theta;
  t.radius = radius;
  t.tol = tol;
  t.gamma_d = escape_probability(d);
  t.h = h_constant(d, lambda);
  t.lambda_crit = lambda_critical(d);
  t.supercritical = t.h > 0;
  t.c1 = (d >= 5 && t.h > 0) ? clt_constant(d, lambda)
                             : std::numeric_limits<double>::quiet_NaN();

  const KernelGrid g0 = make_kernel_grid(d, 0.0, radius);
  t.t_end = g0.t_end;
  std::unordered_map<Point, std::pair<double, double>, lattice::PointHash> vals;
  const double green_o = g0.value(Point::zero(d));
  if (theta > 0) {
    const KernelGrid gt = make_kernel_grid(d, theta, radius);
    lattice::for_each_canonical_l1(d, radius, [&](const Point& p) {
      vals.emplace(p, std::make_pair(g0.value(p), gt.value(p)));
    });
  } else {
    lattice::for_each_canonical_l1(d, radius, [&](const Point& p) {
      const double v = g0.value(p);
      vals.emplace(p, std::make_pair(v, v));
    });
  }
  t.points = lattice::l1_ball(d, radius);
  t.green.reserve(t.points.size());
  t.phi.reserve(t.points.size());
  t.g_theta.reserve(t.points.size());
  for (const Point& p : t.points) {
    const auto& v = vals.at(lattice::canonical(p));
    t.green.push_back(v.first);
    t.phi.push_back(std::clamp(v.first / green_o, 0.0, 1.0));
    t.g_theta.push_back(v.second);
  }
  return t;
}

}  // namespace nbcpp::walk
