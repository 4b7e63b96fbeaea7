#include "nbcpp/torus_tables.hpp"

#include <cmath>
#include <stdexcept>
#include <unordered_map>

#include "nbcpp/walk.hpp"

namespace nbcpp::sim {

TorusTables build_torus_tables(const ModelParams& par, double theta) {
  if (!(theta > 0))
    throw std::domain_error("torus tables: theta must be > 0 (finite torus)");
  TorusTables t;
  t.geom = lattice::Torus(par.d, par.L);
  t.theta = theta;
  t.lambda = par.lambda;

  double t_end = 64.0;
  while (t_end < 45.0 / theta) t_end *= 2.0;
  const double v_max = t_end / par.d;
  const int n_max =
      static_cast<int>(std::ceil(9.5 * std::sqrt(v_max))) + par.L + 10;
  const walk::KernelGrid grid =
      walk::make_kernel_grid(par.d, theta, n_max, t_end);
  const std::size_t nn = grid.u.size();

  // periodized 1-d kernel per node: ptab[i][a] = sum_m tab[i][|a + L m|]
  std::vector<std::vector<double>> ptab(nn, std::vector<double>(par.L, 0.0));
  for (std::size_t i = 0; i < nn; ++i) {
    for (int a = 0; a < par.L; ++a) {
      double s = 0;
      for (int n = a; n <= n_max; n += par.L) s += grid.tab[i][n];
      for (int n = par.L - a; n <= n_max; n += par.L) s += grid.tab[i][n];
      ptab[i][a] = s;
    }
  }

  // evaluate on canonical distance classes, then scatter
  std::unordered_map<lattice::Point, double, lattice::PointHash> cls;
  lattice::for_each_canonical_box(par.d, par.L / 2, [&](const lattice::Point& p) {
    double v = 0;
    for (std::size_t i = 0; i < nn; ++i) {
      double prod = grid.w[i];
      for (int j = 0; j < par.d; ++j) prod *= ptab[i][p.c[j]];
      v += prod;
    }
    cls.emplace(p, v);
  });

  t.g.resize(t.geom.n_sites);
  for (std::int64_t s = 0; s < t.geom.n_sites; ++s) {
    lattice::Point p = t.geom.coords(s);
    for (int j = 0; j < par.d; ++j) p.c[j] = std::min(p.c[j], par.L - p.c[j]);
    t.g[s] = cls.at(lattice::canonical(p));
  }

  t.g_sum = 0;
  t.g_sq_sum = 0;
  for (double v : t.g) {
    t.g_sum += v;
    t.g_sq_sum += v * v;
  }

  t.v_qv.resize(t.geom.n_sites);
  const double inv = 1.0 / (2.0 * par.lambda * par.d);
  for (std::int64_t s = 0; s < t.geom.n_sites; ++s) {
    double nbr = 0;
    for (int axis = 0; axis < par.d; ++axis) {
      const double gp = t.g[t.geom.neighbor(s, axis, +1)];
      const double gm = t.g[t.geom.neighbor(s, axis, -1)];
      nbr += gp * gp + gm * gm;
    }
    t.v_qv[s] = (t.g[s] * t.g[s] + par.lambda * nbr) * inv;
  }
  return t;
}

}  // namespace nbcpp::sim
