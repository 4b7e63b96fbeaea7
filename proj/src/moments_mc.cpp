#include "nbcpp/moments_mc.hpp"

#include <cmath>
#include <memory>
#include <stdexcept>

#include "nbcpp/replica_pool.hpp"
#include "nbcpp/stats.hpp"

namespace nbcpp::sim {

SnapshotEnsemble run_snapshot_ensemble(const ModelParams& par,
                                       const InitialCondition& ic,
                                       std::span<const double> times,
                                       std::span<const lattice::Point> sites,
                                       std::int64_t replicas,
                                       std::uint64_t seed, int threads,
                                       bool pool_powers) {
  if (replicas < 2) throw std::invalid_argument("ensemble: replicas >= 2");
  if (times.empty() || sites.empty())
    throw std::invalid_argument("ensemble: empty schedule");
  SnapshotEnsemble e;
  e.times.assign(times.begin(), times.end());
  e.sites.assign(sites.begin(), sites.end());
  e.replicas = replicas;
  const int nt = static_cast<int>(times.size());
  const int ns = static_cast<int>(sites.size());
  e.values.assign(static_cast<std::int64_t>(replicas) * nt * ns, 0.0);
  if (pool_powers) {
    e.pooled_m1.assign(replicas * nt, 0.0);
    e.pooled_m2.assign(replicas * nt, 0.0);
    e.pooled_m4.assign(replicas * nt, 0.0);
  }

  lattice::Torus geom(par.d, par.L);
  std::vector<std::int64_t> site_index(ns);
  for (int i = 0; i < ns; ++i) site_index[i] = geom.index(sites[i]);

  const int nthreads = pool::resolve_threads(threads);
  std::vector<std::unique_ptr<Simulator>> engines(
      static_cast<std::size_t>(nthreads));
  pool::run_indexed(replicas, nthreads, [&](std::int64_t rep, int worker) {
    auto& eng = engines[worker];
    if (!eng) eng = std::make_unique<Simulator>(par, nullptr);
    Simulator& s = *eng;
    s.init(ic, seed, static_cast<std::uint64_t>(rep));
    s.run(e.times.back(), e.times, [&](int ti) {
      double* row = &e.values[(rep * nt + ti) * ns];
      for (int i = 0; i < ns; ++i) row[i] = s.eta(site_index[i]);
      if (pool_powers) {
        double m1 = 0, m2 = 0, m4 = 0;
        for (std::int64_t k = 0; k < geom.n_sites; ++k) {
          const double v = s.eta(k);
          m1 += v;
          m2 += v * v;
          m4 += v * v * v * v;
        }
        const double inv = 1.0 / static_cast<double>(geom.n_sites);
        e.pooled_m1[rep * nt + ti] = m1 * inv;
        e.pooled_m2[rep * nt + ti] = m2 * inv;
        e.pooled_m4[rep * nt + ti] = m4 * inv;
      }
    });
  });
  return e;
}

MomentEstimate pooled_mean(const SnapshotEnsemble& e,
                           const std::vector<double>& which, int ti) {
  const std::int64_t n = e.replicas;
  std::vector<double> col(static_cast<std::size_t>(n));
  for (std::int64_t r = 0; r < n; ++r) col[r] = e.pooled(which, r, ti);
  MomentEstimate m;
  m.value = stats::mean(col);
  m.std_err = stats::std_error_of_mean(col);
  return m;
}

MomentEstimate product_moment(const SnapshotEnsemble& e, int ti,
                              std::span<const int> site_idx) {
  const std::int64_t n = e.replicas;
  std::vector<double> prod(static_cast<std::size_t>(n));
  for (std::int64_t r = 0; r < n; ++r) {
    double p = 1;
    for (int si : site_idx) p *= e.at(r, ti, si);
    prod[r] = p;
  }
  MomentEstimate m;
  m.value = stats::mean(prod);
  m.std_err = stats::std_error_of_mean(prod);
  return m;
}

MomentEstimate pooled_covariance(const SnapshotEnsemble& e, int ti,
                                 std::span<const std::pair<int, int>> pairs) {
  const std::int64_t n = e.replicas;
  const double np = static_cast<double>(pairs.size());
  // per replica: class-averaged product and the two class-averaged factors
  std::vector<double> pxy(static_cast<std::size_t>(n)), px(pxy.size()),
      py(pxy.size());
  for (std::int64_t r = 0; r < n; ++r) {
    double sxy = 0, sx = 0, sy = 0;
    for (const auto& [a, b] : pairs) {
      const double va = e.at(r, ti, a), vb = e.at(r, ti, b);
      sxy += va * vb;
      sx += va;
      sy += vb;
    }
    pxy[r] = sxy / np;
    px[r] = sx / np;
    py[r] = sy / np;
  }
  double txy = 0, tx = 0, ty = 0;
  for (std::int64_t r = 0; r < n; ++r) {
    txy += pxy[r];
    tx += px[r];
    ty += py[r];
  }
  MomentEstimate m;
  m.value = txy / n - (tx / n) * (ty / n);
  m.std_err = stats::jackknife_se(n, [&](std::int64_t i) {
    const double d = static_cast<double>(n - 1);
    return (txy - pxy[i]) / d - ((tx - px[i]) / d) * ((ty - py[i]) / d);
  });
  return m;
}

}  // namespace nbcpp::sim
