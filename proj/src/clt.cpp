#include "nbcpp/clt.hpp"

#include <cmath>
#include <memory>
#include <stdexcept>

#include "nbcpp/replica_pool.hpp"

namespace nbcpp::clt {

double resolvent_functional(const sim::TorusTables& tables,
                            std::span<const double> eta) {
  if (static_cast<std::int64_t>(eta.size()) != tables.geom.n_sites)
    throw std::invalid_argument("resolvent functional: field size mismatch");
  double s = 0;
  for (std::size_t i = 0; i < eta.size(); ++i)
    s += tables.g[i] * (eta[i] - 1.0);
  return s;
}

std::vector<ReplicaRecord> run_ensemble(const EnsembleConfig& cfg,
                                        const sim::TorusTables& tables) {
  if (cfg.times.empty()) throw std::invalid_argument("ensemble: empty grid");
  if (!(cfg.scaling_n > 0)) throw std::invalid_argument("ensemble: N > 0");
  for (std::size_t i = 1; i < cfg.times.size(); ++i)
    if (cfg.times[i] <= cfg.times[i - 1])
      throw std::invalid_argument("ensemble: grid must ascend");

  const double n_scale = cfg.scaling_n;
  const double theta = 1.0 / n_scale;
  if (std::abs(tables.theta - theta) > 1e-12 * theta)
    throw std::invalid_argument("ensemble: tables built for another theta");
  const double sqn = std::sqrt(n_scale);
  std::vector<double> obs(cfg.times.size());
  for (std::size_t i = 0; i < cfg.times.size(); ++i)
    obs[i] = cfg.times[i] * n_scale;
  const double horizon = obs.back();

  const int threads = pool::resolve_threads(cfg.threads);
  std::vector<ReplicaRecord> out(static_cast<std::size_t>(cfg.replicas));
  std::vector<std::unique_ptr<sim::Simulator>> engines(
      static_cast<std::size_t>(threads));

  pool::run_indexed(cfg.replicas, threads, [&](std::int64_t rep, int worker) {
    auto& eng = engines[worker];
    if (!eng) eng = std::make_unique<sim::Simulator>(cfg.par, &tables);
    sim::Simulator& s = *eng;
    s.init(sim::InitialCondition::equilibrium(cfg.burn_in), cfg.seed,
           static_cast<std::uint64_t>(rep));
    ReplicaRecord rec;
    rec.eta0 = s.eta_origin();
    rec.eta0_sq = rec.eta0 * rec.eta0;
    const std::size_t m = obs.size();
    rec.x.resize(m);
    rec.m.resize(m);
    rec.r.resize(m);
    rec.qv.resize(m);
    s.run(horizon, obs, [&](int i) {
      const double occ = s.occupation_integral();
      const double dg = s.g_functional() - s.g_functional_start();
      const double gi = s.g_time_integral();
      rec.x[i] = occ / sqn;
      rec.m[i] = (dg - theta * gi + occ) / sqn;
      rec.r[i] = (-dg + theta * gi) / sqn;
      rec.qv[i] = s.qv_integral() / n_scale;
    });
    rec.max_jump_sq = s.max_jump_sq() / n_scale;
    out[static_cast<std::size_t>(rep)] = std::move(rec);
  });
  return out;
}

namespace {
template <class F>
std::vector<double> extract(const std::vector<ReplicaRecord>& rs, F&& f) {
  std::vector<double> v;
  v.reserve(rs.size());
  for (const auto& r : rs) v.push_back(f(r));
  return v;
}
}  // namespace

std::vector<double> column_x(const std::vector<ReplicaRecord>& rs, int ti) {
  return extract(rs, [&](const ReplicaRecord& r) { return r.x[ti]; });
}
std::vector<double> column_m(const std::vector<ReplicaRecord>& rs, int ti) {
  return extract(rs, [&](const ReplicaRecord& r) { return r.m[ti]; });
}
std::vector<double> column_r(const std::vector<ReplicaRecord>& rs, int ti) {
  return extract(rs, [&](const ReplicaRecord& r) { return r.r[ti]; });
}
std::vector<double> column_qv(const std::vector<ReplicaRecord>& rs, int ti) {
  return extract(rs, [&](const ReplicaRecord& r) { return r.qv[ti]; });
}
std::vector<double> column_max_jump(const std::vector<ReplicaRecord>& rs) {
  return extract(rs, [&](const ReplicaRecord& r) { return r.max_jump_sq; });
}

stats::VarianceRatio variance_test(std::span<const double> xs, double t,
                                   double c1, std::uint64_t seed,
                                   int resamples) {
  if (xs.size() < 500) throw std::invalid_argument("variance test: >= 500");
  if (t == 0.0) {
    stats::VarianceRatio out;
    out.degenerate = true;
    return out;
  }
  return stats::variance_ratio(xs, c1 * t, resamples, seed);
}

stats::KsResult normality_test(std::span<const double> xs, double t,
                               double c1) {
  if (xs.size() < 500) throw std::invalid_argument("normality test: >= 500");
  const double s = std::sqrt(c1 * t);
  std::vector<double> z(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) z[i] = xs[i] / s;
  return stats::ks_normal_test(z);
}

stats::FddResult fdd_test(const std::vector<std::vector<double>>& x_cols,
                          std::span<const double> times, double c1) {
  return stats::fdd_covariance(x_cols, times, c1);
}

double max_jump_diagnostic(const ReplicaRecord& rec) {
  return rec.max_jump_sq;
}

}  // namespace nbcpp::clt
