#include <doctest.h>

#include <cmath>

#include "nbcpp/clt.hpp"
#include "nbcpp/moments_mc.hpp"
#include "nbcpp/quadrature.hpp"
#include "nbcpp/rng.hpp"
#include "nbcpp/stats.hpp"

using namespace nbcpp;

TEST_CASE("resolvent functional on constructed fields") {
  ModelParams par{3, 1.0, 5};
  auto tables = sim::build_torus_tables(par, 0.2);
  const std::int64_t n = par.sites();
  // flat field gives zero
  std::vector<double> ones(n, 1.0);
  CHECK(clt::resolvent_functional(tables, ones) ==
        doctest::Approx(0.0).epsilon(1e-12));
  // single perturbed site scales by g(x)
  std::vector<double> f = ones;
  f[0] += 0.75;
  CHECK(clt::resolvent_functional(tables, f) ==
        doctest::Approx(0.75 * tables.g[0]).epsilon(1e-12));
  // engine's incremental value matches the naive sum on a random sparse field
  rng::Stream rs(5, 6);
  std::vector<double> sparse(n, 1.0);
  for (int k = 0; k < 20; ++k)
    sparse[rs.bounded(static_cast<std::uint64_t>(n))] = 3.0 * rs.u01();
  sim::Simulator s(par, &tables);
  s.init(sim::InitialCondition::all_ones(), 1, 1);
  s.set_field(sparse);
  CHECK(s.g_functional() ==
        doctest::Approx(clt::resolvent_functional(tables, sparse))
            .epsilon(1e-12));
}

TEST_CASE("occupation process trivia") {
  ModelParams par{2, 1.0, 5};
  auto tables = sim::build_torus_tables(par, 0.5);
  sim::Simulator s(par, &tables);
  s.init(sim::InitialCondition::all_ones(), 3, 3);
  // t = 0
  CHECK(s.occupation_integral() == 0.0);
  CHECK(s.qv_integral() == 0.0);
}

TEST_CASE("decomposition identity and martingale flatness between events") {
  ModelParams par{3, 0.8, 5};
  const double n_scale = 16.0;
  auto tables = sim::build_torus_tables(par, 1.0 / n_scale);
  clt::EnsembleConfig cfg;
  cfg.par = par;
  cfg.scaling_n = n_scale;
  cfg.times = {0.25, 0.5};
  cfg.replicas = 48;
  cfg.seed = 11;
  cfg.burn_in = 3.0;
  cfg.threads = 1;
  auto recs = clt::run_ensemble(cfg, tables);
  for (const auto& r : recs) {
    for (std::size_t i = 0; i < cfg.times.size(); ++i) {
      CHECK(std::abs(r.x[i] - (r.m[i] + r.r[i])) <= 1e-8);
    }
    // QV path nondecreasing from zero
    CHECK(r.qv[0] >= 0.0);
    CHECK(r.qv[1] >= r.qv[0]);
    CHECK(r.max_jump_sq >= 0.0);
  }

  // closed-form between-event increment vs panel quadrature, one interval:
  // with no events, M(t) - M(s) = [G drift] - int (theta G - (eta_O - 1));
  // verify the engine's closed forms against numeric quadrature of the same
  // exponential flow started from a frozen field.
  sim::Simulator s(par, &tables);
  s.init(sim::InitialCondition::all_ones(), 7, 1);
  s.run(0.5);
  std::vector<double> eta(par.sites());
  for (std::int64_t i = 0; i < par.sites(); ++i) eta[i] = s.eta(i);
  s.set_field(eta);
  s.start_measurement();
  const double g0 = s.g_functional();
  const double c = par.drift();
  const double len = 0.037;  // comfortably below the mean event gap? no:
  // events fire at rate ~ total_rate; instead reconstruct analytically:
  // the engine cannot be forced event-free, so integrate the flow directly.
  const double a0 = g0 + tables.g_sum;  // sum g eta at start
  auto g_at = [&](double u) { return a0 * std::exp(c * u) - tables.g_sum; };
  const double gi_quad = quad::integrate(g_at, 0, len, 1e-14);
  const double occ_quad = quad::integrate(
      [&](double u) { return eta[0] * std::exp(c * u) - 1.0; }, 0, len, 1e-14);
  // closed forms used by the engine
  const double e1 = std::expm1(c * len) / c;
  CHECK(a0 * e1 - tables.g_sum * len == doctest::Approx(gi_quad).epsilon(1e-10));
  CHECK(eta[0] * e1 - len == doctest::Approx(occ_quad).epsilon(1e-10));
  // zero-field: M identically constant (flat compensator)
  sim::Simulator z(par, &tables);
  z.init(sim::InitialCondition::all_ones(), 7, 2);
  z.set_field(std::vector<double>(par.sites(), 0.0));
  z.start_measurement();
  z.run(2.0);
  const double m_end = (z.g_functional() - z.g_functional_start()) -
                       tables.theta * z.g_time_integral() +
                       z.occupation_integral();
  CHECK(std::abs(m_end) < 1e-9);
}

TEST_CASE("martingale has mean zero and R shrinks with N") {
  // needs d >= 5: the resolvent square sum diverges in low dimension, so
  // the remainder only vanishes in the transient regime
  ModelParams par{5, 2.0, 7};
  std::vector<double> r2;
  for (double n_scale : {9.0, 49.0}) {
    auto tables = sim::build_torus_tables(par, 1.0 / n_scale);
    clt::EnsembleConfig cfg;
    cfg.par = par;
    cfg.scaling_n = n_scale;
    cfg.times = {1.0};
    cfg.replicas = 400;
    cfg.seed = 21;
    cfg.burn_in = 5.0;
    cfg.threads = 1;
    auto recs = clt::run_ensemble(cfg, tables);
    auto ms = clt::column_m(recs, 0);
    const double mm = stats::mean(ms);
    const double se = stats::std_error_of_mean(ms);
    CHECK(std::abs(mm) <= 4.0 * se);
    auto rs = clt::column_r(recs, 0);
    double s2 = 0;
    for (double v : rs) s2 += v * v;
    r2.push_back(s2 / static_cast<double>(rs.size()));
  }
  CHECK(r2[1] < r2[0]);
}

TEST_CASE("variance test behaviors") {
  rng::Stream rs(9, 9);
  std::vector<double> xs(800);
  for (auto& v : xs) v = stats::normal_quantile(rs.u01_pos() * 0.999999 + 5e-7);
  auto vr = clt::variance_test(xs, 1.0, 1.0, 42);
  CHECK_FALSE(vr.degenerate);
  CHECK(vr.ci_lo < vr.ratio);
  CHECK(vr.ratio < vr.ci_hi);
  CHECK(std::abs(vr.ratio - 1.0) < 0.2);
  // rescaling samples by kappa scales the ratio by kappa^2 exactly
  std::vector<double> ys(xs);
  for (auto& v : ys) v *= 2.0;
  auto vr2 = clt::variance_test(ys, 1.0, 1.0, 42);
  CHECK(vr2.ratio == doctest::Approx(4.0 * vr.ratio).epsilon(1e-12));
  // degenerate at t = 0
  CHECK(clt::variance_test(xs, 0.0, 1.0, 42).degenerate);
}

TEST_CASE("normality test calibration") {
  // exact normal pseudo-samples across several seeds: p should be healthy
  int healthy = 0;
  for (std::uint64_t seed : {1u, 2u, 3u, 4u, 5u}) {
    rng::Stream rs(seed, 1);
    std::vector<double> zs(2000);
    for (auto& v : zs) v = stats::normal_quantile(rs.u01_pos());
    auto ks = stats::ks_normal_test(zs);
    if (ks.p_value > 0.05) ++healthy;
    CHECK(ks.p_value > 0.001);
  }
  CHECK(healthy >= 4);
  // constant samples are rejected outright
  std::vector<double> flat(1000, 0.3);
  CHECK(stats::ks_normal_test(flat).p_value < 1e-6);
}

TEST_CASE("fdd covariance reductions") {
  rng::Stream rs(4, 4);
  const int n = 1500;
  std::vector<double> b1(n), b2(n);
  for (int i = 0; i < n; ++i) {
    const double g1 = stats::normal_quantile(rs.u01_pos());
    const double g2 = stats::normal_quantile(rs.u01_pos());
    b1[i] = g1 * std::sqrt(0.5);
    b2[i] = b1[i] + g2 * std::sqrt(0.5);  // brownian at t=0.5, 1.0
  }
  std::vector<double> times{0.5, 1.0};
  auto f = clt::fdd_test({b1, b2}, times, 1.0);
  CHECK(f.max_rel_dev < 0.15);
  // duplicated column: exact rank-1 covariance
  auto f2 = clt::fdd_test({b1, b1}, {std::vector<double>{0.5, 0.5}.data(), 2},
                          1.0);
  const double det = f2.covariance[0] * f2.covariance[3] -
                     f2.covariance[1] * f2.covariance[2];
  CHECK(std::abs(det) <= 1e-12 * f2.covariance[0] * f2.covariance[3]);
  // m = 1 reduces to the variance ratio
  auto f1 = clt::fdd_test({b1}, {times.data(), 1}, 1.0);
  CHECK(f1.covariance[0] == doctest::Approx(stats::variance(b1)));
}

TEST_CASE("max jump diagnostic facts") {
  ModelParams par{2, 1.0, 5};
  auto tables = sim::build_torus_tables(par, 0.25);
  sim::Simulator s(par, &tables);
  s.init(sim::InitialCondition::all_ones(), 13, 5);
  s.set_field(std::vector<double>(par.sites(), 0.0));
  s.start_measurement();
  s.run(1.0);
  CHECK(s.max_jump_sq() == 0.0);  // zero field never jumps G
}

TEST_CASE("snapshot ensemble moments") {
  ModelParams par{2, 1.0, 5};
  std::vector<double> times{0.5, 1.0};
  std::vector<lattice::Point> sites{lattice::Point::zero(2),
                                    lattice::Point::unit(2, 0)};
  auto e = sim::run_snapshot_ensemble(par, sim::InitialCondition::all_ones(),
                                      times, sites, 1500, 77, 1);
  // order-1 moment is 1 within 4 SE at both checkpoints
  for (int ti = 0; ti < 2; ++ti) {
    const int idx[] = {0};
    auto m = sim::product_moment(e, ti, idx);
    CHECK(std::abs(m.value - 1.0) <= 4.0 * m.std_err);
  }
  // second moment exceeds 1 (strictly positive correlations appear)
  const int idx2[] = {0, 0};
  auto m2 = sim::product_moment(e, 1, idx2);
  CHECK(m2.value > 1.0);
  // pooled covariance machinery runs and gives a finite SE
  std::vector<std::pair<int, int>> pairs{{0, 1}};
  auto cov = sim::pooled_covariance(e, 1, pairs);
  CHECK(cov.std_err > 0.0);
}
