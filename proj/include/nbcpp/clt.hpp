#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "nbcpp/params.hpp"
#include "nbcpp/simulator.hpp"
#include "nbcpp/stats.hpp"
#include "nbcpp/torus_tables.hpp"

// Occupation-time scaling analysis. For scaling parameter N the occupation
// process is X_t^N = N^{-1/2} int_0^{tN} (eta_u(O) - 1) du; with theta = 1/N
// it decomposes into a Dynkin martingale plus a remainder,
//   X_t^N = (M_{tN} + R_{tN}) / sqrt(N),
//   M_t = G(eta_t) - G(eta_0) - int_0^t [theta G(eta_s) - (eta_s(O)-1)] ds,
//   R_t = -G(eta_t) + G(eta_0) + theta int_0^t G(eta_s) ds,
// where G(eta) = sum_x g_theta(x) (eta(x) - 1). The engine accumulates every
// ingredient in closed form between events.

namespace nbcpp::clt {

// direct reference sum, used to cross-check the engine's running value
double resolvent_functional(const sim::TorusTables& tables,
                            std::span<const double> eta);

struct ReplicaRecord {
  std::vector<double> x;           // X_{t_i}^N
  std::vector<double> m;           // M_{t_i N} / sqrt(N)
  std::vector<double> r;           // R_{t_i N} / sqrt(N)
  std::vector<double> qv;          // <M>_{t_i N} / N
  double max_jump_sq = 0;          // sup (dM)^2 / N over the run
  double eta0 = 0, eta0_sq = 0;    // field at the origin at measurement start
};

struct EnsembleConfig {
  ModelParams par;
  double scaling_n = 400;          // N
  std::vector<double> times;       // t grid (ascending)
  int replicas = 2000;
  std::uint64_t seed = 1;
  double burn_in = 25;             // equilibrium preparation
  int threads = 0;                 // 0: resolve from env/hardware
};

// independent replicas, equilibrium start, decomposition at the grid times
std::vector<ReplicaRecord> run_ensemble(const EnsembleConfig& cfg,
                                        const sim::TorusTables& tables);

// column extraction helpers
std::vector<double> column_x(const std::vector<ReplicaRecord>&, int ti);
std::vector<double> column_m(const std::vector<ReplicaRecord>&, int ti);
std::vector<double> column_r(const std::vector<ReplicaRecord>&, int ti);
std::vector<double> column_qv(const std::vector<ReplicaRecord>&, int ti);
std::vector<double> column_max_jump(const std::vector<ReplicaRecord>&);

// Var(X_t^N) / (c1 t); degenerate marker at t = 0 (>= 500 samples)
stats::VarianceRatio variance_test(std::span<const double> xs, double t,
                                   double c1, std::uint64_t seed,
                                   int resamples = 1000);

// KS of X_t^N / sqrt(c1 t) against the standard normal (>= 500 samples)
stats::KsResult normality_test(std::span<const double> xs, double t,
                               double c1);

stats::FddResult fdd_test(const std::vector<std::vector<double>>& x_cols,
                          std::span<const double> times, double c1);

double max_jump_diagnostic(const ReplicaRecord& rec);

}  // namespace nbcpp::clt
