#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "nbcpp/lattice.hpp"
#include "nbcpp/params.hpp"
#include "nbcpp/simulator.hpp"

// Monte Carlo moment estimation: run independent replicas, snapshot the
// field at scheduled times on a fixed site list, and form product-moment
// estimates with jackknife standard errors.

namespace nbcpp::sim {

struct SnapshotEnsemble {
  std::vector<double> times;
  std::vector<lattice::Point> sites;
  std::int64_t replicas = 0;
  std::vector<double> values;  // [rep][time][site] flattened
  // whole-lattice translation-pooled powers per (rep, time); empty unless
  // requested (the truth is translation invariant, so pooling only sharpens
  // the estimator; errors still come from replica-to-replica variation)
  std::vector<double> pooled_m1, pooled_m2, pooled_m4;

  double at(std::int64_t rep, int ti, int si) const {
    return values[(rep * static_cast<std::int64_t>(times.size()) + ti) *
                      static_cast<std::int64_t>(sites.size()) +
                  si];
  }
  double pooled(const std::vector<double>& which, std::int64_t rep,
                int ti) const {
    return which[rep * static_cast<std::int64_t>(times.size()) + ti];
  }
};

SnapshotEnsemble run_snapshot_ensemble(const ModelParams& par,
                                       const InitialCondition& ic,
                                       std::span<const double> times,
                                       std::span<const lattice::Point> sites,
                                       std::int64_t replicas,
                                       std::uint64_t seed, int threads = 0,
                                       bool pool_powers = false);


struct MomentEstimate {
  double value = 0;
  double std_err = 0;
};

// ensemble statistics of a pooled column
MomentEstimate pooled_mean(const SnapshotEnsemble& e,
                           const std::vector<double>& which, int ti);

// E[prod_i eta_t(x_{site_idx[i]})] at time index ti; site indices may repeat
// (powers). Jackknife standard error over replicas.
MomentEstimate product_moment(const SnapshotEnsemble& e, int ti,
                              std::span<const int> site_idx);

// Cov(eta(x), eta(y)) pooled over a class of site pairs (each pair given as
// indices into e.sites); pairs in one class must share the true covariance.
MomentEstimate pooled_covariance(const SnapshotEnsemble& e, int ti,
                                 std::span<const std::pair<int, int>> pairs);

}  // namespace nbcpp::sim
