#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "nbcpp/lattice.hpp"
#include "nbcpp/params.hpp"
#include "nbcpp/rng.hpp"
#include "nbcpp/torus_tables.hpp"

// Event-driven simulation of the normalized process on a torus.
//
// State: per-site weights w plus a global exponential drift factor; the
// physical field is eta(x) = w(x) * e^{c (t - t_ref)}. Between jumps every
// site drifts by the same factor, so the flow never touches the weight
// array and resets write exact zeros. Occupation / resolvent-functional /
// quadratic-variation integrals accumulate in closed form per inter-event
// interval.
//
// Each event consumes exactly four 64-bit draws (waiting time, kind, site,
// direction) = two counter blocks, so trajectories are reproducible from
// (seed, replica, call schedule) alone. The hot loop precomputes draws in
// batches; waiting times and drift factors are evaluated in flat passes,
// which pipelines the RNG rounds and the libm calls.

namespace nbcpp::sim {

enum class EventKind : std::uint8_t { kReset = 0, kInfect = 1 };

struct Event {
  double time;
  EventKind kind;
  std::int64_t site;
  std::int64_t source;  // infecting neighbor, -1 for resets
};

struct InitialCondition {
  enum class Kind { kAllOnes, kEquilibrium } kind = Kind::kAllOnes;
  double burn_in = 0;

  static InitialCondition all_ones() { return {}; }
  static InitialCondition equilibrium(double burn) {
    return {Kind::kEquilibrium, burn};
  }
};

class Simulator {
 public:
  explicit Simulator(const ModelParams& par,
                     const TorusTables* tables = nullptr);

  // Build the initial field and reset the measurement clock to 0. An
  // equilibrium start runs the engine for burn_in time units first.
  void init(const InitialCondition& ic, std::uint64_t seed,
            std::uint64_t replica);

  void step_event();  // advance past exactly one jump

  // Replace the physical field (testing and functional evaluation); resets
  // the drift reference so weights are physical values.
  void set_field(const std::vector<double>& eta);

  // Run to t_end, firing cb(i) exactly at obs_times[i] (ascending). The
  // callback sees the analytically advanced state at that instant.
  void run(double t_end, std::span<const double> obs_times,
           const std::function<void(int)>& cb);
  void run(double t_end) { run(t_end, {}, nullptr); }

  double time() const { return t_; }
  double scale() const;  // e^{c (t - t_ref)}
  double eta(std::int64_t site) const { return w_[site] * scale(); }
  double eta_origin() const { return w_[origin_] * scale(); }
  std::vector<std::uint8_t> support() const;

  // Functional accumulators (need tables): values since start_measurement().
  void start_measurement();
  double occupation_integral() const { return occ_; }  // int (eta_u(O)-1) du
  double g_functional() const;                         // G_theta(eta_t)
  double g_functional_start() const { return g_start_; }
  double g_time_integral() const { return gint_; }     // int G_theta(eta_u) du
  double qv_integral() const { return qv_; }           // <M^theta>_t
  double max_jump_sq() const { return max_jump_sq_; }  // sup (dG)^2

  const ModelParams& params() const { return par_; }
  const lattice::Torus& geom() const { return geom_; }
  const TorusTables* tables() const { return tables_; }
  std::int64_t origin() const { return origin_; }

  // Event capture for coupling tests; forces the per-event path.
  void set_event_log(std::vector<Event>* log) { log_ = log; }

  // closed-form int over a jump-free interval of (eta_u(site) - 1),
  // starting from physical value eta_a with drift coefficient c
  static double interval_occupation(double eta_a, double c, double len);

 private:
  struct FastDiv {  // exact n/m for n < 2^27 via one 128-bit multiply
    std::uint64_t magic = 0;
    void set(std::uint64_t m) { magic = ((1ull << 48) + m - 1) / m; }
    std::uint64_t div(std::uint64_t n) const {
      return static_cast<std::uint64_t>(
          (static_cast<unsigned __int128>(n) * magic) >> 48);
    }
  };

  static constexpr int kBatch = 1024;
  struct Batch {
    alignas(64) double dt[kBatch];
    alignas(64) double ecd[kBatch];  // exp(c dt), filled in functional mode
    alignas(64) double ukind[kBatch];
    alignas(64) std::uint32_t site[kBatch];
    alignas(64) std::uint32_t src[kBatch];
    int pos = kBatch;
  };

  template <bool kFunc>
  void run_core(double t_end, std::span<const double> obs,
                const std::function<void(int)>& cb);
  template <bool kFunc>
  void run_logged(double t_end, std::span<const double> obs,
                  const std::function<void(int)>& cb);
  template <bool kFunc>
  void refill();
  template <bool kFunc>
  inline void advance(double to);
  template <bool kFunc>
  inline void apply_slot(int k);
  void renormalize();
  void refresh_functionals();
  std::uint32_t neighbor_of(std::uint32_t site, std::uint32_t dir) const;

  ModelParams par_;
  lattice::Torus geom_;
  const TorusTables* tables_;
  std::int64_t origin_ = 0;
  double c_ = 0;
  double inv_c_ = 0;
  double inv_rate_ = 0;
  double p_reset_ = 0;
  std::uint32_t n_sites32_ = 0;
  FastDiv div_stride_[lattice::kMaxDim];
  FastDiv div_L_;

  std::vector<double> w_;
  std::vector<double> gv_;  // interleaved (g, V) when tables attached
  double t_ = 0;
  double t_ref_ = 0;  // drift reference: physical = w e^{c (t - t_ref)}
  double p_ = 1;      // e^{c (t - t_ref)}, maintained multiplicatively
  rng::Stream rng_;
  Batch batch_;

  double a_ = 0;  // sum_x g(x) w(x)
  double q_ = 0;  // sum_x V(x) w(x)^2
  double occ_ = 0, gint_ = 0, qv_ = 0;
  double g_start_ = 0;
  double max_jump_sq_ = 0;

  std::vector<Event>* log_ = nullptr;
};

// Direct indicator-process update rule driven by a replayed event stream;
// used to check that support projection commutes with the dynamics.
struct ContactOracle {
  lattice::Torus geom;
  std::vector<std::uint8_t> b;

  ContactOracle(const lattice::Torus& g, bool ones)
      : geom(g),
        b(static_cast<std::size_t>(g.n_sites),
          ones ? std::uint8_t{1} : std::uint8_t{0}) {}
  void apply(const Event& e) {
    if (e.kind == EventKind::kReset)
      b[e.site] = 0;
    else
      b[e.site] = b[e.site] | b[e.source];
  }
};

}  // namespace nbcpp::sim
