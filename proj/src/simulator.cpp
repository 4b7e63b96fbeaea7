#include "nbcpp/simulator.hpp"

#include <cmath>

#include "nbcpp/fast_math.hpp"
#include <stdexcept>

namespace nbcpp::sim {

namespace {
constexpr double kRenormSpan = 100.0;  // |c (t - t_ref)| before folding
constexpr double kWeightOverflow = 1e250;
constexpr int kPrefetch = 32;
}  // namespace

Simulator::Simulator(const ModelParams& par, const TorusTables* tables)
    : par_(par), geom_(par.d, par.L), tables_(tables) {
  const auto bad = par.validate();
  if (!bad.empty()) throw std::invalid_argument("params: " + bad.front());
  if (geom_.n_sites > (1ll << 27))
    throw std::invalid_argument("torus too large (needs < 2^27 sites)");
  if (tables_ && tables_->geom.n_sites != geom_.n_sites)
    throw std::invalid_argument("tables built for a different torus");
  c_ = par_.drift();
  inv_c_ = c_ != 0.0 ? 1.0 / c_ : 0.0;
  inv_rate_ = 1.0 / par_.total_rate();
  p_reset_ = par_.reset_rate() / (1.0 + par_.reset_rate());
  n_sites32_ = static_cast<std::uint32_t>(geom_.n_sites);
  for (int i = 0; i < par_.d; ++i)
    div_stride_[i].set(static_cast<std::uint64_t>(geom_.stride[i]));
  div_L_.set(static_cast<std::uint64_t>(par_.L));
  w_.assign(static_cast<std::size_t>(geom_.n_sites), 0.0);
  if (tables_) {
    gv_.resize(2 * w_.size());
    for (std::size_t i = 0; i < w_.size(); ++i) {
      gv_[2 * i] = tables_->g[i];
      gv_[2 * i + 1] = tables_->v_qv[i];
    }
  }
}

double Simulator::scale() const { return std::exp(c_ * (t_ - t_ref_)); }

double Simulator::g_functional() const { return p_ * a_ - tables_->g_sum; }

double Simulator::interval_occupation(double eta_a, double c, double len) {
  if (c == 0.0) return (eta_a - 1.0) * len;
  return eta_a * std::expm1(c * len) / c - len;
}

std::uint32_t Simulator::neighbor_of(std::uint32_t site,
                                     std::uint32_t dir) const {
  const int axis = static_cast<int>(dir >> 1);
  const std::uint32_t stride = static_cast<std::uint32_t>(geom_.stride[axis]);
  const std::uint64_t q = div_stride_[axis].div(site);
  const std::uint32_t coord =
      static_cast<std::uint32_t>(q - div_L_.div(q) * par_.L);
  if (dir & 1)
    return coord == static_cast<std::uint32_t>(par_.L - 1)
               ? site - stride * (par_.L - 1)
               : site + stride;
  return coord == 0 ? site + stride * (par_.L - 1) : site - stride;
}

void Simulator::init(const InitialCondition& ic, std::uint64_t seed,
                     std::uint64_t replica) {
  rng_ = rng::Stream(seed, replica);
  batch_.pos = kBatch;  // discard any stale draws
  std::fill(w_.begin(), w_.end(), 1.0);
  t_ = 0;
  t_ref_ = 0;
  p_ = 1;
  if (ic.kind == InitialCondition::Kind::kEquilibrium && ic.burn_in > 0) {
    if (log_)
      run_logged<false>(ic.burn_in, {}, nullptr);
    else
      run_core<false>(ic.burn_in, {}, nullptr);
    t_ = 0;  // measurement clock
    t_ref_ -= ic.burn_in;
  }
  start_measurement();
}

void Simulator::set_field(const std::vector<double>& eta) {
  if (eta.size() != w_.size())
    throw std::invalid_argument("set_field: size mismatch");
  const double f = scale();
  for (std::size_t i = 0; i < w_.size(); ++i) {
    if (!(eta[i] >= 0)) throw std::invalid_argument("set_field: eta >= 0");
    w_[i] = eta[i];
  }
  (void)f;
  t_ref_ = t_;
  p_ = 1;
  refresh_functionals();
}

void Simulator::start_measurement() {
  renormalize();
  occ_ = gint_ = qv_ = 0;
  max_jump_sq_ = 0;
  g_start_ = tables_ ? g_functional() : 0.0;
}

void Simulator::renormalize() {
  const double f = scale();
  if (f != 1.0) {
    for (double& v : w_) v *= f;
  }
  t_ref_ = t_;
  p_ = 1;
  refresh_functionals();
}

void Simulator::refresh_functionals() {
  if (!tables_) return;
  double a = 0, q = 0;
  const std::size_t n = w_.size();
  for (std::size_t i = 0; i < n; ++i) {
    a += gv_[2 * i] * w_[i];
    q += gv_[2 * i + 1] * w_[i] * w_[i];
  }
  a_ = a;
  q_ = q;
}

template <bool kFunc>
void Simulator::refill() {
  // One counter (two words) per event: word 0 gives the waiting time; word 1
  // is sliced into site, direction and kind by chained fixed-point products
  // (each stage reuses the uniform low part of the previous multiply).
  alignas(64) std::uint64_t r[2 * kBatch];
  rng_.fill(r, kBatch);
  for (int k = 0; k < kBatch; ++k) {
    const double u = (static_cast<double>(r[2 * k] >> 11) + 1.0) * 0x1.0p-53;
    batch_.dt[k] = -fastmath::log_unit(u) * inv_rate_;
  }
  if constexpr (kFunc) {
    if (c_ != 0.0) {
      for (int k = 0; k < kBatch; ++k)
        batch_.ecd[k] = fastmath::exp_finite(c_ * batch_.dt[k]);
    }
  }
  const std::uint32_t two_d = static_cast<std::uint32_t>(2 * par_.d);
  for (int k = 0; k < kBatch; ++k) {
    const unsigned __int128 m1 =
        static_cast<unsigned __int128>(r[2 * k + 1]) * n_sites32_;
    const std::uint32_t site = static_cast<std::uint32_t>(m1 >> 64);
    const std::uint64_t lo1 = static_cast<std::uint64_t>(m1);
    const unsigned __int128 m2 = static_cast<unsigned __int128>(lo1) * two_d;
    const std::uint32_t dir = static_cast<std::uint32_t>(m2 >> 64);
    const std::uint64_t lo2 = static_cast<std::uint64_t>(m2);
    batch_.ukind[k] = static_cast<double>(lo2 >> 11) * 0x1.0p-53;
    batch_.site[k] = site;
    batch_.src[k] = neighbor_of(site, dir);
  }
  batch_.pos = 0;
}

// advance with explicit exp; used off the fast path (observations, t_end)
template <bool kFunc>
inline void Simulator::advance(double to) {
  const double dt = to - t_;
  if constexpr (kFunc) {
    if (c_ != 0.0) {
      const double pn = p_ * std::exp(c_ * dt);
      const double dp = (pn - p_) * inv_c_;
      occ_ += w_[origin_] * dp - dt;
      gint_ += a_ * dp - tables_->g_sum * dt;
      qv_ += q_ * dp * (pn + p_) * 0.5;
      p_ = pn;
    } else {
      occ_ += (w_[origin_] - 1.0) * dt;
      gint_ += (a_ - tables_->g_sum) * dt;
      qv_ += q_ * dt;
    }
  }
  t_ = to;
}

template <bool kFunc>
inline void Simulator::apply_slot(int k) {
  const std::uint32_t x = batch_.site[k];
  double dw;
  if (batch_.ukind[k] < p_reset_) {
    dw = -w_[x];
    w_[x] = 0.0;
    if constexpr (kFunc) q_ -= gv_[2 * x + 1] * dw * dw;
  } else {
    dw = w_[batch_.src[k]];
    const double wn = w_[x] + dw;
    if (wn > kWeightOverflow)
      throw std::runtime_error(
          "weight overflow: physical value out of range (subcritical misuse?)");
    if constexpr (kFunc) q_ += gv_[2 * x + 1] * dw * (wn + w_[x]);
    w_[x] = wn;
  }
  if constexpr (kFunc) {
    a_ += gv_[2 * x] * dw;
    const double jump = gv_[2 * x] * dw * p_;
    if (jump * jump > max_jump_sq_) max_jump_sq_ = jump * jump;
  }
}

template <bool kFunc>
void Simulator::run_core(double t_end, std::span<const double> obs,
                         const std::function<void(int)>& cb) {
  int next_obs = 0;
  const int n_obs = static_cast<int>(obs.size());
  while (next_obs < n_obs && obs[next_obs] <= t_) ++next_obs;
  double boundary = next_obs < n_obs ? std::min(obs[next_obs], t_end) : t_end;
  const bool use_ecd = kFunc && c_ != 0.0;

  double* __restrict w = w_.data();
  const double* __restrict gv = gv_.data();
  const double gsum = tables_ ? tables_->g_sum : 0.0;
  const double preset = p_reset_;
  const double invc = inv_c_;

  while (true) {
    if (batch_.pos >= kBatch) {
      refill<kFunc>();
      // fold the drift scale before it drifts out of range
      if (std::abs(c_ * (t_ - t_ref_)) > kRenormSpan) renormalize();
    }
    const double* __restrict bdt = batch_.dt;
    const double* __restrict becd = batch_.ecd;
    const double* __restrict bkind = batch_.ukind;
    const std::uint32_t* __restrict bsite = batch_.site;
    const std::uint32_t* __restrict bsrc = batch_.src;

    // fast loop to the next boundary or batch end; all hot state in locals
    int k = batch_.pos;
    if (use_ecd) {
      double t = t_, p = p_, occ = occ_, gint = gint_, qv = qv_;
      double a = a_, q = q_, mj = max_jump_sq_;
      for (; k < kBatch; ++k) {
        const int kp = (k + kPrefetch) & (kBatch - 1);
        __builtin_prefetch(&w[bsite[kp]]);
        __builtin_prefetch(&w[bsrc[kp]]);
        __builtin_prefetch(&gv[2 * bsite[kp]]);
        const double dt = bdt[k];
        const double te = t + dt;
        if (te > boundary) break;
        const double pn = p * becd[k];
        const double dp = (pn - p) * invc;
        occ += w[0] * dp - dt;
        gint += a * dp - gsum * dt;
        qv += q * dp * (pn + p) * 0.5;
        const std::uint32_t x = bsite[k];
        const double wx = w[x];
        const double gx = gv[2 * x];
        const double vx = gv[2 * x + 1];
        double dw;
        if (bkind[k] >= preset) {
          dw = w[bsrc[k]];
          const double wn = wx + dw;
          if (wn > kWeightOverflow) {
            t_ = te;
            p_ = pn;
            throw std::runtime_error(
                "weight overflow: physical value out of range");
          }
          q += vx * dw * (wn + wx);
          w[x] = wn;
        } else {
          dw = -wx;
          w[x] = 0.0;
          q -= vx * dw * dw;
        }
        a += gx * dw;
        const double jump = gx * dw * pn;
        if (jump * jump > mj) mj = jump * jump;
        p = pn;
        t = te;
      }
      t_ = t;
      p_ = p;
      occ_ = occ;
      gint_ = gint;
      qv_ = qv;
      a_ = a;
      q_ = q;
      max_jump_sq_ = mj;
    } else if constexpr (kFunc) {
      // zero-drift functional mode (lambda = 1/(2d)); plain per-event path
      for (; k < kBatch; ++k) {
        const double te = t_ + bdt[k];
        if (te > boundary) break;
        advance<true>(te);
        apply_slot<true>(k);
      }
    } else {
      double t = t_;
      for (; k < kBatch; ++k) {
        const int kp = (k + kPrefetch) & (kBatch - 1);
        __builtin_prefetch(&w[bsite[kp]]);
        __builtin_prefetch(&w[bsrc[kp]]);
        const double te = t + bdt[k];
        if (te > boundary) break;
        t = te;
        const std::uint32_t x = bsite[k];
        if (bkind[k] >= preset) {
          const double wn = w[x] + w[bsrc[k]];
          if (wn > kWeightOverflow) {
            t_ = t;
            throw std::runtime_error(
                "weight overflow: physical value out of range");
          }
          w[x] = wn;
        } else {
          w[x] = 0.0;
        }
      }
      t_ = t;
    }
    batch_.pos = k;
    if (k >= kBatch) continue;  // batch exhausted, refill

    // boundary inside the current waiting interval
    const double te = t_ + batch_.dt[k];
    bool fired_end = false;
    while (next_obs < n_obs && obs[next_obs] <= te && obs[next_obs] <= t_end) {
      advance<kFunc>(obs[next_obs]);
      if (cb) cb(next_obs);
      ++next_obs;
    }
    if (te > t_end) {
      advance<kFunc>(t_end);
      fired_end = true;
    }
    boundary = next_obs < n_obs ? std::min(obs[next_obs], t_end) : t_end;
    if (fired_end) {
      batch_.pos = kBatch;  // discard pre-drawn events beyond the run
      return;
    }
    advance<kFunc>(te);
    apply_slot<kFunc>(k);
    batch_.pos = k + 1;
  }
}

// per-event path with event capture; used by coupling tests
template <bool kFunc>
void Simulator::run_logged(double t_end, std::span<const double> obs,
                           const std::function<void(int)>& cb) {
  int next_obs = 0;
  const int n_obs = static_cast<int>(obs.size());
  while (next_obs < n_obs && obs[next_obs] <= t_) ++next_obs;
  while (true) {
    if (batch_.pos >= kBatch) refill<kFunc>();
    const int k = batch_.pos;
    const double te = t_ + batch_.dt[k];
    while (next_obs < n_obs && obs[next_obs] <= te && obs[next_obs] <= t_end) {
      advance<kFunc>(obs[next_obs]);
      if (cb) cb(next_obs);
      ++next_obs;
    }
    if (te > t_end) {
      advance<kFunc>(t_end);
      batch_.pos = kBatch;
      return;
    }
    advance<kFunc>(te);
    if (log_) {
      const bool reset = batch_.ukind[k] < p_reset_;
      log_->push_back({t_, reset ? EventKind::kReset : EventKind::kInfect,
                       static_cast<std::int64_t>(batch_.site[k]),
                       reset ? -1
                             : static_cast<std::int64_t>(batch_.src[k])});
    }
    apply_slot<kFunc>(k);
    batch_.pos = k + 1;
    if (std::abs(c_ * (t_ - t_ref_)) > kRenormSpan) renormalize();
  }
}

void Simulator::run(double t_end, std::span<const double> obs_times,
                    const std::function<void(int)>& cb) {
  if (t_end < t_) throw std::invalid_argument("run: t_end before current time");
  if (log_) {
    if (tables_)
      run_logged<true>(t_end, obs_times, cb);
    else
      run_logged<false>(t_end, obs_times, cb);
    return;
  }
  if (tables_)
    run_core<true>(t_end, obs_times, cb);
  else
    run_core<false>(t_end, obs_times, cb);
}

void Simulator::step_event() {
  if (batch_.pos >= kBatch) {
    if (tables_)
      refill<true>();
    else
      refill<false>();
  }
  const int k = batch_.pos;
  const double te = t_ + batch_.dt[k];
  if (tables_) {
    advance<true>(te);
    apply_slot<true>(k);
  } else {
    advance<false>(te);
    apply_slot<false>(k);
  }
  if (log_) {
    const bool reset = batch_.ukind[k] < p_reset_;
    log_->push_back({t_, reset ? EventKind::kReset : EventKind::kInfect,
                     static_cast<std::int64_t>(batch_.site[k]),
                     reset ? -1 : static_cast<std::int64_t>(batch_.src[k])});
  }
  batch_.pos = k + 1;
  if (std::abs(c_ * (t_ - t_ref_)) > kRenormSpan) renormalize();
}

std::vector<std::uint8_t> Simulator::support() const {
  std::vector<std::uint8_t> s(w_.size());
  for (std::size_t i = 0; i < w_.size(); ++i) s[i] = w_[i] > 0.0 ? 1 : 0;
  return s;
}

}  // namespace nbcpp::sim
