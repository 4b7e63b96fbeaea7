#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>

// Counter-based RNG (Philox4x32-10). Streams are keyed by (seed, stream_id),
// so replica r of a run always sees the same numbers no matter how many
// replicas run, in what order, or on how many threads.

namespace nbcpp::rng {

struct Philox4x32 {
  static constexpr std::uint32_t kM0 = 0xD2511F53u;
  static constexpr std::uint32_t kM1 = 0xCD9E8D57u;
  static constexpr std::uint32_t kW0 = 0x9E3779B9u;
  static constexpr std::uint32_t kW1 = 0xBB67AE85u;

  static inline void round(std::array<std::uint32_t, 4>& c, std::uint32_t k0,
                           std::uint32_t k1) {
    const std::uint64_t p0 = static_cast<std::uint64_t>(kM0) * c[0];
    const std::uint64_t p1 = static_cast<std::uint64_t>(kM1) * c[2];
    const std::uint32_t hi0 = static_cast<std::uint32_t>(p0 >> 32);
    const std::uint32_t lo0 = static_cast<std::uint32_t>(p0);
    const std::uint32_t hi1 = static_cast<std::uint32_t>(p1 >> 32);
    const std::uint32_t lo1 = static_cast<std::uint32_t>(p1);
    c = {hi1 ^ c[1] ^ k0, lo1, hi0 ^ c[3] ^ k1, lo0};
  }

  static inline std::array<std::uint32_t, 4> block(
      std::array<std::uint32_t, 4> ctr, std::uint32_t k0, std::uint32_t k1) {
    for (int r = 0; r < 10; ++r) {
      round(ctr, k0, k1);
      k0 += kW0;
      k1 += kW1;
    }
    return ctr;
  }
};

// Sequential view of one Philox stream. Consumes two 64-bit words per block.
class Stream {
 public:
  Stream() : Stream(0, 0) {}
  Stream(std::uint64_t seed, std::uint64_t stream_id)
      : k0_(static_cast<std::uint32_t>(seed)),
        k1_(static_cast<std::uint32_t>(seed >> 32)),
        id_lo_(static_cast<std::uint32_t>(stream_id)),
        id_hi_(static_cast<std::uint32_t>(stream_id >> 32)) {}

  std::uint64_t u64() {
    if (have_) {
      have_ = false;
      return spare_;
    }
    const auto b = Philox4x32::block(
        {static_cast<std::uint32_t>(ctr_), static_cast<std::uint32_t>(ctr_ >> 32),
         id_lo_, id_hi_},
        k0_, k1_);
    ++ctr_;
    spare_ = (static_cast<std::uint64_t>(b[3]) << 32) | b[2];
    have_ = true;
    return (static_cast<std::uint64_t>(b[1]) << 32) | b[0];
  }

  // [0, 1), 53 random bits
  double u01() { return static_cast<double>(u64() >> 11) * 0x1.0p-53; }

  // (0, 1], safe under log()
  double u01_pos() {
    return (static_cast<double>(u64() >> 11) + 1.0) * 0x1.0p-53;
  }

  double exponential(double rate) { return -std::log(u01_pos()) / rate; }

  // uniform integer in [0, n), n >= 1 (fixed-point multiply; bias < n * 2^-64)
  std::uint64_t bounded(std::uint64_t n) {
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(u64()) * n) >> 64);
  }

  std::uint64_t counter() const { return ctr_; }

  // Bulk generation: writes 2*n_counters words, identical to 2*n_counters
  // sequential u64() calls from an aligned (no cached spare) position.
  // Lane-structured so the independent counters vectorize.
  void fill(std::uint64_t* out, std::uint64_t n_counters);

 private:
  std::uint32_t k0_, k1_, id_lo_, id_hi_;
  std::uint64_t ctr_ = 0;
  std::uint64_t spare_ = 0;
  bool have_ = false;
};

inline void Stream::fill(std::uint64_t* out, std::uint64_t n_counters) {
  if (have_) throw std::logic_error("rng fill: stream not block-aligned");
  constexpr int W = 8;  // one register group of counters per chunk
  std::uint64_t base = 0;
  for (; base + W <= n_counters; base += W) {
    std::uint64_t a0[W], a1[W], a2[W], a3[W];
#pragma GCC unroll 8
    for (int l = 0; l < W; ++l) {
      const std::uint64_t c = ctr_ + base + static_cast<std::uint64_t>(l);
      a0[l] = c & 0xFFFFFFFFull;
      a1[l] = c >> 32;
      a2[l] = id_lo_;
      a3[l] = id_hi_;
    }
    std::uint32_t kk0 = k0_, kk1 = k1_;
#pragma GCC unroll 10
    for (int rnd = 0; rnd < 10; ++rnd) {
#pragma GCC unroll 8
      for (int l = 0; l < W; ++l) {
        const std::uint64_t p0 = a0[l] * 0xD2511F53ull;
        const std::uint64_t p1 = a2[l] * 0xCD9E8D57ull;
        a0[l] = (p1 >> 32) ^ a1[l] ^ kk0;
        a1[l] = p1 & 0xFFFFFFFFull;
        a2[l] = (p0 >> 32) ^ a3[l] ^ kk1;
        a3[l] = p0 & 0xFFFFFFFFull;
      }
      kk0 += Philox4x32::kW0;
      kk1 += Philox4x32::kW1;
    }
#pragma GCC unroll 8
    for (int l = 0; l < W; ++l) {
      out[2 * (base + l)] = (a1[l] << 32) | a0[l];
      out[2 * (base + l) + 1] = (a3[l] << 32) | a2[l];
    }
  }
  const int rem = static_cast<int>(n_counters - base);
  for (int i = 0; i < rem; ++i) {
    const std::uint64_t c = ctr_ + base + static_cast<std::uint64_t>(i);
    const auto b = Philox4x32::block(
        {static_cast<std::uint32_t>(c), static_cast<std::uint32_t>(c >> 32),
         id_lo_, id_hi_},
        k0_, k1_);
    out[2 * (base + i)] = (static_cast<std::uint64_t>(b[1]) << 32) | b[0];
    out[2 * (base + i) + 1] = (static_cast<std::uint64_t>(b[3]) << 32) | b[2];
  }
  ctr_ += n_counters;
}

// Stream ids for auxiliary randomness so they never collide with replicas
// (replica ids occupy [0, 2^32)).
inline constexpr std::uint64_t kBootstrapStream = (1ull << 32);
inline constexpr std::uint64_t kPilotStream = (1ull << 32) + 1;
inline constexpr std::uint64_t kOracleStream = (1ull << 32) + 2;

inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ull);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

// xoshiro256++ for bulk oracle sampling (walk oracles burn ~1e11 draws);
// replica simulation keeps the counter-based streams above.
class FastStream {
 public:
  FastStream(std::uint64_t seed, std::uint64_t stream_id) {
    std::uint64_t sm = seed ^ (0x9E3779B97F4A7C15ull * (stream_id + 1));
    for (auto& w : s_) w = splitmix64(sm);
  }

  std::uint64_t u64() {
    const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  std::uint64_t bounded(std::uint64_t n) {
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(u64()) * n) >> 64);
  }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }
  std::uint64_t s_[4];
};

}  // namespace nbcpp::rng
