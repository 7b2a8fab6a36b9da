#pragma once

#include <cstdint>
#include <cmath>
#include <span>

namespace normtail {

// Counter-based stream: draw t is a stateless hash of (key, t), so a stream
// is fully determined by its 64-bit key and how many values were consumed.
// Streams are split with fork(), which derives an independent key without
// touching the parent's counter; per-run keys come from make_stream_key
// below so sweeps are bit-reproducible under any execution order.
class RngStream {
 public:
  explicit RngStream(std::uint64_t key) : key_(key) {}

  // SplitMix64 finalizer (Steele, Lea, Flood 2014).
  static std::uint64_t mix(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
  }

  static std::uint64_t combine(std::uint64_t a, std::uint64_t b) {
    return mix(a ^ (0x2545F4914F6CDD1DULL + mix(b)));
  }

  // Independent child stream; the parent is not advanced.
  RngStream fork(std::uint64_t tag) const {
    return RngStream(combine(key_, tag));
  }

  std::uint64_t key() const { return key_; }

  std::uint64_t next_u64() { return mix(key_ + ++ctr_ * 0x9E3779B97F4A7C15ULL); }

  // Uniform on (0,1), never exactly 0 or 1.
  double uniform01() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  // Standard normal via Box-Muller; the second value of each pair is cached.
  double normal() {
    if (have_cached_) {
      have_cached_ = false;
      return cached_;
    }
    double u1 = uniform01();
    double u2 = uniform01();
    double r = std::sqrt(-2.0 * std::log(u1));
    double a = 6.283185307179586476925286766559 * u2;
    cached_ = r * std::sin(a);
    have_cached_ = true;
    return r * std::cos(a);
  }

  void fill_normal(std::span<double> out) {
    for (double& x : out) x = normal();
  }

 private:
  std::uint64_t key_;
  std::uint64_t ctr_ = 0;
  double cached_ = 0.0;
  bool have_cached_ = false;
};

// Key for one run cell of a sweep: (master_seed, algorithm id, horizon,
// replicate index). The per-iteration component is added inside the run
// loop via fork(t).
inline std::uint64_t make_stream_key(std::uint64_t master_seed,
                                     std::uint32_t algo_id, std::uint64_t T,
                                     std::uint32_t replicate) {
  std::uint64_t k = RngStream::mix(master_seed);
  k = RngStream::combine(k, algo_id);
  k = RngStream::combine(k, T);
  k = RngStream::combine(k, replicate);
  return k;
}

}  // namespace normtail
