#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

namespace airwaycl {

/// SplitMix64 finalizer.
inline std::uint64_t mix64(std::uint64_t x) {
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

/// Counter-based 64-bit generator. Output k of stream (seed, stream) is
///   mix64(base + (k+1) * 0x9E3779B97F4A7C15)   with
///   base = mix64(seed ^ mix64(stream + 0x6A09E667F3BCC909)),
/// a pure function of (seed, stream, k). Every seeded operation in this
/// toolkit draws from a fixed stream id, so outputs are bit-reproducible
/// across platforms, runs, and thread schedules.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0)
      : base_(mix64(seed ^ mix64(stream + 0x6A09E667F3BCC909ull))) {}

  std::uint64_t next_u64() {
    return mix64(base_ + (++counter_) * 0x9E3779B97F4A7C15ull);
  }

  /// Uniform in [0, n) via 128-bit multiply-shift. n must be > 0.
  std::uint64_t next_below(std::uint64_t n) {
    return std::uint64_t((unsigned __int128)(next_u64()) * n >> 64);
  }

  /// Uniform in [0, 1) with 53 random bits.
  double next_unit() { return double(next_u64() >> 11) * 0x1.0p-53; }

  /// Standard normal via Box-Muller; consumes two uniforms per pair.
  double next_gaussian() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = next_unit(), u2 = next_unit();
    if (u1 <= 0.0) u1 = 0x1.0p-53;
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 6.283185307179586476925286766559 * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

  /// In-place Fisher-Yates shuffle.
  template <class T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      const std::size_t j = std::size_t(next_below(i));
      std::swap(v[i - 1], v[j]);
    }
  }

  /// First k elements of a partial Fisher-Yates pass over pool, in draw order.
  template <class T>
  std::vector<T> sample_without_replacement(const std::vector<T>& pool, std::size_t k) {
    std::vector<std::size_t> idx(pool.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    if (k > idx.size()) k = idx.size();
    std::vector<T> out;
    out.reserve(k);
    for (std::size_t i = 0; i < k; ++i) {
      const std::size_t j = i + std::size_t(next_below(idx.size() - i));
      std::swap(idx[i], idx[j]);
      out.push_back(pool[idx[i]]);
    }
    return out;
  }

 private:
  std::uint64_t base_;
  std::uint64_t counter_ = 0;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

/// Fixed stream ids; call sites combine them with a phase/tree index as
/// stream = (id << 32) | index.
namespace rng_stream {
constexpr std::uint64_t patch_origin = 1;
constexpr std::uint64_t overlap = 2;
constexpr std::uint64_t mixed_injection = 3;
constexpr std::uint64_t phase_shuffle = 4;
constexpr std::uint64_t forest_tree = 5;
constexpr std::uint64_t random_selection = 6;
constexpr std::uint64_t phantom_noise = 7;

constexpr std::uint64_t with_index(std::uint64_t id, std::uint64_t index) {
  return (id << 32) | (index & 0xFFFFFFFFull);
}
}  // namespace rng_stream

}  // namespace airwaycl
