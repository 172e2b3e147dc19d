#pragma once

#include <cstddef>
#include <cstdint>

// Voxel-wise inner loops shared by the preprocessing, metric and feature
// paths. Each kernel has a scalar reference implementation and may have SIMD
// variants; the active variant is picked once at runtime from CPU features.
// All variants are bit-equivalent to the scalar reference (enforced by the
// equivalence test suite), so callers never observe which one ran.

namespace airwaycl::kernels {

enum class Backend { scalar, avx2 };

/// Backend used by dispatched calls. Resolved on first use: AVX2 when the CPU
/// supports it and the AIRWAYCL_SIMD environment variable is not "scalar".
Backend active_backend();
const char* backend_name(Backend b);

/// Override the backend (tests use this to compare variants). Requesting an
/// unavailable backend falls back to scalar.
void force_backend(Backend b);

struct ConfusionTotals {
  std::uint64_t tp = 0, fp = 0, fn = 0, tn = 0;
  bool operator==(const ConfusionTotals&) const = default;
};

/// dst[i] = (clamp(src[i], lo, hi) - lo) / (hi - lo). In-place allowed.
void clip_scale(const float* src, float* dst, std::size_t n, float lo, float hi);

/// Voxel-wise confusion tally of two 0/1 byte masks.
ConfusionTotals confusion(const std::uint8_t* pred, const std::uint8_t* gt, std::size_t n);

std::uint64_t count_nonzero(const std::uint8_t* m, std::size_t n);

/// idx[i] = clamped uniform bin of v[i] over [lo, hi) with `bins` bins.
/// Values below lo (and NaN) land in bin 0, values >= hi in bin bins-1.
void hist_bin_index(const float* v, std::int32_t* idx, std::size_t n, float lo, float hi,
                    int bins);

/// out[i] = v[i] != 0 ? 1 : 0 (exact comparison; NaN counts as nonzero).
void nonzero_to_mask(const float* v, std::uint8_t* out, std::size_t n);

namespace detail {
struct KernelTable {
  void (*clip_scale)(const float*, float*, std::size_t, float, float);
  ConfusionTotals (*confusion)(const std::uint8_t*, const std::uint8_t*, std::size_t);
  std::uint64_t (*count_nonzero)(const std::uint8_t*, std::size_t);
  void (*hist_bin_index)(const float*, std::int32_t*, std::size_t, float, float, int);
  void (*nonzero_to_mask)(const float*, std::uint8_t*, std::size_t);
};
const KernelTable& scalar_table();
const KernelTable* avx2_table();  // nullptr when not compiled in
}  // namespace detail

}  // namespace airwaycl::kernels
