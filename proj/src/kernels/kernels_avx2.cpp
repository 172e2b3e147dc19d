#include "airwaycl/kernels/kernels.hpp"

// AVX2 variants. Compiled with -mavx2 on x86 targets only; dispatch gates on
// runtime CPU support. Arithmetic is ordered exactly as in the scalar
// reference (max, min, subtract, multiply; no FMA) so results are
// bit-identical.

#if defined(__AVX2__)

#include <immintrin.h>

namespace airwaycl::kernels {
namespace {

void clip_scale_avx2(const float* src, float* dst, std::size_t n, float lo, float hi) {
  const float inv = 1.0f / (hi - lo);
  const __m256 vlo = _mm256_set1_ps(lo);
  const __m256 vhi = _mm256_set1_ps(hi);
  const __m256 vinv = _mm256_set1_ps(inv);
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    __m256 v = _mm256_loadu_ps(src + i);
    v = _mm256_max_ps(v, vlo);  // NaN lanes take lo, matching the reference
    v = _mm256_min_ps(v, vhi);
    v = _mm256_mul_ps(_mm256_sub_ps(v, vlo), vinv);
    _mm256_storeu_ps(dst + i, v);
  }
  for (; i < n; ++i) {
    float v = src[i];
    v = v > lo ? v : lo;
    v = v < hi ? v : hi;
    dst[i] = (v - lo) * inv;
  }
}

ConfusionTotals confusion_avx2(const std::uint8_t* pred, const std::uint8_t* gt, std::size_t n) {
  ConfusionTotals c;
  const __m256i zero = _mm256_setzero_si256();
  std::size_t i = 0;
  for (; i + 32 <= n; i += 32) {
    const __m256i p = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(pred + i));
    const __m256i g = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(gt + i));
    // bit set where the byte is zero
    const std::uint32_t pz = std::uint32_t(_mm256_movemask_epi8(_mm256_cmpeq_epi8(p, zero)));
    const std::uint32_t gz = std::uint32_t(_mm256_movemask_epi8(_mm256_cmpeq_epi8(g, zero)));
    c.tp += std::uint64_t(__builtin_popcount(~pz & ~gz));
    c.fp += std::uint64_t(__builtin_popcount(~pz & gz));
    c.fn += std::uint64_t(__builtin_popcount(pz & ~gz));
  }
  for (; i < n; ++i) {
    const bool p = pred[i] != 0, g = gt[i] != 0;
    c.tp += p && g;
    c.fp += p && !g;
    c.fn += !p && g;
  }
  c.tn = n - c.tp - c.fp - c.fn;
  return c;
}

std::uint64_t count_nonzero_avx2(const std::uint8_t* m, std::size_t n) {
  std::uint64_t k = 0;
  const __m256i zero = _mm256_setzero_si256();
  std::size_t i = 0;
  for (; i + 32 <= n; i += 32) {
    const __m256i v = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(m + i));
    const std::uint32_t z = std::uint32_t(_mm256_movemask_epi8(_mm256_cmpeq_epi8(v, zero)));
    k += 32 - std::uint64_t(__builtin_popcount(z));
  }
  for (; i < n; ++i) k += m[i] != 0;
  return k;
}

void hist_bin_index_avx2(const float* v, std::int32_t* idx, std::size_t n, float lo, float hi,
                         int bins) {
  const float inv = float(bins) / (hi - lo);
  const __m256 vlo = _mm256_set1_ps(lo);
  const __m256 vhi = _mm256_set1_ps(hi);
  const __m256 vinv = _mm256_set1_ps(inv);
  const __m256i vmax = _mm256_set1_epi32(bins - 1);
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    __m256 t = _mm256_loadu_ps(v + i);
    t = _mm256_max_ps(t, vlo);
    t = _mm256_min_ps(t, vhi);
    t = _mm256_mul_ps(_mm256_sub_ps(t, vlo), vinv);
    __m256i b = _mm256_cvttps_epi32(t);  // truncation matches int() cast
    b = _mm256_min_epi32(b, vmax);
    _mm256_storeu_si256(reinterpret_cast<__m256i*>(idx + i), b);
  }
  for (; i < n; ++i) {
    float t = v[i];
    t = t > lo ? t : lo;
    t = t < hi ? t : hi;
    int b = int((t - lo) * inv);
    b = b < bins - 1 ? b : bins - 1;
    idx[i] = b;
  }
}

void nonzero_to_mask_avx2(const float* v, std::uint8_t* out, std::size_t n) {
  const __m256 zero = _mm256_setzero_ps();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    const __m256 x = _mm256_loadu_ps(v + i);
    // bit set where the value equals 0.0f; NaN compares unequal, so it maps to 1
    const std::uint32_t z = std::uint32_t(_mm256_movemask_ps(_mm256_cmp_ps(x, zero, _CMP_EQ_OQ)));
    for (int j = 0; j < 8; ++j) out[i + j] = ((z >> j) & 1u) ? 0 : 1;
  }
  for (; i < n; ++i) out[i] = (v[i] != 0.0f) ? 1 : 0;
}

}  // namespace

namespace detail {
const KernelTable* avx2_table() {
  static const KernelTable t{clip_scale_avx2, confusion_avx2, count_nonzero_avx2,
                             hist_bin_index_avx2, nonzero_to_mask_avx2};
  return &t;
}
}  // namespace detail

}  // namespace airwaycl::kernels

#else

namespace airwaycl::kernels::detail {
const KernelTable* avx2_table() { return nullptr; }
}  // namespace airwaycl::kernels::detail

#endif
