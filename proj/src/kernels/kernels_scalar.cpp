#include "airwaycl/kernels/kernels.hpp"

// Reference implementations. These define the kernel semantics; SIMD variants
// must reproduce them bit for bit.

namespace airwaycl::kernels {
namespace {

void clip_scale_scalar(const float* src, float* dst, std::size_t n, float lo, float hi) {
  const float inv = 1.0f / (hi - lo);
  for (std::size_t i = 0; i < n; ++i) {
    float v = src[i];
    v = v > lo ? v : lo;  // NaN falls to lo
    v = v < hi ? v : hi;
    dst[i] = (v - lo) * inv;
  }
}

ConfusionTotals confusion_scalar(const std::uint8_t* pred, const std::uint8_t* gt,
                                 std::size_t n) {
  ConfusionTotals c;
  for (std::size_t i = 0; i < n; ++i) {
    const bool p = pred[i] != 0, g = gt[i] != 0;
    c.tp += p && g;
    c.fp += p && !g;
    c.fn += !p && g;
  }
  c.tn = n - c.tp - c.fp - c.fn;
  return c;
}

std::uint64_t count_nonzero_scalar(const std::uint8_t* m, std::size_t n) {
  std::uint64_t k = 0;
  for (std::size_t i = 0; i < n; ++i) k += m[i] != 0;
  return k;
}

void hist_bin_index_scalar(const float* v, std::int32_t* idx, std::size_t n, float lo, float hi,
                           int bins) {
  const float inv = float(bins) / (hi - lo);
  for (std::size_t i = 0; i < n; ++i) {
    float t = v[i];
    t = t > lo ? t : lo;  // NaN falls to lo
    t = t < hi ? t : hi;
    int b = int((t - lo) * inv);
    b = b < bins - 1 ? b : bins - 1;
    idx[i] = b;
  }
}

void nonzero_to_mask_scalar(const float* v, std::uint8_t* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = (v[i] != 0.0f) ? 1 : 0;
}

}  // namespace

namespace detail {
const KernelTable& scalar_table() {
  static const KernelTable t{clip_scale_scalar, confusion_scalar, count_nonzero_scalar,
                             hist_bin_index_scalar, nonzero_to_mask_scalar};
  return t;
}
}  // namespace detail

}  // namespace airwaycl::kernels
