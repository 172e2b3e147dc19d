#include "airwaycl/kernels/kernels.hpp"

#include <atomic>
#include <cstdlib>
#include <cstring>

namespace airwaycl::kernels {
namespace {

bool cpu_has_avx2() {
#if defined(__x86_64__) || defined(__i386__)
  return __builtin_cpu_supports("avx2");
#else
  return false;
#endif
}

struct Active {
  const detail::KernelTable* table;
  Backend backend;
};

Active resolve(Backend want) {
  if (want == Backend::avx2) {
    if (const auto* t = detail::avx2_table(); t && cpu_has_avx2()) return {t, Backend::avx2};
  }
  return {&detail::scalar_table(), Backend::scalar};
}

Active initial() {
  Backend want = Backend::avx2;
  if (const char* env = std::getenv("AIRWAYCL_SIMD"); env && std::strcmp(env, "scalar") == 0)
    want = Backend::scalar;
  return resolve(want);
}

std::atomic<const detail::KernelTable*>& table_slot() {
  static std::atomic<const detail::KernelTable*> slot{initial().table};
  return slot;
}
std::atomic<Backend>& backend_slot() {
  static std::atomic<Backend> slot{initial().backend};
  return slot;
}

const detail::KernelTable& table() { return *table_slot().load(std::memory_order_relaxed); }

}  // namespace

Backend active_backend() { return backend_slot().load(std::memory_order_relaxed); }

const char* backend_name(Backend b) { return b == Backend::avx2 ? "avx2" : "scalar"; }

void force_backend(Backend b) {
  const Active a = resolve(b);
  table_slot().store(a.table, std::memory_order_relaxed);
  backend_slot().store(a.backend, std::memory_order_relaxed);
}

void clip_scale(const float* src, float* dst, std::size_t n, float lo, float hi) {
  table().clip_scale(src, dst, n, lo, hi);
}

ConfusionTotals confusion(const std::uint8_t* pred, const std::uint8_t* gt, std::size_t n) {
  return table().confusion(pred, gt, n);
}

std::uint64_t count_nonzero(const std::uint8_t* m, std::size_t n) {
  return table().count_nonzero(m, n);
}

void hist_bin_index(const float* v, std::int32_t* idx, std::size_t n, float lo, float hi,
                    int bins) {
  table().hist_bin_index(v, idx, n, lo, hi, bins);
}

void nonzero_to_mask(const float* v, std::uint8_t* out, std::size_t n) {
  table().nonzero_to_mask(v, out, n);
}

}  // namespace airwaycl::kernels
