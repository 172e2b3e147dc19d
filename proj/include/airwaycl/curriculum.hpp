#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "airwaycl/scoring.hpp"

namespace airwaycl::curriculum {

/// One training phase: an ordered id list visited for `epochs` epochs.
struct Phase {
  int index = 0;
  std::vector<std::string> scan_ids;
  int epochs = 1;
  // domain composition, set only on adaptation schedules
  int source_count = -1;
  int target_count = -1;

  bool has_domain_mix() const { return source_count >= 0; }
  bool operator==(const Phase&) const = default;
};

struct Schedule {
  std::string strategy;
  std::uint64_t seed = 0;
  std::string score_digest;  // hex FNV-1a 64 over the source score-table CSV
  std::vector<Phase> phases;

  bool operator==(const Schedule&) const = default;
};

enum class Strategy { vanilla, mixed, reverse, no_cl };
Strategy strategy_from_string(const std::string& s);
std::string strategy_to_string(Strategy s);

std::uint64_t fnv1a64(const void* data, std::size_t n);
std::string digest_of_bytes(const std::string& bytes);
std::string digest_of_table(const scoring::ScoreTable& table);

/// Contiguous slices of the ascending-complexity ranking. Sizes are
/// floor(f_i * N) with the remainder appended to the last slice; when N is at
/// least the number of fractions, empty slices are repaired by taking one id
/// from the currently largest slice.
std::vector<std::vector<std::string>> partition(
    const scoring::ScoreTable& ranked,
    const std::vector<double>& fractions = {0.15, 0.40, 0.45});

/// Batch k (k > 0) gains ceil(overlap_frac * |batch k|) ids sampled without
/// replacement (CounterRng stream (overlap, k)) from the union of the
/// pre-overlap batches before it; originals stay in their own batches.
std::vector<std::vector<std::string>> apply_overlap(
    const std::vector<std::vector<std::string>>& batches, double overlap_frac,
    std::uint64_t seed);

struct ComposeParams {
  std::vector<double> fractions{0.15, 0.40, 0.45};
  std::vector<int> epochs{20, 70, 110};
  double overlap_frac = 0.15;
  double mixed_frac = 0.15;
  std::uint64_t seed = 0;
};

/// Builds the full-training schedule for one strategy. Within-phase order is
/// seeded-shuffled (stream (phase_shuffle, k)) for every strategy.
Schedule compose(const scoring::ScoreTable& ranked, Strategy strategy,
                 const ComposeParams& params = {});

std::string schedule_to_json(const Schedule& schedule);
Schedule schedule_from_json(const std::string& text);

void emit(const Schedule& schedule, const std::string& path);
Schedule load_schedule(const std::string& path);

/// Load and verify that the manifest's digest matches the given score table;
/// throws on mismatch (tampered or mismatched manifest).
Schedule load_schedule_verified(const std::string& path, const scoring::ScoreTable& table);

}  // namespace airwaycl::curriculum
