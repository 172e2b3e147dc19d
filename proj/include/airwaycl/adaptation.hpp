#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "airwaycl/curriculum.hpp"
#include "airwaycl/scoring.hpp"

namespace airwaycl::adaptation {

enum class Domain { source, target };

/// Ordered scan sequence the sliding window moves over. For Source2Target all
/// source entries precede all target entries.
struct DomainSequence {
  std::vector<std::pair<std::string, Domain>> entries;
};

struct WindowParams {
  int window_size = 5;
  int step_size = 1;
  int step_epochs = 5;
};

enum class Mode { target, source2target };
Mode mode_from_string(const std::string& s);

/// target: the n_target lowest-score target ids, ascending.
/// source2target: the n_source highest-score source ids (ascending among
/// themselves) followed by the n_target lowest-score target ids (ascending).
DomainSequence select_scans(const scoring::ScoreTable& target_scores,
                            const scoring::ScoreTable& source_scores, int n_target, int n_source,
                            Mode mode);

/// Sliding-window phases [i, i + window) for i = 0, step, 2*step, ... while
/// the window fits; a final window shifted left to end exactly at the
/// sequence end is added when the last full window stops short. Each phase
/// runs step_epochs epochs; ids keep sequence order (no shuffle). Phases are
/// annotated with their (source, target) composition.
curriculum::Schedule window_schedule(const DomainSequence& seq, const WindowParams& params,
                                     const std::string& strategy_name,
                                     const std::string& score_digest);

/// Per-phase (source count, target count); throws on ids missing from seq.
std::vector<std::pair<int, int>> domain_mix(const curriculum::Schedule& schedule,
                                            const DomainSequence& seq);

/// Control run: n seeded-random target scans in one phase of `epochs` epochs.
curriculum::Schedule random_selection(const scoring::ScoreTable& target_scores, int n,
                                      std::uint64_t seed, int epochs,
                                      const std::string& score_digest);

}  // namespace airwaycl::adaptation
