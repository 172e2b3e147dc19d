#include "airwaycl/adaptation.hpp"

#include <stdexcept>
#include <unordered_map>

#include "airwaycl/rng.hpp"

namespace airwaycl::adaptation {

Mode mode_from_string(const std::string& s) {
  if (s == "target") return Mode::target;
  if (s == "source2target") return Mode::source2target;
  throw std::invalid_argument("unknown adaptation mode '" + s + "'");
}

DomainSequence select_scans(const scoring::ScoreTable& target_scores,
                            const scoring::ScoreTable& source_scores, int n_target, int n_source,
                            Mode mode) {
  if (n_target < 1) throw std::invalid_argument("select_scans: n_target must be >= 1");
  if (int(target_scores.rows.size()) < n_target)
    throw std::invalid_argument("select_scans: only " +
                                std::to_string(target_scores.rows.size()) +
                                " target scans for n_target=" + std::to_string(n_target));

  DomainSequence seq;
  if (mode == Mode::source2target) {
    if (n_source < 1) throw std::invalid_argument("select_scans: n_source must be >= 1");
    if (int(source_scores.rows.size()) < n_source)
      throw std::invalid_argument("select_scans: only " +
                                  std::to_string(source_scores.rows.size()) +
                                  " source scans for n_source=" + std::to_string(n_source));
    // hardest source scans, kept in ascending score order among themselves
    const std::size_t start = source_scores.rows.size() - std::size_t(n_source);
    for (std::size_t i = start; i < source_scores.rows.size(); ++i)
      seq.entries.emplace_back(source_scores.rows[i].id, Domain::source);
  }
  for (int i = 0; i < n_target; ++i)
    seq.entries.emplace_back(target_scores.rows[std::size_t(i)].id, Domain::target);

  std::unordered_map<std::string, int> seen;
  for (const auto& [id, dom] : seq.entries)
    if (++seen[id] > 1)
      throw std::invalid_argument("select_scans: id '" + id +
                                  "' appears in both source and target selections");
  return seq;
}

curriculum::Schedule window_schedule(const DomainSequence& seq, const WindowParams& params,
                                     const std::string& strategy_name,
                                     const std::string& score_digest) {
  const int n = int(seq.entries.size());
  if (params.window_size < 1 || params.step_size < 1 || params.step_epochs < 1)
    throw std::invalid_argument("window_schedule: window, step and epochs must be >= 1");
  if (params.window_size > n)
    throw std::invalid_argument("window_schedule: window larger than the sequence");

  std::vector<int> starts;
  int last_end = 0;
  for (int i = 0; i + params.window_size <= n; i += params.step_size) {
    starts.push_back(i);
    last_end = i + params.window_size;
  }
  if (last_end != n) starts.push_back(n - params.window_size);  // shifted final window

  curriculum::Schedule sched;
  sched.strategy = strategy_name;
  sched.seed = 0;
  sched.score_digest = score_digest;
  for (std::size_t k = 0; k < starts.size(); ++k) {
    curriculum::Phase ph;
    ph.index = int(k);
    ph.epochs = params.step_epochs;
    ph.source_count = 0;
    ph.target_count = 0;
    for (int i = starts[k]; i < starts[k] + params.window_size; ++i) {
      ph.scan_ids.push_back(seq.entries[std::size_t(i)].first);
      if (seq.entries[std::size_t(i)].second == Domain::source)
        ++ph.source_count;
      else
        ++ph.target_count;
    }
    sched.phases.push_back(std::move(ph));
  }
  return sched;
}

std::vector<std::pair<int, int>> domain_mix(const curriculum::Schedule& schedule,
                                            const DomainSequence& seq) {
  std::unordered_map<std::string, Domain> domain_of;
  for (const auto& [id, dom] : seq.entries) domain_of[id] = dom;
  std::vector<std::pair<int, int>> mix;
  for (const auto& ph : schedule.phases) {
    int s = 0, t = 0;
    for (const auto& id : ph.scan_ids) {
      const auto it = domain_of.find(id);
      if (it == domain_of.end())
        throw std::invalid_argument("domain_mix: id '" + id + "' not in the sequence");
      (it->second == Domain::source ? s : t) += 1;
    }
    mix.emplace_back(s, t);
  }
  return mix;
}

curriculum::Schedule random_selection(const scoring::ScoreTable& target_scores, int n,
                                      std::uint64_t seed, int epochs,
                                      const std::string& score_digest) {
  if (n < 1) throw std::invalid_argument("random_selection: n must be >= 1");
  if (epochs < 1) throw std::invalid_argument("random_selection: epochs must be >= 1");
  if (int(target_scores.rows.size()) < n)
    throw std::invalid_argument("random_selection: not enough target scans");
  std::vector<std::string> pool;
  for (const auto& r : target_scores.rows) pool.push_back(r.id);
  CounterRng rng(seed, rng_stream::with_index(rng_stream::random_selection, 0));
  const auto picked = rng.sample_without_replacement(pool, std::size_t(n));

  curriculum::Schedule sched;
  sched.strategy = "random";
  sched.seed = seed;
  sched.score_digest = score_digest;
  curriculum::Phase ph;
  ph.index = 0;
  ph.epochs = epochs;
  ph.scan_ids = picked;
  ph.source_count = 0;
  ph.target_count = n;
  sched.phases.push_back(std::move(ph));
  return sched;
}

}  // namespace airwaycl::adaptation
