#include "airwaycl/curriculum.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unordered_map>

#include <nlohmann/json.hpp>

#include "airwaycl/csv.hpp"
#include "airwaycl/rng.hpp"

namespace airwaycl::curriculum {

Strategy strategy_from_string(const std::string& s) {
  if (s == "vanilla") return Strategy::vanilla;
  if (s == "mixed") return Strategy::mixed;
  if (s == "reverse") return Strategy::reverse;
  if (s == "no_cl") return Strategy::no_cl;
  throw std::invalid_argument("unknown curriculum strategy '" + s + "'");
}

std::string strategy_to_string(Strategy s) {
  switch (s) {
    case Strategy::vanilla: return "vanilla";
    case Strategy::mixed: return "mixed";
    case Strategy::reverse: return "reverse";
    case Strategy::no_cl: return "no_cl";
  }
  return "vanilla";
}

std::uint64_t fnv1a64(const void* data, std::size_t n) {
  const auto* p = static_cast<const std::uint8_t*>(data);
  std::uint64_t h = 0xCBF29CE484222325ull;
  for (std::size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= 0x100000001B3ull;
  }
  return h;
}

std::string digest_of_bytes(const std::string& bytes) {
  const std::uint64_t h = fnv1a64(bytes.data(), bytes.size());
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return std::string(buf);
}

std::string digest_of_table(const scoring::ScoreTable& table) {
  return digest_of_bytes(scoring::score_table_to_csv(table));
}

std::vector<std::vector<std::string>> partition(const scoring::ScoreTable& ranked,
                                                const std::vector<double>& fractions) {
  if (ranked.rows.empty()) throw std::invalid_argument("partition: empty score table");
  if (fractions.empty()) throw std::invalid_argument("partition: no fractions");
  double sum = 0.0;
  for (const double f : fractions) {
    if (!(f > 0.0)) throw std::invalid_argument("partition: fractions must be positive");
    sum += f;
  }
  if (std::fabs(sum - 1.0) > 1e-9)
    throw std::invalid_argument("partition: fractions must sum to 1");

  const std::size_t n = ranked.rows.size();
  const std::size_t k = fractions.size();
  std::vector<std::size_t> sizes(k);
  std::size_t assigned = 0;
  for (std::size_t i = 0; i < k; ++i) {
    sizes[i] = std::size_t(std::floor(fractions[i] * double(n)));
    assigned += sizes[i];
  }
  sizes.back() += n - assigned;

  if (n >= k) {
    for (std::size_t i = 0; i < k; ++i) {
      while (sizes[i] == 0) {
        std::size_t donor = 0;
        for (std::size_t j = 1; j < k; ++j)
          if (sizes[j] >= sizes[donor]) donor = j;  // ties take the later batch
        if (sizes[donor] < 2) break;
        --sizes[donor];
        ++sizes[i];
      }
    }
  }

  std::vector<std::vector<std::string>> out(k);
  std::size_t pos = 0;
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < sizes[i]; ++j) out[i].push_back(ranked.rows[pos + j].id);
    pos += sizes[i];
  }
  return out;
}

std::vector<std::vector<std::string>> apply_overlap(
    const std::vector<std::vector<std::string>>& batches, double overlap_frac,
    std::uint64_t seed) {
  if (overlap_frac < 0.0) throw std::invalid_argument("apply_overlap: negative fraction");
  auto result = batches;
  std::vector<std::string> pool;
  for (std::size_t k = 0; k < batches.size(); ++k) {
    if (k > 0 && overlap_frac > 0.0 && !pool.empty()) {
      const std::size_t need =
          std::size_t(std::ceil(overlap_frac * double(batches[k].size())));
      CounterRng rng(seed, rng_stream::with_index(rng_stream::overlap, k));
      const auto picked = rng.sample_without_replacement(pool, need);
      result[k].insert(result[k].end(), picked.begin(), picked.end());
    }
    pool.insert(pool.end(), batches[k].begin(), batches[k].end());
  }
  return result;
}

Schedule compose(const scoring::ScoreTable& ranked, Strategy strategy,
                 const ComposeParams& params) {
  if (ranked.rows.empty()) throw std::invalid_argument("compose: empty score table");
  if (params.epochs.empty()) throw std::invalid_argument("compose: no epochs");
  for (const int e : params.epochs)
    if (e < 1) throw std::invalid_argument("compose: epochs must be >= 1");

  Schedule sched;
  sched.strategy = strategy_to_string(strategy);
  sched.seed = params.seed;
  sched.score_digest = digest_of_table(ranked);

  std::vector<std::vector<std::string>> phase_ids;
  std::vector<int> phase_epochs;

  if (strategy == Strategy::no_cl) {
    std::vector<std::string> all;
    for (const auto& r : ranked.rows) all.push_back(r.id);
    phase_ids.push_back(std::move(all));
    int total = 0;
    for (const int e : params.epochs) total += e;
    phase_epochs.push_back(total);
  } else {
    if (params.epochs.size() != params.fractions.size())
      throw std::invalid_argument("compose: epochs/fractions size mismatch");
    auto cores = partition(ranked, params.fractions);
    if (strategy == Strategy::reverse) std::reverse(cores.begin(), cores.end());
    phase_ids = apply_overlap(cores, params.overlap_frac, params.seed);
    phase_epochs = params.epochs;

    if (strategy == Strategy::mixed) {
      std::unordered_map<std::string, int> rank_of;
      for (const auto& r : ranked.rows) rank_of[r.id] = r.rank;
      for (std::size_t k = 0; k + 1 < phase_ids.size(); ++k) {
        if (cores[k].empty()) continue;
        int core_max = 0;
        for (const auto& id : cores[k]) core_max = std::max(core_max, rank_of.at(id));
        std::vector<std::string> harder;
        for (const auto& r : ranked.rows)
          if (r.rank > core_max) harder.push_back(r.id);
        if (harder.empty()) continue;
        const std::size_t need =
            std::size_t(std::ceil(params.mixed_frac * double(phase_ids[k].size())));
        CounterRng rng(params.seed, rng_stream::with_index(rng_stream::mixed_injection, k));
        const auto picked = rng.sample_without_replacement(harder, need);
        phase_ids[k].insert(phase_ids[k].end(), picked.begin(), picked.end());
      }
    }
  }

  for (std::size_t k = 0; k < phase_ids.size(); ++k) {
    Phase ph;
    ph.index = int(k);
    ph.epochs = phase_epochs[k];
    ph.scan_ids = std::move(phase_ids[k]);
    CounterRng rng(params.seed, rng_stream::with_index(rng_stream::phase_shuffle, k));
    rng.shuffle(ph.scan_ids);
    sched.phases.push_back(std::move(ph));
  }
  return sched;
}

std::string schedule_to_json(const Schedule& schedule) {
  nlohmann::ordered_json j;
  j["version"] = 1;
  j["strategy"] = schedule.strategy;
  j["seed"] = schedule.seed;
  j["score_digest"] = schedule.score_digest;
  j["phases"] = nlohmann::ordered_json::array();
  for (const auto& ph : schedule.phases) {
    nlohmann::ordered_json jp;
    jp["index"] = ph.index;
    jp["epochs"] = ph.epochs;
    if (ph.has_domain_mix())
      jp["domain_mix"] = {{"source", ph.source_count}, {"target", ph.target_count}};
    jp["scan_ids"] = ph.scan_ids;
    j["phases"].push_back(std::move(jp));
  }
  return j.dump(2) + "\n";
}

Schedule schedule_from_json(const std::string& text) {
  const auto j = nlohmann::json::parse(text);
  if (!j.contains("version") || j.at("version") != 1)
    throw std::invalid_argument("schedule: unsupported manifest version");
  Schedule s;
  s.strategy = j.at("strategy").get<std::string>();
  s.seed = j.at("seed").get<std::uint64_t>();
  s.score_digest = j.at("score_digest").get<std::string>();
  for (const auto& jp : j.at("phases")) {
    Phase ph;
    ph.index = jp.at("index").get<int>();
    ph.epochs = jp.at("epochs").get<int>();
    ph.scan_ids = jp.at("scan_ids").get<std::vector<std::string>>();
    if (jp.contains("domain_mix")) {
      ph.source_count = jp.at("domain_mix").at("source").get<int>();
      ph.target_count = jp.at("domain_mix").at("target").get<int>();
    }
    s.phases.push_back(std::move(ph));
  }
  return s;
}

void emit(const Schedule& schedule, const std::string& path) {
  csv::write_text_file(path, schedule_to_json(schedule));
}

Schedule load_schedule(const std::string& path) {
  return schedule_from_json(csv::read_text_file(path));
}

Schedule load_schedule_verified(const std::string& path, const scoring::ScoreTable& table) {
  Schedule s = load_schedule(path);
  const std::string expected = digest_of_table(table);
  if (s.score_digest != expected)
    throw std::runtime_error("schedule: score digest mismatch (manifest " + s.score_digest +
                             ", table " + expected + ")");
  return s;
}

}  // namespace airwaycl::curriculum
