#include "airwaycl/cli_commands.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <set>
#include <sstream>
#include <thread>

#include "airwaycl/csv.hpp"
#include "airwaycl/curriculum.hpp"
#include "airwaycl/features.hpp"
#include "airwaycl/graph.hpp"
#include "airwaycl/metrics_io.hpp"
#include "airwaycl/nifti.hpp"
#include "airwaycl/phantom.hpp"
#include "airwaycl/rng.hpp"
#include "airwaycl/volume_ops.hpp"

namespace fs = std::filesystem;

namespace airwaycl::cli {
namespace {

/// Runs fn(i) for i in [0, n) on a bounded pool; returns per-item error
/// strings (empty = success). Items are claimed atomically, results land in
/// input order.
template <class Fn>
std::vector<std::string> run_parallel(int n, int jobs, Fn&& fn) {
  std::vector<std::string> errors(static_cast<std::size_t>(n));
  int threads = jobs > 0 ? jobs : int(std::thread::hardware_concurrency());
  threads = std::max(1, std::min(threads, n));
  const auto work = [&](int i) {
    try {
      fn(i);
    } catch (const std::exception& e) {
      errors[std::size_t(i)] = e.what();
    }
  };
  if (threads == 1) {
    for (int i = 0; i < n; ++i) work(i);
  } else {
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    for (int w = 0; w < threads; ++w)
      pool.emplace_back([&] {
        for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) work(i);
      });
    for (auto& th : pool) th.join();
  }
  return errors;
}

std::vector<std::string> unique_ids_or_throw(const std::vector<std::string>& paths) {
  std::vector<std::string> ids;
  std::set<std::string> seen;
  for (const auto& p : paths) {
    auto id = io::scan_id_from_path(p);
    if (!seen.insert(id).second)
      throw std::invalid_argument("duplicate scan id '" + id + "' (from " + p + ")");
    ids.push_back(std::move(id));
  }
  return ids;
}

std::string two_dec(double v) { return csv::format_fixed2(v); }

}  // namespace

std::vector<std::string> expand_path_args(const std::vector<std::string>& args) {
  std::vector<std::string> out;
  for (const auto& a : args) {
    if (a.empty() || a[0] != '@') {
      out.push_back(a);
      continue;
    }
    std::istringstream in(csv::read_text_file(a.substr(1)));
    std::string line;
    while (std::getline(in, line)) {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (!line.empty()) out.push_back(line);
    }
  }
  return out;
}

int cmd_extract(const ExtractOptions& opt, std::ostream& out, std::ostream& err) {
  std::vector<std::string> ct, gt, lung, ids;
  try {
    ct = expand_path_args(opt.ct);
    gt = expand_path_args(opt.gt);
    lung = expand_path_args(opt.lung);
    if (ct.empty()) throw std::invalid_argument("no input scans given");
    if (ct.size() != gt.size() || ct.size() != lung.size())
      throw std::invalid_argument("--ct, --gt and --lung lists must have equal length");
    if (opt.out_csv.empty()) throw std::invalid_argument("--out is required");
    ids = unique_ids_or_throw(ct);
  } catch (const std::exception& e) {
    err << "extract: " << e.what() << "\n";
    return kExitUsage;
  }

  const int n = int(ct.size());
  std::vector<features::FeatureVector> rows(static_cast<std::size_t>(n));
  const auto errors = run_parallel(n, opt.jobs, [&](int i) {
    auto vol = io::load_volume(ct[std::size_t(i)]);
    auto gtm = io::load_mask(gt[std::size_t(i)]);
    auto lungm = io::load_mask(lung[std::size_t(i)]);
    if (opt.crop_to_lung) {
      const auto box =
          volume::lung_bounding_box(lungm, opt.apex_pad, opt.superior_positive_z);
      vol = volume::crop(vol, box);
      gtm = volume::crop(gtm, box);
      lungm = volume::crop(lungm, box);
    }
    rows[std::size_t(i)] = features::extract_features(vol, gtm, lungm);
  });

  std::vector<std::pair<std::string, features::FeatureVector>> ok_rows;
  int failed = 0;
  for (int i = 0; i < n; ++i) {
    if (errors[std::size_t(i)].empty()) {
      ok_rows.emplace_back(ids[std::size_t(i)], rows[std::size_t(i)]);
    } else {
      ++failed;
      err << "extract: " << ids[std::size_t(i)] << ": " << errors[std::size_t(i)] << "\n";
    }
  }
  features::save_feature_table(features::feature_table(ok_rows), opt.out_csv);
  out << "extract: wrote " << ok_rows.size() << " rows to " << opt.out_csv;
  if (failed) out << " (" << failed << " failed)";
  out << "\n";
  return failed ? kExitPartial : kExitOk;
}

int cmd_score(const ScoreOptions& opt, std::ostream& out, std::ostream& err) {
  try {
    if (opt.out_csv.empty()) throw std::invalid_argument("--out is required");
    std::vector<std::pair<std::string, double>> scores;

    if (opt.mode == "bootstrap") {
      if (opt.metrics_csv.empty())
        throw std::invalid_argument("bootstrap mode needs --metrics with an iou column");
      const csv::Table t = csv::load(opt.metrics_csv);
      const int idc = t.require_column("id");
      int iouc = t.column("iou");
      double scale = 1.0;
      if (iouc < 0) {
        iouc = t.column("iou_pct");
        scale = 0.01;
      }
      if (iouc < 0)
        throw std::invalid_argument("missing column 'iou' (or 'iou_pct') in " + opt.metrics_csv);
      for (const auto& row : t.rows) {
        const double iou = csv::parse_double(row[std::size_t(iouc)]) * scale;
        scores.emplace_back(row[std::size_t(idc)], scoring::bootstrap_score(iou));
      }
    } else if (opt.mode == "ml") {
      if (opt.features_csv.empty() || opt.model_file.empty())
        throw std::invalid_argument("ml mode needs --features and --model");
      const auto table = features::load_feature_table(opt.features_csv);
      const auto model = scoring::load_forest(opt.model_file);
      for (std::size_t i = 0; i < table.ids.size(); ++i)
        scores.emplace_back(table.ids[i],
                            scoring::predict_score(model, table.rows[i].as_row()));
    } else {
      throw std::invalid_argument("unknown mode '" + opt.mode + "' (use ml or bootstrap)");
    }

    const auto ranked = scoring::rank(scores);
    scoring::save_score_table(ranked, opt.out_csv);
    out << "score: wrote " << ranked.rows.size() << " rows to " << opt.out_csv << "\n";
    if (!opt.hist_csv.empty()) {
      const auto h = scoring::score_histogram(ranked, opt.bins);
      csv::write_text_file(opt.hist_csv, scoring::histogram_to_csv(h));
      out << "score: histogram mean=" << csv::format_double(h.mean)
          << " stdev=" << csv::format_double(h.stdev) << " -> " << opt.hist_csv << "\n";
    }
    return kExitOk;
  } catch (const std::exception& e) {
    err << "score: " << e.what() << "\n";
    return kExitUsage;
  }
}

int cmd_train_scorer(const TrainScorerOptions& opt, std::ostream& out, std::ostream& err) {
  try {
    if (opt.features_csv.empty() || opt.metrics_csv.empty() || opt.out_model.empty())
      throw std::invalid_argument("--features, --metrics and --out are required");
    const auto ftab = features::load_feature_table(opt.features_csv);
    const auto mtab = metrics::load_report_table(opt.metrics_csv);
    if (ftab.ids.empty()) throw std::invalid_argument("empty feature table");

    std::unordered_map<std::string, std::size_t> metric_row;
    for (std::size_t i = 0; i < mtab.ids.size(); ++i) metric_row[mtab.ids[i]] = i;
    std::vector<std::string> missing;
    for (const auto& id : ftab.ids)
      if (!metric_row.count(id)) missing.push_back(id);
    if (!missing.empty()) {
      std::string list;
      for (const auto& id : missing) list += " " + id;
      throw std::invalid_argument("ids missing from metrics csv:" + list);
    }

    // metric panel: explicit list, or every metric defined for all scans
    std::vector<std::string> names = opt.metric_names;
    if (names.empty()) {
      for (const auto& name : metrics::MetricReport::field_names()) {
        bool all_defined = true;
        for (const auto& id : ftab.ids)
          if (!mtab.reports[metric_row.at(id)].by_name(name)) {
            all_defined = false;
            break;
          }
        if (all_defined)
          names.push_back(name);
        else
          err << "train-scorer: dropping metric '" << name << "' (undefined for some scans)\n";
      }
    }
    if (names.empty()) throw std::invalid_argument("no usable metric columns");

    std::vector<std::vector<double>> metric_matrix;
    for (const auto& id : ftab.ids) {
      const auto& rep = mtab.reports[metric_row.at(id)];
      std::vector<double> row;
      for (const auto& name : names) {
        const auto v = rep.by_name(name);
        if (!v)
          throw std::invalid_argument("metric '" + name + "' undefined for scan '" + id + "'");
        row.push_back(*v);
      }
      metric_matrix.push_back(std::move(row));
    }
    std::vector<int> orientation;
    for (const auto& name : names) orientation.push_back(scoring::default_orientation(name));

    const auto composite = scoring::fit_composite_target(metric_matrix, names, orientation);
    out << "train-scorer: PCA weights\n";
    for (std::size_t j = 0; j < names.size(); ++j)
      out << "  " << names[j] << " = " << csv::format_double(composite.weights[j]) << "\n";

    std::vector<double> y;
    for (const auto& row : metric_matrix)
      y.push_back(-scoring::composite_quality(composite, row));

    std::vector<std::vector<double>> X;
    for (const auto& fv : ftab.rows) X.push_back(fv.as_row());

    auto model = scoring::fit_forest(X, y, opt.params);
    model.composite = composite;
    scoring::save_forest(model, opt.out_model);
    out << "train-scorer: OOB R2 = "
        << (model.oob_r2 ? csv::format_double(*model.oob_r2) : std::string("undefined"))
        << "\n";
    out << "train-scorer: wrote " << opt.out_model << "\n";
    return kExitOk;
  } catch (const std::exception& e) {
    err << "train-scorer: " << e.what() << "\n";
    return kExitUsage;
  }
}

namespace {

void print_phase_summary(const curriculum::Schedule& s, std::ostream& out) {
  out << "strategy=" << s.strategy << " phases=" << s.phases.size()
      << " digest=" << s.score_digest << "\n";
  out << "phase  size  epochs";
  const bool mix = !s.phases.empty() && s.phases.front().has_domain_mix();
  if (mix) out << "  source  target";
  out << "\n";
  for (const auto& ph : s.phases) {
    out << ph.index << "  " << ph.scan_ids.size() << "  " << ph.epochs;
    if (ph.has_domain_mix()) out << "  " << ph.source_count << "  " << ph.target_count;
    out << "\n";
  }
}

}  // namespace

int cmd_compose(const ComposeOptions& opt, std::ostream& out, std::ostream& err) {
  try {
    if (opt.out_manifest.empty()) throw std::invalid_argument("--out is required");
    curriculum::Schedule sched;

    if (!opt.adapt) {
      if (opt.scores_csv.empty()) throw std::invalid_argument("--scores is required");
      const auto table = scoring::load_score_table(opt.scores_csv);
      curriculum::ComposeParams params;
      params.fractions = opt.fractions;
      params.epochs = opt.epochs;
      params.overlap_frac = opt.overlap_frac;
      params.mixed_frac = opt.mixed_frac;
      params.seed = opt.seed;
      sched = curriculum::compose(table, curriculum::strategy_from_string(opt.strategy), params);
    } else {
      if (opt.target_scores_csv.empty())
        throw std::invalid_argument("adapt mode needs --target-scores");
      const auto target = scoring::load_score_table(opt.target_scores_csv);
      if (opt.strategy == "random") {
        sched = adaptation::random_selection(target, opt.n_target, opt.seed, opt.random_epochs,
                                             curriculum::digest_of_table(target));
      } else {
        const auto mode = adaptation::mode_from_string(opt.strategy);
        scoring::ScoreTable source;
        std::string digest = curriculum::digest_of_table(target);
        if (mode == adaptation::Mode::source2target) {
          if (opt.source_scores_csv.empty())
            throw std::invalid_argument("source2target needs --source-scores");
          source = scoring::load_score_table(opt.source_scores_csv);
          digest = curriculum::digest_of_bytes(scoring::score_table_to_csv(target) +
                                               scoring::score_table_to_csv(source));
        }
        const auto seq =
            adaptation::select_scans(target, source, opt.n_target, opt.n_source, mode);
        sched = adaptation::window_schedule(seq, opt.window, opt.strategy, digest);
      }
    }

    curriculum::emit(sched, opt.out_manifest);
    print_phase_summary(sched, out);
    out << "compose: wrote " << opt.out_manifest << "\n";
    return kExitOk;
  } catch (const std::exception& e) {
    err << "compose: " << e.what() << "\n";
    return kExitUsage;
  }
}

int cmd_evaluate(const EvaluateOptions& opt, std::ostream& out, std::ostream& err) {
  // forgetting mode: compare two report tables
  if (!opt.forgetting_before.empty() || !opt.forgetting_after.empty()) {
    try {
      if (opt.forgetting_before.empty() || opt.forgetting_after.empty())
        throw std::invalid_argument("--forgetting needs both before and after CSVs");
      const auto before = metrics::load_report_table(opt.forgetting_before);
      const auto after = metrics::load_report_table(opt.forgetting_after);
      if (before.ids != after.ids)
        throw std::invalid_argument("before/after scan ids differ");
      const auto names = opt.forgetting_metrics.empty()
                             ? std::vector<std::string>{"iou", "dlr", "dbr", "precision",
                                                        "one_minus_leakage"}
                             : opt.forgetting_metrics;
      const double rate = metrics::forgetting_rate(before.reports, after.reports, names);
      out << "forgetting_rate_pp=" << two_dec(rate) << "\n";
      return kExitOk;
    } catch (const std::exception& e) {
      err << "evaluate: " << e.what() << "\n";
      return kExitUsage;
    }
  }

  std::vector<std::string> pred, gt, ids;
  try {
    pred = expand_path_args(opt.pred);
    gt = expand_path_args(opt.gt);
    if (pred.empty()) throw std::invalid_argument("no prediction/ground-truth pairs given");
    if (pred.size() != gt.size())
      throw std::invalid_argument("--pred and --gt lists must have equal length");
    if (opt.out_csv.empty()) throw std::invalid_argument("--out is required");
    ids = unique_ids_or_throw(pred);
    if (!opt.graph_dir.empty()) fs::create_directories(opt.graph_dir);
  } catch (const std::exception& e) {
    err << "evaluate: " << e.what() << "\n";
    return kExitUsage;
  }

  const int n = int(pred.size());
  std::vector<metrics::MetricReport> reports(static_cast<std::size_t>(n));
  const auto errors = run_parallel(n, opt.jobs, [&](int i) {
    const auto pm = io::load_mask(pred[std::size_t(i)]);
    const auto gm = io::load_mask(gt[std::size_t(i)]);
    if (opt.graph_dir.empty()) {
      reports[std::size_t(i)] = metrics::full_report(pm, gm);
    } else {
      auto res = metrics::full_report_with_graphs(pm, gm);
      reports[std::size_t(i)] = res.report;
      const auto base = fs::path(opt.graph_dir) / ids[std::size_t(i)];
      csv::write_text_file(base.string() + "_pred_graph.json",
                           topo::graph_to_json(res.pred_graph));
      csv::write_text_file(base.string() + "_gt_graph.json", topo::graph_to_json(res.gt_graph));
    }
  });

  std::vector<std::string> ok_ids;
  std::vector<metrics::MetricReport> ok_reports;
  int failed = 0;
  for (int i = 0; i < n; ++i) {
    if (errors[std::size_t(i)].empty()) {
      ok_ids.push_back(ids[std::size_t(i)]);
      ok_reports.push_back(reports[std::size_t(i)]);
    } else {
      ++failed;
      err << "evaluate: " << ids[std::size_t(i)] << ": " << errors[std::size_t(i)] << "\n";
    }
  }
  metrics::save_report_table(ok_ids, ok_reports, opt.out_csv);

  // Table-style cohort means
  const std::vector<std::pair<std::string, std::string>> cols{{"IoU", "iou"},
                                                              {"DLR", "dlr"},
                                                              {"DBR", "dbr"},
                                                              {"Prec.", "precision"},
                                                              {"1-Leak.", "one_minus_leakage"}};
  out << "cohort means (%):";
  for (const auto& [label, field] : cols) {
    double sum = 0.0;
    int cnt = 0;
    for (const auto& r : ok_reports)
      if (const auto v = r.by_name(field)) {
        sum += *v;
        ++cnt;
      }
    out << " " << label << " " << (cnt ? two_dec(100.0 * sum / cnt) : std::string("-"));
  }
  out << "\n";
  out << "evaluate: wrote " << ok_ids.size() << " rows to " << opt.out_csv;
  if (failed) out << " (" << failed << " failed)";
  out << "\n";
  return failed ? kExitPartial : kExitOk;
}

namespace {

Mask3D degraded_prediction(const Mask3D& gt, std::uint64_t seed) {
  CounterRng rng(seed, rng_stream::with_index(rng_stream::phantom_noise, 2));
  Mask3D pred = gt;
  std::vector<std::int64_t> fg;
  for (std::int64_t i = 0; i < gt.dims.count(); ++i)
    if (gt.data[std::size_t(i)]) fg.push_back(i);
  if (fg.empty()) return pred;

  // bite: remove a ball of ground truth around a seeded centre
  const auto bite_center = unravel(gt.dims, fg[rng.next_below(fg.size())]);
  const double bite_r = 3.0 + 5.0 * rng.next_unit();
  // leak: a ball of false positives touching the airway surface, so it stays
  // attached to the largest component
  const auto leak_anchor = unravel(gt.dims, fg[rng.next_below(fg.size())]);
  const int off_x = int(rng.next_below(5)) - 2;
  const int off_y = int(rng.next_below(5)) - 2;
  const int off_z = int(rng.next_below(5)) - 2;
  const double leak_r = 1.5 + 2.0 * rng.next_unit();

  const auto& s = gt.spacing;
  const auto ball = [&](const std::array<int, 3>& c, double r, std::uint8_t value) {
    const int rx = int(std::ceil(r / s.sx)), ry = int(std::ceil(r / s.sy)),
              rz = int(std::ceil(r / s.sz));
    for (int z = c[2] - rz; z <= c[2] + rz; ++z)
      for (int y = c[1] - ry; y <= c[1] + ry; ++y)
        for (int x = c[0] - rx; x <= c[0] + rx; ++x) {
          if (!gt.dims.contains(x, y, z)) continue;
          const double dx = (x - c[0]) * s.sx, dy = (y - c[1]) * s.sy, dz = (z - c[2]) * s.sz;
          if (dx * dx + dy * dy + dz * dz <= r * r)
            pred.data[std::size_t(linear_index(gt.dims, x, y, z))] = value;
        }
  };
  ball(bite_center, bite_r, 0);
  ball({leak_anchor[0] + off_x, leak_anchor[1] + off_y, leak_anchor[2] + off_z}, leak_r, 1);
  return pred;
}

}  // namespace

int cmd_phantom(const PhantomOptions& opt, std::ostream& out, std::ostream& err) {
  try {
    if (opt.out_dir.empty()) throw std::invalid_argument("--out-dir is required");
    if (opt.count < 1) throw std::invalid_argument("--count must be >= 1");
    for (const char* sub : {"ct", "gt", "lung", "truth"})
      fs::create_directories(fs::path(opt.out_dir) / sub);
    if (opt.with_pred) fs::create_directories(fs::path(opt.out_dir) / "pred");

    for (int i = 0; i < opt.count; ++i) {
      const std::uint64_t scan_seed = opt.seed + std::uint64_t(i);
      phantom::PhantomSpec spec;
      if (opt.kind == "tube") {
        spec = phantom::straight_tube_spec(opt.tube_length_mm, opt.tube_radius_mm);
      } else if (opt.kind == "y") {
        spec = phantom::y_spec();
      } else if (opt.kind == "tree") {
        spec = phantom::bifurcating_tree_spec(opt.levels);
      } else {
        throw std::invalid_argument("unknown phantom kind '" + opt.kind + "'");
      }
      if (opt.jitter && opt.kind == "tree") {
        CounterRng jrng(scan_seed, rng_stream::with_index(rng_stream::phantom_noise, 1));
        const int levels = 2 + int(jrng.next_below(2));  // 2 or 3 levels
        const double sp = 0.9 + 0.2 * jrng.next_unit();
        const Spacing spacing{sp, sp, 0.95 + 0.2 * jrng.next_unit()};
        spec = phantom::bifurcating_tree_spec(levels, Dims{96, 48, 96}, spacing);
        const double rscale = 0.85 + 0.35 * jrng.next_unit();
        for (auto& seg : spec.segments) seg.radius_mm *= rscale;
        spec.noise_sigma_hu = 25.0 + 20.0 * jrng.next_unit();
      }

      const auto ph = phantom::generate_phantom(spec, scan_seed);
      char name[32];
      std::snprintf(name, sizeof(name), "phantom_%03d", i);
      const fs::path root(opt.out_dir);
      io::save_volume(ph.ct, (root / "ct" / (std::string(name) + ".nii.gz")).string());
      io::save_mask(ph.airway, (root / "gt" / (std::string(name) + ".nii.gz")).string());
      io::save_mask(ph.lung, (root / "lung" / (std::string(name) + ".nii.gz")).string());
      csv::write_text_file((root / "truth" / (std::string(name) + ".json")).string(),
                           phantom::truth_to_json(ph.truth));
      if (opt.with_pred) {
        const auto pred = degraded_prediction(ph.airway, scan_seed);
        io::save_mask(pred, (root / "pred" / (std::string(name) + ".nii.gz")).string());
      }
    }
    out << "phantom: wrote " << opt.count << " phantom(s) under " << opt.out_dir << "\n";
    return kExitOk;
  } catch (const std::exception& e) {
    err << "phantom: " << e.what() << "\n";
    return kExitUsage;
  }
}

}  // namespace airwaycl::cli
