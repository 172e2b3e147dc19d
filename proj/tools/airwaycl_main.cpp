#include <CLI11.hpp>

#include <iostream>

#include "airwaycl/cli_commands.hpp"

using namespace airwaycl;

int main(int argc, char** argv) {
  CLI::App app{"airwaycl - airway-CT complexity scoring and curriculum schedules"};
  app.require_subcommand(1);

  // ---- extract ----
  cli::ExtractOptions ex;
  auto* extract = app.add_subcommand(
      "extract", "Compute per-scan feature vectors from CT/ground-truth/lung triples");
  extract->add_option("--ct", ex.ct, "CT volumes (.nii/.nii.gz or @list-file)")->required();
  extract->add_option("--gt", ex.gt, "ground-truth airway masks")->required();
  extract->add_option("--lung", ex.lung, "lung masks")->required();
  extract->add_option("--out", ex.out_csv, "output feature CSV")->required();
  extract->add_option("--jobs", ex.jobs, "worker count (default: logical CPUs)");
  extract->add_flag("--no-crop{false}", ex.crop_to_lung,
                    "skip cropping to the padded lung bounding box");
  extract->add_option("--apex-pad", ex.apex_pad, "extra axial slices toward the apex")
      ->default_val(10);
  extract->add_flag("--superior-neg-z{false}", ex.superior_positive_z,
                    "apex padding goes toward -z instead of +z");

  // ---- score ----
  cli::ScoreOptions sc;
  auto* score = app.add_subcommand("score", "Turn features or baseline IoU into ranked scores");
  score->add_option("--mode", sc.mode, "ml | bootstrap")->default_val("ml");
  score->add_option("--features", sc.features_csv, "feature CSV (ml mode)");
  score->add_option("--model", sc.model_file, "forest model JSON (ml mode)");
  score->add_option("--metrics", sc.metrics_csv, "CSV with iou/iou_pct column (bootstrap mode)");
  score->add_option("--out", sc.out_csv, "output score CSV")->required();
  score->add_option("--hist-out", sc.hist_csv, "optional histogram CSV");
  score->add_option("--bins", sc.bins, "histogram bins")->default_val(20);

  // ---- train-scorer ----
  cli::TrainScorerOptions tr;
  auto* train = app.add_subcommand(
      "train-scorer", "Fit the PCA composite target and the random-forest scorer");
  train->add_option("--features", tr.features_csv, "feature CSV")->required();
  train->add_option("--metrics", tr.metrics_csv, "metric report CSV")->required();
  train->add_option("--out", tr.out_model, "output model JSON")->required();
  train->add_option("--trees", tr.params.tree_count)->default_val(200);
  train->add_option("--max-depth", tr.params.max_depth)->default_val(16);
  train->add_option("--min-leaf", tr.params.min_leaf)->default_val(2);
  train->add_option("--mtry", tr.params.features_per_split,
                    "features per split (0 = ceil(p/3))");
  train->add_flag("--no-bagging{false}", tr.params.bootstrap, "disable bootstrap sampling");
  train->add_option("--seed", tr.params.seed)->envname("AIRWAY_CL_SEED");
  train->add_option("--jobs", tr.params.threads, "tree-training workers");
  train->add_option("--metrics-list", tr.metric_names,
                    "metric subset for the composite target");

  // ---- compose ----
  cli::ComposeOptions co;
  auto* compose =
      app.add_subcommand("compose", "Build a curriculum or adaptation schedule manifest");
  compose->add_flag("--mode-adapt,--adapt", co.adapt, "build a few-shot adaptation schedule");
  compose->add_option("--strategy", co.strategy,
                      "vanilla|mixed|reverse|no_cl (full) or target|source2target|random (adapt)")
      ->default_val("vanilla");
  compose->add_option("--scores", co.scores_csv, "score CSV (full-training mode)");
  compose->add_option("--fractions", co.fractions, "batch fractions")->expected(-1);
  compose->add_option("--epochs", co.epochs, "per-phase epochs")->expected(-1);
  compose->add_option("--overlap", co.overlap_frac)->default_val(0.15);
  compose->add_option("--mixed-frac", co.mixed_frac)->default_val(0.15);
  compose->add_option("--seed", co.seed)->envname("AIRWAY_CL_SEED");
  compose->add_option("--out", co.out_manifest, "output manifest JSON")->required();
  compose->add_option("--target-scores", co.target_scores_csv, "target score CSV (adapt)");
  compose->add_option("--source-scores", co.source_scores_csv, "source score CSV (adapt)");
  compose->add_option("--n-target", co.n_target)->default_val(20);
  compose->add_option("--n-source", co.n_source)->default_val(19);
  compose->add_option("--window", co.window.window_size)->default_val(5);
  compose->add_option("--step", co.window.step_size)->default_val(1);
  compose->add_option("--step-epochs", co.window.step_epochs)->default_val(5);
  compose->add_option("--random-epochs", co.random_epochs)->default_val(175);

  // ---- evaluate ----
  cli::EvaluateOptions ev;
  auto* evaluate =
      app.add_subcommand("evaluate", "Compute metric reports, or a forgetting rate");
  evaluate->add_option("--pred", ev.pred, "prediction masks");
  evaluate->add_option("--gt", ev.gt, "ground-truth masks");
  evaluate->add_option("--out", ev.out_csv, "output metric CSV");
  evaluate->add_option("--graph-dir", ev.graph_dir, "dump skeleton graphs here");
  evaluate->add_option("--forgetting-before", ev.forgetting_before, "metric CSV before tuning");
  evaluate->add_option("--forgetting-after", ev.forgetting_after, "metric CSV after tuning");
  evaluate->add_option("--forgetting-metrics", ev.forgetting_metrics)->expected(-1);
  evaluate->add_option("--jobs", ev.jobs, "worker count");

  // ---- phantom ----
  cli::PhantomOptions ph;
  auto* phantom = app.add_subcommand("phantom", "Generate synthetic airway phantoms");
  phantom->add_option("--kind", ph.kind, "tube | y | tree")->default_val("tree");
  phantom->add_option("--levels", ph.levels)->default_val(3);
  phantom->add_option("--count", ph.count)->default_val(1);
  phantom->add_flag("--jitter", ph.jitter, "vary geometry per phantom");
  phantom->add_flag("--with-pred", ph.with_pred, "also write degraded prediction masks");
  phantom->add_option("--seed", ph.seed)->envname("AIRWAY_CL_SEED");
  phantom->add_option("--out-dir", ph.out_dir)->required();
  phantom->add_option("--tube-length", ph.tube_length_mm)->default_val(80.0);
  phantom->add_option("--tube-radius", ph.tube_radius_mm)->default_val(2.0);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return cli::kExitUsage;
  }

  if (extract->parsed()) return cli::cmd_extract(ex, std::cout, std::cerr);
  if (score->parsed()) return cli::cmd_score(sc, std::cout, std::cerr);
  if (train->parsed()) return cli::cmd_train_scorer(tr, std::cout, std::cerr);
  if (compose->parsed()) return cli::cmd_compose(co, std::cout, std::cerr);
  if (evaluate->parsed()) return cli::cmd_evaluate(ev, std::cout, std::cerr);
  if (phantom->parsed()) return cli::cmd_phantom(ph, std::cout, std::cerr);
  return cli::kExitUsage;
}
