#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include "airwaycl/adaptation.hpp"
#include "airwaycl/scoring.hpp"

// Subcommand implementations behind the CLI surface. Each returns a process
// exit code: 0 all items succeeded, 1 partial failure, 2 usage/config error.

namespace airwaycl::cli {

constexpr int kExitOk = 0;
constexpr int kExitPartial = 1;
constexpr int kExitUsage = 2;

/// Entries starting with '@' are manifest files listing one path per line.
std::vector<std::string> expand_path_args(const std::vector<std::string>& args);

struct ExtractOptions {
  std::vector<std::string> ct, gt, lung;
  std::string out_csv;
  int jobs = 0;
  bool crop_to_lung = true;  // crop every volume to the padded lung box first
  int apex_pad = 10;         // extra axial slices toward the apex
  bool superior_positive_z = true;
};
int cmd_extract(const ExtractOptions& opt, std::ostream& out, std::ostream& err);

struct ScoreOptions {
  std::string mode = "ml";  // ml | bootstrap
  std::string features_csv;
  std::string model_file;
  std::string metrics_csv;  // bootstrap input (needs an iou or iou_pct column)
  std::string out_csv;
  std::string hist_csv;
  int bins = 20;
};
int cmd_score(const ScoreOptions& opt, std::ostream& out, std::ostream& err);

struct TrainScorerOptions {
  std::string features_csv;
  std::string metrics_csv;
  std::string out_model;
  scoring::ForestParams params;
  std::vector<std::string> metric_names;  // empty = every fully-defined metric
};
int cmd_train_scorer(const TrainScorerOptions& opt, std::ostream& out, std::ostream& err);

struct ComposeOptions {
  bool adapt = false;
  std::string strategy = "vanilla";  // full: vanilla|mixed|reverse|no_cl
                                     // adapt: target|source2target|random
  std::string scores_csv;            // full-training input
  std::vector<double> fractions{0.15, 0.40, 0.45};
  std::vector<int> epochs{20, 70, 110};
  double overlap_frac = 0.15;
  double mixed_frac = 0.15;
  std::uint64_t seed = 0;
  std::string out_manifest;
  // adaptation inputs
  std::string target_scores_csv;
  std::string source_scores_csv;
  int n_target = 20;
  int n_source = 19;
  adaptation::WindowParams window;
  int random_epochs = 175;  // budget of the random control, matching 35 x 5
};
int cmd_compose(const ComposeOptions& opt, std::ostream& out, std::ostream& err);

struct EvaluateOptions {
  std::vector<std::string> pred, gt;
  std::string out_csv;
  std::string graph_dir;  // optional skeleton-graph JSON dumps
  std::string forgetting_before, forgetting_after;
  std::vector<std::string> forgetting_metrics;  // empty = the Table-style five
  int jobs = 0;
};
int cmd_evaluate(const EvaluateOptions& opt, std::ostream& out, std::ostream& err);

struct PhantomOptions {
  std::string kind = "tree";  // tube | y | tree
  int levels = 3;
  int count = 1;
  bool jitter = false;     // vary geometry per index (cohort generation)
  bool with_pred = false;  // also write a degraded prediction mask
  std::uint64_t seed = 0;
  std::string out_dir;
  double tube_length_mm = 80.0;
  double tube_radius_mm = 2.0;
};
int cmd_phantom(const PhantomOptions& opt, std::ostream& out, std::ostream& err);

}  // namespace airwaycl::cli
