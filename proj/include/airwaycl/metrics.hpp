#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "airwaycl/graph.hpp"
#include "airwaycl/types.hpp"

namespace airwaycl::metrics {

struct ConfusionCounts {
  std::uint64_t tp = 0, fp = 0, tn = 0, fn = 0;
  std::uint64_t total() const { return tp + fp + tn + fn; }
};

/// Overlap/centerline/leakage panel for one (prediction, ground-truth) pair.
/// Undefined denominators leave the corresponding field empty rather than
/// propagating NaN, so cohort aggregation can skip and count them.
struct MetricReport {
  std::optional<double> iou;
  std::optional<double> dice;
  std::optional<double> precision;
  std::optional<double> completeness;
  std::optional<double> tpr;
  std::optional<double> tnr;
  std::optional<double> fpr;
  std::optional<double> fnr;
  std::optional<double> dlr;
  std::optional<double> dbr;
  std::optional<double> volume_leakage;
  std::optional<double> centerline_leakage;
  std::optional<double> one_minus_leakage;
  std::optional<double> centerline_distance_mm;
  std::optional<double> airway_size_mse_mm2;
  bool leakage_above_one = false;  // set when 1 - leakage was clamped to 0
  int unmatched_branches = 0;      // branches left out of the size-MSE matching

  std::optional<double> by_name(const std::string& name) const;
  static const std::vector<std::string>& field_names();
};

ConfusionCounts confusion(const Mask3D& pred, const Mask3D& gt);

struct OverlapMetrics {
  std::optional<double> iou, dice, precision, completeness, tpr, tnr, fpr, fnr;
};
OverlapMetrics overlap_metrics(const ConfusionCounts& c);

/// Fraction of ground-truth centerline length covered by the prediction.
/// A step between consecutive path voxels counts iff both ends are inside
/// pred. Empty graph -> undefined.
std::optional<double> detected_length_rate(const topo::SkeletonGraph& gt_graph,
                                           const Mask3D& pred);

/// Fraction of ground-truth branches with at least detect_frac of their
/// centerline voxels inside the prediction.
std::optional<double> detected_branch_ratio(const topo::SkeletonGraph& gt_graph,
                                            const Mask3D& pred, double detect_frac = 0.8);

/// |pred \ gt| / |gt|. Undefined on empty gt.
std::optional<double> volume_leakage(const Mask3D& pred, const Mask3D& gt);

/// Fraction of predicted-centerline voxels outside gt. Undefined on an empty
/// prediction graph.
std::optional<double> centerline_leakage(const topo::SkeletonGraph& pred_graph, const Mask3D& gt);

/// Symmetric mean nearest-neighbor distance between the two centerline voxel
/// sets, in mm. Undefined when either graph is empty.
std::optional<double> centerline_distance(const topo::SkeletonGraph& a,
                                          const topo::SkeletonGraph& b);

struct SizeMseResult {
  std::optional<double> mse_mm2;
  int matched = 0;
  int unmatched = 0;
};

/// Branches matched one-to-one by greedy nearest-centroid assignment
/// (distance-ascending); MSE over matched mean-diameter pairs.
SizeMseResult airway_size_mse(const topo::SkeletonGraph& pred_graph,
                              const topo::SkeletonGraph& gt_graph);

/// Full panel: keeps the largest connected component of pred, skeletonizes
/// both masks, and computes every metric above.
MetricReport full_report(const Mask3D& pred, const Mask3D& gt);

struct FullReportResult {
  MetricReport report;
  topo::SkeletonGraph pred_graph;
  topo::SkeletonGraph gt_graph;
};

/// As full_report, also returning the skeleton graphs for inspection.
FullReportResult full_report_with_graphs(const Mask3D& pred, const Mask3D& gt);

/// Mean over scans and selected metrics of (before - after), in percentage
/// points; positive means forgetting. Throws if a selected metric is
/// undefined anywhere or the lists disagree in length.
double forgetting_rate(const std::vector<MetricReport>& before,
                       const std::vector<MetricReport>& after,
                       const std::vector<std::string>& metric_names = {
                           "iou", "dlr", "dbr", "precision", "one_minus_leakage"});

}  // namespace airwaycl::metrics
