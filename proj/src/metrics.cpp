#include "airwaycl/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "airwaycl/components.hpp"
#include "airwaycl/distance.hpp"
#include "airwaycl/kernels/kernels.hpp"
#include "airwaycl/skeleton.hpp"

namespace airwaycl::metrics {
namespace {

std::optional<double> ratio(std::uint64_t num, std::uint64_t den) {
  if (den == 0) return std::nullopt;
  return double(num) / double(den);
}

}  // namespace

const std::vector<std::string>& MetricReport::field_names() {
  static const std::vector<std::string> names{
      "iou",  "dice", "precision",      "completeness",       "tpr",
      "tnr",  "fpr",  "fnr",            "dlr",                "dbr",
      "volume_leakage", "centerline_leakage", "one_minus_leakage",
      "centerline_distance_mm", "airway_size_mse_mm2"};
  return names;
}

std::optional<double> MetricReport::by_name(const std::string& name) const {
  if (name == "iou") return iou;
  if (name == "dice") return dice;
  if (name == "precision") return precision;
  if (name == "completeness") return completeness;
  if (name == "tpr") return tpr;
  if (name == "tnr") return tnr;
  if (name == "fpr") return fpr;
  if (name == "fnr") return fnr;
  if (name == "dlr") return dlr;
  if (name == "dbr") return dbr;
  if (name == "volume_leakage") return volume_leakage;
  if (name == "centerline_leakage") return centerline_leakage;
  if (name == "one_minus_leakage") return one_minus_leakage;
  if (name == "centerline_distance_mm") return centerline_distance_mm;
  if (name == "airway_size_mse_mm2") return airway_size_mse_mm2;
  throw std::invalid_argument("unknown metric name: " + name);
}

ConfusionCounts confusion(const Mask3D& pred, const Mask3D& gt) {
  require_same_grid(pred.dims, gt.dims, "confusion");
  const auto t = kernels::confusion(pred.data.data(), gt.data.data(), pred.data.size());
  return ConfusionCounts{t.tp, t.fp, t.tn, t.fn};
}

OverlapMetrics overlap_metrics(const ConfusionCounts& c) {
  OverlapMetrics m;
  m.iou = ratio(c.tp, c.tp + c.fp + c.fn);
  m.dice = ratio(2 * c.tp, 2 * c.tp + c.fp + c.fn);
  m.precision = ratio(c.tp, c.tp + c.fp);
  m.completeness = ratio(c.tp, c.tp + c.fn);
  m.tpr = m.completeness;
  m.tnr = ratio(c.tn, c.tn + c.fp);
  m.fpr = ratio(c.fp, c.fp + c.tn);
  m.fnr = ratio(c.fn, c.fn + c.tp);
  return m;
}

std::optional<double> detected_length_rate(const topo::SkeletonGraph& gt_graph,
                                           const Mask3D& pred) {
  require_same_grid(gt_graph.dims, pred.dims, "detected_length_rate");
  double total = 0.0, covered = 0.0;
  const auto inside = [&](std::int64_t v) { return pred.data[std::size_t(v)] != 0; };
  for (const auto& br : gt_graph.branches) {
    for (std::size_t i = 1; i < br.path.size(); ++i) {
      const auto a = unravel(gt_graph.dims, br.path[i - 1]);
      const auto b = unravel(gt_graph.dims, br.path[i]);
      const double dx = (a[0] - b[0]) * gt_graph.spacing.sx;
      const double dy = (a[1] - b[1]) * gt_graph.spacing.sy;
      const double dz = (a[2] - b[2]) * gt_graph.spacing.sz;
      const double step = std::sqrt(dx * dx + dy * dy + dz * dz);
      total += step;
      if (inside(br.path[i - 1]) && inside(br.path[i])) covered += step;
    }
  }
  if (total <= 0.0) return std::nullopt;
  return covered / total;
}

std::optional<double> detected_branch_ratio(const topo::SkeletonGraph& gt_graph,
                                            const Mask3D& pred, double detect_frac) {
  require_same_grid(gt_graph.dims, pred.dims, "detected_branch_ratio");
  if (gt_graph.branches.empty()) return std::nullopt;
  int detected = 0;
  for (const auto& br : gt_graph.branches) {
    std::size_t inside = 0;
    for (const auto v : br.path) inside += pred.data[std::size_t(v)] != 0;
    if (double(inside) >= detect_frac * double(br.path.size())) ++detected;
  }
  return double(detected) / double(gt_graph.branches.size());
}

std::optional<double> volume_leakage(const Mask3D& pred, const Mask3D& gt) {
  const auto c = confusion(pred, gt);
  return ratio(c.fp, c.tp + c.fn);
}

std::optional<double> centerline_leakage(const topo::SkeletonGraph& pred_graph,
                                         const Mask3D& gt) {
  require_same_grid(pred_graph.dims, gt.dims, "centerline_leakage");
  if (pred_graph.voxels.empty()) return std::nullopt;
  std::size_t outside = 0;
  for (const auto v : pred_graph.voxels) outside += gt.data[std::size_t(v)] == 0;
  return double(outside) / double(pred_graph.voxels.size());
}

std::optional<double> centerline_distance(const topo::SkeletonGraph& a,
                                          const topo::SkeletonGraph& b) {
  require_same_grid(a.dims, b.dims, "centerline_distance");
  if (a.voxels.empty() || b.voxels.empty()) return std::nullopt;

  const auto one_way = [](const topo::SkeletonGraph& from, const topo::SkeletonGraph& to) {
    std::vector<std::uint8_t> seeds(std::size_t(to.dims.count()), 0);
    for (const auto v : to.voxels) seeds[std::size_t(v)] = 1;
    const auto sq = topo::squared_distance_to_seeds(to.dims, to.spacing, seeds);
    double sum = 0.0;
    for (const auto v : from.voxels) sum += std::sqrt(sq[std::size_t(v)]);
    return sum / double(from.voxels.size());
  };
  return 0.5 * (one_way(a, b) + one_way(b, a));
}

SizeMseResult airway_size_mse(const topo::SkeletonGraph& pred_graph,
                              const topo::SkeletonGraph& gt_graph) {
  SizeMseResult res;
  const auto centroid = [](const topo::SkeletonGraph& g, const topo::Branch& br) {
    double cx = 0, cy = 0, cz = 0;
    for (const auto v : br.path) {
      const auto p = unravel(g.dims, v);
      cx += p[0] * g.spacing.sx;
      cy += p[1] * g.spacing.sy;
      cz += p[2] * g.spacing.sz;
    }
    const double n = double(br.path.size());
    return std::array<double, 3>{cx / n, cy / n, cz / n};
  };

  struct Pair {
    double dist;
    int pi, gi;
  };
  std::vector<Pair> pairs;
  std::vector<std::array<double, 3>> pc, gc;
  for (const auto& br : pred_graph.branches) pc.push_back(centroid(pred_graph, br));
  for (const auto& br : gt_graph.branches) gc.push_back(centroid(gt_graph, br));
  for (std::size_t i = 0; i < pc.size(); ++i)
    for (std::size_t j = 0; j < gc.size(); ++j) {
      const double dx = pc[i][0] - gc[j][0], dy = pc[i][1] - gc[j][1], dz = pc[i][2] - gc[j][2];
      pairs.push_back({std::sqrt(dx * dx + dy * dy + dz * dz), int(i), int(j)});
    }
  std::sort(pairs.begin(), pairs.end(), [](const Pair& a, const Pair& b) {
    if (a.dist != b.dist) return a.dist < b.dist;
    if (a.pi != b.pi) return a.pi < b.pi;
    return a.gi < b.gi;
  });

  std::vector<std::uint8_t> pu(pc.size(), 0), gu(gc.size(), 0);
  double sse = 0.0;
  int matched = 0;
  for (const auto& p : pairs) {
    if (pu[std::size_t(p.pi)] || gu[std::size_t(p.gi)]) continue;
    pu[std::size_t(p.pi)] = gu[std::size_t(p.gi)] = 1;
    const double diff = pred_graph.branches[std::size_t(p.pi)].mean_diameter_mm -
                        gt_graph.branches[std::size_t(p.gi)].mean_diameter_mm;
    sse += diff * diff;
    ++matched;
  }
  res.matched = matched;
  res.unmatched = int(pc.size() + gc.size()) - 2 * matched;
  if (matched > 0) res.mse_mm2 = sse / double(matched);
  return res;
}

MetricReport full_report(const Mask3D& pred, const Mask3D& gt) {
  return full_report_with_graphs(pred, gt).report;
}

FullReportResult full_report_with_graphs(const Mask3D& pred, const Mask3D& gt) {
  require_same_grid(pred.dims, gt.dims, "full_report");
  if (!(pred.spacing == gt.spacing))
    throw std::invalid_argument("full_report: spacing mismatch");

  const Mask3D pred_lc = topo::largest_component(pred, 26);

  const auto pred_dist = topo::distance_transform(pred_lc);
  const auto gt_dist = topo::distance_transform(gt);
  auto pred_graph = topo::build_graph(topo::skeletonize(pred_lc), pred_dist);
  auto gt_graph = topo::build_graph(topo::skeletonize(gt), gt_dist);

  MetricReport r;
  const auto c = confusion(pred_lc, gt);
  const auto om = overlap_metrics(c);
  r.iou = om.iou;
  r.dice = om.dice;
  r.precision = om.precision;
  r.completeness = om.completeness;
  r.tpr = om.tpr;
  r.tnr = om.tnr;
  r.fpr = om.fpr;
  r.fnr = om.fnr;
  r.dlr = detected_length_rate(gt_graph, pred_lc);
  r.dbr = detected_branch_ratio(gt_graph, pred_lc);
  r.volume_leakage = volume_leakage(pred_lc, gt);
  r.centerline_leakage = centerline_leakage(pred_graph, gt);
  if (r.volume_leakage) {
    if (*r.volume_leakage <= 1.0) {
      r.one_minus_leakage = 1.0 - *r.volume_leakage;
    } else {
      r.one_minus_leakage = 0.0;
      r.leakage_above_one = true;
    }
  }
  r.centerline_distance_mm = centerline_distance(pred_graph, gt_graph);
  const auto mse = airway_size_mse(pred_graph, gt_graph);
  r.airway_size_mse_mm2 = mse.mse_mm2;
  r.unmatched_branches = mse.unmatched;
  return {r, std::move(pred_graph), std::move(gt_graph)};
}

double forgetting_rate(const std::vector<MetricReport>& before,
                       const std::vector<MetricReport>& after,
                       const std::vector<std::string>& metric_names) {
  if (before.empty() || before.size() != after.size())
    throw std::invalid_argument("forgetting_rate: report lists must be non-empty and equal length");
  if (metric_names.empty()) throw std::invalid_argument("forgetting_rate: no metrics selected");
  double sum = 0.0;
  std::size_t count = 0;
  for (std::size_t i = 0; i < before.size(); ++i) {
    for (const auto& name : metric_names) {
      const auto b = before[i].by_name(name);
      const auto a = after[i].by_name(name);
      if (!b || !a)
        throw std::invalid_argument("forgetting_rate: metric '" + name +
                                    "' undefined for scan index " + std::to_string(i));
      sum += *b - *a;
      ++count;
    }
  }
  return 100.0 * sum / double(count);
}

}  // namespace airwaycl::metrics
