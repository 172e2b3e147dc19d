#include "airwaycl/features.hpp"

#include <cmath>
#include <set>
#include <stdexcept>

#include "airwaycl/components.hpp"
#include "airwaycl/csv.hpp"
#include "airwaycl/distance.hpp"
#include "airwaycl/graph.hpp"
#include "airwaycl/kernels/kernels.hpp"
#include "airwaycl/skeleton.hpp"

namespace airwaycl::features {

std::vector<double> FeatureVector::as_row() const {
  std::vector<double> row{tree_length_mm,     gt_voxel_count,       gt_volume_mm3,
                          volume_ratio,       branch_count,         avg_branch_length_mm,
                          avg_branch_diameter_mm, voxel_size_mm3,   lung_volume_mm3};
  row.insert(row.end(), histogram.begin(), histogram.end());
  return row;
}

const std::vector<std::string>& FeatureTable::column_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> n{"tree_length_mm",       "gt_voxel_count",
                               "gt_volume_mm3",        "volume_ratio",
                               "branch_count",         "avg_branch_length_mm",
                               "avg_branch_diameter_mm", "voxel_size_mm3",
                               "lung_volume_mm3"};
    for (int b = 0; b < kHistBins; ++b) {
      char buf[16];
      std::snprintf(buf, sizeof(buf), "hist_%03d", b);
      n.emplace_back(buf);
    }
    return n;
  }();
  return names;
}

FeatureVector extract_features(const Volume3D& ct, const Mask3D& gt, const Mask3D& lung) {
  if (ct.kind != IntensityKind::HU)
    throw std::invalid_argument("extract_features: CT must be in HU");
  require_same_grid(ct.dims, gt.dims, "extract_features(ct, gt)");
  require_same_grid(ct.dims, lung.dims, "extract_features(ct, lung)");
  if (!(ct.spacing == gt.spacing) || !(ct.spacing == lung.spacing))
    throw std::invalid_argument("extract_features: spacing mismatch");

  FeatureVector f;
  f.voxel_size_mm3 = ct.spacing.voxel_volume_mm3();

  const auto lung_count = kernels::count_nonzero(lung.data.data(), lung.data.size());
  if (lung_count == 0) throw std::invalid_argument("extract_features: empty lung mask");
  f.lung_volume_mm3 = double(lung_count) * f.voxel_size_mm3;

  f.gt_voxel_count_raw = double(kernels::count_nonzero(gt.data.data(), gt.data.size()));
  if (f.gt_voxel_count_raw == 0.0) {
    f.degenerate = true;
  } else {
    const Mask3D gt_lc = topo::largest_component(gt, 26);
    const auto lc_count = kernels::count_nonzero(gt_lc.data.data(), gt_lc.data.size());
    f.gt_voxel_count = double(lc_count);
    f.gt_volume_mm3 = double(lc_count) * f.voxel_size_mm3;
    f.volume_ratio = f.gt_volume_mm3 / std::pow(f.lung_volume_mm3, 2.0 / 3.0);

    const auto dist = topo::distance_transform(gt_lc);
    const auto graph = topo::build_graph(topo::skeletonize(gt_lc), dist);
    f.tree_length_mm = topo::tree_length(graph);
    f.branch_count = double(graph.branches.size());
    if (!graph.branches.empty()) {
      f.avg_branch_length_mm = f.tree_length_mm / f.branch_count;
      double diam = 0.0;
      for (const auto& br : graph.branches) diam += br.mean_diameter_mm;
      f.avg_branch_diameter_mm = diam / f.branch_count;
    }
  }

  // lung-window histogram over HU values inside the lung mask
  std::vector<std::int32_t> bins(ct.data.size());
  kernels::hist_bin_index(ct.data.data(), bins.data(), ct.data.size(), kLungWindowLo,
                          kLungWindowHi, kHistBins);
  std::array<std::uint64_t, kHistBins> counts{};
  for (std::size_t i = 0; i < bins.size(); ++i)
    if (lung.data[i]) ++counts[std::size_t(bins[i])];
  for (int b = 0; b < kHistBins; ++b)
    f.histogram[std::size_t(b)] = double(counts[std::size_t(b)]) / double(lung_count);

  return f;
}

FeatureTable feature_table(const std::vector<std::pair<std::string, FeatureVector>>& rows) {
  FeatureTable t;
  std::set<std::string> seen;
  for (const auto& [id, fv] : rows) {
    if (!seen.insert(id).second)
      throw std::invalid_argument("feature_table: duplicate scan id '" + id + "'");
    t.ids.push_back(id);
    t.rows.push_back(fv);
  }
  return t;
}

std::string feature_table_to_csv(const FeatureTable& table) {
  csv::Table out;
  out.header.push_back("id");
  for (const auto& c : FeatureTable::column_names()) out.header.push_back(c);
  out.header.push_back("gt_voxel_count_raw");
  out.header.push_back("degenerate");
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    std::vector<std::string> row;
    row.push_back(table.ids[i]);
    for (const double v : table.rows[i].as_row()) row.push_back(csv::format_double(v));
    row.push_back(csv::format_double(table.rows[i].gt_voxel_count_raw));
    row.push_back(table.rows[i].degenerate ? "1" : "0");
    out.rows.push_back(std::move(row));
  }
  return csv::serialize(out);
}

FeatureTable feature_table_from_csv(const std::string& csv_text) {
  const csv::Table in = csv::parse(csv_text);
  const int id_col = in.require_column("id");
  const auto& names = FeatureTable::column_names();
  std::vector<int> cols;
  for (const auto& n : names) cols.push_back(in.require_column(n));
  const int raw_col = in.column("gt_voxel_count_raw");
  const int deg_col = in.column("degenerate");

  FeatureTable t;
  std::set<std::string> seen;
  for (const auto& row : in.rows) {
    const std::string& id = row[std::size_t(id_col)];
    if (!seen.insert(id).second)
      throw std::invalid_argument("feature table: duplicate scan id '" + id + "'");
    FeatureVector f;
    std::vector<double> vals;
    for (const int c : cols) vals.push_back(csv::parse_double(row[std::size_t(c)]));
    f.tree_length_mm = vals[0];
    f.gt_voxel_count = vals[1];
    f.gt_volume_mm3 = vals[2];
    f.volume_ratio = vals[3];
    f.branch_count = vals[4];
    f.avg_branch_length_mm = vals[5];
    f.avg_branch_diameter_mm = vals[6];
    f.voxel_size_mm3 = vals[7];
    f.lung_volume_mm3 = vals[8];
    for (int b = 0; b < kHistBins; ++b) f.histogram[std::size_t(b)] = vals[std::size_t(9 + b)];
    if (raw_col >= 0) f.gt_voxel_count_raw = csv::parse_double(row[std::size_t(raw_col)]);
    if (deg_col >= 0) f.degenerate = row[std::size_t(deg_col)] == "1";
    t.ids.push_back(id);
    t.rows.push_back(f);
  }
  return t;
}

void save_feature_table(const FeatureTable& table, const std::string& path) {
  csv::write_text_file(path, feature_table_to_csv(table));
}

FeatureTable load_feature_table(const std::string& path) {
  return feature_table_from_csv(csv::read_text_file(path));
}

}  // namespace airwaycl::features
