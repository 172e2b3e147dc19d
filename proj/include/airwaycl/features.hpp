#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "airwaycl/types.hpp"

namespace airwaycl::features {

constexpr int kHistBins = 100;
constexpr float kLungWindowLo = -1000.0f;
constexpr float kLungWindowHi = 600.0f;

/// Descriptor of one (CT, ground-truth, lung-mask) triple: topology and
/// volume scalars of the ground truth plus the lung-window intensity
/// histogram of the scan. 9 scalars + 100 bins = 109 model features.
struct FeatureVector {
  double tree_length_mm = 0.0;
  double gt_voxel_count = 0.0;  // largest connected component of the ground truth
  double gt_volume_mm3 = 0.0;
  double volume_ratio = 0.0;  // gt_volume / lung_volume^(2/3)
  double branch_count = 0.0;
  double avg_branch_length_mm = 0.0;
  double avg_branch_diameter_mm = 0.0;
  double voxel_size_mm3 = 0.0;
  double lung_volume_mm3 = 0.0;
  std::array<double, kHistBins> histogram{};  // probabilities over the lung window

  double gt_voxel_count_raw = 0.0;  // before largest-component selection
  bool degenerate = false;          // empty ground truth

  std::vector<double> as_row() const;  // the 109 model features, in column order
};

FeatureVector extract_features(const Volume3D& ct, const Mask3D& gt, const Mask3D& lung);

/// Column-ordered feature matrix with an id index, serializable to CSV.
/// Canonical columns: id, the 9 scalars, hist_000..hist_099; the extra
/// columns gt_voxel_count_raw and degenerate trail after the canonical set.
struct FeatureTable {
  std::vector<std::string> ids;
  std::vector<FeatureVector> rows;

  static const std::vector<std::string>& column_names();  // 109 canonical names
};

FeatureTable feature_table(const std::vector<std::pair<std::string, FeatureVector>>& rows);

std::string feature_table_to_csv(const FeatureTable& table);
FeatureTable feature_table_from_csv(const std::string& csv_text);

void save_feature_table(const FeatureTable& table, const std::string& path);
FeatureTable load_feature_table(const std::string& path);

}  // namespace airwaycl::features
