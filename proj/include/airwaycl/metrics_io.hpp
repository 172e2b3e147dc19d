#pragma once

#include <string>
#include <vector>

#include "airwaycl/metrics.hpp"

namespace airwaycl::metrics {

/// CSV columns: id, thirteen rate metrics as percentages with two decimals
/// (Table style), then centerline_distance_mm and airway_size_mse_mm2 at full
/// precision. Undefined values serialize as empty cells.
std::string report_table_to_csv(const std::vector<std::string>& ids,
                                const std::vector<MetricReport>& reports);

struct ReportTable {
  std::vector<std::string> ids;
  std::vector<MetricReport> reports;
};

ReportTable report_table_from_csv(const std::string& text);

void save_report_table(const std::vector<std::string>& ids,
                       const std::vector<MetricReport>& reports, const std::string& path);
ReportTable load_report_table(const std::string& path);

std::string report_to_json(const MetricReport& report);

}  // namespace airwaycl::metrics
