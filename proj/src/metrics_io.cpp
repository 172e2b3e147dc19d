#include "airwaycl/metrics_io.hpp"

#include <nlohmann/json.hpp>

#include "airwaycl/csv.hpp"

namespace airwaycl::metrics {
namespace {

const std::vector<std::string>& pct_fields() {
  static const std::vector<std::string> f{
      "iou",  "dice", "precision",      "completeness",       "tpr",
      "tnr",  "fpr",  "fnr",            "dlr",                "dbr",
      "volume_leakage", "centerline_leakage", "one_minus_leakage"};
  return f;
}

void assign_field(MetricReport& r, const std::string& name, std::optional<double> v) {
  if (name == "iou") r.iou = v;
  else if (name == "dice") r.dice = v;
  else if (name == "precision") r.precision = v;
  else if (name == "completeness") r.completeness = v;
  else if (name == "tpr") r.tpr = v;
  else if (name == "tnr") r.tnr = v;
  else if (name == "fpr") r.fpr = v;
  else if (name == "fnr") r.fnr = v;
  else if (name == "dlr") r.dlr = v;
  else if (name == "dbr") r.dbr = v;
  else if (name == "volume_leakage") r.volume_leakage = v;
  else if (name == "centerline_leakage") r.centerline_leakage = v;
  else if (name == "one_minus_leakage") r.one_minus_leakage = v;
  else if (name == "centerline_distance_mm") r.centerline_distance_mm = v;
  else if (name == "airway_size_mse_mm2") r.airway_size_mse_mm2 = v;
}

}  // namespace

std::string report_table_to_csv(const std::vector<std::string>& ids,
                                const std::vector<MetricReport>& reports) {
  if (ids.size() != reports.size())
    throw std::invalid_argument("report_table_to_csv: id/report count mismatch");
  csv::Table out;
  out.header.push_back("id");
  for (const auto& f : pct_fields()) out.header.push_back(f + "_pct");
  out.header.push_back("centerline_distance_mm");
  out.header.push_back("airway_size_mse_mm2");

  for (std::size_t i = 0; i < ids.size(); ++i) {
    std::vector<std::string> row{ids[i]};
    for (const auto& f : pct_fields()) {
      const auto v = reports[i].by_name(f);
      row.push_back(v ? csv::format_fixed2(*v * 100.0) : "");
    }
    const auto cd = reports[i].centerline_distance_mm;
    row.push_back(cd ? csv::format_double(*cd) : "");
    const auto mse = reports[i].airway_size_mse_mm2;
    row.push_back(mse ? csv::format_double(*mse) : "");
    out.rows.push_back(std::move(row));
  }
  return csv::serialize(out);
}

ReportTable report_table_from_csv(const std::string& text) {
  const csv::Table in = csv::parse(text);
  const int idc = in.require_column("id");
  ReportTable out;
  for (const auto& row : in.rows) {
    out.ids.push_back(row[std::size_t(idc)]);
    MetricReport r;
    for (const auto& f : pct_fields()) {
      const int c = in.column(f + "_pct");
      if (c < 0) continue;
      const std::string& cell = row[std::size_t(c)];
      if (!cell.empty()) assign_field(r, f, csv::parse_double(cell) / 100.0);
    }
    for (const char* f : {"centerline_distance_mm", "airway_size_mse_mm2"}) {
      const int c = in.column(f);
      if (c < 0) continue;
      const std::string& cell = row[std::size_t(c)];
      if (!cell.empty()) assign_field(r, f, csv::parse_double(cell));
    }
    out.reports.push_back(r);
  }
  return out;
}

void save_report_table(const std::vector<std::string>& ids,
                       const std::vector<MetricReport>& reports, const std::string& path) {
  csv::write_text_file(path, report_table_to_csv(ids, reports));
}

ReportTable load_report_table(const std::string& path) {
  return report_table_from_csv(csv::read_text_file(path));
}

std::string report_to_json(const MetricReport& report) {
  nlohmann::ordered_json j;
  for (const auto& f : MetricReport::field_names()) {
    const auto v = report.by_name(f);
    if (v)
      j[f] = *v;
    else
      j[f] = nullptr;
  }
  j["leakage_above_one"] = report.leakage_above_one;
  j["unmatched_branches"] = report.unmatched_branches;
  return j.dump(2);
}

}  // namespace airwaycl::metrics
