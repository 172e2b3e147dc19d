#include "airwaycl/scoring.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

#include "airwaycl/csv.hpp"

namespace airwaycl::scoring {

double bootstrap_score(double iou) {
  if (!(iou >= 0.0 && iou <= 1.0))
    throw std::invalid_argument("bootstrap_score: iou must be in [0, 1]");
  return 1.0 - iou;
}

namespace {

/// Cyclic Jacobi eigendecomposition of a symmetric matrix. Returns
/// eigenvalues and column eigenvectors (vectors[k] is the k-th eigenvector).
struct EigenResult {
  std::vector<double> values;
  std::vector<std::vector<double>> vectors;
};

EigenResult jacobi_eigen(std::vector<std::vector<double>> a) {
  const std::size_t n = a.size();
  std::vector<std::vector<double>> v(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) v[i][i] = 1.0;

  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) off += a[p][q] * a[p][q];
    if (off < 1e-30) break;

    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) {
        if (std::fabs(a[p][q]) < 1e-300) continue;
        const double theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
        const double t = (theta >= 0 ? 1.0 : -1.0) /
                         (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a[k][p], akq = a[k][q];
          a[k][p] = c * akp - s * akq;
          a[k][q] = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a[p][k], aqk = a[q][k];
          a[p][k] = c * apk - s * aqk;
          a[q][k] = s * apk + c * aqk;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double vkp = v[k][p], vkq = v[k][q];
          v[k][p] = c * vkp - s * vkq;
          v[k][q] = s * vkp + c * vkq;
        }
      }
  }

  EigenResult r;
  r.values.resize(n);
  r.vectors.assign(n, std::vector<double>(n));
  for (std::size_t k = 0; k < n; ++k) {
    r.values[k] = a[k][k];
    for (std::size_t i = 0; i < n; ++i) r.vectors[k][i] = v[i][k];
  }
  return r;
}

}  // namespace

int default_orientation(const std::string& metric_name) {
  static const std::set<std::string> lower_is_better{
      "fpr", "fnr", "volume_leakage", "centerline_leakage", "centerline_distance_mm",
      "airway_size_mse_mm2"};
  return lower_is_better.count(metric_name) ? -1 : +1;
}

CompositeTargetModel fit_composite_target(const std::vector<std::vector<double>>& metric_matrix,
                                          const std::vector<std::string>& metric_names,
                                          const std::vector<int>& orientation) {
  const std::size_t n = metric_matrix.size();
  if (n < 2) throw std::invalid_argument("fit_composite_target: need at least 2 rows");
  const std::size_t m = metric_names.size();
  if (orientation.size() != m)
    throw std::invalid_argument("fit_composite_target: orientation size mismatch");
  for (const auto& row : metric_matrix) {
    if (row.size() != m) throw std::invalid_argument("fit_composite_target: ragged matrix");
    for (const double v : row)
      if (!std::isfinite(v))
        throw std::invalid_argument("fit_composite_target: non-finite entry");
  }

  CompositeTargetModel model;
  model.metric_names = metric_names;
  model.orientation = orientation;
  model.means.assign(m, 0.0);
  model.stdevs.assign(m, 1.0);
  model.weights.assign(m, 0.0);

  // orient, then standardize with the sample standard deviation
  std::vector<std::vector<double>> z(n, std::vector<double>(m));
  std::vector<bool> retained(m, false);
  std::vector<std::size_t> kept;
  for (std::size_t j = 0; j < m; ++j) {
    double mean = 0.0;
    for (std::size_t i = 0; i < n; ++i) mean += orientation[j] * metric_matrix[i][j];
    mean /= double(n);
    double ss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double d = orientation[j] * metric_matrix[i][j] - mean;
      ss += d * d;
    }
    const double sd = std::sqrt(ss / double(n - 1));
    model.means[j] = mean;
    const double scale = std::max(std::fabs(mean), 1.0);
    if (sd > 1e-12 * scale) {
      retained[j] = true;
      model.stdevs[j] = sd;
      kept.push_back(j);
      for (std::size_t i = 0; i < n; ++i)
        z[i][j] = (orientation[j] * metric_matrix[i][j] - mean) / sd;
    }
  }
  if (kept.empty())
    throw std::invalid_argument("fit_composite_target: all metric columns are constant");

  // correlation matrix of the retained columns
  const std::size_t r = kept.size();
  std::vector<std::vector<double>> corr(r, std::vector<double>(r, 0.0));
  for (std::size_t a = 0; a < r; ++a)
    for (std::size_t b = a; b < r; ++b) {
      double s = 0.0;
      for (std::size_t i = 0; i < n; ++i) s += z[i][kept[a]] * z[i][kept[b]];
      corr[a][b] = corr[b][a] = s / double(n - 1);
    }

  const EigenResult eig = jacobi_eigen(corr);
  std::size_t top = 0;
  for (std::size_t k = 1; k < r; ++k)
    if (eig.values[k] > eig.values[top]) top = k;

  double sum_abs = 0.0;
  for (std::size_t a = 0; a < r; ++a) sum_abs += std::fabs(eig.vectors[top][a]);
  if (sum_abs <= 0.0)
    throw std::invalid_argument("fit_composite_target: degenerate principal component");
  for (std::size_t a = 0; a < r; ++a)
    model.weights[kept[a]] = std::fabs(eig.vectors[top][a]) / sum_abs;

  return model;
}

double composite_quality(const CompositeTargetModel& model, const std::vector<double>& row) {
  if (row.size() != model.metric_names.size())
    throw std::invalid_argument("composite_quality: row size mismatch");
  double q = 0.0;
  for (std::size_t j = 0; j < row.size(); ++j) {
    if (model.weights[j] == 0.0) continue;
    const double zj = (model.orientation[j] * row[j] - model.means[j]) / model.stdevs[j];
    q += model.weights[j] * zj;
  }
  return q;
}

std::optional<double> composite_score(const CompositeTargetModel& model,
                                      const metrics::MetricReport& report) {
  std::vector<double> row(model.metric_names.size());
  for (std::size_t j = 0; j < model.metric_names.size(); ++j) {
    const auto v = report.by_name(model.metric_names[j]);  // throws on unknown names
    if (!v) return std::nullopt;
    row[j] = *v;
  }
  return -composite_quality(model, row);
}

ScoreTable rank(const std::vector<std::pair<std::string, double>>& scores) {
  std::set<std::string> seen;
  for (const auto& [id, s] : scores) {
    if (!seen.insert(id).second) throw std::invalid_argument("rank: duplicate id '" + id + "'");
    if (!std::isfinite(s))
      throw std::invalid_argument("rank: non-finite score for id '" + id + "'");
  }
  ScoreTable t;
  for (const auto& [id, s] : scores) t.rows.push_back({id, s, 0});
  std::sort(t.rows.begin(), t.rows.end(), [](const ScoreRow& a, const ScoreRow& b) {
    if (a.score != b.score) return a.score < b.score;
    return a.id < b.id;
  });
  for (std::size_t i = 0; i < t.rows.size(); ++i) t.rows[i].rank = int(i + 1);
  return t;
}

std::string score_table_to_csv(const ScoreTable& table) {
  csv::Table out;
  out.header = {"id", "score", "rank"};
  for (const auto& r : table.rows)
    out.rows.push_back({r.id, csv::format_double(r.score), std::to_string(r.rank)});
  return csv::serialize(out);
}

ScoreTable score_table_from_csv(const std::string& text) {
  const csv::Table in = csv::parse(text);
  const int idc = in.require_column("id");
  const int sc = in.require_column("score");
  std::vector<std::pair<std::string, double>> pairs;
  for (const auto& row : in.rows)
    pairs.emplace_back(row[std::size_t(idc)], csv::parse_double(row[std::size_t(sc)]));
  return rank(pairs);  // re-rank so loaded tables always satisfy the invariants
}

void save_score_table(const ScoreTable& table, const std::string& path) {
  csv::write_text_file(path, score_table_to_csv(table));
}

ScoreTable load_score_table(const std::string& path) {
  return score_table_from_csv(csv::read_text_file(path));
}

ScoreHistogram score_histogram(const ScoreTable& table, int bins) {
  if (bins < 1) throw std::invalid_argument("score_histogram: bins must be >= 1");
  if (table.rows.empty()) throw std::invalid_argument("score_histogram: empty table");
  ScoreHistogram h;
  h.lo = table.rows.front().score;
  h.hi = h.lo;
  for (const auto& r : table.rows) {
    h.lo = std::min(h.lo, r.score);
    h.hi = std::max(h.hi, r.score);
  }
  h.counts.assign(std::size_t(bins), 0);
  const double width = (h.hi - h.lo) / double(bins);
  for (const auto& r : table.rows) {
    int b = width > 0.0 ? int((r.score - h.lo) / width) : 0;
    b = std::min(b, bins - 1);  // rightmost bin inclusive
    ++h.counts[std::size_t(std::max(b, 0))];
  }
  double mean = 0.0;
  for (const auto& r : table.rows) mean += r.score;
  mean /= double(table.rows.size());
  double ss = 0.0;
  for (const auto& r : table.rows) ss += (r.score - mean) * (r.score - mean);
  h.mean = mean;
  h.stdev = std::sqrt(ss / double(table.rows.size()));
  return h;
}

std::string histogram_to_csv(const ScoreHistogram& h) {
  csv::Table out;
  out.header = {"bin_lo", "bin_hi", "count"};
  const int bins = int(h.counts.size());
  const double width = (h.hi - h.lo) / double(bins);
  for (int b = 0; b < bins; ++b) {
    out.rows.push_back({csv::format_double(h.lo + b * width),
                        csv::format_double(b + 1 == bins ? h.hi : h.lo + (b + 1) * width),
                        std::to_string(h.counts[std::size_t(b)])});
  }
  return csv::serialize(out);
}

}  // namespace airwaycl::scoring
