#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace airwaycl::csv {

/// Shortest round-trip decimal form (std::to_chars), so CSV round-trips are
/// value-exact and byte-deterministic.
std::string format_double(double v);

/// Fixed two-decimal form used for Table-style percentage columns.
std::string format_fixed2(double v);

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  int column(const std::string& name) const;       // -1 when absent
  int require_column(const std::string& name) const;  // throws when absent
};

/// Minimal CSV: comma separators, no quoting (cell text must not contain
/// commas or newlines; enforced on write).
Table parse(const std::string& text);
std::string serialize(const Table& table);

Table load(const std::string& path);
void save(const Table& table, const std::string& path);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

double parse_double(const std::string& cell);

}  // namespace airwaycl::csv
