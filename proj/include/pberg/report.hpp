#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <json.hpp>

namespace pberg {

using Cell = std::variant<std::monostate, bool, long long, double, std::string>;

/// One output row: values for the table columns plus provenance
/// ("solver", "oracle" or "fit") and an optional pass flag.
struct ReportRow {
  std::vector<Cell> values;
  std::string provenance;
  std::optional<bool> pass;
};

/// Rows of one experiment. CSV columns are the value columns followed by
/// experiment, provenance, pass and config_hash.
struct ReportTable {
  std::string experiment;
  std::vector<std::string> columns;
  std::vector<ReportRow> rows;
  std::string config_hash;

  void add(std::vector<Cell> values, std::string provenance, std::optional<bool> pass = std::nullopt);
};

/// 17 significant digits, '.' decimal; nan and +-inf spelled out.
std::string format_double(double v);
std::string format_cell(const Cell& c);
/// Quotes fields containing a comma, quote or line break; quotes are doubled.
std::string csv_field(std::string_view s);

std::string to_csv(const ReportTable& table);
/// Array of row objects keyed by column name.
nlohmann::json rows_json(const ReportTable& table);
/// Sorted keys, two-space indent, trailing newline.
std::string dump_json(const nlohmann::json& j);

std::uint64_t fnv1a64(std::string_view data);
std::string hex64(std::uint64_t h);

/// Writes the whole file, creating parent directories. Throws Io with the path.
void write_text(const std::filesystem::path& path, std::string_view content);

}  // namespace pberg
