#include "pberg/report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include "pberg/error.hpp"

namespace pberg {

void ReportTable::add(std::vector<Cell> values, std::string provenance, std::optional<bool> pass) {
  require(values.size() == columns.size(), ErrorCode::Parameter,
          experiment + ": row has " + std::to_string(values.size()) + " values for " +
              std::to_string(columns.size()) + " columns");
  rows.push_back({std::move(values), std::move(provenance), pass});
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  // The C locale is never changed, so the decimal point is '.'.
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string format_cell(const Cell& c) {
  struct V {
    std::string operator()(std::monostate) const { return ""; }
    std::string operator()(bool b) const { return b ? "true" : "false"; }
    std::string operator()(long long i) const { return std::to_string(i); }
    std::string operator()(double d) const { return format_double(d); }
    std::string operator()(const std::string& s) const { return s; }
  };
  return std::visit(V{}, c);
}

std::string csv_field(std::string_view s) {
  if (s.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + '"';
}

namespace {

std::string pass_text(const std::optional<bool>& p) {
  return p ? (*p ? "pass" : "fail") : "";
}

nlohmann::json cell_json(const Cell& c) {
  struct V {
    nlohmann::json operator()(std::monostate) const { return nullptr; }
    nlohmann::json operator()(bool b) const { return b; }
    nlohmann::json operator()(long long i) const { return i; }
    nlohmann::json operator()(double d) const {
      if (std::isfinite(d)) return d;
      return format_double(d);
    }
    nlohmann::json operator()(const std::string& s) const { return s; }
  };
  return std::visit(V{}, c);
}

}  // namespace

std::string to_csv(const ReportTable& table) {
  std::string out;
  auto line = [&out](const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
      if (i) out += ',';
      out += csv_field(fields[i]);
    }
    out += "\r\n";
  };
  std::vector<std::string> head = table.columns;
  for (const char* c : {"experiment", "provenance", "pass", "config_hash"}) head.emplace_back(c);
  line(head);
  for (const ReportRow& r : table.rows) {
    std::vector<std::string> f;
    for (const Cell& c : r.values) f.push_back(format_cell(c));
    f.push_back(table.experiment);
    f.push_back(r.provenance);
    f.push_back(pass_text(r.pass));
    f.push_back(table.config_hash);
    line(f);
  }
  return out;
}

nlohmann::json rows_json(const ReportTable& table) {
  nlohmann::json rows = nlohmann::json::array();
  for (const ReportRow& r : table.rows) {
    nlohmann::json o = nlohmann::json::object();
    for (std::size_t i = 0; i < table.columns.size(); ++i) o[table.columns[i]] = cell_json(r.values[i]);
    o["provenance"] = r.provenance;
    if (r.pass) o["pass"] = *r.pass;
    rows.push_back(std::move(o));
  }
  return rows;
}

std::string dump_json(const nlohmann::json& j) {
  // nlohmann::json objects are std::map backed, so keys come out sorted.
  return j.dump(2) + "\n";
}

std::uint64_t fnv1a64(std::string_view data) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

void write_text(const std::filesystem::path& path, std::string_view content) {
  std::error_code ec;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
  require(!ec, ErrorCode::Io, "cannot create directory " + path.parent_path().string() + ": " + ec.message());
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  require(static_cast<bool>(f), ErrorCode::Io, "cannot open " + path.string() + " for writing");
  f.write(content.data(), static_cast<std::streamsize>(content.size()));
  f.close();
  require(!f.fail(), ErrorCode::Io, "write failed for " + path.string());
}

}  // namespace pberg
