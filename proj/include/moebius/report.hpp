#pragma once

// Tabular output for the command-line tool: CSV and JSON encodings of one
// table plus its run manifest, written atomically.
//
// Numbers are printed in the shortest form that parses back to the same
// double, so CSV and JSON of one run carry identical values and reruns are
// byte-identical.

#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <system_error>
#include <variant>
#include <vector>

#include <json.hpp>

#include "moebius/error.hpp"

namespace moebius {

using Cell = std::variant<std::monostate, long long, double, std::string>;

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;

  void add(std::vector<Cell> row) {
    if (row.size() != columns.size())
      throw input_error("table row has " + std::to_string(row.size()) + " cells for " +
                        std::to_string(columns.size()) + " columns");
    rows.push_back(std::move(row));
  }
};

enum class Format { csv, json };

/// Shortest round-trip decimal form of x; non-finite values have no encoding.
inline std::string format_number(double x) {
  if (!std::isfinite(x)) throw numerical_error("non-finite value in output table");
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, r.ptr);
}

/// Run manifest: command, parameters in insertion order, tool version, timestamp.
struct Manifest {
  std::string command;
  nlohmann::ordered_json parameters = nlohmann::ordered_json::object();
  std::string version;
  std::string timestamp;

  nlohmann::ordered_json to_json() const {
    nlohmann::ordered_json j;
    j["command"] = command;
    j["parameters"] = parameters;
    j["version"] = version;
    j["timestamp"] = timestamp;
    return j;
  }
};

/// UTC time in ISO 8601. SOURCE_DATE_EPOCH, when set, replaces the clock so
/// that reruns can be compared byte for byte.
inline std::string run_timestamp() {
  std::time_t now = std::time(nullptr);
  if (const char* env = std::getenv("SOURCE_DATE_EPOCH"); env && *env) {
    char* end = nullptr;
    const long long v = std::strtoll(env, &end, 10);
    if (*end != '\0' || v < 0) throw input_error(std::string("SOURCE_DATE_EPOCH is not a non-negative integer: ") + env);
    now = static_cast<std::time_t>(v);
  }
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

namespace detail {

inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

inline std::string cell_text(const Cell& c) {
  if (std::holds_alternative<long long>(c)) return std::to_string(std::get<long long>(c));
  if (std::holds_alternative<double>(c)) return format_number(std::get<double>(c));
  if (std::holds_alternative<std::string>(c)) return csv_field(std::get<std::string>(c));
  return "";
}

// The JSON text is assembled by hand for numbers so that they use exactly the
// CSV spelling; everything else goes through the JSON library for escaping.
inline std::string cell_json(const Cell& c) {
  if (std::holds_alternative<long long>(c)) return std::to_string(std::get<long long>(c));
  if (std::holds_alternative<double>(c)) return format_number(std::get<double>(c));
  if (std::holds_alternative<std::string>(c)) return nlohmann::json(std::get<std::string>(c)).dump();
  return "null";
}

}  // namespace detail

inline std::string to_csv(const Table& t) {
  std::string out;
  for (std::size_t i = 0; i < t.columns.size(); ++i) out += (i ? "," : "") + detail::csv_field(t.columns[i]);
  out += '\n';
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out += (i ? "," : "") + detail::cell_text(row[i]);
    out += '\n';
  }
  return out;
}

/// {"manifest": {...}, "rows": [{column: value, ...}, ...]}, one row per line.
inline std::string to_json(const Table& t, const Manifest& m) {
  std::string out = "{\"manifest\":" + m.to_json().dump() + ",\"rows\":[";
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    out += r ? ",\n{" : "\n{";
    for (std::size_t i = 0; i < t.columns.size(); ++i)
      out += (i ? "," : "") + nlohmann::json(t.columns[i]).dump() + ":" + detail::cell_json(t.rows[r][i]);
    out += "}";
  }
  return out + "\n]}\n";
}

/// Writes `content` to `path` via a temporary file in the same directory and a rename.
inline void write_atomically(const std::filesystem::path& path, const std::string& content) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw input_error("cannot open " + tmp.string() + " for writing");
    f.write(content.data(), static_cast<std::streamsize>(content.size()));
    f.close();
    if (!f) {
      std::error_code ec;
      std::filesystem::remove(tmp, ec);
      throw input_error("failed writing " + tmp.string());
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw input_error("cannot move output into place at " + path.string());
  }
}

/// Emits a table. JSON embeds the manifest; CSV written to a file gets a
/// `<path>.manifest.json` sidecar. An empty path means standard output.
inline void emit(const Table& t, const Manifest& m, Format format, const std::string& path) {
  const std::string body = format == Format::csv ? to_csv(t) : to_json(t, m);
  if (path.empty()) {
    std::cout << body << std::flush;
    return;
  }
  if (format == Format::csv) write_atomically(path + ".manifest.json", m.to_json().dump(2) + "\n");
  write_atomically(path, body);
}

}  // namespace moebius
