#include "lpp/report.hpp"

#include <algorithm>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "lpp/version.hpp"
#include <json.hpp>

namespace lpp {

namespace {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::string cell_to_string(const CellValue& v) {
  if (std::holds_alternative<int64_t>(v)) return std::to_string(std::get<int64_t>(v));
  if (std::holds_alternative<double>(v)) return format_double(std::get<double>(v));
  if (std::holds_alternative<bool>(v)) return std::get<bool>(v) ? "true" : "false";
  return csv_escape(std::get<std::string>(v));
}

std::string json_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      case '\r': out += "\\r"; break;
      default:
        if (static_cast<unsigned char>(c) < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof(buf), "\\u%04x", c);
          out += buf;
        } else {
          out += c;
        }
    }
  }
  return out;
}

std::string cell_to_json(const CellValue& v) {
  if (std::holds_alternative<int64_t>(v)) return std::to_string(std::get<int64_t>(v));
  if (std::holds_alternative<double>(v)) {
    const double d = std::get<double>(v);
    if (!std::isfinite(d)) return "null";  // JSON has no inf/nan
    return format_double(d);
  }
  if (std::holds_alternative<bool>(v)) return std::get<bool>(v) ? "true" : "false";
  return "\"" + json_escape(std::get<std::string>(v)) + "\"";
}

std::ofstream open_out(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);  // LF line endings everywhere
  if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
  return out;
}

}  // namespace

OutputFormat parse_format(const std::string& name) {
  if (name == "csv") return OutputFormat::Csv;
  if (name == "jsonl") return OutputFormat::Jsonl;
  throw std::invalid_argument("unknown output format '" + name + "' (expected csv or jsonl)");
}

void ResultTable::add_row(std::vector<CellValue> row) {
  if (row.size() != columns.size())
    throw std::invalid_argument("result row has " + std::to_string(row.size()) +
                                " cells, schema has " + std::to_string(columns.size()));
  rows.push_back(std::move(row));
}

void write_csv(const ResultTable& table, const std::filesystem::path& path) {
  auto out = open_out(path);
  for (size_t c = 0; c < table.columns.size(); ++c) {
    if (c) out << ',';
    out << csv_escape(table.columns[c]);
  }
  out << '\n';
  for (const auto& row : table.rows) {
    for (size_t c = 0; c < row.size(); ++c) {
      if (c) out << ',';
      out << cell_to_string(row[c]);
    }
    out << '\n';
  }
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

void write_jsonl(const ResultTable& table, const std::filesystem::path& path) {
  auto out = open_out(path);
  for (const auto& row : table.rows) {
    out << '{';
    for (size_t c = 0; c < row.size(); ++c) {
      if (c) out << ',';
      out << '"' << json_escape(table.columns[c]) << "\":" << cell_to_json(row[c]);
    }
    out << "}\n";
  }
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

void write_results(const ResultTable& table, OutputFormat format,
                   const std::filesystem::path& path) {
  format == OutputFormat::Csv ? write_csv(table, path) : write_jsonl(table, path);
}

CsvFile read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open for reading: " + path.string());
  CsvFile file;
  std::string line;
  auto split = [](const std::string& l) {
    std::vector<std::string> cells;
    std::string cur;
    bool quoted = false;
    for (size_t i = 0; i < l.size(); ++i) {
      const char c = l[i];
      if (quoted) {
        if (c == '"' && i + 1 < l.size() && l[i + 1] == '"') {
          cur += '"';
          ++i;
        } else if (c == '"') {
          quoted = false;
        } else {
          cur += c;
        }
      } else if (c == '"') {
        quoted = true;
      } else if (c == ',') {
        cells.push_back(std::move(cur));
        cur.clear();
      } else {
        cur += c;
      }
    }
    cells.push_back(std::move(cur));
    return cells;
  };
  bool first = true;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (first) {
      file.header = split(line);
      first = false;
    } else {
      file.rows.push_back(split(line));
    }
  }
  return file;
}

void RunManifest::write(const std::filesystem::path& path) const {
  nlohmann::ordered_json j;
  j["tool"] = "lpp";
  j["version"] = kVersion;
  j["command"] = command;
  j["subcommand"] = subcommand;
  j["base_seed"] = base_seed;
  j["gamma"] = gamma;
  j["distribution"]["kind"] = dist == Dist::Exponential ? "exp" : "geom";
  if (dist == Dist::Geometric) j["distribution"]["q"] = q;
  j["conventions"]["bracket"] = "floor";
  j["conventions"]["origin"] = "omitted";
  j["conventions"]["geometric_pmf"] = "P(X=k) = (1-q) q^k, k >= 0";
  j["conventions"]["weights"] = "splitmix64-lattice-v1, exponential snapped to 2^-32";
  j["budgets"]["cell_soft_cap"] = cell_budget;
  j["workers"] = workers;
  std::string ts = timestamp;
  if (ts.empty()) {
    char buf[32];
    const std::time_t now = std::time(nullptr);
    std::tm tm_utc{};
    gmtime_r(&now, &tm_utc);
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
    ts = buf;
  }
  j["timestamp"] = ts;
  auto out = open_out(path);
  out << j.dump(2) << '\n';
}

ReferenceTable ReferenceTable::load(const std::filesystem::path& path) {
  const CsvFile file = read_csv(path);
  ReferenceTable t;
  auto parse_row = [&](const std::vector<std::string>& row) {
    if (row.size() != 2)
      throw std::invalid_argument("reference table: expected two columns x,F2 in " + path.string());
    t.x.push_back(std::stod(row[0]));
    t.f2.push_back(std::stod(row[1]));
  };
  // Header row is optional; accept a bare numeric table too.
  if (!file.header.empty()) {
    try {
      std::stod(file.header[0]);
      parse_row(file.header);
    } catch (const std::invalid_argument&) {
      // non-numeric first line: treat as header
    }
  }
  for (const auto& row : file.rows) parse_row(row);
  t.validate();
  return t;
}

void ReferenceTable::validate() const {
  if (x.size() < 2) throw std::invalid_argument("reference table needs at least 2 rows");
  if (x.size() != f2.size()) throw std::invalid_argument("reference table: ragged columns");
  for (size_t i = 0; i < x.size(); ++i) {
    if (!std::isfinite(x[i]) || !std::isfinite(f2[i]))
      throw std::invalid_argument("reference table: non-finite entry");
    if (f2[i] < 0.0 || f2[i] > 1.0)
      throw std::invalid_argument("reference table: F2 outside [0,1]");
    if (i > 0 && !(x[i] > x[i - 1]))
      throw std::invalid_argument("reference table: x not strictly increasing");
    if (i > 0 && f2[i] < f2[i - 1])
      throw std::invalid_argument("reference table: F2 not nondecreasing");
  }
}

double ReferenceTable::cdf(double v) const {
  if (v <= x.front()) return v < x.front() ? 0.0 : f2.front();
  if (v >= x.back()) return v > x.back() ? 1.0 : f2.back();
  const auto it = std::upper_bound(x.begin(), x.end(), v);
  const size_t hi = static_cast<size_t>(it - x.begin());
  const size_t lo = hi - 1;
  const double w = (v - x[lo]) / (x[hi] - x[lo]);
  return f2[lo] + w * (f2[hi] - f2[lo]);
}

double ReferenceTable::inverse(double u) const {
  if (u <= f2.front()) return x.front();
  if (u >= f2.back()) return x.back();
  const auto it = std::upper_bound(f2.begin(), f2.end(), u);
  const size_t hi = static_cast<size_t>(it - f2.begin());
  const size_t lo = hi - 1;
  const double df = f2[hi] - f2[lo];
  if (df <= 0.0) return x[lo];
  return x[lo] + (u - f2[lo]) / df * (x[hi] - x[lo]);
}

ReferenceComparison compare_to_reference(std::vector<double> samples, const ReferenceTable& table) {
  if (samples.size() < 100)
    throw std::invalid_argument("compare_to_reference: need >= 100 samples, got " +
                                std::to_string(samples.size()));
  table.validate();
  std::sort(samples.begin(), samples.end());
  ReferenceComparison out;
  out.samples = samples.size();
  out.range_covered = samples.front() >= table.x.front() && samples.back() <= table.x.back();
  const double n = static_cast<double>(samples.size());
  double d = 0.0;
  out.plot_rows.columns = {"x", "empirical", "reference"};
  for (size_t i = 0; i < samples.size(); ++i) {
    const double f = table.cdf(samples[i]);
    d = std::max(d, std::abs(f - static_cast<double>(i) / n));
    d = std::max(d, std::abs(static_cast<double>(i + 1) / n - f));
    out.plot_rows.add_row({samples[i], static_cast<double>(i + 1) / n, f});
  }
  out.ks = d;
  return out;
}

}  // namespace lpp
