#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <variant>
#include <vector>

#include "lpp/weights.hpp"

namespace lpp {

using CellValue = std::variant<int64_t, double, std::string, bool>;

enum class OutputFormat { Csv, Jsonl };

OutputFormat parse_format(const std::string& name);  // "csv" | "jsonl"

// Tabular results with a fixed schema. Doubles are serialized with 17
// significant digits so a read-back is bit-exact.
struct ResultTable {
  std::vector<std::string> columns;
  std::vector<std::vector<CellValue>> rows;

  void add_row(std::vector<CellValue> row);
};

void write_csv(const ResultTable& table, const std::filesystem::path& path);
void write_jsonl(const ResultTable& table, const std::filesystem::path& path);
void write_results(const ResultTable& table, OutputFormat format,
                   const std::filesystem::path& path);

// Raw CSV reader (header + string cells); used for round-trip checks and
// reference tables.
struct CsvFile {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};
CsvFile read_csv(const std::filesystem::path& path);

// Everything needed to reproduce a run byte-for-byte with the same binary.
struct RunManifest {
  std::string command;                 // argv joined
  std::string subcommand;
  uint64_t base_seed = 0;
  double gamma = 1.0;
  Dist dist = Dist::Exponential;
  double q = 0.5;
  uint64_t cell_budget = 0;
  int workers = 0;
  std::string timestamp;               // ISO-8601 UTC, filled at write time

  void write(const std::filesystem::path& path) const;
};

// Externally supplied CDF table (two-column CSV x,F2), strictly increasing
// in x with values in [0,1] nondecreasing. Never bundled: user input only.
struct ReferenceTable {
  std::vector<double> x;
  std::vector<double> f2;

  static ReferenceTable load(const std::filesystem::path& path);
  void validate() const;

  // Linear interpolation between knots; clamps to 0/1 outside the table.
  double cdf(double v) const;
  double inverse(double u) const;  // piecewise-linear inverse, for sampling
};

struct ReferenceComparison {
  double ks = 0.0;
  uint64_t samples = 0;
  bool range_covered = true;  // false: sample range leaves the table, CDF clamped
  ResultTable plot_rows;      // columns: x, empirical, reference
};

ReferenceComparison compare_to_reference(std::vector<double> samples, const ReferenceTable& table);

}  // namespace lpp
