#pragma once

#include <optional>
#include <string>
#include <vector>

namespace rae {

struct SummaryRow {
  std::string metric;
  double value = 0.0;
  std::optional<double> expected;
  std::optional<double> tolerance;
  bool pass = true;
  std::string source;
};

struct CurveFile {
  std::string name;    // file stem, written as <name>.csv
  std::string header;  // comma-separated column names
  std::vector<std::vector<double>> rows;
};

struct ReportBundle {
  std::vector<SummaryRow> rows;
  std::vector<CurveFile> curves;

  bool all_pass() const;
  void add(std::string metric, double value, std::string source = {});
  void add_checked(std::string metric, double value, double expected, double tolerance,
                   std::string source = {});
  void add_flag(std::string metric, bool pass, std::string source = {});
};

// Writes summary.txt (aligned table) plus one CSV per curve into out_dir.
// Output is byte-identical across runs with the same inputs.
void emit(const ReportBundle& bundle, const std::string& out_dir);

// Deterministic shortest round-trip formatting used in all emitted files.
std::string format_number(double x);

}  // namespace rae
