#include "rae/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "rae/common.hpp"

namespace rae {

bool ReportBundle::all_pass() const {
  return std::all_of(rows.begin(), rows.end(), [](const SummaryRow& r) { return r.pass; });
}

void ReportBundle::add(std::string metric, double value, std::string source) {
  rows.push_back({std::move(metric), value, std::nullopt, std::nullopt, true,
                  std::move(source)});
}

void ReportBundle::add_checked(std::string metric, double value, double expected,
                               double tolerance, std::string source) {
  bool ok = std::fabs(value - expected) <= tolerance;
  rows.push_back({std::move(metric), value, expected, tolerance, ok, std::move(source)});
}

void ReportBundle::add_flag(std::string metric, bool pass, std::string source) {
  rows.push_back({std::move(metric), pass ? 1.0 : 0.0, std::nullopt, std::nullopt, pass,
                  std::move(source)});
}

std::string format_number(double x) {
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", x);
  return buf;
}

void emit(const ReportBundle& bundle, const std::string& out_dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw input_error("cannot create output directory " + out_dir + ": " + ec.message());

  // Column widths for the aligned summary table.
  std::size_t w_metric = 6, w_value = 5, w_expected = 8, w_source = 6;
  std::vector<std::array<std::string, 5>> cells;
  for (const SummaryRow& r : bundle.rows) {
    std::string value = format_number(r.value);
    std::string expected = r.expected ? format_number(*r.expected) : "-";
    if (r.tolerance) expected += " +/- " + format_number(*r.tolerance);
    cells.push_back({r.metric, value, expected, r.pass ? "pass" : "FAIL", r.source});
    w_metric = std::max(w_metric, r.metric.size());
    w_value = std::max(w_value, value.size());
    w_expected = std::max(w_expected, expected.size());
    w_source = std::max(w_source, r.source.size());
  }

  std::ofstream out(fs::path(out_dir) / "summary.txt");
  if (!out) throw input_error("cannot write summary.txt in " + out_dir);
  auto pad = [](const std::string& s, std::size_t w) {
    return s + std::string(w > s.size() ? w - s.size() : 0, ' ');
  };
  out << pad("metric", w_metric) << "  " << pad("value", w_value) << "  "
      << pad("expected", w_expected) << "  " << "status" << "  " << "source" << "\n";
  for (const auto& c : cells)
    out << pad(c[0], w_metric) << "  " << pad(c[1], w_value) << "  "
        << pad(c[2], w_expected) << "  " << pad(c[3], 6) << "  " << c[4] << "\n";
  out.close();

  for (const CurveFile& curve : bundle.curves) {
    std::ofstream csv(fs::path(out_dir) / (curve.name + ".csv"));
    if (!csv) throw input_error("cannot write " + curve.name + ".csv in " + out_dir);
    csv << curve.header << "\n";
    for (const auto& row : curve.rows) {
      for (std::size_t j = 0; j < row.size(); ++j)
        csv << (j ? "," : "") << format_number(row[j]);
      csv << "\n";
    }
  }
}

}  // namespace rae
