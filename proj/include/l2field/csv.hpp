#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "l2field/kernels.hpp"
#include "l2field/report.hpp"
#include "l2field/sampler.hpp"

namespace l2field {

/// Shortest decimal that round-trips to the same double.
std::string format_double(double x);

using CsvRow = std::vector<std::string>;

/// Header row, then rows in order, "\n" line endings. Fields containing a
/// comma, quote or newline are quoted.
std::string csv_text(const CsvRow& header, std::span<const CsvRow> rows);
void write_text(const std::filesystem::path& path, const std::string& text);
void emit_csv(const std::filesystem::path& path, const CsvRow& header, std::span<const CsvRow> rows);

/// Matrix with header "c0,c1,...".
void emit_csv(const std::filesystem::path& path, const Mat& m);
/// One row per report: check, mode, max_abs_diff, tolerance, pass, verdict, seed.
void emit_csv(const std::filesystem::path& path, std::span<const Report> reports);
/// Header "path,p0,p1,...", one row per path.
void emit_csv(const std::filesystem::path& path, const SamplePaths& paths);

std::string matrix_csv(const Mat& m);
std::string reports_csv(std::span<const Report> reports);
std::string paths_csv(const SamplePaths& paths);

/// Parses CSV text (RFC 4180 quoting). The first row is returned as the header.
struct CsvTable {
  CsvRow header;
  std::vector<CsvRow> rows;
};
CsvTable parse_csv(const std::string& text);
CsvTable read_csv(const std::filesystem::path& path);

}  // namespace l2field
