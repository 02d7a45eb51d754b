#include "l2field/csv.hpp"

#include <array>
#include <charconv>
#include <fstream>
#include <sstream>

#include "l2field/errors.hpp"

namespace l2field {

std::string format_double(double x) {
  std::array<char, 64> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), x);
  return std::string(buf.data(), res.ptr);
}

namespace {

std::string quote_field(const std::string& f) {
  if (f.find_first_of(",\"\n\r") == std::string::npos) return f;
  std::string out = "\"";
  for (char c : f) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

void append_row(std::string& out, const CsvRow& row) {
  for (std::size_t i = 0; i < row.size(); ++i) {
    if (i) out += ',';
    out += quote_field(row[i]);
  }
  out += '\n';
}

}  // namespace

std::string csv_text(const CsvRow& header, std::span<const CsvRow> rows) {
  std::string out;
  append_row(out, header);
  for (const auto& r : rows) append_row(out, r);
  return out;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot open " + path.string() + " for writing");
  f.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!f) throw IoError("write failed: " + path.string());
}

void emit_csv(const std::filesystem::path& path, const CsvRow& header, std::span<const CsvRow> rows) {
  write_text(path, csv_text(header, rows));
}

std::string matrix_csv(const Mat& m) {
  CsvRow header;
  for (Eigen::Index j = 0; j < m.cols(); ++j) header.push_back("c" + std::to_string(j));
  std::vector<CsvRow> rows;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    CsvRow r;
    for (Eigen::Index j = 0; j < m.cols(); ++j) r.push_back(format_double(m(i, j)));
    rows.push_back(std::move(r));
  }
  return csv_text(header, rows);
}

std::string reports_csv(std::span<const Report> reports) {
  const CsvRow header{"check", "mode", "max_abs_diff", "tolerance", "pass", "verdict", "seed"};
  std::vector<CsvRow> rows;
  for (const auto& r : reports) {
    rows.push_back({r.check, r.mode, format_double(r.max_abs_diff), format_double(r.tolerance),
                    r.pass ? "true" : "false", r.verdict.empty() ? (r.pass ? "pass" : "fail") : r.verdict,
                    r.seed ? std::to_string(*r.seed) : ""});
  }
  return csv_text(header, rows);
}

std::string paths_csv(const SamplePaths& paths) {
  CsvRow header{"path"};
  for (Eigen::Index j = 0; j < paths.values.cols(); ++j) header.push_back("p" + std::to_string(j));
  std::vector<CsvRow> rows;
  for (Eigen::Index i = 0; i < paths.values.rows(); ++i) {
    CsvRow r{std::to_string(i)};
    for (Eigen::Index j = 0; j < paths.values.cols(); ++j) r.push_back(format_double(paths.values(i, j)));
    rows.push_back(std::move(r));
  }
  return csv_text(header, rows);
}

void emit_csv(const std::filesystem::path& path, const Mat& m) { write_text(path, matrix_csv(m)); }
void emit_csv(const std::filesystem::path& path, std::span<const Report> reports) {
  write_text(path, reports_csv(reports));
}
void emit_csv(const std::filesystem::path& path, const SamplePaths& paths) {
  write_text(path, paths_csv(paths));
}

CsvTable parse_csv(const std::string& text) {
  std::vector<CsvRow> rows;
  CsvRow row;
  std::string field;
  bool quoted = false;
  bool any = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field += c;
      }
      continue;
    }
    if (c == '"') {
      quoted = true;
      any = true;
    } else if (c == ',') {
      row.push_back(std::move(field));
      field.clear();
      any = true;
    } else if (c == '\n' || c == '\r') {
      if (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n') ++i;
      if (any || !field.empty()) {
        row.push_back(std::move(field));
        rows.push_back(std::move(row));
      }
      row.clear();
      field.clear();
      any = false;
    } else {
      field += c;
      any = true;
    }
  }
  if (quoted) throw ArgumentError("csv: unterminated quoted field");
  if (any || !field.empty()) {
    row.push_back(std::move(field));
    rows.push_back(std::move(row));
  }
  CsvTable t;
  if (rows.empty()) return t;
  t.header = std::move(rows.front());
  t.rows.assign(std::make_move_iterator(rows.begin() + 1), std::make_move_iterator(rows.end()));
  return t;
}

CsvTable read_csv(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << f.rdbuf();
  return parse_csv(ss.str());
}

}  // namespace l2field
