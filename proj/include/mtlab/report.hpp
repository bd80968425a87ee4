#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace mtlab {

// Bumped whenever columns of an existing experiment change meaning.
constexpr int kSchemaVersion = 1;
constexpr const char* kToolVersion = "0.1.0";

using Cell = std::variant<std::int64_t, double, std::string>;

// Tabular experiment output. Metadata keeps insertion order so that files are
// reproducible byte for byte.
struct ExperimentReport {
    std::string experiment;
    std::vector<std::pair<std::string, std::string>> meta;
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;

    void add_meta(const std::string& key, const std::string& value);
    void add_row(std::vector<Cell> row);
    std::size_t column(const std::string& name) const;
};

enum class OutputFormat { csv, json };
OutputFormat parse_format(const std::string& s);
std::string to_string(OutputFormat f);

// 12 significant digits; non-finite values print as nan, inf, -inf.
std::string format_number(double v);
std::string format_cell(const Cell& c);

// CSV layout:
//   # key=value            (metadata, one per line, schema_version first)
//   col1,col2,...          (single header row)
//   v1,v2,...              (one line per row; fields with , or " are quoted)
void write_report_csv(std::ostream& out, const ExperimentReport& r);
// {"meta": {...}, "rows": [{"col": value, ...}, ...]}; non-finite numbers are null.
void write_report_json(std::ostream& out, const ExperimentReport& r);

// Writes to `path`, or to stdout when the path is empty or "-". Throws IoError.
void emit_report(const ExperimentReport& r, OutputFormat f, const std::string& path);

struct CsvTable {
    std::vector<std::pair<std::string, std::string>> meta;
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;

    std::size_t column(const std::string& name) const;
    const std::string& meta_value(const std::string& key) const;
    double number(std::size_t row, const std::string& name) const;
};

// Parser for the CSV layout above. Throws ConfigError on malformed input.
CsvTable parse_report_csv(std::istream& in);

} // namespace mtlab
