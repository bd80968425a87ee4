#include "mtlab/report.hpp"

#include "mtlab/error.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

namespace mtlab {

void ExperimentReport::add_meta(const std::string& key, const std::string& value) {
    if (key.find_first_of("=\n") != std::string::npos || value.find('\n') != std::string::npos) {
        throw std::invalid_argument("metadata entries must be single-line key=value pairs: " + key);
    }
    meta.emplace_back(key, value);
}

void ExperimentReport::add_row(std::vector<Cell> row) {
    if (row.size() != columns.size()) {
        throw std::invalid_argument("row has " + std::to_string(row.size()) + " cells, expected " +
                                    std::to_string(columns.size()));
    }
    rows.push_back(std::move(row));
}

std::size_t ExperimentReport::column(const std::string& name) const {
    for (std::size_t i = 0; i < columns.size(); ++i)
        if (columns[i] == name) return i;
    throw std::out_of_range("no column '" + name + "'");
}

OutputFormat parse_format(const std::string& s) {
    if (s == "csv") return OutputFormat::csv;
    if (s == "json") return OutputFormat::json;
    throw ConfigError("unknown output format '" + s + "' (expected csv or json)");
}

std::string to_string(OutputFormat f) { return f == OutputFormat::csv ? "csv" : "json"; }

std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    if (v == 0.0) return "0"; // folds -0
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

std::string format_cell(const Cell& c) {
    if (const auto* i = std::get_if<std::int64_t>(&c)) return std::to_string(*i);
    if (const auto* d = std::get_if<double>(&c)) return format_number(*d);
    return std::get<std::string>(c);
}

namespace {

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char ch : s) {
        if (ch == '"') out += '"';
        out += ch;
    }
    return out + "\"";
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char ch = line[i];
        if (quoted) {
            if (ch == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cur += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                cur += ch;
            }
        } else if (ch == '"') {
            quoted = true;
        } else if (ch == ',') {
            fields.push_back(std::move(cur));
            cur.clear();
        } else {
            cur += ch;
        }
    }
    if (quoted) throw ConfigError("unterminated quote in CSV line: " + line);
    fields.push_back(std::move(cur));
    return fields;
}

} // namespace

void write_report_csv(std::ostream& out, const ExperimentReport& r) {
    for (const auto& [k, v] : r.meta) out << "# " << k << '=' << v << '\n';
    for (std::size_t i = 0; i < r.columns.size(); ++i) out << (i ? "," : "") << csv_field(r.columns[i]);
    out << '\n';
    for (const auto& row : r.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << csv_field(format_cell(row[i]));
        out << '\n';
    }
}

void write_report_json(std::ostream& out, const ExperimentReport& r) {
    using json = nlohmann::ordered_json;
    json doc;
    json meta = json::object();
    for (const auto& [k, v] : r.meta) meta[k] = v;
    doc["meta"] = meta;
    json rows = json::array();
    for (const auto& row : r.rows) {
        json obj = json::object();
        for (std::size_t i = 0; i < row.size(); ++i) {
            const Cell& c = row[i];
            if (const auto* n = std::get_if<std::int64_t>(&c)) {
                obj[r.columns[i]] = *n;
            } else if (const auto* d = std::get_if<double>(&c)) {
                // Round through the 12-digit text so CSV and JSON agree.
                if (std::isfinite(*d)) obj[r.columns[i]] = std::stod(format_number(*d));
                else obj[r.columns[i]] = nullptr;
            } else {
                obj[r.columns[i]] = std::get<std::string>(c);
            }
        }
        rows.push_back(std::move(obj));
    }
    doc["rows"] = std::move(rows);
    out << doc.dump(2) << '\n';
}

void emit_report(const ExperimentReport& r, OutputFormat f, const std::string& path) {
    auto write = [&](std::ostream& os) {
        if (f == OutputFormat::csv) write_report_csv(os, r);
        else write_report_json(os, r);
    };
    if (path.empty() || path == "-") {
        write(std::cout);
        std::cout.flush();
        if (!std::cout) throw IoError("failed writing to stdout");
        return;
    }
    // Render fully before touching the file so a failure never leaves a partial report.
    std::ostringstream buffer;
    write(buffer);
    std::ofstream file(path, std::ios::binary | std::ios::trunc);
    if (!file) throw IoError("cannot open '" + path + "' for writing");
    file << buffer.str();
    file.close();
    if (!file) throw IoError("failed writing '" + path + "'");
}

std::size_t CsvTable::column(const std::string& name) const {
    for (std::size_t i = 0; i < columns.size(); ++i)
        if (columns[i] == name) return i;
    throw ConfigError("CSV has no column '" + name + "'");
}

const std::string& CsvTable::meta_value(const std::string& key) const {
    for (const auto& [k, v] : meta)
        if (k == key) return v;
    throw ConfigError("CSV has no metadata key '" + key + "'");
}

double CsvTable::number(std::size_t row, const std::string& name) const {
    const std::string& text = rows.at(row).at(column(name));
    if (text == "nan") return std::nan("");
    if (text == "inf") return HUGE_VAL;
    if (text == "-inf") return -HUGE_VAL;
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(text, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used == 0 || used != text.size()) throw ConfigError("non-numeric CSV field '" + text + "' in " + name);
    return v;
}

CsvTable parse_report_csv(std::istream& in) {
    CsvTable t;
    std::string line;
    bool header = false;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (!header && line.rfind("# ", 0) == 0) {
            const auto eq = line.find('=');
            if (eq == std::string::npos) throw ConfigError("malformed metadata line: " + line);
            t.meta.emplace_back(line.substr(2, eq - 2), line.substr(eq + 1));
            continue;
        }
        if (!header) {
            t.columns = split_csv_line(line);
            header = true;
            continue;
        }
        if (line.empty()) continue;
        auto fields = split_csv_line(line);
        if (fields.size() != t.columns.size()) {
            throw ConfigError("CSV row has " + std::to_string(fields.size()) + " fields, header has " +
                              std::to_string(t.columns.size()));
        }
        t.rows.push_back(std::move(fields));
    }
    if (!header) throw ConfigError("CSV has no header row");
    return t;
}

} // namespace mtlab
