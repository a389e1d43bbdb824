#include "rislink/result_table.hpp"

#include <charconv>
#include <fstream>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "rislink/error.hpp"
#include "rislink/scenario.hpp"

namespace rislink {

ResultTable::ResultTable(std::string name, std::vector<std::string> columns)
    : name_(std::move(name)), columns_(std::move(columns)) {
    detail::require(!columns_.empty(), "result table needs at least one column");
}

void ResultTable::add_row(std::vector<Cell> row) {
    if (row.size() != columns_.size()) {
        throw DomainError("table " + name_ + ": row has " + std::to_string(row.size()) + " cells, expected " +
                          std::to_string(columns_.size()));
    }
    rows_.push_back(std::move(row));
}

std::size_t ResultTable::column_index(const std::string& column) const {
    for (std::size_t i = 0; i < columns_.size(); ++i) {
        if (columns_[i] == column) {
            return i;
        }
    }
    throw DomainError("table " + name_ + " has no column '" + column + "'");
}

std::vector<double> ResultTable::numeric_column(const std::string& column) const {
    const std::size_t c = column_index(column);
    std::vector<double> out;
    out.reserve(rows_.size());
    for (const auto& row : rows_) {
        if (const auto* d = std::get_if<double>(&row[c])) {
            out.push_back(*d);
        } else if (const auto* i = std::get_if<std::int64_t>(&row[c])) {
            out.push_back(static_cast<double>(*i));
        } else {
            throw DomainError("table " + name_ + ": column '" + column + "' is not numeric");
        }
    }
    return out;
}

namespace {

std::string quote(const std::string& s) {
    if (s.find_first_of(",\"\r\n") == std::string::npos) {
        return s;
    }
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') {
            out += '"';
        }
        out += c;
    }
    return out + '"';
}

std::string cell_text(const Cell& c) {
    if (const auto* d = std::get_if<double>(&c)) {
        return format_number(*d);
    }
    if (const auto* i = std::get_if<std::int64_t>(&c)) {
        return std::to_string(*i);
    }
    return quote(std::get<std::string>(c));
}

Cell parse_cell(const std::string& s, bool quoted) {
    if (quoted || s.empty()) {
        return s;
    }
    std::int64_t i = 0;
    const char* end = s.data() + s.size();
    if (auto r = std::from_chars(s.data(), end, i); r.ec == std::errc() && r.ptr == end) {
        return i;
    }
    double d = 0.0;
    if (auto r = std::from_chars(s.data(), end, d); r.ec == std::errc() && r.ptr == end) {
        return d;
    }
    if (s == "inf" || s == "-inf") {
        return s == "inf" ? std::numeric_limits<double>::infinity() : -std::numeric_limits<double>::infinity();
    }
    return s;
}

} // namespace

std::string to_csv(const ResultTable& table) {
    std::string out;
    for (std::size_t i = 0; i < table.columns().size(); ++i) {
        out += (i ? "," : "") + quote(table.columns()[i]);
    }
    out += "\r\n";
    for (const auto& row : table.rows()) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            out += (i ? "," : "") + cell_text(row[i]);
        }
        out += "\r\n";
    }
    return out;
}

void write_csv(const ResultTable& table, const std::filesystem::path& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) {
        throw std::runtime_error("cannot write " + path.string());
    }
    f << to_csv(table);
    if (!f) {
        throw std::runtime_error("failed while writing " + path.string());
    }
}

ResultTable parse_csv(const std::string& name, const std::string& text) {
    std::vector<std::vector<std::pair<std::string, bool>>> records;
    std::vector<std::pair<std::string, bool>> record;
    std::string field;
    bool quoted = false;
    bool in_quotes = false;
    bool any = false;
    for (std::size_t i = 0; i < text.size(); ++i) {
        const char c = text[i];
        if (in_quotes) {
            if (c == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') {
                    field += '"';
                    ++i;
                } else {
                    in_quotes = false;
                }
            } else {
                field += c;
            }
            continue;
        }
        if (c == '"') {
            in_quotes = true;
            quoted = true;
            any = true;
        } else if (c == ',') {
            record.emplace_back(field, quoted);
            field.clear();
            quoted = false;
            any = true;
        } else if (c == '\r' || c == '\n') {
            if (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n') {
                ++i;
            }
            if (any || !field.empty()) {
                record.emplace_back(field, quoted);
                records.push_back(std::move(record));
            }
            record.clear();
            field.clear();
            quoted = false;
            any = false;
        } else {
            field += c;
            any = true;
        }
    }
    if (in_quotes) {
        throw DomainError("csv " + name + ": unterminated quoted field");
    }
    if (any || !field.empty()) {
        record.emplace_back(field, quoted);
        records.push_back(std::move(record));
    }
    if (records.empty()) {
        throw DomainError("csv " + name + ": missing header row");
    }
    std::vector<std::string> columns;
    for (const auto& [f, q] : records.front()) {
        columns.push_back(f);
    }
    ResultTable table(name, columns);
    for (std::size_t r = 1; r < records.size(); ++r) {
        std::vector<Cell> row;
        for (const auto& [f, q] : records[r]) {
            row.push_back(parse_cell(f, q));
        }
        table.add_row(std::move(row));
    }
    return table;
}

ResultTable read_csv(const std::filesystem::path& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) {
        throw std::runtime_error("cannot read " + path.string());
    }
    std::ostringstream ss;
    ss << f.rdbuf();
    return parse_csv(path.stem().string(), ss.str());
}

std::string manifest_json(const Manifest& m) {
    nlohmann::ordered_json j;
    j["preset"] = m.preset;
    j["seed"] = m.seed;
    j["tool_version"] = m.tool_version;
    j["scenario_hash"] = m.scenario_hash;
    j["runtime_seconds"] = m.runtime_seconds;
    j["files"] = m.files;
    j["parameters"] = m.parameters;
    return j.dump(2) + "\n";
}

void write_manifest(const Manifest& m, const std::filesystem::path& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) {
        throw std::runtime_error("cannot write " + path.string());
    }
    f << manifest_json(m);
}

Manifest read_manifest(const std::filesystem::path& path) {
    std::ifstream f(path);
    if (!f) {
        throw std::runtime_error("cannot read " + path.string());
    }
    const auto j = nlohmann::json::parse(f);
    Manifest m;
    m.preset = j.at("preset").get<std::string>();
    m.seed = j.at("seed").get<std::uint64_t>();
    m.tool_version = j.at("tool_version").get<std::string>();
    m.scenario_hash = j.at("scenario_hash").get<std::string>();
    m.runtime_seconds = j.at("runtime_seconds").get<double>();
    if (j.contains("files")) {
        m.files = j.at("files").get<std::vector<std::string>>();
    }
    if (j.contains("parameters")) {
        m.parameters = j.at("parameters").get<std::map<std::string, std::string>>();
    }
    return m;
}

} // namespace rislink
