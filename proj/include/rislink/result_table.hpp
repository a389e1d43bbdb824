#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <variant>
#include <vector>

namespace rislink {

inline constexpr const char* kToolVersion = "1.0.0";

using Cell = std::variant<double, std::int64_t, std::string>;

struct TableMetadata {
    std::string tool_version = kToolVersion;
    std::uint64_t seed = 0;
    std::string scenario_hash;
};

/// Header plus typed rows. Every row has exactly one cell per column.
class ResultTable {
public:
    ResultTable() = default;
    ResultTable(std::string name, std::vector<std::string> columns);

    void add_row(std::vector<Cell> row);

    [[nodiscard]] const std::string& name() const { return name_; }
    [[nodiscard]] const std::vector<std::string>& columns() const { return columns_; }
    [[nodiscard]] const std::vector<std::vector<Cell>>& rows() const { return rows_; }
    [[nodiscard]] std::size_t column_index(const std::string& column) const;
    /// Numeric column as doubles (integers are widened).
    [[nodiscard]] std::vector<double> numeric_column(const std::string& column) const;

    TableMetadata metadata;

private:
    std::string name_;
    std::vector<std::string> columns_;
    std::vector<std::vector<Cell>> rows_;
};

/// RFC 4180 text: header row, comma separator, CRLF line ends, quotes only
/// where needed, shortest round-trip decimal numbers.
std::string to_csv(const ResultTable& table);
void write_csv(const ResultTable& table, const std::filesystem::path& path);

/// Reads a file written by write_csv. Cells that parse as integers become
/// int64, other numbers double, everything else string.
ResultTable read_csv(const std::filesystem::path& path);
ResultTable parse_csv(const std::string& name, const std::string& text);

struct Manifest {
    std::string preset;
    std::uint64_t seed = 0;
    std::string tool_version = kToolVersion;
    std::string scenario_hash;
    double runtime_seconds = 0.0;
    std::vector<std::string> files;
    std::map<std::string, std::string> parameters;
};

std::string manifest_json(const Manifest& m);
void write_manifest(const Manifest& m, const std::filesystem::path& path);
Manifest read_manifest(const std::filesystem::path& path);

} // namespace rislink
