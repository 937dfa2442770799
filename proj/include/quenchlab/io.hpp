#pragma once

// CSV and manifest output.  Each CSV starts with one '#'-prefixed JSON line
// carrying the manifest hash, then a column header, then rows printed with
// 17 significant digits so values round-trip exactly.

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "quenchlab/error.hpp"

namespace quenchlab {

inline std::string format_number(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

// 64-bit FNV-1a, printed as 16 hex digits; stable across platforms.
inline std::string stable_hash(const std::string& text)
{
    std::uint64_t h = 14695981039346656037ull;
    for (const unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

struct CsvTable {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;

    void add(std::vector<double> row)
    {
        if (row.size() != columns.size()) {
            throw ConfigError("CSV row width does not match the header");
        }
        rows.push_back(std::move(row));
    }
};

inline std::string render_csv(const CsvTable& table, const nlohmann::json& header)
{
    std::ostringstream os;
    os << "# " << header.dump() << '\n';
    for (std::size_t i = 0; i < table.columns.size(); ++i) {
        os << (i ? "," : "") << table.columns[i];
    }
    os << '\n';
    for (const auto& row : table.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            os << (i ? "," : "") << format_number(row[i]);
        }
        os << '\n';
    }
    return os.str();
}

inline void write_text(const std::filesystem::path& path, const std::string& text)
{
    if (path.has_parent_path()) {
        std::filesystem::create_directories(path.parent_path());
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw ConfigError("cannot write " + path.string());
    }
    out << text;
}

// Parses a file written by render_csv.
inline CsvTable read_csv(const std::filesystem::path& path, nlohmann::json* header = nullptr)
{
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot read " + path.string());
    }
    CsvTable table;
    std::string line;
    bool have_columns = false;
    while (std::getline(in, line)) {
        if (line.empty()) {
            continue;
        }
        if (line[0] == '#') {
            if (header != nullptr) {
                *header = nlohmann::json::parse(line.substr(1));
            }
            continue;
        }
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) {
            cells.push_back(cell);
        }
        if (!have_columns) {
            table.columns = cells;
            have_columns = true;
            continue;
        }
        std::vector<double> row;
        for (const auto& c : cells) {
            try {
                row.push_back(std::stod(c));
            } catch (const std::exception&) {
                throw ConfigError("non-numeric CSV cell '" + c + "' in " + path.string());
            }
        }
        table.add(std::move(row));
    }
    if (!have_columns) {
        throw ConfigError("no column header in " + path.string());
    }
    return table;
}

inline std::vector<double> column(const CsvTable& table, const std::string& name)
{
    for (std::size_t i = 0; i < table.columns.size(); ++i) {
        if (table.columns[i] == name) {
            std::vector<double> out;
            for (const auto& row : table.rows) {
                out.push_back(row[i]);
            }
            return out;
        }
    }
    throw ConfigError("no column '" + name + "'");
}

}  // namespace quenchlab
