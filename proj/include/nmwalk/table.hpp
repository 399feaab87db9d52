// table.hpp: numeric tables and their CSV / JSON serializations.
//
// Floats are printed in the shortest form that parses back to the same double,
// so a written table reads back bit-exactly.

#pragma once

#include <charconv>
#include <cstddef>
#include <fstream>
#include <ostream>
#include <sstream>
#include <string>
#include <system_error>
#include <vector>

#include <nlohmann/json.hpp>

#include "errors.hpp"

namespace nmwalk {

struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;

    void add(std::vector<double> row) {
        if (row.size() != columns.size()) throw ConfigError("table: row width does not match the header");
        rows.push_back(std::move(row));
    }
};

inline std::string format_double(double x) {
    char buffer[64];
    const auto result = std::to_chars(buffer, buffer + sizeof(buffer), x);
    if (result.ec != std::errc{}) throw ConfigError("table: value not representable");
    return std::string(buffer, result.ptr);
}

// "# key = value" lines for every entry of meta, then the header and the rows.
inline void write_csv(std::ostream& out, const Table& table, const nlohmann::json& meta = nullptr) {
    if (meta.is_object()) {
        for (const auto& [key, value] : meta.items()) out << "# " << key << " = " << value.dump() << '\n';
    }
    for (std::size_t c = 0; c < table.columns.size(); ++c) {
        if (c != 0) out << ',';
        out << table.columns[c];
    }
    out << '\n';
    for (const auto& row : table.rows) {
        for (std::size_t c = 0; c < row.size(); ++c) {
            if (c != 0) out << ',';
            out << format_double(row[c]);
        }
        out << '\n';
    }
}

inline nlohmann::json table_json(const Table& table, const nlohmann::json& meta) {
    nlohmann::json doc;
    doc["meta"] = meta;
    doc["columns"] = table.columns;
    doc["data"] = table.rows;
    return doc;
}

inline void write_json(std::ostream& out, const Table& table, const nlohmann::json& meta) {
    out << table_json(table, meta).dump(1) << '\n';
}

// Reads back what write_csv produced; comment lines are skipped.
inline Table read_csv(std::istream& in) {
    Table table;
    std::string line;
    bool header = false;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::vector<std::string> fields;
        std::stringstream ss(line);
        std::string field;
        while (std::getline(ss, field, ',')) fields.push_back(field);
        if (!header) {
            table.columns = fields;
            header = true;
            continue;
        }
        std::vector<double> row;
        for (const auto& f : fields) {
            double value = 0.0;
            const auto result = std::from_chars(f.data(), f.data() + f.size(), value);
            if (result.ec != std::errc{} || result.ptr != f.data() + f.size()) {
                throw ConfigError("csv: cannot parse '" + f + "'");
            }
            row.push_back(value);
        }
        table.add(std::move(row));
    }
    return table;
}

}  // namespace nmwalk
