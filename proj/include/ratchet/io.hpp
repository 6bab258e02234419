#ifndef RATCHET_IO_HPP
#define RATCHET_IO_HPP

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "ratchet/errors.hpp"

namespace ratchet {

inline constexpr const char* version_string = "0.1.0";

// Numeric CSV with a header row; values written with full precision.
inline void write_csv(const std::string& path, const std::vector<std::string>& columns,
                      const std::vector<std::vector<double>>& rows) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot open '" + path + "' for writing");
    for (std::size_t c = 0; c < columns.size(); ++c)
        out << columns[c] << (c + 1 < columns.size() ? "," : "\n");
    out << std::setprecision(17);
    for (const auto& row : rows) {
        for (std::size_t c = 0; c < row.size(); ++c)
            out << row[c] << (c + 1 < row.size() ? "," : "\n");
    }
}

inline void write_json(const std::string& path, const nlohmann::json& j) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot open '" + path + "' for writing");
    out << j.dump(2) << "\n";
}

// (x, y) pairs from a two-column CSV; a non-numeric first line is treated as
// a header and skipped.
inline std::pair<std::vector<double>, std::vector<double>> read_xy_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open '" + path + "' for reading");
    std::vector<double> xs, ys;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream ss(line);
        double x, y;
        if (ss >> x >> y) {
            xs.push_back(x);
            ys.push_back(y);
        } else if (!first) {
            throw ConfigError("malformed CSV line in '" + path + "': " + line);
        }
        first = false;
    }
    if (xs.size() < 4) throw ConfigError("tabulated CSV '" + path + "' needs at least 4 samples");
    return {xs, ys};
}

} // namespace ratchet

#endif
