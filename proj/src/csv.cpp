#include "kerrpair/csv.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "kerrpair/errors.hpp"

namespace kerrpair {

std::string format_real(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

CsvWriter::CsvWriter(const std::filesystem::path& path, std::vector<std::string> header)
    : path_(path), out_(path, std::ios::binary), columns_(header.size()) {
    if (!out_) throw ConfigError("cannot open " + path.string() + " for writing");
    for (std::size_t i = 0; i < header.size(); ++i) out_ << (i ? "," : "") << header[i];
    out_ << '\n';
}

void CsvWriter::row(const std::vector<CsvCell>& cells) {
    if (cells.size() != columns_) throw Error("CSV row width does not match the header");
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i) out_ << ',';
        std::visit(
            [this](const auto& v) {
                using T = std::decay_t<decltype(v)>;
                if constexpr (std::is_same_v<T, double>) {
                    out_ << format_real(v);
                } else if constexpr (std::is_same_v<T, long long>) {
                    out_ << v;
                } else if constexpr (std::is_same_v<T, std::string>) {
                    out_ << v;
                }
            },
            cells[i]);
    }
    out_ << '\n';
    if (!out_) throw Error("write failed for " + path_.string());
    ++rows_;
}

std::size_t CsvTable::column(const std::string& name) const {
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (header[i] == name) return i;
    }
    throw ConfigError("missing CSV column '" + name + "'");
}

double CsvTable::real(std::size_t r, const std::string& name) const {
    const auto& cell = rows.at(r).at(column(name));
    double v = 0.0;
    const char* end = cell.data() + cell.size();
    const auto [ptr, ec] = std::from_chars(cell.data(), end, v);
    // from_chars also accepts subnormals, which stod rejects as out of range
    if (ec != std::errc() || ptr != end || cell.empty()) {
        throw ConfigError("non-numeric CSV cell '" + cell + "' in column " + name);
    }
    return v;
}

CsvTable read_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open " + path.string());
    auto split = [](const std::string& line) {
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        if (!line.empty() && line.back() == ',') cells.emplace_back();
        return cells;
    };
    CsvTable table;
    std::string line;
    if (!std::getline(in, line)) throw ConfigError(path.string() + " is empty (no header)");
    table.header = split(line);
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto cells = split(line);
        cells.resize(table.header.size());
        table.rows.push_back(std::move(cells));
    }
    return table;
}

}  // namespace kerrpair
