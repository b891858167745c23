#pragma once

// Plain CSV with a mandatory header. Reals are written with 17 significant digits
// so they round-trip; empty cells mark missing values.

#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace kerrpair {

[[nodiscard]] std::string format_real(double v);

using CsvCell = std::variant<double, long long, std::string, std::monostate>;

class CsvWriter {
public:
    CsvWriter(const std::filesystem::path& path, std::vector<std::string> header);

    void row(const std::vector<CsvCell>& cells);
    [[nodiscard]] std::size_t rows() const noexcept { return rows_; }
    [[nodiscard]] const std::filesystem::path& path() const noexcept { return path_; }

private:
    std::filesystem::path path_;
    std::ofstream out_;
    std::size_t columns_ = 0;
    std::size_t rows_ = 0;
};

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    // Column index by name; throws ConfigError when missing.
    [[nodiscard]] std::size_t column(const std::string& name) const;
    [[nodiscard]] double real(std::size_t row, const std::string& name) const;
};

[[nodiscard]] CsvTable read_csv(const std::filesystem::path& path);

}  // namespace kerrpair
