#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace kerrtwpa::csv {

/// Numeric CSV table with a mandatory header row.
struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;

  [[nodiscard]] std::vector<double> column(std::size_t index) const;
};

/// Parses CSV text. The header must equal `expected_header` exactly
/// (column names, order); every data row must have that many numeric
/// fields. Blank lines and lines starting with '#' are skipped.
Table parse(const std::string& text, const std::vector<std::string>& expected_header,
            const std::string& source_name = "<memory>");

/// Reads and parses a file; missing or unreadable files raise DataError.
Table read_file(const std::filesystem::path& path,
                const std::vector<std::string>& expected_header);

/// Formats a number with round-trip precision.
std::string format_number(double value);

/// Renders header + rows as CSV text with '\n' line endings.
std::string render(const std::vector<std::string>& header,
                   const std::vector<std::vector<double>>& rows);

}  // namespace kerrtwpa::csv
