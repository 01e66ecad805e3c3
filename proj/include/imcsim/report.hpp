//
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace imcsim {

/// Writes to a sibling temporary file and renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

/// Shortest round-trip-stable text for a double ("inf" and "nan" spelled out).
std::string format_number(double x);

class CsvTable {
public:
    explicit CsvTable(std::vector<std::string> header);

    const std::vector<std::string>& header() const { return header_; }
    std::size_t rows() const { return rows_.size(); }

    CsvTable& add_row(std::vector<std::string> cells);
    std::string str() const;

private:
    std::vector<std::string> header_;
    std::vector<std::vector<std::string>> rows_;
};

}  // namespace imcsim
