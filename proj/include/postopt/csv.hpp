#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "postopt/types.hpp"

namespace postopt::csv {

struct Table {
    std::vector<std::string> columns;
    Matrix values;  // rows x columns

    Vector column(const std::string& name) const;
    bool has_column(const std::string& name) const;
};

/// Write one header line plus %.17g comma-separated payload rows. The format
/// round-trips binary64 values exactly.
void write(const std::filesystem::path& path, const std::vector<std::string>& columns,
           const Matrix& values);

/// Strict reader for the format written by write(); malformed rows raise
/// ConfigError, a missing file raises MissingInputError.
Table read(const std::filesystem::path& path);

std::string format_double(double v);

}  // namespace postopt::csv
