#include "postopt/csv.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "postopt/errors.hpp"

namespace postopt::csv {

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

Vector Table::column(const std::string& name) const {
    for (std::size_t j = 0; j < columns.size(); ++j) {
        if (columns[j] == name) {
            return values.col(static_cast<Eigen::Index>(j));
        }
    }
    throw ConfigError("csv: no column named '" + name + "'");
}

bool Table::has_column(const std::string& name) const {
    for (const auto& c : columns) {
        if (c == name) return true;
    }
    return false;
}

void write(const std::filesystem::path& path, const std::vector<std::string>& columns,
           const Matrix& values) {
    if (static_cast<Eigen::Index>(columns.size()) != values.cols()) {
        throw std::invalid_argument("csv::write: header does not match column count");
    }
    std::ofstream out(path);
    if (!out) {
        throw MissingInputError("csv: cannot open '" + path.string() + "' for writing");
    }
    for (std::size_t j = 0; j < columns.size(); ++j) {
        out << (j == 0 ? "" : ",") << columns[j];
    }
    out << '\n';
    for (Eigen::Index i = 0; i < values.rows(); ++i) {
        for (Eigen::Index j = 0; j < values.cols(); ++j) {
            out << (j == 0 ? "" : ",") << format_double(values(i, j));
        }
        out << '\n';
    }
    if (!out) {
        throw MissingInputError("csv: write to '" + path.string() + "' failed");
    }
}

namespace {

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::stringstream ss(line);
    while (std::getline(ss, field, ',')) {
        fields.push_back(field);
    }
    if (!line.empty() && line.back() == ',') {
        fields.emplace_back();
    }
    return fields;
}

}  // namespace

Table read(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw MissingInputError("csv: missing input file '" + path.string() + "'");
    }
    std::string line;
    if (!std::getline(in, line)) {
        throw ConfigError("csv: '" + path.string() + "' is empty");
    }
    if (!line.empty() && line.back() == '\r') {
        line.pop_back();
    }
    Table table;
    table.columns = split_line(line);
    const std::size_t ncols = table.columns.size();

    std::vector<double> data;
    std::size_t nrows = 0;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.empty()) {
            continue;
        }
        const auto fields = split_line(line);
        if (fields.size() != ncols) {
            throw ConfigError("csv: malformed row " + std::to_string(nrows + 2) + " in '" +
                              path.string() + "' (expected " + std::to_string(ncols) +
                              " fields, got " + std::to_string(fields.size()) + ")");
        }
        for (const auto& f : fields) {
            char* end = nullptr;
            const double v = std::strtod(f.c_str(), &end);
            if (end == f.c_str() || *end != '\0') {
                throw ConfigError("csv: non-numeric field '" + f + "' in '" + path.string() + "'");
            }
            data.push_back(v);
        }
        ++nrows;
    }
    table.values.resize(static_cast<Eigen::Index>(nrows), static_cast<Eigen::Index>(ncols));
    for (std::size_t i = 0; i < nrows; ++i) {
        for (std::size_t j = 0; j < ncols; ++j) {
            table.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                data[i * ncols + j];
        }
    }
    return table;
}

}  // namespace postopt::csv
