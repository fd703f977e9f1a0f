#pragma once

#include <stdexcept>
#include <string>

namespace postopt {

/// Invalid or inconsistent run configuration (also covers parameter
/// validation such as alpha <= 0).
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

/// A required input artifact does not exist or cannot be read.
class MissingInputError : public std::runtime_error {
public:
    explicit MissingInputError(const std::string& msg) : std::runtime_error(msg) {}
};

/// A mathematical assumption was violated (rank deficiency of the controller
/// data, loss of positive definiteness, near-dependent G).
class AssumptionError : public std::runtime_error {
public:
    explicit AssumptionError(const std::string& msg) : std::runtime_error(msg) {}
};

/// A linear solve or factorization failed, or produced a residual outside
/// its contract.
class SolverError : public std::runtime_error {
public:
    explicit SolverError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace postopt
