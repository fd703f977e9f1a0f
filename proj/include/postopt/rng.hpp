#pragma once

#include <cstdint>
#include <random>

#include "postopt/types.hpp"

namespace postopt {

/// Portable seeded standard-normal stream: mt19937_64 uniforms (top 53 bits)
/// through Box-Muller. Both building blocks are fully specified, so a given
/// (seed, substream) pair generates the same values on every platform.
/// Substreams make per-sample parallel generation reproduce serial output.
class NormalStream {
public:
    explicit NormalStream(std::uint64_t seed, std::uint64_t substream = 0);

    double next();
    Vector draw(int size);

    /// Uniform in [0, 1).
    double uniform();

private:
    std::mt19937_64 engine_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace postopt
