#include "postopt/rng.hpp"

#include <cmath>

namespace postopt {

NormalStream::NormalStream(std::uint64_t seed, std::uint64_t substream) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(substream),
                      static_cast<std::uint32_t>(substream >> 32)};
    engine_.seed(seq);
}

double NormalStream::uniform() { return (engine_() >> 11) * 0x1.0p-53; }

double NormalStream::next() {
    if (have_spare_) {
        have_spare_ = false;
        return spare_;
    }
    constexpr double two_pi = 6.283185307179586476925286766559;
    const double u1 = ((engine_() >> 11) + 1) * 0x1.0p-53;  // (0, 1]
    const double u2 = uniform();                            // [0, 1)
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = two_pi * u2;
    spare_ = radius * std::sin(angle);
    have_spare_ = true;
    return radius * std::cos(angle);
}

Vector NormalStream::draw(int size) {
    Vector v(size);
    for (int i = 0; i < size; ++i) {
        v[i] = next();
    }
    return v;
}

}  // namespace postopt
