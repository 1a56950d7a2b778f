#pragma once

#include <cstdint>
#include <random>

namespace kitoke::testkit {

// Portable variates over mt19937_64 (the standard distributions are not
// bit-reproducible across standard libraries).
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    std::uint64_t below(std::uint64_t bound) { return bound == 0 ? 0 : engine_() % bound; }
    // Box-Muller; consumes two uniforms per call.
    double normal();

private:
    std::mt19937_64 engine_;
};

} // namespace kitoke::testkit
