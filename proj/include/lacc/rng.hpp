#pragma once

#include <cstdint>
#include <random>

#include "lacc/complexmat.hpp"

namespace lacc {

// Seeded, splittable generator.  Reports embed the root seed, and every
// parallel worker derives its own stream via split(), so results are
// bit-identical across reruns and across thread counts.
class Rng {
public:
    explicit Rng(std::uint64_t seed);

    // [0,1) with 53 random bits
    double uniform();
    // standard normal (Box-Muller; second deviate cached)
    double normal();
    // complex standard normal: real and imaginary parts N(0,1)
    cplx complex_normal();
    std::uint64_t next_u64();

    // Independent child stream; depends only on the constructor seed and the
    // stream index, never on how much this generator has been consumed.
    [[nodiscard]] Rng split(std::uint64_t stream) const;

    [[nodiscard]] std::uint64_t seed() const { return seed_; }

private:
    std::uint64_t seed_;
    std::mt19937_64 gen_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

}
