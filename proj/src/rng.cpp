#include "lacc/rng.hpp"

#include <cmath>

namespace lacc {

namespace {

// splitmix64 finalizer; decorrelates nearby seeds before they reach mt19937_64
std::uint64_t mix64(std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ull;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

}  // namespace

Rng::Rng(std::uint64_t seed) : seed_(seed), gen_(mix64(seed)) {}

std::uint64_t Rng::next_u64() { return gen_(); }

double Rng::uniform() {
    return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
}

double Rng::normal() {
    if (have_spare_) {
        have_spare_ = false;
        return spare_;
    }
    // Box-Muller on (0,1] x [0,1)
    double u1 = 0.0;
    do {
        u1 = uniform();
    } while (u1 == 0.0);
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * M_PI * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
}

cplx Rng::complex_normal() {
    const double re = normal();
    const double im = normal();
    return {re, im};
}

Rng Rng::split(std::uint64_t stream) const {
    return Rng(mix64(mix64(seed_) ^ (stream + 1)));
}

}
