#include "fpkit/rng.hpp"

#include <cmath>
#include <stdexcept>

namespace fpkit {

namespace {

constexpr uint64_t kGolden = 0x9E3779B97F4A7C15ull;

uint64_t mix64(uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

}  // namespace

uint64_t Rng::derive_seed(uint64_t seed, uint64_t stream) {
    // Decorrelate the stream id before folding it into the seed so that
    // consecutive ids do not land on consecutive splitmix states.
    return mix64(seed + kGolden * (stream + 1));
}

Rng Rng::derive(uint64_t seed, uint64_t stream) {
    return Rng(derive_seed(seed, stream));
}

uint64_t Rng::next_u64() {
    state_ += kGolden;
    return mix64(state_);
}

double Rng::uniform() {
    return (next_u64() >> 11) * 0x1.0p-53;
}

double Rng::uniform(double lo, double hi) {
    return lo + (hi - lo) * uniform();
}

uint64_t Rng::below(uint64_t n) {
    if (n == 0) throw std::invalid_argument("Rng::below: n must be positive");
    uint64_t threshold = (-n) % n;  // reject to keep the draw unbiased
    for (;;) {
        uint64_t r = next_u64();
        if (r >= threshold) return r % n;
    }
}

int64_t Rng::uniform_int(int64_t lo, int64_t hi) {
    if (lo > hi) throw std::invalid_argument("Rng::uniform_int: empty range");
    return lo + static_cast<int64_t>(below(static_cast<uint64_t>(hi - lo) + 1));
}

double Rng::normal() {
    if (has_cached_) {
        has_cached_ = false;
        return cached_;
    }
    double u1;
    do {
        u1 = uniform();
    } while (u1 <= 0.0);
    double u2 = uniform();
    double radius = std::sqrt(-2.0 * std::log(u1));
    double angle = 2.0 * M_PI * u2;
    cached_ = radius * std::sin(angle);
    has_cached_ = true;
    return radius * std::cos(angle);
}

double Rng::normal(double mean, double sigma) {
    return mean + sigma * normal();
}

}  // namespace fpkit
