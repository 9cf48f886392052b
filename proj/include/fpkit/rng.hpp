#pragma once

#include <cstdint>

namespace fpkit {

// Small deterministic generator (splitmix64 core). The standard <random>
// distributions are not required to produce identical sequences across
// library implementations, so all sampling used by the pipeline goes
// through this class instead.
class Rng {
public:
    explicit Rng(uint64_t seed) : state_(seed) {}

    // Independent stream derived from a base seed. Distinct stream ids give
    // uncorrelated sequences, so unrelated pipeline stages can draw from the
    // same user-facing seed without consuming each other's values.
    static Rng derive(uint64_t seed, uint64_t stream);
    static uint64_t derive_seed(uint64_t seed, uint64_t stream);

    uint64_t next_u64();

    double uniform();                          // [0, 1)
    double uniform(double lo, double hi);      // [lo, hi)
    uint64_t below(uint64_t n);                // [0, n), unbiased
    int64_t uniform_int(int64_t lo, int64_t hi);  // [lo, hi] inclusive
    double normal();                           // standard normal
    double normal(double mean, double sigma);

private:
    uint64_t state_;
    bool has_cached_ = false;
    double cached_ = 0.0;
};

}  // namespace fpkit
