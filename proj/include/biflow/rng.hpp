#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace biflow {

/// Seeded random source with portable transforms. The raw 64-bit stream comes
/// from std::mt19937_64 (bit-exact by the standard); uniform/normal draws are
/// built here rather than with std::*_distribution, whose output is
/// implementation-defined.
class SeededRng {
public:
    explicit SeededRng(std::uint64_t seed) : seed_(seed), engine_(seed) {}

    std::uint64_t seed() const { return seed_; }

    /// Uniform in [0, 1), 53-bit resolution.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Standard normal via the polar method; one spare is cached.
    double normal();

    std::vector<double> normal_vector(std::size_t n);

    /// Unbiased integer in [0, n), n >= 1, via mask rejection.
    std::uint64_t next_below(std::uint64_t n);

    template <class T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::size_t j = static_cast<std::size_t>(next_below(i));
            std::swap(v[i - 1], v[j]);
        }
    }

private:
    std::uint64_t seed_;
    std::mt19937_64 engine_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace biflow
