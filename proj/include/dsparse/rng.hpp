#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace dsparse {

/// Seeded generator with platform-independent sampling (the standard
/// distributions are implementation-defined, so none are used here).
class Rng {
public:
    explicit Rng(std::uint64_t seed = 0) : engine_(seed) {}

    /// Uniform on [0, 1) with 53 random bits.
    double uniform();
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    /// Standard normal via Box-Muller; consumes two draws.
    double normal();
    std::size_t index(std::size_t n);
    void shuffle(std::vector<std::size_t>& items);

    std::string state() const;
    void set_state(const std::string& text);

private:
    std::mt19937_64 engine_;
};

} // namespace dsparse
