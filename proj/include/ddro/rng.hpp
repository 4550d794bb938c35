#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace ddro {

// Thin wrapper over std::mt19937_64 that derives doubles from the raw 64-bit
// stream. uniform_real_distribution is implementation-defined, so byte-stable
// outputs (verify logs, CSV artifacts) go through this instead.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    // Uniform in [0, 1) with 53 random bits.
    double next_double() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    double next_range(double lo, double hi) {
        return lo + (hi - lo) * next_double();
    }

    // Uniform integer in [0, n).
    std::size_t next_index(std::size_t n) {
        return static_cast<std::size_t>(engine_() % n);
    }

    // Dirichlet(1,...,1): uniform over the probability simplex.
    std::vector<double> next_simplex(std::size_t m) {
        std::vector<double> v(m);
        double total = 0.0;
        for (auto& x : v) {
            double u = next_double();
            if (u <= 0.0) u = 0x1.0p-53;
            x = -std::log(u);
            total += x;
        }
        for (auto& x : v) x /= total;
        return v;
    }

private:
    std::mt19937_64 engine_;
};

}  // namespace ddro
