#ifndef STOP_RNG_HPP
#define STOP_RNG_HPP

#include <cstdint>
#include <random>
#include <vector>

namespace stop {

// Seeded generator with explicit integer reduction, so that draws are
// reproducible across standard-library implementations.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    // Uniform integer in [lo, hi], inclusive. Requires lo <= hi.
    int uniform_int(int lo, int hi) {
        const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
        return lo + static_cast<int>(bounded(span));
    }

    // Uniform index in [0, n).
    std::size_t uniform_index(std::size_t n) { return static_cast<std::size_t>(bounded(n)); }

    bool coin_flip() { return (next_u64() & 1u) != 0; }

    double uniform_real() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::swap(v[i - 1], v[uniform_index(i)]);
        }
    }

private:
    // Debiased modulo reduction (rejection sampling).
    std::uint64_t bounded(std::uint64_t n) {
        if (n <= 1) return 0;
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        std::uint64_t r;
        do {
            r = engine_();
        } while (r >= limit);
        return r % n;
    }

    std::mt19937_64 engine_;
};

}  // namespace stop

#endif
