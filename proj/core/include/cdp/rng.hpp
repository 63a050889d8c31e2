#pragma once

#include <cstdint>
#include <random>

namespace cdp {

// Seeding contract, fixed for reproducibility:
//
//   mix(z)                  = splitmix64 finalizer
//   stream(master, run)     = mix(master + (run + 1) * 0x9E3779B97F4A7C15)
//   cell(master, d, L, b)   = mix(mix(mix(master ^ mix(d)) ^ mix(L)) ^ mix(b))
//
// stream() is injective in `run` for a fixed master seed (the finalizer is a
// bijection on 64-bit words).  cell() derives a per-(d, L, batch) master seed
// for experiment sweeps.  The capacity k is deliberately NOT mixed in: runs
// that differ only in k share bond permutations, which couples their
// percolation times pathwise exactly as in the coupled-configuration
// experiment.
inline std::uint64_t splitmix_mix(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xBF58476D1CE4E5B9ULL;
    z ^= z >> 27;
    z *= 0x94D049BB133111EBULL;
    z ^= z >> 31;
    return z;
}

struct SeedSpec {
    std::uint64_t master_seed = 0;
    std::uint64_t run_index = 0;

    std::uint64_t stream_seed() const {
        return splitmix_mix(master_seed + (run_index + 1) * 0x9E3779B97F4A7C15ULL);
    }
};

inline std::uint64_t cell_seed(std::uint64_t master, int d, std::int64_t L, std::uint64_t batch) {
    std::uint64_t h = master;
    h = splitmix_mix(h ^ splitmix_mix(static_cast<std::uint64_t>(d)));
    h = splitmix_mix(h ^ splitmix_mix(static_cast<std::uint64_t>(L)));
    h = splitmix_mix(h ^ splitmix_mix(batch));
    return h;
}

// mt19937_64 with an unbiased bounded draw (Lemire multiply-shift with
// rejection).  std::uniform_int_distribution is not pinned down by the
// standard, so permutations generated through it would not be portable.
class RunRng {
public:
    explicit RunRng(std::uint64_t seed) : engine_(seed) {}
    explicit RunRng(const SeedSpec& s) : engine_(s.stream_seed()) {}

    std::uint64_t next_u64() { return engine_(); }

    // Uniform draw in [0, n).
    std::uint64_t bounded(std::uint64_t n) {
        if (n <= 1) return 0;
        std::uint64_t x = engine_();
        __uint128_t m = static_cast<__uint128_t>(x) * n;
        std::uint64_t lo = static_cast<std::uint64_t>(m);
        if (lo < n) {
            const std::uint64_t threshold = (0 - n) % n;
            while (lo < threshold) {
                x = engine_();
                m = static_cast<__uint128_t>(x) * n;
                lo = static_cast<std::uint64_t>(m);
            }
        }
        return static_cast<std::uint64_t>(m >> 64);
    }

    // Uniform double in [0, 1) with 53 random bits.
    double next_unit() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

private:
    std::mt19937_64 engine_;
};

}  // namespace cdp
