#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace ciot {

// splitmix64; used only to derive stream seeds from a run seed.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Independent sub-stream seed for a run: stream 0 drives the environment,
// stream 1 drives the policy (exploration draws, network init). Keeping the
// two apart means the strategy choice never perturbs the environment's
// sample path.
inline std::uint64_t derive_stream_seed(std::uint64_t run_seed, std::uint64_t stream) {
    return splitmix64(splitmix64(run_seed) + stream);
}

// Seeded generator with the handful of transforms the simulator needs.
// All transforms are built on the engine's raw 64-bit output, so sequences
// are reproducible for a given seed independent of the C++ library's
// distribution implementations.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    std::uint64_t next_u64() { return eng_(); }

    // uniform in [0, 1), 53-bit resolution
    double uniform01() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

    // uniform integer in [0, n)
    int uniform_int(int n) {
        return static_cast<int>((static_cast<unsigned __int128>(eng_()) *
                                 static_cast<unsigned __int128>(n)) >> 64);
    }

    // inverse-CDF exponential with the given mean
    double exponential(double mean) { return -mean * std::log1p(-uniform01()); }

    // Box-Muller standard normal scaled by stddev
    double normal(double stddev) {
        if (has_spare_) {
            has_spare_ = false;
            return spare_ * stddev;
        }
        double u1 = 1.0 - uniform01();  // (0, 1]
        double u2 = uniform01();
        double r = std::sqrt(-2.0 * std::log(u1));
        double theta = 6.283185307179586476925286766559 * u2;
        spare_ = r * std::sin(theta);
        has_spare_ = true;
        return r * std::cos(theta) * stddev;
    }

private:
    std::mt19937_64 eng_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace ciot
