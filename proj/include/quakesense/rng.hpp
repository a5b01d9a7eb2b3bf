#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace quakesense {

// Deterministic PRNG with named sub-streams. All simulation randomness flows
// from one scenario seed; each component draws from its own stream so that
// adding draws in one component does not perturb the others. Distributions
// are implemented here rather than taken from <random> because libstdc++ /
// libc++ disagree on distribution algorithms and runs must be reproducible
// byte-for-byte.
class Rng {
public:
    explicit Rng(std::uint64_t seed) {
        // splitmix64 expansion of the seed into xoshiro256++ state
        std::uint64_t x = seed;
        for (auto& s : state_) s = splitmix64(x);
    }

    Rng(std::uint64_t seed, std::string_view stream_name)
        : Rng(seed ^ fnv1a64(stream_name)) {}

    // Child stream: independent of later draws on the parent.
    Rng stream(std::string_view name) const {
        return Rng(state_[0] ^ state_[2], name);
    }

    std::uint64_t next_u64() {
        const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    // Uniform in [0, 1), 53-bit resolution.
    double uniform01() { return double(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    // Uniform integer in [0, n). n = 0 is a contract violation; returns 0.
    std::uint64_t below(std::uint64_t n) {
        if (n == 0) return 0;
        // multiply-shift; bias is negligible for the n used here and the
        // mapping is identical on every platform
        return std::uint64_t((static_cast<unsigned __int128>(next_u64()) * n) >> 64);
    }

    std::int64_t range(std::int64_t lo, std::int64_t hi) {  // inclusive bounds
        return lo + std::int64_t(below(std::uint64_t(hi - lo + 1)));
    }

    bool bernoulli(double p) { return uniform01() < p; }

    // Box-Muller without state so draw order stays obvious.
    double normal(double mean = 0.0, double stddev = 1.0) {
        double u1 = uniform01();
        while (u1 <= 0.0) u1 = uniform01();
        const double u2 = uniform01();
        const double z = std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
        return mean + stddev * z;
    }

    double lognormal(double mu_log, double sigma_log) {
        return std::exp(normal(mu_log, sigma_log));
    }

    double exponential(double mean) {
        double u = uniform01();
        while (u <= 0.0) u = uniform01();
        return -mean * std::log(u);
    }

    // Knuth; fine for the small means used by the generators.
    int poisson(double mean) {
        if (mean <= 0.0) return 0;
        const double limit = std::exp(-mean);
        double prod = uniform01();
        int n = 0;
        while (prod > limit) {
            ++n;
            prod *= uniform01();
        }
        return n;
    }

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::swap(v[i - 1], v[below(i)]);
        }
    }

    template <typename T>
    const T& pick(const std::vector<T>& v) {
        return v[below(v.size())];
    }

    // Index into a discrete distribution given by non-negative weights.
    std::size_t weighted(const std::vector<double>& weights) {
        double total = 0.0;
        for (double w : weights) total += w;
        double r = uniform01() * total;
        for (std::size_t i = 0; i < weights.size(); ++i) {
            r -= weights[i];
            if (r < 0.0) return i;
        }
        return weights.empty() ? 0 : weights.size() - 1;
    }

    static std::uint64_t splitmix64(std::uint64_t& x) {
        std::uint64_t z = (x += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    static std::uint64_t fnv1a64(std::string_view s) {
        std::uint64_t h = 0xcbf29ce484222325ULL;
        for (unsigned char c : s) {
            h ^= c;
            h *= 0x100000001b3ULL;
        }
        return h;
    }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

    std::uint64_t state_[4];
};

}  // namespace quakesense
