#pragma once

#include <cstdint>
#include <string_view>

namespace geodist {

// xoshiro256++ with splitmix64 seeding. Hand-rolled so that streams are
// bit-reproducible across platforms and standard-library versions.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : root_(seed) {
        std::uint64_t x = seed;
        for (auto& word : s_) word = splitmix64(x);
    }

    std::uint64_t next() {
        const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    // Uniform in [0, 1) with 53 random bits.
    double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    double uniform(double a, double b) { return a + (b - a) * uniform01(); }

    // Uniform integer in [0, n), rejection sampled (no modulo bias).
    std::uint64_t below(std::uint64_t n) {
        if (n == 0) return 0;
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        std::uint64_t v;
        do { v = next(); } while (v >= limit);
        return v % n;
    }

    // Child stream keyed by a label and up to two indices; derived from the
    // root seed, not the current state, so call order does not matter.
    Rng derive(std::string_view label, std::uint64_t a = 0, std::uint64_t b = 0) const {
        std::uint64_t h = fnv1a(label);
        std::uint64_t x = root_ ^ h;
        std::uint64_t m = splitmix64(x);
        x ^= a * 0x9e3779b97f4a7c15ULL;
        m ^= splitmix64(x);
        x ^= b * 0xbf58476d1ce4e5b9ULL;
        m ^= splitmix64(x);
        return Rng(m);
    }

    std::uint64_t root_seed() const { return root_; }

    static std::uint64_t splitmix64(std::uint64_t& x) {
        x += 0x9e3779b97f4a7c15ULL;
        std::uint64_t z = x;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    static std::uint64_t fnv1a(std::string_view s) {
        std::uint64_t h = 0xcbf29ce484222325ULL;
        for (unsigned char c : s) {
            h ^= c;
            h *= 0x100000001b3ULL;
        }
        return h;
    }

private:
    static std::uint64_t rotl(std::uint64_t v, int k) { return (v << k) | (v >> (64 - k)); }

    std::uint64_t root_;
    std::uint64_t s_[4];
};

} // namespace geodist
