#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

namespace landscape {

// xoshiro256++ seeded through splitmix64. Hand-rolled so that streams are
// bit-identical across platforms and standard library versions; std::
// distributions are implementation-defined and would break byte-identical
// report reproduction.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) {
        std::uint64_t x = seed;
        for (auto& si : s_) si = splitmix64(x);
    }

    // Independent child stream; used to decouple parallel work items from
    // thread scheduling.
    Rng derive(std::uint64_t stream) const {
        std::uint64_t x = s_[0] ^ (0x9e3779b97f4a7c15ULL * (stream + 1));
        return Rng(splitmix64(x) ^ s_[2]);
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

    // Uniform on [0, 1).
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Box-Muller; one value per call, deterministic.
    double normal() {
        double u1 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586477 * u2);
    }

    // Uniform point in the Euclidean ball of given radius in R^dim.
    std::vector<double> ball(int dim, double radius) {
        std::vector<double> v(static_cast<std::size_t>(dim));
        double norm_sq = 0.0;
        for (auto& vi : v) {
            vi = normal();
            norm_sq += vi * vi;
        }
        const double norm = std::sqrt(norm_sq);
        const double r = radius * std::pow(uniform(), 1.0 / static_cast<double>(dim));
        const double scale = norm > 0.0 ? r / norm : 0.0;
        for (auto& vi : v) vi *= scale;
        return v;
    }

    // Uniform direction on the unit sphere in R^dim.
    std::vector<double> sphere(int dim) {
        std::vector<double> v(static_cast<std::size_t>(dim));
        double norm_sq = 0.0;
        do {
            norm_sq = 0.0;
            for (auto& vi : v) {
                vi = normal();
                norm_sq += vi * vi;
            }
        } while (norm_sq == 0.0);
        const double inv = 1.0 / std::sqrt(norm_sq);
        for (auto& vi : v) vi *= inv;
        return v;
    }

  private:
    static std::uint64_t splitmix64(std::uint64_t& x) {
        std::uint64_t z = (x += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    static std::uint64_t rotl(std::uint64_t v, int k) {
        return (v << k) | (v >> (64 - k));
    }

    std::uint64_t s_[4];
};

} // namespace landscape
