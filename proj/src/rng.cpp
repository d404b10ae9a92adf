#include "tda/rng.hpp"

#include <cmath>

namespace tda {
namespace {

constexpr std::uint64_t kGamma = 0x9e3779b97f4a7c15ULL;

std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

}  // namespace

Rng Rng::stream(std::uint64_t seed, std::uint64_t stream_id) {
    std::uint64_t s = mix64(seed + kGamma) ^ mix64(stream_id * kGamma + 0x6a09e667f3bcc909ULL);
    return Rng(s);
}

std::uint64_t Rng::next_u64() {
    state_ += kGamma;
    return mix64(state_);
}

double Rng::next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

std::uint64_t Rng::next_below(std::uint64_t bound) {
    // Reject the tail that would bias the modulus.
    std::uint64_t threshold = (0ULL - bound) % bound;
    for (;;) {
        std::uint64_t x = next_u64();
        if (x >= threshold) return x % bound;
    }
}

double Rng::next_gaussian() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    // Box-Muller on explicitly constructed uniforms; u1 is shifted into (0,1]
    // so the log is finite.
    double u1 = 1.0 - next_double();
    double u2 = next_double();
    double r = std::sqrt(-2.0 * std::log(u1));
    double theta = 6.283185307179586476925286766559 * u2;
    spare_ = r * std::sin(theta);
    has_spare_ = true;
    return r * std::cos(theta);
}

}  // namespace tda
