#pragma once

#include <cstdint>

namespace tda {

// Splittable counter-style generator built on the splitmix64 mixer.  Streams
// are derived from (seed, stream id) by hashing, so the i-th subsample's
// draws are identical no matter how many workers run or in what order the
// subsamples are evaluated.  All distributions are hand-specified (no
// std::*_distribution, whose output is implementation-defined), which keeps
// artifacts byte-identical across standard libraries.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    // Independent stream for a (seed, stream) pair; mixing both through
    // splitmix64 decorrelates adjacent seeds and adjacent stream ids.
    static Rng stream(std::uint64_t seed, std::uint64_t stream_id);

    std::uint64_t next_u64();

    // Uniform on [0, 1) with 53 random bits.
    double next_double();

    // Uniform on {0, ..., bound-1}, bound >= 1, rejection-free bias removal.
    std::uint64_t next_below(std::uint64_t bound);

    // Standard normal via Box-Muller; one spare value is cached.
    double next_gaussian();

private:
    std::uint64_t state_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace tda
