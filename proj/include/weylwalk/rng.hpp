#pragma once

#include <cstdint>

namespace weylwalk {

// Counter-based stream built on the Philox-4x32-10 block function. A stream is
// addressed by (master_seed, stream_index); the index sits in the upper half of
// the counter, so any trajectory can be generated independently of scheduling
// order, and distinct streams never share blocks.
class RandomStream {
public:
    RandomStream(uint64_t master_seed, uint64_t stream_index);

    uint32_t next_u32();
    uint64_t next_u64();

    // Uniform on [0, 1) with 53 random bits.
    double uniform01();

    // Standard normal via Box-Muller; the paired value is cached.
    double normal();

    // Uniform integer in [0, bound), bound >= 1, rejection-sampled.
    uint64_t below(uint64_t bound);

    uint64_t seed() const { return seed_; }
    uint64_t index() const { return index_; }

private:
    void refill();

    uint64_t seed_, index_;
    uint32_t key_[2];
    uint32_t ctr_[2];  // per-stream block counter (lo, hi)
    uint32_t block_[4];
    int pos_;
    double cached_normal_;
    bool has_cached_normal_;
};

// splitmix64; used to decorrelate raw seed words before keying the stream.
uint64_t mix64(uint64_t v);

}  // namespace weylwalk
