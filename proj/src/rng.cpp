#include "weylwalk/rng.hpp"

#include <cmath>
#include <stdexcept>

namespace weylwalk {

namespace {

constexpr uint32_t kPhiloxW32A = 0x9E3779B9u;
constexpr uint32_t kPhiloxW32B = 0xBB67AE85u;
constexpr uint32_t kPhiloxM4x32A = 0xD2511F53u;
constexpr uint32_t kPhiloxM4x32B = 0xCD9E8D57u;

inline void mulhilo(uint32_t a, uint32_t b, uint32_t& hi, uint32_t& lo) {
    uint64_t p = static_cast<uint64_t>(a) * b;
    hi = static_cast<uint32_t>(p >> 32);
    lo = static_cast<uint32_t>(p);
}

void philox4x32_10(const uint32_t key_in[2], const uint32_t ctr_in[4], uint32_t out[4]) {
    uint32_t k0 = key_in[0], k1 = key_in[1];
    uint32_t c0 = ctr_in[0], c1 = ctr_in[1], c2 = ctr_in[2], c3 = ctr_in[3];
    for (int round = 0; round < 10; ++round) {
        uint32_t hi0, lo0, hi1, lo1;
        mulhilo(kPhiloxM4x32A, c0, hi0, lo0);
        mulhilo(kPhiloxM4x32B, c2, hi1, lo1);
        uint32_t n0 = hi1 ^ c1 ^ k0;
        uint32_t n1 = lo1;
        uint32_t n2 = hi0 ^ c3 ^ k1;
        uint32_t n3 = lo0;
        c0 = n0;
        c1 = n1;
        c2 = n2;
        c3 = n3;
        k0 += kPhiloxW32A;
        k1 += kPhiloxW32B;
    }
    out[0] = c0;
    out[1] = c1;
    out[2] = c2;
    out[3] = c3;
}

}  // namespace

uint64_t mix64(uint64_t v) {
    v += 0x9E3779B97F4A7C15ull;
    v = (v ^ (v >> 30)) * 0xBF58476D1CE4E5B9ull;
    v = (v ^ (v >> 27)) * 0x94D049BB133111EBull;
    return v ^ (v >> 31);
}

RandomStream::RandomStream(uint64_t master_seed, uint64_t stream_index)
    : seed_(master_seed), index_(stream_index), pos_(4), cached_normal_(0.0), has_cached_normal_(false) {
    uint64_t mixed = mix64(master_seed);
    key_[0] = static_cast<uint32_t>(mixed);
    key_[1] = static_cast<uint32_t>(mixed >> 32);
    ctr_[0] = 0;
    ctr_[1] = 0;
}

void RandomStream::refill() {
    uint32_t ctr4[4] = {ctr_[0], ctr_[1], static_cast<uint32_t>(index_), static_cast<uint32_t>(index_ >> 32)};
    philox4x32_10(key_, ctr4, block_);
    pos_ = 0;
    if (++ctr_[0] == 0) ++ctr_[1];
}

uint32_t RandomStream::next_u32() {
    if (pos_ >= 4) refill();
    return block_[pos_++];
}

uint64_t RandomStream::next_u64() {
    uint64_t lo = next_u32();
    uint64_t hi = next_u32();
    return (hi << 32) | lo;
}

double RandomStream::uniform01() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double RandomStream::normal() {
    if (has_cached_normal_) {
        has_cached_normal_ = false;
        return cached_normal_;
    }
    // u1 shifted into (0,1] so the log is finite.
    double u1 = 1.0 - uniform01();
    double u2 = uniform01();
    double r = std::sqrt(-2.0 * std::log(u1));
    double a = 6.283185307179586476925286766559 * u2;
    cached_normal_ = r * std::sin(a);
    has_cached_normal_ = true;
    return r * std::cos(a);
}

uint64_t RandomStream::below(uint64_t bound) {
    if (bound == 0) throw std::invalid_argument("below(0)");
    uint64_t limit = ~uint64_t{0} - (~uint64_t{0} % bound + 1) % bound;
    for (;;) {
        uint64_t v = next_u64();
        if (v <= limit) return v % bound;
    }
}

}  // namespace weylwalk
