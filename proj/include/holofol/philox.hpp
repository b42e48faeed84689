#pragma once

// Philox4x32-10 counter RNG. Stateless: a (seed, stream, n, path) tuple maps
// to one 128-bit block = two doubles in (0,1). Paths and test generators key
// off their own stream byte, so any path's randomness is reproducible in
// isolation regardless of scheduling or batching.

#include <cstdint>
#include <utility>

#include "holofol/pack.hpp"
#include "holofol/vmath.hpp"

namespace holofol {

namespace philox_detail {
constexpr uint32_t M0 = 0xD2511F53u;
constexpr uint32_t M1 = 0xCD9E8D57u;
constexpr uint32_t W0 = 0x9E3779B9u;
constexpr uint32_t W1 = 0xBB67AE85u;
} // namespace philox_detail

inline void philox4x32_10(uint32_t c[4], uint32_t k0, uint32_t k1) {
    using namespace philox_detail;
    for (int round = 0; round < 10; ++round) {
        uint64_t p0 = (uint64_t)M0 * c[0];
        uint64_t p1 = (uint64_t)M1 * c[2];
        uint32_t hi0 = (uint32_t)(p0 >> 32), lo0 = (uint32_t)p0;
        uint32_t hi1 = (uint32_t)(p1 >> 32), lo1 = (uint32_t)p1;
        uint32_t n0 = hi1 ^ c[1] ^ k0;
        uint32_t n1 = lo1;
        uint32_t n2 = hi0 ^ c[3] ^ k1;
        uint32_t n3 = lo0;
        c[0] = n0; c[1] = n1; c[2] = n2; c[3] = n3;
        k0 += W0; k1 += W1;
    }
}

// streams: 0 = path increments, 1 = initial-law draws, 3 = test utilities
enum : uint32_t {
    kStreamPath = 0,
    kStreamLaw = 1,
    kStreamAux = 3,
};

inline double uniform_from_u64(uint64_t u) {
    // (u52 + 1/2) * 2^-52, exactly; never 0, never 1
    double d = bits_to_double(0x4330000000000000ull | (u >> 12));
    return (d - 4503599627370495.5) * 2.220446049250313e-16;
}

// two uniforms in (0,1) from one block; n must stay below 2^56
inline std::pair<double, double> philox_uniform2(uint64_t seed, uint32_t stream,
                                                 uint64_t n, uint64_t path) {
    uint32_t c[4] = {(uint32_t)n, (uint32_t)(n >> 32) | (stream << 24),
                     (uint32_t)path, (uint32_t)(path >> 32)};
    philox4x32_10(c, (uint32_t)seed, (uint32_t)(seed >> 32));
    uint64_t a = c[0] | ((uint64_t)c[1] << 32);
    uint64_t b = c[2] | ((uint64_t)c[3] << 32);
    return {uniform_from_u64(a), uniform_from_u64(b)};
}

// Sequential convenience wrapper for tests and non-hot sampling.
class CounterRng {
  public:
    CounterRng(uint64_t seed, uint32_t stream, uint64_t path)
        : seed_(seed), stream_(stream), path_(path) {}

    double uniform() {
        if (have_) { have_ = false; return spare_; }
        auto [a, b] = philox_uniform2(seed_, stream_, n_++, path_);
        spare_ = b;
        have_ = true;
        return a;
    }

    std::pair<double, double> normal_pair();

    double normal() {
        if (have_n_) { have_n_ = false; return spare_n_; }
        auto [a, b] = normal_pair();
        spare_n_ = b;
        have_n_ = true;
        return a;
    }

  private:
    uint64_t seed_;
    uint32_t stream_;
    uint64_t path_;
    uint64_t n_ = 0;
    double spare_ = 0;
    bool have_ = false;
    double spare_n_ = 0;
    bool have_n_ = false;
};

inline std::pair<double, double> CounterRng::normal_pair() {
    auto [u1, u2] = philox_uniform2(seed_, stream_, n_++, path_);
    double n1, n2;
    box_muller<ScalarPack>(u1, u2, n1, n2);
    return {n1, n2};
}

#if defined(__AVX2__)

// Four blocks at once; columns hold one u32 word per block in the low half
// of each 64-bit lane.
struct PhiloxX4 {
    __m256i c0, c1, c2, c3;

    static __m256i lo_mask() { return _mm256_set1_epi64x(0xFFFFFFFFll); }

    static PhiloxX4 make(uint64_t n, uint32_t stream, const uint64_t path[4]) {
        PhiloxX4 s;
        s.c0 = _mm256_set1_epi64x((int64_t)(uint32_t)n);
        s.c1 = _mm256_set1_epi64x((int64_t)((uint32_t)(n >> 32) | (stream << 24)));
        s.c2 = _mm256_set_epi64x((int64_t)(uint32_t)path[3], (int64_t)(uint32_t)path[2],
                                 (int64_t)(uint32_t)path[1], (int64_t)(uint32_t)path[0]);
        s.c3 = _mm256_set_epi64x((int64_t)(uint32_t)(path[3] >> 32), (int64_t)(uint32_t)(path[2] >> 32),
                                 (int64_t)(uint32_t)(path[1] >> 32), (int64_t)(uint32_t)(path[0] >> 32));
        return s;
    }

    // returns the two u64 outputs per block
    void run(uint64_t seed, __m256i& outa, __m256i& outb) const {
        using namespace philox_detail;
        const __m256i lom = lo_mask();
        __m256i k0 = _mm256_set1_epi64x((int64_t)(uint32_t)seed);
        __m256i k1 = _mm256_set1_epi64x((int64_t)(uint32_t)(seed >> 32));
        const __m256i m0 = _mm256_set1_epi64x((int64_t)M0);
        const __m256i m1 = _mm256_set1_epi64x((int64_t)M1);
        const __m256i w0 = _mm256_set1_epi64x((int64_t)W0);
        const __m256i w1 = _mm256_set1_epi64x((int64_t)W1);
        __m256i a0 = c0, a1 = c1, a2 = c2, a3 = c3;
        for (int round = 0; round < 10; ++round) {
            __m256i p0 = _mm256_mul_epu32(a0, m0);
            __m256i p1 = _mm256_mul_epu32(a2, m1);
            __m256i hi0 = _mm256_srli_epi64(p0, 32);
            __m256i lo0 = _mm256_and_si256(p0, lom);
            __m256i hi1 = _mm256_srli_epi64(p1, 32);
            __m256i lo1 = _mm256_and_si256(p1, lom);
            __m256i n0 = _mm256_xor_si256(_mm256_xor_si256(hi1, a1), k0);
            __m256i n2 = _mm256_xor_si256(_mm256_xor_si256(hi0, a3), k1);
            a0 = n0; a1 = lo1; a2 = n2; a3 = lo0;
            k0 = _mm256_and_si256(_mm256_add_epi64(k0, w0), lom);
            k1 = _mm256_and_si256(_mm256_add_epi64(k1, w1), lom);
        }
        outa = _mm256_or_si256(a0, _mm256_slli_epi64(a1, 32));
        outb = _mm256_or_si256(a2, _mm256_slli_epi64(a3, 32));
    }
};

inline __m256d uniform_from_u64_x4(__m256i u) {
    __m256i bits = _mm256_or_si256(_mm256_srli_epi64(u, 12),
                                   _mm256_set1_epi64x((int64_t)0x4330000000000000ull));
    __m256d d = _mm256_sub_pd(_mm256_castsi256_pd(bits), _mm256_set1_pd(4503599627370495.5));
    return _mm256_mul_pd(d, _mm256_set1_pd(2.220446049250313e-16));
}

inline void philox_uniform2_x4(uint64_t seed, uint32_t stream, uint64_t n,
                               const uint64_t path[4], __m256d& u1, __m256d& u2) {
    __m256i oa, ob;
    PhiloxX4::make(n, stream, path).run(seed, oa, ob);
    u1 = uniform_from_u64_x4(oa);
    u2 = uniform_from_u64_x4(ob);
}

#endif // __AVX2__

} // namespace holofol
