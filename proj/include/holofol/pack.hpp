#pragma once

// Lane abstractions for the batched path kernels. ScalarPack and Avx2Pack
// expose the same operation set; all rounded arithmetic goes through these
// ops so that a computation written once against the pack type produces
// bit-identical per-lane results in both instantiations (fma is always
// explicit, never compiler-contracted; see -ffp-contract=off in the build).
//
// The two bit-level helpers (ldexp1, log_split) are exact integer
// manipulations of the IEEE representation and carry no rounding.

#include <cmath>
#include <cstdint>
#include <cstring>

#if defined(__AVX2__)
#include <immintrin.h>
#endif

namespace holofol {

inline double bits_to_double(uint64_t u) {
    double d;
    std::memcpy(&d, &u, 8);
    return d;
}
inline uint64_t double_to_bits(double d) {
    uint64_t u;
    std::memcpy(&u, &d, 8);
    return u;
}

struct ScalarPack {
    static constexpr int width = 1;
    using D = double;
    using M = bool;

    static D set1(double x) { return x; }
    static D load(const double* p) { return *p; }
    static void store(double* p, D x) { *p = x; }

    static D add(D a, D b) { return a + b; }
    static D sub(D a, D b) { return a - b; }
    static D mul(D a, D b) { return a * b; }
    static D div(D a, D b) { return a / b; }
    static D fma(D a, D b, D c) { return std::fma(a, b, c); }
    static D sqrt(D a) { return std::sqrt(a); }
    static D neg(D a) { return -a; }
    static D abs(D a) { return std::fabs(a); }
    static D min(D a, D b) { return b < a ? b : a; }
    static D max(D a, D b) { return a < b ? b : a; }

    static M lt(D a, D b) { return a < b; }
    static M le(D a, D b) { return a <= b; }
    static M gt(D a, D b) { return a > b; }
    static M ge(D a, D b) { return a >= b; }
    static M eq(D a, D b) { return a == b; }
    static D select(M m, D a, D b) { return m ? a : b; }
    static M mand(M a, M b) { return a && b; }
    static M mor(M a, M b) { return a || b; }
    static M mnot(M a) { return !a; }
    static bool any(M m) { return m; }
    static bool all(M m) { return m; }

    static D nearbyint(D a) { return std::nearbyint(a); }
    static D floor(D a) { return std::floor(a); }

    // 2^k for integral k in [-1074, 1024], exact.
    static D ldexp1(D k) {
        int64_t ki = (int64_t)k;
        if (ki >= 1024) return bits_to_double(0x7ff0000000000000ull);
        if (ki < -1022) {
            // subnormal range: split as 2^(k+64) * 2^-64 to stay exact
            if (ki < -1074) return 0.0;
            uint64_t u = (uint64_t)(ki + 64 + 1023) << 52;
            return bits_to_double(u) * bits_to_double((uint64_t)(1023 - 64) << 52);
        }
        return bits_to_double((uint64_t)(ki + 1023) << 52);
    }

    // x = m * 2^e with m in [sqrt(2)/2, sqrt(2)); x must be positive, finite, normal.
    static void log_split(D x, D& m, D& e) {
        uint64_t u = double_to_bits(x);
        u += 0x3ff0000000000000ull - 0x3fe6a09e667f3bcdull;
        int64_t k = (int64_t)(u >> 52) - 1023;
        u = (u & 0x000fffffffffffffull) + 0x3fe6a09e667f3bcdull;
        m = bits_to_double(u);
        e = (double)k;
    }
};

#if defined(__AVX2__)

struct Avx2Pack {
    static constexpr int width = 4;
    using D = __m256d;
    using M = __m256d;

    static D set1(double x) { return _mm256_set1_pd(x); }
    static D load(const double* p) { return _mm256_loadu_pd(p); }
    static void store(double* p, D x) { _mm256_storeu_pd(p, x); }

    static D add(D a, D b) { return _mm256_add_pd(a, b); }
    static D sub(D a, D b) { return _mm256_sub_pd(a, b); }
    static D mul(D a, D b) { return _mm256_mul_pd(a, b); }
    static D div(D a, D b) { return _mm256_div_pd(a, b); }
    static D fma(D a, D b, D c) { return _mm256_fmadd_pd(a, b, c); }
    static D sqrt(D a) { return _mm256_sqrt_pd(a); }
    static D neg(D a) { return _mm256_xor_pd(a, _mm256_set1_pd(-0.0)); }
    static D abs(D a) { return _mm256_andnot_pd(_mm256_set1_pd(-0.0), a); }
    static D min(D a, D b) { return _mm256_min_pd(a, b); }
    static D max(D a, D b) { return _mm256_max_pd(a, b); }

    static M lt(D a, D b) { return _mm256_cmp_pd(a, b, _CMP_LT_OQ); }
    static M le(D a, D b) { return _mm256_cmp_pd(a, b, _CMP_LE_OQ); }
    static M gt(D a, D b) { return _mm256_cmp_pd(a, b, _CMP_GT_OQ); }
    static M ge(D a, D b) { return _mm256_cmp_pd(a, b, _CMP_GE_OQ); }
    static M eq(D a, D b) { return _mm256_cmp_pd(a, b, _CMP_EQ_OQ); }
    static D select(M m, D a, D b) { return _mm256_blendv_pd(b, a, m); }
    static M mand(M a, M b) { return _mm256_and_pd(a, b); }
    static M mor(M a, M b) { return _mm256_or_pd(a, b); }
    static M mnot(M a) { return _mm256_xor_pd(a, _mm256_castsi256_pd(_mm256_set1_epi64x(-1))); }
    static bool any(M m) { return _mm256_movemask_pd(m) != 0; }
    static bool all(M m) { return _mm256_movemask_pd(m) == 0xf; }

    static D nearbyint(D a) { return _mm256_round_pd(a, _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC); }
    static D floor(D a) { return _mm256_floor_pd(a); }

    // int64 lanes with small values -> double lanes
    static D small_i64_to_pd(__m256i v) {
        // take the low 32 bits of each 64-bit lane (values fit in int32)
        __m256i sh = _mm256_shuffle_epi32(v, _MM_SHUFFLE(3, 1, 2, 0)); // lo dwords to front of each 128 half
        __m128i lo = _mm256_castsi256_si128(sh);
        __m128i hi = _mm256_extracti128_si256(sh, 1);
        __m128i packed = _mm_unpacklo_epi64(lo, hi);
        return _mm256_cvtepi32_pd(packed);
    }

    static D ldexp1(D k) {
        // the kernels keep arguments inside the normal range after clamping
        __m128i k32 = _mm256_cvtpd_epi32(k);
        __m256i k64 = _mm256_cvtepi32_epi64(k32);
        __m256i bits = _mm256_slli_epi64(_mm256_add_epi64(k64, _mm256_set1_epi64x(1023)), 52);
        return _mm256_castsi256_pd(bits);
    }

    static void log_split(D x, D& m, D& e) {
        __m256i u = _mm256_castpd_si256(x);
        u = _mm256_add_epi64(u, _mm256_set1_epi64x((int64_t)(0x3ff0000000000000ull - 0x3fe6a09e667f3bcdull)));
        __m256i k = _mm256_sub_epi64(_mm256_srli_epi64(u, 52), _mm256_set1_epi64x(1023));
        u = _mm256_add_epi64(_mm256_and_si256(u, _mm256_set1_epi64x((int64_t)0x000fffffffffffffull)),
                             _mm256_set1_epi64x((int64_t)0x3fe6a09e667f3bcdull));
        m = _mm256_castsi256_pd(u);
        e = small_i64_to_pd(k);
    }
};

#endif // __AVX2__

} // namespace holofol
