#pragma once

// Batched path-stepping kernel, shared between the scalar and AVX2
// translation units. One lane = one path. Every rounded operation is a pack
// op or an explicit per-lane scalar sequence, so lane results do not depend
// on how paths are grouped into batches (worker counts, remainders).
//
// Dynamics: zeta_{n+1} = zeta_n + sqrt(step) (N1 + i N2) with the g-clock
// advancing by lambda_g(zeta_n)^2 step per accepted step. For equal-eigenvalue
// models lambda_g depends only on p = s u - t v through the depth
// d = a0 - p, which is what this kernel exploits.

#include <cmath>
#include <cstdint>
#include <vector>

#include "holofol/pack.hpp"
#include "holofol/philox.hpp"
#include "holofol/vmath.hpp"

namespace holofol {
namespace kern {

enum class PowMode { one, quarter, half, three_quarter, generic };

inline PowMode pow_mode_for(bool accelerating, double delta) {
    if (!accelerating) return PowMode::one;
    if (delta == 0.25) return PowMode::quarter;
    if (delta == 0.5) return PowMode::half;
    if (delta == 0.75) return PowMode::three_quarter;
    return PowMode::generic;
}

struct RadialKernelSpec {
    double s = 1.0, t = 0.0; // common eigenvalue
    double dstar = 2.0;      // crossover depth
    double delta = 0.0;
    PowMode pow_mode = PowMode::one;
};

struct StepCfg {
    double step = 1e-4;
    double sqrt_step = 1e-2;
    double max_g = 1.0;
    uint64_t seed = 0;
    uint64_t max_steps = uint64_t(1) << 27;
};

struct BatchObsCfg {
    bool tail = false;    // track sup of the chord proxy distance
    bool strides = false; // record zeta at g-time stride crossings
    double stride_gt = 0.0;
};

enum : uint8_t { kPathDone = 0, kPathExited = 1, kPathTruncated = 2 };

struct PathSummary {
    uint8_t status = kPathDone;
    double g_time = 0.0;
    double steps = 0.0;
    double sup_chord = 0.0;
    double sup_absp = 0.0; // sup |s u - t v| = sup |log||H|||, equal-lambda models
    double end_u = 0.0, end_v = 0.0;
};

struct StrideSample {
    double g_time;
    double u, v;
};

// Cumulative integral of lambda(depth) on a uniform depth grid; Hermite
// interpolation with the exact derivative (= lambda) at the knots. Backs the
// O(1) chord-length evaluation chord(0 -> zeta) = |zeta| (L(a0)-L(a0-p))/p.
struct ChordTable {
    double d_lo = 0.0, h = 1e-3, inv_h = 1e3;
    std::vector<double> cum;
    std::vector<double> lam;

    double lambda_at(double d) const {
        double x = (d - d_lo) * inv_h;
        size_t n = lam.size();
        if (x <= 0.0) return lam.front();
        if (x >= (double)(n - 1)) return lam.back();
        size_t i = (size_t)x;
        double f = x - (double)i;
        return (1.0 - f) * lam[i] + f * lam[i + 1];
    }

    double Lambda(double d) const {
        double x = (d - d_lo) * inv_h;
        size_t n = cum.size();
        if (x <= 0.0) return cum.front() + (d - d_lo) * lam.front();
        if (x >= (double)(n - 1))
            return cum.back() + (d - (d_lo + h * (double)(n - 1))) * lam.back();
        size_t i = (size_t)x;
        double f = x - (double)i;
        double y0 = cum[i], y1 = cum[i + 1];
        double m0 = lam[i] * h, m1 = lam[i + 1] * h;
        double f2 = f * f, f3 = f2 * f;
        return (2 * f3 - 3 * f2 + 1) * y0 + (f3 - 2 * f2 + f) * m0 +
               (-2 * f3 + 3 * f2) * y1 + (f3 - f2) * m1;
    }

    double chord(double u, double v, double p, double a0) const {
        double az = std::hypot(u, v);
        if (std::fabs(p) < 1e-8) return az * lambda_at(a0 - 0.5 * p);
        return az * (Lambda(a0) - Lambda(a0 - p)) / p;
    }
};

template <class P>
inline typename P::D rho_pow(const RadialKernelSpec& ks, typename P::D x) {
    switch (ks.pow_mode) {
        case PowMode::one: return P::set1(1.0);
        case PowMode::quarter: return P::sqrt(P::sqrt(x));
        case PowMode::half: return P::sqrt(x);
        case PowMode::three_quarter: return P::mul(P::sqrt(x), P::sqrt(P::sqrt(x)));
        case PowMode::generic: return vpow<P>(x, P::set1(ks.delta));
    }
    return P::set1(1.0);
}

template <class P>
void run_radial_batch(const RadialKernelSpec& ks, const StepCfg& cfg, const ChordTable* table,
                      const double* a0_in, const double* bmin_in, const uint64_t* path_ids,
                      const BatchObsCfg& obs, PathSummary* out,
                      std::vector<StrideSample>* strides) {
    using D = typename P::D;
    using M = typename P::M;
    constexpr int W = P::width;

    const D a0 = P::load(a0_in);
    const D bmin = P::load(bmin_in);
    const D sS = P::set1(ks.s);
    const D tN = P::set1(-ks.t);
    const D dstar = P::set1(ks.dstar);
    const D stepv = P::set1(cfg.step);
    const D sqrt_step = P::set1(cfg.sqrt_step);
    const D max_g = P::set1(cfg.max_g);
    const D one = P::set1(1.0);

    D u = P::set1(0.0), v = P::set1(0.0), gt = P::set1(0.0);
    D steps = P::set1(0.0), sup_absp = P::set1(0.0);
    M active = P::ge(P::set1(0.0), P::set1(0.0)); // all true
    M exited = P::lt(one, P::set1(0.0));           // all false

    double sup_chord_s[W] = {0.0};
    double next_stride_s[W];
    for (int l = 0; l < W; ++l) next_stride_s[l] = obs.stride_gt;

    double ubuf[W], vbuf[W], pbuf[W], gbuf[W];

    uint64_t n = 0;
    bool truncated = false;
    while (true) {
        // clock advance uses the density at the current node
        D p = P::fma(sS, u, P::mul(tN, v));
        D d = P::sub(a0, p);
        D rho = rho_pow<P>(ks, P::max(d, dstar));
        D lam = P::div(rho, P::add(one, P::abs(d)));
        D gt_new = P::fma(P::mul(lam, lam), stepv, gt);

        D u1, u2;
        if constexpr (W == 1) {
            auto [a, b] = philox_uniform2(cfg.seed, kStreamPath, n, path_ids[0]);
            u1 = a; u2 = b;
        }
#if defined(__AVX2__)
        else {
            philox_uniform2_x4(cfg.seed, kStreamPath, n, path_ids, u1, u2);
        }
#endif
        D n1, n2;
        box_muller<P>(u1, u2, n1, n2);

        D u_new = P::fma(sqrt_step, n1, u);
        D v_new = P::fma(sqrt_step, n2, v);
        D p_new = P::fma(sS, u_new, P::mul(tN, v_new));
        M inside = P::lt(p_new, bmin);
        M accept = P::mand(active, inside);
        M newly_exited = P::mand(active, P::mnot(inside));

        u = P::select(accept, u_new, u);
        v = P::select(accept, v_new, v);
        gt = P::select(accept, gt_new, gt);
        steps = P::select(accept, P::add(steps, one), steps);
        sup_absp = P::select(accept, P::max(sup_absp, P::abs(p_new)), sup_absp);
        exited = P::mor(exited, newly_exited);

        if (obs.tail || obs.strides) {
            int bits;
            if constexpr (W == 1) bits = accept ? 1 : 0;
#if defined(__AVX2__)
            else bits = _mm256_movemask_pd(accept);
#endif
            if (bits) {
                P::store(ubuf, u_new);
                P::store(vbuf, v_new);
                P::store(pbuf, p_new);
                P::store(gbuf, gt);
                for (int l = 0; l < W; ++l) {
                    if (!(bits & (1 << l))) continue;
                    if (obs.tail) {
                        double c = table->chord(ubuf[l], vbuf[l], pbuf[l], a0_in[l]);
                        if (c > sup_chord_s[l]) sup_chord_s[l] = c;
                    }
                    if (obs.strides) {
                        while (gbuf[l] >= next_stride_s[l]) {
                            strides[l].push_back({gbuf[l], ubuf[l], vbuf[l]});
                            next_stride_s[l] += obs.stride_gt;
                        }
                    }
                }
            }
        }

        M done = P::mand(active, P::ge(gt, max_g));
        active = P::mand(active, P::mand(inside, P::mnot(done)));
        ++n;
        if (!P::any(active)) break;
        if (n >= cfg.max_steps) { truncated = true; break; }
    }

    double sbuf[W];
    P::store(ubuf, u);
    P::store(vbuf, v);
    P::store(gbuf, gt);
    P::store(sbuf, steps);
    double apbuf[W];
    P::store(apbuf, sup_absp);
    int exit_bits;
    int active_bits;
    if constexpr (W == 1) {
        exit_bits = exited ? 1 : 0;
        active_bits = active ? 1 : 0;
    }
#if defined(__AVX2__)
    else {
        exit_bits = _mm256_movemask_pd(exited);
        active_bits = _mm256_movemask_pd(active);
    }
#endif
    for (int l = 0; l < W; ++l) {
        PathSummary& o = out[l];
        o.status = (exit_bits & (1 << l)) ? kPathExited
                   : ((truncated && (active_bits & (1 << l))) ? kPathTruncated : kPathDone);
        o.g_time = gbuf[l];
        o.steps = sbuf[l];
        o.sup_chord = sup_chord_s[l];
        o.sup_absp = apbuf[l];
        o.end_u = ubuf[l];
        o.end_v = vbuf[l];
    }
}

} // namespace kern
} // namespace holofol
