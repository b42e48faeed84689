#pragma once

// Elementary functions over pack lanes (exp, log, sin/cos pair, pow) plus the
// uniform->normal transform used by the path sampler. One source sequence is
// instantiated for ScalarPack and Avx2Pack; every rounded operation goes
// through pack ops, so a lane computes the same bits in either instantiation.
//
// Polynomial kernels follow the classical fdlibm reductions. Arguments are
// the sampler's: exp on [-740, 709], log on normal positive doubles, sincos
// on [0, 2*pi + eps]. Accuracy target is <= 2 ulp (unit tests check against
// libm at 1e-15 relative).

#include "holofol/pack.hpp"

namespace holofol {

template <class P>
typename P::D vexp(typename P::D x) {
    using D = typename P::D;
    const D log2e = P::set1(1.44269504088896338700e+00);
    const D ln2_hi = P::set1(6.93147180369123816490e-01);
    const D ln2_lo = P::set1(1.90821492927058770002e-10);

    typename P::M too_lo = P::lt(x, P::set1(-708.0));
    typename P::M too_hi = P::gt(x, P::set1(709.7));
    D xc = P::min(P::max(x, P::set1(-708.0)), P::set1(709.7));

    D k = P::nearbyint(P::mul(xc, log2e));
    D r = P::fma(k, P::neg(ln2_hi), xc);
    r = P::fma(k, P::neg(ln2_lo), r);

    // Taylor series to degree 13; |r| <= ln2/2 keeps the remainder below 1 ulp.
    D p = P::set1(1.6059043836821613e-10); // 1/13!
    p = P::fma(p, r, P::set1(2.08767569878680989792e-09));
    p = P::fma(p, r, P::set1(2.50521083854417187751e-08));
    p = P::fma(p, r, P::set1(2.75573192239858906526e-07));
    p = P::fma(p, r, P::set1(2.75573192239858925110e-06));
    p = P::fma(p, r, P::set1(2.48015873015873015873e-05));
    p = P::fma(p, r, P::set1(1.98412698412698412526e-04));
    p = P::fma(p, r, P::set1(1.38888888888888894069e-03));
    p = P::fma(p, r, P::set1(8.33333333333333321769e-03));
    p = P::fma(p, r, P::set1(4.16666666666666643537e-02));
    p = P::fma(p, r, P::set1(1.66666666666666657415e-01));
    p = P::fma(p, r, P::set1(5.00000000000000000000e-01));
    p = P::fma(p, r, P::set1(1.0));
    p = P::fma(p, r, P::set1(1.0));

    D out = P::mul(p, P::ldexp1(k));
    out = P::select(too_lo, P::set1(0.0), out);
    out = P::select(too_hi, P::set1(bits_to_double(0x7ff0000000000000ull)), out);
    return out;
}

template <class P>
typename P::D vlog(typename P::D x) {
    using D = typename P::D;
    D m, e;
    P::log_split(x, m, e);

    D f = P::sub(m, P::set1(1.0));
    D hfsq = P::mul(P::set1(0.5), P::mul(f, f));
    D s = P::div(f, P::add(P::set1(2.0), f));
    D z = P::mul(s, s);
    D w = P::mul(z, z);

    D t1 = P::mul(w, P::fma(w, P::fma(w, P::set1(1.531383769920937332e-01),
                                      P::set1(2.222219843214978396e-01)),
                            P::set1(3.999999999940941908e-01)));
    D t2 = P::mul(z, P::fma(w, P::fma(w, P::fma(w, P::set1(1.479819860511658591e-01),
                                                P::set1(1.818357216161805012e-01)),
                                      P::set1(2.857142874366239149e-01)),
                            P::set1(6.666666666666735130e-01)));
    D R = P::add(t2, t1);

    const D ln2_hi = P::set1(6.93147180369123816490e-01);
    const D ln2_lo = P::set1(1.90821492927058770002e-10);
    D lo = P::fma(s, P::add(hfsq, R), P::mul(e, ln2_lo));
    return P::sub(P::mul(e, ln2_hi), P::sub(P::sub(hfsq, lo), f));
}

// sin and cos for arguments in [-9, 9] (quadrant reduction with a two-part
// pi/2; no large-argument reduction).
template <class P>
void vsincos(typename P::D x, typename P::D& sn, typename P::D& cs) {
    using D = typename P::D;
    const D two_over_pi = P::set1(6.36619772367581382433e-01);
    const D pio2_hi = P::set1(1.57079632673412561417e+00);
    const D pio2_lo = P::set1(6.07710050650619224932e-11);

    D q = P::nearbyint(P::mul(x, two_over_pi));
    D r = P::fma(q, P::neg(pio2_hi), x);
    r = P::fma(q, P::neg(pio2_lo), r);

    D z = P::mul(r, r);

    D sp = P::set1(1.58969099521155010221e-10);
    sp = P::fma(sp, z, P::set1(-2.50507602534068634195e-08));
    sp = P::fma(sp, z, P::set1(2.75573137070700676789e-06));
    sp = P::fma(sp, z, P::set1(-1.98412698298579493134e-04));
    sp = P::fma(sp, z, P::set1(8.33333333332248946124e-03));
    sp = P::fma(sp, z, P::set1(-1.66666666666666324348e-01));
    D s0 = P::fma(P::mul(z, r), sp, r);

    D cp = P::set1(-1.13596475577881948265e-11);
    cp = P::fma(cp, z, P::set1(2.08757232129817482790e-09));
    cp = P::fma(cp, z, P::set1(-2.75573143513906633035e-07));
    cp = P::fma(cp, z, P::set1(2.48015872894767294178e-05));
    cp = P::fma(cp, z, P::set1(-1.38888888888741095749e-03));
    cp = P::fma(cp, z, P::set1(4.16666666666666019037e-02));
    D hz = P::mul(P::set1(0.5), z);
    D w = P::sub(P::set1(1.0), hz);
    D c0 = P::add(w, P::add(P::sub(P::sub(P::set1(1.0), w), hz), P::mul(P::mul(z, z), cp)));

    // quadrant swizzle, computed in the double domain so packs share it
    D qm = P::sub(q, P::mul(P::set1(4.0), P::floor(P::mul(q, P::set1(0.25)))));
    typename P::M m1 = P::eq(qm, P::set1(1.0));
    typename P::M m2 = P::eq(qm, P::set1(2.0));
    typename P::M m3 = P::eq(qm, P::set1(3.0));

    sn = P::select(m1, c0, P::select(m2, P::neg(s0), P::select(m3, P::neg(c0), s0)));
    cs = P::select(m1, P::neg(s0), P::select(m2, P::neg(c0), P::select(m3, s0, c0)));
}

template <class P>
typename P::D vpow(typename P::D x, typename P::D y) {
    return vexp<P>(P::mul(y, vlog<P>(x)));
}

// Box-Muller. u1, u2 must lie in (0, 1); n1 = r cos, n2 = r sin with
// r = sqrt(-2 ln u1), angle = 2 pi u2.
template <class P>
void box_muller(typename P::D u1, typename P::D u2,
                typename P::D& n1, typename P::D& n2) {
    using D = typename P::D;
    D rad = P::sqrt(P::mul(P::set1(-2.0), vlog<P>(u1)));
    D sn, cs;
    vsincos<P>(P::mul(P::set1(6.28318530717958647693e+00), u2), sn, cs);
    n1 = P::mul(rad, cs);
    n2 = P::mul(rad, sn);
}

} // namespace holofol
