#pragma once

// Adaptive Gauss-Kronrod (G7,K15) quadrature with a worst-interval-first
// subdivision queue, plus a variant that pre-splits geometrically for
// integrands spread over many decades.

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace holofol {

struct QuadResult {
    double value = 0.0;
    double error = 0.0;
    bool converged = false;
};

template <class F>
double gk15(const F& f, double a, double b, double& err) {
    static const double xk[8] = {
        0.000000000000000, 0.207784955007898, 0.405845151377397, 0.586087235467691,
        0.741531185599394, 0.864864423359769, 0.949107912342759, 0.991455371120813};
    static const double wk[8] = {
        0.209482141084728, 0.204432940075298, 0.190350578064785, 0.169004726639267,
        0.140653259715525, 0.104790010322250, 0.063092092629979, 0.022935322010529};
    static const double wg[4] = {
        0.417959183673469, 0.381830050505119, 0.279705391489277, 0.129484966168870};

    const double mid = 0.5 * (a + b);
    const double hl = 0.5 * (b - a);

    double f0 = f(mid);
    double k15 = wk[0] * f0;
    double g7 = wg[0] * f0;
    for (int i = 1; i < 8; ++i) {
        double fi = f(mid + hl * xk[i]) + f(mid - hl * xk[i]);
        k15 += wk[i] * fi;
        if (i % 2 == 0) g7 += wg[i / 2] * fi;
    }
    k15 *= hl;
    g7 *= hl;
    err = std::pow(200.0 * std::fabs(k15 - g7), 1.5);
    if (!std::isfinite(err)) err = std::fabs(k15 - g7);
    return k15;
}

template <class F>
QuadResult integrate_adaptive(const F& f, double a, double b,
                              double rel_tol = 1e-10, double abs_tol = 1e-302,
                              int max_intervals = 20000) {
    struct Seg { double a, b, val, err; };
    std::vector<Seg> segs;
    double err0;
    double v0 = gk15(f, a, b, err0);
    if (!std::isfinite(v0))
        throw std::runtime_error("quadrature: non-finite integrand");
    segs.push_back({a, b, v0, err0});

    auto worst = [&segs]() {
        size_t w = 0;
        for (size_t i = 1; i < segs.size(); ++i)
            if (segs[i].err > segs[w].err) w = i;
        return w;
    };

    for (int it = 0; it < max_intervals; ++it) {
        double total = 0.0, toterr = 0.0;
        for (const Seg& s : segs) { total += s.val; toterr += s.err; }
        if (toterr <= std::max(rel_tol * std::fabs(total), abs_tol))
            return {total, toterr, true};
        size_t w = worst();
        Seg s = segs[w];
        segs.erase(segs.begin() + (long)w);
        double m = 0.5 * (s.a + s.b);
        double e1, e2;
        double v1 = gk15(f, s.a, m, e1);
        double v2 = gk15(f, m, s.b, e2);
        if (!std::isfinite(v1) || !std::isfinite(v2))
            throw std::runtime_error("quadrature: non-finite integrand");
        segs.push_back({s.a, m, v1, e1});
        segs.push_back({m, s.b, v2, e2});
    }
    double total = 0.0, toterr = 0.0;
    for (const Seg& s : segs) { total += s.val; toterr += s.err; }
    return {total, toterr, false};
}

// Integrate f over [a, b], 0 < a < b, splitting at doublings of a first so
// that integrands varying over many decades start from balanced panels.
template <class F>
QuadResult integrate_geometric(const F& f, double a, double b, double rel_tol = 1e-10) {
    if (!(a > 0.0 && b > a))
        throw std::invalid_argument("integrate_geometric: need 0 < a < b");
    QuadResult acc{0.0, 0.0, true};
    double lo = a;
    while (lo < b) {
        double hi = std::min(b, lo * 2.0);
        QuadResult r = integrate_adaptive(f, lo, hi, rel_tol);
        acc.value += r.value;
        acc.error += r.error;
        acc.converged = acc.converged && r.converged;
        lo = hi;
    }
    return acc;
}

} // namespace holofol
