#include "holofol/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <stdexcept>

#include "holofol/quadrature.hpp"

namespace holofol {

MetricProfile MetricProfile::poincare() {
    return MetricProfile{MetricKind::poincare, 0.0, 2.0};
}

MetricProfile MetricProfile::accelerating(double delta) {
    if (!(delta > 0.0 && delta < 1.0))
        throw std::invalid_argument("delta must lie in (0, 1)");
    return MetricProfile{MetricKind::accelerating, delta, 2.0};
}

double MetricProfile::rho(double r) const {
    if (kind == MetricKind::poincare) return 1.0;
    double u = -std::log(r);
    if (u <= crossover_depth) return std::pow(crossover_depth, delta);
    return std::pow(u, delta);
}

double MetricProfile::rho_prime(double r) const {
    if (kind == MetricKind::poincare) return 0.0;
    double u = -std::log(r);
    if (u <= crossover_depth) return 0.0;
    return -delta * std::pow(u, delta - 1.0) / r;
}

double MetricProfile::rho_of_depth(double d) const {
    if (kind == MetricKind::poincare) return 1.0;
    if (d <= crossover_depth) return std::pow(crossover_depth, delta);
    return std::pow(d, delta);
}

double MetricProfile::dlog_rho_ddepth(double d) const {
    if (kind == MetricKind::poincare) return 0.0;
    if (d <= crossover_depth) return 0.0;
    return delta / d;
}

const char* MetricProfile::name() const {
    return kind == MetricKind::poincare ? "poincare" : "accelerating";
}

double xi_value(const MetricProfile& profile, double r) {
    if (!(r > 0.0))
        throw std::domain_error("xi_value: r must be positive");
    return profile.rho(r);
}

double lambda_of_depth(const MetricProfile& profile, double d) {
    return profile.rho_of_depth(d) / (1.0 + std::fabs(d));
}

DerivativeConditionReport check_derivative_condition(const MetricProfile& profile,
                                                     double r_min, double r_max, int samples) {
    if (!(r_min > 0.0 && r_min < r_max && r_max < 1.0) || samples < 2)
        throw std::invalid_argument("check_derivative_condition: invalid range");
    double lmin = std::log(r_min), lmax = std::log(r_max);
    std::vector<double> lr(samples), ratio(samples);
    for (int i = 0; i < samples; ++i) {
        lr[i] = lmin + (lmax - lmin) * i / (samples - 1);
        double r = std::exp(lr[i]);
        double rp = profile.rho_prime(r);
        double rh = profile.rho(r);
        ratio[i] = std::fabs(rp) * r * (-std::log(r)) / (rh * rh);
    }
    double sup = 0.0;
    bool finite = true;
    for (double v : ratio) {
        if (!std::isfinite(v)) finite = false;
        sup = std::max(sup, v);
    }
    // trendwise non-increasing toward r -> 0: per-decade suprema must not grow
    bool trend_ok = true;
    double span = lmax - lmin;
    int buckets = std::max(2, std::min(8, (int)(span / std::log(10.0)) + 1));
    std::vector<double> bucket_sup(buckets, 0.0);
    for (int i = 0; i < samples; ++i) {
        int b = std::min(buckets - 1, (int)((lr[i] - lmin) / span * buckets));
        bucket_sup[b] = std::max(bucket_sup[b], ratio[i]);
    }
    for (int b = buckets - 1; b > 0; --b) // decreasing r direction
        if (bucket_sup[b - 1] > bucket_sup[b] * 1.10 + 1e-300) trend_ok = false;
    return {finite && trend_ok, sup};
}

namespace {

IntegrabilityVerdict classify_truncations(std::vector<std::pair<double, double>> vals) {
    IntegrabilityVerdict v;
    v.truncations = std::move(vals);
    size_t n = v.truncations.size();
    if (n < 3)
        throw std::invalid_argument("check_integrability: need at least 3 epsilons");

    // fit log(increment) against log(u) where u = -log(eps); a convergent
    // integral has increments ~ u^-beta with beta > 0
    std::vector<double> lx, ly;
    for (size_t i = 1; i < n; ++i) {
        double inc = v.truncations[i].second - v.truncations[i - 1].second;
        double u = -std::log(v.truncations[i].first);
        if (inc > 0.0 && std::isfinite(inc)) {
            lx.push_back(std::log(u));
            ly.push_back(std::log(inc));
        }
    }
    double beta = 0.0;
    if (lx.size() >= 2) {
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        for (size_t i = 0; i < lx.size(); ++i) {
            sx += lx[i]; sy += ly[i]; sxx += lx[i] * lx[i]; sxy += lx[i] * ly[i];
        }
        double m = lx.size();
        beta = -(m * sxy - sx * sy) / (m * sxx - sx * sx);
    } else {
        beta = std::numeric_limits<double>::infinity(); // increments vanished
    }
    v.tail_exponent = beta;
    v.converges = beta >= 0.1;

    double last = v.truncations[n - 1].second, prev = v.truncations[n - 2].second;
    v.cauchy_1pct = std::fabs(last - prev) < 0.01 * std::fabs(last);

    // spec's 10%-per-decade divergence flag over the last 3 decades of eps
    int grow_count = 0;
    for (size_t i = 1; i < n; ++i) {
        double decades = (std::log(v.truncations[i - 1].first) - std::log(v.truncations[i].first)) / std::log(10.0);
        if (decades <= 0) continue;
        double rel = (v.truncations[i].second - v.truncations[i - 1].second) /
                     std::max(std::fabs(v.truncations[i - 1].second), 1e-300);
        if (rel / decades > 0.10) ++grow_count; else grow_count = 0;
    }
    v.grows_10pct_per_decade = grow_count >= 3;
    return v;
}

} // namespace

std::pair<IntegrabilityVerdict, IntegrabilityVerdict>
check_integrability(const MetricProfile& profile, const std::vector<double>& eps_seq) {
    if (eps_seq.size() < 3)
        throw std::invalid_argument("check_integrability: need at least 3 epsilons");
    double rstar = std::exp(-profile.crossover_depth);
    double prev = rstar;
    for (double e : eps_seq) {
        if (!(e > 1e-300 && e < prev))
            throw std::invalid_argument("check_integrability: epsilons must decrease below the crossover");
        prev = e;
    }
    double ustar = profile.crossover_depth;
    auto f1 = [&](double u) { double rh = profile.rho_of_depth(u); return rh * rh / (u * u); };
    auto f2 = [&](double u) { double rh = profile.rho_of_depth(u); return 1.0 / (rh * rh * u); };

    std::vector<std::pair<double, double>> v1, v2;
    for (double e : eps_seq) {
        double ue = -std::log(e);
        v1.push_back({e, integrate_geometric(f1, ustar, ue, 1e-11).value});
        v2.push_back({e, integrate_geometric(f2, ustar, ue, 1e-11).value});
    }
    return {classify_truncations(std::move(v1)), classify_truncations(std::move(v2))};
}

ConformalDensity ConformalDensity::leafwise(const LeafChart& chart, const LinearFoliationModel& model,
                                            const MetricProfile& profile) {
    ConformalDensity d;
    d.leafwise_ = true;
    d.chart_ = chart;
    d.model_ = model;
    d.profile_ = profile;
    return d;
}

ConformalDensity ConformalDensity::custom(std::function<double(cplx)> lambda,
                                          std::function<cplx(cplx)> grad_log) {
    ConformalDensity d;
    d.leafwise_ = false;
    d.custom_ = std::move(lambda);
    d.custom_grad_ = std::move(grad_log);
    return d;
}

double ConformalDensity::depth(cplx zeta) const {
    double u = zeta.real(), v = zeta.imag();
    double n2 = 0.0;
    for (size_t j = 0; j < chart_.base.coords.size(); ++j) {
        double w = model_.lambdas[j].real() * u - model_.lambdas[j].imag() * v;
        n2 += std::norm(chart_.base.coords[j]) * std::exp(2.0 * w);
    }
    return -0.5 * std::log(n2);
}

double ConformalDensity::operator()(cplx zeta) const {
    if (!leafwise_) return custom_(zeta);
    double d = depth(zeta);
    return lambda_of_depth(profile_, d);
}

cplx ConformalDensity::grad_log(cplx zeta) const {
    if (!leafwise_) {
        if (custom_grad_) return custom_grad_(zeta);
        double h = 1e-6;
        double lu1 = std::log(custom_(zeta + cplx(h, 0)));
        double lu0 = std::log(custom_(zeta - cplx(h, 0)));
        double lv1 = std::log(custom_(zeta + cplx(0, h)));
        double lv0 = std::log(custom_(zeta - cplx(0, h)));
        return 0.5 * cplx((lu1 - lu0) / (2 * h), -(lv1 - lv0) / (2 * h));
    }
    double u = zeta.real(), v = zeta.imag();
    double n2 = 0.0, su = 0.0, sv = 0.0;
    for (size_t j = 0; j < chart_.base.coords.size(); ++j) {
        double s = model_.lambdas[j].real(), t = model_.lambdas[j].imag();
        double nj = std::norm(chart_.base.coords[j]) * std::exp(2.0 * (s * u - t * v));
        n2 += nj;
        su += nj * s;
        sv += nj * t;
    }
    double d = -0.5 * std::log(n2);
    // d/du depth = -su/n2, d/dv depth = +sv/n2
    double dd_du = -su / n2, dd_dv = sv / n2;
    double dlog_dd = profile_.dlog_rho_ddepth(d) - ((d >= 0.0 ? 1.0 : -1.0) / (1.0 + std::fabs(d)));
    return 0.5 * dlog_dd * cplx(dd_du, -dd_dv);
}

std::pair<double, double> eta_estimate(const LeafChart& chart, const LinearFoliationModel& model) {
    double d0 = boundary_distance(chart, cplx(0.0, 0.0));
    double nl = vec_norm(lambda_times(model, chart.base));
    if (!(nl > 0.0))
        throw std::domain_error("eta_estimate: chart undefined at singularity");
    return {0.5 * nl * d0, 2.0 * nl * d0};
}

double gaussian_curvature(const ConformalDensity& density, cplx zeta, double h) {
    if (h < 1e-7)
        throw std::invalid_argument("gaussian_curvature: h below float-precision floor");
    const cplx offs[4] = {cplx(h, 0), cplx(-h, 0), cplx(0, h), cplx(0, -h)};
    if (density.is_leafwise()) {
        if (!contains_zeta(density.chart(), zeta))
            throw std::domain_error("gaussian_curvature: stencil leaves the polygon");
        for (const cplx& o : offs)
            if (!contains_zeta(density.chart(), zeta + o))
                throw std::domain_error("gaussian_curvature: stencil leaves the polygon");
    }
    double lc = density(zeta);
    double sum = 0.0;
    for (const cplx& o : offs) {
        double l = density(zeta + o);
        if (!(l > 0.0) || !std::isfinite(l))
            throw std::domain_error("gaussian_curvature: density not positive on stencil");
        sum += std::log(l);
    }
    double lap = (sum - 4.0 * std::log(lc)) / (h * h);
    return -lap / (lc * lc);
}

double disc_volume(const ConformalDensity& density, double radius_g, int grid) {
    if (grid < 16)
        throw std::invalid_argument("disc_volume: grid must be >= 16");
    if (!(radius_g > 0.0))
        throw std::invalid_argument("disc_volume: radius must be positive");

    const int offs[16][2] = {{1, 0},  {-1, 0}, {0, 1},  {0, -1}, {1, 1},   {1, -1}, {-1, 1}, {-1, -1},
                             {1, 2},  {2, 1},  {-1, 2}, {-2, 1}, {1, -2},  {2, -1}, {-1, -2}, {-2, -1}};

    double halfw = 3.0 * radius_g / density(cplx(0, 0));
    for (int attempt = 0; attempt < 5; ++attempt) {
        const int n = grid;
        const double hstep = 2.0 * halfw / (n - 1);
        auto node = [&](int i, int j) {
            return cplx(-halfw + hstep * i, -halfw + hstep * j);
        };
        std::vector<double> lam(n * n, -1.0), dist(n * n, std::numeric_limits<double>::infinity());
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                cplx z = node(i, j);
                if (density.is_leafwise() && !contains_zeta(density.chart(), z)) continue;
                lam[i * n + j] = density(z);
            }
        const int c = (n - 1) / 2;
        using QE = std::pair<double, int>;
        std::priority_queue<QE, std::vector<QE>, std::greater<QE>> pq;
        dist[c * n + c] = 0.0;
        pq.push({0.0, c * n + c});
        while (!pq.empty()) {
            auto [dcur, id] = pq.top();
            pq.pop();
            if (dcur > dist[id] || dcur >= radius_g) continue;
            int i = id / n, j = id % n;
            for (const auto& o : offs) {
                int ii = i + o[0], jj = j + o[1];
                if (ii < 0 || jj < 0 || ii >= n || jj >= n) continue;
                int nid = ii * n + jj;
                if (lam[nid] < 0.0 || lam[id] < 0.0) continue;
                double mid_lam = density(0.5 * (node(i, j) + node(ii, jj)));
                if (!(mid_lam > 0.0)) continue;
                double w = mid_lam * hstep * std::hypot((double)o[0], (double)o[1]);
                if (dist[id] + w < dist[nid]) {
                    dist[nid] = dist[id] + w;
                    pq.push({dist[nid], nid});
                }
            }
        }
        bool escapes = false;
        for (int i = 0; i < n && !escapes; ++i)
            if (dist[i * n] < radius_g || dist[i * n + n - 1] < radius_g ||
                dist[i] < radius_g || dist[(n - 1) * n + i] < radius_g)
                escapes = true;
        if (escapes) {
            halfw *= 1.6;
            continue;
        }
        double vol = 0.0;
        for (int id = 0; id < n * n; ++id)
            if (dist[id] < radius_g && lam[id] > 0.0)
                vol += lam[id] * lam[id] * hstep * hstep;
        return vol;
    }
    throw std::runtime_error("disc_volume: sublevel set escapes the sampled window");
}

} // namespace holofol
