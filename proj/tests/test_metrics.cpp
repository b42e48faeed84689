#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "holofol/metrics.hpp"
#include "holofol/quadrature.hpp"

using namespace holofol;

namespace {

AmbientPoint pt2(double a, double b) { return AmbientPoint({cplx(a, 0), cplx(b, 0)}); }

// closed-form truncated integrability integrals after u = -log r
double first_integral_closed(double delta, double u0, double ue) {
    // int_{u0}^{ue} u^{2d-2} du
    double p = 2 * delta - 1;
    if (p == 0.0) return std::log(ue / u0);
    return (std::pow(ue, p) - std::pow(u0, p)) / p;
}
double second_integral_closed(double delta, double u0, double ue) {
    // int_{u0}^{ue} u^{-1-2d} du
    double p = -2 * delta;
    if (p == 0.0) return std::log(ue / u0);
    return (std::pow(ue, p) - std::pow(u0, p)) / p;
}

} // namespace

TEST_CASE("xi_value: powers, floor, continuity, errors") {
    auto acc = MetricProfile::accelerating(0.25);
    CHECK(xi_value(acc, std::exp(-16.0)) == doctest::Approx(2.0).epsilon(1e-14));
    auto acc5 = MetricProfile::accelerating(0.5);
    CHECK(xi_value(acc5, std::exp(-4.0)) == doctest::Approx(2.0).epsilon(1e-14));
    auto poi = MetricProfile::poincare();
    CHECK(xi_value(poi, 0.123) == 1.0);
    CHECK(xi_value(poi, 42.0) == 1.0);
    CHECK_THROWS_AS((void)xi_value(acc, 0.0), std::domain_error);
    CHECK_THROWS_AS((void)xi_value(acc, -1.0), std::domain_error);

    double rstar = std::exp(-2.0);
    double left = xi_value(acc, rstar * (1 - 1e-13));
    double right = xi_value(acc, rstar * (1 + 1e-13));
    CHECK(std::fabs(left - right) < 1e-12);

    CHECK_THROWS_AS((void)MetricProfile::accelerating(-0.1), std::invalid_argument);
    CHECK_THROWS_AS((void)MetricProfile::accelerating(1.0), std::invalid_argument);
}

TEST_CASE("eta_estimate matches the Koebe formula") {
    auto model = LinearFoliationModel::make({cplx(1, 0), cplx(0, 1)});
    double em1 = std::exp(-1.0);
    auto chart = LeafChart::at(model, pt2(em1, em1));
    auto [lo, hi] = eta_estimate(chart, model);
    double nl = std::sqrt(2.0) * em1; // ||lambda x||, boundary distance is 1
    CHECK(lo == doctest::Approx(0.5 * nl).epsilon(1e-14));
    CHECK(hi == doctest::Approx(2.0 * nl).epsilon(1e-14));

    auto model11 = LinearFoliationModel::make({cplx(1, 0), cplx(1, 0)});
    for (double a : {2.0, 5.0, 9.0}) {
        double r = std::exp(-a);
        auto ch = LeafChart::at(model11, pt2(r, r));
        auto [l2, h2] = eta_estimate(ch, model11);
        CHECK(h2 / l2 == doctest::Approx(4.0).epsilon(1e-12)); // fixed Koebe ratio
        CHECK(l2 == doctest::Approx(0.5 * std::sqrt(2.0) * r * a).epsilon(1e-12));
    }
}

TEST_CASE("Lemma 2.1 shape: eta interval against ||x|| log* ||x||") {
    auto model = LinearFoliationModel::make({cplx(1, 0), cplx(0, 1)});
    for (double a = 2.0; a <= 30.0; a += 4.0) {
        double r = std::exp(-a);
        auto chart = LeafChart::at(model, pt2(r, r));
        auto [lo, hi] = eta_estimate(chart, model);
        double nx = std::sqrt(2.0) * r;
        double scale = nx * (1.0 + std::fabs(std::log(nx)));
        CHECK(lo / scale > 1.0 / 50.0);
        CHECK(hi / scale < 50.0);
    }
}

TEST_CASE("derivative condition: closed-form ratio and trend") {
    for (double delta : {0.25, 0.5}) {
        auto prof = MetricProfile::accelerating(delta);
        auto rep = check_derivative_condition(prof, 1e-10, 1e-2, 400);
        CHECK(rep.passes);
        // sup of delta (-log r)^-delta sits at r_max
        double expected = delta * std::pow(-std::log(1e-2), -delta);
        CHECK(rep.fitted_c == doctest::Approx(expected).epsilon(1e-6));
    }
    auto poi = MetricProfile::poincare();
    auto rep = check_derivative_condition(poi, 1e-10, 1e-2, 100);
    CHECK(rep.passes);
    CHECK(rep.fitted_c == 0.0);
    CHECK_THROWS_AS((void)check_derivative_condition(poi, 0.1, 0.01, 10), std::invalid_argument);
}

TEST_CASE("check_integrability verdicts match the u-substitution oracle") {
    std::vector<double> eps;
    for (int m = 0; m < 7; ++m) eps.push_back(std::exp(-4.0 * std::pow(2.0, m)));

    for (double delta : {0.1, 0.25, 0.4, 0.5, 0.6, 0.75}) {
        auto prof = MetricProfile::accelerating(delta);
        auto [v1, v2] = check_integrability(prof, eps);
        CHECK(v1.converges == (delta < 0.5));
        CHECK(v2.converges);
        // quadrature against the closed form at the deepest truncation
        double ue = -std::log(eps.back());
        CHECK(v1.truncations.back().second ==
              doctest::Approx(first_integral_closed(delta, 2.0, ue)).epsilon(1e-8));
        CHECK(v2.truncations.back().second ==
              doctest::Approx(second_integral_closed(delta, 2.0, ue)).epsilon(1e-8));
    }

    auto poi = MetricProfile::poincare();
    auto [p1, p2] = check_integrability(poi, eps);
    CHECK(p1.converges);       // int u^-2 du
    CHECK_FALSE(p2.converges); // int du/u, log-divergent
    CHECK_THROWS_AS((void)check_integrability(poi, {0.5, 0.2, 0.1}), std::invalid_argument);
}

TEST_CASE("gaussian curvature: hyperbolic hook, flat hook, deep charts") {
    // exact half-plane density 1/Im(zeta) around i
    auto hyp = ConformalDensity::custom([](cplx z) { return 1.0 / z.imag(); });
    CHECK(gaussian_curvature(hyp, cplx(0.3, 1.0), 1e-4) == doctest::Approx(-1.0).epsilon(1e-3));

    auto flat = ConformalDensity::custom([](cplx) { return 2.5; });
    CHECK(std::fabs(gaussian_curvature(flat, cplx(0, 0), 1e-4)) < 1e-6);

    auto model = LinearFoliationModel::make({cplx(1, 0), cplx(1, 0)});
    auto prof = MetricProfile::accelerating(0.25);
    double r = std::exp(-20.0) / std::sqrt(2.0); // ||x|| = e^-20
    auto chart = LeafChart::at(model, pt2(r, r));
    auto dens = ConformalDensity::leafwise(chart, model, prof);
    double h = 1e-3 * boundary_distance(chart, cplx(0, 0));
    CHECK(std::fabs(gaussian_curvature(dens, cplx(0, 0), h)) < 0.5);

    CHECK_THROWS_AS((void)gaussian_curvature(flat, cplx(0, 0), 1e-8), std::invalid_argument);
    CHECK_THROWS_AS((void)gaussian_curvature(dens, cplx(25.0, 0), 1e-3), std::domain_error);
}

TEST_CASE("leafwise grad_log agrees with finite differences") {
    auto model = LinearFoliationModel::make({cplx(1, 0), cplx(0.7, -0.4)});
    auto chart = LeafChart::at(model, AmbientPoint({cplx(0.05, 0.02), cplx(0.1, 0)}));
    auto prof = MetricProfile::accelerating(0.3);
    auto dens = ConformalDensity::leafwise(chart, model, prof);
    for (cplx z : {cplx(0, 0), cplx(0.4, -0.3), cplx(-1.0, 0.5)}) {
        cplx g = dens.grad_log(z);
        double h = 1e-6;
        double du = (std::log(dens(z + cplx(h, 0))) - std::log(dens(z - cplx(h, 0)))) / (2 * h);
        double dv = (std::log(dens(z + cplx(0, h))) - std::log(dens(z - cplx(0, h)))) / (2 * h);
        cplx fd = 0.5 * cplx(du, -dv);
        CHECK(std::abs(g - fd) < 1e-7);
    }
}

TEST_CASE("disc volume: Euclidean disc, scaling, deep-chart floor") {
    auto flat = ConformalDensity::custom([](cplx) { return 1.0; });
    double v1 = disc_volume(flat, 1.0, 192);
    CHECK(std::fabs(v1 - M_PI) < 0.05 * M_PI);

    auto flat2 = ConformalDensity::custom([](cplx) { return 2.0; });
    double v2 = disc_volume(flat2, 1.0, 192);
    CHECK(std::fabs(v2 - M_PI) < 0.05 * M_PI);

    auto model = LinearFoliationModel::make({cplx(1, 0), cplx(1, 0)});
    auto prof = MetricProfile::accelerating(0.25);
    std::vector<double> vols;
    for (double a : {10.0, 15.0, 20.0}) {
        double r = std::exp(-a) / std::sqrt(2.0);
        auto chart = LeafChart::at(model, pt2(r, r));
        auto dens = ConformalDensity::leafwise(chart, model, prof);
        vols.push_back(disc_volume(dens, 1.0, 160));
    }
    double vmax = *std::max_element(vols.begin(), vols.end());
    for (double v : vols) CHECK(v > 0.5 * vmax); // no vanishing trend toward E

    CHECK_THROWS_AS((void)disc_volume(flat, 1.0, 8), std::invalid_argument);
}
