#include <doctest.h>

#include <cmath>

#include "holofol/lyapunov.hpp"
#include "holofol/philox.hpp"
#include "holofol/stats.hpp"

using namespace holofol;

namespace {

AmbientPoint pt2(double a, double b) { return AmbientPoint({cplx(a, 0), cplx(b, 0)}); }

PathCocycleData repeat_matrix(const MatC& A, int n) {
    PathCocycleData p;
    for (int i = 0; i < n; ++i) p.incs.push_back({A, 1.0});
    return p;
}

} // namespace

TEST_CASE("synthetic seam: diag(2, 1/2) recovers (log 2, -log 2)") {
    MatC A = MatC::Zero(2, 2);
    A(0, 0) = 2.0;
    A(1, 1) = 0.5;
    auto rep = estimate_spectrum_core(2, {repeat_matrix(A, 10000)});
    REQUIRE(rep.valid);
    REQUIRE(rep.exponents.size() == 2);
    CHECK(rep.exponents[0] == doctest::Approx(std::log(2.0)).epsilon(0.01));
    CHECK(rep.exponents[1] == doctest::Approx(-std::log(2.0)).epsilon(0.01));
    CHECK(rep.multiplicities[0] == 1);
    CHECK(rep.multiplicities[1] == 1);

    // det is multiplicative: sum of exponents matches (1/t) log |det|
    double sum = rep.exponents[0] + rep.exponents[1];
    CHECK(std::fabs(sum - 0.0) < 0.01);
}

TEST_CASE("synthetic seam: triangular matrix exponents are the eigenvalue moduli") {
    MatC A = MatC::Zero(2, 2);
    A(0, 0) = 2.0;
    A(0, 1) = 1.0;
    A(1, 1) = 0.5;
    auto rep = estimate_spectrum_core(2, {repeat_matrix(A, 10000)});
    REQUIRE(rep.valid);
    CHECK(rep.exponents[0] == doctest::Approx(std::log(2.0)).epsilon(0.01));
    CHECK(rep.exponents[1] == doctest::Approx(-std::log(2.0)).epsilon(0.01));

    double logdet_rate = std::log(std::abs(A.determinant()));
    double sum = 0.0;
    for (size_t c = 0; c < rep.exponents.size(); ++c)
        sum += rep.exponents[c] * rep.multiplicities[c];
    CHECK(std::fabs(sum - logdet_rate) < 0.01);
}

TEST_CASE("subspace angle rate: invariant splitting gives slope 0") {
    MatC A = MatC::Zero(2, 2);
    A(0, 0) = 2.0;
    A(1, 1) = 0.5;
    double slope = subspace_angle_rate_core(2, {repeat_matrix(A, 10000)}, {1});
    CHECK(std::fabs(slope) < 0.01);
}

TEST_CASE("subspace angle rate: rotations preserve the angle") {
    CounterRng rng(17, kStreamAux, 0);
    PathCocycleData p;
    for (int i = 0; i < 5000; ++i) {
        double a = 6.283185307179586 * rng.uniform();
        MatC R(2, 2);
        R(0, 0) = std::cos(a);
        R(0, 1) = -std::sin(a);
        R(1, 0) = std::sin(a);
        R(1, 1) = std::cos(a);
        p.incs.push_back({R, 1.0});
    }
    double slope = subspace_angle_rate_core(2, {p}, {1});
    CHECK(std::fabs(slope) < 1e-9);

    auto rep = estimate_spectrum_core(2, {p});
    CHECK(std::fabs(rep.exponents[0]) < 1e-9); // isometries have zero exponents
}

TEST_CASE("subspace angle rate: contract violations throw") {
    MatC A = MatC::Identity(1, 1);
    CHECK_THROWS_AS((void)subspace_angle_rate_core(1, {repeat_matrix(A, 10)}, {1}),
                    std::invalid_argument);
    MatC B = MatC::Identity(2, 2);
    CHECK_THROWS_AS((void)subspace_angle_rate_core(2, {repeat_matrix(B, 10)}, {2}),
                    std::invalid_argument);
}

TEST_CASE("radial_lelong law: support, normalization, equal moduli") {
    auto model = LinearFoliationModel::make({cplx(1, 0), cplx(1, 0)});
    auto law = InitialLaw::radial_lelong(std::exp(-16.0), std::exp(-2.0));
    const int n = 20000;
    int below_mid = 0;
    double u_mid = 5.0;
    for (int i = 0; i < n; ++i) {
        AmbientPoint x = law.sample(model, 77, (uint64_t)i);
        double r = ambient_norm(x);
        double u = -std::log(r);
        CHECK(u >= 2.0 - 1e-9);
        CHECK(u <= 16.0 + 1e-9);
        CHECK(std::abs(std::abs(x.coords[0]) - std::abs(x.coords[1])) < 1e-15);
        if (u <= u_mid) ++below_mid;
    }
    // CDF of the (1+u)^-2 depth density at u_mid
    double flo = 1.0 / 3.0, fhi = 1.0 / 17.0;
    double expect = (flo - 1.0 / (1.0 + u_mid)) / (flo - fhi);
    CHECK(std::fabs((double)below_mid / n - expect) < 0.01);

    CHECK_THROWS_AS((void)InitialLaw::radial_lelong(0.5, 0.1), std::invalid_argument);
}

TEST_CASE("estimate_spectrum: scalar model equals direct path averaging") {
    auto model = LinearFoliationModel::make({cplx(1, 0), cplx(1, 0)});
    double r = std::exp(-30.0) / std::sqrt(2.0);
    auto law = InitialLaw::fixed(pt2(r, r));
    auto prof = MetricProfile::accelerating(0.25);
    SamplerConfig cfg;
    cfg.step = 1e-3;
    cfg.master_seed = 4242;
    auto rep = estimate_spectrum(model, law, prof, cfg, 64, 2.0, 0.02, 2);
    REQUIRE(rep.valid);
    REQUIRE(rep.exponents.size() == 1);
    CHECK(rep.multiplicities[0] == 1);

    // direct oracle: mean over surviving paths of Re zeta(T)/T, same seeds
    BatchOptions opts;
    opts.workers = 2;
    opts.strides = true;
    opts.stride_gt = 0.02;
    SamplerConfig run_cfg = cfg;
    run_cfg.max_g_time = 2.0;
    auto chart = LeafChart::at(model, pt2(r, r));
    auto stats = run_path_batch(model, {chart}, prof, run_cfg, 0, 64, opts);
    std::vector<double> rates;
    for (const auto& ps : stats) {
        if (ps.status == PathStatus::exited || ps.strides.empty()) continue;
        // the estimator sums log|R| over stride increments, which telescopes
        // to Re zeta at the last stride
        rates.push_back(ps.strides.back().zeta.real() / ps.strides.back().g_time);
    }
    MeanStderr direct = mean_stderr(rates);
    CHECK(rep.n_paths_used == (int)rates.size());
    CHECK(rep.exponents[0] == doctest::Approx(direct.mean).epsilon(1e-9));

    // symmetric start, symmetric law: drift compatible with zero
    CHECK(std::fabs(rep.exponents[0]) < 3.0 * std::max(rep.stderrs[0], direct.stderr_));

    CHECK_THROWS_AS(
        (void)estimate_spectrum(model, law, prof, cfg, 8, 2.0, 0.02, 1),
        std::invalid_argument);
    CHECK_THROWS_AS(
        (void)estimate_spectrum(model, law, prof, cfg, 64, 1.0, 0.5, 1),
        std::invalid_argument);
}

TEST_CASE("estimate_spectrum is stable under stride halving") {
    auto model = LinearFoliationModel::make({cplx(1, 0), cplx(1, 0)});
    double r = std::exp(-25.0) / std::sqrt(2.0);
    auto law = InitialLaw::fixed(pt2(r, r));
    auto prof = MetricProfile::accelerating(0.25);
    SamplerConfig cfg;
    cfg.step = 1e-3;
    cfg.master_seed = 7;
    auto rep1 = estimate_spectrum(model, law, prof, cfg, 32, 2.0, 0.02, 2);
    auto rep2 = estimate_spectrum(model, law, prof, cfg, 32, 2.0, 0.01, 2);
    REQUIRE(rep1.valid);
    REQUIRE(rep2.valid);
    double tol = std::max(rep1.stderrs[0], 1e-12);
    CHECK(std::fabs(rep1.exponents[0] - rep2.exponents[0]) < tol);
}

TEST_CASE("estimate_big_f_mean: kernel sup equals a manual replay") {
    auto model = LinearFoliationModel::make({cplx(1, 0), cplx(1, 0)});
    double r = std::exp(-6.0) / std::sqrt(2.0);
    auto prof = MetricProfile::accelerating(0.25);
    SamplerConfig cfg;
    cfg.step = 1e-3;
    cfg.master_seed = 88;
    cfg.max_g_time = 1.0;

    auto chart = LeafChart::at(model, pt2(r, r));
    auto dens = ConformalDensity::leafwise(chart, model, prof);
    BatchOptions opts;
    auto stats = run_path_batch(model, {chart}, prof, cfg, 0, 24, opts);
    for (int i = 0; i < 24; ++i) {
        LeafPath p = sample_path(chart, dens, cfg, (uint64_t)i);
        double manual = 0.0;
        for (const PathNode& n : p.nodes) manual = std::max(manual, std::fabs(n.zeta.real()));
        if ((p.status == PathStatus::alive) == (stats[i].status == PathStatus::alive))
            CHECK(stats[i].sup_log_h == doctest::Approx(manual).epsilon(1e-9));
    }
}

TEST_CASE("estimate_big_f_mean: fixed point far from E, stability in n") {
    auto model = LinearFoliationModel::make({cplx(1, 0), cplx(1, 0)});
    auto law = InitialLaw::fixed(pt2(0.3, 0.3));
    auto prof = MetricProfile::poincare();
    SamplerConfig cfg;
    cfg.step = 1e-3;
    cfg.master_seed = 5;
    auto a = estimate_big_f_mean(model, law, prof, cfg, 1000, 2);
    CHECK(a.mean > 0.0);
    CHECK(std::isfinite(a.mean));
    cfg.master_seed = 6;
    auto b = estimate_big_f_mean(model, law, prof, cfg, 2000, 2);
    CHECK(std::fabs(a.mean - b.mean) <= 3.0 * (a.stderr_ + b.stderr_));
    CHECK_THROWS_AS((void)estimate_big_f_mean(model, law, prof, cfg, 100, 1),
                    std::invalid_argument);
}

TEST_CASE("heavy tail alarm helper fires on power tails only") {
    CounterRng rng(3, kStreamAux, 1);
    std::vector<double> light, heavy;
    for (int i = 0; i < 5000; ++i) {
        double u = rng.uniform();
        light.push_back(u);
        heavy.push_back(std::pow(u, -0.7)); // finite mean, infinite variance
    }
    CHECK_FALSE(heavy_tail_alarm(light));
    CHECK(heavy_tail_alarm(heavy));
}

TEST_CASE("integrability scan: shapes, trends, validation") {
    auto model = LinearFoliationModel::make({cplx(1, 0), cplx(1, 0)});
    std::vector<MetricProfile> profiles{MetricProfile::poincare(),
                                        MetricProfile::accelerating(0.25)};
    std::vector<double> eps{std::exp(-3.0), std::exp(-7.0), std::exp(-13.0)};
    SamplerConfig cfg;
    cfg.step = 1e-3;
    cfg.master_seed = 1;
    auto rep = integrability_scan(model, profiles, eps, std::exp(-2.0), cfg, 1000, 2);
    REQUIRE(rep.rows.size() == 6);
    REQUIRE(rep.verdicts.size() == 2);
    // Poincare truncated means grow with depth; accelerating stays below
    double p0 = rep.rows[0].mean_F, p2 = rep.rows[2].mean_F;
    CHECK(p2 > p0);
    for (size_t i = 0; i < 3; ++i)
        CHECK(rep.rows[3 + i].mean_F < rep.rows[i].mean_F * 1.5 + 5.0);
    for (const auto& row : rep.rows) {
        CHECK(row.mean_F > 0.0);
        CHECK(row.absorbed_fraction >= 0.0);
    }
    CHECK_THROWS_AS(
        (void)integrability_scan(model, profiles, {0.1, 0.05}, 0.5, cfg, 1000, 1),
        std::invalid_argument);
}

TEST_CASE("the Remark's truncated integral: quadrature matches the closed form") {
    for (double eps : {1e-3, std::exp(-8.0), std::exp(-16.0), std::exp(-32.0)}) {
        double c = std::exp(-2.0);
        double closed = remark_divergence_closed_form(eps, c);
        double quad = remark_divergence_quadrature(eps, c);
        CHECK(std::fabs(closed - quad) < 1e-6);
    }
}
