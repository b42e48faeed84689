#include <doctest.h>

#include <cmath>
#include <random>

#include "holofol/philox.hpp"
#include "holofol/vmath.hpp"

using namespace holofol;

namespace {
double rel_err(double got, double want) {
    if (want == 0.0) return std::fabs(got);
    return std::fabs(got - want) / std::fabs(want);
}
} // namespace

TEST_CASE("scalar vexp matches libm across the sampler range") {
    std::mt19937_64 gen(1234);
    std::uniform_real_distribution<double> wide(-700.0, 700.0), narrow(-40.0, 40.0);
    double worst = 0.0;
    for (int i = 0; i < 200000; ++i) {
        double x = (i % 2) ? wide(gen) : narrow(gen);
        double got = vexp<ScalarPack>(x);
        double want = std::exp(x);
        worst = std::max(worst, rel_err(got, want));
    }
    CHECK(worst < 5e-15);
    CHECK(vexp<ScalarPack>(0.0) == 1.0);
    CHECK(vexp<ScalarPack>(-800.0) == 0.0);
    CHECK(std::isinf(vexp<ScalarPack>(800.0)));
}

TEST_CASE("scalar vlog matches libm") {
    std::mt19937_64 gen(99);
    std::uniform_real_distribution<double> mag(-300.0, 300.0);
    double worst = 0.0;
    for (int i = 0; i < 200000; ++i) {
        double x = std::pow(10.0, mag(gen));
        double got = vlog<ScalarPack>(x);
        double want = std::log(x);
        worst = std::max(worst, want == 0.0 ? std::fabs(got) : rel_err(got, want));
    }
    CHECK(worst < 5e-15);
    CHECK(vlog<ScalarPack>(1.0) == 0.0);
}

TEST_CASE("scalar vsincos matches libm on [0, 2pi]") {
    double worst = 0.0;
    for (int i = 0; i <= 400000; ++i) {
        double x = 6.283185307179586 * i / 400000.0;
        double s, c;
        vsincos<ScalarPack>(x, s, c);
        worst = std::max(worst, std::fabs(s - std::sin(x)));
        worst = std::max(worst, std::fabs(c - std::cos(x)));
    }
    CHECK(worst < 5e-15); // absolute: values are in [-1,1]
}

TEST_CASE("box_muller produces sane standard normals") {
    // moments over a large deterministic sample
    double s1 = 0, s2 = 0, s4 = 0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) {
        auto [u1, u2] = philox_uniform2(7, kStreamAux, i, 0);
        double a, b;
        box_muller<ScalarPack>(u1, u2, a, b);
        s1 += a + b;
        s2 += a * a + b * b;
        s4 += a * a * a * a + b * b * b * b;
    }
    double m1 = s1 / (2 * n), m2 = s2 / (2 * n), m4 = s4 / (2 * n);
    CHECK(std::fabs(m1) < 0.01);
    CHECK(std::fabs(m2 - 1.0) < 0.01);
    CHECK(std::fabs(m4 - 3.0) < 0.08);
}
