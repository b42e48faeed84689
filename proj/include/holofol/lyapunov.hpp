#pragma once

// Monte Carlo Oseledec machinery: Lyapunov spectrum by QR
// re-orthonormalization of cocycle increments along sampled paths, the
// integrability diagnostics for F(omega) = sup_{t<=1} max |log of the
// cocycle norms|, and the accelerating-vs-Poincare truncation scan.
//
// Initial base points come from a parameterized model family standing in for
// the harmonic measure: the Lelong-number bound m(r) <~ r^2 on the current's
// mass, divided by the squared leaf/Poincare scale eta(r)^2 ~ (r log* r)^2,
// yields the radial density dr / (r (log* r)^2) used by radial_lelong.

#include <functional>
#include <string>
#include <vector>

#include "holofol/holonomy.hpp"

namespace holofol {

struct InitialLaw {
    enum class Kind { fixed_point, radial_lelong };
    Kind kind = Kind::fixed_point;
    AmbientPoint point;
    double eps = 0.0, outer_c = 0.0;

    static InitialLaw fixed(AmbientPoint p);
    static InitialLaw radial_lelong(double eps, double outer_c); // 0 < eps < c < 1

    // equal-moduli coordinates r/sqrt(k), independent uniform phases; draws
    // are keyed by (seed, law stream, path_index)
    AmbientPoint sample(const LinearFoliationModel& model, uint64_t seed,
                        uint64_t path_index) const;
};

struct LyapunovReport {
    std::vector<double> exponents;      // cluster means, descending
    std::vector<int> multiplicities;    // sum = k-1
    std::vector<double> stderrs;        // per cluster
    std::vector<double> subspace_angle_rates; // per cluster boundary
    int n_paths_used = 0;
    double absorbed_fraction = 0.0;
    double total_g_time = 0.0;
    bool valid = false;
};

// ---- cocycle-source seam ----
// estimate_spectrum_core consumes per-path increment sequences; the
// foliation estimator builds them from stride frames, tests may inject
// synthetic matrices.

struct CocycleIncrement {
    MatC A;
    double dt;
};

struct PathCocycleData {
    std::vector<CocycleIncrement> incs;
};

LyapunovReport estimate_spectrum_core(int dim, const std::vector<PathCocycleData>& paths);

// fitted slope of (1/t) log sin(angle) against t for the leading partition
// S = {1..j} of the QR filtration proxy (images of the initial coordinate
// splitting under the running cocycle product); throws for dim < 2 or a
// non-leading partition
double subspace_angle_rate_core(int dim, const std::vector<PathCocycleData>& paths,
                                const std::vector<int>& S);

LyapunovReport estimate_spectrum(const LinearFoliationModel& model, const InitialLaw& law,
                                 const MetricProfile& profile, const SamplerConfig& cfg,
                                 int n_paths, double horizon_g_time, double qr_stride,
                                 int workers = 1);

struct BigFMeanResult {
    double mean = 0.0;
    double stderr_ = 0.0;
    double absorbed_fraction = 0.0;
    bool heavy_tail_alarm = false; // dropping the top 1% moved the mean > 5 stderr
    int n_used = 0;
};

BigFMeanResult estimate_big_f_mean(const LinearFoliationModel& model, const InitialLaw& law,
                                   const MetricProfile& profile, const SamplerConfig& cfg,
                                   int n_paths, int workers = 1);

struct ScanRow {
    std::string profile;
    double delta = 0.0;
    double epsilon = 0.0;
    double mean_F = 0.0;
    double stderr_ = 0.0;
    double absorbed_fraction = 0.0;
    bool heavy_tail_alarm = false;
};

struct ScanVerdict {
    std::string profile;
    double delta = 0.0;
    std::string verdict; // CONVERGENT / DIVERGENT-LOGLOG / UNCLASSIFIED
    double last_rel_change = 0.0;
    double fit_slope = 0.0;
    double fit_r2 = 0.0;
};

struct ScanReport {
    std::vector<ScanRow> rows;
    std::vector<ScanVerdict> verdicts;
};

ScanReport integrability_scan(const LinearFoliationModel& model,
                              const std::vector<MetricProfile>& profiles,
                              const std::vector<double>& eps_grid, double outer_c,
                              const SamplerConfig& cfg, int n_paths, int workers = 1);

// the Remark's truncated integral -int_eps^c dr/(r log r), both routes
double remark_divergence_closed_form(double eps, double c);
double remark_divergence_quadrature(double eps, double c);

} // namespace holofol
