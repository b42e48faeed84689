#include "holofol/brownian.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <limits>
#include <stdexcept>

#include "holofol/parallel.hpp"
#include "holofol/philox.hpp"
#include "kernel_api.hpp"

namespace holofol {

void SamplerConfig::validate() const {
    if (!(step > 0.0 && step <= 1e-2))
        throw std::invalid_argument("sampler step must lie in (0, 1e-2]");
    if (!(max_g_time > 0.0))
        throw std::invalid_argument("max_g_time must be positive");
}

namespace {

bool env_forces_scalar() {
    const char* k = std::getenv("HOLOFOL_KERNEL");
    return k && std::strcmp(k, "scalar") == 0;
}

bool use_avx2() {
#if defined(__x86_64__) || defined(__i386__)
    static const bool cpu_ok = __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    static const bool cpu_ok = false;
#endif
    return cpu_ok && !env_forces_scalar();
}

kern::StepCfg make_step_cfg(const SamplerConfig& cfg) {
    kern::StepCfg sc;
    sc.step = cfg.step;
    sc.sqrt_step = std::sqrt(cfg.step);
    sc.max_g = cfg.max_g_time;
    sc.seed = cfg.master_seed;
    return sc;
}

struct RadialSetup {
    kern::RadialKernelSpec ks;
    std::vector<double> a0;   // per path
    std::vector<double> bmin; // per path
};

RadialSetup make_radial_setup(const LinearFoliationModel& model,
                              const std::vector<LeafChart>& charts,
                              const MetricProfile& profile, int n_paths) {
    RadialSetup rs;
    rs.ks.s = model.lambdas[0].real();
    rs.ks.t = model.lambdas[0].imag();
    rs.ks.dstar = profile.crossover_depth;
    rs.ks.delta = profile.delta;
    rs.ks.pow_mode = kern::pow_mode_for(profile.kind == MetricKind::accelerating, profile.delta);
    rs.a0.resize(n_paths);
    rs.bmin.resize(n_paths);
    for (int i = 0; i < n_paths; ++i) {
        const LeafChart& ch = charts.size() == 1 ? charts[0] : charts[i];
        rs.a0[i] = -std::log(ambient_norm(ch.base));
        double bm = std::numeric_limits<double>::infinity();
        for (const HalfPlane& h : ch.half_planes) bm = std::min(bm, h.b);
        rs.bmin[i] = bm;
    }
    return rs;
}

kern::ChordTable build_chord_table(const MetricProfile& profile, const RadialSetup& rs,
                                   double max_g, double step) {
    double a0_max = *std::max_element(rs.a0.begin(), rs.a0.end());
    double d_lo = 0.0, exploration = 0.0;
    for (size_t i = 0; i < rs.a0.size(); ++i) {
        d_lo = std::min(d_lo, rs.a0[i] - rs.bmin[i]);
        double lam0 = lambda_of_depth(profile, rs.a0[i]);
        exploration = std::max(exploration, 14.0 * std::sqrt(max_g) / lam0);
    }
    (void)step;
    kern::ChordTable tab;
    tab.d_lo = d_lo - 2.0;
    tab.h = 1.0 / 1024.0;
    tab.inv_h = 1024.0;
    double d_hi = a0_max + exploration + 4.0;
    size_t n = (size_t)((d_hi - tab.d_lo) * tab.inv_h) + 2;
    tab.lam.resize(n);
    tab.cum.resize(n);
    for (size_t i = 0; i < n; ++i) tab.lam[i] = lambda_of_depth(profile, tab.d_lo + tab.h * (double)i);
    tab.cum[0] = 0.0;
    for (size_t i = 0; i + 1 < n; ++i) {
        double d = tab.d_lo + tab.h * (double)i;
        double mid = lambda_of_depth(profile, d + 0.5 * tab.h);
        tab.cum[i + 1] = tab.cum[i] + tab.h / 6.0 * (tab.lam[i] + 4.0 * mid + tab.lam[i + 1]);
    }
    return tab;
}

PathStats summary_to_stats(const kern::PathSummary& s, double step) {
    PathStats ps;
    ps.status = s.status == kern::kPathDone ? PathStatus::alive : PathStatus::exited;
    ps.truncated = s.status == kern::kPathTruncated;
    ps.g_time = s.g_time;
    ps.euclid_time = s.steps * step;
    ps.sup_chord = s.sup_chord;
    ps.sup_log_h = s.sup_absp;
    ps.end = cplx(s.end_u, s.end_v);
    return ps;
}

kern::GenericChartSpec make_generic_spec(const LinearFoliationModel& model,
                                         const LeafChart& chart, const MetricProfile& profile) {
    kern::GenericChartSpec gs;
    gs.dstar = profile.crossover_depth;
    gs.delta = profile.delta;
    gs.pow_mode = kern::pow_mode_for(profile.kind == MetricKind::accelerating, profile.delta);
    size_t hp = 0;
    for (int j = 0; j < model.dim(); ++j) {
        if (std::abs(chart.base.coords[j]) == 0.0) continue;
        gs.s.push_back(chart.half_planes[hp].s);
        gs.t.push_back(chart.half_planes[hp].t);
        gs.b.push_back(chart.half_planes[hp].b);
        gs.w.push_back(std::norm(chart.base.coords[j]));
        ++hp;
    }
    return gs;
}

} // namespace

const char* active_kernel_name() { return use_avx2() ? "avx2" : "scalar"; }

std::vector<PathStats> run_path_batch(const LinearFoliationModel& model,
                                      const std::vector<LeafChart>& charts,
                                      const MetricProfile& profile, const SamplerConfig& cfg,
                                      uint64_t path_index_base, int n_paths,
                                      const BatchOptions& opts) {
    cfg.validate();
    if (charts.empty() || (charts.size() != 1 && (int)charts.size() != n_paths))
        throw std::invalid_argument("run_path_batch: need 1 or n_paths charts");
    if (opts.strides && !(opts.stride_gt > 0.0))
        throw std::invalid_argument("run_path_batch: stride_gt must be positive");

    std::vector<PathStats> out(n_paths);
    kern::StepCfg sc = make_step_cfg(cfg);
    kern::BatchObsCfg oc{opts.tail, opts.strides, opts.stride_gt};

    if (model.equal_eigenvalues()) {
        RadialSetup rs = make_radial_setup(model, charts, profile, n_paths);
        kern::ChordTable table;
        if (opts.tail) table = build_chord_table(profile, rs, cfg.max_g_time, cfg.step);
        const kern::ChordTable* tp = opts.tail ? &table : nullptr;
        const bool avx2 = use_avx2();

        parallel_for_ranges(n_paths, opts.workers, [&](int64_t lo, int64_t hi) {
            int64_t i = lo;
            while (i < hi) {
                int lanes = (avx2 && hi - i >= 4) ? 4 : 1;
                double a0[4], bm[4];
                uint64_t ids[4];
                for (int l = 0; l < lanes; ++l) {
                    a0[l] = rs.a0[i + l];
                    bm[l] = rs.bmin[i + l];
                    ids[l] = path_index_base + (uint64_t)(i + l);
                }
                kern::PathSummary sums[4];
                std::vector<kern::StrideSample> strides[4];
                if (lanes == 4)
                    kern::run_radial_batch_avx2(rs.ks, sc, tp, a0, bm, ids, oc, sums, strides);
                else
                    kern::run_radial_batch_scalar(rs.ks, sc, tp, a0, bm, ids, oc, sums, strides);
                for (int l = 0; l < lanes; ++l) {
                    PathStats ps = summary_to_stats(sums[l], cfg.step);
                    for (const auto& s : strides[l])
                        ps.strides.push_back({s.g_time, cplx(s.u, s.v)});
                    out[i + l] = std::move(ps);
                }
                i += lanes;
            }
        });
    } else {
        std::vector<kern::GenericChartSpec> specs;
        specs.reserve(charts.size());
        for (const LeafChart& ch : charts) specs.push_back(make_generic_spec(model, ch, profile));
        parallel_for_ranges(n_paths, opts.workers, [&](int64_t lo, int64_t hi) {
            for (int64_t i = lo; i < hi; ++i) {
                const kern::GenericChartSpec& gs = specs.size() == 1 ? specs[0] : specs[i];
                kern::PathSummary sum;
                std::vector<kern::StrideSample> strides;
                kern::run_generic_path_scalar(gs, sc, path_index_base + (uint64_t)i, oc, &sum,
                                              opts.strides ? &strides : nullptr);
                PathStats ps = summary_to_stats(sum, cfg.step);
                for (const auto& s : strides) ps.strides.push_back({s.g_time, cplx(s.u, s.v)});
                out[i] = std::move(ps);
            }
        });
    }
    return out;
}

LeafPath sample_path(const LeafChart& chart, const ConformalDensity& density,
                     const SamplerConfig& cfg, uint64_t path_index) {
    cfg.validate();
    LeafPath path;
    path.nodes.push_back({0.0, 0.0, cplx(0.0, 0.0)});
    cplx zeta(0.0, 0.0);
    double gt = 0.0;
    const double sqrt_step = std::sqrt(cfg.step);
    const uint64_t max_steps = uint64_t(1) << 27;
    const bool reject = cfg.boundary_policy == BoundaryPolicy::reject_resample;

    for (uint64_t n = 0;; ++n) {
        double lam = density(zeta);
        double gt_next = std::fma(lam * lam, cfg.step, gt);
        bool accepted = false;
        cplx znext;
        int max_retry = reject ? 64 : 1;
        for (int retry = 0; retry < max_retry; ++retry) {
            uint64_t block = reject ? n * 128 + (uint64_t)retry : n;
            auto [a, b] = philox_uniform2(cfg.master_seed, kStreamPath, block, path_index);
            double n1, n2;
            box_muller<ScalarPack>(a, b, n1, n2);
            znext = cplx(std::fma(sqrt_step, n1, zeta.real()), std::fma(sqrt_step, n2, zeta.imag()));
            if (contains_zeta(chart, znext)) {
                accepted = true;
                break;
            }
        }
        if (!accepted) {
            path.status = PathStatus::exited;
            return path;
        }
        zeta = znext;
        gt = gt_next;
        path.nodes.push_back({(double)(n + 1) * cfg.step, gt, zeta});
        if (gt >= cfg.max_g_time) {
            path.status = PathStatus::alive;
            return path;
        }
        if (n + 1 >= max_steps) {
            path.status = PathStatus::exited;
            return path;
        }
    }
}

namespace {

const double kGL8X[8] = {0.01985507175123188, 0.10166676129318664, 0.2372337950418355,
                         0.40828267875217505, 0.591717321247825, 0.7627662049581645,
                         0.8983332387068134, 0.9801449282487681};
const double kGL8W[8] = {0.05061426814518813, 0.11119051722668723, 0.15685332293894364,
                         0.18134189168918097, 0.18134189168918097, 0.15685332293894364,
                         0.11119051722668723, 0.05061426814518813};

// 16 panels x 8 Gauss points = the 128-point segment rule
double segment_g_length(const ConformalDensity& density, cplx z) {
    double len = std::abs(z);
    if (len == 0.0) return 0.0;
    double acc = 0.0;
    for (int pnl = 0; pnl < 16; ++pnl) {
        double a = pnl / 16.0;
        for (int i = 0; i < 8; ++i) {
            double sgm = a + kGL8X[i] / 16.0;
            acc += kGL8W[i] / 16.0 * density(sgm * z);
        }
    }
    return acc * len;
}

} // namespace

double g_distance_along(const LeafPath& path, const ConformalDensity& density, double t) {
    if (path.nodes.empty() || t > path.final_g_time() || t < 0.0)
        throw std::out_of_range("g_distance_along: t outside the path's g-time range");
    size_t idx = 0;
    while (idx + 1 < path.nodes.size() && path.nodes[idx].g_time < t) ++idx;
    cplx zt = path.nodes[idx].zeta;

    double seg = segment_g_length(density, zt);
    double poly = 0.0;
    for (size_t i = 0; i < idx; ++i) {
        cplx a = path.nodes[i].zeta, b = path.nodes[i + 1].zeta;
        poly += density(0.5 * (a + b)) * std::abs(b - a);
    }
    return std::min(seg, poly);
}

EmpiricalTail empirical_tail(const std::vector<LeafChart>& charts,
                             const LinearFoliationModel& model, const MetricProfile& profile,
                             const SamplerConfig& cfg, int n_paths,
                             const std::vector<double>& thresholds, int workers) {
    if (n_paths < 1000)
        throw std::invalid_argument("empirical_tail: need at least 1000 paths");
    for (size_t i = 0; i < thresholds.size(); ++i)
        if (!(thresholds[i] >= 0.0) || (i > 0 && thresholds[i] <= thresholds[i - 1]))
            throw std::invalid_argument("empirical_tail: thresholds must be positive increasing");
    if (charts.empty())
        throw std::invalid_argument("empirical_tail: need at least one chart");

    EmpiricalTail result;
    std::vector<double> freq(thresholds.size(), 0.0);
    double absorbed = 0.0;
    BatchOptions opts;
    opts.tail = true;
    opts.workers = workers;
    for (size_t c = 0; c < charts.size(); ++c) {
        std::vector<LeafChart> one{charts[c]};
        auto stats = run_path_batch(model, one, profile, cfg, (uint64_t)c * (uint64_t)n_paths,
                                    n_paths, opts);
        for (size_t s = 0; s < thresholds.size(); ++s) {
            int64_t cnt = 0;
            for (const PathStats& ps : stats)
                if (ps.sup_chord > thresholds[s]) ++cnt;
            freq[s] += (double)cnt / n_paths;
        }
        int64_t ab = 0;
        for (const PathStats& ps : stats)
            if (ps.status == PathStatus::exited) ++ab;
        absorbed += (double)ab / n_paths;
    }
    for (size_t s = 0; s < thresholds.size(); ++s)
        result.points.push_back({thresholds[s], freq[s] / (double)charts.size()});
    result.absorbed_fraction = absorbed / (double)charts.size();
    return result;
}

double diffusion_expectation(const LeafChart& chart, const LinearFoliationModel& model,
                             const ConformalDensity& density, const SamplerConfig& cfg,
                             const std::function<double(const AmbientPoint&)>& f, double t,
                             int n_paths, int workers) {
    if (n_paths < 100)
        throw std::invalid_argument("diffusion_expectation: need at least 100 paths");
    if (t < 0.0)
        throw std::invalid_argument("diffusion_expectation: t must be nonnegative");
    if (t == 0.0) return f(chart.base);

    SamplerConfig run_cfg = cfg;
    run_cfg.max_g_time = t;

    std::vector<double> vals(n_paths);
    if (density.is_leafwise()) {
        std::vector<LeafChart> one{chart};
        BatchOptions opts;
        opts.workers = workers;
        auto stats = run_path_batch(model, one, density.profile(), run_cfg, 0, n_paths, opts);
        for (int i = 0; i < n_paths; ++i)
            vals[i] = f(leaf_point(chart, model, stats[i].end));
    } else {
        parallel_for_ranges(n_paths, workers, [&](int64_t lo, int64_t hi) {
            for (int64_t i = lo; i < hi; ++i) {
                LeafPath p = sample_path(chart, density, run_cfg, (uint64_t)i);
                vals[i] = f(leaf_point(chart, model, p.nodes.back().zeta));
            }
        });
    }
    double acc = 0.0;
    for (double v : vals) acc += v;
    return acc / n_paths;
}

} // namespace holofol
