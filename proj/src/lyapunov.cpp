#include "holofol/lyapunov.hpp"

#include <Eigen/QR>
#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "holofol/parallel.hpp"
#include "holofol/philox.hpp"
#include "holofol/quadrature.hpp"
#include "holofol/stats.hpp"

namespace holofol {

InitialLaw InitialLaw::fixed(AmbientPoint p) {
    InitialLaw law;
    law.kind = Kind::fixed_point;
    law.point = std::move(p);
    return law;
}

InitialLaw InitialLaw::radial_lelong(double eps, double outer_c) {
    if (!(eps > 0.0 && eps < outer_c && outer_c < 1.0))
        throw std::invalid_argument("radial_lelong: need 0 < eps < c < 1");
    InitialLaw law;
    law.kind = Kind::radial_lelong;
    law.eps = eps;
    law.outer_c = outer_c;
    return law;
}

AmbientPoint InitialLaw::sample(const LinearFoliationModel& model, uint64_t seed,
                                uint64_t path_index) const {
    if (kind == Kind::fixed_point) return point;
    const int k = model.dim();
    CounterRng rng(seed, kStreamLaw, path_index);

    // depth u = -log r with density prop. to (1+u)^-2 on [u_c, u_eps]
    double u_c = -std::log(outer_c), u_e = -std::log(eps);
    double flo = 1.0 / (1.0 + u_c), fhi = 1.0 / (1.0 + u_e);
    double U = rng.uniform();
    double u = 1.0 / (flo - U * (flo - fhi)) - 1.0;
    double r = std::exp(-u);

    AmbientPoint x;
    x.coords.resize(k);
    double mod = r / std::sqrt((double)k);
    for (int j = 0; j < k; ++j) {
        double ang = 6.283185307179586 * rng.uniform();
        x.coords[j] = cplx(mod * std::cos(ang), mod * std::sin(ang));
    }
    return x;
}

namespace {

struct QrState {
    MatC Q;    // running orthonormal frame
    MatC Rhat; // column-normalized product of R factors (triangular), for spans
    std::vector<double> logsum;
    double T = 0.0;

    explicit QrState(int dim)
        : Q(MatC::Identity(dim, dim)), Rhat(MatC::Identity(dim, dim)), logsum(dim, 0.0) {}

    void push(const CocycleIncrement& inc) {
        MatC Z = inc.A * Q;
        Eigen::HouseholderQR<MatC> qr(Z);
        MatC R = qr.matrixQR().triangularView<Eigen::Upper>();
        Q = qr.householderQ() * MatC::Identity(Z.rows(), Z.cols());
        const int dim = (int)logsum.size();
        for (int j = 0; j < dim; ++j) logsum[j] += std::log(std::abs(R(j, j)));
        Rhat = R * Rhat;
        for (int j = 0; j < dim; ++j) {
            double cn = Rhat.col(j).norm();
            if (cn > 0.0) Rhat.col(j) /= cn;
        }
        T += inc.dt;
    }

    // smallest principal angle between span(Q cols < j) and the image of the
    // trailing coordinate splitting span(Q * Rhat cols >= j)
    double log_sin_angle(int j) const {
        const int dim = (int)logsum.size();
        MatC W = Q * Rhat.rightCols(dim - j);
        Eigen::HouseholderQR<MatC> qr(W);
        MatC Wo = qr.householderQ() * MatC::Identity(dim, dim - j);
        MatC M = Q.leftCols(j).adjoint() * Wo;
        Eigen::JacobiSVD<MatC> svd(M);
        double c = std::min(1.0, svd.singularValues()(0));
        double ang = std::acos(c);
        return std::log(std::max(std::sin(ang), 1e-300));
    }
};

} // namespace

LyapunovReport estimate_spectrum_core(int dim, const std::vector<PathCocycleData>& paths) {
    if (dim < 1) throw std::invalid_argument("estimate_spectrum_core: dim must be >= 1");
    LyapunovReport rep;
    std::vector<std::vector<double>> per_path_exp;
    double total_T = 0.0;

    for (const PathCocycleData& p : paths) {
        if (p.incs.empty()) continue;
        QrState st(dim);
        for (const CocycleIncrement& inc : p.incs) st.push(inc);
        if (!(st.T > 0.0)) continue;
        std::vector<double> ex(dim);
        for (int j = 0; j < dim; ++j) ex[j] = st.logsum[j] / st.T;
        per_path_exp.push_back(std::move(ex));
        total_T += st.T;
    }
    rep.n_paths_used = (int)per_path_exp.size();
    rep.total_g_time = total_T;
    if (per_path_exp.empty()) return rep;

    std::vector<double> mean(dim), se(dim);
    for (int j = 0; j < dim; ++j) {
        std::vector<double> col;
        col.reserve(per_path_exp.size());
        for (const auto& e : per_path_exp) col.push_back(e[j]);
        MeanStderr ms = mean_stderr(col);
        mean[j] = ms.mean;
        se[j] = ms.stderr_;
    }

    // cluster adjacent exponents within 2 pooled standard errors
    std::vector<int> cluster_start{0};
    for (int j = 1; j < dim; ++j) {
        double pooled = std::sqrt(se[j - 1] * se[j - 1] + se[j] * se[j]);
        if (std::fabs(mean[j - 1] - mean[j]) >= 2.0 * pooled) cluster_start.push_back(j);
    }
    cluster_start.push_back(dim);
    for (size_t c = 0; c + 1 < cluster_start.size(); ++c) {
        int a = cluster_start[c], b = cluster_start[c + 1];
        double m = 0.0, v = 0.0;
        for (int j = a; j < b; ++j) m += mean[j];
        m /= (b - a);
        for (int j = a; j < b; ++j) v += se[j] * se[j];
        rep.exponents.push_back(m);
        rep.multiplicities.push_back(b - a);
        rep.stderrs.push_back(std::sqrt(v) / (b - a));
    }
    rep.valid = true;
    return rep;
}

double subspace_angle_rate_core(int dim, const std::vector<PathCocycleData>& paths,
                                const std::vector<int>& S) {
    if (dim < 2)
        throw std::invalid_argument("subspace_angle_rate: no nontrivial partition in dimension 1");
    for (size_t i = 0; i < S.size(); ++i)
        if (S[i] != (int)i + 1)
            throw std::invalid_argument("subspace_angle_rate: partition must be a leading block {1..j}");
    int j = (int)S.size();
    if (j < 1 || j >= dim)
        throw std::invalid_argument("subspace_angle_rate: partition must be proper");

    std::vector<double> slopes;
    for (const PathCocycleData& p : paths) {
        if (p.incs.size() < 3) continue;
        QrState st(dim);
        std::vector<double> ts, ys;
        for (const CocycleIncrement& inc : p.incs) {
            st.push(inc);
            ts.push_back(st.T);
            ys.push_back(st.log_sin_angle(j) / st.T);
        }
        slopes.push_back(linear_fit(ts, ys).slope);
    }
    if (slopes.empty())
        throw std::invalid_argument("subspace_angle_rate: no usable paths");
    return mean_stderr(slopes).mean;
}

namespace {

std::vector<PathCocycleData> stride_frames_to_cocycles(const LinearFoliationModel& model,
                                                       const std::vector<LeafChart>& charts,
                                                       const std::vector<PathStats>& stats,
                                                       std::vector<int>* used_idx) {
    std::vector<PathCocycleData> out;
    for (size_t i = 0; i < stats.size(); ++i) {
        const PathStats& ps = stats[i];
        if (ps.status == PathStatus::exited || ps.strides.empty()) continue;
        const LeafChart& ch = charts.size() == 1 ? charts[0] : charts[i];
        PathCocycleData pc;
        cplx prev_zeta(0.0, 0.0);
        double prev_t = 0.0;
        for (const StrideSample& s : ps.strides) {
            AmbientPoint base_pt = leaf_point(ch, model, prev_zeta);
            CocycleFrame f = holonomy_step(model, base_pt, s.zeta - prev_zeta);
            double dt = s.g_time - prev_t;
            if (dt > 0.0) pc.incs.push_back({f.matrix, dt});
            prev_zeta = s.zeta;
            prev_t = s.g_time;
        }
        if (!pc.incs.empty()) {
            out.push_back(std::move(pc));
            if (used_idx) used_idx->push_back((int)i);
        }
    }
    return out;
}

} // namespace

LyapunovReport estimate_spectrum(const LinearFoliationModel& model, const InitialLaw& law,
                                 const MetricProfile& profile, const SamplerConfig& cfg,
                                 int n_paths, double horizon_g_time, double qr_stride,
                                 int workers) {
    if (n_paths < 16)
        throw std::invalid_argument("estimate_spectrum: need at least 16 paths");
    if (!(horizon_g_time >= 100.0 * qr_stride))
        throw std::invalid_argument("estimate_spectrum: horizon must cover 100 qr strides");

    std::vector<LeafChart> charts;
    if (law.kind == InitialLaw::Kind::fixed_point) {
        charts.push_back(LeafChart::at(model, law.point));
    } else {
        charts.reserve(n_paths);
        for (int i = 0; i < n_paths; ++i)
            charts.push_back(LeafChart::at(model, law.sample(model, cfg.master_seed, (uint64_t)i)));
    }

    SamplerConfig run_cfg = cfg;
    run_cfg.max_g_time = horizon_g_time;
    BatchOptions opts;
    opts.strides = true;
    opts.stride_gt = qr_stride;
    opts.workers = workers;
    auto stats = run_path_batch(model, charts, profile, run_cfg, 0, n_paths, opts);

    int absorbed = 0;
    for (const PathStats& ps : stats)
        if (ps.status == PathStatus::exited) ++absorbed;

    auto cocycles = stride_frames_to_cocycles(model, charts, stats, nullptr);
    LyapunovReport rep = estimate_spectrum_core(model.dim() - 1, cocycles);
    rep.absorbed_fraction = (double)absorbed / n_paths;

    if (rep.valid && rep.exponents.size() >= 2) {
        int prefix = 0;
        for (size_t c = 0; c + 1 < rep.exponents.size(); ++c) {
            prefix += rep.multiplicities[c];
            std::vector<int> S(prefix);
            for (int j = 0; j < prefix; ++j) S[j] = j + 1;
            rep.subspace_angle_rates.push_back(
                subspace_angle_rate_core(model.dim() - 1, cocycles, S));
        }
    }
    return rep;
}

BigFMeanResult estimate_big_f_mean(const LinearFoliationModel& model, const InitialLaw& law,
                                   const MetricProfile& profile, const SamplerConfig& cfg,
                                   int n_paths, int workers) {
    if (n_paths < 1000)
        throw std::invalid_argument("estimate_big_f_mean: need at least 1000 paths");

    std::vector<LeafChart> charts;
    if (law.kind == InitialLaw::Kind::fixed_point) {
        charts.push_back(LeafChart::at(model, law.point));
    } else {
        charts.reserve(n_paths);
        for (int i = 0; i < n_paths; ++i)
            charts.push_back(LeafChart::at(model, law.sample(model, cfg.master_seed, (uint64_t)i)));
    }

    SamplerConfig run_cfg = cfg;
    run_cfg.max_g_time = 1.0;
    BatchOptions opts;
    opts.workers = workers;
    const bool scalar_case = model.equal_eigenvalues();
    if (!scalar_case) {
        opts.strides = true;
        opts.stride_gt = 0.02;
    }
    auto stats = run_path_batch(model, charts, profile, run_cfg, 0, n_paths, opts);

    std::vector<double> fvals;
    int absorbed = 0;
    for (size_t i = 0; i < stats.size(); ++i) {
        const PathStats& ps = stats[i];
        if (ps.status == PathStatus::exited) {
            ++absorbed;
            continue;
        }
        if (scalar_case) {
            fvals.push_back(ps.sup_log_h);
        } else {
            const LeafChart& ch = charts.size() == 1 ? charts[0] : charts[i];
            double best = 0.0;
            for (const StrideSample& s : ps.strides) {
                if (s.g_time > 1.0 + 1e-12) break;
                CocycleFrame f = holonomy_step(model, ch.base, s.zeta);
                best = std::max(best, std::max(std::fabs(f.log_norm()),
                                               std::fabs(f.log_norm_inverse())));
            }
            fvals.push_back(best);
        }
    }

    BigFMeanResult res;
    res.absorbed_fraction = (double)absorbed / n_paths;
    res.n_used = (int)fvals.size();
    if (fvals.empty()) return res;
    MeanStderr ms = mean_stderr(fvals);
    res.mean = ms.mean;
    res.stderr_ = ms.stderr_;

    res.heavy_tail_alarm = heavy_tail_alarm(fvals);
    return res;
}

ScanReport integrability_scan(const LinearFoliationModel& model,
                              const std::vector<MetricProfile>& profiles,
                              const std::vector<double>& eps_grid, double outer_c,
                              const SamplerConfig& cfg, int n_paths, int workers) {
    if (eps_grid.size() < 2)
        throw std::invalid_argument("integrability_scan: insufficient grid");
    double decades = (std::log(eps_grid.front()) - std::log(eps_grid.back())) / std::log(10.0);
    if (decades < 4.0)
        throw std::invalid_argument("integrability_scan: epsilon grid must span at least 4 decades");

    ScanReport report;
    for (const MetricProfile& prof : profiles) {
        std::vector<double> xs, means;
        for (double eps : eps_grid) {
            InitialLaw law = InitialLaw::radial_lelong(eps, outer_c);
            BigFMeanResult r = estimate_big_f_mean(model, law, prof, cfg, n_paths, workers);
            report.rows.push_back({prof.name(), prof.delta, eps, r.mean, r.stderr_,
                                   r.absorbed_fraction, r.heavy_tail_alarm});
            xs.push_back(std::log(-std::log(eps)));
            means.push_back(r.mean);
        }
        ScanVerdict v;
        v.profile = prof.name();
        v.delta = prof.delta;
        size_t n = means.size();
        v.last_rel_change = std::fabs(means[n - 1] - means[n - 2]) /
                            std::max(std::fabs(means[n - 2]), 1e-300);
        LinearFit fit = linear_fit(xs, means);
        v.fit_slope = fit.slope;
        v.fit_r2 = fit.r2;
        if (v.last_rel_change < 0.05)
            v.verdict = "CONVERGENT";
        else if (fit.slope > 0.0 && fit.r2 > 0.9)
            v.verdict = "DIVERGENT-LOGLOG";
        else
            v.verdict = "UNCLASSIFIED";
        report.verdicts.push_back(std::move(v));
    }
    return report;
}

double remark_divergence_closed_form(double eps, double c) {
    return std::log(-std::log(eps)) - std::log(-std::log(c));
}

double remark_divergence_quadrature(double eps, double c) {
    auto f = [](double r) { return -1.0 / (r * std::log(r)); };
    return integrate_geometric(f, eps, c, 1e-12).value;
}

} // namespace holofol
