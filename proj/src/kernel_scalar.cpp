#include "kernel_api.hpp"

namespace holofol {
namespace kern {

void run_radial_batch_scalar(const RadialKernelSpec& ks, const StepCfg& cfg,
                             const ChordTable* table, const double* a0, const double* bmin,
                             const uint64_t* path_ids, const BatchObsCfg& obs,
                             PathSummary* out, std::vector<StrideSample>* strides) {
    run_radial_batch<ScalarPack>(ks, cfg, table, a0, bmin, path_ids, obs, out, strides);
}

namespace {

inline double generic_lambda(const GenericChartSpec& gs, double u, double v, bool& inside) {
    using P = ScalarPack;
    inside = true;
    double n2 = 0.0;
    for (size_t j = 0; j < gs.s.size(); ++j) {
        double p = std::fma(gs.s[j], u, -gs.t[j] * v);
        if (!(p < gs.b[j])) inside = false;
        n2 += gs.w[j] * vexp<P>(2.0 * p);
    }
    double d = -0.5 * vlog<P>(n2);
    double dd = d > gs.dstar ? d : gs.dstar;
    double rho;
    switch (gs.pow_mode) {
        case PowMode::one: rho = 1.0; break;
        case PowMode::quarter: rho = std::sqrt(std::sqrt(dd)); break;
        case PowMode::half: rho = std::sqrt(dd); break;
        case PowMode::three_quarter: rho = std::sqrt(dd) * std::sqrt(std::sqrt(dd)); break;
        default: rho = vexp<P>(gs.delta * vlog<P>(dd)); break;
    }
    return rho / (1.0 + std::fabs(d));
}

// 8-point Gauss-Legendre on [0,1]
const double kGL8X[8] = {0.01985507175123188, 0.10166676129318664, 0.2372337950418355,
                         0.40828267875217505, 0.591717321247825, 0.7627662049581645,
                         0.8983332387068134, 0.9801449282487681};
const double kGL8W[8] = {0.05061426814518813, 0.11119051722668723, 0.15685332293894364,
                         0.18134189168918097, 0.18134189168918097, 0.15685332293894364,
                         0.11119051722668723, 0.05061426814518813};

inline double generic_chord(const GenericChartSpec& gs, double u, double v) {
    double az = std::hypot(u, v);
    double acc = 0.0;
    for (int i = 0; i < 8; ++i) {
        bool ins;
        acc += kGL8W[i] * generic_lambda(gs, kGL8X[i] * u, kGL8X[i] * v, ins);
    }
    return az * acc;
}

} // namespace

void run_generic_path_scalar(const GenericChartSpec& gs, const StepCfg& cfg,
                             uint64_t path_id, const BatchObsCfg& obs,
                             PathSummary* out, std::vector<StrideSample>* strides) {
    double u = 0.0, v = 0.0, gt = 0.0, steps = 0.0, sup_chord = 0.0;
    double next_stride = obs.stride_gt;
    PathSummary o;
    uint64_t n = 0;
    bool inside0;
    while (true) {
        double lam = generic_lambda(gs, u, v, inside0);
        double gt_new = std::fma(lam * lam, cfg.step, gt);
        auto [a, b] = philox_uniform2(cfg.seed, kStreamPath, n, path_id);
        double n1, n2;
        box_muller<ScalarPack>(a, b, n1, n2);
        double u_new = std::fma(cfg.sqrt_step, n1, u);
        double v_new = std::fma(cfg.sqrt_step, n2, v);
        bool inside;
        generic_lambda(gs, u_new, v_new, inside);
        ++n;
        if (!inside) {
            o.status = kPathExited;
            break;
        }
        u = u_new; v = v_new; gt = gt_new; steps += 1.0;
        if (obs.tail) {
            double c = generic_chord(gs, u, v);
            if (c > sup_chord) sup_chord = c;
        }
        if (obs.strides && strides)
            while (gt >= next_stride) {
                strides->push_back({gt, u, v});
                next_stride += obs.stride_gt;
            }
        if (gt >= cfg.max_g) {
            o.status = kPathDone;
            break;
        }
        if (n >= cfg.max_steps) {
            o.status = kPathTruncated;
            break;
        }
    }
    o.g_time = gt;
    o.steps = steps;
    o.sup_chord = sup_chord;
    o.sup_absp = 0.0;
    o.end_u = u;
    o.end_v = v;
    *out = o;
}

} // namespace kern
} // namespace holofol
