#pragma once

// Leafwise Brownian motion with respect to lambda_g^2 |dzeta|^2 on the leaf
// polygon: planar Brownian increments with the additive conformal clock
// dT_g = lambda_g(zeta)^2 ds. Exact in law for conformal metrics, so no
// drift-term discretization enters anywhere.
//
// Two layers: sample_path returns a full node list for one path (reference
// implementation, any density, both boundary policies); run_path_batch
// streams many paths through the compiled kernels (scalar or AVX2, absorb
// policy) keeping only per-path statistics. Both draw their increments from
// the same counter-keyed generator, so a batched path and a sampled path
// with the same (master_seed, path_index) traverse the same trajectory.

#include <complex>
#include <functional>
#include <vector>

#include "holofol/linear_model.hpp"
#include "holofol/metrics.hpp"

namespace holofol {

enum class BoundaryPolicy { absorb, reject_resample };

struct SamplerConfig {
    double step = 1e-4;
    uint64_t master_seed = 0;
    double max_g_time = 1.0;
    BoundaryPolicy boundary_policy = BoundaryPolicy::absorb;

    void validate() const; // throws std::invalid_argument
};

enum class PathStatus { alive, exited };

struct PathNode {
    double euclid_time;
    double g_time;
    cplx zeta;
};

struct LeafPath {
    std::vector<PathNode> nodes;
    PathStatus status = PathStatus::alive;

    double final_g_time() const { return nodes.empty() ? 0.0 : nodes.back().g_time; }
};

LeafPath sample_path(const LeafChart& chart, const ConformalDensity& density,
                     const SamplerConfig& cfg, uint64_t path_index);

// Monotone upper-bound proxy for dist_g(omega(0), omega(t)): the smaller of
// the straight-segment g-length (128-point quadrature; the polygon is convex
// so the segment stays inside) and the polyline g-length. t is g-time.
double g_distance_along(const LeafPath& path, const ConformalDensity& density, double t);

// ---- batched statistics layer ----

struct StrideSample {
    double g_time;
    cplx zeta;
};

struct PathStats {
    PathStatus status = PathStatus::alive;
    bool truncated = false; // hit the internal step cap; counted as absorbed
    double g_time = 0.0;
    double euclid_time = 0.0;
    double sup_chord = 0.0;   // sup over nodes of the chord distance proxy
    double sup_log_h = 0.0;   // sup |s u - t v|; equal-eigenvalue models only
    cplx end = {0.0, 0.0};
    std::vector<StrideSample> strides;
};

struct BatchOptions {
    bool tail = false;
    bool strides = false;
    double stride_gt = 0.0;
    int workers = 1;
};

// charts must hold either one chart (shared by all paths) or n_paths charts
// (path i starts at charts[i]); path i draws from (master_seed, base + i).
std::vector<PathStats> run_path_batch(const LinearFoliationModel& model,
                                      const std::vector<LeafChart>& charts,
                                      const MetricProfile& profile, const SamplerConfig& cfg,
                                      uint64_t path_index_base, int n_paths,
                                      const BatchOptions& opts);

struct EmpiricalTail {
    std::vector<std::pair<double, double>> points; // (threshold s, frequency)
    double absorbed_fraction = 0.0;
};

EmpiricalTail empirical_tail(const std::vector<LeafChart>& charts,
                             const LinearFoliationModel& model, const MetricProfile& profile,
                             const SamplerConfig& cfg, int n_paths,
                             const std::vector<double>& thresholds, int workers = 1);

double diffusion_expectation(const LeafChart& chart, const LinearFoliationModel& model,
                             const ConformalDensity& density, const SamplerConfig& cfg,
                             const std::function<double(const AmbientPoint&)>& f, double t,
                             int n_paths, int workers = 1);

// active kernel name for diagnostics: "avx2" or "scalar"
const char* active_kernel_name();

} // namespace holofol
