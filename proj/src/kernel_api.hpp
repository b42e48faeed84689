#pragma once

// Entry points into the compiled kernels. The AVX2 functions live in a TU
// built with -mavx2 -mfma; callers must check cpu/env dispatch first.

#include <cstdint>
#include <vector>

#include "kernel_impl.hpp"

namespace holofol {
namespace kern {

void run_radial_batch_scalar(const RadialKernelSpec& ks, const StepCfg& cfg,
                             const ChordTable* table, const double* a0, const double* bmin,
                             const uint64_t* path_ids, const BatchObsCfg& obs,
                             PathSummary* out, std::vector<StrideSample>* strides);

void run_radial_batch_avx2(const RadialKernelSpec& ks, const StepCfg& cfg,
                           const ChordTable* table, const double* a0, const double* bmin,
                           const uint64_t* path_ids, const BatchObsCfg& obs,
                           PathSummary* out, std::vector<StrideSample>* strides);

// Arbitrary eigenvalues: per-coordinate half-planes and the full
// ||phi_x(zeta)|| evaluation. Scalar only.
struct GenericChartSpec {
    std::vector<double> s, t, b; // half-planes s_j u - t_j v < b_j
    std::vector<double> w;       // |x_j|^2 for nonzero coordinates
    double dstar = 2.0;
    double delta = 0.0;
    PowMode pow_mode = PowMode::one;
};

void run_generic_path_scalar(const GenericChartSpec& gs, const StepCfg& cfg,
                             uint64_t path_id, const BatchObsCfg& obs,
                             PathSummary* out, std::vector<StrideSample>* strides);

} // namespace kern
} // namespace holofol
