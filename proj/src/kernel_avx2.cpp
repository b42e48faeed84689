#include "kernel_api.hpp"

namespace holofol {
namespace kern {

void run_radial_batch_avx2(const RadialKernelSpec& ks, const StepCfg& cfg,
                           const ChordTable* table, const double* a0, const double* bmin,
                           const uint64_t* path_ids, const BatchObsCfg& obs,
                           PathSummary* out, std::vector<StrideSample>* strides) {
    run_radial_batch<Avx2Pack>(ks, cfg, table, a0, bmin, path_ids, obs, out, strides);
}

} // namespace kern
} // namespace holofol
