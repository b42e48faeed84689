#include "holofol/linear_model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace holofol {

bool LinearFoliationModel::equal_eigenvalues() const {
    for (size_t j = 1; j < lambdas.size(); ++j)
        if (lambdas[j] != lambdas[0]) return false;
    return true;
}

LinearFoliationModel LinearFoliationModel::make(std::vector<cplx> lambdas) {
    if (lambdas.size() < 2)
        throw std::invalid_argument("model dimension must be at least 2");
    for (const cplx& l : lambdas)
        if (l == cplx(0.0, 0.0) || !std::isfinite(l.real()) || !std::isfinite(l.imag()))
            throw std::invalid_argument("lambda must be nonzero");
    return LinearFoliationModel{std::move(lambdas)};
}

LeafChart LeafChart::at(const LinearFoliationModel& model, const AmbientPoint& x) {
    if (x.dim() != model.dim())
        throw std::invalid_argument("base point dimension mismatch");
    LeafChart chart;
    chart.base = x;
    bool nonzero = false;
    for (int j = 0; j < x.dim(); ++j) {
        double a = std::abs(x.coords[j]);
        if (a == 0.0) continue;
        nonzero = true;
        if (a >= 1.0)
            throw std::invalid_argument("base point outside the unit polydisc");
        chart.half_planes.push_back({model.lambdas[j].real(), model.lambdas[j].imag(), -std::log(a)});
    }
    if (!nonzero)
        throw std::invalid_argument("chart undefined at singularity");
    return chart;
}

AmbientPoint leaf_point(const LeafChart& chart, const LinearFoliationModel& model, cplx zeta) {
    AmbientPoint p;
    p.coords.resize(chart.base.coords.size());
    for (size_t j = 0; j < p.coords.size(); ++j)
        p.coords[j] = chart.base.coords[j] * std::exp(model.lambdas[j] * zeta);
    return p;
}

bool contains_zeta(const LeafChart& chart, cplx zeta) {
    double u = zeta.real(), v = zeta.imag();
    for (const HalfPlane& h : chart.half_planes)
        if (!(h.s * u - h.t * v < h.b)) return false;
    return true;
}

double boundary_distance(const LeafChart& chart, cplx zeta) {
    double u = zeta.real(), v = zeta.imag();
    double best = std::numeric_limits<double>::infinity();
    for (const HalfPlane& h : chart.half_planes) {
        double margin = h.b - (h.s * u - h.t * v);
        if (margin <= 0.0)
            throw std::domain_error("zeta outside the leaf polygon");
        best = std::min(best, margin / std::hypot(h.s, h.t));
    }
    return best;
}

double ambient_norm(const AmbientPoint& p) {
    double s = 0.0;
    for (const cplx& c : p.coords) s += std::norm(c);
    return std::sqrt(s);
}

std::vector<cplx> lambda_times(const LinearFoliationModel& model, const AmbientPoint& x) {
    std::vector<cplx> out(x.coords.size());
    for (size_t j = 0; j < out.size(); ++j) out[j] = model.lambdas[j] * x.coords[j];
    return out;
}

cplx hermitian_dot(const std::vector<cplx>& a, const std::vector<cplx>& b) {
    cplx s(0.0, 0.0);
    for (size_t j = 0; j < a.size(); ++j) s += a[j] * std::conj(b[j]);
    return s;
}

double vec_norm(const std::vector<cplx>& a) {
    double s = 0.0;
    for (const cplx& c : a) s += std::norm(c);
    return std::sqrt(s);
}

} // namespace holofol
