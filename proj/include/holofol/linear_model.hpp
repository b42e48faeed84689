#pragma once

// Local model of a linearizable singularity: the foliation of the unit
// polydisc induced by the generic linear vector field with eigenvalues
// lambda_1..lambda_k. Leaves through x are parametrized by
// phi_x(zeta) = (x_j exp(lambda_j zeta))_j on the convex polygon Pi_x.

#include <complex>
#include <vector>

namespace holofol {

using cplx = std::complex<double>;

struct LinearFoliationModel {
    std::vector<cplx> lambdas;

    int dim() const { return (int)lambdas.size(); }

    // all eigenvalues identical as doubles; enables the radial kernels
    bool equal_eigenvalues() const;

    // validates k >= 2 and every lambda_j != 0
    static LinearFoliationModel make(std::vector<cplx> lambdas);
};

struct AmbientPoint {
    std::vector<cplx> coords;

    AmbientPoint() = default;
    explicit AmbientPoint(std::vector<cplx> c) : coords(std::move(c)) {}
    int dim() const { return (int)coords.size(); }
};

// open half-plane { (u,v) : s*u - t*v < b }
struct HalfPlane {
    double s, t, b;
};

struct LeafChart {
    AmbientPoint base;
    std::vector<HalfPlane> half_planes; // one per nonzero coordinate

    // throws std::invalid_argument at the singularity or outside the polydisc
    static LeafChart at(const LinearFoliationModel& model, const AmbientPoint& x);
};

AmbientPoint leaf_point(const LeafChart& chart, const LinearFoliationModel& model, cplx zeta);

bool contains_zeta(const LeafChart& chart, cplx zeta);

// Euclidean distance from zeta to the polygon boundary; throws
// std::domain_error if zeta lies outside Pi_x.
double boundary_distance(const LeafChart& chart, cplx zeta);

double ambient_norm(const AmbientPoint& p);

// component-wise lambda * x and the Hermitian inner product sum_j a_j conj(b_j)
std::vector<cplx> lambda_times(const LinearFoliationModel& model, const AmbientPoint& x);
cplx hermitian_dot(const std::vector<cplx>& a, const std::vector<cplx>& b);
double vec_norm(const std::vector<cplx>& a);

} // namespace holofol
