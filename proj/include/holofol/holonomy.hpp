#pragma once

// Holonomy cocycle of the linear model. Between the orthogonal transversals
// T_x = { x + u : <u, lambda x> = 0 } the derivative of the holonomy along a
// leaf displacement zeta has the closed form
//     H = P_{(lambda y)^perp} o diag(exp(lambda_j zeta)) restricted to
//         (lambda x)^perp,   y = phi_x(zeta),
// obtained by implicit differentiation of the transversal constraint. Frames
// are expressed in deterministic orthonormal bases, which realizes the
// isometric identifier: operator norms of the matrix equal those of H.
//
// A finite-difference shooting holonomy (1-d Newton in zeta') is kept as an
// independent oracle; the closed form is the production path.

#include <Eigen/Dense>
#include <vector>

#include "holofol/brownian.hpp"
#include "holofol/linear_model.hpp"
#include "holofol/metrics.hpp"

namespace holofol {

using MatC = Eigen::MatrixXcd;
using VecC = Eigen::VectorXcd;

// columns: orthonormal basis of (lambda x)^perp, Gram-Schmidt from the
// standard basis with largest-residual-first pivoting (reproducible frames)
MatC normal_basis(const LinearFoliationModel& model, const AmbientPoint& x);

struct CocycleFrame {
    MatC source_basis; // k x (k-1)
    MatC target_basis; // k x (k-1)
    MatC matrix;       // (k-1) x (k-1), H in these bases

    double largest_sv() const;
    double smallest_sv() const;
    double log_norm() const;         // log ||H||
    double log_norm_inverse() const; // log ||H^-1||
};

CocycleFrame holonomy_step(const LinearFoliationModel& model, const AmbientPoint& x, cplx zeta);

struct GeodesicNode {
    double arclength;
    cplx zeta;
    cplx velocity;
};

struct GeodesicPath {
    std::vector<GeodesicNode> nodes;
    bool hit_boundary = false;
};

// frame from the path start to the point at g-time t (nodes are looked up at
// the first node with g_time >= t); only the endpoint displacement matters in
// the simply connected chart
CocycleFrame cocycle_along(const LinearFoliationModel& model, const LeafChart& chart,
                           const LeafPath& path, double t);
CocycleFrame cocycle_along(const LinearFoliationModel& model, const LeafChart& chart,
                           const GeodesicPath& geo, double arclength);

// D hol_{x,y}(u) as an ambient vector, by shooting leaves of x +- ds u onto
// the transversal at y = phi_x(zeta) (Newton in the leaf parameter) and
// taking the central difference
VecC shooting_holonomy(const LinearFoliationModel& model, const AmbientPoint& x, cplx zeta,
                       const VecC& u, double ds = 1e-5);

// relative deviation between the shooting derivative at (x, u) and the
// rescaled one at (t x, t u); exact homothety means 0
double homothety_check(const LinearFoliationModel& model, const AmbientPoint& x, cplx zeta,
                       const VecC& u, double t_scale);

// sup over unit normal u and a fixed direction fan of
// |d/ds log ||D hol_{x, phi_x(s theta)}(u)|| | at s = 0, per unit ambient
// distance
double d_log_h_norm(const LinearFoliationModel& model, const AmbientPoint& x);

// unit-g-speed geodesic of the conformal metric, RK4 on
// zeta'' + 2 (d/dzeta log lambda_g) zeta'^2 = 0 with per-step speed
// renormalization; stops early at the polygon boundary
GeodesicPath integrate_geodesic(const LeafChart& chart, const ConformalDensity& density,
                                cplx zeta0, cplx dir0, double length, double step);

double expansion_rate(const LinearFoliationModel& model, const LeafChart& chart,
                      const LeafPath& path, double t);
double expansion_rate(const LinearFoliationModel& model, const LeafChart& chart,
                      const LeafPath& path, double t, const VecC& normal_dir);

struct ExpansionLemmaReport {
    double c1 = 0.0; // sup of df/dt over log*(dist)/xi at the moving point
    double c2 = 0.0; // sup of df/dt over (log*(dist(x))/xi(x)) e^t
    bool pass = false;
};

ExpansionLemmaReport check_expansion_lemmas(const LinearFoliationModel& model,
                                            const LeafChart& chart,
                                            const ConformalDensity& density,
                                            const GeodesicPath& geo);

struct BigFResult {
    double value = 0.0;
    double refinement_gap = 0.0; // sup change between full and half node sampling
};

// F = sup_{g-time <= 1} max(|log||H||, |log||H^-1|||) over path nodes
BigFResult big_f(const LinearFoliationModel& model, const LeafChart& chart, const LeafPath& path);

} // namespace holofol
