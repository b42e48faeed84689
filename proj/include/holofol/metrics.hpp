#pragma once

// Leafwise metric machinery: the accelerating conformal factor family
// rho(r) = (-log r)^delta spliced to a constant above the crossover radius,
// condition checks on rho, the pulled-back conformal density
// lambda_g = xi(phi_x(zeta)) * tau(zeta) with tau = 1/log*||phi_x(zeta)||,
// and curvature / volume diagnostics.

#include <functional>
#include <utility>
#include <vector>

#include "holofol/linear_model.hpp"

namespace holofol {

enum class MetricKind { poincare, accelerating };

struct MetricProfile {
    MetricKind kind = MetricKind::poincare;
    double delta = 0.0;
    double crossover_depth = 2.0; // rho frozen for r above exp(-crossover_depth)

    static MetricProfile poincare();
    static MetricProfile accelerating(double delta); // delta in (0,1), else throws

    double rho(double r) const;       // r > 0
    double rho_prime(double r) const; // analytic; 0 on the frozen branch
    double rho_of_depth(double d) const; // rho(exp(-d))
    // d(log rho(exp(-d)))/dd
    double dlog_rho_ddepth(double d) const;
    const char* name() const;
};

// xi(x) at distance r from the singular set; throws std::domain_error if r <= 0
double xi_value(const MetricProfile& profile, double r);

// lambda_g at depth d = -log||phi||: rho_of_depth(d) / (1 + |d|)
double lambda_of_depth(const MetricProfile& profile, double d);

struct DerivativeConditionReport {
    bool passes = false;
    double fitted_c = 0.0;
};

DerivativeConditionReport check_derivative_condition(const MetricProfile& profile,
                                                     double r_min, double r_max, int samples);

struct IntegrabilityVerdict {
    bool converges = false;
    double tail_exponent = 0.0;  // fitted beta: truncation increments ~ u^-beta
    bool cauchy_1pct = false;
    bool grows_10pct_per_decade = false;
    std::vector<std::pair<double, double>> truncations; // (epsilon, value)
};

// Truncated integrals int_eps^{r*} rho^2/(r log^2 r) dr and
// int_eps^{r*} dr/(rho^2 r |log r|), classified by the fitted tail exponent.
std::pair<IntegrabilityVerdict, IntegrabilityVerdict>
check_integrability(const MetricProfile& profile, const std::vector<double>& eps_seq);

class ConformalDensity {
  public:
    static ConformalDensity leafwise(const LeafChart& chart, const LinearFoliationModel& model,
                                     const MetricProfile& profile);
    static ConformalDensity custom(std::function<double(cplx)> lambda,
                                   std::function<cplx(cplx)> grad_log = {});

    double operator()(cplx zeta) const;
    // d/dzeta of log lambda_g (Wirtinger derivative); analytic for leafwise
    // densities, central differences for custom ones without a hook
    cplx grad_log(cplx zeta) const;

    bool is_leafwise() const { return leafwise_; }
    const LeafChart& chart() const { return chart_; }
    const LinearFoliationModel& model() const { return model_; }
    const MetricProfile& profile() const { return profile_; }

    // -log||phi_x(zeta)|| for leafwise densities
    double depth(cplx zeta) const;

  private:
    bool leafwise_ = false;
    LeafChart chart_;
    LinearFoliationModel model_;
    MetricProfile profile_;
    std::function<double(cplx)> custom_;
    std::function<cplx(cplx)> custom_grad_;
};

// Two-sided Koebe estimate of eta(x): (||lambda x|| d0 / 2, 2 ||lambda x|| d0)
// with d0 the Euclidean distance from 0 to the polygon boundary.
std::pair<double, double> eta_estimate(const LeafChart& chart, const LinearFoliationModel& model);

// K = -(flat Laplacian of log lambda_g) / lambda_g^2 by the 5-point stencil.
double gaussian_curvature(const ConformalDensity& density, cplx zeta, double h);

// g-area of the Dijkstra sublevel set {dist_g(0, .) < radius_g} on a grid.
double disc_volume(const ConformalDensity& density, double radius_g, int grid);

} // namespace holofol
