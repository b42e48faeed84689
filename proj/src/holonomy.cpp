#include "holofol/holonomy.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <cmath>
#include <stdexcept>

namespace holofol {

namespace {

VecC to_eigen(const std::vector<cplx>& v) {
    VecC out(v.size());
    for (size_t i = 0; i < v.size(); ++i) out[i] = v[i];
    return out;
}

VecC phi_of(const LinearFoliationModel& model, const VecC& x, cplx zeta) {
    VecC y(x.size());
    for (int j = 0; j < x.size(); ++j) y[j] = x[j] * std::exp(model.lambdas[j] * zeta);
    return y;
}

VecC lambda_vec(const LinearFoliationModel& model, const VecC& x) {
    VecC lx(x.size());
    for (int j = 0; j < x.size(); ++j) lx[j] = model.lambdas[j] * x[j];
    return lx;
}

MatC basis_of(const LinearFoliationModel& model, const VecC& x) {
    const int k = (int)x.size();
    VecC lx = lambda_vec(model, x);
    double nl = lx.norm();
    if (!(nl > 0.0))
        throw std::invalid_argument("normal basis undefined: lambda x vanishes");
    VecC n = lx / nl;

    std::vector<VecC> chosen;
    std::vector<int> used(k, 0);
    while ((int)chosen.size() < k - 1) {
        int best = -1;
        double best_norm = -1.0;
        VecC best_vec;
        for (int i = 0; i < k; ++i) {
            if (used[i]) continue;
            VecC r = VecC::Zero(k);
            r[i] = 1.0;
            r -= n.dot(r) * n; // n.dot(r) = <r, n> in the sum a_j conj(b_j) sense
            for (const VecC& q : chosen) r -= q.dot(r) * q;
            double rn = r.norm();
            if (rn > best_norm + 1e-15) {
                best_norm = rn;
                best = i;
                best_vec = r;
            }
        }
        if (best < 0 || best_norm < 1e-12)
            throw std::runtime_error("normal basis construction failed");
        used[best] = 1;
        chosen.push_back(best_vec / best_norm);
    }
    MatC B(k, k - 1);
    for (int c = 0; c < k - 1; ++c) B.col(c) = chosen[c];
    return B;
}

} // namespace

MatC normal_basis(const LinearFoliationModel& model, const AmbientPoint& x) {
    return basis_of(model, to_eigen(x.coords));
}

double CocycleFrame::largest_sv() const {
    Eigen::JacobiSVD<MatC> svd(matrix);
    return svd.singularValues()(0);
}

double CocycleFrame::smallest_sv() const {
    Eigen::JacobiSVD<MatC> svd(matrix);
    return svd.singularValues()(svd.singularValues().size() - 1);
}

double CocycleFrame::log_norm() const { return std::log(largest_sv()); }

double CocycleFrame::log_norm_inverse() const { return -std::log(smallest_sv()); }

CocycleFrame holonomy_step(const LinearFoliationModel& model, const AmbientPoint& x, cplx zeta) {
    VecC xe = to_eigen(x.coords);
    if (!(xe.norm() > 0.0))
        throw std::invalid_argument("holonomy undefined at the singularity");
    VecC ye = phi_of(model, xe, zeta);

    CocycleFrame f;
    f.source_basis = basis_of(model, xe);
    f.target_basis = basis_of(model, ye);
    MatC DB = f.source_basis;
    for (int j = 0; j < xe.size(); ++j)
        DB.row(j) *= std::exp(model.lambdas[j] * zeta);
    // expressing P_{(lambda y)^perp} DB in the target basis: the projection
    // term drops because the basis columns are orthogonal to lambda y
    f.matrix = f.target_basis.adjoint() * DB;
    return f;
}

namespace {

cplx node_zeta_at(const LeafPath& path, double t) {
    if (path.nodes.empty() || t < 0.0 || t > path.final_g_time())
        throw std::out_of_range("cocycle_along: t outside the path's g-time range");
    size_t idx = 0;
    while (idx + 1 < path.nodes.size() && path.nodes[idx].g_time < t) ++idx;
    return path.nodes[idx].zeta;
}

cplx node_zeta_at(const GeodesicPath& geo, double s) {
    if (geo.nodes.empty() || s < 0.0 || s > geo.nodes.back().arclength)
        throw std::out_of_range("cocycle_along: arclength outside the geodesic range");
    size_t idx = 0;
    while (idx + 1 < geo.nodes.size() && geo.nodes[idx].arclength < s) ++idx;
    return geo.nodes[idx].zeta;
}

} // namespace

CocycleFrame cocycle_along(const LinearFoliationModel& model, const LeafChart& chart,
                           const LeafPath& path, double t) {
    return holonomy_step(model, chart.base, node_zeta_at(path, t));
}

CocycleFrame cocycle_along(const LinearFoliationModel& model, const LeafChart& chart,
                           const GeodesicPath& geo, double arclength) {
    return holonomy_step(model, chart.base, node_zeta_at(geo, arclength));
}

namespace {

// solve <phi_xs(zeta') - y, lambda y> = 0 for zeta' near zeta_init
cplx shoot_onto_transversal(const LinearFoliationModel& model, const VecC& xs, const VecC& y,
                            const VecC& ly, cplx zeta_init) {
    cplx z = zeta_init;
    double scale = ly.squaredNorm();
    for (int it = 0; it < 60; ++it) {
        cplx g(0.0, 0.0), gp(0.0, 0.0);
        for (int j = 0; j < xs.size(); ++j) {
            cplx e = xs[j] * std::exp(model.lambdas[j] * z);
            cplx w = std::conj(ly[j]);
            g += (e - y[j]) * w;
            gp += model.lambdas[j] * e * w;
        }
        if (std::abs(g) < 1e-15 * scale) return z;
        z -= g / gp;
    }
    throw std::runtime_error("shooting holonomy: Newton did not converge");
}

} // namespace

VecC shooting_holonomy(const LinearFoliationModel& model, const AmbientPoint& x, cplx zeta,
                       const VecC& u, double ds) {
    VecC xe = to_eigen(x.coords);
    VecC y = phi_of(model, xe, zeta);
    VecC ly = lambda_vec(model, y);
    VecC xp = xe + ds * u;
    VecC xm = xe - ds * u;
    cplx zp = shoot_onto_transversal(model, xp, y, ly, zeta);
    cplx zm = shoot_onto_transversal(model, xm, y, ly, zeta);
    return (phi_of(model, xp, zp) - phi_of(model, xm, zm)) / (2.0 * ds);
}

double homothety_check(const LinearFoliationModel& model, const AmbientPoint& x, cplx zeta,
                       const VecC& u, double t_scale) {
    VecC xe = to_eigen(x.coords);
    VecC ye = phi_of(model, xe, zeta);
    for (int j = 0; j < xe.size(); ++j)
        if (std::abs(t_scale * xe[j]) >= 1.0 || std::abs(t_scale * ye[j]) >= 1.0)
            throw std::domain_error("homothety_check: scaled points exit the box");

    VecC d1 = shooting_holonomy(model, x, zeta, u);
    AmbientPoint xs;
    xs.coords.resize(xe.size());
    for (int j = 0; j < xe.size(); ++j) xs.coords[j] = t_scale * xe[j];
    VecC d2 = shooting_holonomy(model, xs, zeta, VecC(t_scale * u));
    return (d2 - t_scale * d1).norm() / (t_scale * d1.norm());
}

double d_log_h_norm(const LinearFoliationModel& model, const AmbientPoint& x) {
    VecC xe = to_eigen(x.coords);
    double nl = lambda_vec(model, xe).norm();
    if (!(nl > 0.0))
        throw std::invalid_argument("d_log_h_norm undefined at the singularity");
    MatC Bx = basis_of(model, xe);
    const int k = (int)xe.size();
    const double h = 1e-6;

    // raw map R(s) = P_{(lambda y_s)^perp} diag(exp(lambda s theta)) B_x
    auto raw_map = [&](cplx displacement) {
        VecC y = phi_of(model, xe, displacement);
        VecC ly = lambda_vec(model, y);
        VecC ny = ly / ly.norm();
        MatC R(k, k - 1);
        for (int c = 0; c < k - 1; ++c) {
            VecC w(k);
            for (int j = 0; j < k; ++j)
                w[j] = Bx(j, c) * std::exp(model.lambdas[j] * displacement);
            R.col(c) = w - ny.dot(w) * ny;
        }
        return R;
    };

    std::vector<cplx> dirs = {cplx(1, 0), cplx(0, 1), cplx(-1, 0), cplx(0, -1)};
    const double golden = 0.6180339887498949;
    for (int m = 1; m <= 8; ++m) {
        double ang = 6.283185307179586 * std::fmod(m * golden, 1.0);
        dirs.push_back(cplx(std::cos(ang), std::sin(ang)));
    }

    double best = 0.0;
    for (const cplx& theta : dirs) {
        MatC Rp = raw_map(h * theta);
        MatC Rm = raw_map(-h * theta);
        MatC G = Bx.adjoint() * ((Rp - Rm) / (2.0 * h));
        MatC S = 0.5 * (G + G.adjoint());
        Eigen::SelfAdjointEigenSolver<MatC> es(S);
        double lo = std::fabs(es.eigenvalues()(0));
        double hi = std::fabs(es.eigenvalues()(es.eigenvalues().size() - 1));
        best = std::max(best, std::max(lo, hi));
    }
    return best / nl;
}

GeodesicPath integrate_geodesic(const LeafChart& chart, const ConformalDensity& density,
                                cplx zeta0, cplx dir0, double length, double step) {
    if (!(length > 0.0) || !(step > 0.0))
        throw std::invalid_argument("integrate_geodesic: length and step must be positive");
    auto ok = [&](cplx z) {
        if (density.is_leafwise()) return contains_zeta(chart, z);
        double l = density(z);
        return std::isfinite(l) && l > 0.0;
    };
    if (!ok(zeta0))
        throw std::domain_error("integrate_geodesic: immediate boundary exit");

    double l0 = density(zeta0);
    cplx w = dir0 / std::abs(dir0) / l0;

    GeodesicPath geo;
    geo.nodes.push_back({0.0, zeta0, w});

    auto accel = [&](cplx z, cplx vel) { return -2.0 * density.grad_log(z) * vel * vel; };

    double s = 0.0;
    cplx z = zeta0;
    while (s + 1e-12 < length) {
        double dt = std::min(step, length - s);
        cplx k1z = w, k1w = accel(z, w);
        if (!ok(z + 0.5 * dt * k1z)) { geo.hit_boundary = true; break; }
        cplx k2z = w + 0.5 * dt * k1w, k2w = accel(z + 0.5 * dt * k1z, w + 0.5 * dt * k1w);
        if (!ok(z + 0.5 * dt * k2z)) { geo.hit_boundary = true; break; }
        cplx k3z = w + 0.5 * dt * k2w, k3w = accel(z + 0.5 * dt * k2z, w + 0.5 * dt * k2w);
        if (!ok(z + dt * k3z)) { geo.hit_boundary = true; break; }
        cplx k4z = w + dt * k3w, k4w = accel(z + dt * k3z, w + dt * k3w);
        cplx zn = z + dt / 6.0 * (k1z + 2.0 * k2z + 2.0 * k3z + k4z);
        cplx wn = w + dt / 6.0 * (k1w + 2.0 * k2w + 2.0 * k3w + k4w);
        if (!ok(zn)) { geo.hit_boundary = true; break; }
        // project back onto the unit-g-speed constraint
        double lam = density(zn);
        wn /= lam * std::abs(wn);
        z = zn;
        w = wn;
        s += dt;
        geo.nodes.push_back({s, z, w});
        if (geo.nodes.size() > 50u * 1000u * 1000u)
            throw std::runtime_error("integrate_geodesic: node limit exceeded");
    }
    return geo;
}

double expansion_rate(const LinearFoliationModel& model, const LeafChart& chart,
                      const LeafPath& path, double t) {
    if (!(t > 0.0))
        throw std::invalid_argument("expansion_rate: t must be positive");
    return cocycle_along(model, chart, path, t).log_norm() / t;
}

double expansion_rate(const LinearFoliationModel& model, const LeafChart& chart,
                      const LeafPath& path, double t, const VecC& normal_dir) {
    if (!(t > 0.0))
        throw std::invalid_argument("expansion_rate: t must be positive");
    CocycleFrame f = cocycle_along(model, chart, path, t);
    VecC c = f.source_basis.adjoint() * normal_dir;
    double un = c.norm();
    if (!(un > 0.0))
        throw std::invalid_argument("expansion_rate: direction has no normal component");
    return std::log((f.matrix * c).norm() / un) / t;
}

ExpansionLemmaReport check_expansion_lemmas(const LinearFoliationModel& model,
                                            const LeafChart& chart,
                                            const ConformalDensity& density,
                                            const GeodesicPath& geo) {
    if (geo.nodes.size() < 100)
        throw std::invalid_argument("check_expansion_lemmas: degenerate geodesic");
    if (!density.is_leafwise())
        throw std::invalid_argument("check_expansion_lemmas: needs a leafwise density");
    const MetricProfile& prof = density.profile();
    const int k = model.dim();
    const size_t n = geo.nodes.size();

    std::vector<std::vector<double>> f(n, std::vector<double>(k - 1));
    std::vector<double> depth(n);
    for (size_t i = 0; i < n; ++i) {
        CocycleFrame fr = holonomy_step(model, chart.base, geo.nodes[i].zeta);
        for (int j = 0; j < k - 1; ++j)
            f[i][j] = std::log(fr.matrix.col(j).norm());
        depth[i] = density.depth(geo.nodes[i].zeta);
    }
    double depth0 = density.depth(cplx(0, 0));
    double den2_base = (1.0 + std::fabs(depth0)) / prof.rho_of_depth(depth0);

    ExpansionLemmaReport rep;
    bool finite = true;
    for (size_t i = 1; i + 1 < n; ++i) {
        double dt = geo.nodes[i + 1].arclength - geo.nodes[i - 1].arclength;
        double den1 = (1.0 + std::fabs(depth[i])) / prof.rho_of_depth(depth[i]);
        double den2 = den2_base * std::exp(geo.nodes[i].arclength);
        for (int j = 0; j < k - 1; ++j) {
            double dfdt = (f[i + 1][j] - f[i - 1][j]) / dt;
            if (!std::isfinite(dfdt)) { finite = false; continue; }
            rep.c1 = std::max(rep.c1, dfdt / den1);
            rep.c2 = std::max(rep.c2, dfdt / den2);
        }
    }
    rep.pass = finite && std::isfinite(rep.c1) && std::isfinite(rep.c2);
    return rep;
}

BigFResult big_f(const LinearFoliationModel& model, const LeafChart& chart, const LeafPath& path) {
    if (path.final_g_time() < 1.0)
        throw std::invalid_argument("big_f: path does not cover unit g-time");

    size_t end = 0;
    while (end + 1 < path.nodes.size() && path.nodes[end].g_time < 1.0) ++end;

    const bool scalar_case = model.equal_eigenvalues();
    cplx lam0 = model.lambdas[0];

    auto value_at = [&](size_t i) {
        if (scalar_case) {
            cplx z = path.nodes[i].zeta;
            return std::fabs(lam0.real() * z.real() - lam0.imag() * z.imag());
        }
        CocycleFrame f = holonomy_step(model, chart.base, path.nodes[i].zeta);
        return std::max(std::fabs(std::log(f.largest_sv())), std::fabs(std::log(f.smallest_sv())));
    };

    double full = 0.0, half = 0.0;
    for (size_t i = 0; i <= end; ++i) {
        double v = value_at(i);
        full = std::max(full, v);
        if (i % 2 == 0) half = std::max(half, v);
    }
    return {full, full - half};
}

} // namespace holofol
