// holofol: experiment runner for the linear-model foliation simulator.
//
// Subcommands: model, verify-metric, sample, cocycle, lyapunov,
// integrability, config dump. Options may come from a key=value config file
// (--config); explicit command-line flags win. All file outputs are UTF-8
// CSV with RFC-style quoting, byte-identical for a fixed seed regardless of
// --workers.

#include <CLI11.hpp>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "holofol/brownian.hpp"
#include "holofol/config.hpp"
#include "holofol/holonomy.hpp"
#include "holofol/linear_model.hpp"
#include "holofol/lyapunov.hpp"
#include "holofol/metrics.hpp"
#include "holofol/parallel.hpp"

using namespace holofol;

namespace {

struct GlobalOpts {
    std::string config_path;
    std::string seed_str;
    int workers = 2;
    ConfigFile cfg;
    bool have_cfg = false;
};

// CLI flag > config value > built-in default
void resolve(CLI::App* sub, const GlobalOpts& g, const char* flag, const char* key,
             std::string& target) {
    if (sub->count(flag) == 0 && g.have_cfg) {
        const std::string* v = g.cfg.find(key);
        if (v) target = *v;
    }
}

uint64_t resolve_seed(const GlobalOpts& g, const CLI::App& app) {
    if (app.count("--seed")) return std::strtoull(g.seed_str.c_str(), nullptr, 10);
    if (g.have_cfg) {
        const std::string* v = g.cfg.find("seed");
        if (v) return std::strtoull(v->c_str(), nullptr, 10);
    }
    if (const char* env = std::getenv("HOLOFOL_SEED"))
        return std::strtoull(env, nullptr, 10);
    return 0;
}

LinearFoliationModel model_from(const std::string& lambda_str) {
    return LinearFoliationModel::make(parse_complex_list(lambda_str));
}

AmbientPoint point_from(const std::string& x_str) {
    return AmbientPoint(parse_complex_list(x_str));
}

MetricProfile profile_from(const std::string& name, double delta) {
    if (name == "poincare") return MetricProfile::poincare();
    if (name == "accelerating") return MetricProfile::accelerating(delta);
    throw std::invalid_argument("unknown profile: " + name);
}

std::ostream& open_out(const std::string& path, std::ofstream& file) {
    if (path.empty() || path == "-") return std::cout;
    file.open(path, std::ios::binary);
    if (!file) throw std::runtime_error("cannot open output file: " + path);
    return file;
}

std::string status_name(PathStatus s) {
    return s == PathStatus::alive ? "alive" : "exited";
}

int cmd_model(const std::string& lambda_str, const std::string& x_str,
              const std::string& out_path) {
    auto model = model_from(lambda_str);
    auto x = point_from(x_str);
    auto chart = LeafChart::at(model, x);

    std::ofstream file;
    std::ostream& os = open_out(out_path, file);
    os << "record,s,t,b\n";
    for (size_t i = 0; i < chart.half_planes.size(); ++i) {
        const HalfPlane& h = chart.half_planes[i];
        os << csv_row({"constraint_" + std::to_string(i), fmt_double(h.s), fmt_double(h.t),
                       fmt_double(h.b)});
    }
    double d0 = boundary_distance(chart, cplx(0, 0));
    auto [lo, hi] = eta_estimate(chart, model);
    os << csv_row({"boundary_distance_at_0", fmt_double(d0), "", ""});
    os << csv_row({"eta_lower", fmt_double(lo), "", ""});
    os << csv_row({"eta_upper", fmt_double(hi), "", ""});
    return 0;
}

int cmd_verify_metric(double delta, double r_min, double r_max, int samples) {
    auto prof = MetricProfile::accelerating(delta); // throws on bad delta
    std::vector<std::string> failures;

    auto drep = check_derivative_condition(prof, r_min, r_max, samples);
    std::cout << "check,derivative_condition,pass=" << (drep.passes ? 1 : 0)
              << ",fitted_c=" << fmt_double(drep.fitted_c) << "\n";
    if (!drep.passes) failures.push_back("derivative condition fails");

    std::vector<double> eps;
    for (int m = 0; m < 7; ++m) eps.push_back(std::exp(-4.0 * std::pow(2.0, m)));
    auto [v1, v2] = check_integrability(prof, eps);
    std::cout << "check,first_integrability,pass=" << (v1.converges ? 1 : 0)
              << ",tail_exponent=" << fmt_double(v1.tail_exponent) << "\n";
    std::cout << "check,second_integrability,pass=" << (v2.converges ? 1 : 0)
              << ",tail_exponent=" << fmt_double(v2.tail_exponent) << "\n";
    if (!v1.converges) failures.push_back("first integrability integral diverges");
    if (!v2.converges) failures.push_back("second integrability integral diverges");

    // curvature flattens toward the singularity
    auto model = LinearFoliationModel::make({cplx(1, 0), cplx(1, 0)});
    std::vector<double> curv;
    for (double a : {10.0, 15.0, 20.0}) {
        double r = std::exp(-a) / std::sqrt(2.0);
        auto chart = LeafChart::at(model, AmbientPoint({cplx(r, 0), cplx(r, 0)}));
        auto dens = ConformalDensity::leafwise(chart, model, prof);
        double h = 1e-3 * boundary_distance(chart, cplx(0, 0));
        curv.push_back(std::fabs(gaussian_curvature(dens, cplx(0, 0), h)));
        std::cout << "check,curvature_at_depth_" << fmt_double(a)
                  << ",abs_K=" << fmt_double(curv.back()) << "\n";
    }
    bool curv_ok = curv[0] < 1.0 && curv[2] <= curv[0];
    if (!curv_ok) failures.push_back("curvature does not flatten toward the singularity");

    // volume floor along the same depth scan
    std::vector<double> vols;
    for (double a : {10.0, 15.0, 20.0}) {
        double r = std::exp(-a) / std::sqrt(2.0);
        auto chart = LeafChart::at(model, AmbientPoint({cplx(r, 0), cplx(r, 0)}));
        auto dens = ConformalDensity::leafwise(chart, model, prof);
        vols.push_back(disc_volume(dens, 1.0, 128));
        std::cout << "check,volume_at_depth_" << fmt_double(a)
                  << ",vol=" << fmt_double(vols.back()) << "\n";
    }
    double vmax = *std::max_element(vols.begin(), vols.end());
    bool vol_ok = vmax > 0.0;
    for (double v : vols) vol_ok = vol_ok && v > 0.4 * vmax;
    if (!vol_ok) failures.push_back("injectivity-radius volume floor violated");

    if (failures.empty()) {
        std::cout << "verify-metric,delta=" << fmt_double(delta) << ",PASS\n";
        return 0;
    }
    std::cerr << "verify-metric failed: " << failures.front() << "\n";
    return 1;
}

int cmd_sample(const std::string& lambda_str, const std::string& x_str,
               const MetricProfile& prof, const SamplerConfig& cfg, int n_paths,
               int node_stride, int workers, const std::string& out_path) {
    auto model = model_from(lambda_str);
    auto chart = LeafChart::at(model, point_from(x_str));
    auto dens = ConformalDensity::leafwise(chart, model, prof);

    std::vector<std::string> chunks(n_paths);
    parallel_for_ranges(n_paths, workers, [&](int64_t lo, int64_t hi) {
        for (int64_t i = lo; i < hi; ++i) {
            LeafPath p = sample_path(chart, dens, cfg, (uint64_t)i);
            std::string s;
            for (size_t j = 0; j < p.nodes.size(); ++j) {
                if (node_stride > 1 && j % (size_t)node_stride != 0 &&
                    j + 1 != p.nodes.size())
                    continue;
                const PathNode& n = p.nodes[j];
                s += csv_row({std::to_string(i), std::to_string(j), fmt_double(n.euclid_time),
                              fmt_double(n.g_time), fmt_double(n.zeta.real()),
                              fmt_double(n.zeta.imag()), status_name(p.status)});
            }
            chunks[i] = std::move(s);
        }
    });
    std::ofstream file;
    std::ostream& os = open_out(out_path, file);
    os << "path_index,node_index,euclid_time,g_time,re_zeta,im_zeta,status\n";
    for (const std::string& c : chunks) os << c;
    return 0;
}

int cmd_cocycle(const std::string& lambda_str, const std::string& x_str,
                const MetricProfile& prof, const SamplerConfig& cfg, uint64_t path_index,
                double stride, const std::string& out_path) {
    if (!(stride > 0.0)) throw std::invalid_argument("cocycle stride must be positive");
    auto model = model_from(lambda_str);
    auto chart = LeafChart::at(model, point_from(x_str));
    auto dens = ConformalDensity::leafwise(chart, model, prof);
    LeafPath p = sample_path(chart, dens, cfg, path_index);

    std::ofstream file;
    std::ostream& os = open_out(out_path, file);
    os << "t,log_norm,log_norm_inverse,smallest_sv,largest_sv\n";
    for (double t = 0.0; t <= p.final_g_time(); t += stride) {
        CocycleFrame f = cocycle_along(model, chart, p, t);
        os << csv_row({fmt_double(t), fmt_double(f.log_norm()),
                       fmt_double(f.log_norm_inverse()), fmt_double(f.smallest_sv()),
                       fmt_double(f.largest_sv())});
    }
    return 0;
}

int cmd_lyapunov(const std::string& lambda_str, const std::string& law_str,
                 const std::string& x_str, double eps, double outer_c,
                 const MetricProfile& prof, const SamplerConfig& cfg, int n_paths,
                 double horizon, double qr_stride, int workers,
                 const std::string& out_path) {
    auto model = model_from(lambda_str);
    InitialLaw law = law_str == "radial_lelong"
                         ? InitialLaw::radial_lelong(eps, outer_c)
                         : InitialLaw::fixed(point_from(x_str));
    LyapunovReport rep =
        estimate_spectrum(model, law, prof, cfg, n_paths, horizon, qr_stride, workers);

    std::ofstream file;
    std::ostream& os = open_out(out_path, file);
    os << "exponent_index,exponent,multiplicity,stderr\n";
    for (size_t i = 0; i < rep.exponents.size(); ++i)
        os << csv_row({std::to_string(i), fmt_double(rep.exponents[i]),
                       std::to_string(rep.multiplicities[i]), fmt_double(rep.stderrs[i])});

    std::cout << "paths_used," << rep.n_paths_used << "\n";
    std::cout << "absorbed_fraction," << fmt_double(rep.absorbed_fraction) << "\n";
    std::cout << "total_g_time," << fmt_double(rep.total_g_time) << "\n";
    for (size_t i = 0; i < rep.subspace_angle_rates.size(); ++i)
        std::cout << "subspace_angle_rate_" << i << ","
                  << fmt_double(rep.subspace_angle_rates[i]) << "\n";
    if (!rep.valid) {
        std::cerr << "lyapunov: all paths absorbed before the horizon\n";
        return 1;
    }
    return 0;
}

int cmd_integrability(const std::string& lambda_str, double delta,
                      const std::string& eps_efolds, double outer_c,
                      const SamplerConfig& cfg, int n_paths, int workers,
                      const std::string& out_path) {
    auto model = model_from(lambda_str);
    std::vector<double> eps;
    {
        std::istringstream is(eps_efolds);
        std::string tok;
        while (std::getline(is, tok, ','))
            eps.push_back(std::exp(-std::fabs(std::strtod(tok.c_str(), nullptr))));
    }
    std::vector<MetricProfile> profiles{MetricProfile::poincare(),
                                        MetricProfile::accelerating(delta)};
    ScanReport rep = integrability_scan(model, profiles, eps, outer_c, cfg, n_paths, workers);

    std::ofstream file;
    std::ostream& os = open_out(out_path, file);
    os << "profile,delta,epsilon,mean_F,stderr,absorbed_fraction,verdict\n";
    for (const ScanRow& r : rep.rows) {
        std::string verdict;
        for (const ScanVerdict& v : rep.verdicts)
            if (v.profile == r.profile && v.delta == r.delta) verdict = v.verdict;
        os << csv_row({r.profile, fmt_double(r.delta), fmt_double(r.epsilon),
                       fmt_double(r.mean_F), fmt_double(r.stderr_),
                       fmt_double(r.absorbed_fraction), verdict});
    }
    for (const ScanVerdict& v : rep.verdicts)
        std::cout << "verdict," << v.profile << "," << fmt_double(v.delta) << ","
                  << v.verdict << ",last_rel_change=" << fmt_double(v.last_rel_change)
                  << ",fit_slope=" << fmt_double(v.fit_slope)
                  << ",fit_r2=" << fmt_double(v.fit_r2) << "\n";
    for (const ScanRow& r : rep.rows)
        if (r.heavy_tail_alarm)
            std::cout << "heavy_tail_alarm," << r.profile << ","
                      << fmt_double(r.epsilon) << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"holofol: holonomy cocycle simulator for the linear foliation model"};
    app.require_subcommand(1);
    app.fallthrough(true);

    GlobalOpts g;
    app.add_option("--config", g.config_path, "key=value config file");
    app.add_option("--seed", g.seed_str, "master seed (fallback: HOLOFOL_SEED env)");
    app.add_option("--workers", g.workers, "worker threads (output is independent of this)");

    std::string lambda_str = "1+0i,1+0i";
    std::string x_str = "0.1,0.1";
    std::string profile_str = "accelerating";
    std::string law_str = "fixed";
    std::string out_path, eps_efolds = "4,8,16,32";
    double delta = 0.25, step = 1e-4, max_g = 1.0, qr_stride = 0.1, horizon = 10.0;
    double eps = std::exp(-8.0), outer_c = std::exp(-2.0);
    double cocycle_stride = 0.1;
    double r_min = 1e-10, r_max = 1e-2;
    int n_paths = 64, node_stride = 1, samples = 400;
    uint64_t path_index = 0;
    std::string policy = "absorb";

    auto* m = app.add_subcommand("model", "describe the leaf polygon and eta bounds");
    m->add_option("--lambda", lambda_str, "eigenvalues, comma-separated a+bi literals");
    m->add_option("--x", x_str, "base point coordinates");
    m->add_option("--out", out_path, "output CSV (default stdout)");

    auto* vm = app.add_subcommand("verify-metric", "check the accelerating-metric conditions");
    vm->add_option("--delta", delta, "exponent in (0,1)");
    vm->add_option("--rmin", r_min, "derivative-check inner radius");
    vm->add_option("--rmax", r_max, "derivative-check outer radius");
    vm->add_option("--samples", samples, "derivative-check grid size");

    auto* sp = app.add_subcommand("sample", "sample leafwise Brownian paths, dump nodes");
    sp->add_option("--lambda", lambda_str);
    sp->add_option("--x", x_str);
    sp->add_option("--profile", profile_str, "poincare or accelerating");
    sp->add_option("--delta", delta);
    sp->add_option("--paths", n_paths);
    sp->add_option("--step", step);
    sp->add_option("--max-g-time", max_g);
    sp->add_option("--policy", policy, "absorb or reject_resample");
    sp->add_option("--node-stride", node_stride, "thin node output");
    sp->add_option("--out", out_path);

    auto* cc = app.add_subcommand("cocycle", "holonomy frames along one sampled path");
    cc->add_option("--lambda", lambda_str);
    cc->add_option("--x", x_str);
    cc->add_option("--profile", profile_str);
    cc->add_option("--delta", delta);
    cc->add_option("--step", step);
    cc->add_option("--max-g-time", max_g);
    cc->add_option("--path-index", path_index);
    cc->add_option("--stride", cocycle_stride, "g-time between frame rows");
    cc->add_option("--out", out_path);

    auto* ly = app.add_subcommand("lyapunov", "Lyapunov spectrum by QR re-orthonormalization");
    ly->add_option("--lambda", lambda_str);
    ly->add_option("--law", law_str, "fixed or radial_lelong");
    ly->add_option("--x", x_str, "base point for law=fixed");
    ly->add_option("--eps", eps, "inner cutoff for radial_lelong");
    ly->add_option("--outer-c", outer_c, "outer cutoff for radial_lelong");
    ly->add_option("--profile", profile_str);
    ly->add_option("--delta", delta);
    ly->add_option("--paths", n_paths);
    ly->add_option("--step", step);
    ly->add_option("--horizon", horizon, "g-time horizon");
    ly->add_option("--qr-stride", qr_stride);
    ly->add_option("--out", out_path);

    auto* ig = app.add_subcommand("integrability", "truncated mean-F scan over both metrics");
    ig->add_option("--lambda", lambda_str);
    ig->add_option("--delta", delta);
    ig->add_option("--eps-efolds", eps_efolds, "comma-separated -log(epsilon) values");
    ig->add_option("--outer-c", outer_c);
    ig->add_option("--paths", n_paths);
    ig->add_option("--step", step);
    ig->add_option("--out", out_path);

    auto* cf = app.add_subcommand("config", "configuration utilities");
    auto* cfd = cf->add_subcommand("dump", "echo the parsed config canonically");

    CLI11_PARSE(app, argc, argv);

    try {
        if (!g.config_path.empty()) {
            g.cfg = ConfigFile::load(g.config_path);
            g.have_cfg = true;
        }
        for (CLI::App* sub : {m, sp, cc, ly, ig}) {
            if (!sub->parsed()) continue;
            resolve(sub, g, "--lambda", "lambda", lambda_str);
            if (sub != ig) resolve(sub, g, "--x", "x", x_str);
        }
        if (g.have_cfg) {
            auto num = [&](const char* key, double& target, CLI::App* sub, const char* flag) {
                if (sub->parsed() && sub->count(flag) == 0 && g.cfg.find(key))
                    target = std::strtod(g.cfg.find(key)->c_str(), nullptr);
            };
            for (CLI::App* sub : {sp, cc, ly, ig}) {
                if (!sub->parsed()) continue;
                num("step", step, sub, "--step");
                num("delta", delta, sub, "--delta");
            }
            if (sp->parsed() || cc->parsed()) {
                CLI::App* sub = sp->parsed() ? sp : cc;
                num("max_g_time", max_g, sub, "--max-g-time");
                if (g.cfg.find("profile") && sub->count("--profile") == 0)
                    profile_str = *g.cfg.find("profile");
            }
            if ((ly->parsed() || sp->parsed() || ig->parsed()) && g.cfg.find("paths")) {
                CLI::App* sub = ly->parsed() ? ly : (sp->parsed() ? sp : ig);
                if (sub->count("--paths") == 0)
                    n_paths = (int)std::strtol(g.cfg.find("paths")->c_str(), nullptr, 10);
            }
        }

        uint64_t seed = resolve_seed(g, app);
        SamplerConfig cfg;
        cfg.step = step;
        cfg.master_seed = seed;
        cfg.max_g_time = max_g;
        cfg.boundary_policy =
            policy == "reject_resample" ? BoundaryPolicy::reject_resample : BoundaryPolicy::absorb;

        if (m->parsed()) return cmd_model(lambda_str, x_str, out_path);
        if (vm->parsed()) return cmd_verify_metric(delta, r_min, r_max, samples);
        if (sp->parsed())
            return cmd_sample(lambda_str, x_str, profile_from(profile_str, delta), cfg,
                              n_paths, node_stride, g.workers, out_path);
        if (cc->parsed())
            return cmd_cocycle(lambda_str, x_str, profile_from(profile_str, delta), cfg,
                               path_index, cocycle_stride, out_path);
        if (ly->parsed())
            return cmd_lyapunov(lambda_str, law_str, x_str, eps, outer_c,
                                profile_from(profile_str, delta), cfg, n_paths, horizon,
                                qr_stride, g.workers, out_path);
        if (ig->parsed())
            return cmd_integrability(lambda_str, delta, eps_efolds, outer_c, cfg, n_paths,
                                     g.workers, out_path);
        if (cf->parsed()) {
            if (cfd->parsed()) {
                if (!g.have_cfg) throw std::invalid_argument("config dump needs --config");
                std::cout << g.cfg.dump();
                return 0;
            }
            throw std::invalid_argument("config: expected the dump subcommand");
        }
    } catch (const std::invalid_argument& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
