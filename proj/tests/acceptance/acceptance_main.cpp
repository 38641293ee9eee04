/// Acceptance suite: one PASS/FAIL line per criterion.
///
/// Usage: pdarcy_acceptance [--criterion N] [--config-dir DIR]

#include "../support/random_fields.hpp"

#include "pdarcy/config.hpp"
#include "pdarcy/fem2d.hpp"
#include "pdarcy/flatten.hpp"
#include "pdarcy/geometry.hpp"
#include "pdarcy/mesh2d.hpp"
#include "pdarcy/solver1d.hpp"
#include "pdarcy/study.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <limits>
#include <memory>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

namespace {

using namespace pdarcy;

std::string config_dir = PDARCY_CONFIG_DIR;

struct Outcome {
    bool passed = true;
    std::ostringstream detail;

    void require(bool ok, const std::string& what)
    {
        if (!ok) {
            if (!passed) {
                detail << "; ";
            }
            passed = false;
            detail << what;
        }
    }
};

std::string fmt(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3e", v);
    return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0)
{
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

/// Least-squares slope of log(y) against log(x).
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y)
{
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = static_cast<double>(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double lx = std::log(x[i]);
        const double ly = std::log(y[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

std::vector<ForcingSpec> volume_flux_grid()
{
    std::vector<ForcingSpec> grid;
    for (const char* F : {"0", "1", "x^2"}) {
        for (const char* f : {"0", "1", "cos(x)"}) {
            grid.push_back(ForcingSpec::from_expressions(F, f));
        }
    }
    return grid;
}

Outcome criterion_1()
{
    Outcome out;
    const auto t0 = std::chrono::steady_clock::now();
    double worst = 0.0;
    int configs = 0;
    for (const auto& forcing : volume_flux_grid()) {
        for (double zeta : {0.25, -0.25, 0.1, -0.1}) {
            for (double eps : {0.5, 0.1}) {
                const auto q = solve_exact_1d(forcing, zeta, eps);
                const auto p = solve_exact_1d(forcing, 0.0, eps);
                const double dq = vnorm_diff_1d(project_Hperp(q, zeta), hperp_exact_perturbed(forcing, zeta, eps));
                const double dp = vnorm_diff_1d(project_Hperp(p, zeta), hperp_exact_original(forcing, zeta, eps));
                worst = std::max({worst, dq, dp});
                ++configs;
            }
        }
    }
    const double elapsed = seconds_since(t0);
    out.require(worst < 1e-8, "max V-norm mismatch " + fmt(worst) + " >= 1e-8");
    out.require(elapsed < 1.0, "runtime " + fmt(elapsed) + " s >= 1 s");
    out.detail << (out.passed ? "" : " | ") << configs << " configurations, max mismatch " << fmt(worst);
    return out;
}

Outcome criterion_2()
{
    Outcome out;
    const auto forcing = ForcingSpec::constant(0.0, 1.0);
    std::vector<double> zetas = {0.25, 0.0625, 0.015625};
    std::vector<double> gaps;
    double worst_sqrt = 0.0;
    double worst_bound = 0.0;
    for (double eps : {0.5, 0.1}) {
        gaps.clear();
        for (double zeta : zetas) {
            const double gap = vnorm_diff_1d(solve_exact_1d(forcing, 0.0, eps), solve_exact_1d(forcing, zeta, eps));
            const double total = estimate_rhs_1d(forcing, zeta, eps).total;
            worst_sqrt = std::max(worst_sqrt, std::abs(gap - std::sqrt(zeta)));
            worst_bound = std::max(worst_bound, std::abs(gap - total));
            gaps.push_back(gap);
        }
    }
    const double slope = loglog_slope(zetas, gaps);
    out.require(worst_sqrt < 1e-9, "|gap - sqrt(zeta)| = " + fmt(worst_sqrt));
    out.require(worst_bound < 1e-9, "|gap - bound| = " + fmt(worst_bound));
    out.require(std::abs(slope - 0.5) <= 0.02, "slope " + fmt(slope));
    out.detail << (out.passed ? "" : " | ") << "slope " << slope << ", max |gap - sqrt(zeta)| " << fmt(worst_sqrt)
               << ", max |gap - bound| " << fmt(worst_bound);
    return out;
}

Outcome criterion_3()
{
    Outcome out;
    struct Case {
        const char* F;
        const char* f;
        double eps;
    };
    const Case cases[] = {{"1", "cos(x)", 0.5}, {"0", "1", 0.5}, {"x^2", "1 + x", 0.1}};
    for (const auto& c : cases) {
        const auto forcing = ForcingSpec::from_expressions(c.F, c.f);
        const auto p = solve_exact_1d(forcing, 0.0, c.eps);
        std::vector<double> gaps;
        for (int n = 1; n <= 12; ++n) {
            const double zeta = std::ldexp(1.0, -n);
            gaps.push_back(vnorm_diff_1d(p, solve_exact_1d(forcing, zeta, c.eps)));
        }
        bool monotone = true;
        for (std::size_t i = 1; i < gaps.size(); ++i) {
            monotone = monotone && gaps[i] < gaps[i - 1];
        }
        const std::string tag = std::string("F=") + c.F + ", f=" + c.f;
        out.require(monotone, tag + ": gaps not decreasing");
        out.require(gaps.back() < 1e-3, tag + ": gap at 2^-12 is " + fmt(gaps.back()));
    }
    return out;
}

Outcome criterion_4()
{
    Outcome out;
    const auto t0 = std::chrono::steady_clock::now();
    std::mt19937_64 rng(4);
    const double zetas[] = {0.1, 0.25, 0.5, -0.3};
    double worst_sum = 0.0;
    double worst_orth = 0.0;
    double worst_member = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        const double zeta = zetas[trial % 4];
        const auto r = pdarcy::testing::random_piecewise_polynomial(rng);
        const auto s = pdarcy::testing::random_piecewise_polynomial(rng);
        const auto hr = project_H(r, zeta);
        const auto pr = project_Hperp(r, zeta);
        const auto ps = project_Hperp(s, zeta);
        worst_sum = std::max(worst_sum, vnorm_diff_1d(combine(hr, 1.0, pr, 1.0), r));
        worst_orth = std::max(worst_orth, std::abs(vinner_1d(hr, ps)));

        const double a = std::min(0.0, zeta);
        const double b = std::max(0.0, zeta);
        for (int i = 1; i < 50; ++i) {
            const double t = i / 50.0;
            const double inside = a + t * (b - a);
            const double before = -1.0 + t * (a + 1.0);
            const double after = b + t * (1.0 - b);
            worst_member = std::max({worst_member, std::abs(hr.derivative(inside)), std::abs(pr.value(before)),
                                     std::abs(pr.derivative(before)), std::abs(pr.derivative(after))});
        }
    }
    const double elapsed = seconds_since(t0);
    out.require(worst_sum < 1e-10, "decomposition residual " + fmt(worst_sum));
    out.require(worst_orth < 1e-10, "inner product " + fmt(worst_orth));
    out.require(worst_member < 1e-10, "membership violation " + fmt(worst_member));
    out.require(elapsed < 1.0, "runtime " + fmt(elapsed) + " s");
    out.detail << (out.passed ? "" : " | ") << "100 fields, residual " << fmt(worst_sum) << ", inner product "
               << fmt(worst_orth) << ", membership " << fmt(worst_member);
    return out;
}

std::vector<Perturbation> five_shapes()
{
    return {
        make_perturbation(PerturbationFamily::sine, {}, 0.25),
        make_perturbation(PerturbationFamily::sine, {3, 0.5, 0.25, 0.5}, 0.1),
        make_perturbation(PerturbationFamily::bump, {1, 0.4, 0.3, 0.5}, 0.3),
        make_perturbation(PerturbationFamily::hat, {1, 0.5, 0.25, 0.3}, 0.2),
        Perturbation::tabulated({0.0, 0.2, 0.45, 0.7, 1.0}, {0.0, -0.15, 0.1, 0.05, 0.0}),
    };
}

Outcome criterion_5()
{
    Outcome out;
    const auto t0 = std::chrono::steady_clock::now();
    double chain = 0.0;
    double margin = 1.0;
    for (const auto& zeta : five_shapes()) {
        const auto rep = flatten_check(zeta, 1000, 5);
        for (const auto& v : rep.violations) {
            out.require(false, zeta.describe() + ": " + v);
        }
        chain = std::max(chain, rep.max_chain_rule_error);
        margin = std::min(margin, rep.min_eigen_margin);
    }
    const double elapsed = seconds_since(t0);
    out.require(elapsed < 5.0, "runtime " + fmt(elapsed) + " s");
    out.detail << (out.passed ? "" : " | ") << "5 shapes x 1000 points x 2 regions, min eigen margin " << fmt(margin)
               << ", max chain-rule error " << fmt(chain);
    return out;
}

Outcome criterion_6()
{
    Outcome out;
    const auto t0 = std::chrono::steady_clock::now();
    const auto zeta = make_perturbation(PerturbationFamily::sine, {}, 0.1);
    const auto forcing = ForcingSpec::from_expressions("1", "1");
    const double eps = 0.1;
    std::vector<double> hs;
    std::vector<double> gaps;
    for (int n : {16, 32, 64, 128}) {
        auto fitted = std::make_shared<const Mesh2D>(build_fitted_mesh(zeta, n, n));
        auto reference = std::make_shared<const Mesh2D>(build_reference_mesh(n, n));
        const auto q = assemble_solve(fitted, forcing, eps);
        const auto rho = solve_flattened(zeta, forcing, eps, reference);
        const auto pulled = t_apply(zeta, q.field, reference, PullbackDirection::to_reference);
        hs.push_back(1.0 / n);
        gaps.push_back(vnorm_diff_2d(pulled, rho.field).value);
    }
    const double C = gaps[0] / hs[0];
    std::ostringstream table;
    for (std::size_t i = 0; i < hs.size(); ++i) {
        out.require(gaps[i] <= 2.0 * C * hs[i], "gap " + fmt(gaps[i]) + " at h " + fmt(hs[i]) + " exceeds 2 C h");
        table << (i ? ", " : "") << fmt(gaps[i]);
    }
    const double elapsed = seconds_since(t0);
    out.require(elapsed < 120.0, "runtime " + fmt(elapsed) + " s");
    out.detail << (out.passed ? "" : " | ") << "gaps at h = 1/16..1/128: " << table.str() << ", C = " << fmt(C);
    return out;
}

/// x^T K x for a nodal vector.
double quadratic_form(const Eigen::SparseMatrix<double>& K, const Eigen::VectorXd& x) { return x.dot(K * x); }

Outcome criterion_7()
{
    Outcome out;
    const double eps = 0.1;
    const auto forcing = ForcingSpec::from_expressions("1 + x*z", "cos(x)");
    double worst_identity = 0.0;
    for (double amplitude : {0.0, 0.1, 0.2}) {
        const auto zeta = make_perturbation(PerturbationFamily::sine, {}, amplitude);
        auto fitted = std::make_shared<const Mesh2D>(build_fitted_mesh(zeta, 32, 32));
        const auto q = assemble_solve(fitted, forcing, eps);
        const double load = q.stats.load_value;
        worst_identity = std::max(worst_identity, std::abs(energy_split(q.field, eps).total - load) / std::abs(load));

        auto reference = std::make_shared<const Mesh2D>(build_reference_mesh(32, 32));
        const auto problem = flattened_problem(zeta, forcing, eps);
        const auto system = assemble_galerkin(*reference, problem);
        const auto rho = solve_galerkin(reference, system);
        const double energy = quadratic_form(system.stiffness, rho.field.values);
        worst_identity = std::max(worst_identity, std::abs(energy - rho.stats.load_value) / std::abs(rho.stats.load_value));
    }
    out.require(worst_identity < 1e-8, "energy identity relative error " + fmt(worst_identity));

    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    double worst_margin = std::numeric_limits<double>::infinity();
    int violations = 0;
    int samples = 0;
    for (double amplitude : {0.1, 0.2}) {
        const auto zeta = make_perturbation(PerturbationFamily::sine, {}, amplitude);
        auto mesh = std::make_shared<const Mesh2D>(build_fitted_mesh(zeta, 32, 32));
        const double C = lower_bound_constant(zeta, eps);
        for (int trial = 0; trial < 20; ++trial) {
            Field2D r{mesh, Eigen::VectorXd(static_cast<Eigen::Index>(mesh->node_count()))};
            for (std::size_t i = 0; i < mesh->node_count(); ++i) {
                r.values(static_cast<Eigen::Index>(i)) = mesh->dirichlet()[i] ? 0.0 : unit(rng);
            }
            const double a_zeta = energy_split(r, eps).total;
            const double a_flat = energy_flat_split(r, eps).total;
            const double margin = (a_zeta - C * a_flat) / a_flat;
            worst_margin = std::min(worst_margin, margin);
            violations += margin < -1e-12 ? 1 : 0;
            ++samples;
        }
    }
    out.require(violations == 0, std::to_string(violations) + " of " + std::to_string(samples) +
                                     " random fields violate a^zeta >= C_zeta a^0 (worst relative margin " +
                                     fmt(worst_margin) + ")");
    out.detail << (out.passed ? "" : " | ") << "energy identity " << fmt(worst_identity)
               << ", min relative coercivity margin " << fmt(worst_margin) << " over " << samples << " fields";
    return out;
}

Outcome criterion_8()
{
    Outcome out;
    const auto t0 = std::chrono::steady_clock::now();
    StudyConfig cfg;
    cfg.mode = StudyMode::fitted2d;
    cfg.domain.epsilon = 0.1;
    cfg.amplitudes = {0.2, 0.1, 0.05, 0.025};
    cfg.forcing = ForcingSpec::from_expressions("1", "1");
    cfg.nx = cfg.nz = 64;
    const auto sweep = run_sequence(cfg);

    auto fine = std::make_shared<const Mesh2D>(build_reference_mesh(64, 64));
    auto coarse = std::make_shared<const Mesh2D>(build_reference_mesh(32, 32));
    const auto p_fine = assemble_solve(fine, cfg.forcing, cfg.domain.epsilon);
    const auto p_coarse = assemble_solve(coarse, cfg.forcing, cfg.domain.epsilon);
    const double self_error = vnorm_diff_2d(p_fine.field, p_coarse.field).value;

    std::ostringstream table;
    for (const auto& r : sweep.records) {
        out.require(r.ok(), "row " + std::to_string(r.index) + ": " + r.status);
        table << (r.index ? ", " : "") << fmt(r.vnorm_gap);
    }
    out.require(strictly_decreasing_gaps(sweep.records), "gaps not strictly decreasing");
    const double last = sweep.records.back().vnorm_gap;
    out.require(last < 5.0 * self_error, "final gap " + fmt(last) + " >= 5 x self-convergence error " + fmt(self_error));
    const double elapsed = seconds_since(t0);
    out.require(elapsed < 300.0, "runtime " + fmt(elapsed) + " s");
    out.detail << (out.passed ? "" : " | ") << "gaps " << table.str() << ", self-convergence error " << fmt(self_error);
    return out;
}

Outcome criterion_9()
{
    Outcome out;
    const auto shape = make_perturbation(PerturbationFamily::sine, {}, 0.5);
    const double shape_constant = shape.norm_w1inf() / shape.amplitude();
    auto mesh = std::make_shared<const Mesh2D>(build_reference_mesh(64, 64));
    const ScalarField u = [](double x, double z) { return std::sin(std::numbers::pi * x) * std::exp(z) + x * z; };
    const Field2D u_h = interpolate(mesh, u);
    const double u_norm = h1_norm(u_h);
    std::vector<double> distances;
    for (int n = 1; n <= 8; ++n) {
        const auto zeta = shape.with_amplitude(std::ldexp(1.0, -n));
        out.require(zeta.norm_w1inf() <= shape_constant + 1e-12, "W1,inf norm not bounded by the shape constant");
        const Field2D tu = interpolate(mesh, t_apply(zeta, u, PullbackDirection::to_reference));
        Field2D diff{mesh, tu.values - u_h.values};
        distances.push_back(h1_norm(diff) / u_norm);
    }
    bool decreasing = true;
    for (std::size_t i = 1; i < distances.size(); ++i) {
        decreasing = decreasing && distances[i] < distances[i - 1];
    }
    out.require(decreasing, "H1 distances not decreasing");
    out.require(distances.back() < 1e-2, "relative distance at 2^-8 is " + fmt(distances.back()));
    out.detail << (out.passed ? "" : " | ") << "|u|_H1 = " << fmt(u_norm) << ", relative distance at 2^-1 "
               << fmt(distances.front()) << ", at 2^-8 " << fmt(distances.back()) << " (absolute "
               << fmt(distances.back() * u_norm) << ")";
    return out;
}

Outcome criterion_10()
{
    Outcome out;
    for (const char* name : {"study_sqrt_1d.ini", "study_fitted_2d.ini"}) {
        const auto cfg = load_run_config(config_dir + "/" + name).make_study();
        const std::string first = records_csv(run_sequence(cfg).records);
        const std::string second = records_csv(run_sequence(cfg).records);
        out.require(first == second, std::string(name) + ": records differ between runs");
        out.detail << (out.passed ? "" : " | ") << name << " " << first.size() << " bytes identical; ";
    }
    return out;
}

const std::function<Outcome()> criteria[] = {criterion_1, criterion_2, criterion_3, criterion_4, criterion_5,
                                             criterion_6, criterion_7, criterion_8, criterion_9, criterion_10};

const char* const titles[] = {
    "1D closed-form complement components",
    "1D bound tightness for F = 0, f = 1",
    "1D strong convergence below 1e-3 by amplitude 2^-12",
    "projection algebra on random fields",
    "flattening matrix properties",
    "fitted and flattened solves agree at O(h)",
    "energy identity and coercivity",
    "2D strong convergence on 64 x 64",
    "pullback operator continuity",
    "deterministic study output",
};

}  // namespace

int main(int argc, char** argv)
{
    int only = 0;
    for (int i = 1; i < argc; ++i) {
        const std::string arg = argv[i];
        if (arg == "--criterion" && i + 1 < argc) {
            only = std::atoi(argv[++i]);
        } else if (arg == "--config-dir" && i + 1 < argc) {
            config_dir = argv[++i];
        } else {
            std::cerr << "usage: pdarcy_acceptance [--criterion N] [--config-dir DIR]\n";
            return 64;
        }
    }
    if (only < 0 || only > 10) {
        std::cerr << "criterion must be between 1 and 10\n";
        return 64;
    }

    int failed = 0;
    for (int c = 1; c <= 10; ++c) {
        if (only != 0 && c != only) {
            continue;
        }
        const auto t0 = std::chrono::steady_clock::now();
        Outcome result;
        try {
            result = criteria[c - 1]();
        } catch (const std::exception& e) {
            result.passed = false;
            result.detail << "exception: " << e.what();
        }
        std::printf("criterion %2d %s  %s (%.2f s): %s\n", c, result.passed ? "PASS" : "FAIL", titles[c - 1],
                    seconds_since(t0), result.detail.str().c_str());
        std::fflush(stdout);
        failed += result.passed ? 0 : 1;
    }
    return failed == 0 ? 0 : 1;
}
