#include "cli.hpp"

#include "pdarcy/config.hpp"
#include "pdarcy/errors.hpp"
#include "pdarcy/fem2d.hpp"
#include "pdarcy/flatten.hpp"
#include "pdarcy/geometry.hpp"
#include "pdarcy/mesh2d.hpp"
#include "pdarcy/solver1d.hpp"
#include "pdarcy/study.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>

namespace pdarcy::cli {

namespace {

const char* const subcommands[] = {"validate-zeta", "solve1d", "solve2d", "flatten-check", "flatten-solve", "study"};

std::string num(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::ofstream open_output(const std::string& path)
{
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) {
        throw IoError("cannot open '" + path + "' for writing");
    }
    return os;
}

/// Options shared by every subcommand that builds a perturbation.
struct ZetaOptions {
    std::string config;
    std::string forcing;
    std::optional<std::string> family;
    std::optional<double> amplitude;
    std::optional<int> wavenumber;
    std::optional<double> center;
    std::optional<double> width;
    std::optional<double> knot;
    std::optional<double> value;
    std::optional<std::string> table;
    std::optional<double> eps;

    void attach(CLI::App& app, bool zeta_flags = true)
    {
        app.add_option("--config", config, "Run configuration (INI)");
        app.add_option("--forcing", forcing, "File with a [forcing] section");
        app.add_option("--eps", eps, "Scale ratio epsilon in (0, 1]");
        if (!zeta_flags) {
            return;
        }
        app.add_option("--zeta-family,--family", family, "sine, bump, hat, constant or table");
        app.add_option("--amplitude", amplitude, "Perturbation amplitude");
        app.add_option("--wavenumber", wavenumber, "sine wavenumber");
        app.add_option("--center", center, "bump center");
        app.add_option("--width", width, "bump half-width");
        app.add_option("--knot", knot, "hat knot");
        app.add_option("--value", value, "constant perturbation value");
        app.add_option("--table", table, "CSV table (x, zeta)");
    }

    RunConfig load() const
    {
        RunConfig cfg = config.empty() ? RunConfig{} : load_run_config(config);
        if (!forcing.empty()) {
            cfg.forcing = load_run_config(forcing).forcing;
        }
        auto& p = cfg.perturbation;
        if (family) p.family = *family;
        if (amplitude) p.amplitude = *amplitude;
        if (wavenumber) p.params.wavenumber = *wavenumber;
        if (center) p.params.center = *center;
        if (width) p.params.width = *width;
        if (knot) p.params.knot = *knot;
        if (value) p.value = *value;
        if (table) {
            p.table = *table;
            cfg.base_dir = ".";
        }
        if (eps) {
            cfg.domain.epsilon = *eps;
            try {
                cfg.domain.validate();
            } catch (const std::invalid_argument& e) {
                throw ConfigError(e.what());
            }
        }
        return cfg;
    }
};

/// Builds zeta and refuses inadmissible shapes.
Perturbation admissible_zeta(const RunConfig& cfg, std::ostream& err)
{
    const Perturbation zeta = cfg.make_zeta();
    const auto rep = validate_admissible(zeta, cfg.domain, cfg.perturbation.samples);
    if (!rep.admissible) {
        for (const auto& v : rep.violations) {
            err << "violation: " << v << '\n';
        }
        throw std::invalid_argument("perturbation is not admissible");
    }
    return zeta;
}

void write_field_csv(const Field2D& f, std::ostream& os)
{
    os << "node_id,x,z,value\n";
    for (std::size_t i = 0; i < f.mesh->node_count(); ++i) {
        const auto& p = f.mesh->nodes()[i];
        os << i << ',' << num(p.x()) << ',' << num(p.y()) << ',' << num(f.values(static_cast<Eigen::Index>(i))) << '\n';
    }
}

void write_mesh_csv(const Mesh2D& m, std::ostream& os)
{
    os << "triangle_id,n0,n1,n2,region\n";
    for (std::size_t t = 0; t < m.triangle_count(); ++t) {
        const auto& tri = m.triangles()[t];
        os << t << ',' << tri[0] << ',' << tri[1] << ',' << tri[2] << ',' << m.regions()[t] << '\n';
    }
}

int run_validate(const ZetaOptions& opts, int samples, std::ostream& out, std::ostream& err)
{
    RunConfig cfg = opts.load();
    if (samples > 0) {
        cfg.perturbation.samples = samples;
    }
    Perturbation zeta;
    try {
        zeta = cfg.make_zeta();
    } catch (const std::invalid_argument& e) {
        out << "admissible: false\nviolation: " << e.what() << '\n';
        return validation_failure;
    }
    auto rep = validate_admissible(zeta, cfg.domain, cfg.perturbation.samples);
    if (cfg.forcing.continuity_tol) {
        const auto f = validate_forcing(cfg.make_forcing(), cfg.forcing.continuity_tol);
        rep.admissible = rep.admissible && f.admissible;
        rep.violations.insert(rep.violations.end(), f.violations.begin(), f.violations.end());
    }
    out << "zeta: " << zeta.describe() << '\n';
    out << "norm_sup: " << num(zeta.norm_sup()) << '\n';
    out << "norm_w1inf: " << num(zeta.norm_w1inf()) << '\n';
    out << "admissible: " << (rep.admissible ? "true" : "false") << '\n';
    for (const auto& v : rep.violations) {
        out << "violation: " << v << '\n';
        err << "violation: " << v << '\n';
    }
    return rep.admissible ? ok : validation_failure;
}

int run_solve1d(const ZetaOptions& opts, double zeta, const std::string& method, int n_cells, int samples,
                const std::string& out_path, std::ostream& out, std::ostream& err)
{
    const RunConfig cfg = opts.load();
    const ForcingSpec forcing = cfg.make_forcing();
    const double eps = cfg.domain.epsilon;
    const Permeability k{cfg.domain.k1, cfg.domain.k2};
    PiecewiseField1D field;
    if (method == "exact") {
        field = solve_exact_1d(forcing, zeta, eps, k);
    } else if (method == "fem") {
        field = solve_fem_1d(forcing, zeta, eps, n_cells > 0 ? n_cells : cfg.solver.n_cells, k);
    } else if (method == "flattened") {
        field = solve_flattened_1d(zeta, forcing, eps, k);
    } else {
        throw std::invalid_argument("unknown 1D method '" + method + "'");
    }
    std::ostringstream csv;
    csv << "x,value,derivative,piece_id\n";
    const auto& pieces = field.pieces();
    for (std::size_t i = 0; i < pieces.size(); ++i) {
        const auto& p = pieces[i];
        for (int s = 0; s < samples; ++s) {
            const double x = s + 1 == samples ? p.hi : p.lo + (p.hi - p.lo) * s / (samples - 1);
            csv << num(x) << ',' << num(p.value(x)) << ',' << num(p.derivative(x)) << ',' << i << '\n';
        }
    }
    if (out_path.empty()) {
        out << csv.str();
    } else {
        auto os = open_output(out_path);
        os << csv.str();
    }
    err << "solve1d: " << method << " solution with " << pieces.size() << " pieces, value at 1 = " << num(field.value(1.0))
        << '\n';
    return ok;
}

struct MeshOptions {
    int nx = 0;
    int nz = 0;

    void attach(CLI::App& app)
    {
        app.add_option("--nx", nx, "Columns")->check(CLI::PositiveNumber);
        app.add_option("--nz", nz, "Cells per half height")->check(CLI::PositiveNumber);
    }

    std::pair<int, int> resolve(const RunConfig& cfg) const
    {
        const int x = nx > 0 ? nx : cfg.solver.nx;
        const int z = nz > 0 ? nz : cfg.solver.nz;
        if (x < 2 || z < 2) {
            throw ConfigError("mesh resolutions must be at least 2");
        }
        return {x, z};
    }
};

CgOptions cg_options(const RunConfig& cfg) { return {cfg.solver.cg_tolerance, cfg.solver.max_iterations}; }

int run_solve2d(const ZetaOptions& opts, const MeshOptions& mesh_opts, const std::string& out_path,
                const std::string& mesh_out, std::ostream& out, std::ostream& err)
{
    const RunConfig cfg = opts.load();
    const Perturbation zeta = admissible_zeta(cfg, err);
    const auto [nx, nz] = mesh_opts.resolve(cfg);
    auto mesh = std::make_shared<const Mesh2D>(build_fitted_mesh(zeta, nx, nz));
    const DiscreteSolution sol = assemble_solve(mesh, cfg.make_forcing(), cfg.domain.epsilon,
                                                {cfg.domain.k1, cfg.domain.k2}, cg_options(cfg));
    if (out_path.empty()) {
        write_field_csv(sol.field, out);
    } else {
        auto os = open_output(out_path);
        write_field_csv(sol.field, os);
    }
    if (!mesh_out.empty()) {
        auto os = open_output(mesh_out);
        write_mesh_csv(*mesh, os);
    }
    const EnergySplit e = energy_split(sol.field, cfg.domain.epsilon, {cfg.domain.k1, cfg.domain.k2});
    err << "solve2d: " << sol.stats.unknowns << " unknowns, " << sol.stats.iterations << " CG iterations, residual "
        << num(sol.stats.residual) << ", energy " << num(e.total) << ", load " << num(sol.stats.load_value) << '\n';
    return ok;
}

int run_flatten_check(const ZetaOptions& opts, int points, unsigned seed, std::ostream& out)
{
    const RunConfig cfg = opts.load();
    const Perturbation zeta = cfg.make_zeta();
    const auto rep = flatten_check(zeta, points, seed);
    out << "zeta: " << zeta.describe() << '\n';
    out << "points_per_region: " << rep.points << '\n';
    out << "max_roundtrip_error: " << num(rep.max_roundtrip_error) << '\n';
    out << "max_identity_error: " << num(rep.max_identity_error) << '\n';
    out << "max_det_error: " << num(rep.max_det_error) << '\n';
    out << "min_eigen_margin: " << num(rep.min_eigen_margin) << '\n';
    out << "max_inverse_norm_ratio: " << num(rep.max_inverse_norm_ratio) << '\n';
    out << "max_chain_rule_error: " << num(rep.max_chain_rule_error) << '\n';
    for (const auto& v : rep.violations) {
        out << "violation: " << v << '\n';
    }
    out << "passed: " << (rep.passed() ? "true" : "false") << '\n';
    return rep.passed() ? ok : validation_failure;
}

int run_flatten_solve(const ZetaOptions& opts, const MeshOptions& mesh_opts, const std::string& out_path,
                      const std::string& compare_path, int levels, std::ostream& out, std::ostream& err)
{
    const RunConfig cfg = opts.load();
    const Perturbation zeta = admissible_zeta(cfg, err);
    const auto [nx, nz] = mesh_opts.resolve(cfg);
    const ForcingSpec forcing = cfg.make_forcing();
    const double eps = cfg.domain.epsilon;
    const Permeability k{cfg.domain.k1, cfg.domain.k2};

    auto reference = std::make_shared<const Mesh2D>(build_reference_mesh(nx, nz));
    const DiscreteSolution rho = solve_flattened(zeta, forcing, eps, reference, k, cg_options(cfg));
    if (out_path.empty() && compare_path.empty()) {
        write_field_csv(rho.field, out);
    } else if (!out_path.empty()) {
        auto os = open_output(out_path);
        write_field_csv(rho.field, os);
    }
    err << "flatten-solve: " << rho.stats.unknowns << " unknowns, " << rho.stats.iterations << " CG iterations\n";

    if (!compare_path.empty()) {
        std::ostringstream csv;
        csv << "h,vnorm_gap\n";
        for (int level = 0; level < std::max(levels, 1); ++level) {
            const int sx = nx << level;
            const int sz = nz << level;
            auto ref = std::make_shared<const Mesh2D>(build_reference_mesh(sx, sz));
            auto fitted = std::make_shared<const Mesh2D>(build_fitted_mesh(zeta, sx, sz));
            const DiscreteSolution q = assemble_solve(fitted, forcing, eps, k, cg_options(cfg));
            const DiscreteSolution r = level == 0 ? rho : solve_flattened(zeta, forcing, eps, ref, k, cg_options(cfg));
            const Field2D pulled = t_apply(zeta, q.field, r.field.mesh, PullbackDirection::to_reference);
            const double gap = vnorm_diff_2d(pulled, r.field).value;
            csv << num(1.0 / sx) << ',' << num(gap) << '\n';
            err << "flatten-solve: h = 1/" << sx << ", gap " << num(gap) << '\n';
        }
        auto os = open_output(compare_path);
        os << csv.str();
    }
    return ok;
}

int run_study(const std::string& config, const std::string& mode, const std::string& out_dir, std::ostream& out,
              std::ostream& err)
{
    RunConfig cfg = load_run_config(config);
    if (!mode.empty()) {
        try {
            cfg.study.mode = parse_mode(mode);
        } catch (const std::invalid_argument& e) {
            throw ConfigError(e.what());
        }
    }
    const StudyConfig sc = cfg.make_study();
    const SweepResult sweep = run_sequence(sc);
    const EstimateReport rep = check_estimates(sweep.records, sc);
    emit_report(sweep, rep, sc, out_dir);

    bool nonconvergent = false;
    for (const auto& r : sweep.records) {
        nonconvergent = nonconvergent || r.status.rfind("nonconvergent", 0) == 0;
    }
    out << "records: " << sweep.records.size() << '\n';
    out << "gap_strictly_decreasing: " << (strictly_decreasing_gaps(sweep.records) ? "true" : "false") << '\n';
    if (const auto slope = fit_loglog_slope(sweep.records)) {
        out << "loglog_slope: " << num(*slope) << '\n';
    }
    out << "estimates_passed: " << (rep.passed ? "true" : "false") << '\n';
    for (const auto& f : rep.failures) {
        err << "failure: " << f << '\n';
    }
    for (const auto& a : rep.advisories) {
        err << "advisory: " << a << '\n';
    }
    if (nonconvergent) {
        return nonconvergence;
    }
    return rep.passed ? ok : validation_failure;
}

}  // namespace

std::string usage()
{
    std::ostringstream os;
    os << "usage: pdarcy <subcommand> [options]\n\nsubcommands:\n";
    for (const char* s : subcommands) {
        os << "  " << s << '\n';
    }
    os << "\nrun 'pdarcy <subcommand> --help' for the options of a subcommand\n";
    return os.str();
}

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    if (args.empty() || std::find(std::begin(subcommands), std::end(subcommands), args.front()) == std::end(subcommands)) {
        if (!args.empty()) {
            err << "unknown subcommand '" << args.front() << "'\n";
        }
        err << usage();
        return usage_error;
    }

    CLI::App app{"Two-region Darcy interface solver", "pdarcy"};
    app.require_subcommand(1);

    ZetaOptions zopts;
    MeshOptions mopts;
    int samples = 0;
    double zeta1d = 0.0;
    std::string method = "exact";
    int n_cells = 0;
    int csv_samples = 9;
    std::string out_path;
    std::string mesh_out;
    std::string compare_path;
    int levels = 1;
    int points = 1000;
    unsigned seed = 1;
    std::string mode;
    std::string out_dir;
    std::string study_config;

    auto* validate = app.add_subcommand("validate-zeta", "Check admissibility of a perturbation");
    zopts.attach(*validate);
    validate->add_option("--samples", samples, "Sampling resolution");

    auto* s1 = app.add_subcommand("solve1d", "Solve the 1D problem");
    zopts.attach(*s1, false);
    s1->add_option("--zeta", zeta1d, "Interface position in (-1, 1)");
    s1->add_option("--method", method, "exact, fem or flattened")->check(CLI::IsMember({"exact", "fem", "flattened"}));
    s1->add_option("--n-cells", n_cells, "Cells for the fem method");
    s1->add_option("--samples", csv_samples, "Output points per piece (endpoints included)")
        ->check(CLI::Range(2, 1000000));
    s1->add_option("--out", out_path, "Output CSV");

    auto* s2 = app.add_subcommand("solve2d", "Solve on the interface-fitted mesh");
    zopts.attach(*s2);
    mopts.attach(*s2);
    s2->add_option("--out", out_path, "Field CSV");
    s2->add_option("--mesh-out", mesh_out, "Mesh CSV");

    auto* fc = app.add_subcommand("flatten-check", "Property sweep of maps and matrices");
    zopts.attach(*fc);
    fc->add_option("--points", points, "Random points per region")->check(CLI::PositiveNumber);
    fc->add_option("--seed", seed, "Random seed");

    auto* fs = app.add_subcommand("flatten-solve", "Solve the pulled-back problem on the reference mesh");
    zopts.attach(*fs);
    mopts.attach(*fs);
    fs->add_option("--out", out_path, "Field CSV on the reference mesh");
    fs->add_option("--compare-fitted", compare_path, "CSV of h, vnorm_gap against the fitted solve");
    fs->add_option("--levels", levels, "Number of mesh halvings for --compare-fitted")->check(CLI::Range(1, 8));

    auto* st = app.add_subcommand("study", "Run a convergence sweep");
    st->add_option("--config", study_config, "Run configuration (INI)")->required();
    st->add_option("--mode", mode, "oned, fitted2d or flattened2d");
    st->add_option("--out-dir", out_dir, "Directory for records.csv and summary.json")->required();

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return ok;
    } catch (const CLI::ParseError& e) {
        err << e.what() << '\n' << usage();
        return usage_error;
    }

    try {
        if (*validate) {
            return run_validate(zopts, samples, out, err);
        }
        if (*s1) {
            return run_solve1d(zopts, zeta1d, method, n_cells, csv_samples, out_path, out, err);
        }
        if (*s2) {
            return run_solve2d(zopts, mopts, out_path, mesh_out, out, err);
        }
        if (*fc) {
            return run_flatten_check(zopts, points, seed, out);
        }
        if (*fs) {
            return run_flatten_solve(zopts, mopts, out_path, compare_path, levels, out, err);
        }
        if (*st) {
            return run_study(study_config, mode, out_dir, out, err);
        }
    } catch (const SolverError& e) {
        err << "error: " << e.what() << '\n';
        return nonconvergence;
    } catch (const IoError& e) {
        err << "error: " << e.what() << '\n';
        return io_error;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return validation_failure;
    }
    err << usage();
    return usage_error;
}

int dispatch(int argc, char** argv)
{
    std::vector<std::string> args(argv + 1, argv + argc);
    return dispatch(args, std::cout, std::cerr);
}

}  // namespace pdarcy::cli
