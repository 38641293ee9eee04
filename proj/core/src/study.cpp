#include "pdarcy/study.hpp"

#include "pdarcy/flatten.hpp"
#include "pdarcy/mesh2d.hpp"
#include "pdarcy/quadrature.hpp"

#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace pdarcy {

namespace {

constexpr double nan = std::numeric_limits<double>::quiet_NaN();

double derivative_energy(const PiecewiseField1D& u, double lo, double hi)
{
    double sum = 0.0;
    for (const auto& piece : u.pieces()) {
        const double a = std::max(lo, piece.lo);
        const double b = std::min(hi, piece.hi);
        if (a < b) {
            sum += integrate(
                [&](double x) {
                    const double d = piece.derivative(x);
                    return d * d;
                },
                a, b, 8, 4);
        }
    }
    return sum;
}

EnergySplit split_1d(const PiecewiseField1D& u, double interface, double eps, const Permeability& k)
{
    EnergySplit e;
    e.e1 = k.k1 * derivative_energy(u, -1.0, interface);
    e.e2 = k.k2 / eps * derivative_energy(u, interface, 1.0);
    e.total = e.e1 + e.e2;
    return e;
}

std::string sanitize(std::string s)
{
    std::replace(s.begin(), s.end(), ',', ';');
    std::replace(s.begin(), s.end(), '\n', ' ');
    return s;
}

void validate_amplitudes(const std::vector<double>& amplitudes)
{
    if (amplitudes.empty()) {
        throw std::invalid_argument("study needs at least one amplitude");
    }
    for (std::size_t i = 0; i < amplitudes.size(); ++i) {
        if (!(amplitudes[i] >= 0.0 && amplitudes[i] < 1.0)) {
            throw std::invalid_argument("study amplitudes must lie in [0, 1)");
        }
        if (i > 0 && !(amplitudes[i] < amplitudes[i - 1])) {
            throw std::invalid_argument("study amplitudes must be strictly decreasing");
        }
    }
}

SweepResult run_oned(const StudyConfig& cfg)
{
    const double eps = cfg.domain.epsilon;
    const Permeability k{cfg.domain.k1, cfg.domain.k2};
    const PiecewiseField1D p = solve_exact_1d(cfg.forcing, 0.0, eps, k);
    SweepResult out;
    out.reference_energy = split_1d(p, 0.0, eps, k);
    for (std::size_t i = 0; i < cfg.amplitudes.size(); ++i) {
        const auto start = std::chrono::steady_clock::now();
        ConvergenceRecord r;
        r.index = static_cast<int>(i);
        r.amplitude = cfg.amplitudes[i];
        r.zeta_value = cfg.zeta_sign * r.amplitude;
        r.norm_sup = std::abs(r.zeta_value);
        r.norm_w1inf = r.norm_sup;
        try {
            const double z = r.zeta_value;
            const PiecewiseField1D q = solve_exact_1d(cfg.forcing, z, eps, k);
            r.vnorm_gap = vnorm_diff_1d(p, q);
            const EnergySplit e = split_1d(q, z, eps, k);
            r.e1 = e.e1;
            r.e2 = e.e2;
            r.energy_total = e.total;
            r.flat_energy_total = split_1d(q, 0.0, eps, k).total;
            r.lower_bound_constant = lower_bound_constant(StripMeasures{std::max(z, 0.0), std::max(-z, 0.0)}, eps);
            r.coercivity = (1.0 - r.norm_sup) / (1.0 + 3.0 + 4.0 * r.norm_w1inf * r.norm_w1inf);
            const double strip = derivative_energy(p, std::min(0.0, z), std::max(0.0, z));
            r.xi_on_p = z > 0.0 ? -strip : strip;
            const Bound1D b = estimate_rhs_1d(cfg.forcing, z, eps, k);
            r.bound_h = b.h_part;
            r.bound_hperp = b.hperp_part;
            r.bound_total = b.total;
        } catch (const std::exception& e) {
            r.status = sanitize(std::string("failed: ") + e.what());
        }
        r.runtime_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        out.records.push_back(std::move(r));
    }
    return out;
}

SweepResult run_twod(const StudyConfig& cfg)
{
    const double eps = cfg.domain.epsilon;
    const Permeability k{cfg.domain.k1, cfg.domain.k2};
    auto reference = std::make_shared<const Mesh2D>(build_reference_mesh(cfg.nx, cfg.nz));
    const DiscreteSolution p = assemble_solve(reference, cfg.forcing, eps, k, cfg.cg);
    SweepResult out;
    out.reference_energy = energy_split(p.field, eps, k);
    const GradientField grad_p = [&p](double x, double z) {
        const auto loc = p.field.mesh->locate(x, z);
        return loc ? p.field.gradient(loc->triangle) : Eigen::Vector2d(0.0, 0.0);
    };

    for (std::size_t i = 0; i < cfg.amplitudes.size(); ++i) {
        const auto start = std::chrono::steady_clock::now();
        ConvergenceRecord r;
        r.index = static_cast<int>(i);
        r.amplitude = cfg.amplitudes[i];
        r.nx = cfg.nx;
        r.nz = cfg.nz;
        const Perturbation zeta = cfg.shape.with_amplitude(r.amplitude);
        r.norm_sup = zeta.norm_sup();
        r.norm_w1inf = zeta.norm_w1inf();
        try {
            auto fitted = std::make_shared<const Mesh2D>(build_fitted_mesh(zeta, cfg.nx, cfg.nz));
            Field2D q;
            if (cfg.mode == StudyMode::fitted2d) {
                q = assemble_solve(fitted, cfg.forcing, eps, k, cfg.cg).field;
            } else {
                const DiscreteSolution rho = solve_flattened(zeta, cfg.forcing, eps, reference, k, cfg.cg);
                q = t_apply(zeta, rho.field, fitted, PullbackDirection::to_perturbed);
            }
            r.vnorm_gap = vnorm_diff_2d(p.field, q).value;
            const EnergySplit e = energy_split(q, eps, k);
            r.e1 = e.e1;
            r.e2 = e.e2;
            r.energy_total = e.total;
            r.flat_energy_total = energy_flat_split(q, eps, k).total;
            r.lower_bound_constant = lower_bound_constant(zeta, eps);
            r.coercivity = coercivity_constant(zeta, 2);
            r.xi_on_p = xi_perturbation(grad_p, zeta);
        } catch (const SolverError& e) {
            r.status = sanitize(std::string("nonconvergent: ") + e.what());
        } catch (const std::exception& e) {
            r.status = sanitize(std::string("failed: ") + e.what());
        }
        r.runtime_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        out.records.push_back(std::move(r));
    }
    return out;
}

std::string format_double(double v)
{
    if (std::isnan(v)) {
        return "nan";
    }
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

StudyMode parse_mode(const std::string& name)
{
    if (name == "oned" || name == "1d") {
        return StudyMode::oned;
    }
    if (name == "fitted2d") {
        return StudyMode::fitted2d;
    }
    if (name == "flattened2d") {
        return StudyMode::flattened2d;
    }
    throw std::invalid_argument("unknown study mode '" + name + "' (expected oned, fitted2d or flattened2d)");
}

std::string to_string(StudyMode mode)
{
    switch (mode) {
    case StudyMode::oned: return "oned";
    case StudyMode::fitted2d: return "fitted2d";
    case StudyMode::flattened2d: return "flattened2d";
    }
    return "unknown";
}

SweepResult run_sequence(const StudyConfig& cfg)
{
    validate_amplitudes(cfg.amplitudes);
    cfg.domain.validate();
    if (cfg.mode == StudyMode::oned) {
        return run_oned(cfg);
    }
    return run_twod(cfg);
}

EstimateReport check_estimates(const std::vector<ConvergenceRecord>& records, const StudyConfig& cfg)
{
    EstimateReport rep;
    for (const auto& r : records) {
        const std::string row = "row " + std::to_string(r.index) + " (amplitude " + format_double(r.amplitude) + ")";
        if (!r.ok()) {
            rep.passed = false;
            rep.failures.push_back(row + ": " + r.status);
            continue;
        }
        if (cfg.mode == StudyMode::oned && !(r.vnorm_gap <= r.bound_total + cfg.bound_tolerance)) {
            rep.bound_ok = false;
            rep.failures.push_back(row + ": gap " + format_double(r.vnorm_gap) + " exceeds bound " +
                                   format_double(r.bound_total));
        }
        const double floor = r.lower_bound_constant * r.flat_energy_total;
        if (!(r.energy_total >= floor - cfg.energy_tolerance * std::max(1.0, r.flat_energy_total))) {
            rep.inner_product_ok = false;
            const std::string msg = row + ": energy " + format_double(r.energy_total) + " below C_zeta * flat energy " +
                                    format_double(floor);
            (cfg.enforce_inner_product_estimate ? rep.failures : rep.advisories).push_back(msg);
        }
    }
    if (cfg.target_gap && !records.empty()) {
        const auto& last = records.back();
        if (!(last.ok() && last.vnorm_gap < *cfg.target_gap)) {
            rep.target_ok = false;
            rep.failures.push_back("last gap " + format_double(last.vnorm_gap) + " is not below target " +
                                   format_double(*cfg.target_gap));
        }
    }
    rep.passed = rep.passed && rep.bound_ok && rep.target_ok &&
                 (rep.inner_product_ok || !cfg.enforce_inner_product_estimate);
    return rep;
}

std::optional<double> fit_loglog_slope(const std::vector<ConvergenceRecord>& records, int points)
{
    std::vector<std::pair<double, double>> usable;
    for (const auto& r : records) {
        if (r.ok() && r.amplitude > 0.0 && r.vnorm_gap > 0.0) {
            usable.emplace_back(std::log(r.amplitude), std::log(r.vnorm_gap));
        }
    }
    if (usable.size() < 2) {
        return std::nullopt;
    }
    const std::size_t n = std::min<std::size_t>(usable.size(), static_cast<std::size_t>(std::max(points, 2)));
    const auto first = usable.end() - static_cast<std::ptrdiff_t>(n);
    double mx = 0.0;
    double my = 0.0;
    for (auto it = first; it != usable.end(); ++it) {
        mx += it->first;
        my += it->second;
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sxy = 0.0;
    double sxx = 0.0;
    for (auto it = first; it != usable.end(); ++it) {
        sxy += (it->first - mx) * (it->second - my);
        sxx += (it->first - mx) * (it->first - mx);
    }
    if (sxx == 0.0) {
        return std::nullopt;
    }
    return sxy / sxx;
}

bool strictly_decreasing_gaps(const std::vector<ConvergenceRecord>& records)
{
    for (std::size_t i = 1; i < records.size(); ++i) {
        if (!records[i].ok() || !records[i - 1].ok() || !(records[i].vnorm_gap < records[i - 1].vnorm_gap)) {
            return false;
        }
    }
    return true;
}

std::vector<std::string> record_columns()
{
    return {"index",       "amplitude",     "zeta",
            "norm_sup",    "norm_w1inf",    "nx",
            "nz",          "vnorm_gap",     "e1",
            "e2",          "energy_total",  "flat_energy_total",
            "lower_bound_constant", "coercivity", "xi_on_p",
            "bound_h",     "bound_hperp",   "bound_total",
            "status"};
}

std::string records_csv(const std::vector<ConvergenceRecord>& records)
{
    std::ostringstream os;
    const auto cols = record_columns();
    for (std::size_t i = 0; i < cols.size(); ++i) {
        os << (i ? "," : "") << cols[i];
    }
    os << '\n';
    for (const auto& r : records) {
        os << r.index << ',' << format_double(r.amplitude) << ',' << format_double(r.zeta_value) << ','
           << format_double(r.norm_sup) << ',' << format_double(r.norm_w1inf) << ',' << r.nx << ',' << r.nz << ','
           << format_double(r.vnorm_gap) << ',' << format_double(r.e1) << ',' << format_double(r.e2) << ','
           << format_double(r.energy_total) << ',' << format_double(r.flat_energy_total) << ','
           << format_double(r.lower_bound_constant) << ',' << format_double(r.coercivity) << ','
           << format_double(r.xi_on_p) << ',' << format_double(r.bound_h) << ',' << format_double(r.bound_hperp)
           << ',' << format_double(r.bound_total) << ',' << r.status << '\n';
    }
    return os.str();
}

void emit_report(const SweepResult& sweep, const EstimateReport& report, const StudyConfig& cfg,
                 const std::filesystem::path& out_dir)
{
    const auto& records = sweep.records;
    if (records.empty()) {
        throw std::invalid_argument("no records");
    }
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) {
        throw IoError("cannot create output directory '" + out_dir.string() + "': " + ec.message());
    }

    {
        std::ofstream csv(out_dir / "records.csv", std::ios::binary | std::ios::trunc);
        if (!csv) {
            throw IoError("cannot write " + (out_dir / "records.csv").string());
        }
        csv << records_csv(records);
        if (!csv) {
            throw IoError("write failed for " + (out_dir / "records.csv").string());
        }
    }

    auto distance_decreasing = [&](auto value, double target) {
        for (std::size_t i = 1; i < records.size(); ++i) {
            if (std::abs(value(records[i]) - target) > std::abs(value(records[i - 1]) - target)) {
                return false;
            }
        }
        return true;
    };

    nlohmann::json j;
    j["schema_version"] = 1;
    j["mode"] = to_string(cfg.mode);
    j["epsilon"] = cfg.domain.epsilon;
    j["k1"] = cfg.domain.k1;
    j["k2"] = cfg.domain.k2;
    j["shape"] = cfg.shape.describe();
    j["forcing"] = {{"F", cfg.forcing.volume_source}, {"f", cfg.forcing.flux_source}};
    if (cfg.mode != StudyMode::oned) {
        j["mesh"] = {{"nx", cfg.nx}, {"nz", cfg.nz}};
    }
    j["columns"] = record_columns();
    j["n_records"] = records.size();
    j["gap_strictly_decreasing"] = strictly_decreasing_gaps(records);
    if (const auto slope = fit_loglog_slope(records)) {
        j["loglog_slope"] = *slope;
    } else {
        j["loglog_slope"] = nullptr;
    }
    j["reference_energy"] = {{"e1", sweep.reference_energy.e1},
                             {"e2", sweep.reference_energy.e2},
                             {"total", sweep.reference_energy.total}};
    j["energy_total_converging"] =
        distance_decreasing([](const ConvergenceRecord& r) { return r.energy_total; }, sweep.reference_energy.total);
    j["flat_energy_converging"] = distance_decreasing(
        [](const ConvergenceRecord& r) { return r.flat_energy_total; }, sweep.reference_energy.total);
    j["estimates"] = {{"passed", report.passed},
                      {"bound_ok", report.bound_ok},
                      {"inner_product_ok", report.inner_product_ok},
                      {"inner_product_enforced", cfg.enforce_inner_product_estimate},
                      {"target_ok", report.target_ok},
                      {"failures", report.failures},
                      {"advisories", report.advisories}};
    double total_runtime = 0.0;
    std::vector<double> runtimes;
    for (const auto& r : records) {
        runtimes.push_back(r.runtime_seconds);
        total_runtime += r.runtime_seconds;
    }
    j["runtime_seconds"] = runtimes;
    j["runtime_seconds_total"] = total_runtime;

    std::ofstream js(out_dir / "summary.json", std::ios::trunc);
    if (!js) {
        throw IoError("cannot write " + (out_dir / "summary.json").string());
    }
    js << j.dump(2) << '\n';
    if (!js) {
        throw IoError("write failed for " + (out_dir / "summary.json").string());
    }
}

}  // namespace pdarcy
