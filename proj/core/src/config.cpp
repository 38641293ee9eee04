#include "pdarcy/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace pdarcy {

namespace pt = boost::property_tree;

namespace {

const std::map<std::string, std::set<std::string>>& known_keys()
{
    static const std::map<std::string, std::set<std::string>> keys = {
        {"domain", {"epsilon", "k1", "k2", "poincare_bound"}},
        {"perturbation", {"family", "amplitude", "wavenumber", "center", "width", "knot", "value", "table", "samples"}},
        {"forcing", {"F", "f", "quadrature_order", "continuity_tol"}},
        {"solver", {"nx", "nz", "n_cells", "cg_tolerance", "max_iterations"}},
        {"study", {"mode", "amplitudes", "amplitude_start", "amplitude_ratio", "amplitude_count", "zeta_sign",
                   "target_gap", "bound_tolerance", "enforce_inner_product_estimate"}},
    };
    return keys;
}

template <class T>
T get_number(const pt::ptree& section, const std::string& name, const std::string& key, T fallback)
{
    const auto v = section.get_optional<std::string>(key);
    if (!v) {
        return fallback;
    }
    std::istringstream is(*v);
    T out{};
    if (!(is >> out) || !(is >> std::ws).eof()) {
        throw ConfigError("[" + name + "] " + key + ": expected a number, got '" + *v + "'");
    }
    return out;
}

bool get_bool(const pt::ptree& section, const std::string& name, const std::string& key, bool fallback)
{
    const auto v = section.get_optional<std::string>(key);
    if (!v) {
        return fallback;
    }
    if (*v == "true" || *v == "1" || *v == "yes") {
        return true;
    }
    if (*v == "false" || *v == "0" || *v == "no") {
        return false;
    }
    throw ConfigError("[" + name + "] " + key + ": expected true or false, got '" + *v + "'");
}

void require(bool ok, const std::string& what)
{
    if (!ok) {
        throw ConfigError(what);
    }
}

}  // namespace

std::vector<double> parse_number_list(const std::string& text)
{
    std::string s = text;
    std::replace(s.begin(), s.end(), ',', ' ');
    std::istringstream is(s);
    std::vector<double> out;
    std::string tok;
    while (is >> tok) {
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(tok, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used != tok.size()) {
            throw ConfigError("invalid number '" + tok + "' in list '" + text + "'");
        }
        out.push_back(v);
    }
    return out;
}

RunConfig parse_run_config(std::istream& in, const std::string& base_dir)
{
    std::ostringstream stripped;
    for (std::string line; std::getline(in, line);) {
        stripped << line.substr(0, line.find_first_of(";#")) << '\n';
    }
    std::istringstream body(stripped.str());
    pt::ptree tree;
    try {
        pt::read_ini(body, tree);
    } catch (const pt::ini_parser_error& e) {
        throw ConfigError(std::string("malformed config: ") + e.what());
    }
    for (const auto& [section, body] : tree) {
        if (!body.data().empty() || body.empty()) {
            throw ConfigError("key '" + section + "' outside of any section");
        }
        const auto it = known_keys().find(section);
        if (it == known_keys().end()) {
            throw ConfigError("unknown config section [" + section + "]");
        }
        for (const auto& [key, value] : body) {
            if (!it->second.count(key)) {
                throw ConfigError("unknown key '" + key + "' in section [" + section + "]");
            }
        }
    }
    const pt::ptree empty;
    auto section = [&](const char* name) -> const pt::ptree& {
        const auto child = tree.get_child_optional(name);
        return child ? *child : empty;
    };

    RunConfig cfg;
    cfg.base_dir = base_dir;

    const auto& dom = section("domain");
    cfg.domain.epsilon = get_number(dom, "domain", "epsilon", cfg.domain.epsilon);
    cfg.domain.k1 = get_number(dom, "domain", "k1", cfg.domain.k1);
    cfg.domain.k2 = get_number(dom, "domain", "k2", cfg.domain.k2);
    if (dom.get_optional<std::string>("poincare_bound")) {
        cfg.domain.poincare_bound = get_number(dom, "domain", "poincare_bound", 0.0);
    }
    try {
        cfg.domain.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }

    const auto& per = section("perturbation");
    auto& p = cfg.perturbation;
    p.family = per.get<std::string>("family", p.family);
    p.amplitude = get_number(per, "perturbation", "amplitude", p.amplitude);
    p.params.wavenumber = get_number(per, "perturbation", "wavenumber", p.params.wavenumber);
    p.params.center = get_number(per, "perturbation", "center", p.params.center);
    p.params.width = get_number(per, "perturbation", "width", p.params.width);
    p.params.knot = get_number(per, "perturbation", "knot", p.params.knot);
    p.value = get_number(per, "perturbation", "value", p.value);
    p.table = per.get<std::string>("table", p.table);
    p.samples = get_number(per, "perturbation", "samples", p.samples);
    require(p.family == "sine" || p.family == "bump" || p.family == "hat" || p.family == "constant" ||
                p.family == "table",
            "[perturbation] family must be one of sine, bump, hat, constant, table");
    require(p.amplitude < 1.0, "[perturbation] amplitude must be < 1");
    require(p.samples >= 2, "[perturbation] samples must be at least 2");
    require(p.family != "table" || !p.table.empty(), "[perturbation] family = table needs a table path");

    const auto& frc = section("forcing");
    cfg.forcing.volume = frc.get<std::string>("F", cfg.forcing.volume);
    cfg.forcing.flux = frc.get<std::string>("f", cfg.forcing.flux);
    cfg.forcing.quadrature_order = get_number(frc, "forcing", "quadrature_order", cfg.forcing.quadrature_order);
    if (frc.get_optional<std::string>("continuity_tol")) {
        cfg.forcing.continuity_tol = get_number(frc, "forcing", "continuity_tol", 0.0);
    }
    require(cfg.forcing.quadrature_order >= 1 && cfg.forcing.quadrature_order <= 64,
            "[forcing] quadrature_order must lie in [1, 64]");

    const auto& sol = section("solver");
    cfg.solver.nx = get_number(sol, "solver", "nx", cfg.solver.nx);
    cfg.solver.nz = get_number(sol, "solver", "nz", cfg.solver.nz);
    cfg.solver.n_cells = get_number(sol, "solver", "n_cells", cfg.solver.n_cells);
    cfg.solver.cg_tolerance = get_number(sol, "solver", "cg_tolerance", cfg.solver.cg_tolerance);
    cfg.solver.max_iterations = get_number(sol, "solver", "max_iterations", cfg.solver.max_iterations);
    require(cfg.solver.nx >= 2 && cfg.solver.nz >= 2, "[solver] nx and nz must be at least 2");
    require(cfg.solver.n_cells >= 4, "[solver] n_cells must be at least 4");
    require(cfg.solver.cg_tolerance > 0.0, "[solver] cg_tolerance must be positive");
    require(cfg.solver.max_iterations >= 0, "[solver] max_iterations must be nonnegative");

    const auto& st = section("study");
    auto& s = cfg.study;
    try {
        s.mode = parse_mode(st.get<std::string>("mode", "oned"));
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("[study] ") + e.what());
    }
    if (const auto list = st.get_optional<std::string>("amplitudes")) {
        s.amplitudes = parse_number_list(*list);
    }
    if (st.get_optional<std::string>("amplitude_start")) {
        require(s.amplitudes.empty(), "[study] give either amplitudes or amplitude_start, not both");
        const double start = get_number(st, "study", "amplitude_start", 0.0);
        const double ratio = get_number(st, "study", "amplitude_ratio", 0.5);
        const int count = get_number(st, "study", "amplitude_count", 1);
        require(ratio > 0.0 && ratio < 1.0, "[study] amplitude_ratio must lie in (0, 1)");
        require(count >= 1, "[study] amplitude_count must be positive");
        for (int i = 0; i < count; ++i) {
            s.amplitudes.push_back(start * std::pow(ratio, i));
        }
    }
    for (std::size_t i = 0; i < s.amplitudes.size(); ++i) {
        require(s.amplitudes[i] >= 0.0 && s.amplitudes[i] < 1.0, "[study] amplitudes must lie in [0, 1)");
        require(i == 0 || s.amplitudes[i] < s.amplitudes[i - 1], "[study] amplitudes must be strictly decreasing");
    }
    s.zeta_sign = get_number(st, "study", "zeta_sign", s.zeta_sign);
    require(s.zeta_sign == 1.0 || s.zeta_sign == -1.0, "[study] zeta_sign must be 1 or -1");
    if (st.get_optional<std::string>("target_gap")) {
        s.target_gap = get_number(st, "study", "target_gap", 0.0);
    }
    s.bound_tolerance = get_number(st, "study", "bound_tolerance", s.bound_tolerance);
    s.enforce_inner_product_estimate =
        get_bool(st, "study", "enforce_inner_product_estimate", s.enforce_inner_product_estimate);

    // expressions are parsed here, not on first use
    try {
        (void)cfg.make_forcing();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("[forcing] ") + e.what());
    }
    return cfg;
}

RunConfig load_run_config(const std::string& path)
{
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open config file '" + path + "'");
    }
    const auto parent = std::filesystem::path(path).parent_path();
    return parse_run_config(in, parent.empty() ? "." : parent.string());
}

Perturbation RunConfig::make_zeta() const
{
    const auto& p = perturbation;
    if (p.family == "constant") {
        return Perturbation::constant(p.value);
    }
    if (p.family == "table") {
        std::filesystem::path path(p.table);
        if (path.is_relative()) {
            path = std::filesystem::path(base_dir) / path;
        }
        return Perturbation::from_csv(path.string());
    }
    return make_perturbation(parse_family(p.family), p.params, p.amplitude);
}

Perturbation RunConfig::make_shape() const
{
    const auto& p = perturbation;
    if (p.family == "constant" || p.family == "table") {
        const Perturbation z = make_zeta();
        return z;
    }
    // unit-amplitude shape, built past the amplitude < 1 guard
    const Perturbation probe = make_perturbation(parse_family(p.family), p.params, 0.5);
    return probe.with_amplitude(1.0);
}

ForcingSpec RunConfig::make_forcing() const
{
    return ForcingSpec::from_expressions(forcing.volume, forcing.flux, forcing.quadrature_order);
}

StudyConfig RunConfig::make_study() const
{
    StudyConfig sc;
    sc.mode = study.mode;
    sc.domain = domain;
    sc.shape = make_shape();
    sc.amplitudes = study.amplitudes;
    if (sc.amplitudes.empty()) {
        sc.amplitudes = {perturbation.amplitude};
    }
    sc.zeta_sign = study.zeta_sign;
    sc.forcing = make_forcing();
    sc.nx = solver.nx;
    sc.nz = solver.nz;
    sc.cg.tolerance = solver.cg_tolerance;
    sc.cg.max_iterations = solver.max_iterations;
    sc.target_gap = study.target_gap;
    sc.bound_tolerance = study.bound_tolerance;
    sc.enforce_inner_product_estimate = study.enforce_inner_product_estimate;
    return sc;
}

}  // namespace pdarcy
