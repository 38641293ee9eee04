#pragma once

#include "pdarcy/errors.hpp"
#include "pdarcy/geometry.hpp"
#include "pdarcy/study.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace pdarcy {

/// INI-style run configuration with sections [domain], [perturbation],
/// [forcing], [solver] and [study]. All keys are optional; unknown sections
/// and keys are rejected. `;` and `#` start a comment anywhere on a line.
struct RunConfig {
    DomainConfig domain;

    struct PerturbationSection {
        /// sine, bump, hat, constant or table
        std::string family = "sine";
        double amplitude = 0.0;
        PerturbationParams params;
        double value = 0.0;  ///< constant family
        std::string table;   ///< table family: CSV path, relative to the config file
        int samples = 1024;
    } perturbation;

    struct ForcingSection {
        std::string volume = "0";
        std::string flux = "1";
        int quadrature_order = 4;
        std::optional<double> continuity_tol;
    } forcing;

    struct SolverSection {
        int nx = 32;
        int nz = 32;
        int n_cells = 64;
        double cg_tolerance = 1e-10;
        int max_iterations = 0;
    } solver;

    struct StudySection {
        StudyMode mode = StudyMode::oned;
        std::vector<double> amplitudes;
        double zeta_sign = 1.0;
        std::optional<double> target_gap;
        double bound_tolerance = 1e-9;
        bool enforce_inner_product_estimate = false;
    } study;

    /// Directory of the config file, used to resolve relative paths.
    std::string base_dir = ".";

    /// Builds the configured shape with the configured amplitude. The sine,
    /// bump and hat families go through make_perturbation and may throw
    /// std::invalid_argument; constant and table shapes are built unchecked.
    Perturbation make_zeta() const;
    /// Shape with unit amplitude, for sweeps.
    Perturbation make_shape() const;
    ForcingSpec make_forcing() const;
    StudyConfig make_study() const;
};

RunConfig parse_run_config(std::istream& in, const std::string& base_dir = ".");
RunConfig load_run_config(const std::string& path);

/// Comma- or whitespace-separated list of numbers.
std::vector<double> parse_number_list(const std::string& text);

}  // namespace pdarcy
