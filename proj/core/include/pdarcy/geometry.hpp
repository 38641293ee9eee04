#pragma once

#include <Eigen/Core>

#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace pdarcy {

/// Two-region slab Omega = (0,1) x (-1,1) cut by the flat interface z = 0.
///
/// Region 1 is the lower half (coefficient k1, homogeneous Dirichlet on its
/// outer boundary). Region 2 is the upper half (coefficient k2 / epsilon,
/// homogeneous Neumann on its outer boundary).
struct DomainConfig {
    int dim = 2;
    double gamma_lo = 0.0;
    double gamma_hi = 1.0;
    double epsilon = 1.0;
    double k1 = 1.0;
    double k2 = 1.0;
    std::optional<double> poincare_bound;

    /// Throws std::invalid_argument on out-of-range values.
    void validate() const;

    double coefficient(int region) const { return region == 1 ? k1 : k2 / epsilon; }
};

enum class PerturbationFamily { sine, bump, hat };

PerturbationFamily parse_family(const std::string& name);
std::string to_string(PerturbationFamily family);

/// Family-specific shape parameters. Only the fields of the selected family are read.
struct PerturbationParams {
    int wavenumber = 1;    ///< sine: sin(k pi x)
    double center = 0.5;   ///< bump: center of the support
    double width = 0.25;   ///< bump: half-width of the support
    double knot = 0.5;     ///< hat: location of the peak
};

/// Interface displacement zeta(x) on Gamma = (0,1), stored as amplitude * shape(x).
///
/// Immutable. Value and gradient are defined everywhere; at the knots of a
/// piecewise-linear shape the gradient is the right-sided derivative unless
/// `left_gradient` is requested.
class Perturbation {
public:
    struct Sine {
        int wavenumber;
    };
    struct Bump {
        double center;
        double width;
    };
    struct Hat {
        double knot;
    };
    struct Constant {};
    /// Piecewise linear through (x_i, y_i); x strictly increasing on [0, 1].
    struct Tabulated {
        std::vector<double> x;
        std::vector<double> y;
    };
    using Shape = std::variant<Sine, Bump, Hat, Constant, Tabulated>;

    /// The zero perturbation.
    Perturbation();
    Perturbation(Shape shape, double amplitude);

    /// No admissibility checks; use validate_admissible.
    static Perturbation constant(double value);
    static Perturbation tabulated(std::vector<double> x, std::vector<double> y);
    /// Two-column CSV (x, zeta); a non-numeric first line is treated as a header.
    static Perturbation from_csv(const std::string& path);

    double value(double x) const;
    double gradient(double x) const;
    double left_gradient(double x) const;

    double amplitude() const { return amplitude_; }
    double norm_sup() const { return norm_sup_; }
    double gradient_sup() const { return gradient_sup_; }
    double norm_w1inf() const { return norm_sup_ + gradient_sup_; }

    /// Points where the gradient may jump; the endpoints are not included.
    const std::vector<double>& knots() const { return knots_; }
    const Shape& shape() const { return shape_; }
    bool is_zero() const { return amplitude_ == 0.0; }

    /// Same shape, different amplitude.
    Perturbation with_amplitude(double amplitude) const;

    std::string describe() const;

private:
    void compute_norms();

    Shape shape_;
    double amplitude_ = 0.0;
    double norm_sup_ = 0.0;
    double gradient_sup_ = 0.0;
    std::vector<double> knots_;
};

/// Validated factory for the smooth and tent families. Throws
/// std::invalid_argument when amplitude is outside [0, 1) or the shape does
/// not vanish at the ends of Gamma.
Perturbation make_perturbation(PerturbationFamily family, const PerturbationParams& params,
                               double amplitude);

struct AdmissibilityReport {
    bool admissible = true;
    std::vector<std::string> violations;
};

/// Sampled check of boundary vanishing, |zeta| < 1 and bounded gradient.
AdmissibilityReport validate_admissible(const Perturbation& zeta, const DomainConfig& cfg,
                                        int samples = 1024);

/// Volume source F(x, z) and interface flux source f(x, z).
///
/// In one dimension both are called as F(x, 0).
struct ForcingSpec {
    using Function = std::function<double(double, double)>;

    Function volume;
    Function flux;
    int quadrature_order = 4;
    std::string volume_source = "0";
    std::string flux_source = "0";

    static ForcingSpec from_expressions(const std::string& volume, const std::string& flux,
                                        int quadrature_order = 4);
    static ForcingSpec constant(double volume, double flux, int quadrature_order = 4);

    ForcingSpec scaled(double factor) const;
};

/// Samples F and f on a grid. With `continuity_tol`, also checks that f varies by less
/// than the tolerance across a z-band of half-width `band` around Gamma.
AdmissibilityReport validate_forcing(const ForcingSpec& forcing,
                                     std::optional<double> continuity_tol = std::nullopt,
                                     double band = 1e-3, int samples = 64);

struct StripMeasures {
    double m1 = 0.0;  ///< area of {0 < z < zeta}, gained by region 1
    double m2 = 0.0;  ///< area of {zeta < z < 0}, gained by region 2
    double total() const { return m1 + m2; }
};

/// Sign-change points of zeta in (0,1), located by sampling and bisection, merged with the knots.
std::vector<double> sign_breaks(const Perturbation& zeta, int samples = 1024);

StripMeasures strip_measures(const Perturbation& zeta, int order = 4, int panels = 64);

/// 1 - eps |1 - 1/eps| (m1 + m2).
double lower_bound_constant(const Perturbation& zeta, double eps);
double lower_bound_constant(const StripMeasures& strips, double eps);

using GradientField = std::function<Eigen::Vector2d(double x, double z)>;

/// Energy of the field over the region-2 strip minus the energy over the region-1 strip.
double xi_perturbation(const GradientField& grad, const Perturbation& zeta, int order = 4,
                       int panels = 64);

}  // namespace pdarcy
