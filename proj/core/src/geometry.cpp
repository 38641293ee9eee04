#include "pdarcy/geometry.hpp"

#include "pdarcy/errors.hpp"
#include "pdarcy/expression.hpp"
#include "pdarcy/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace pdarcy {

namespace {

constexpr double pi = std::numbers::pi;

double bump_shape(double r)
{
    if (std::abs(r) >= 1.0) {
        return 0.0;
    }
    return std::exp(1.0 - 1.0 / (1.0 - r * r));
}

double bump_shape_derivative(double r)
{
    if (std::abs(r) >= 1.0) {
        return 0.0;
    }
    const double s = 1.0 - r * r;
    return bump_shape(r) * (-2.0 * r / (s * s));
}

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};

std::size_t segment_of(const std::vector<double>& x, double t)
{
    // index i with x[i] <= t < x[i+1], clamped to valid segments
    auto it = std::upper_bound(x.begin(), x.end(), t);
    std::size_t i = it == x.begin() ? 0 : static_cast<std::size_t>(it - x.begin()) - 1;
    return std::min(i, x.size() - 2);
}

double segment_slope(const Perturbation::Tabulated& t, std::size_t i)
{
    return (t.y[i + 1] - t.y[i]) / (t.x[i + 1] - t.x[i]);
}

int panels_for(double length, int density) { return std::max(1, static_cast<int>(std::ceil(length * density))); }

}  // namespace

void DomainConfig::validate() const
{
    if (dim != 2) {
        throw std::invalid_argument("domain: only dim = 2 is supported");
    }
    if (!(gamma_lo < gamma_hi)) {
        throw std::invalid_argument("domain: gamma extent must be a nonempty interval");
    }
    if (!(epsilon > 0.0 && epsilon <= 1.0)) {
        throw std::invalid_argument("domain: epsilon must lie in (0, 1]");
    }
    if (!(k1 > 0.0) || !(k2 > 0.0)) {
        throw std::invalid_argument("domain: permeabilities must be positive");
    }
    if (poincare_bound && !(*poincare_bound > 0.0)) {
        throw std::invalid_argument("domain: poincare_bound must be positive");
    }
}

PerturbationFamily parse_family(const std::string& name)
{
    if (name == "sine") {
        return PerturbationFamily::sine;
    }
    if (name == "bump") {
        return PerturbationFamily::bump;
    }
    if (name == "hat") {
        return PerturbationFamily::hat;
    }
    throw std::invalid_argument("unknown perturbation family '" + name + "'");
}

std::string to_string(PerturbationFamily family)
{
    switch (family) {
    case PerturbationFamily::sine: return "sine";
    case PerturbationFamily::bump: return "bump";
    case PerturbationFamily::hat: return "hat";
    }
    return "unknown";
}

Perturbation::Perturbation() : Perturbation(Constant{}, 0.0) {}

Perturbation::Perturbation(Shape shape, double amplitude) : shape_(std::move(shape)), amplitude_(amplitude)
{
    if (auto* t = std::get_if<Tabulated>(&shape_)) {
        if (t->x.size() != t->y.size() || t->x.size() < 2) {
            throw std::invalid_argument("tabulated perturbation needs at least two (x, y) pairs");
        }
        for (std::size_t i = 0; i + 1 < t->x.size(); ++i) {
            if (!(t->x[i] < t->x[i + 1])) {
                throw std::invalid_argument("tabulated perturbation: x must be strictly increasing");
            }
        }
        if (std::abs(t->x.front()) > 1e-12 || std::abs(t->x.back() - 1.0) > 1e-12) {
            throw std::invalid_argument("tabulated perturbation must span [0, 1]");
        }
        knots_.assign(t->x.begin() + 1, t->x.end() - 1);
    }
    if (auto* h = std::get_if<Hat>(&shape_)) {
        if (!(h->knot > 0.0 && h->knot < 1.0)) {
            throw std::invalid_argument("hat knot must lie in (0, 1)");
        }
        knots_ = {h->knot};
    }
    if (auto* b = std::get_if<Bump>(&shape_)) {
        if (!(b->width > 0.0)) {
            throw std::invalid_argument("bump width must be positive");
        }
    }
    if (auto* s = std::get_if<Sine>(&shape_)) {
        if (s->wavenumber < 1) {
            throw std::invalid_argument("sine wavenumber must be a positive integer");
        }
    }
    compute_norms();
}

Perturbation Perturbation::constant(double value) { return Perturbation(Constant{}, value); }

Perturbation Perturbation::tabulated(std::vector<double> x, std::vector<double> y)
{
    return Perturbation(Tabulated{std::move(x), std::move(y)}, 1.0);
}

Perturbation Perturbation::from_csv(const std::string& path)
{
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open perturbation table '" + path + "'");
    }
    std::vector<double> xs;
    std::vector<double> ys;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream ls(line);
        double x = 0.0;
        double y = 0.0;
        if (!(ls >> x >> y)) {
            if (first || line.find_first_not_of(" \t\r") == std::string::npos) {
                first = false;
                continue;
            }
            throw std::invalid_argument("malformed row in perturbation table '" + path + "': " + line);
        }
        first = false;
        xs.push_back(x);
        ys.push_back(y);
    }
    return tabulated(std::move(xs), std::move(ys));
}

double Perturbation::value(double x) const
{
    if (amplitude_ == 0.0) {
        return 0.0;
    }
    const double s = std::visit(
        overloaded{
            [&](const Sine& p) { return std::sin(p.wavenumber * pi * x); },
            [&](const Bump& p) { return bump_shape((x - p.center) / p.width); },
            [&](const Hat& p) { return x <= p.knot ? x / p.knot : (1.0 - x) / (1.0 - p.knot); },
            [&](const Constant&) { return 1.0; },
            [&](const Tabulated& t) {
                const std::size_t i = segment_of(t.x, x);
                return t.y[i] + segment_slope(t, i) * (x - t.x[i]);
            },
        },
        shape_);
    return amplitude_ * s;
}

double Perturbation::gradient(double x) const
{
    if (amplitude_ == 0.0) {
        return 0.0;
    }
    const double s = std::visit(
        overloaded{
            [&](const Sine& p) { return p.wavenumber * pi * std::cos(p.wavenumber * pi * x); },
            [&](const Bump& p) { return bump_shape_derivative((x - p.center) / p.width) / p.width; },
            [&](const Hat& p) { return x < p.knot ? 1.0 / p.knot : -1.0 / (1.0 - p.knot); },
            [&](const Constant&) { return 0.0; },
            [&](const Tabulated& t) { return segment_slope(t, segment_of(t.x, x)); },
        },
        shape_);
    return amplitude_ * s;
}

double Perturbation::left_gradient(double x) const
{
    if (const auto* h = std::get_if<Hat>(&shape_); h && x == h->knot) {
        return amplitude_ / h->knot;
    }
    if (const auto* t = std::get_if<Tabulated>(&shape_)) {
        auto it = std::find(t->x.begin() + 1, t->x.end(), x);
        if (it != t->x.end()) {
            return amplitude_ * segment_slope(*t, static_cast<std::size_t>(it - t->x.begin()) - 1);
        }
    }
    return gradient(x);
}

void Perturbation::compute_norms()
{
    const double a = std::abs(amplitude_);
    std::visit(overloaded{
                   [&](const Sine& p) {
                       norm_sup_ = a;
                       gradient_sup_ = a * p.wavenumber * pi;
                   },
                   [&](const Bump&) {
                       norm_sup_ = a;
                       // no closed form for the slope peak of this bump; dense sampling
                       double g = 0.0;
                       constexpr int n = 20000;
                       for (int i = 0; i <= n; ++i) {
                           g = std::max(g, std::abs(bump_shape_derivative(-1.0 + 2.0 * i / n)));
                       }
                       gradient_sup_ = a * g / std::get<Bump>(shape_).width;
                   },
                   [&](const Hat& p) {
                       norm_sup_ = a;
                       gradient_sup_ = a * std::max(1.0 / p.knot, 1.0 / (1.0 - p.knot));
                   },
                   [&](const Constant&) {
                       norm_sup_ = a;
                       gradient_sup_ = 0.0;
                   },
                   [&](const Tabulated& t) {
                       double m = 0.0;
                       double g = 0.0;
                       for (std::size_t i = 0; i < t.y.size(); ++i) {
                           m = std::max(m, std::abs(t.y[i]));
                           if (i + 1 < t.y.size()) {
                               g = std::max(g, std::abs(segment_slope(t, i)));
                           }
                       }
                       norm_sup_ = a * m;
                       gradient_sup_ = a * g;
                   },
               },
               shape_);
}

Perturbation Perturbation::with_amplitude(double amplitude) const { return Perturbation(shape_, amplitude); }

std::string Perturbation::describe() const
{
    std::ostringstream os;
    std::visit(overloaded{
                   [&](const Sine& p) { os << "sine(k=" << p.wavenumber << ")"; },
                   [&](const Bump& p) { os << "bump(center=" << p.center << ", width=" << p.width << ")"; },
                   [&](const Hat& p) { os << "hat(knot=" << p.knot << ")"; },
                   [&](const Constant&) { os << "constant"; },
                   [&](const Tabulated& t) { os << "tabulated(" << t.x.size() << " points)"; },
               },
               shape_);
    os << " x " << amplitude_;
    return os.str();
}

Perturbation make_perturbation(PerturbationFamily family, const PerturbationParams& params, double amplitude)
{
    if (!(amplitude >= 0.0)) {
        throw std::invalid_argument("perturbation amplitude must be nonnegative");
    }
    if (amplitude >= 1.0) {
        throw std::invalid_argument("perturbation amplitude must be < 1 so the interface stays inside the domain");
    }
    switch (family) {
    case PerturbationFamily::sine:
        if (params.wavenumber < 1) {
            throw std::invalid_argument("sine wavenumber must be a positive integer so zeta vanishes at the ends");
        }
        return Perturbation(Perturbation::Sine{params.wavenumber}, amplitude);
    case PerturbationFamily::bump:
        if (!(params.width > 0.0) || params.center - params.width < 0.0 || params.center + params.width > 1.0) {
            throw std::invalid_argument("bump support [center - width, center + width] must lie inside [0, 1]");
        }
        return Perturbation(Perturbation::Bump{params.center, params.width}, amplitude);
    case PerturbationFamily::hat:
        if (!(params.knot > 0.0 && params.knot < 1.0)) {
            throw std::invalid_argument("hat knot must lie in (0, 1)");
        }
        return Perturbation(Perturbation::Hat{params.knot}, amplitude);
    }
    throw std::invalid_argument("unknown perturbation family");
}

AdmissibilityReport validate_admissible(const Perturbation& zeta, const DomainConfig& cfg, int samples)
{
    AdmissibilityReport report;
    auto fail = [&](std::string what) {
        report.admissible = false;
        report.violations.push_back(std::move(what));
    };
    try {
        cfg.validate();
    } catch (const std::invalid_argument& e) {
        fail(e.what());
    }
    samples = std::max(samples, 2);
    if (std::abs(zeta.value(0.0)) > 1e-12 || std::abs(zeta.value(1.0)) > 1e-12) {
        fail("ζ|∂Γ ≠ 0");
    }
    double peak = 0.0;
    double slope = 0.0;
    bool finite = true;
    for (int i = 0; i <= samples; ++i) {
        const double x = static_cast<double>(i) / samples;
        const double v = zeta.value(x);
        const double g = zeta.gradient(x);
        finite = finite && std::isfinite(v) && std::isfinite(g);
        peak = std::max(peak, std::abs(v));
        slope = std::max(slope, std::abs(g));
    }
    if (!finite) {
        fail("ζ or its gradient is not finite");
    } else if (peak >= 1.0) {
        fail("|ζ| ≥ 1 (sup over samples = " + std::to_string(peak) + ")");
    }
    if (!std::isfinite(zeta.gradient_sup()) || slope > zeta.gradient_sup() * (1.0 + 1e-3) + 1e-12) {
        fail("gradient of ζ is not bounded by its declared sup");
    }
    return report;
}

ForcingSpec ForcingSpec::from_expressions(const std::string& volume, const std::string& flux, int quadrature_order)
{
    Expression F(volume);
    Expression f(flux);
    ForcingSpec spec;
    spec.volume = [F](double x, double z) { return F(x, z); };
    spec.flux = [f](double x, double z) { return f(x, z); };
    spec.quadrature_order = quadrature_order;
    spec.volume_source = volume;
    spec.flux_source = flux;
    return spec;
}

ForcingSpec ForcingSpec::constant(double volume, double flux, int quadrature_order)
{
    ForcingSpec spec;
    spec.volume = [volume](double, double) { return volume; };
    spec.flux = [flux](double, double) { return flux; };
    spec.quadrature_order = quadrature_order;
    std::ostringstream a;
    std::ostringstream b;
    a << volume;
    b << flux;
    spec.volume_source = a.str();
    spec.flux_source = b.str();
    return spec;
}

ForcingSpec ForcingSpec::scaled(double factor) const
{
    ForcingSpec spec = *this;
    spec.volume = [F = volume, factor](double x, double z) { return factor * F(x, z); };
    spec.flux = [f = flux, factor](double x, double z) { return factor * f(x, z); };
    std::ostringstream s;
    s << factor;
    spec.volume_source = s.str() + "*(" + volume_source + ")";
    spec.flux_source = s.str() + "*(" + flux_source + ")";
    return spec;
}

AdmissibilityReport validate_forcing(const ForcingSpec& forcing, std::optional<double> continuity_tol, double band,
                                     int samples)
{
    AdmissibilityReport report;
    if (forcing.quadrature_order < 1) {
        report.admissible = false;
        report.violations.emplace_back("quadrature order must be positive");
    }
    bool finite = true;
    double variation = 0.0;
    for (int i = 0; i <= samples; ++i) {
        const double x = static_cast<double>(i) / samples;
        for (int j = 0; j <= samples; ++j) {
            const double z = -1.0 + 2.0 * j / samples;
            finite = finite && std::isfinite(forcing.volume(x, z));
        }
        const double f0 = forcing.flux(x, 0.0);
        finite = finite && std::isfinite(f0);
        for (int j = -4; j <= 4; ++j) {
            const double fz = forcing.flux(x, band * j / 4.0);
            finite = finite && std::isfinite(fz);
            variation = std::max(variation, std::abs(fz - f0));
        }
    }
    if (!finite) {
        report.admissible = false;
        report.violations.emplace_back("forcing is not finite at some sample point");
    }
    if (continuity_tol && variation > *continuity_tol) {
        report.admissible = false;
        report.violations.emplace_back("flux source varies by " + std::to_string(variation) +
                                       " across the interface band");
    }
    return report;
}

std::vector<double> sign_breaks(const Perturbation& zeta, int samples)
{
    std::vector<double> breaks = {0.0, 1.0};
    breaks.insert(breaks.end(), zeta.knots().begin(), zeta.knots().end());
    double x0 = 0.0;
    double v0 = zeta.value(x0);
    for (int i = 1; i <= samples; ++i) {
        const double x1 = static_cast<double>(i) / samples;
        const double v1 = zeta.value(x1);
        if (v0 * v1 < 0.0) {
            double lo = x0;
            double hi = x1;
            double vlo = v0;
            for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
                const double mid = 0.5 * (lo + hi);
                const double vm = zeta.value(mid);
                if ((vm < 0.0) == (vlo < 0.0) && vm != 0.0) {
                    lo = mid;
                    vlo = vm;
                } else {
                    hi = mid;
                }
            }
            breaks.push_back(0.5 * (lo + hi));
        } else if (v1 == 0.0 && i < samples) {
            breaks.push_back(x1);
        }
        x0 = x1;
        v0 = v1;
    }
    std::sort(breaks.begin(), breaks.end());
    breaks.erase(std::unique(breaks.begin(), breaks.end(), [](double a, double b) { return b - a < 1e-14; }),
                 breaks.end());
    return breaks;
}

StripMeasures strip_measures(const Perturbation& zeta, int order, int panels)
{
    StripMeasures m;
    if (zeta.is_zero()) {
        return m;
    }
    const auto breaks = sign_breaks(zeta);
    for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
        const double a = breaks[i];
        const double b = breaks[i + 1];
        const int n = panels_for(b - a, panels);
        m.m1 += integrate([&](double x) { return std::max(zeta.value(x), 0.0); }, a, b, order, n);
        m.m2 += integrate([&](double x) { return std::max(-zeta.value(x), 0.0); }, a, b, order, n);
    }
    return m;
}

double lower_bound_constant(const StripMeasures& strips, double eps)
{
    return 1.0 - eps * std::abs(1.0 - 1.0 / eps) * strips.total();
}

double lower_bound_constant(const Perturbation& zeta, double eps)
{
    return lower_bound_constant(strip_measures(zeta), eps);
}

double xi_perturbation(const GradientField& grad, const Perturbation& zeta, int order, int panels)
{
    if (zeta.is_zero()) {
        return 0.0;
    }
    const auto breaks = sign_breaks(zeta);
    double xi = 0.0;
    for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
        const double a = breaks[i];
        const double b = breaks[i + 1];
        auto column = [&](double x) {
            const double h = zeta.value(x);
            if (h == 0.0) {
                return 0.0;
            }
            const double energy = integrate(
                [&](double z) { return grad(x, z).squaredNorm(); }, std::min(0.0, h), std::max(0.0, h), order, 4);
            // h > 0: strip joins region 1; h < 0: strip joins region 2
            return h > 0.0 ? -energy : energy;
        };
        xi += integrate(column, a, b, order, panels_for(b - a, panels));
    }
    return xi;
}

}  // namespace pdarcy
