#include "pdarcy/solver1d.hpp"

#include "pdarcy/quadrature.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include <algorithm>
#include <array>
#include <cmath>
#include <memory>

namespace pdarcy {

namespace {

int panels_for(double length, int density)
{
    return std::max(1, static_cast<int>(std::ceil(std::abs(length) * density)));
}

std::vector<double> breakpoints_with(double zeta)
{
    std::vector<double> b = {-1.0, 0.0, zeta, 1.0};
    std::sort(b.begin(), b.end());
    b.erase(std::unique(b.begin(), b.end()), b.end());
    return b;
}

void check_problem(double zeta, double eps)
{
    if (!(std::abs(zeta) < 1.0)) {
        throw std::invalid_argument("interface position must satisfy |zeta| < 1");
    }
    if (!(eps > 0.0 && eps <= 1.0)) {
        throw std::invalid_argument("epsilon must lie in (0, 1]");
    }
}

std::function<double(double)> volume_1d(const ForcingSpec& forcing)
{
    return [F = forcing.volume](double x) { return F(x, 0.0); };
}

/// Coefficient and flux jump of the complement piece between 0 and zeta.
struct HperpData {
    double alpha;
    double jump;
};

HperpData hperp_data_original(const ForcingSpec& forcing, double zeta, double eps, const Permeability& k)
{
    // unperturbed interface at 0: positive zeta lies in the upper piece
    if (zeta > 0.0) {
        return {k.k2 / eps, 0.0};
    }
    return {k.k1, forcing.flux(0.0, 0.0)};
}

HperpData hperp_data_perturbed(const ForcingSpec& forcing, double zeta, double eps, const Permeability& k)
{
    if (zeta > 0.0) {
        return {k.k1, forcing.flux(zeta, 0.0)};
    }
    return {k.k2 / eps, 0.0};
}

PiecewiseField1D hperp_closed_form(const ForcingSpec& forcing, double zeta, HperpData data, std::string origin)
{
    if (zeta == 0.0) {
        return PiecewiseField1D::zero(std::move(origin));
    }
    const double a = std::min(0.0, zeta);
    const double b = std::max(0.0, zeta);
    const int order = forcing.quadrature_order;
    auto F = volume_1d(forcing);
    const double total_flux = integrate(F, a, 1.0, order, panels_for(1.0 - a, 32)) + data.jump;
    const double alpha = data.alpha;
    auto value = [=](double x) {
        const double inner = integrate([&](double u) { return (x - u) * F(u); }, a, x, order, panels_for(x - a, 64));
        return ((x - a) * total_flux - inner) / alpha;
    };
    auto derivative = [=](double x) {
        return (total_flux - integrate(F, a, x, order, panels_for(x - a, 64))) / alpha;
    };
    const double top = value(b);
    auto zero = [](double) { return 0.0; };
    std::vector<PiecewiseField1D::Piece> pieces;
    if (a > -1.0) {
        pieces.push_back({-1.0, a, zero, zero});
    }
    pieces.push_back({a, b, value, derivative});
    pieces.push_back({b, 1.0, [top](double) { return top; }, zero});
    return PiecewiseField1D(std::move(pieces), std::move(origin));
}

}  // namespace

PiecewiseField1D solve_two_point(std::function<double(double)> source, double interface, double a_left,
                                 double a_right, double jump, int order, int panel_density, std::string origin)
{
    if (!(a_left > 0.0) || !(a_right > 0.0)) {
        throw std::invalid_argument("solve_two_point: coefficients must be positive");
    }
    const double s = interface;
    auto G = std::make_shared<std::function<double(double)>>(std::move(source));
    // the source may jump at 0 and at the interface; never integrate across either
    const std::array<double, 2> kinks = {std::min(0.0, s), std::max(0.0, s)};
    auto split_integral = [kinks, order, panel_density](const std::function<double(double)>& f, double lo, double hi) {
        double sum = 0.0;
        double from = lo;
        for (double k : kinks) {
            if (k > from && k < hi) {
                sum += integrate(f, from, k, order, panels_for(k - from, panel_density));
                from = k;
            }
        }
        return sum + integrate(f, from, hi, order, panels_for(hi - from, panel_density));
    };
    auto flux_from = [G, split_integral](double x) { return split_integral(*G, x, 1.0); };
    // int_c^x sigma = (x - c) sigma(x) + int_c^x (u - c) G(u) du on a piece where sigma' = -G
    auto moment = [G, split_integral](double c, double x) {
        return split_integral([&](double u) { return (u - c) * (*G)(u); }, c, x);
    };
    auto sigma_left = [=](double x) { return flux_from(x) + jump; };
    auto sigma_right = flux_from;
    auto value_left = [=](double x) { return ((x + 1.0) * sigma_left(x) + moment(-1.0, x)) / a_left; };
    const double at_interface = value_left(s);
    auto value_right = [=](double x) {
        return at_interface + ((x - s) * sigma_right(x) + moment(s, x)) / a_right;
    };
    auto deriv_left = [=](double x) { return sigma_left(x) / a_left; };
    auto deriv_right = [=](double x) { return sigma_right(x) / a_right; };

    const auto breaks = breakpoints_with(s);
    std::vector<PiecewiseField1D::Piece> pieces;
    for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
        const bool left = breaks[i + 1] <= s;
        if (left) {
            pieces.push_back({breaks[i], breaks[i + 1], value_left, deriv_left});
        } else {
            pieces.push_back({breaks[i], breaks[i + 1], value_right, deriv_right});
        }
    }
    return PiecewiseField1D(std::move(pieces), std::move(origin));
}

PiecewiseField1D solve_exact_1d(const ForcingSpec& forcing, double zeta, double eps, const Permeability& k)
{
    check_problem(zeta, eps);
    const double jump = forcing.flux(zeta, 0.0);
    if (!std::isfinite(jump) || !std::isfinite(forcing.volume(zeta, 0.0))) {
        throw std::domain_error("forcing is not finite at the interface");
    }
    auto field = solve_two_point(volume_1d(forcing), zeta, k.k1, k.k2 / eps, jump, forcing.quadrature_order, 32,
                                 zeta == 0.0 ? "p" : "q");
    if (!std::isfinite(field.value(1.0))) {
        throw std::domain_error("volume source quadrature produced a non-finite value");
    }
    return field;
}

PiecewiseField1D solve_fem_1d(const ForcingSpec& forcing, double zeta, double eps, int n_cells, const Permeability& k)
{
    check_problem(zeta, eps);
    if (n_cells < 4) {
        throw std::invalid_argument("solve_fem_1d: n_cells must be at least 4");
    }
    const auto segments = breakpoints_with(zeta);
    std::vector<double> nodes = {-1.0};
    for (std::size_t i = 0; i + 1 < segments.size(); ++i) {
        const double len = segments[i + 1] - segments[i];
        const int n = std::max(1, static_cast<int>(std::lround(n_cells * len / 2.0)));
        for (int j = 1; j <= n; ++j) {
            nodes.push_back(j == n ? segments[i + 1] : segments[i] + len * j / n);
        }
    }
    const int n_nodes = static_cast<int>(nodes.size());
    const int n_unknowns = n_nodes - 1;  // node 0 carries the Dirichlet condition
    auto F = volume_1d(forcing);
    const auto& rule = gauss_legendre(forcing.quadrature_order);

    std::vector<Eigen::Triplet<double>> triplets;
    Eigen::VectorXd load = Eigen::VectorXd::Zero(n_unknowns);
    for (int c = 0; c + 1 < n_nodes; ++c) {
        const double x0 = nodes[c];
        const double x1 = nodes[c + 1];
        const double h = x1 - x0;
        const double coef = 0.5 * (x0 + x1) < zeta ? k.k1 : k.k2 / eps;
        const double local[2][2] = {{coef / h, -coef / h}, {-coef / h, coef / h}};
        double rhs[2] = {0.0, 0.0};
        for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
            const double t = 0.5 * (rule.nodes[q] + 1.0);
            const double w = 0.5 * h * rule.weights[q] * F(x0 + t * h);
            rhs[0] += w * (1.0 - t);
            rhs[1] += w * t;
        }
        const int dofs[2] = {c - 1, c};
        for (int i = 0; i < 2; ++i) {
            if (dofs[i] < 0) {
                continue;
            }
            load(dofs[i]) += rhs[i];
            for (int j = 0; j < 2; ++j) {
                if (dofs[j] >= 0) {
                    triplets.emplace_back(dofs[i], dofs[j], local[i][j]);
                }
            }
        }
    }
    const auto iface = std::find(nodes.begin(), nodes.end(), zeta);
    load(static_cast<int>(iface - nodes.begin()) - 1) += forcing.flux(zeta, 0.0);

    Eigen::SparseMatrix<double> K(n_unknowns, n_unknowns);
    K.setFromTriplets(triplets.begin(), triplets.end());
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(K);
    if (ldlt.info() != Eigen::Success) {
        throw SolverError("solve_fem_1d: factorization of the stiffness matrix failed");
    }
    const Eigen::VectorXd u = ldlt.solve(load);

    std::vector<PiecewiseField1D::Piece> pieces;
    pieces.reserve(static_cast<std::size_t>(n_nodes - 1));
    for (int c = 0; c + 1 < n_nodes; ++c) {
        const double x0 = nodes[c];
        const double x1 = nodes[c + 1];
        const double u0 = c == 0 ? 0.0 : u(c - 1);
        const double u1 = u(c);
        const double slope = (u1 - u0) / (x1 - x0);
        pieces.push_back({x0, x1, [=](double x) { return u0 + slope * (x - x0); }, [slope](double) { return slope; }});
    }
    return PiecewiseField1D(std::move(pieces), "fem");
}

PiecewiseField1D project_Hperp(const PiecewiseField1D& r, double zeta)
{
    if (zeta == 0.0) {
        return PiecewiseField1D::zero("projection onto H-perp");
    }
    const double a = std::min(0.0, zeta);
    const double b = std::max(0.0, zeta);
    const double ra = r.value(a);
    const double rb = r.value(b);
    auto zero = [](double) { return 0.0; };
    std::vector<PiecewiseField1D::Piece> pieces;
    if (a > -1.0) {
        pieces.push_back({-1.0, a, zero, zero});
    }
    for (const auto& p : r.pieces()) {
        const double lo = std::max(p.lo, a);
        const double hi = std::min(p.hi, b);
        if (lo < hi) {
            pieces.push_back({lo, hi, [v = p.value, ra](double x) { return v(x) - ra; }, p.derivative});
        }
    }
    pieces.push_back({b, 1.0, [c = rb - ra](double) { return c; }, zero});
    return PiecewiseField1D(std::move(pieces), "projection onto H-perp");
}

PiecewiseField1D project_H(const PiecewiseField1D& r, double zeta)
{
    if (zeta == 0.0) {
        return PiecewiseField1D(r.pieces(), "projection onto H");
    }
    return combine(r, 1.0, project_Hperp(r, zeta), -1.0, "projection onto H");
}

PiecewiseField1D hperp_exact_original(const ForcingSpec& forcing, double zeta, double eps, const Permeability& k)
{
    check_problem(zeta, eps);
    return hperp_closed_form(forcing, zeta, hperp_data_original(forcing, zeta, eps, k), "H-perp part of p");
}

PiecewiseField1D hperp_exact_perturbed(const ForcingSpec& forcing, double zeta, double eps, const Permeability& k)
{
    check_problem(zeta, eps);
    return hperp_closed_form(forcing, zeta, hperp_data_perturbed(forcing, zeta, eps, k), "H-perp part of q");
}

Bound1D estimate_rhs_1d(const ForcingSpec& forcing, double zeta, double eps, const Permeability& k)
{
    check_problem(zeta, eps);
    Bound1D bound;
    if (zeta == 0.0) {
        return bound;
    }
    const double a = std::min(0.0, zeta);
    const double b = std::max(0.0, zeta);
    const int order = forcing.quadrature_order;
    auto F = volume_1d(forcing);

    const double coercivity = std::min(k.k1, k.k2 / eps);
    bound.h_part = std::sqrt(2.0) * std::abs(forcing.flux(0.0, 0.0) - forcing.flux(zeta, 0.0)) / coercivity;

    const HperpData p = hperp_data_original(forcing, zeta, eps, k);
    const HperpData q = hperp_data_perturbed(forcing, zeta, eps, k);
    const double dinv = 1.0 / p.alpha - 1.0 / q.alpha;
    const double antiderivative_norm = std::sqrt(integrate(
        [&](double x) {
            const double v = integrate(F, a, x, order, panels_for(x - a, 64));
            return v * v;
        },
        a, b, 8, 8));
    const double tail = integrate(F, a, 1.0, order, panels_for(1.0 - a, 32));
    bound.hperp_part = std::abs(dinv) * antiderivative_norm +
                       std::sqrt(b - a) * std::abs(dinv * tail + p.jump / p.alpha - q.jump / q.alpha);
    bound.total = bound.h_part + bound.hperp_part;
    return bound;
}

}  // namespace pdarcy
