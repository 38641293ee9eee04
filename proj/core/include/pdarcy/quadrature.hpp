#pragma once

#include <array>
#include <functional>
#include <span>
#include <vector>

namespace pdarcy {

/// Gauss-Legendre nodes and weights on the reference interval [-1, 1].
struct GaussRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

/// Rules are computed once per order (Golub-Welsch) and cached.
const GaussRule& gauss_legendre(int order);

/// Composite Gauss-Legendre over `panels` equal panels of [a, b].
double integrate(const std::function<double(double)>& f, double a, double b, int order = 4,
                 int panels = 1);

/// Composite rule over consecutive breakpoints, `panels` panels per segment.
double integrate_piecewise(const std::function<double(double)>& f, std::span<const double> breaks,
                           int order = 4, int panels = 1);

/// Quadrature point on the unit reference triangle (0,0), (1,0), (0,1).
/// Weights sum to 1/2.
struct TrianglePoint {
    double xi;
    double eta;
    double weight;
};

/// Collapsed (Duffy) tensor Gauss rule, exact for polynomials of degree 2*order - 2.
const std::vector<TrianglePoint>& triangle_rule(int order);

/// Integral of f over the triangle with vertices p0, p1, p2.
double integrate_triangle(const std::function<double(double, double)>& f,
                          const std::array<double, 2>& p0, const std::array<double, 2>& p1,
                          const std::array<double, 2>& p2, int order = 4);

}  // namespace pdarcy
