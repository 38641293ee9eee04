#pragma once

#include "pdarcy/field1d.hpp"
#include "pdarcy/geometry.hpp"

#include "pdarcy/errors.hpp"

#include <functional>

namespace pdarcy {

/// Permeabilities of the lower and upper pieces; the upper one is further divided by epsilon.
struct Permeability {
    double k1 = 1.0;
    double k2 = 1.0;
};

/// Exact solution of -(a u')' = source on (-1, 1) with u(-1) = 0, u'(1) = 0,
/// a = a_left below `interface` and a_right above, and flux jump
/// a_left u'(s-) - a_right u'(s+) = jump.
///
/// Built from the flux sigma(x) = int_x^1 source (+ jump below the interface);
/// every evaluation integrates the source by composite Gauss-Legendre with
/// `panel_density` panels per unit length.
PiecewiseField1D solve_two_point(std::function<double(double)> source, double interface, double a_left,
                                 double a_right, double jump, int order = 4, int panel_density = 32,
                                 std::string origin = "two-point");

/// Solution of the 1D problem with the interface at zeta; zeta = 0 gives the unperturbed solution.
PiecewiseField1D solve_exact_1d(const ForcingSpec& forcing, double zeta, double eps, const Permeability& k = {});

/// P1 Galerkin cross-check on a mesh that has -1, 0, zeta and 1 as nodes.
PiecewiseField1D solve_fem_1d(const ForcingSpec& forcing, double zeta, double eps, int n_cells,
                              const Permeability& k = {});

/// Orthogonal projections in V onto H = {r : r' = 0 between 0 and zeta} and its complement.
/// zeta = 0 gives the identity and the zero map.
PiecewiseField1D project_H(const PiecewiseField1D& r, double zeta);
PiecewiseField1D project_Hperp(const PiecewiseField1D& r, double zeta);

/// Closed-form complement components of the unperturbed and perturbed solutions.
PiecewiseField1D hperp_exact_original(const ForcingSpec& forcing, double zeta, double eps, const Permeability& k = {});
PiecewiseField1D hperp_exact_perturbed(const ForcingSpec& forcing, double zeta, double eps,
                                       const Permeability& k = {});

struct Bound1D {
    double h_part = 0.0;
    double hperp_part = 0.0;
    double total = 0.0;
};

/// Explicit upper bound for vnorm_diff_1d(p, q^zeta). Both signs of zeta are supported.
Bound1D estimate_rhs_1d(const ForcingSpec& forcing, double zeta, double eps, const Permeability& k = {});

}  // namespace pdarcy
