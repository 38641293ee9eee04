#pragma once

#include "pdarcy/mesh2d.hpp"
#include "pdarcy/solver1d.hpp"

#include <Eigen/Sparse>

#include <functional>
#include <memory>

namespace pdarcy {

struct CgOptions {
    double tolerance = 1e-10;
    /// 0 selects 50 * sqrt(unknowns).
    int max_iterations = 0;
};

struct SolveStats {
    int iterations = 0;
    double residual = 0.0;
    /// Load functional evaluated at the solution.
    double load_value = 0.0;
    std::size_t unknowns = 0;
};

struct DiscreteSolution {
    Field2D field;
    SolveStats stats;
};

/// Variable-coefficient P1 Galerkin problem on a region-tagged mesh.
struct GalerkinProblem {
    /// Symmetric positive definite coefficient, evaluated at quadrature points.
    std::function<Eigen::Matrix2d(int region, double x, double z)> coefficient;
    /// Volume load density (already multiplied by any Jacobian).
    std::function<double(int region, double x, double z)> volume_source;
    /// Load density per unit length along the mesh interface edges.
    std::function<double(double x, double z)> interface_source;
    int order = 4;
};

/// Stiffness and load over all nodes; Dirichlet rows are removed by solve_galerkin.
struct GalerkinSystem {
    Eigen::SparseMatrix<double> stiffness;
    Eigen::VectorXd load;
};

GalerkinSystem assemble_galerkin(const Mesh2D& mesh, const GalerkinProblem& problem);

/// Preconditioned CG on the free nodes. Throws SolverError when the iteration
/// limit is hit before the relative residual reaches the tolerance, and
/// std::domain_error on non-finite stiffness or load entries.
DiscreteSolution solve_galerkin(std::shared_ptr<const Mesh2D> mesh, const GalerkinSystem& system,
                                const CgOptions& options = {});

/// Weak form of the problem on a fitted mesh: piecewise constant coefficients
/// k1 and k2 / eps, arclength measure on the interface polyline.
GalerkinProblem fitted_problem(const ForcingSpec& forcing, double eps, const Permeability& k = {});

DiscreteSolution assemble_solve(std::shared_ptr<const Mesh2D> mesh, const ForcingSpec& forcing, double eps,
                                const Permeability& k = {}, const CgOptions& options = {});

struct VNormDiff {
    double value = 0.0;
    /// Height of the band around the interfaces where resampling is not exact.
    double layer_thickness = 0.0;
};

/// V-norm of a - b with b resampled onto the mesh of a when the meshes differ.
VNormDiff vnorm_diff_2d(const Field2D& a, const Field2D& b);

/// Square root of the integral of |grad u|^2.
double vnorm_2d(const Field2D& u);

/// Full H1 norm of a P1 field (value and gradient), exact for P1.
double h1_norm(const Field2D& u);

struct EnergySplit {
    double e1 = 0.0;
    double e2 = 0.0;
    double total = 0.0;
};

/// Energies over the mesh regions: k1 int_1 |grad u|^2 and (k2 / eps) int_2 |grad u|^2.
EnergySplit energy_split(const Field2D& field, double eps, const Permeability& k = {});

/// Same energies over the half-planes z < 0 and z > 0, whatever the mesh interface.
EnergySplit energy_flat_split(const Field2D& field, double eps, const Permeability& k = {});

struct StripEnergies {
    double region1_above = 0.0;  ///< region-1 triangles, part with z > 0
    double region2_below = 0.0;  ///< region-2 triangles, part with z < 0
    double xi() const { return region2_below - region1_above; }
};

StripEnergies strip_energies(const Field2D& field);

/// Area of the part of a triangle with z < 0 (below = true) or z > 0.
double clipped_area(const Eigen::Vector2d& p0, const Eigen::Vector2d& p1, const Eigen::Vector2d& p2, bool below);

}  // namespace pdarcy
