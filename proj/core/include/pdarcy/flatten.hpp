#pragma once

#include "pdarcy/fem2d.hpp"
#include "pdarcy/field1d.hpp"
#include "pdarcy/geometry.hpp"
#include "pdarcy/mesh2d.hpp"
#include "pdarcy/solver1d.hpp"

#include <Eigen/Core>

#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace pdarcy {

/// Column-wise fractional maps between the perturbed regions and the flat reference regions.
///
/// Region i = 1 (lower) and i = 2 (upper) use the sign s = (-1)^i and the
/// column stretch d(x) = 1 - s zeta(x). The forward map sends the perturbed
/// region onto the reference one:
///
///     (x, X) -> (x, (X - zeta(x)) / d(x)),
///
/// and the inverse is (x, z) -> (x, z d(x) + zeta(x)). Both fix the outer boundary.
enum class MapDirection { forward, inverse };

/// Throws std::domain_error when the point lies outside the source region of the map.
Eigen::Vector2d lambda_map(int region, const Perturbation& zeta, const Eigen::Vector2d& point, MapDirection direction);

/// Gradient transfer at a reference point: A grad(u o inverse map) = (grad u) o inverse map.
struct GradTransfer {
    int region = 1;
    Eigen::Vector2d point = Eigen::Vector2d::Zero();
    Eigen::Matrix2d A = Eigen::Matrix2d::Identity();
    Eigen::Matrix2d A_inv = Eigen::Matrix2d::Identity();
    /// Jacobian determinant of the inverse map, equal to d(x).
    double det_jacobian = 1.0;
};

/// At a knot of a piecewise ζ the right-sided slope is used unless `left_sided` is set.
GradTransfer grad_transfer(int region, const Perturbation& zeta, const Eigen::Vector2d& point, bool left_sided = false);

/// d(x) A^T A, the coefficient of the flattened energy.
Eigen::Matrix2d metric_matrix(int region, const Perturbation& zeta, const Eigen::Vector2d& point);

/// Eigenvalues of a symmetric 2x2 matrix in ascending order.
Eigen::Vector2d symmetric_eigenvalues(const Eigen::Matrix2d& m);

/// sqrt(max(2, 4 |zeta|_{W1,inf}^2)).
double pullback_norm_bound(const Perturbation& zeta);
/// sqrt(N + 3 + 4 |zeta|_{W1,inf}^2), an upper bound for the spectral norm of A^{-1}.
double inverse_norm_bound(const Perturbation& zeta, int dim = 2);
/// (1 - |zeta|_C) / (N + 3 + 4 |zeta|_{W1,inf}^2), a lower bound for the spectrum of metric_matrix.
double coercivity_constant(const Perturbation& zeta, int dim = 2);

enum class PullbackDirection {
    to_reference,  ///< T: r -> r o inverse map
    to_perturbed,  ///< T^{-1}: r -> r o forward map
};

using ScalarField = std::function<double(double, double)>;

/// Analytic composition with the regional maps.
ScalarField t_apply(const Perturbation& zeta, ScalarField u, PullbackDirection direction);

/// Nodal version: evaluates the source field at the mapped target nodes by point location.
Field2D t_apply(const Perturbation& zeta, const Field2D& source, std::shared_ptr<const Mesh2D> target,
                PullbackDirection direction);

/// Weak form on the flat reference mesh for the pulled-back unknown.
GalerkinProblem flattened_problem(const Perturbation& zeta, const ForcingSpec& forcing, double eps,
                                  const Permeability& k = {});

/// Throws std::invalid_argument unless `reference` is the mesh of the flat interface.
DiscreteSolution solve_flattened(const Perturbation& zeta, const ForcingSpec& forcing, double eps,
                                 std::shared_ptr<const Mesh2D> reference, const Permeability& k = {},
                                 const CgOptions& options = {});

/// Pointwise property sweep of the maps and matrices at random points of both regions.
struct FlattenCheckReport {
    int points = 0;
    double max_roundtrip_error = 0.0;
    double max_identity_error = 0.0;
    double max_det_error = 0.0;
    /// min over samples of (smallest metric eigenvalue - e(zeta)); negative means violated.
    double min_eigen_margin = 0.0;
    /// max over samples of |A^{-1}|_2 / inverse_norm_bound.
    double max_inverse_norm_ratio = 0.0;
    double max_chain_rule_error = 0.0;
    std::vector<std::string> violations;

    bool passed() const { return violations.empty(); }
};

FlattenCheckReport flatten_check(const Perturbation& zeta, int points = 1000, unsigned seed = 1);

/// 1D pulled-back problem on (-1, 1) with the interface moved to 0.
PiecewiseField1D solve_flattened_1d(double zeta, const ForcingSpec& forcing, double eps, const Permeability& k = {});

}  // namespace pdarcy
