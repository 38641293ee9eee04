#include "pdarcy/flatten.hpp"

#include <Eigen/LU>

#include <algorithm>
#include <limits>
#include <cmath>
#include <random>
#include <stdexcept>

namespace pdarcy {

namespace {

constexpr double region_tol = 1e-12;

double sign_of(int region)
{
    if (region != 1 && region != 2) {
        throw std::invalid_argument("region index must be 1 or 2");
    }
    return region == 1 ? -1.0 : 1.0;
}

}  // namespace

Eigen::Vector2d lambda_map(int region, const Perturbation& zeta, const Eigen::Vector2d& point, MapDirection direction)
{
    const double s = sign_of(region);
    const double x = point.x();
    const double h = zeta.value(x);
    const double d = 1.0 - s * h;
    if (direction == MapDirection::forward) {
        const double lo = region == 1 ? -1.0 : h;
        const double hi = region == 1 ? h : 1.0;
        if (point.y() < lo - region_tol || point.y() > hi + region_tol) {
            throw std::domain_error("lambda_map: point is outside the perturbed region");
        }
        return {x, (point.y() - h) / d};
    }
    const double lo = region == 1 ? -1.0 : 0.0;
    const double hi = region == 1 ? 0.0 : 1.0;
    if (point.y() < lo - region_tol || point.y() > hi + region_tol) {
        throw std::domain_error("lambda_map: point is outside the reference region");
    }
    return {x, point.y() * d + h};
}

GradTransfer grad_transfer(int region, const Perturbation& zeta, const Eigen::Vector2d& point, bool left_sided)
{
    const double s = sign_of(region);
    const double x = point.x();
    const double h = zeta.value(x);
    const double slope = left_sided ? zeta.left_gradient(x) : zeta.gradient(x);
    const double d = 1.0 - s * h;
    const double c = 1.0 - s * point.y();
    GradTransfer g;
    g.region = region;
    g.point = point;
    g.det_jacobian = d;
    g.A_inv << 1.0, c * slope, 0.0, d;
    g.A << 1.0, -c * slope / d, 0.0, 1.0 / d;
    return g;
}

Eigen::Matrix2d metric_matrix(int region, const Perturbation& zeta, const Eigen::Vector2d& point)
{
    const GradTransfer g = grad_transfer(region, zeta, point);
    return g.det_jacobian * g.A.transpose() * g.A;
}

Eigen::Vector2d symmetric_eigenvalues(const Eigen::Matrix2d& m)
{
    const double mean = 0.5 * (m(0, 0) + m(1, 1));
    const double half = 0.5 * (m(0, 0) - m(1, 1));
    const double r = std::hypot(half, 0.5 * (m(0, 1) + m(1, 0)));
    return {mean - r, mean + r};
}

double pullback_norm_bound(const Perturbation& zeta)
{
    const double w = zeta.norm_w1inf();
    return std::sqrt(std::max(2.0, 4.0 * w * w));
}

double inverse_norm_bound(const Perturbation& zeta, int dim)
{
    const double w = zeta.norm_w1inf();
    return std::sqrt(dim + 3.0 + 4.0 * w * w);
}

double coercivity_constant(const Perturbation& zeta, int dim)
{
    const double w = zeta.norm_w1inf();
    return (1.0 - zeta.norm_sup()) / (dim + 3.0 + 4.0 * w * w);
}

ScalarField t_apply(const Perturbation& zeta, ScalarField u, PullbackDirection direction)
{
    if (direction == PullbackDirection::to_reference) {
        return [zeta, u = std::move(u)](double x, double z) {
            const int region = z < 0.0 ? 1 : 2;
            const Eigen::Vector2d p = lambda_map(region, zeta, {x, z}, MapDirection::inverse);
            return u(p.x(), p.y());
        };
    }
    return [zeta, u = std::move(u)](double x, double z) {
        const int region = z < zeta.value(x) ? 1 : 2;
        const Eigen::Vector2d p = lambda_map(region, zeta, {x, z}, MapDirection::forward);
        return u(p.x(), p.y());
    };
}

Field2D t_apply(const Perturbation& zeta, const Field2D& source, std::shared_ptr<const Mesh2D> target,
                PullbackDirection direction)
{
    if (direction == PullbackDirection::to_reference) {
        return interpolate(std::move(target), t_apply(zeta, [&source](double x, double z) { return source.value_at(x, z); },
                                                      PullbackDirection::to_reference));
    }
    // target nodes carry their own region through the mesh levels
    Field2D out{std::move(target), {}};
    const Mesh2D& m = *out.mesh;
    out.values.resize(static_cast<Eigen::Index>(m.node_count()));
    for (int j = 0; j <= m.nx(); ++j) {
        for (int k = 0; k < m.levels(); ++k) {
            const int idx = m.node_index(j, k);
            const Eigen::Vector2d& p = m.nodes()[idx];
            const int region = k <= m.nz() ? 1 : 2;
            const Eigen::Vector2d q = lambda_map(region, zeta, p, MapDirection::forward);
            out.values(idx) = source.value_at(q.x(), q.y());
        }
    }
    return out;
}

GalerkinProblem flattened_problem(const Perturbation& zeta, const ForcingSpec& forcing, double eps, const Permeability& k)
{
    GalerkinProblem p;
    const double c1 = k.k1;
    const double c2 = k.k2 / eps;
    p.coefficient = [zeta, c1, c2](int region, double x, double z) {
        return Eigen::Matrix2d((region == 1 ? c1 : c2) * metric_matrix(region, zeta, {x, z}));
    };
    p.volume_source = [zeta, F = forcing.volume](int region, double x, double z) {
        const double h = zeta.value(x);
        const double d = 1.0 - sign_of(region) * h;
        return d * F(x, z * d + h);
    };
    // surface measure of the graph: dS = sqrt(1 + zeta'^2) dx
    p.interface_source = [zeta, f = forcing.flux](double x, double) {
        const double g = zeta.gradient(x);
        return std::sqrt(1.0 + g * g) * f(x, zeta.value(x));
    };
    p.order = forcing.quadrature_order;
    return p;
}

DiscreteSolution solve_flattened(const Perturbation& zeta, const ForcingSpec& forcing, double eps,
                                 std::shared_ptr<const Mesh2D> reference, const Permeability& k,
                                 const CgOptions& options)
{
    if (!reference->zeta().is_zero()) {
        throw std::invalid_argument("solve_flattened expects the flat reference mesh");
    }
    if (!(eps > 0.0 && eps <= 1.0)) {
        throw std::invalid_argument("epsilon must lie in (0, 1]");
    }
    const auto system = assemble_galerkin(*reference, flattened_problem(zeta, forcing, eps, k));
    return solve_galerkin(std::move(reference), system, options);
}

PiecewiseField1D solve_flattened_1d(double zeta, const ForcingSpec& forcing, double eps, const Permeability& k)
{
    if (!(std::abs(zeta) < 1.0)) {
        throw std::invalid_argument("interface position must satisfy |zeta| < 1");
    }
    if (!(eps > 0.0 && eps <= 1.0)) {
        throw std::invalid_argument("epsilon must lie in (0, 1]");
    }
    const double d1 = 1.0 + zeta;
    const double d2 = 1.0 - zeta;
    auto source = [F = forcing.volume, zeta, d1, d2](double x) {
        const double d = x < 0.0 ? d1 : d2;
        return d * F(x * d + zeta, 0.0);
    };
    return solve_two_point(source, 0.0, k.k1 / d1, k.k2 / (eps * d2), forcing.flux(zeta, 0.0),
                           forcing.quadrature_order, 32, "flattened");
}

FlattenCheckReport flatten_check(const Perturbation& zeta, int points, unsigned seed)
{
    FlattenCheckReport rep;
    rep.points = points;
    rep.min_eigen_margin = std::numeric_limits<double>::infinity();
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const double e = coercivity_constant(zeta, 2);
    const double inv_bound = inverse_norm_bound(zeta, 2);
    // smooth probe with nonzero derivatives of all orders in both variables
    auto u = [](double x, double z) { return std::sin(2.0 * x + 0.5) * std::cos(1.5 * z) + x * z * z; };
    auto grad_u = [](double x, double z) {
        return Eigen::Vector2d(2.0 * std::cos(2.0 * x + 0.5) * std::cos(1.5 * z) + z * z,
                               -1.5 * std::sin(2.0 * x + 0.5) * std::sin(1.5 * z) + 2.0 * x * z);
    };
    constexpr double fd = 1e-5;
    for (int region = 1; region <= 2; ++region) {
        for (int n = 0; n < points; ++n) {
            const double x = 1e-3 + (1.0 - 2e-3) * unit(rng);
            const double t = 1e-3 + (1.0 - 2e-3) * unit(rng);
            const Eigen::Vector2d ref(x, region == 1 ? -t : t);
            const Eigen::Vector2d phys = lambda_map(region, zeta, ref, MapDirection::inverse);
            const Eigen::Vector2d back = lambda_map(region, zeta, phys, MapDirection::forward);
            const Eigen::Vector2d again = lambda_map(region, zeta, back, MapDirection::inverse);
            rep.max_roundtrip_error =
                std::max({rep.max_roundtrip_error, (back - ref).cwiseAbs().maxCoeff(), (again - phys).cwiseAbs().maxCoeff()});

            const GradTransfer g = grad_transfer(region, zeta, ref);
            rep.max_identity_error = std::max(
                rep.max_identity_error, (g.A * g.A_inv - Eigen::Matrix2d::Identity()).cwiseAbs().maxCoeff());
            rep.max_det_error = std::max(rep.max_det_error,
                                         std::abs(g.A_inv.determinant() - (1.0 - sign_of(region) * zeta.value(x))));
            const Eigen::Vector2d eig = symmetric_eigenvalues(metric_matrix(region, zeta, ref));
            rep.min_eigen_margin = std::min(rep.min_eigen_margin, eig(0) - e);
            const Eigen::Vector2d sv = symmetric_eigenvalues(g.A_inv.transpose() * g.A_inv);
            rep.max_inverse_norm_ratio = std::max(rep.max_inverse_norm_ratio, std::sqrt(sv(1)) / inv_bound);

            // central differences of u o inverse map at the reference point
            auto pulled = [&](double px, double pz) {
                const Eigen::Vector2d q = lambda_map(region, zeta, {px, pz}, MapDirection::inverse);
                return u(q.x(), q.y());
            };
            const Eigen::Vector2d fd_grad((pulled(x + fd, ref.y()) - pulled(x - fd, ref.y())) / (2.0 * fd),
                                          (pulled(x, ref.y() + fd) - pulled(x, ref.y() - fd)) / (2.0 * fd));
            rep.max_chain_rule_error = std::max(
                rep.max_chain_rule_error, (g.A * fd_grad - grad_u(phys.x(), phys.y())).cwiseAbs().maxCoeff());
        }
    }
    auto check = [&](bool ok, const std::string& what) {
        if (!ok) {
            rep.violations.push_back(what);
        }
    };
    check(rep.max_roundtrip_error <= 1e-12, "round trip error " + std::to_string(rep.max_roundtrip_error));
    check(rep.max_identity_error <= 1e-12, "A A^-1 differs from I by " + std::to_string(rep.max_identity_error));
    check(rep.max_det_error <= 1e-12, "det mismatch " + std::to_string(rep.max_det_error));
    check(rep.min_eigen_margin >= 0.0, "metric eigenvalue below e(zeta) by " + std::to_string(-rep.min_eigen_margin));
    check(rep.max_inverse_norm_ratio <= 1.0, "|A^-1| exceeds its bound (ratio " +
                                                 std::to_string(rep.max_inverse_norm_ratio) + ")");
    check(rep.max_chain_rule_error <= 1e-6, "chain rule error " + std::to_string(rep.max_chain_rule_error));
    return rep;
}

}  // namespace pdarcy
