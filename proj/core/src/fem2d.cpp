#include "pdarcy/fem2d.hpp"

#include "pdarcy/quadrature.hpp"

#include <Eigen/IterativeLinearSolvers>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace pdarcy {

GalerkinSystem assemble_galerkin(const Mesh2D& mesh, const GalerkinProblem& problem)
{
    const auto n = static_cast<Eigen::Index>(mesh.node_count());
    const auto& rule = triangle_rule(problem.order);
    std::vector<Eigen::Triplet<double>> triplets;
    triplets.reserve(mesh.triangle_count() * 9);
    Eigen::VectorXd load = Eigen::VectorXd::Zero(n);

    for (std::size_t t = 0; t < mesh.triangle_count(); ++t) {
        const auto& tri = mesh.triangles()[t];
        const int region = mesh.regions()[t];
        const Eigen::Vector2d& p0 = mesh.nodes()[tri[0]];
        const Eigen::Vector2d e1 = mesh.nodes()[tri[1]] - p0;
        const Eigen::Vector2d e2 = mesh.nodes()[tri[2]] - p0;
        const double jac = 2.0 * mesh.area(t);
        const auto grads = mesh.basis_gradients(t);

        Eigen::Matrix2d coef_integral = Eigen::Matrix2d::Zero();
        Eigen::Vector3d local_load = Eigen::Vector3d::Zero();
        for (const auto& q : rule) {
            const Eigen::Vector2d p = p0 + q.xi * e1 + q.eta * e2;
            const double w = q.weight * jac;
            coef_integral += w * problem.coefficient(region, p.x(), p.y());
            if (problem.volume_source) {
                const double s = w * problem.volume_source(region, p.x(), p.y());
                local_load += s * Eigen::Vector3d(1.0 - q.xi - q.eta, q.xi, q.eta);
            }
        }
        for (int i = 0; i < 3; ++i) {
            load(tri[i]) += local_load(i);
            for (int j = 0; j < 3; ++j) {
                triplets.emplace_back(tri[i], tri[j], grads[i].dot(coef_integral * grads[j]));
            }
        }
    }

    if (problem.interface_source) {
        const auto& g = gauss_legendre(problem.order);
        for (const auto& e : mesh.interface_edges()) {
            const Eigen::Vector2d& a = mesh.nodes()[e[0]];
            const Eigen::Vector2d& b = mesh.nodes()[e[1]];
            const double len = (b - a).norm();
            for (std::size_t q = 0; q < g.nodes.size(); ++q) {
                const double t = 0.5 * (g.nodes[q] + 1.0);
                const Eigen::Vector2d p = (1.0 - t) * a + t * b;
                const double s = 0.5 * g.weights[q] * len * problem.interface_source(p.x(), p.y());
                load(e[0]) += s * (1.0 - t);
                load(e[1]) += s * t;
            }
        }
    }

    GalerkinSystem sys;
    sys.stiffness.resize(n, n);
    sys.stiffness.setFromTriplets(triplets.begin(), triplets.end());
    sys.load = std::move(load);
    return sys;
}

DiscreteSolution solve_galerkin(std::shared_ptr<const Mesh2D> mesh, const GalerkinSystem& system,
                                const CgOptions& options)
{
    const auto n = static_cast<Eigen::Index>(mesh->node_count());
    std::vector<Eigen::Index> dof(static_cast<std::size_t>(n), -1);
    Eigen::Index free = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
        if (!mesh->dirichlet()[static_cast<std::size_t>(i)]) {
            dof[static_cast<std::size_t>(i)] = free++;
        }
    }
    if (free == n) {
        throw SolverError("singular system: the mesh has no Dirichlet nodes");
    }

    std::vector<Eigen::Triplet<double>> triplets;
    triplets.reserve(static_cast<std::size_t>(system.stiffness.nonZeros()));
    for (Eigen::Index col = 0; col < system.stiffness.outerSize(); ++col) {
        for (Eigen::SparseMatrix<double>::InnerIterator it(system.stiffness, col); it; ++it) {
            const Eigen::Index r = dof[static_cast<std::size_t>(it.row())];
            const Eigen::Index c = dof[static_cast<std::size_t>(it.col())];
            if (r >= 0 && c >= 0) {
                triplets.emplace_back(r, c, it.value());
            }
        }
    }
    Eigen::SparseMatrix<double> K(free, free);
    K.setFromTriplets(triplets.begin(), triplets.end());
    Eigen::VectorXd b(free);
    for (Eigen::Index i = 0; i < n; ++i) {
        if (dof[static_cast<std::size_t>(i)] >= 0) {
            b(dof[static_cast<std::size_t>(i)]) = system.load(i);
        }
    }

    if (!b.allFinite()) {
        throw std::domain_error("load vector is not finite");
    }
    for (Eigen::Index col = 0; col < K.outerSize(); ++col) {
        for (Eigen::SparseMatrix<double>::InnerIterator it(K, col); it; ++it) {
            if (!std::isfinite(it.value())) {
                throw std::domain_error("stiffness matrix is not finite");
            }
        }
    }

    DiscreteSolution out;
    out.stats.unknowns = static_cast<std::size_t>(free);
    Eigen::VectorXd u = Eigen::VectorXd::Zero(free);
    if (b.norm() > 0.0) {
        Eigen::ConjugateGradient<Eigen::SparseMatrix<double>, Eigen::Lower | Eigen::Upper,
                                 Eigen::DiagonalPreconditioner<double>>
            cg;
        const int max_it = options.max_iterations > 0
                               ? options.max_iterations
                               : static_cast<int>(std::ceil(50.0 * std::sqrt(static_cast<double>(free))));
        cg.setTolerance(options.tolerance);
        cg.setMaxIterations(max_it);
        cg.compute(K);
        u = cg.solve(b);
        out.stats.iterations = static_cast<int>(cg.iterations());
        out.stats.residual = cg.error();
        if (cg.info() != Eigen::Success) {
            throw SolverError("conjugate gradients did not converge in " + std::to_string(max_it) +
                              " iterations (relative residual " + std::to_string(cg.error()) + ")");
        }
    }

    out.field.mesh = std::move(mesh);
    out.field.values = Eigen::VectorXd::Zero(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        if (dof[static_cast<std::size_t>(i)] >= 0) {
            out.field.values(i) = u(dof[static_cast<std::size_t>(i)]);
        }
    }
    out.stats.load_value = system.load.dot(out.field.values);
    return out;
}

GalerkinProblem fitted_problem(const ForcingSpec& forcing, double eps, const Permeability& k)
{
    GalerkinProblem p;
    const double c1 = k.k1;
    const double c2 = k.k2 / eps;
    p.coefficient = [c1, c2](int region, double, double) {
        return Eigen::Matrix2d(Eigen::Matrix2d::Identity() * (region == 1 ? c1 : c2));
    };
    p.volume_source = [F = forcing.volume](int, double x, double z) { return F(x, z); };
    p.interface_source = [f = forcing.flux](double x, double z) { return f(x, z); };
    p.order = forcing.quadrature_order;
    return p;
}

DiscreteSolution assemble_solve(std::shared_ptr<const Mesh2D> mesh, const ForcingSpec& forcing, double eps,
                                const Permeability& k, const CgOptions& options)
{
    if (!(eps > 0.0 && eps <= 1.0)) {
        throw std::invalid_argument("epsilon must lie in (0, 1]");
    }
    const auto system = assemble_galerkin(*mesh, fitted_problem(forcing, eps, k));
    return solve_galerkin(std::move(mesh), system, options);
}

namespace {

bool same_nodes(const Mesh2D& a, const Mesh2D& b)
{
    if (&a == &b) {
        return true;
    }
    if (a.nx() != b.nx() || a.nz() != b.nz()) {
        return false;
    }
    for (std::size_t i = 0; i < a.node_count(); ++i) {
        if ((a.nodes()[i] - b.nodes()[i]).cwiseAbs().maxCoeff() > 1e-14) {
            return false;
        }
    }
    return true;
}

}  // namespace

VNormDiff vnorm_diff_2d(const Field2D& a, const Field2D& b)
{
    const Mesh2D& ma = *a.mesh;
    const Mesh2D& mb = *b.mesh;
    if (ma.columns().front() != mb.columns().front() || ma.columns().back() != mb.columns().back()) {
        throw std::invalid_argument("vnorm_diff_2d: fields live on incompatible domains");
    }
    VNormDiff out;
    Field2D resampled;
    const Field2D* other = &b;
    if (!same_nodes(ma, mb)) {
        resampled.mesh = a.mesh;
        resampled.values.resize(static_cast<Eigen::Index>(ma.node_count()));
        for (std::size_t i = 0; i < ma.node_count(); ++i) {
            const auto& p = ma.nodes()[i];
            resampled.values(static_cast<Eigen::Index>(i)) = b.value_at(p.x(), p.y());
        }
        other = &resampled;
        double gap = 0.0;
        for (double x : ma.columns()) {
            gap = std::max(gap, std::abs(ma.interface_height(x) - mb.interface_height(x)));
        }
        for (double x : mb.columns()) {
            gap = std::max(gap, std::abs(ma.interface_height(x) - mb.interface_height(x)));
        }
        out.layer_thickness = gap + std::max(ma.max_cell_height(), mb.max_cell_height());
    }
    double sum = 0.0;
    for (std::size_t t = 0; t < ma.triangle_count(); ++t) {
        sum += ma.area(t) * (a.gradient(t) - other->gradient(t)).squaredNorm();
    }
    out.value = std::sqrt(sum);
    return out;
}

double vnorm_2d(const Field2D& u)
{
    double sum = 0.0;
    for (std::size_t t = 0; t < u.mesh->triangle_count(); ++t) {
        sum += u.mesh->area(t) * u.gradient(t).squaredNorm();
    }
    return std::sqrt(sum);
}

double h1_norm(const Field2D& u)
{
    double sum = 0.0;
    const Mesh2D& m = *u.mesh;
    for (std::size_t t = 0; t < m.triangle_count(); ++t) {
        const auto& tri = m.triangles()[t];
        const double v0 = u.values(tri[0]);
        const double v1 = u.values(tri[1]);
        const double v2 = u.values(tri[2]);
        // exact mass integral of a linear function over a triangle
        const double mass = m.area(t) / 6.0 * (v0 * v0 + v1 * v1 + v2 * v2 + v0 * v1 + v1 * v2 + v0 * v2);
        sum += mass + m.area(t) * u.gradient(t).squaredNorm();
    }
    return std::sqrt(sum);
}

EnergySplit energy_split(const Field2D& field, double eps, const Permeability& k)
{
    EnergySplit e;
    const Mesh2D& m = *field.mesh;
    for (std::size_t t = 0; t < m.triangle_count(); ++t) {
        const double v = m.area(t) * field.gradient(t).squaredNorm();
        if (m.regions()[t] == 1) {
            e.e1 += v;
        } else {
            e.e2 += v;
        }
    }
    e.e1 *= k.k1;
    e.e2 *= k.k2 / eps;
    e.total = e.e1 + e.e2;
    return e;
}

double clipped_area(const Eigen::Vector2d& p0, const Eigen::Vector2d& p1, const Eigen::Vector2d& p2, bool below)
{
    // Sutherland-Hodgman against the half-plane s*z <= 0
    const double s = below ? 1.0 : -1.0;
    const std::array<Eigen::Vector2d, 3> in = {p0, p1, p2};
    std::vector<Eigen::Vector2d> poly;
    poly.reserve(4);
    for (int i = 0; i < 3; ++i) {
        const Eigen::Vector2d& a = in[i];
        const Eigen::Vector2d& b = in[(i + 1) % 3];
        const double da = s * a.y();
        const double db = s * b.y();
        if (da <= 0.0) {
            poly.push_back(a);
        }
        if ((da < 0.0 && db > 0.0) || (da > 0.0 && db < 0.0)) {
            const double t = da / (da - db);
            poly.push_back(a + t * (b - a));
        }
    }
    double twice = 0.0;
    for (std::size_t i = 0; i < poly.size(); ++i) {
        const auto& a = poly[i];
        const auto& b = poly[(i + 1) % poly.size()];
        twice += a.x() * b.y() - a.y() * b.x();
    }
    return 0.5 * std::abs(twice);
}

EnergySplit energy_flat_split(const Field2D& field, double eps, const Permeability& k)
{
    EnergySplit e;
    const Mesh2D& m = *field.mesh;
    for (std::size_t t = 0; t < m.triangle_count(); ++t) {
        const auto& tri = m.triangles()[t];
        const auto& p0 = m.nodes()[tri[0]];
        const auto& p1 = m.nodes()[tri[1]];
        const auto& p2 = m.nodes()[tri[2]];
        const double g2 = field.gradient(t).squaredNorm();
        const double below = clipped_area(p0, p1, p2, true);
        e.e1 += g2 * below;
        e.e2 += g2 * (m.area(t) - below);
    }
    e.e1 *= k.k1;
    e.e2 *= k.k2 / eps;
    e.total = e.e1 + e.e2;
    return e;
}

StripEnergies strip_energies(const Field2D& field)
{
    StripEnergies s;
    const Mesh2D& m = *field.mesh;
    for (std::size_t t = 0; t < m.triangle_count(); ++t) {
        const auto& tri = m.triangles()[t];
        const auto& p0 = m.nodes()[tri[0]];
        const auto& p1 = m.nodes()[tri[1]];
        const auto& p2 = m.nodes()[tri[2]];
        const double g2 = field.gradient(t).squaredNorm();
        if (m.regions()[t] == 1) {
            s.region1_above += g2 * clipped_area(p0, p1, p2, false);
        } else {
            s.region2_below += g2 * clipped_area(p0, p1, p2, true);
        }
    }
    return s;
}

}  // namespace pdarcy
