#include "pdarcy/mesh2d.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace pdarcy {

namespace {

double cross(const Eigen::Vector2d& a, const Eigen::Vector2d& b) { return a.x() * b.y() - a.y() * b.x(); }

}  // namespace

Mesh2D build_fitted_mesh(const Perturbation& zeta, int nx, int nz)
{
    if (nx < 2 || nz < 2) {
        throw std::invalid_argument("build_fitted_mesh: nx and nz must be at least 2");
    }
    Mesh2D m;
    m.nx_ = nx;
    m.nz_ = nz;
    m.zeta_ = zeta;
    const int levels = 2 * nz + 1;
    m.columns_.resize(nx + 1);
    m.nodes_.reserve(static_cast<std::size_t>((nx + 1) * levels));
    for (int j = 0; j <= nx; ++j) {
        const double x = static_cast<double>(j) / nx;
        m.columns_[j] = x;
        const double s = (j == 0 || j == nx) ? 0.0 : zeta.value(x);
        if (!(std::abs(s) < 1.0)) {
            throw std::invalid_argument("build_fitted_mesh: |zeta| >= 1 would invert cells");
        }
        for (int k = 0; k < levels; ++k) {
            double z = 0.0;
            if (k < nz) {
                const double ref = -1.0 + static_cast<double>(k) / nz;
                z = ref * (1.0 + s) + s;
            } else if (k == nz) {
                z = s;
            } else {
                const double ref = static_cast<double>(k - nz) / nz;
                z = ref * (1.0 - s) + s;
            }
            m.nodes_.emplace_back(x, z);
        }
    }
    // exact outer boundary
    for (int j = 0; j <= nx; ++j) {
        m.nodes_[m.node_index(j, 0)].y() = -1.0;
        m.nodes_[m.node_index(j, levels - 1)].y() = 1.0;
    }

    m.triangles_.reserve(static_cast<std::size_t>(2 * nx * (levels - 1)));
    for (int j = 0; j < nx; ++j) {
        for (int k = 0; k + 1 < levels; ++k) {
            const int a = m.node_index(j, k);
            const int b = m.node_index(j + 1, k);
            const int c = m.node_index(j + 1, k + 1);
            const int d = m.node_index(j, k + 1);
            const int region = k < nz ? 1 : 2;
            m.triangles_.push_back({a, b, c});
            m.triangles_.push_back({a, c, d});
            m.regions_.push_back(region);
            m.regions_.push_back(region);
        }
    }
    for (std::size_t t = 0; t < m.triangles_.size(); ++t) {
        if (!(m.area(t) > 1e-14)) {
            throw std::invalid_argument("build_fitted_mesh: degenerate triangle");
        }
    }

    m.dirichlet_.assign(m.nodes_.size(), false);
    for (int j = 0; j <= nx; ++j) {
        m.dirichlet_[m.node_index(j, 0)] = true;
    }
    for (int k = 0; k <= nz; ++k) {
        m.dirichlet_[m.node_index(0, k)] = true;
        m.dirichlet_[m.node_index(nx, k)] = true;
    }

    for (int j = 0; j < nx; ++j) {
        m.boundary_edges_.push_back({m.node_index(j, 0), m.node_index(j + 1, 0), BoundaryTag::dirichlet});
        m.boundary_edges_.push_back(
            {m.node_index(j, levels - 1), m.node_index(j + 1, levels - 1), BoundaryTag::neumann});
        m.interface_edges_.push_back({m.node_index(j, nz), m.node_index(j + 1, nz)});
    }
    for (int k = 0; k + 1 < levels; ++k) {
        const BoundaryTag tag = k < nz ? BoundaryTag::dirichlet : BoundaryTag::neumann;
        m.boundary_edges_.push_back({m.node_index(0, k), m.node_index(0, k + 1), tag});
        m.boundary_edges_.push_back({m.node_index(nx, k), m.node_index(nx, k + 1), tag});
    }
    return m;
}

Mesh2D build_reference_mesh(int nx, int nz) { return build_fitted_mesh(Perturbation(), nx, nz); }

double Mesh2D::area(std::size_t tri) const
{
    const auto& t = triangles_[tri];
    return 0.5 * cross(nodes_[t[1]] - nodes_[t[0]], nodes_[t[2]] - nodes_[t[0]]);
}

std::array<Eigen::Vector2d, 3> Mesh2D::basis_gradients(std::size_t tri) const
{
    const auto& t = triangles_[tri];
    const Eigen::Vector2d& p0 = nodes_[t[0]];
    const Eigen::Vector2d& p1 = nodes_[t[1]];
    const Eigen::Vector2d& p2 = nodes_[t[2]];
    const double twice = cross(p1 - p0, p2 - p0);
    // grad of lambda_i is the rotated opposite edge over twice the area
    auto g = [twice](const Eigen::Vector2d& a, const Eigen::Vector2d& b) -> Eigen::Vector2d {
        return Eigen::Vector2d(a.y() - b.y(), b.x() - a.x()) / twice;
    };
    return {g(p1, p2), g(p2, p0), g(p0, p1)};
}

double Mesh2D::min_angle_degrees() const
{
    double worst = 180.0;
    for (const auto& t : triangles_) {
        for (int i = 0; i < 3; ++i) {
            const Eigen::Vector2d u = nodes_[t[(i + 1) % 3]] - nodes_[t[i]];
            const Eigen::Vector2d v = nodes_[t[(i + 2) % 3]] - nodes_[t[i]];
            const double c = std::clamp(u.dot(v) / (u.norm() * v.norm()), -1.0, 1.0);
            worst = std::min(worst, std::acos(c) * 180.0 / std::numbers::pi);
        }
    }
    return worst;
}

double Mesh2D::interface_length() const
{
    double len = 0.0;
    for (const auto& e : interface_edges_) {
        len += (nodes_[e[1]] - nodes_[e[0]]).norm();
    }
    return len;
}

double Mesh2D::region_area(int region) const
{
    double a = 0.0;
    for (std::size_t t = 0; t < triangles_.size(); ++t) {
        if (regions_[t] == region) {
            a += area(t);
        }
    }
    return a;
}

double Mesh2D::interface_height(double x) const
{
    const int j = std::clamp(static_cast<int>(std::floor(x * nx_)), 0, nx_ - 1);
    const double t = (x - columns_[j]) / (columns_[j + 1] - columns_[j]);
    return (1.0 - t) * nodes_[node_index(j, nz_)].y() + t * nodes_[node_index(j + 1, nz_)].y();
}

double Mesh2D::max_cell_height() const
{
    double h = 0.0;
    for (int j = 0; j <= nx_; ++j) {
        for (int k = 0; k + 1 < levels(); ++k) {
            h = std::max(h, nodes_[node_index(j, k + 1)].y() - nodes_[node_index(j, k)].y());
        }
    }
    return h;
}

std::optional<Mesh2D::Location> Mesh2D::locate(double x, double z) const
{
    constexpr double tol = 1e-12;
    if (x < -tol || x > 1.0 + tol || z < -1.0 - tol || z > 1.0 + tol) {
        return std::nullopt;
    }
    const int j = std::clamp(static_cast<int>(std::floor(x * nx_)), 0, nx_ - 1);
    const double t = std::clamp((x - columns_[j]) / (columns_[j + 1] - columns_[j]), 0.0, 1.0);
    auto level_height = [&](int k) {
        return (1.0 - t) * nodes_[node_index(j, k)].y() + t * nodes_[node_index(j + 1, k)].y();
    };
    // largest k with level_height(k) <= z, in [0, levels - 2]
    int lo = 0;
    int hi = levels() - 1;
    while (hi - lo > 1) {
        const int mid = (lo + hi) / 2;
        if (level_height(mid) <= z) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    const Eigen::Vector2d p(x, z);
    const std::size_t base = static_cast<std::size_t>(2 * (j * (levels() - 1) + lo));
    Location best{base, {0.0, 0.0, 0.0}};
    double best_min = -1e300;
    for (std::size_t tri = base; tri < base + 2; ++tri) {
        const auto& tv = triangles_[tri];
        const Eigen::Vector2d& p0 = nodes_[tv[0]];
        const Eigen::Vector2d& p1 = nodes_[tv[1]];
        const Eigen::Vector2d& p2 = nodes_[tv[2]];
        const double twice = cross(p1 - p0, p2 - p0);
        const double l1 = cross(p - p0, p2 - p0) / twice;
        const double l2 = cross(p1 - p0, p - p0) / twice;
        const double l0 = 1.0 - l1 - l2;
        const double mn = std::min({l0, l1, l2});
        if (mn > best_min) {
            best_min = mn;
            best = {tri, {l0, l1, l2}};
        }
    }
    if (best_min < -1e-9) {
        return std::nullopt;
    }
    return best;
}

double Field2D::value_at(double x, double z) const
{
    const auto loc = mesh->locate(x, z);
    if (!loc) {
        throw std::out_of_range("point (" + std::to_string(x) + ", " + std::to_string(z) + ") lies outside the mesh");
    }
    const auto& t = mesh->triangles()[loc->triangle];
    return loc->barycentric[0] * values(t[0]) + loc->barycentric[1] * values(t[1]) +
           loc->barycentric[2] * values(t[2]);
}

Eigen::Vector2d Field2D::gradient(std::size_t tri) const
{
    const auto g = mesh->basis_gradients(tri);
    const auto& t = mesh->triangles()[tri];
    return values(t[0]) * g[0] + values(t[1]) * g[1] + values(t[2]) * g[2];
}

Field2D interpolate(std::shared_ptr<const Mesh2D> mesh, const std::function<double(double, double)>& u)
{
    Field2D f{std::move(mesh), {}};
    f.values.resize(static_cast<Eigen::Index>(f.mesh->node_count()));
    for (std::size_t i = 0; i < f.mesh->node_count(); ++i) {
        const auto& p = f.mesh->nodes()[i];
        f.values(static_cast<Eigen::Index>(i)) = u(p.x(), p.y());
    }
    return f;
}

}  // namespace pdarcy
