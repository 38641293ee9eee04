#pragma once

#include "pdarcy/geometry.hpp"

#include <Eigen/Core>

#include <array>
#include <memory>
#include <optional>
#include <vector>

namespace pdarcy {

enum class BoundaryTag { dirichlet, neumann };

struct BoundaryEdge {
    int a;
    int b;
    BoundaryTag tag;
};

/// Interface-fitted triangulation of (0,1) x (-1,1).
///
/// Nodes are stored column by column: node (j, k) with column j = 0..nx and
/// level k = 0..2nz; level nz lies on the interface. Each quad is split along
/// the (j,k)-(j+1,k+1) diagonal.
class Mesh2D {
public:
    Mesh2D() = default;

    int nx() const { return nx_; }
    int nz() const { return nz_; }
    int levels() const { return 2 * nz_ + 1; }
    int node_index(int column, int level) const { return column * levels() + level; }

    std::size_t node_count() const { return nodes_.size(); }
    std::size_t triangle_count() const { return triangles_.size(); }

    const std::vector<Eigen::Vector2d>& nodes() const { return nodes_; }
    const std::vector<std::array<int, 3>>& triangles() const { return triangles_; }
    const std::vector<int>& regions() const { return regions_; }
    const std::vector<double>& columns() const { return columns_; }
    const std::vector<BoundaryEdge>& boundary_edges() const { return boundary_edges_; }
    /// Ordered left to right along the interface polyline.
    const std::vector<std::array<int, 2>>& interface_edges() const { return interface_edges_; }
    const std::vector<bool>& dirichlet() const { return dirichlet_; }
    const Perturbation& zeta() const { return zeta_; }

    double area(std::size_t tri) const;
    /// Gradients of the three hat functions on a triangle (constant per triangle).
    std::array<Eigen::Vector2d, 3> basis_gradients(std::size_t tri) const;
    double min_angle_degrees() const;
    double interface_length() const;
    double region_area(int region) const;
    /// Interpolated interface height at x (piecewise linear between columns).
    double interface_height(double x) const;
    /// Largest vertical cell size.
    double max_cell_height() const;

    struct Location {
        std::size_t triangle;
        std::array<double, 3> barycentric;
    };
    /// Column search, then level search along interpolated level lines.
    std::optional<Location> locate(double x, double z) const;

    friend Mesh2D build_fitted_mesh(const Perturbation& zeta, int nx, int nz);

private:
    int nx_ = 0;
    int nz_ = 0;
    Perturbation zeta_;
    std::vector<Eigen::Vector2d> nodes_;
    std::vector<std::array<int, 3>> triangles_;
    std::vector<int> regions_;
    std::vector<double> columns_;
    std::vector<BoundaryEdge> boundary_edges_;
    std::vector<std::array<int, 2>> interface_edges_;
    std::vector<bool> dirichlet_;
};

/// Throws std::invalid_argument for nx, nz < 2 or |zeta| >= 1 at a column.
Mesh2D build_fitted_mesh(const Perturbation& zeta, int nx, int nz);

/// Fitted mesh of the flat interface.
Mesh2D build_reference_mesh(int nx, int nz);

/// Nodal P1 field over a shared, immutable mesh. Dirichlet nodes hold 0 for solver output.
struct Field2D {
    std::shared_ptr<const Mesh2D> mesh;
    Eigen::VectorXd values;

    double value_at(double x, double z) const;
    Eigen::Vector2d gradient(std::size_t tri) const;
};

/// Nodal interpolant of a function.
Field2D interpolate(std::shared_ptr<const Mesh2D> mesh, const std::function<double(double, double)>& u);

}  // namespace pdarcy
