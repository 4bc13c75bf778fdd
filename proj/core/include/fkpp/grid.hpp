#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fkpp/sparse.hpp"

namespace fkpp {

enum class Boundary { Periodic, Neumann, DirichletZero };

std::string_view to_string(Boundary bc);
Boundary boundary_from_string(std::string_view name);

/// One uniform axis of a tensor-product grid.
///
/// Node placement depends on the boundary condition:
///   Periodic       x_i = origin + i*h,      h = length/points
///   Neumann        x_i = origin + i*h,      h = length/(points-1)  (nodes on both ends)
///   DirichletZero  x_i = origin + (i+1)*h,  h = length/(points+1)  (boundary nodes eliminated)
struct Axis {
    double length = 1.0;
    int points = 3;
    Boundary bc = Boundary::Periodic;
    double origin = 0.0;

    double spacing() const;
    double coordinate(int i) const;
    /// Trapezoid quadrature weight of node i (h, or h/2 on Neumann end nodes).
    double weight(int i) const;
    /// Weight relative to an interior node: 1, or 1/2 on Neumann end nodes.
    double relative_weight(int i) const;
    void validate() const;

    bool operator==(const Axis&) const = default;
};

/// Axis for the window (-radius, radius) with homogeneous Dirichlet ends and
/// interior spacing h; 2*radius/h must be an integer.
Axis dirichlet_window(double radius, double h);

inline constexpr std::size_t kMaxDim = 2;

/// Small fixed-capacity coordinate tuple.
struct Point {
    std::array<double, kMaxDim> v{};
    std::size_t n = 0;

    std::span<const double> span() const { return {v.data(), n}; }
    double operator[](std::size_t i) const { return v[i]; }
};

/// Tensor-product grid over (space window or periodic cell) x (phenotype box).
///
/// Linear node index = space_index * pheno_nodes() + pheno_index, i.e. the
/// phenotype index varies fastest, so the phenotype integral at a fixed
/// spatial node reads a contiguous block. Within each factor the last axis
/// varies fastest.
class Grid {
public:
    Grid(std::vector<Axis> space, std::vector<Axis> pheno);

    const std::vector<Axis>& space_axes() const { return space_; }
    const std::vector<Axis>& pheno_axes() const { return pheno_; }
    std::size_t space_dim() const { return space_.size(); }
    std::size_t pheno_dim() const { return pheno_.size(); }
    std::size_t space_nodes() const { return space_nodes_; }
    std::size_t pheno_nodes() const { return pheno_nodes_; }
    std::size_t total_nodes() const { return space_nodes_ * pheno_nodes_; }

    std::size_t index(std::size_t space_index, std::size_t pheno_index) const {
        return space_index * pheno_nodes_ + pheno_index;
    }
    std::size_t space_index_of(std::size_t node) const { return node / pheno_nodes_; }
    std::size_t pheno_index_of(std::size_t node) const { return node % pheno_nodes_; }

    std::array<int, kMaxDim> space_multi(std::size_t space_index) const;
    std::array<int, kMaxDim> pheno_multi(std::size_t pheno_index) const;
    std::size_t space_flat(std::span<const int> multi) const;
    std::size_t pheno_flat(std::span<const int> multi) const;

    Point space_point(std::size_t space_index) const;
    Point pheno_point(std::size_t pheno_index) const;

    /// Product trapezoid weights over the phenotype axes (length pheno_nodes()).
    const std::vector<double>& pheno_weights() const { return pheno_weights_; }
    /// Product trapezoid weights over the space axes (length space_nodes()).
    const std::vector<double>& space_weights() const { return space_weights_; }

    bool operator==(const Grid& other) const {
        return space_ == other.space_ && pheno_ == other.pheno_;
    }

private:
    std::vector<Axis> space_;
    std::vector<Axis> pheno_;
    std::size_t space_nodes_ = 0;
    std::size_t pheno_nodes_ = 0;
    std::vector<double> pheno_weights_;
    std::vector<double> space_weights_;
};

/// Validates the axes (points >= 3, positive length, N,P in {1,2}, no periodic
/// phenotype axis) and builds the grid.
Grid build_grid(std::vector<Axis> space, std::vector<Axis> pheno);

/// Discretisation of d*Lap_x + Lap_theta + diag(r) on a Grid.
///
/// Neumann axes put nodes on the boundary and use ghost reflection, which
/// gives a non-symmetric stencil in nodal values. The stored matrix is the
/// similarity transform S = W^{1/2} A W^{-1/2}, W the relative trapezoid
/// weights, which is exactly symmetric and has the same spectrum. Vectors in
/// that basis are called "symmetric coordinates"; to_symmetric/from_symmetric
/// convert nodal values back and forth.
class LinearOperator {
public:
    LinearOperator(Grid grid, CsrMatrix matrix, std::vector<double> r_values,
                   std::vector<double> symmetrizer, double diffusivity);

    const Grid& grid() const { return grid_; }
    std::size_t dim() const { return matrix_.rows; }
    double diffusivity() const { return diffusivity_; }
    const CsrMatrix& matrix() const { return matrix_; }
    std::span<const double> r_values() const { return r_values_; }
    /// sqrt of relative trapezoid weights per node.
    std::span<const double> symmetrizer() const { return symmetrizer_; }

    /// out = S v (symmetric coordinates).
    void apply(std::span<const double> v, std::span<double> out) const;
    /// out = (S - diag r) v (symmetric coordinates).
    void apply_laplacian(std::span<const double> v, std::span<double> out) const;
    /// out = A v on nodal values.
    void apply_physical(std::span<const double> v, std::span<double> out) const;

    std::vector<double> to_symmetric(std::span<const double> nodal) const;
    std::vector<double> from_symmetric(std::span<const double> sym) const;

    double max_r() const;
    /// Same operator with r replaced by r + c.
    LinearOperator shifted(double c) const;
    /// The pure diffusion part (r = 0).
    LinearOperator laplacian() const;

private:
    Grid grid_;
    CsrMatrix matrix_;
    std::vector<double> r_values_;
    std::vector<double> symmetrizer_;
    double diffusivity_;
};

LinearOperator assemble_operator(const Grid& grid, std::span<const double> r_values, double d);

/// Nodal (physical) 1D second-difference matrix of one axis, dense row-major,
/// points x points. Rows of Periodic/Neumann axes sum to zero.
std::vector<double> axis_laplacian_dense(const Axis& axis);

}  // namespace fkpp
