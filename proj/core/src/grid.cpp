#include "fkpp/grid.hpp"

#include <cmath>
#include <limits>
#include <numeric>

#include "fkpp/error.hpp"

namespace fkpp {

std::string_view to_string(Boundary bc) {
    switch (bc) {
        case Boundary::Periodic: return "Periodic";
        case Boundary::Neumann: return "Neumann";
        case Boundary::DirichletZero: return "DirichletZero";
    }
    return "?";
}

Boundary boundary_from_string(std::string_view name) {
    if (name == "Periodic") return Boundary::Periodic;
    if (name == "Neumann") return Boundary::Neumann;
    if (name == "DirichletZero") return Boundary::DirichletZero;
    throw InvalidArgument("unknown boundary condition '" + std::string(name) + "'");
}

double Axis::spacing() const {
    switch (bc) {
        case Boundary::Periodic: return length / points;
        case Boundary::Neumann: return length / (points - 1);
        case Boundary::DirichletZero: return length / (points + 1);
    }
    return 0.0;
}

double Axis::coordinate(int i) const {
    const int k = bc == Boundary::DirichletZero ? i + 1 : i;
    switch (bc) {
        case Boundary::Periodic: return origin + length * k / points;
        case Boundary::Neumann: return origin + length * k / (points - 1);
        case Boundary::DirichletZero: return origin + length * k / (points + 1);
    }
    return origin;
}

double Axis::relative_weight(int i) const {
    if (bc == Boundary::Neumann && (i == 0 || i == points - 1)) return 0.5;
    return 1.0;
}

double Axis::weight(int i) const { return spacing() * relative_weight(i); }

void Axis::validate() const {
    if (!(length > 0.0) || !std::isfinite(length))
        throw InvalidArgument("axis length must be positive and finite, got " +
                              std::to_string(length));
    if (points < 3)
        throw InvalidArgument("axis needs at least 3 points, got " + std::to_string(points));
    if (!std::isfinite(origin)) throw InvalidArgument("axis origin must be finite");
}

Axis dirichlet_window(double radius, double h) {
    if (!(radius > 0.0) || !(h > 0.0))
        throw InvalidArgument("window radius and spacing must be positive");
    const double cells = 2.0 * radius / h;
    const double rounded = std::round(cells);
    if (std::abs(cells - rounded) > 1e-9 * std::max(1.0, cells))
        throw InvalidArgument("window diameter " + std::to_string(2 * radius) +
                              " is not a multiple of the spacing " + std::to_string(h));
    Axis a{2.0 * radius, static_cast<int>(rounded) - 1, Boundary::DirichletZero, -radius};
    a.validate();
    return a;
}

namespace {

std::size_t product_of_points(const std::vector<Axis>& axes) {
    std::size_t n = 1;
    for (const auto& a : axes) n *= static_cast<std::size_t>(a.points);
    return n;
}

std::array<int, kMaxDim> unflatten(const std::vector<Axis>& axes, std::size_t flat) {
    std::array<int, kMaxDim> m{};
    for (std::size_t k = axes.size(); k-- > 0;) {
        const auto n = static_cast<std::size_t>(axes[k].points);
        m[k] = static_cast<int>(flat % n);
        flat /= n;
    }
    return m;
}

std::size_t flatten(const std::vector<Axis>& axes, std::span<const int> multi) {
    std::size_t flat = 0;
    for (std::size_t k = 0; k < axes.size(); ++k)
        flat = flat * static_cast<std::size_t>(axes[k].points) + static_cast<std::size_t>(multi[k]);
    return flat;
}

std::vector<double> product_weights(const std::vector<Axis>& axes) {
    std::vector<double> w(product_of_points(axes), 1.0);
    for (std::size_t f = 0; f < w.size(); ++f) {
        const auto m = unflatten(axes, f);
        double p = 1.0;
        for (std::size_t k = 0; k < axes.size(); ++k) p *= axes[k].weight(m[k]);
        w[f] = p;
    }
    return w;
}

void check_dims(const std::vector<Axis>& axes, const char* what) {
    if (axes.empty() || axes.size() > kMaxDim)
        throw InvalidArgument(std::string(what) + " dimension must be 1 or 2, got " +
                              std::to_string(axes.size()));
    for (const auto& a : axes) a.validate();
}

}  // namespace

Grid::Grid(std::vector<Axis> space, std::vector<Axis> pheno)
    : space_(std::move(space)), pheno_(std::move(pheno)) {
    check_dims(space_, "space");
    check_dims(pheno_, "phenotype");
    for (const auto& a : pheno_)
        if (a.bc == Boundary::Periodic)
            throw InvalidArgument("phenotype axes must be Neumann or DirichletZero");
    space_nodes_ = product_of_points(space_);
    pheno_nodes_ = product_of_points(pheno_);
    pheno_weights_ = product_weights(pheno_);
    space_weights_ = product_weights(space_);
}

std::array<int, kMaxDim> Grid::space_multi(std::size_t s) const { return unflatten(space_, s); }
std::array<int, kMaxDim> Grid::pheno_multi(std::size_t p) const { return unflatten(pheno_, p); }
std::size_t Grid::space_flat(std::span<const int> m) const { return flatten(space_, m); }
std::size_t Grid::pheno_flat(std::span<const int> m) const { return flatten(pheno_, m); }

Point Grid::space_point(std::size_t s) const {
    const auto m = space_multi(s);
    Point p;
    p.n = space_.size();
    for (std::size_t k = 0; k < p.n; ++k) p.v[k] = space_[k].coordinate(m[k]);
    return p;
}

Point Grid::pheno_point(std::size_t q) const {
    const auto m = pheno_multi(q);
    Point p;
    p.n = pheno_.size();
    for (std::size_t k = 0; k < p.n; ++k) p.v[k] = pheno_[k].coordinate(m[k]);
    return p;
}

Grid build_grid(std::vector<Axis> space, std::vector<Axis> pheno) {
    return Grid(std::move(space), std::move(pheno));
}

// ---------------------------------------------------------------------------

LinearOperator::LinearOperator(Grid grid, CsrMatrix matrix, std::vector<double> r_values,
                               std::vector<double> symmetrizer, double diffusivity)
    : grid_(std::move(grid)),
      matrix_(std::move(matrix)),
      r_values_(std::move(r_values)),
      symmetrizer_(std::move(symmetrizer)),
      diffusivity_(diffusivity) {}

void LinearOperator::apply(std::span<const double> v, std::span<double> out) const {
    matrix_.multiply(v, out);
}

void LinearOperator::apply_laplacian(std::span<const double> v, std::span<double> out) const {
    matrix_.multiply(v, out);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] -= r_values_[i] * v[i];
}

void LinearOperator::apply_physical(std::span<const double> v, std::span<double> out) const {
    const auto sym = to_symmetric(v);
    matrix_.multiply(sym, out);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] /= symmetrizer_[i];
}

std::vector<double> LinearOperator::to_symmetric(std::span<const double> nodal) const {
    std::vector<double> s(nodal.size());
    for (std::size_t i = 0; i < s.size(); ++i) s[i] = nodal[i] * symmetrizer_[i];
    return s;
}

std::vector<double> LinearOperator::from_symmetric(std::span<const double> sym) const {
    std::vector<double> u(sym.size());
    for (std::size_t i = 0; i < u.size(); ++i) u[i] = sym[i] / symmetrizer_[i];
    return u;
}

double LinearOperator::max_r() const {
    double m = -std::numeric_limits<double>::infinity();
    for (double r : r_values_) m = std::max(m, r);
    return m;
}

LinearOperator LinearOperator::shifted(double c) const {
    CsrMatrix m = matrix_;
    std::vector<double> r = r_values_;
    for (std::size_t i = 0; i < m.rows; ++i) {
        for (std::size_t k = m.row_ptr[i]; k < m.row_ptr[i + 1]; ++k)
            if (m.cols[k] == i) m.vals[k] += c;
        r[i] += c;
    }
    return LinearOperator(grid_, std::move(m), std::move(r), symmetrizer_, diffusivity_);
}

LinearOperator LinearOperator::laplacian() const {
    CsrMatrix m = matrix_;
    for (std::size_t i = 0; i < m.rows; ++i)
        for (std::size_t k = m.row_ptr[i]; k < m.row_ptr[i + 1]; ++k)
            if (m.cols[k] == i) m.vals[k] -= r_values_[i];
    return LinearOperator(grid_, std::move(m), std::vector<double>(r_values_.size(), 0.0),
                          symmetrizer_, diffusivity_);
}

namespace {

// Visits the 1D neighbours of index i on `axis` and calls f(j, value) with the
// symmetric-coordinate coupling 1/(h^2 sqrt(w_i w_j)).
template <class F>
void for_each_neighbour(const Axis& axis, int i, F&& f) {
    const int n = axis.points;
    const double h = axis.spacing();
    const double inv_h2 = 1.0 / (h * h);
    auto couple = [&](int j) {
        const double wij = axis.relative_weight(i) * axis.relative_weight(j);
        f(j, inv_h2 / std::sqrt(wij));
    };
    switch (axis.bc) {
        case Boundary::Periodic:
            couple((i + n - 1) % n);
            couple((i + 1) % n);
            break;
        case Boundary::Neumann:
        case Boundary::DirichletZero:
            if (i > 0) couple(i - 1);
            if (i < n - 1) couple(i + 1);
            break;
    }
}

}  // namespace

LinearOperator assemble_operator(const Grid& grid, std::span<const double> r_values, double d) {
    const std::size_t n = grid.total_nodes();
    if (r_values.size() != n)
        throw InvalidArgument("r_values has " + std::to_string(r_values.size()) +
                              " entries, grid has " + std::to_string(n) + " nodes");
    if (!(d > 0.0) || !std::isfinite(d))
        throw InvalidArgument("diffusivity must be positive and finite");
    for (std::size_t i = 0; i < n; ++i)
        if (!std::isfinite(r_values[i]))
            throw InvalidArgument("non-finite fitness value at node " + std::to_string(i));

    const auto& sx = grid.space_axes();
    const auto& sp = grid.pheno_axes();
    std::vector<Triplet> trip;
    trip.reserve(n * (1 + 2 * (sx.size() + sp.size())));
    std::vector<double> symmetrizer(n);

    for (std::size_t s = 0; s < grid.space_nodes(); ++s) {
        const auto ms = grid.space_multi(s);
        for (std::size_t q = 0; q < grid.pheno_nodes(); ++q) {
            const auto mq = grid.pheno_multi(q);
            const std::size_t row = grid.index(s, q);
            double diag = 0.0;
            double w = 1.0;

            for (std::size_t k = 0; k < sx.size(); ++k) {
                const double h = sx[k].spacing();
                diag += d * (-2.0 / (h * h));
                w *= sx[k].relative_weight(ms[k]);
                for_each_neighbour(sx[k], ms[k], [&](int j, double v) {
                    auto m2 = ms;
                    m2[k] = j;
                    trip.push_back({row, grid.index(grid.space_flat({m2.data(), sx.size()}), q),
                                    d * v});
                });
            }
            for (std::size_t k = 0; k < sp.size(); ++k) {
                const double h = sp[k].spacing();
                diag += -2.0 / (h * h);
                w *= sp[k].relative_weight(mq[k]);
                for_each_neighbour(sp[k], mq[k], [&](int j, double v) {
                    auto m2 = mq;
                    m2[k] = j;
                    trip.push_back({row, grid.index(s, grid.pheno_flat({m2.data(), sp.size()})), v});
                });
            }
            trip.push_back({row, row, diag + r_values[row]});
            symmetrizer[row] = std::sqrt(w);
        }
    }
    return LinearOperator(grid, CsrMatrix::from_triplets(n, std::move(trip)),
                          std::vector<double>(r_values.begin(), r_values.end()),
                          std::move(symmetrizer), d);
}

std::vector<double> axis_laplacian_dense(const Axis& axis) {
    const int n = axis.points;
    const double h = axis.spacing();
    const double inv_h2 = 1.0 / (h * h);
    std::vector<double> a(static_cast<std::size_t>(n) * n, 0.0);
    auto at = [&](int i, int j) -> double& { return a[static_cast<std::size_t>(i) * n + j]; };
    for (int i = 0; i < n; ++i) {
        at(i, i) = -2.0 * inv_h2;
        switch (axis.bc) {
            case Boundary::Periodic:
                at(i, (i + n - 1) % n) += inv_h2;
                at(i, (i + 1) % n) += inv_h2;
                break;
            case Boundary::Neumann:
                if (i == 0) {
                    at(0, 1) = 2.0 * inv_h2;
                } else if (i == n - 1) {
                    at(n - 1, n - 2) = 2.0 * inv_h2;
                } else {
                    at(i, i - 1) = inv_h2;
                    at(i, i + 1) = inv_h2;
                }
                break;
            case Boundary::DirichletZero:
                if (i > 0) at(i, i - 1) = inv_h2;
                if (i < n - 1) at(i, i + 1) = inv_h2;
                break;
        }
    }
    return a;
}

}  // namespace fkpp
