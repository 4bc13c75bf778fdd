#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

namespace fkpp {

struct Triplet {
    std::size_t row;
    std::size_t col;
    double value;
};

/// Compressed sparse row matrix. Column indices are sorted within each row.
struct CsrMatrix {
    std::size_t rows = 0;
    std::vector<std::size_t> row_ptr{0};
    std::vector<std::size_t> cols;
    std::vector<double> vals;

    /// Duplicates are summed in the order they appear in `triplets`
    /// (after a stable sort by (row, col)), so assembly is reproducible.
    static CsrMatrix from_triplets(std::size_t n, std::vector<Triplet> triplets);

    std::size_t nonzeros() const { return vals.size(); }
    void multiply(std::span<const double> x, std::span<double> y) const;
    double at(std::size_t i, std::size_t j) const;
    std::vector<double> diagonal() const;
};

inline double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline double norm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

inline double norm_inf(std::span<const double> a) {
    double m = 0.0;
    for (double v : a) m = std::max(m, std::abs(v));
    return m;
}

struct CgReport {
    long iterations = 0;
    double relative_residual = 0.0;
    bool converged = false;
};

/// Conjugate gradient for a symmetric positive definite operator given as a
/// callable `apply(x, y)` computing y = A x. `x` holds the initial guess on
/// entry and the solution on exit. Reductions run in index order, so results
/// are bitwise reproducible.
template <class Apply>
CgReport conjugate_gradient(Apply&& apply, std::span<const double> b, std::span<double> x,
                            double rel_tol, long max_iter) {
    const std::size_t n = b.size();
    std::vector<double> r(n), p(n), ap(n);
    apply(std::span<const double>(x.data(), n), std::span<double>(ap));
    for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - ap[i];

    const double bnorm = norm2(b);
    CgReport rep;
    if (bnorm == 0.0) {
        std::fill(x.begin(), x.end(), 0.0);
        rep.converged = true;
        return rep;
    }
    double rr = dot(r, r);
    rep.relative_residual = std::sqrt(rr) / bnorm;
    if (rep.relative_residual <= rel_tol) {
        rep.converged = true;
        return rep;
    }
    p = r;
    for (long k = 1; k <= max_iter; ++k) {
        apply(std::span<const double>(p), std::span<double>(ap));
        const double pap = dot(p, ap);
        if (!(pap > 0.0)) {
            rep.iterations = k;
            return rep;  // operator not SPD along p
        }
        const double alpha = rr / pap;
        for (std::size_t i = 0; i < n; ++i) {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        const double rr_new = dot(r, r);
        rep.iterations = k;
        rep.relative_residual = std::sqrt(rr_new) / bnorm;
        if (rep.relative_residual <= rel_tol) {
            rep.converged = true;
            return rep;
        }
        const double beta = rr_new / rr;
        rr = rr_new;
        for (std::size_t i = 0; i < n; ++i) p[i] = r[i] + beta * p[i];
    }
    return rep;
}

}  // namespace fkpp
