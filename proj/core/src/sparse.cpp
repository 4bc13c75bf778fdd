#include "fkpp/sparse.hpp"

#include <algorithm>

namespace fkpp {

CsrMatrix CsrMatrix::from_triplets(std::size_t n, std::vector<Triplet> triplets) {
    std::stable_sort(triplets.begin(), triplets.end(), [](const Triplet& a, const Triplet& b) {
        return a.row != b.row ? a.row < b.row : a.col < b.col;
    });
    CsrMatrix m;
    m.rows = n;
    m.row_ptr.assign(n + 1, 0);
    m.cols.reserve(triplets.size());
    m.vals.reserve(triplets.size());
    std::size_t k = 0;
    for (std::size_t i = 0; i < n; ++i) {
        while (k < triplets.size() && triplets[k].row == i) {
            const std::size_t j = triplets[k].col;
            double v = 0.0;
            while (k < triplets.size() && triplets[k].row == i && triplets[k].col == j) {
                v += triplets[k].value;
                ++k;
            }
            m.cols.push_back(j);
            m.vals.push_back(v);
        }
        m.row_ptr[i + 1] = m.cols.size();
    }
    return m;
}

void CsrMatrix::multiply(std::span<const double> x, std::span<double> y) const {
    for (std::size_t i = 0; i < rows; ++i) {
        double s = 0.0;
        for (std::size_t k = row_ptr[i]; k < row_ptr[i + 1]; ++k) s += vals[k] * x[cols[k]];
        y[i] = s;
    }
}

double CsrMatrix::at(std::size_t i, std::size_t j) const {
    const auto first = cols.begin() + static_cast<std::ptrdiff_t>(row_ptr[i]);
    const auto last = cols.begin() + static_cast<std::ptrdiff_t>(row_ptr[i + 1]);
    const auto it = std::lower_bound(first, last, j);
    if (it == last || *it != j) return 0.0;
    return vals[static_cast<std::size_t>(it - cols.begin())];
}

std::vector<double> CsrMatrix::diagonal() const {
    std::vector<double> d(rows, 0.0);
    for (std::size_t i = 0; i < rows; ++i) d[i] = at(i, i);
    return d;
}

}  // namespace fkpp
