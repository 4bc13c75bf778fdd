#include <algorithm>
#include <cmath>

#include "fkpp/dynamics.hpp"
#include "fkpp/error.hpp"

namespace fkpp {

namespace {

void matmul(const std::vector<double>& a, const std::vector<double>& b, std::vector<double>& c,
            std::size_t n) {
    std::fill(c.begin(), c.end(), 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = 0; k < n; ++k) {
            const double aik = a[i * n + k];
            if (aik == 0.0) continue;
            for (std::size_t j = 0; j < n; ++j) c[i * n + j] += aik * b[k * n + j];
        }
}

}  // namespace

std::vector<double> metzler_exponential(std::span<const double> m, std::size_t n) {
    // exp(M) = e^{-c} exp(M + cI), with M + cI >= 0 entrywise. Every term of
    // the Taylor series and every squaring then involves nonnegative numbers
    // only.
    double c = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        c = std::max(c, -m[i * n + i]);
        for (std::size_t j = 0; j < n; ++j)
            if (i != j && m[i * n + j] < 0.0)
                throw InvalidArgument("metzler_exponential: negative off-diagonal entry");
    }
    std::vector<double> p(m.begin(), m.end());
    for (std::size_t i = 0; i < n; ++i) p[i * n + i] += c;

    double norm = 0.0;  // max row sum of P
    for (std::size_t i = 0; i < n; ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < n; ++j) s += p[i * n + j];
        norm = std::max(norm, s);
    }
    int squarings = 0;
    while (norm / std::ldexp(1.0, squarings) > 0.5) ++squarings;
    const double scale = std::ldexp(1.0, -squarings);
    for (double& v : p) v *= scale;

    std::vector<double> result(n * n, 0.0), term(n * n, 0.0), tmp(n * n);
    for (std::size_t i = 0; i < n; ++i) result[i * n + i] = term[i * n + i] = 1.0;
    for (int k = 1; k <= 30; ++k) {
        matmul(term, p, tmp, n);
        double tmax = 0.0;
        for (std::size_t i = 0; i < n * n; ++i) {
            term[i] = tmp[i] / k;
            result[i] += term[i];
            tmax = std::max(tmax, term[i]);
        }
        if (tmax < 1e-18) break;
    }
    const double damp = std::exp(-c * scale);
    for (double& v : result) v *= damp;
    for (int s = 0; s < squarings; ++s) {
        matmul(result, result, tmp, n);
        result.swap(tmp);
    }
    return result;
}

HeatPropagator::HeatPropagator(const Grid& grid, double diffusivity, double tau) : tau_(tau) {
    auto add = [&](const Axis& axis, double scale) {
        auto a = axis_laplacian_dense(axis);
        for (double& v : a) v *= scale * tau;
        const auto n = static_cast<std::size_t>(axis.points);
        extents_.push_back(n);
        factors_.push_back(metzler_exponential(a, n));
    };
    for (const auto& a : grid.space_axes()) add(a, diffusivity);
    for (const auto& a : grid.pheno_axes()) add(a, 1.0);
}

void HeatPropagator::apply(std::span<double> u) const {
    // Mode-k product with each axis factor; node ordering is the space axes
    // followed by the phenotype axes, last axis fastest.
    std::vector<double> line;
    std::vector<double> out;
    std::size_t inner = u.size();
    for (std::size_t k = 0; k < extents_.size(); ++k) {
        const std::size_t n = extents_[k];
        inner /= n;
        const std::size_t outer = u.size() / (n * inner);
        const auto& e = factors_[k];
        line.resize(n);
        out.resize(n);
        for (std::size_t o = 0; o < outer; ++o) {
            for (std::size_t in = 0; in < inner; ++in) {
                const std::size_t base = o * n * inner + in;
                for (std::size_t i = 0; i < n; ++i) line[i] = u[base + i * inner];
                for (std::size_t i = 0; i < n; ++i) {
                    double s = 0.0;
                    const double* row = e.data() + i * n;
                    for (std::size_t j = 0; j < n; ++j) s += row[j] * line[j];
                    out[i] = s;
                }
                for (std::size_t i = 0; i < n; ++i) u[base + i * inner] = out[i];
            }
        }
    }
}

}  // namespace fkpp
