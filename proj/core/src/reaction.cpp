#include <cmath>

#include "fkpp/dynamics.hpp"

namespace fkpp {

namespace {

// (e^z - 1) / z, continuous at 0.
double phi1(double z) { return std::abs(z) < 1e-8 ? 1.0 + 0.5 * z : std::expm1(z) / z; }

}  // namespace

void react_exact(std::span<double> u, std::span<const double> r, const Grid& grid, double tau) {
    const auto& w = grid.pheno_weights();
    const std::size_t np = grid.pheno_nodes();
    for (std::size_t s = 0; s < grid.space_nodes(); ++s) {
        const std::size_t base = s * np;
        double integral = 0.0;
        for (std::size_t q = 0; q < np; ++q) {
            const double rq = r[base + q];
            integral += w[q] * u[base + q] * tau * phi1(rq * tau);
        }
        const double denom = 1.0 + integral;
        for (std::size_t q = 0; q < np; ++q) u[base + q] *= std::exp(r[base + q] * tau) / denom;
    }
}

}  // namespace fkpp
