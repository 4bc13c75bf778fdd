#pragma once

#include <cmath>
#include <map>
#include <string>
#include <numbers>
#include <random>
#include <vector>

#include "fkpp/grid.hpp"
#include "fkpp/landscape.hpp"

namespace fkpp::test {

inline constexpr double pi = std::numbers::pi;

inline Landscape preset(PresetKind kind, std::map<std::string, double> params,
                        std::size_t space_dim = 1, std::size_t pheno_dim = 1) {
    return make_preset({kind, std::move(params), space_dim, pheno_dim});
}

inline Grid unit_grid(int nx, int ntheta, double theta_len = 1.0, double theta_origin = 0.0) {
    return build_grid({{1.0, nx, Boundary::Periodic, 0.0}},
                      {{theta_len, ntheta, Boundary::Neumann, theta_origin}});
}

inline std::vector<double> random_vector(std::size_t n, std::mt19937_64& rng, double lo = -1.0,
                                         double hi = 1.0) {
    std::uniform_real_distribution<double> dist(lo, hi);
    std::vector<double> v(n);
    for (auto& x : v) x = dist(rng);
    return v;
}

inline double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

}  // namespace fkpp::test
