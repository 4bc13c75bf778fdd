#include "fkpp/picard.hpp"

#include <algorithm>
#include <cmath>

#include "fkpp/error.hpp"
#include "fkpp/sparse.hpp"

namespace fkpp {

double picard_slab_length(double r_bar, double A) {
    if (!(A > 0.0)) return std::numeric_limits<double>::infinity();
    if (r_bar <= 0.0) return 1.0 / (4.0 * A);
    // e^{r tau} - 1 <= min(1, r / (4 A))
    const double growth = std::min(1.0, r_bar / (4.0 * A));
    return std::log1p(growth) / r_bar;
}

namespace {

double sup_abs_diff(const std::vector<std::vector<double>>& a,
                    const std::vector<std::vector<double>>& b) {
    double m = 0.0;
    for (std::size_t n = 0; n < a.size(); ++n)
        for (std::size_t i = 0; i < a[n].size(); ++i) m = std::max(m, std::abs(a[n][i] - b[n][i]));
    return m;
}

}  // namespace

PicardResult picard_solve(const Grid& grid, std::span<const double> u0, double horizon,
                          std::span<const double> r_values, double diffusivity,
                          const PicardOptions& options) {
    if (!(horizon > 0.0)) throw InvalidArgument("horizon must be positive");
    if (!(options.dt_inner > 0.0)) throw InvalidArgument("dt_inner must be positive");
    if (u0.size() != grid.total_nodes() || r_values.size() != grid.total_nodes())
        throw InvalidArgument("picard_solve: vector sizes do not match the grid");

    const std::vector<double> zero(grid.total_nodes(), 0.0);
    const auto lap = assemble_operator(grid, zero, diffusivity);
    const std::size_t n = grid.total_nodes();
    const std::size_t np = grid.pheno_nodes();

    double r_bar = -std::numeric_limits<double>::infinity();
    for (double v : r_values) r_bar = std::max(r_bar, v);

    SimState state = make_state(grid, std::vector<double>(u0.begin(), u0.end()));
    double rho0 = 0.0;
    for (double v : state.rho) rho0 = std::max(rho0, v);
    const double A = std::max(rho0, r_bar);

    double tau_max = options.slab > 0.0 ? options.slab : picard_slab_length(r_bar, A);
    const long slabs = std::max(1L, static_cast<long>(std::ceil(horizon / tau_max - 1e-9)));
    const double tau = horizon / static_cast<double>(slabs);
    const int m = std::max(1, static_cast<int>(std::ceil(tau / options.dt_inner - 1e-9)));
    const double k = tau / m;
    if (k * r_bar >= 2.0)
        throw InvalidArgument("dt_inner too large for the Crank-Nicolson solve (dt * r_bar >= 2)");

    PicardResult res;
    res.times.push_back(0.0);
    res.sup_rho.push_back(*std::max_element(state.rho.begin(), state.rho.end()));

    // c = r - rho at node i for time level `level` of iterate `rho_w`.
    auto coefficient = [&](const std::vector<double>& rho, std::size_t i) {
        return r_values[i] - rho[i / np];
    };

    std::vector<double> rhs(n), y(n), tmp(n);
    for (long s = 0; s < slabs; ++s) {
        PicardSlab slab;
        slab.t0 = state.t;
        slab.t1 = s + 1 == slabs ? horizon : state.t + tau;
        slab.inner_steps = m;

        // rho[w] at each inner level; w starts as the constant-in-time u(t0).
        std::vector<std::vector<double>> rho_w(m + 1, state.rho);
        std::vector<std::vector<double>> u_levels(m + 1);
        int rising = 0;
        double last_change = std::numeric_limits<double>::infinity();

        for (int it = 1;; ++it) {
            // Linear solve with frozen rho_w, in symmetric coordinates.
            std::vector<double> x = lap.to_symmetric(state.u);
            u_levels[0] = state.u;
            std::vector<std::vector<double>> rho_new(m + 1);
            rho_new[0] = state.rho;
            for (int lvl = 0; lvl < m; ++lvl) {
                const auto& ra = rho_w[lvl];
                const auto& rb = rho_w[lvl + 1];
                lap.apply(x, tmp);
                for (std::size_t i = 0; i < n; ++i)
                    rhs[i] = x[i] + 0.5 * k * (tmp[i] + coefficient(ra, i) * x[i]);
                auto apply = [&](std::span<const double> v, std::span<double> out) {
                    lap.apply(v, out);
                    for (std::size_t i = 0; i < n; ++i)
                        out[i] = v[i] - 0.5 * k * (out[i] + coefficient(rb, i) * v[i]);
                };
                y = x;
                const auto rep = conjugate_gradient(apply, rhs, y, options.cg_tolerance,
                                                    static_cast<long>(10 * n + 100));
                if (!rep.converged)
                    throw SolverError("Crank-Nicolson solve did not converge in the Picard "
                                      "oracle (relative residual " +
                                          std::to_string(rep.relative_residual) + ")",
                                      rep.iterations);
                x = y;
                u_levels[lvl + 1] = lap.from_symmetric(x);
                rho_new[lvl + 1] = compute_rho(u_levels[lvl + 1], grid);
            }
            const double change = sup_abs_diff(rho_new, rho_w);
            slab.changes.push_back(change);
            rho_w = std::move(rho_new);

            if (options.fixed_iterations > 0) {
                if (it >= options.fixed_iterations) break;
                continue;
            }
            if (change < options.tolerance) break;
            rising = change > last_change ? rising + 1 : 0;
            last_change = change;
            if (rising >= 3)
                throw SolverError("Picard iteration diverges on slab [" + std::to_string(slab.t0) +
                                      ", " + std::to_string(slab.t1) + "]; slab too long",
                                  it);
            if (it >= options.max_iterations)
                throw SolverError("Picard iteration did not reach tolerance (last change " +
                                      std::to_string(change) + ")",
                                  it);
        }

        for (int lvl = 1; lvl <= m; ++lvl) {
            res.times.push_back(slab.t0 + (slab.t1 - slab.t0) * lvl / m);
            res.sup_rho.push_back(*std::max_element(rho_w[lvl].begin(), rho_w[lvl].end()));
        }
        state.u = std::move(u_levels[m]);
        state.t = slab.t1;
        state.rho = std::move(rho_w[m]);
        state.mass = total_mass(state.u, grid);
        res.slabs.push_back(std::move(slab));
    }
    res.final = std::move(state);
    return res;
}

}  // namespace fkpp
