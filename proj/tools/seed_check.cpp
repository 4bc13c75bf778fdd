#include <cmath>
#include <cstdio>
#include <numbers>

#include "cli.hpp"
#include "fkpp/dynamics.hpp"
#include "fkpp/spectral.hpp"

namespace fkpp::cli {

namespace {

std::string fmt(const char* pattern, double a, double b) {
    char buf[160];
    std::snprintf(buf, sizeof buf, pattern, a, b);
    return buf;
}

Landscape preset(PresetKind kind, std::map<std::string, double> params) {
    return make_preset({kind, std::move(params), 1, 1});
}

}  // namespace

std::vector<SeedCheck> run_seed_checks() {
    std::vector<SeedCheck> out;
    const std::vector<Axis> theta{{2.0, 33, Boundary::Neumann, -1.0}};

    {
        const auto p = periodic_eigenvalue(preset(PresetKind::Constant, {{"c", 0.5}}), 32, theta, 1.0);
        const double err = std::abs(p.lambda - 0.5);
        out.push_back({"constant-landscape", err < 1e-9, fmt("lambda=%.17g err=%.3g", p.lambda, err)});
    }
    {
        // r = 0 on a Dirichlet window in x times a Neumann box: the discrete
        // eigenvalue is -(4/h^2) sin^2(pi h / (4 R)).
        const double R = 1.0, h = 1.0 / 32.0;
        const Grid g = build_grid({dirichlet_window(R, h)}, {{2.0, 9, Boundary::Neumann, -1.0}});
        const auto op = assemble_operator(g, std::vector<double>(g.total_nodes(), 0.0), 1.0);
        const auto e = principal_eigenpair(op, 0.0);
        const double s = std::sin(std::numbers::pi * h / (4.0 * R));
        const double exact = -4.0 / (h * h) * s * s;
        const double err = std::abs(e.lambda - exact);
        out.push_back({"dirichlet-window", err < 1e-9, fmt("lambda=%.17g err=%.3g", e.lambda, err)});
    }
    {
        const Landscape r = preset(PresetKind::Checkerboard, {{"r0", 1.0}, {"q", 1.0}});
        const auto a = periodic_eigenvalue(r, 16, theta, 1.0);
        const auto b = periodic_eigenvalue(shift_landscape(r, 0.3), 16, theta, 1.0);
        const double err = std::abs(b.lambda - a.lambda - 0.3);
        out.push_back({"shift-identity", err < 1e-10, fmt("lambda=%.17g err=%.3g", a.lambda, err)});
    }
    {
        const Grid g = build_grid({{1.0, 8, Boundary::Periodic, 0.0}}, {{1.0, 9, Boundary::Neumann, 0.0}});
        const std::vector<double> r(g.total_nodes(), 1.0);
        SimulationSetup setup{g, r, 1.0, 20.0, 1e-3, {}, 1e-6, true, std::nullopt};
        const auto traj = simulate(setup, std::vector<double>(g.total_nodes(), 0.1));
        const double exact = 1.0 / (1.0 + 9.0 * std::exp(-20.0));
        const double rel = std::abs(traj.final.rho.front() - exact) / exact;
        out.push_back({"logistic-reduction", rel < 1e-3, fmt("rho(20)=%.17g rel=%.3g", traj.final.rho.front(), rel)});
    }
    {
        const double a = coth_bound(4.0, 0.0, 0.7), b = coth_bound(4.0, 1e3, 0.7);
        const double err = std::max(std::abs(a - 2.7), std::abs(b - 2.0));
        out.push_back({"coth-closed-forms", err < 1e-12, fmt("tau0=%.17g err=%.3g", a, err)});
    }
    return out;
}

}  // namespace fkpp::cli
