// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <Eigen/Dense>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include "fkpp/dynamics.hpp"
#include "fkpp/experiments.hpp"
#include "fkpp/picard.hpp"
#include "fkpp/spectral.hpp"

using namespace fkpp;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* pattern, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, pattern, args...);
    return buf;
}

// Every simulation run here reports its monitors into these totals (criteria 8 and 9).
struct MonitorTotals {
    int runs = 0;
    long bound_violations = 0;
    double worst_bound_ratio = 0.0;
    long coth_checks = 0;
    long coth_violations = 0;
    double coth_worst_ratio = 0.0;

    void add(const BoundMonitors& m) {
        ++runs;
        bound_violations += m.bound_violations;
        worst_bound_ratio = std::max(worst_bound_ratio, m.worst_bound_ratio);
        coth_checks += m.coth_checks;
        coth_violations += m.coth_violations;
        coth_worst_ratio = std::max(coth_worst_ratio, m.coth_worst_ratio);
    }
} totals;

const std::vector<Axis> kTheta17{{2.0, 17, Boundary::Neumann, -1.0}};
const std::vector<Axis> kTheta33{{2.0, 33, Boundary::Neumann, -1.0}};

Landscape preset(PresetKind kind, std::map<std::string, double> params) {
    return make_preset({kind, std::move(params), 1, 1});
}

Landscape checkerboard() { return preset(PresetKind::Checkerboard, {{"r0", 1.0}, {"q", 1.0}}); }

Trajectory monitored_run(const Landscape& r, const Grid& g, std::vector<double> u0, double T,
                         double dt = 0.0) {
    SimulationSetup setup{g, sample_on_grid(r, g), 1.0, T, dt, {}, 1e-6, false,
                          CothMonitorOptions{}};
    auto traj = simulate(setup, std::move(u0));
    totals.add(traj.final.monitors);
    return traj;
}

// ---------------------------------------------------------------------------

Outcome constant_eigenvalue() {
    const double c = 0.5;
    const auto p = periodic_eigenvalue(preset(PresetKind::Constant, {{"c", c}}), 32, kTheta33, 1.0);
    const double err = std::abs(p.lambda - c);
    return {err <= 1e-9, fmt("32x33 grid, lambda=%.17g, |lambda-c|=%.2e (tol 1e-9)", p.lambda, err)};
}

Outcome dirichlet_analytic() {
    const double R = 1.0;
    const double exact = -std::pow(std::numbers::pi / (2.0 * R), 2);
    std::vector<double> errs;
    std::string lams;
    for (double h : {1.0 / 8.0, 1.0 / 16.0, 1.0 / 32.0}) {
        const Grid g = build_grid({dirichlet_window(R, h)}, {{2.0, 5, Boundary::Neumann, -1.0}});
        const auto op = assemble_operator(g, std::vector<double>(g.total_nodes(), 0.0), 1.0);
        const auto e = principal_eigenpair(op, 0.0);
        errs.push_back(std::abs(e.lambda - exact));
        lams += fmt("%.10f ", e.lambda);
    }
    const double p1 = std::log2(errs[0] / errs[1]), p2 = std::log2(errs[1] / errs[2]);
    const bool ok = p1 >= 1.8 && p1 <= 2.2 && p2 >= 1.8 && p2 <= 2.2;
    return {ok, fmt("R=1, h=1/8,1/16,1/32: lambda=%s exact=%.10f, orders %.4f %.4f (want [1.8,2.2])",
                    lams.c_str(), exact, p1, p2)};
}

// Largest eigenvalue of a dense 1D matrix, independent of the library assembly.
double dense_top(const Eigen::MatrixXd& m) {
    Eigen::EigenSolver<Eigen::MatrixXd> es(m);
    return es.eigenvalues().real().maxCoeff();
}

Outcome separability() {
    const double a0 = 0.2, a1 = 0.7, b0 = 0.1, b2 = 1.5;
    const Landscape r = preset(PresetKind::Separable, {{"a0", a0}, {"a1", a1}, {"b0", b0}, {"b2", b2}});
    const int nx = 32, nt = 33;
    const auto joint = periodic_eigenvalue(r, nx, kTheta33, 1.0);

    const double hx = 1.0 / nx;
    Eigen::MatrixXd ax = Eigen::MatrixXd::Zero(nx, nx);
    for (int i = 0; i < nx; ++i) {
        ax(i, i) = -2.0 / (hx * hx) + a0 + a1 * std::cos(2.0 * std::numbers::pi * i * hx);
        ax(i, (i + 1) % nx) += 1.0 / (hx * hx);
        ax(i, (i + nx - 1) % nx) += 1.0 / (hx * hx);
    }
    const double ht = 2.0 / (nt - 1);
    Eigen::MatrixXd at = Eigen::MatrixXd::Zero(nt, nt);
    for (int j = 0; j < nt; ++j) {
        const double th = -1.0 + j * ht;
        at(j, j) = -2.0 / (ht * ht) + b0 - b2 * th * th;
        // ghost reflection at both ends
        if (j > 0) at(j, j - 1) += (j == nt - 1 ? 2.0 : 1.0) / (ht * ht);
        if (j < nt - 1) at(j, j + 1) += (j == 0 ? 2.0 : 1.0) / (ht * ht);
    }
    const double la = dense_top(ax), lb = dense_top(at);
    const double err = std::abs(joint.lambda - (la + lb));
    return {err <= 1e-8, fmt("lambda_joint=%.15f, lambda_a+lambda_b=%.15f, diff=%.2e (tol 1e-8)",
                             joint.lambda, la + lb, err)};
}

Outcome truncation_monotone() {
    ExperimentSpec spec;
    spec.name = "truncation";
    spec.landscape = {PresetKind::Checkerboard, {{"r0", 1.0}, {"q", 1.0}}, 1, 1};
    spec.grid.spacing = 1.0 / 16.0;
    spec.grid.pheno = {{4.0, 65, Boundary::Neumann, -2.0}};
    spec.sweep = {SweepKind::Radius, {1.0, 1.5, 2.0, 2.5, 3.0}, false};
    const auto rec = run_truncation_study(spec);
    bool ok = rec.passed;
    std::string detail;
    for (const auto& c : rec.curves) {
        bool gaps_decrease = true;
        double prev_gap = INFINITY;
        for (const auto& p : c.points) {
            const double gap = *c.reference_lambda - p.lambda;
            gaps_decrease = gaps_decrease && gap < prev_gap && gap >= -1e-8;
            prev_gap = gap;
        }
        ok = ok && gaps_decrease && c.monotone && c.points.size() == 5;
        detail += fmt("%s: lambda %.6f..%.6f ref %.6f final gap %.2e; ", c.label.c_str(),
                      c.points.front().lambda, c.points.back().lambda, *c.reference_lambda,
                      prev_gap);
    }
    for (const auto& f : rec.failures) detail += "[" + f + "] ";
    return {ok, detail};
}

Outcome period_monotone() {
    const Landscape r = checkerboard();
    PeriodGridPolicy policy;
    policy.base_space_points = 32;
    policy.pheno = kTheta33;
    double prev = -INFINITY;
    bool ok = true;
    std::string detail = "lambda(L):";
    for (double L : {0.5, 1.0, 2.0, 4.0, 8.0}) {
        const auto p = lambda_of_period(r, L, policy);
        ok = ok && p.lambda >= prev - 1e-8;
        prev = p.lambda;
        detail += fmt(" L=%g:%.10f", L, p.lambda);
    }
    return {ok, detail};
}

Outcome diffusivity_monotone() {
    const Landscape r = checkerboard();
    PeriodGridPolicy policy;
    policy.base_space_points = 32;
    policy.pheno = kTheta33;
    double prev = INFINITY, worst = 0.0;
    bool ok = true;
    std::string detail = "lambda_d:";
    for (double d : {0.25, 1.0, 4.0, 16.0}) {
        const auto dl = lambda_of_diffusivity(r, d, policy);
        ok = ok && dl.direct.lambda <= prev + 1e-8;
        prev = dl.direct.lambda;
        worst = std::max(worst, dl.residual());
        detail += fmt(" d=%g:%.10f", d, dl.direct.lambda);
    }
    ok = ok && worst <= 1e-6;
    return {ok, detail + fmt("; max |direct-scaled| = %.2e (tol 1e-6)", worst)};
}

Outcome dichotomy() {
    const Landscape r = checkerboard();
    const Grid g = periodic_cell_grid(r, 16, kTheta17);
    const double c_star = -periodic_eigenvalue(r, 16, kTheta17, 1.0).lambda;
    InitialDatum u0;  // constant 1 on the whole grid
    const auto u = make_initial(u0, g);
    const auto low = classify(monitored_run(shift_landscape(r, c_star - 0.2), g, u, 200.0));
    const auto high = classify(monitored_run(shift_landscape(r, c_star + 0.2), g, u, 200.0));
    const bool ok = low == Classification::Extinct && high == Classification::Persist;
    return {ok, fmt("16x17, c*=%.10f: c*-0.2 -> %s, c*+0.2 -> %s", c_star,
                    std::string(to_string(low)).c_str(), std::string(to_string(high)).c_str())};
}

Outcome splitting_vs_picard() {
    const Landscape r = preset(PresetKind::Separable, {{"a0", 0.5}, {"a1", 0.5}, {"b2", 1.0}});
    const Grid g = periodic_cell_grid(r, 16, kTheta17);
    InitialDatum bump{InitialKind::GaussianBump, {{"sigma_x", 0.2}, {"sigma_theta", 0.4}}, {}};
    const auto u0 = make_initial(bump, g);
    const auto rv = sample_on_grid(r, g);
    std::vector<double> errs;
    for (double dt : {0.01, 0.005}) {
        const auto split = monitored_run(r, g, u0, 1.0, dt);
        PicardOptions po;
        po.dt_inner = dt / 4.0;
        const auto pic = picard_solve(g, u0, 1.0, rv, 1.0, po);
        double e = 0.0;
        for (std::size_t i = 0; i < u0.size(); ++i)
            e = std::max(e, std::abs(split.final.u[i] - pic.final.u[i]));
        errs.push_back(e);
    }
    const double ratio = errs[0] / errs[1];
    return {ratio >= 3.0 && ratio <= 5.0,
            fmt("16x17, T=1: sup error dt=0.01: %.3e, dt=0.005: %.3e, ratio %.4f (want [3,5])",
                errs[0], errs[1], ratio)};
}

Outcome logistic() {
    const double r0 = 1.0, rho0 = 0.05, T = 20.0;
    const Grid g = build_grid({{1.0, 8, Boundary::Periodic, 0.0}}, {{1.0, 9, Boundary::Neumann, 0.0}});
    const auto traj = monitored_run(preset(PresetKind::Constant, {{"c", r0}}), g,
                                    std::vector<double>(g.total_nodes(), rho0), T, 1e-3);
    auto exact = [&](double t) { return r0 / (1.0 + (r0 / rho0 - 1.0) * std::exp(-r0 * t)); };
    double worst = 0.0;
    for (std::size_t i = 0; i < traj.times.size(); ++i)
        worst = std::max(worst, std::abs(traj.sup_rho[i] - exact(traj.times[i])) / exact(traj.times[i]));
    const double final_rel = std::abs(traj.final.rho[0] - exact(T)) / exact(T);
    return {final_rel <= 1e-3, fmt("rho(20)=%.15f exact=%.15f rel=%.2e (tol 1e-3); worst over run %.2e",
                                    traj.final.rho[0], exact(T), final_rel, worst)};
}

Outcome extinction_rate() {
    const Landscape base = checkerboard();
    const double lam0 = periodic_eigenvalue(base, 16, kTheta17, 1.0).lambda;
    const Landscape r = shift_landscape(base, -0.3 - lam0);
    const double lam = periodic_eigenvalue(r, 16, kTheta17, 1.0).lambda;
    const Grid g = periodic_cell_grid(r, 16, kTheta17);
    const auto traj = monitored_run(r, g, make_initial({}, g), 100.0);
    const double rate = decay_rate_estimate(traj);
    const bool ok = std::abs(lam + 0.3) <= 0.01 && rate <= lam + 0.05;
    return {ok, fmt("lambda=%.12f, measured slope %.6f (want <= %.6f)", lam, rate, lam + 0.05)};
}

// Extra monitored runs so the bound criteria see a growth phase from small data
// and a decay phase from data above the ceiling.
void bound_suite() {
    const Landscape r = checkerboard();
    const Grid g = periodic_cell_grid(r, 16, kTheta17);
    InitialDatum small{InitialKind::GaussianBump, {{"amplitude", 0.01}}, {}};
    monitored_run(shift_landscape(r, 1.0), g, make_initial(small, g), 20.0);
    InitialDatum big{InitialKind::ConstantPatch, {{"amplitude", 5.0}}, {}};
    monitored_run(shift_landscape(r, 1.0), g, make_initial(big, g), 20.0);
}

Outcome apriori_bound() {
    bound_suite();
    return {totals.runs > 0 && totals.bound_violations == 0,
            fmt("%d runs, violations %ld, worst sup rho / A = %.9f", totals.runs,
                totals.bound_violations, totals.worst_bound_ratio)};
}

Outcome coth() {
    const double H = 2.3, rho = 0.8;
    const double at0 = coth_bound(H, 0.0, rho);
    const double at_inf = coth_bound(H, 1e4, rho);
    const double e0 = std::abs(at0 - (rho + std::sqrt(H))) / (rho + std::sqrt(H));
    const double einf = std::abs(at_inf - std::sqrt(H)) / std::sqrt(H);
    const bool ok = e0 <= 1e-12 && einf <= 1e-12 && totals.coth_checks > 0 &&
                    totals.coth_violations == 0;
    return {ok, fmt("tau=0 rel err %.1e, tau->inf rel err %.1e; %ld monitored checks, %ld "
                    "violations, worst ratio %.6f",
                    e0, einf, totals.coth_checks, totals.coth_violations, totals.coth_worst_ratio)};
}

}  // namespace

int main() {
    struct Criterion {
        int id;
        const char* name;
        double budget_s;
        std::function<Outcome()> run;
    };
    // Criteria 8 and 9 aggregate the monitors of every simulation, so they run last.
    const std::vector<Criterion> criteria{
        {1, "constant-landscape eigenvalue", 1.0, constant_eigenvalue},
        {2, "analytic Dirichlet window, order 2", 5.0, dirichlet_analytic},
        {3, "separable landscape oracle", 5.0, separability},
        {4, "truncation curves monotone below reference", 30.0, truncation_monotone},
        {5, "period sweep nondecreasing", 60.0, period_monotone},
        {6, "diffusivity sweep and scaling identity", 60.0, diffusivity_monotone},
        {7, "persistence/extinction dichotomy", 300.0, dichotomy},
        {10, "splitting vs Picard, order 2", 120.0, splitting_vs_picard},
        {11, "logistic reduction", 60.0, logistic},
        {12, "extinction rate below lambda + 0.05", 120.0, extinction_rate},
        {8, "a-priori rho bound over all runs", 120.0, apriori_bound},
        {9, "coth bound", 60.0, coth},
    };
    int failed = 0;
    for (const auto& c : criteria) {
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        const bool pass = o.pass && secs <= c.budget_s;
        failed += !pass;
        std::printf("%s [%2d] %s (%.2fs, budget %.0fs): %s\n", pass ? "PASS" : "FAIL", c.id, c.name,
                    secs, c.budget_s, o.detail.c_str());
        std::fflush(stdout);
    }
    std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed,
                criteria.size());
    return failed == 0 ? 0 : 1;
}
