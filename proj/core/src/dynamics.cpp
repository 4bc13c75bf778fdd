#include "fkpp/dynamics.hpp"

#include <algorithm>
#include <cmath>

#include "fkpp/error.hpp"
#include "fkpp/sparse.hpp"

namespace fkpp {

std::string_view to_string(InitialKind kind) {
    switch (kind) {
        case InitialKind::ConstantPatch: return "ConstantPatch";
        case InitialKind::GaussianBump: return "GaussianBump";
        case InitialKind::Custom: return "Custom";
    }
    return "?";
}

InitialKind initial_kind_from_string(std::string_view name) {
    for (auto k : {InitialKind::ConstantPatch, InitialKind::GaussianBump, InitialKind::Custom})
        if (to_string(k) == name) return k;
    throw InvalidArgument("unknown initial datum kind '" + std::string(name) + "'");
}

std::string_view to_string(Classification c) {
    switch (c) {
        case Classification::Persist: return "Persist";
        case Classification::Extinct: return "Extinct";
        case Classification::Undecided: return "Undecided";
    }
    return "?";
}

namespace {

double param(const std::map<std::string, double>& p, const std::string& key, double fallback) {
    const auto it = p.find(key);
    return it == p.end() ? fallback : it->second;
}

void check_params(const InitialDatum& d, std::initializer_list<const char*> allowed) {
    for (const auto& [key, value] : d.params) {
        if (std::find_if(allowed.begin(), allowed.end(),
                         [&](const char* a) { return key == a; }) == allowed.end())
            throw InvalidArgument("initial datum " + std::string(to_string(d.kind)) +
                                  " has no parameter '" + key + "'");
        if (!std::isfinite(value))
            throw InvalidArgument("initial datum parameter '" + key + "' is not finite");
    }
}

bool in_box(const Point& p, double lo, double hi) {
    for (std::size_t k = 0; k < p.n; ++k)
        if (p[k] < lo - 1e-12 || p[k] > hi + 1e-12) return false;
    return true;
}

double sup_of(std::span<const double> v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, x);
    return m;
}

}  // namespace

std::vector<double> make_initial(const InitialDatum& datum, const Grid& grid) {
    std::vector<double> u(grid.total_nodes(), 0.0);
    const auto inf = std::numeric_limits<double>::infinity();
    switch (datum.kind) {
        case InitialKind::ConstantPatch: {
            check_params(datum, {"amplitude", "x_lo", "x_hi", "theta_lo", "theta_hi"});
            const double a = param(datum.params, "amplitude", 1.0);
            const double xlo = param(datum.params, "x_lo", -inf);
            const double xhi = param(datum.params, "x_hi", inf);
            const double tlo = param(datum.params, "theta_lo", -inf);
            const double thi = param(datum.params, "theta_hi", inf);
            if (a < 0.0) throw InvalidArgument("initial amplitude must be nonnegative");
            for (std::size_t s = 0; s < grid.space_nodes(); ++s) {
                if (!in_box(grid.space_point(s), xlo, xhi)) continue;
                for (std::size_t q = 0; q < grid.pheno_nodes(); ++q)
                    if (in_box(grid.pheno_point(q), tlo, thi)) u[grid.index(s, q)] = a;
            }
            break;
        }
        case InitialKind::GaussianBump: {
            check_params(datum, {"amplitude", "x0", "theta0", "sigma_x", "sigma_theta"});
            const double a = param(datum.params, "amplitude", 1.0);
            const double x0 = param(datum.params, "x0", 0.5);
            const double t0 = param(datum.params, "theta0", 0.0);
            const double sx = param(datum.params, "sigma_x", 0.15);
            const double st = param(datum.params, "sigma_theta", 0.25);
            if (a < 0.0 || !(sx > 0.0) || !(st > 0.0))
                throw InvalidArgument("Gaussian initial datum needs amplitude >= 0 and positive widths");
            for (std::size_t s = 0; s < grid.space_nodes(); ++s) {
                const Point x = grid.space_point(s);
                double ex = 0.0;
                for (std::size_t k = 0; k < x.n; ++k) ex += (x[k] - x0) * (x[k] - x0);
                ex /= 2.0 * sx * sx;
                for (std::size_t q = 0; q < grid.pheno_nodes(); ++q) {
                    const Point th = grid.pheno_point(q);
                    double et = 0.0;
                    for (std::size_t k = 0; k < th.n; ++k) et += (th[k] - t0) * (th[k] - t0);
                    et /= 2.0 * st * st;
                    u[grid.index(s, q)] = a * std::exp(-ex - et);
                }
            }
            break;
        }
        case InitialKind::Custom: {
            if (!datum.custom) throw InvalidArgument("Custom initial datum without a function");
            for (std::size_t s = 0; s < grid.space_nodes(); ++s) {
                const Point x = grid.space_point(s);
                for (std::size_t q = 0; q < grid.pheno_nodes(); ++q) {
                    const double v = datum.custom(x.span(), grid.pheno_point(q).span());
                    if (!std::isfinite(v) || v < 0.0)
                        throw InvalidArgument("Custom initial datum must be finite and nonnegative");
                    u[grid.index(s, q)] = v;
                }
            }
            break;
        }
    }
    return u;
}

std::vector<double> compute_rho(std::span<const double> u, const Grid& grid) {
    if (u.size() != grid.total_nodes())
        throw InvalidArgument("compute_rho: vector size does not match the grid");
    const auto& w = grid.pheno_weights();
    const std::size_t np = grid.pheno_nodes();
    std::vector<double> rho(grid.space_nodes(), 0.0);
    for (std::size_t s = 0; s < rho.size(); ++s) {
        double acc = 0.0;
        const double* us = u.data() + s * np;
        for (std::size_t q = 0; q < np; ++q) acc += w[q] * us[q];
        rho[s] = acc;
    }
    return rho;
}

double total_mass(std::span<const double> u, const Grid& grid) {
    const auto rho = compute_rho(u, grid);
    const auto& w = grid.space_weights();
    double m = 0.0;
    for (std::size_t s = 0; s < rho.size(); ++s) m += w[s] * rho[s];
    return m;
}

SimState make_state(const Grid& grid, std::vector<double> u, double t) {
    SimState st;
    st.t = t;
    st.rho = compute_rho(u, grid);
    st.mass = total_mass(u, grid);
    st.u = std::move(u);
    return st;
}

// ---------------------------------------------------------------------------

SplittingIntegrator::SplittingIntegrator(const LinearOperator& op, std::vector<double> r,
                                         StepOptions options)
    : lap_(op.laplacian()), r_(std::move(r)), options_(options) {
    if (r_.size() != lap_.dim()) throw InvalidArgument("fitness vector does not match the grid");
    r_bar_ = -std::numeric_limits<double>::infinity();
    for (double v : r_) {
        if (!std::isfinite(v)) throw InvalidArgument("fitness values must be finite");
        r_bar_ = std::max(r_bar_, v);
    }
}

void SplittingIntegrator::diffuse(std::span<double> u, double dt) const {
    if (options_.scheme == DiffusionScheme::Exponential) {
        if (!propagator_ || propagator_->tau() != dt)
            propagator_ = std::make_unique<HeatPropagator>(lap_.grid(), lap_.diffusivity(), dt);
        propagator_->apply(u);
        return;
    }
    const auto b = lap_.to_symmetric(u);
    std::vector<double> y = b;
    auto apply = [&](std::span<const double> v, std::span<double> out) {
        lap_.apply(v, out);
        for (std::size_t i = 0; i < out.size(); ++i) out[i] = v[i] - dt * out[i];
    };
    const auto rep = conjugate_gradient(apply, b, y, options_.cg_tolerance,
                                        static_cast<long>(10 * b.size() + 100));
    if (!rep.converged)
        throw SolverError("backward Euler diffusion solve did not converge (relative residual " +
                              std::to_string(rep.relative_residual) + ")",
                          rep.iterations);
    const auto nodal = lap_.from_symmetric(y);
    for (std::size_t i = 0; i < u.size(); ++i) u[i] = std::max(0.0, nodal[i]);
}

SimState SplittingIntegrator::step(const SimState& state, double dt) const {
    if (!(dt > 0.0)) throw InvalidArgument("time step must be positive");
    const Grid& g = lap_.grid();
    if (state.u.size() != g.total_nodes())
        throw InvalidArgument("state does not match the integrator grid");
    SimState next;
    next.u = state.u;
    react_exact(next.u, r_, g, 0.5 * dt);
    diffuse(next.u, dt);
    react_exact(next.u, r_, g, 0.5 * dt);
    for (double v : next.u)
        if (!(v >= 0.0)) throw SolverError("negative or NaN density after a step", 0);
    next.t = state.t + dt;
    next.rho = compute_rho(next.u, g);
    next.mass = total_mass(next.u, g);
    next.monitors = state.monitors;
    return next;
}

SimState step(const SimState& state, double dt, std::span<const double> r_values,
              const LinearOperator& op, const StepOptions& options) {
    SplittingIntegrator integ(op, std::vector<double>(r_values.begin(), r_values.end()), options);
    return integ.step(state, dt);
}

double apriori_ceiling(double rho0_sup, double r_bar) { return std::max(rho0_sup, r_bar); }

bool rho_apriori_bound(SimState& state, double A, double tol) {
    const double m = sup_of(state.rho);
    auto& mon = state.monitors;
    mon.apriori_A = A;
    mon.max_rho_sup = std::max(mon.max_rho_sup, m);
    if (A > 0.0) mon.worst_bound_ratio = std::max(mon.worst_bound_ratio, m / A);
    const bool ok = m <= A * (1.0 + tol);
    if (!ok) ++mon.bound_violations;
    return ok;
}

double coth_bound(double H, double tau, double rho_sup) {
    if (!(H > 0.0)) throw InvalidArgument("coth_bound needs H > 0");
    if (tau < 0.0 || rho_sup < 0.0) throw InvalidArgument("coth_bound needs tau, rho_sup >= 0");
    const double sh = std::sqrt(H);
    const double z = (rho_sup + sh) / sh;
    const double t = std::tanh(sh * tau);
    return sh * (z + t) / (1.0 + z * t);
}

double default_dt(double r_bar, double A) { return 0.1 / std::max(1.0, r_bar + A); }

namespace {

// H at one instant: r_bar sup_x int_{|sigma| <= M} u + |rho|_inf sup_{|theta| > M} r+.
double coth_H(const SimState& st, const Grid& g, std::span<const double> r, double r_bar,
              double M) {
    const std::size_t np = g.pheno_nodes();
    std::vector<char> inner(np);
    for (std::size_t q = 0; q < np; ++q) {
        const Point th = g.pheno_point(q);
        double n2 = 0.0;
        for (std::size_t k = 0; k < th.n; ++k) n2 += th[k] * th[k];
        inner[q] = std::sqrt(n2) <= M;
    }
    const auto& w = g.pheno_weights();
    double inner_sup = 0.0, outer_r = 0.0;
    for (std::size_t s = 0; s < g.space_nodes(); ++s) {
        double acc = 0.0;
        for (std::size_t q = 0; q < np; ++q) {
            const std::size_t i = g.index(s, q);
            if (inner[q])
                acc += w[q] * st.u[i];
            else
                outer_r = std::max(outer_r, r[i]);
        }
        inner_sup = std::max(inner_sup, acc);
    }
    return r_bar * inner_sup + sup_of(st.rho) * outer_r;
}

}  // namespace

Trajectory simulate(const SimulationSetup& setup, std::vector<double> u0,
                    const StepObserver& observer) {
    const Grid& g = setup.grid;
    if (!(setup.horizon > 0.0)) throw InvalidArgument("horizon must be positive");
    if (u0.size() != g.total_nodes()) throw InvalidArgument("u0 does not match the grid");
    for (double v : u0)
        if (!std::isfinite(v) || v < 0.0)
            throw InvalidArgument("u0 must be finite and nonnegative");

    const auto op = assemble_operator(g, setup.r, setup.diffusivity);
    SplittingIntegrator integ(op, setup.r, setup.step);

    SimState state = make_state(g, std::move(u0));
    const double A = apriori_ceiling(sup_of(state.rho), integ.r_bar());
    rho_apriori_bound(state, A, setup.bound_tol);

    Trajectory traj;
    traj.r_bar = integ.r_bar();
    traj.A = A;
    double dt = setup.dt > 0.0 ? setup.dt : default_dt(integ.r_bar(), A);
    long steps = static_cast<long>(std::ceil(setup.horizon / dt - 1e-9));
    dt = setup.horizon / static_cast<double>(steps);

    auto record = [&](const SimState& s) {
        traj.times.push_back(s.t);
        traj.sup_rho.push_back(sup_of(s.rho));
        traj.sup_u.push_back(sup_of(s.u));
        traj.mass.push_back(s.mass);
        if (observer) observer(s);
    };
    record(state);

    // Coth monitor window: starts at t0 with rho_sup(t0); H is the largest
    // instantaneous value seen inside the window.
    const bool coth_on = setup.coth.has_value() && setup.coth->tau > 0.0;
    double window_start = 0.0, window_rho0 = sup_of(state.rho), window_H = 0.0;
    if (coth_on)
        window_H = coth_H(state, g, setup.r, integ.r_bar(), setup.coth->theta_radius);

    const double t_end = setup.horizon;
    long done = 0;
    while (done < steps) {
        SimState next = integ.step(state, dt);
        SimState probe = next;
        if (!rho_apriori_bound(probe, A, setup.bound_tol) && setup.halve_on_bound_violation &&
            state.monitors.dt_halvings < 30) {
            ++state.monitors.dt_halvings;
            dt *= 0.5;
            steps = done + 2 * (steps - done);
            continue;
        }
        next.monitors = probe.monitors;
        ++done;
        if (done == steps) next.t = t_end;
        state = std::move(next);

        if (coth_on) {
            window_H = std::max(window_H,
                                coth_H(state, g, setup.r, integ.r_bar(), setup.coth->theta_radius));
            if (state.t >= window_start + setup.coth->tau - 1e-9 * std::max(1.0, state.t)) {
                if (window_H > 0.0) {
                    const double V =
                        coth_bound(window_H, state.t - window_start, window_rho0);
                    const double ratio = sup_of(state.rho) / V;
                    auto& mon = state.monitors;
                    ++mon.coth_checks;
                    mon.coth_worst_ratio = std::max(mon.coth_worst_ratio, ratio);
                    if (ratio > 1.0 + setup.coth->tolerance) ++mon.coth_violations;
                }
                window_start = state.t;
                window_rho0 = sup_of(state.rho);
                window_H = coth_H(state, g, setup.r, integ.r_bar(), setup.coth->theta_radius);
            }
        }
        record(state);
    }
    traj.dt = dt;
    traj.final = std::move(state);
    return traj;
}

Classification classify(const Trajectory& traj, const ClassificationThresholds& thr) {
    if (traj.times.empty()) return Classification::Undecided;
    const double t_end = traj.times.back();
    const double t_start = traj.times.front();
    const double cut = t_end - thr.tail_fraction * (t_end - t_start);
    bool below = true, decreasing = true;
    double min_tail = std::numeric_limits<double>::infinity();
    double prev = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < traj.times.size(); ++i) {
        if (traj.times[i] < cut) continue;
        const double v = traj.sup_rho[i];
        below = below && v < thr.eps_ext;
        decreasing = decreasing && v <= prev;
        prev = v;
        min_tail = std::min(min_tail, v);
    }
    if (below && decreasing) return Classification::Extinct;
    if (min_tail > thr.eps_per) return Classification::Persist;
    return Classification::Undecided;
}

LongTimeResult classify_long_time(const Landscape& r, const Grid& grid, const InitialDatum& u0,
                                  double horizon, const ClassificationThresholds& thresholds,
                                  double diffusivity, double dt) {
    SimulationSetup setup{grid, sample_on_grid(r, grid), diffusivity, horizon, dt, {}, 1e-6, true,
                          std::nullopt};
    LongTimeResult out;
    out.trajectory = simulate(setup, make_initial(u0, grid));
    out.classification = classify(out.trajectory, thresholds);
    return out;
}

double decay_rate_estimate(const Trajectory& traj) {
    if (traj.times.size() < 2) throw InvalidArgument("decay rate needs at least two samples");
    const double mid = 0.5 * (traj.times.front() + traj.times.back());
    double n = 0, sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < traj.times.size(); ++i) {
        if (traj.times[i] < mid) continue;
        const double x = traj.times[i];
        const double y = std::log(std::max(traj.sup_u[i], 1e-300));
        n += 1;
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double denom = n * sxx - sx * sx;
    if (n < 2 || !(denom > 0.0)) throw InvalidArgument("decay rate: degenerate sample");
    return (n * sxy - sx * sy) / denom;
}

}  // namespace fkpp
