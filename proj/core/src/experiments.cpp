#include "fkpp/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <functional>
#include <mutex>
#include <sstream>
#include <thread>

#include "fkpp/error.hpp"

#ifndef FKPP_VERSION
#define FKPP_VERSION "unknown"
#endif

namespace fkpp {

std::string_view to_string(SweepKind kind) {
    switch (kind) {
        case SweepKind::None: return "None";
        case SweepKind::Period: return "Period";
        case SweepKind::Diffusivity: return "Diffusivity";
        case SweepKind::Radius: return "Radius";
        case SweepKind::Shift: return "Shift";
    }
    return "?";
}

SweepKind sweep_kind_from_string(std::string_view name) {
    for (auto k : {SweepKind::None, SweepKind::Period, SweepKind::Diffusivity, SweepKind::Radius,
                   SweepKind::Shift})
        if (to_string(k) == name) return k;
    throw InvalidArgument("unknown sweep kind '" + std::string(name) + "'");
}

std::string_view software_version() { return FKPP_VERSION; }

void validate(const ExperimentSpec& spec) {
    if (spec.name.empty()) throw InvalidArgument("experiment name must not be empty");
    const auto& v = spec.sweep.values;
    for (std::size_t i = 1; i < v.size(); ++i)
        if (!(v[i] > v[i - 1]))
            throw InvalidArgument("sweep values of '" + spec.name + "' must be strictly increasing");
    for (double x : v)
        if (!std::isfinite(x)) throw InvalidArgument("sweep values must be finite");
    if (spec.sweep.kind == SweepKind::Period || spec.sweep.kind == SweepKind::Diffusivity ||
        spec.sweep.kind == SweepKind::Radius)
        for (double x : v)
            if (!(x > 0.0))
                throw InvalidArgument(std::string(to_string(spec.sweep.kind)) +
                                      " sweep values must be positive");
    if (spec.sweep.relative && spec.sweep.kind != SweepKind::Shift)
        throw InvalidArgument("'relative' applies to Shift sweeps only");
    if (spec.simulate && !(spec.horizon > 0.0))
        throw InvalidArgument("experiment '" + spec.name + "' simulates but has no positive horizon");
    if (spec.dt < 0.0) throw InvalidArgument("dt must be nonnegative");
    if (spec.coth_tau < 0.0) throw InvalidArgument("coth_tau must be nonnegative");
    if (!(spec.grid.diffusivity > 0.0)) throw InvalidArgument("diffusivity must be positive");
    if (spec.grid.space_points < 3 || spec.grid.pheno_points < 3)
        throw InvalidArgument("grid needs at least 3 points per axis");
    if (!(spec.grid.spacing > 0.0)) throw InvalidArgument("spacing must be positive");
    const auto& t = spec.tolerances;
    for (double x : {t.eps_mono, t.tol_scaling, t.tol_seq, t.tol_shift, t.delta, t.eps_ext,
                     t.eps_per, t.bound_tol, t.tol_rate})
        if (!(x >= 0.0)) throw InvalidArgument("tolerances must be nonnegative");
    if (!(t.tail_fraction > 0.0 && t.tail_fraction <= 1.0))
        throw InvalidArgument("tail_fraction must lie in (0, 1]");
    const Landscape r = make_preset(spec.landscape);
    if (!spec.grid.pheno.empty() && spec.grid.pheno.size() != r.pheno_dim())
        throw InvalidArgument("grid phenotype axes do not match the landscape phenotype dimension");
    (void)resolved_pheno(spec);
}

std::vector<Axis> resolved_pheno(const ExperimentSpec& spec) {
    if (!spec.grid.pheno.empty()) {
        for (const auto& a : spec.grid.pheno) a.validate();
        return spec.grid.pheno;
    }
    const auto& p = spec.landscape.params;
    const double lo = p.count("theta_lo") ? p.at("theta_lo") : -1.0;
    const double hi = p.count("theta_hi") ? p.at("theta_hi") : 1.0;
    std::vector<Axis> axes(spec.landscape.pheno_dim,
                           Axis{hi - lo, spec.grid.pheno_points, Boundary::Neumann, lo});
    return axes;
}

// ---------------------------------------------------------------------------

namespace {

std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void put_axis(std::ostringstream& os, const std::string& key, const Axis& a) {
    os << key << "=" << num(a.length) << "," << a.points << "," << to_string(a.bc) << ","
       << num(a.origin) << "\n";
}

}  // namespace

std::string canonical_text(const ExperimentSpec& s) {
    std::ostringstream os;
    os << "name=" << s.name << "\n";
    os << "landscape.kind=" << to_string(s.landscape.kind) << "\n";
    os << "landscape.space_dim=" << s.landscape.space_dim << "\n";
    os << "landscape.pheno_dim=" << s.landscape.pheno_dim << "\n";
    for (const auto& [k, v] : s.landscape.params) os << "landscape.params." << k << "=" << num(v) << "\n";
    os << "grid.space_points=" << s.grid.space_points << "\n";
    for (std::size_t i = 0; i < s.grid.pheno.size(); ++i)
        put_axis(os, "grid.pheno." + std::to_string(i), s.grid.pheno[i]);
    os << "grid.pheno_points=" << s.grid.pheno_points << "\n";
    os << "grid.diffusivity=" << num(s.grid.diffusivity) << "\n";
    os << "grid.spacing=" << num(s.grid.spacing) << "\n";
    os << "grid.truncation_kinds=";
    for (auto k : s.grid.truncation_kinds) os << to_string(k) << ";";
    os << "\n";
    os << "grid.node_scaling="
       << (s.grid.node_scaling == NodeScaling::Fixed ? "Fixed" : "ScaleWithPeriod") << "\n";
    os << "sweep.kind=" << to_string(s.sweep.kind) << "\n";
    os << "sweep.values=";
    for (double v : s.sweep.values) os << num(v) << ";";
    os << "\n";
    os << "sweep.relative=" << s.sweep.relative << "\n";
    os << "simulate=" << s.simulate << "\n";
    os << "horizon=" << num(s.horizon) << "\n";
    os << "dt=" << num(s.dt) << "\n";
    os << "initial.kind=" << to_string(s.initial.kind) << "\n";
    for (const auto& [k, v] : s.initial.params) os << "initial.params." << k << "=" << num(v) << "\n";
    os << "coth_tau=" << num(s.coth_tau) << "\n";
    const auto& t = s.tolerances;
    os << "tolerances=" << num(t.eps_mono) << "," << num(t.tol_scaling) << "," << num(t.tol_seq)
       << "," << num(t.tol_shift) << "," << num(t.delta) << "," << num(t.eps_ext) << ","
       << num(t.eps_per) << "," << num(t.tail_fraction) << "," << num(t.bound_tol) << ","
       << num(t.tol_rate) << "\n";
    return os.str();
}

std::string spec_hash(const ExperimentSpec& spec) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : canonical_text(spec)) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

// ---------------------------------------------------------------------------

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

// Runs body(i) for i in [0, n) on up to `threads` workers. Each index is
// handled by exactly one worker; the first exception is rethrown.
void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& body) {
    const unsigned workers = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(n)));
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < n; i = next++) {
                try {
                    body(i);
                } catch (...) {
                    std::lock_guard lock(error_mutex);
                    if (!error) error = std::current_exception();
                }
            }
        });
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

RunRecord start_record(const ExperimentSpec& spec, std::string runner) {
    validate(spec);
    RunRecord rec;
    rec.experiment = spec.name;
    rec.runner = std::move(runner);
    rec.canonical_spec = canonical_text(spec);
    rec.spec_hash = spec_hash(spec);
    rec.version = std::string(software_version());
    return rec;
}

void fail(RunRecord& rec, const std::string& message) {
    rec.passed = false;
    rec.failures.push_back(message);
}

void require_sweep(const ExperimentSpec& spec, std::initializer_list<SweepKind> kinds,
                   const char* runner) {
    if (std::find(kinds.begin(), kinds.end(), spec.sweep.kind) == kinds.end())
        throw InvalidArgument(std::string(runner) + " needs a " +
                              std::string(to_string(*kinds.begin())) + " sweep, experiment '" +
                              spec.name + "' has " + std::string(to_string(spec.sweep.kind)));
    if (spec.sweep.values.empty())
        throw InvalidArgument("experiment '" + spec.name + "' has an empty sweep");
}

Grid cell_grid(const ExperimentSpec& spec, const Landscape& r) {
    return periodic_cell_grid(r, spec.grid.space_points, resolved_pheno(spec));
}

PointResult make_point(double parameter, double lambda, double residual, long iterations,
                       std::size_t nodes) {
    PointResult p;
    p.parameter = parameter;
    p.lambda = lambda;
    p.residual = residual;
    p.iterations = iterations;
    p.nodes = nodes;
    return p;
}

struct SimOutcome {
    Classification classification = Classification::Undecided;
    std::optional<double> decay_rate;
    BoundMonitors monitors;
};

SimOutcome simulate_point(const ExperimentSpec& spec, const Landscape& r, const Grid& grid,
                          const StepObserver& observer) {
    SimulationSetup setup{grid, sample_on_grid(r, grid), spec.grid.diffusivity, spec.horizon,
                          spec.dt, {}, spec.tolerances.bound_tol, true, std::nullopt};
    if (spec.coth_tau > 0.0) setup.coth = CothMonitorOptions{spec.coth_tau};
    const auto traj = simulate(setup, make_initial(spec.initial, grid), observer);
    SimOutcome out;
    out.classification = classify(traj, {spec.tolerances.eps_ext, spec.tolerances.eps_per,
                                         spec.tolerances.tail_fraction});
    out.monitors = traj.final.monitors;
    if (out.classification == Classification::Extinct) out.decay_rate = decay_rate_estimate(traj);
    return out;
}

void check_monitors(RunRecord& rec, const PointResult& p) {
    if (!p.monitors) return;
    if (p.monitors->bound_violations > 0)
        fail(rec, "a-priori bound exceeded at parameter " + num(p.parameter) + " (worst ratio " +
                      num(p.monitors->worst_bound_ratio) + ")");
    if (p.monitors->coth_violations > 0)
        fail(rec, "coth bound exceeded at parameter " + num(p.parameter) + " (worst ratio " +
                      num(p.monitors->coth_worst_ratio) + ")");
}

}  // namespace

double critical_shift(const ExperimentSpec& spec) {
    const Landscape r = make_preset(spec.landscape);
    const auto p = periodic_eigenvalue(r, spec.grid.space_points, resolved_pheno(spec),
                                       spec.grid.diffusivity);
    return -p.lambda;
}

RunRecord run_eigen(const ExperimentSpec& spec, const RunOptions&) {
    const auto t0 = Clock::now();
    RunRecord rec = start_record(spec, "eigen");
    const Landscape r = make_preset(spec.landscape);
    const auto p = periodic_eigenvalue(r, spec.grid.space_points, resolved_pheno(spec),
                                       spec.grid.diffusivity);
    CurveResult curve;
    curve.label = "PeriodicNeumann";
    PointResult pt = make_point(1.0, p.lambda, p.residual, p.iterations, p.nodes);
    pt.wall_seconds = seconds_since(t0);
    curve.points.push_back(pt);
    curve.converged = true;
    if (p.lambda > r.sup_r() + 1e-12 * (1.0 + std::abs(r.sup_r())))
        fail(rec, "lambda " + num(p.lambda) + " exceeds sup r " + num(r.sup_r()));
    rec.curves.push_back(std::move(curve));
    rec.wall_seconds = seconds_since(t0);
    return rec;
}

RunRecord run_simulation(const ExperimentSpec& spec, const RunOptions& options) {
    const auto t0 = Clock::now();
    RunRecord rec = start_record(spec, "simulate");
    if (!(spec.horizon > 0.0)) throw InvalidArgument("simulation needs a positive horizon");
    const Landscape r = make_preset(spec.landscape);
    const Grid grid = cell_grid(spec, r);
    const auto eig = periodic_eigenvalue(r, spec.grid.space_points, resolved_pheno(spec),
                                         spec.grid.diffusivity);
    const auto sim = simulate_point(spec, r, grid, options.observer);

    PointResult pt = make_point(0.0, eig.lambda, eig.residual, eig.iterations, eig.nodes);
    pt.classification = sim.classification;
    pt.decay_rate = sim.decay_rate;
    pt.monitors = sim.monitors;
    pt.wall_seconds = seconds_since(t0);
    check_monitors(rec, pt);
    CurveResult curve;
    curve.label = "simulation";
    curve.points.push_back(pt);
    rec.curves.push_back(std::move(curve));
    rec.wall_seconds = seconds_since(t0);
    return rec;
}

RunRecord run_dichotomy(const ExperimentSpec& spec, const RunOptions& options) {
    const auto t0 = Clock::now();
    RunRecord rec = start_record(spec, "dichotomy");
    require_sweep(spec, {SweepKind::Shift}, "dichotomy");
    const Landscape r = make_preset(spec.landscape);
    const auto pheno = resolved_pheno(spec);
    const auto base = periodic_eigenvalue(r, spec.grid.space_points, pheno, spec.grid.diffusivity);
    const double c_star = -base.lambda;
    const auto& tol = spec.tolerances;

    std::vector<double> shifts = spec.sweep.values;
    if (spec.sweep.relative)
        for (double& c : shifts) c += c_star;

    CurveResult curve;
    curve.label = "shift";
    curve.reference_lambda = base.lambda;
    curve.points.resize(shifts.size());
    parallel_for(shifts.size(), options.threads, [&](std::size_t i) {
        const auto tp = Clock::now();
        const double c = shifts[i];
        const Landscape rc = shift_landscape(r, c);
        const auto p = periodic_eigenvalue(rc, spec.grid.space_points, pheno, spec.grid.diffusivity);
        PointResult pt = make_point(c, p.lambda, p.residual, p.iterations, p.nodes);
        pt.shift_error = p.lambda - base.lambda - c;
        if (spec.simulate) {
            const auto sim = simulate_point(spec, rc, cell_grid(spec, rc), {});
            pt.classification = sim.classification;
            pt.decay_rate = sim.decay_rate;
            pt.monitors = sim.monitors;
            pt.expected = p.lambda < -tol.delta  ? Classification::Extinct
                          : p.lambda > tol.delta ? Classification::Persist
                                                 : Classification::Undecided;
        }
        pt.wall_seconds = seconds_since(tp);
        curve.points[i] = pt;
    });

    for (const auto& p : curve.points) {
        if (std::abs(*p.shift_error) > tol.tol_shift)
            fail(rec, "shift identity violated at c = " + num(p.parameter) + ": error " +
                          num(*p.shift_error));
        if (p.expected && *p.expected != Classification::Undecided &&
            p.classification != p.expected)
            fail(rec, "c = " + num(p.parameter) + ", lambda = " + num(p.lambda) + ": expected " +
                          std::string(to_string(*p.expected)) + ", simulation says " +
                          std::string(to_string(*p.classification)));
        if (p.decay_rate && *p.decay_rate > p.lambda + tol.tol_rate)
            fail(rec, "decay rate " + num(*p.decay_rate) + " above lambda + tol_rate at c = " +
                          num(p.parameter));
        check_monitors(rec, p);
    }
    curve.converged = true;
    rec.curves.push_back(std::move(curve));
    rec.wall_seconds = seconds_since(t0);
    return rec;
}

RunRecord run_monotonicity(const ExperimentSpec& spec, const RunOptions& options) {
    const auto t0 = Clock::now();
    RunRecord rec = start_record(spec, "sweep");
    require_sweep(spec, {SweepKind::Period, SweepKind::Diffusivity}, "sweep");
    const Landscape r = make_preset(spec.landscape);
    const auto& tol = spec.tolerances;
    const bool period = spec.sweep.kind == SweepKind::Period;

    PeriodGridPolicy policy;
    policy.base_space_points = spec.grid.space_points;
    policy.pheno = resolved_pheno(spec);
    policy.diffusivity = spec.grid.diffusivity;
    policy.scaling = spec.grid.node_scaling;

    const auto& values = spec.sweep.values;
    CurveResult curve;
    curve.label = period ? "lambda(L)" : "lambda_d";
    curve.points.resize(values.size());
    parallel_for(values.size(), options.threads, [&](std::size_t i) {
        const auto tp = Clock::now();
        PointResult pt;
        if (period) {
            const auto p = lambda_of_period(r, values[i], policy);
            pt = make_point(p.parameter, p.lambda, p.residual, p.iterations, p.nodes);
        } else {
            const auto dl = lambda_of_diffusivity(r, values[i], policy);
            pt = make_point(values[i], dl.direct.lambda, dl.direct.residual, dl.direct.iterations,
                  dl.direct.nodes);
            pt.lambda_scaled = dl.scaled.lambda;
        }
        pt.wall_seconds = seconds_since(tp);
        curve.points[i] = pt;
    });

    for (std::size_t i = 1; i < curve.points.size(); ++i) {
        const double prev = curve.points[i - 1].lambda, cur = curve.points[i].lambda;
        const bool bad = period ? cur < prev - tol.eps_mono : cur > prev + tol.eps_mono;
        if (bad) {
            curve.monotone = false;
            fail(rec, std::string(period ? "lambda(L) decreased" : "lambda_d increased") +
                          " between " + num(curve.points[i - 1].parameter) + " and " +
                          num(curve.points[i].parameter) + ": " + num(prev) + " -> " + num(cur));
        }
    }
    if (!period)
        for (const auto& p : curve.points) {
            const double res = std::abs(p.lambda - *p.lambda_scaled);
            if (res > tol.tol_scaling)
                fail(rec, "scaling identity residual " + num(res) + " at d = " + num(p.parameter));
        }
    curve.converged = true;
    rec.curves.push_back(std::move(curve));
    rec.wall_seconds = seconds_since(t0);
    return rec;
}

RunRecord run_truncation_study(const ExperimentSpec& spec, const RunOptions& options) {
    const auto t0 = Clock::now();
    RunRecord rec = start_record(spec, "truncation");
    require_sweep(spec, {SweepKind::Radius}, "truncation");
    if (spec.grid.truncation_kinds.empty())
        throw InvalidArgument("truncation study needs at least one problem kind");
    const Landscape r = make_preset(spec.landscape);
    const auto& tol = spec.tolerances;
    const double h = spec.grid.spacing;
    const auto& radii = spec.sweep.values;

    TruncationPolicy policy;
    policy.spacing = h;
    policy.pheno_box = resolved_pheno(spec);
    policy.diffusivity = spec.grid.diffusivity;
    policy.tol_seq = tol.tol_seq;
    policy.eps_mono = tol.eps_mono;

    // Reference grids: periodic cell at spacing h; the phenotype box is the
    // policy box for Mixed and [-R_max, R_max] for the phenotype windows.
    auto cell_points = [&](double L) {
        const double c = L / h;
        if (std::abs(c - std::round(c)) > 1e-9 * std::max(1.0, c))
            throw InvalidArgument("the landscape period is not a multiple of the spacing");
        return static_cast<int>(std::round(c));
    };
    const int points = cell_points(r.period().front());
    const double r_max = radii.back();
    std::vector<Axis> wide_box(r.pheno_dim(), Axis{2.0 * r_max, cell_points(2.0 * r_max) + 1,
                                                   Boundary::Neumann, -r_max});

    const auto& kinds = spec.grid.truncation_kinds;
    std::vector<TruncationCurve> curves(kinds.size());
    std::vector<SpectralPoint> refs(kinds.size());
    std::vector<double> seconds(kinds.size());
    parallel_for(kinds.size(), options.threads, [&](std::size_t i) {
        const auto tp = Clock::now();
        curves[i] = eigen_truncation_sequence(r, kinds[i], radii, policy);
        const auto& box = kinds[i] == ProblemKind::Mixed ? policy.pheno_box : wide_box;
        refs[i] = periodic_eigenvalue(r, points, box, spec.grid.diffusivity);
        seconds[i] = seconds_since(tp);
    });

    for (std::size_t i = 0; i < kinds.size(); ++i) {
        const auto& tc = curves[i];
        CurveResult curve;
        curve.label = std::string(to_string(kinds[i]));
        curve.monotone = tc.monotone;
        curve.converged = tc.converged;
        curve.reference_lambda = refs[i].lambda;
        curve.warnings = tc.warnings;
        for (std::size_t k = 0; k < tc.radii.size(); ++k) {
            PointResult pt = make_point(tc.radii[k], tc.lambdas[k], tc.residuals[k], tc.iterations[k],
                           tc.nodes[k]);
            pt.wall_seconds = seconds[i] / static_cast<double>(tc.radii.size());
            curve.points.push_back(pt);
            if (tc.lambdas[k] > refs[i].lambda + tol.eps_mono)
                fail(rec, curve.label + " at R = " + num(tc.radii[k]) + " exceeds the reference: " +
                              num(tc.lambdas[k]) + " > " + num(refs[i].lambda));
        }
        if (!tc.monotone) fail(rec, curve.label + " curve is not nondecreasing in R");
        rec.curves.push_back(std::move(curve));
    }
    rec.wall_seconds = seconds_since(t0);
    return rec;
}

}  // namespace fkpp
