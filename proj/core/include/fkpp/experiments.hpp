#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fkpp/dynamics.hpp"
#include "fkpp/landscape.hpp"
#include "fkpp/spectral.hpp"

namespace fkpp {

enum class SweepKind { None, Period, Diffusivity, Radius, Shift };

std::string_view to_string(SweepKind kind);
SweepKind sweep_kind_from_string(std::string_view name);

struct Tolerances {
    double eps_mono = 1e-8;
    double tol_scaling = 1e-6;
    double tol_seq = 1e-4;
    double tol_shift = 1e-10;  ///< |lambda(r + c) - lambda(r) - c|
    double delta = 0.05;       ///< margin band around lambda = 0
    double eps_ext = 1e-4;
    double eps_per = 1e-2;
    double tail_fraction = 0.2;
    double bound_tol = 1e-6;
    double tol_rate = 0.05;

    bool operator==(const Tolerances&) const = default;
};

struct GridPolicy {
    /// Nodes per space axis on the unit cell.
    int space_points = 32;
    /// Phenotype axes; empty means one Neumann axis per phenotype dimension
    /// over [theta_lo, theta_hi] of the landscape with `pheno_points` nodes.
    std::vector<Axis> pheno;
    int pheno_points = 33;
    double diffusivity = 1.0;
    /// Spacing shared by all truncation windows.
    double spacing = 1.0 / 16.0;
    std::vector<ProblemKind> truncation_kinds{ProblemKind::Mixed, ProblemKind::DirichletBall,
                                              ProblemKind::PeriodicDirichletTheta};
    NodeScaling node_scaling = NodeScaling::ScaleWithPeriod;

    bool operator==(const GridPolicy&) const = default;
};

struct SweepSpec {
    SweepKind kind = SweepKind::None;
    std::vector<double> values;
    /// Shift sweeps only: values are offsets from c* = -lambda(r).
    bool relative = false;

    bool operator==(const SweepSpec&) const = default;
};

struct ExperimentSpec {
    std::string name;
    LandscapePreset landscape;
    GridPolicy grid;
    SweepSpec sweep;
    bool simulate = false;
    double horizon = 0.0;
    double dt = 0.0;  ///< 0 selects the default policy
    InitialDatum initial;
    double coth_tau = 1.0;  ///< 0 disables the coth monitor
    Tolerances tolerances;

    bool operator==(const ExperimentSpec&) const = default;
};

/// Throws InvalidArgument when the spec is inconsistent (empty name, sweep
/// values not strictly increasing, simulate without a positive horizon, ...).
void validate(const ExperimentSpec& spec);

/// Phenotype axes after applying the GridPolicy defaults.
std::vector<Axis> resolved_pheno(const ExperimentSpec& spec);

/// Canonical text of the spec and its FNV-1a 64-bit hash (16 hex digits).
std::string canonical_text(const ExperimentSpec& spec);
std::string spec_hash(const ExperimentSpec& spec);

struct PointResult {
    double parameter = 0.0;
    double lambda = 0.0;
    double residual = 0.0;
    long iterations = 0;
    std::size_t nodes = 0;
    std::optional<double> lambda_scaled;     ///< d-sweeps: lambda[r^(d^-1/2)]
    std::optional<double> shift_error;       ///< dichotomy: lambda(r + c) - lambda(r) - c
    std::optional<Classification> classification;
    std::optional<Classification> expected;
    std::optional<double> decay_rate;
    std::optional<BoundMonitors> monitors;
    double wall_seconds = 0.0;
};

struct CurveResult {
    std::string label;
    std::vector<PointResult> points;
    bool monotone = true;
    bool converged = false;
    std::optional<double> reference_lambda;
    std::vector<std::string> warnings;
};

struct RunRecord {
    std::string experiment;
    std::string runner;
    std::string spec_hash;
    std::string version;
    std::string canonical_spec;
    std::vector<CurveResult> curves;
    bool passed = true;
    std::vector<std::string> failures;
    double wall_seconds = 0.0;
};

std::string_view software_version();

struct RunOptions {
    unsigned threads = 1;
    /// Observer for `run_simulation` (the single trajectory).
    StepObserver observer;
};

/// Landscape of the spec, grid of its periodic cell and the principal
/// eigenvalue there.
RunRecord run_eigen(const ExperimentSpec& spec, const RunOptions& options = {});

/// One simulation of the unshifted landscape, classified.
RunRecord run_simulation(const ExperimentSpec& spec, const RunOptions& options = {});

/// Shift sweep: lambda(r + c) with the shift cross-check, and, when
/// spec.simulate, a long-time simulation per point whose classification must
/// agree with the sign of lambda outside the band |lambda| < delta.
RunRecord run_dichotomy(const ExperimentSpec& spec, const RunOptions& options = {});

/// Period sweep (nondecreasing) or diffusivity sweep (nonincreasing, plus the
/// scaling identity residuals).
RunRecord run_monotonicity(const ExperimentSpec& spec, const RunOptions& options = {});

/// Truncation curves for every kind in spec.grid.truncation_kinds, each
/// compared with a periodic x Neumann reference whose phenotype box contains
/// every window.
RunRecord run_truncation_study(const ExperimentSpec& spec, const RunOptions& options = {});

/// -lambda(r) on the spec's periodic cell grid: the shift at which lambda(r + c) = 0.
double critical_shift(const ExperimentSpec& spec);

}  // namespace fkpp
