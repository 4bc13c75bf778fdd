#pragma once

#include <functional>
#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fkpp/grid.hpp"
#include "fkpp/landscape.hpp"

namespace fkpp {

/// Running bound checks attached to a simulation.
struct BoundMonitors {
    double max_rho_sup = 0.0;        ///< max over the run of sup_x rho
    double apriori_A = 0.0;          ///< max(|rho(0)|_inf, r_bar)
    double worst_bound_ratio = 0.0;  ///< max over the run of sup rho / A
    long bound_violations = 0;
    long dt_halvings = 0;
    long coth_checks = 0;
    long coth_violations = 0;
    double coth_worst_ratio = 0.0;   ///< max of sup rho(t0 + tau) / coth bound
};

struct SimState {
    double t = 0.0;
    std::vector<double> u;    ///< density at every grid node (nodal values)
    std::vector<double> rho;  ///< phenotype integral at every spatial node
    double mass = 0.0;        ///< integral of u over the grid
    BoundMonitors monitors;
};

enum class InitialKind { ConstantPatch, GaussianBump, Custom };

std::string_view to_string(InitialKind kind);
InitialKind initial_kind_from_string(std::string_view name);

/// u0 description.
///   ConstantPatch  amplitude = 1 on [x_lo, x_hi]^N x [theta_lo, theta_hi]^P
///                  (bounds default to the whole grid), 0 elsewhere
///   GaussianBump   amplitude * exp(-|x - x0|^2 / (2 sx^2) - |theta - theta0|^2 / (2 st^2)),
///                  params amplitude = 1, x0 = 0.5, theta0 = 0, sigma_x = 0.15, sigma_theta = 0.25
///   Custom         `custom(x, theta)`
struct InitialDatum {
    InitialKind kind = InitialKind::ConstantPatch;
    std::map<std::string, double> params;
    FitnessFunction custom;

    bool operator==(const InitialDatum& o) const { return kind == o.kind && params == o.params; }
};

std::vector<double> make_initial(const InitialDatum& datum, const Grid& grid);

/// rho(x) = trapezoid integral of u(x, .) over the phenotype axes. Neumann end
/// nodes carry half weight; DirichletZero axes contribute their implicit zero
/// boundary values.
std::vector<double> compute_rho(std::span<const double> u, const Grid& grid);

/// Integral of u over the whole grid.
double total_mass(std::span<const double> u, const Grid& grid);

SimState make_state(const Grid& grid, std::vector<double> u, double t = 0.0);

enum class DiffusionScheme {
    /// Exact propagator exp(dt Lap), applied axis by axis. Unconditionally
    /// stable, exactly positivity preserving; Strang splitting is second order.
    Exponential,
    /// (I - dt Lap) u_new = u by conjugate gradient. First order in time.
    BackwardEuler,
};

struct StepOptions {
    DiffusionScheme scheme = DiffusionScheme::Exponential;
    double cg_tolerance = 1e-13;
};

/// Exact solution of the reaction substep du/dt = u (r - rho) over tau, where
/// rho is the phenotype integral of u itself. At every spatial node
///   u(tau) = u(0) e^{r tau} / (1 + sum_q w_q u_q(0) (e^{r_q tau} - 1) / r_q),
/// i.e. u <- u exp(tau (r - rho_avg)) with rho_avg the exact time average of
/// rho over the substep. The denominator is at least 1, so u stays nonnegative.
void react_exact(std::span<double> u, std::span<const double> r, const Grid& grid, double tau);

/// exp(tau * (d Lap_x + Lap_theta)) on nodal values, stored as one dense
/// matrix per axis. Entries are nonnegative by construction.
class HeatPropagator {
public:
    HeatPropagator(const Grid& grid, double diffusivity, double tau);

    void apply(std::span<double> u) const;
    double tau() const { return tau_; }

private:
    std::vector<std::size_t> extents_;
    std::vector<std::vector<double>> factors_;
    double tau_;
};

/// Dense exp(M) for an n x n row-major matrix with nonnegative off-diagonal
/// entries, by uniformisation and squaring; the result is entrywise >= 0.
std::vector<double> metzler_exponential(std::span<const double> m, std::size_t n);

/// Strang splitting: half reaction, full diffusion, half reaction.
class SplittingIntegrator {
public:
    /// `op` supplies the diffusion part (its r is ignored); `r` the fitness.
    SplittingIntegrator(const LinearOperator& op, std::vector<double> r, StepOptions options = {});

    SimState step(const SimState& state, double dt) const;
    std::span<const double> r() const { return r_; }
    double r_bar() const { return r_bar_; }
    const Grid& grid() const { return lap_.grid(); }

private:
    void diffuse(std::span<double> u, double dt) const;

    LinearOperator lap_;
    std::vector<double> r_;
    double r_bar_;
    StepOptions options_;
    mutable std::unique_ptr<HeatPropagator> propagator_;
};

/// One Strang step of size dt.
SimState step(const SimState& state, double dt, std::span<const double> r_values,
              const LinearOperator& op, const StepOptions& options = {});

/// max(|rho(0)|_inf, r_bar).
double apriori_ceiling(double rho0_sup, double r_bar);

/// True iff max(rho) <= A (1 + tol). Updates the running maxima in
/// state.monitors and counts a violation otherwise.
bool rho_apriori_bound(SimState& state, double A, double tol = 1e-6);

/// sqrt(H) coth(sqrt(H) tau + arcoth((rho_sup + sqrt(H)) / sqrt(H))): the
/// solution at time tau of V' = H - V^2, V(0) = rho_sup + sqrt(H).
double coth_bound(double H, double tau, double rho_sup);

struct CothMonitorOptions {
    double tau = 1.0;
    /// M: phenotype radius splitting the H estimate; infinity uses the whole grid.
    double theta_radius = std::numeric_limits<double>::infinity();
    double tolerance = 1e-6;
};

struct SimulationSetup {
    Grid grid;
    std::vector<double> r;
    double diffusivity = 1.0;
    double horizon = 1.0;
    /// Fixed step; 0 selects 0.1 / max(1, r_bar + A).
    double dt = 0.0;
    StepOptions step;
    double bound_tol = 1e-6;
    /// Retry a step with half the size when the a-priori bound trips.
    bool halve_on_bound_violation = true;
    std::optional<CothMonitorOptions> coth;
};

struct Trajectory {
    std::vector<double> times;
    std::vector<double> sup_rho;
    std::vector<double> sup_u;
    std::vector<double> mass;
    SimState final;
    double dt = 0.0;
    double r_bar = 0.0;
    double A = 0.0;
};

using StepObserver = std::function<void(const SimState&)>;

double default_dt(double r_bar, double A);

/// Integrates from u0 over [0, horizon], recording sup rho, sup u and mass
/// after every step. `observer`, if set, sees the initial state and every
/// accepted step.
Trajectory simulate(const SimulationSetup& setup, std::vector<double> u0,
                    const StepObserver& observer = {});

enum class Classification { Persist, Extinct, Undecided };

std::string_view to_string(Classification c);

struct ClassificationThresholds {
    double eps_ext = 1e-4;
    double eps_per = 1e-2;
    /// Fraction of the horizon, at the end, inspected by the classifier.
    double tail_fraction = 0.2;
};

/// Extinct when sup rho stays below eps_ext and is nonincreasing over the
/// tail window; Persist when its minimum over the window exceeds eps_per.
Classification classify(const Trajectory& traj, const ClassificationThresholds& thresholds = {});

struct LongTimeResult {
    Classification classification = Classification::Undecided;
    Trajectory trajectory;
};

LongTimeResult classify_long_time(const Landscape& r, const Grid& grid, const InitialDatum& u0,
                                  double horizon, const ClassificationThresholds& thresholds = {},
                                  double diffusivity = 1.0, double dt = 0.0);

/// Least-squares slope of log(sup u) against t over the second half of the
/// run. Values below 1e-300 are clipped.
double decay_rate_estimate(const Trajectory& traj);

}  // namespace fkpp
