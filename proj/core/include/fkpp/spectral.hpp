#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fkpp/grid.hpp"
#include "fkpp/landscape.hpp"

namespace fkpp {

/// Which boundary-value problem an eigenpair belongs to.
///   PeriodicNeumann        periodic cell in x, Neumann box in theta
///   Mixed                  Dirichlet window (-R,R)^N in x, Neumann box in theta
///   DirichletBall          Dirichlet window (-R,R)^(N+P) in (x, theta)
///   PeriodicDirichletTheta periodic cell in x, Dirichlet window (-R,R)^P in theta
enum class ProblemKind { PeriodicNeumann, Mixed, DirichletBall, PeriodicDirichletTheta };

std::string_view to_string(ProblemKind kind);
ProblemKind problem_kind_from_string(std::string_view name);

struct EigenOptions {
    double cg_tolerance = 1e-12;
    double eigenvalue_tolerance = 1e-12;
    double residual_tolerance = 1e-10;
    long max_iterations = 200000;
    long max_cg_iterations = 100000;
};

struct EigenResult {
    double lambda = 0.0;
    /// Principal eigenvector in symmetric coordinates, unit 2-norm, positive.
    std::vector<double> phi;
    double residual = 0.0;
    long iterations = 0;
    long cg_iterations = 0;
    ProblemKind problem_kind = ProblemKind::PeriodicNeumann;
};

/// Largest eigenvalue of the assembled operator and its positive eigenvector.
///
/// Shift-invert power iteration on (mu I - S)^{-1} with mu = sup_r + 1, which
/// is SPD because every eigenvalue of S is at most max(r) <= sup_r. Inner
/// solves use conjugate gradient. The iteration starts from the all-ones
/// vector, so the result is deterministic.
///
/// Throws InvalidArgument when sup_r < max(r), SolverError when CG or the
/// outer iteration does not converge, or when the eigenvector is not positive.
EigenResult principal_eigenpair(const LinearOperator& op, double sup_r,
                                const EigenOptions& options = {},
                                ProblemKind kind = ProblemKind::PeriodicNeumann);

/// <S phi, phi> / <phi, phi> in symmetric coordinates.
double rayleigh_quotient(std::span<const double> phi, const LinearOperator& op);

/// Eigenvector converted to nodal values and scaled to max 1.
std::vector<double> nodal_eigenfunction(const LinearOperator& op, const EigenResult& result);

// ---------------------------------------------------------------------------
// Truncation sequences

struct TruncationPolicy {
    /// Grid spacing shared by every window; 2R/h must be an integer for each radius.
    double spacing = 1.0 / 16.0;
    /// Phenotype axes used by the Mixed problem (Neumann box).
    std::vector<Axis> pheno_box;
    double diffusivity = 1.0;
    double tol_seq = 1e-4;
    double eps_mono = 1e-8;
    EigenOptions eigen;
};

struct TruncationCurve {
    ProblemKind kind = ProblemKind::Mixed;
    std::vector<double> radii;
    std::vector<double> lambdas;
    std::vector<double> residuals;
    std::vector<long> iterations;
    std::vector<std::size_t> nodes;
    bool converged = false;
    bool monotone = true;
    double limit_estimate = 0.0;
    /// Aitken extrapolation of the last three values, when defined.
    std::optional<double> aitken_estimate;
    std::vector<std::string> warnings;
};

/// Grid for the truncated problem `kind` at radius R.
Grid truncation_grid(const Landscape& r, ProblemKind kind, double radius,
                     const TruncationPolicy& policy);

/// Principal eigenvalues of the truncated problems for increasing radii at a
/// fixed spacing. Decreases larger than eps_mono are reported in `warnings`
/// and clear `monotone`.
TruncationCurve eigen_truncation_sequence(const Landscape& r, ProblemKind kind,
                                          std::span<const double> radii,
                                          const TruncationPolicy& policy);

// ---------------------------------------------------------------------------
// Period and diffusivity maps

enum class NodeScaling {
    /// round(base_space_points * L) nodes per space axis: spacing stays fixed.
    ScaleWithPeriod,
    /// base_space_points nodes per space axis regardless of L.
    Fixed,
};

struct PeriodGridPolicy {
    int base_space_points = 32;
    std::vector<Axis> pheno;
    double diffusivity = 1.0;
    NodeScaling scaling = NodeScaling::ScaleWithPeriod;
    EigenOptions eigen;
};

struct SpectralPoint {
    double parameter = 0.0;
    double lambda = 0.0;
    double residual = 0.0;
    long iterations = 0;
    std::size_t nodes = 0;
};

/// Grid of the periodic x Neumann problem on the cell of r (the period of r
/// sets the cell length).
Grid periodic_cell_grid(const Landscape& r, int space_points, const std::vector<Axis>& pheno);

/// Principal eigenvalue of the periodic x Neumann problem for an already
/// periodic landscape (cell = r.period()).
SpectralPoint periodic_eigenvalue(const Landscape& r, int space_points,
                                  const std::vector<Axis>& pheno, double d,
                                  const EigenOptions& options = {});

/// lambda[r^L] on the cell [0, L]^N.
SpectralPoint lambda_of_period(const Landscape& r, double L, const PeriodGridPolicy& policy);

struct DiffusivityLambda {
    SpectralPoint direct;  ///< d * Lap_x assembled on the unit cell
    SpectralPoint scaled;  ///< lambda[r^(d^-1/2)] with the same node count
    double residual() const { return std::abs(direct.lambda - scaled.lambda); }
};

/// lambda_d[r] computed directly and through lambda[r^(d^-1/2)] on a matched
/// grid (same node count per cell). policy.diffusivity is ignored.
DiffusivityLambda lambda_of_diffusivity(const Landscape& r, double d,
                                        const PeriodGridPolicy& policy);

}  // namespace fkpp
