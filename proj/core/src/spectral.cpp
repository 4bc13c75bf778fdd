#include "fkpp/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "fkpp/error.hpp"

namespace fkpp {

std::string_view to_string(ProblemKind kind) {
    switch (kind) {
        case ProblemKind::PeriodicNeumann: return "PeriodicNeumann";
        case ProblemKind::Mixed: return "Mixed";
        case ProblemKind::DirichletBall: return "DirichletBall";
        case ProblemKind::PeriodicDirichletTheta: return "PeriodicDirichletTheta";
    }
    return "?";
}

ProblemKind problem_kind_from_string(std::string_view name) {
    for (auto k : {ProblemKind::PeriodicNeumann, ProblemKind::Mixed, ProblemKind::DirichletBall,
                   ProblemKind::PeriodicDirichletTheta})
        if (to_string(k) == name) return k;
    throw InvalidArgument("unknown problem kind '" + std::string(name) + "'");
}

EigenResult principal_eigenpair(const LinearOperator& op, double sup_r,
                                const EigenOptions& options, ProblemKind kind) {
    const std::size_t n = op.dim();
    const double max_r = op.max_r();
    if (!std::isfinite(sup_r) || sup_r < max_r - 1e-12 * std::max(1.0, std::abs(max_r)))
        throw InvalidArgument("sup_r = " + std::to_string(sup_r) +
                              " is below the largest fitness value " + std::to_string(max_r));

    const double mu = sup_r + 1.0;
    auto shifted = [&](std::span<const double> v, std::span<double> out) {
        op.apply(v, out);
        for (std::size_t i = 0; i < n; ++i) out[i] = mu * v[i] - out[i];
    };

    std::vector<double> x(n, 1.0 / std::sqrt(static_cast<double>(n)));
    std::vector<double> y(n), sx(n);
    op.apply(x, sx);
    double lambda = dot(x, sx);

    EigenResult res;
    res.problem_kind = kind;
    double best_residual = std::numeric_limits<double>::infinity();
    long since_improvement = 0;

    for (long it = 1; it <= options.max_iterations; ++it) {
        const double guess = 1.0 / (mu - lambda);
        for (std::size_t i = 0; i < n; ++i) y[i] = x[i] * guess;
        const auto cg = conjugate_gradient(shifted, x, y, options.cg_tolerance,
                                           options.max_cg_iterations);
        res.cg_iterations += cg.iterations;
        if (!cg.converged)
            throw SolverError("conjugate gradient did not converge in the shift-invert solve "
                              "(relative residual " + std::to_string(cg.relative_residual) + ")",
                              cg.iterations);

        const double ny = norm2(y);
        for (std::size_t i = 0; i < n; ++i) x[i] = y[i] / ny;
        op.apply(x, sx);
        const double lambda_new = dot(x, sx);
        double r2 = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double e = sx[i] - lambda_new * x[i];
            r2 += e * e;
        }
        const double residual = std::sqrt(r2);
        const double change = std::abs(lambda_new - lambda);
        lambda = lambda_new;
        res.iterations = it;
        res.residual = residual;

        const double scale = std::abs(lambda) + 1.0;
        if (change < options.eigenvalue_tolerance * scale &&
            residual <= options.residual_tolerance * scale)
            break;

        if (residual < 0.5 * best_residual) {
            best_residual = residual;
            since_improvement = 0;
        } else if (++since_improvement > 2000) {
            throw SolverError("power iteration stagnated with residual " +
                                  std::to_string(residual),
                              it);
        }
        if (it == options.max_iterations)
            throw SolverError("power iteration did not converge (residual " +
                                  std::to_string(residual) + ")",
                              it);
    }

    double min_entry = std::numeric_limits<double>::infinity();
    for (double v : x) min_entry = std::min(min_entry, v);
    if (!(min_entry > 0.0))
        throw SolverError("principal eigenvector has a non-positive entry (" +
                              std::to_string(min_entry) + "); operator is not irreducible",
                          res.iterations);

    res.lambda = lambda;
    res.phi = std::move(x);
    return res;
}

double rayleigh_quotient(std::span<const double> phi, const LinearOperator& op) {
    const double nn = dot(phi, phi);
    if (!(nn > 0.0)) throw InvalidArgument("Rayleigh quotient of the zero vector");
    std::vector<double> a(phi.size());
    op.apply(phi, a);
    return dot(a, phi) / nn;
}

std::vector<double> nodal_eigenfunction(const LinearOperator& op, const EigenResult& result) {
    auto u = op.from_symmetric(result.phi);
    const double m = norm_inf(u);
    for (double& v : u) v /= m;
    return u;
}

// ---------------------------------------------------------------------------

namespace {

double effective_sup(const Landscape& r, std::span<const double> samples) {
    double m = r.sup_r();
    for (double v : samples) m = std::max(m, v);
    return m;
}

int cells_per_length(double length, double h) {
    const double c = length / h;
    const double rc = std::round(c);
    if (std::abs(c - rc) > 1e-9 * std::max(1.0, c))
        throw InvalidArgument("cell length " + std::to_string(length) +
                              " is not a multiple of the spacing " + std::to_string(h));
    return static_cast<int>(rc);
}

SpectralPoint solve_point(const Landscape& r, const Grid& grid, double d, double parameter,
                          const EigenOptions& options, ProblemKind kind) {
    const auto samples = sample_on_grid(r, grid);
    const auto op = assemble_operator(grid, samples, d);
    const auto eig = principal_eigenpair(op, effective_sup(r, samples), options, kind);
    return {parameter, eig.lambda, eig.residual, eig.iterations, grid.total_nodes()};
}

}  // namespace

Grid truncation_grid(const Landscape& r, ProblemKind kind, double radius,
                     const TruncationPolicy& policy) {
    const double h = policy.spacing;
    std::vector<Axis> space, pheno;
    const bool periodic_x =
        kind == ProblemKind::PeriodicNeumann || kind == ProblemKind::PeriodicDirichletTheta;
    for (std::size_t k = 0; k < r.space_dim(); ++k) {
        if (periodic_x) {
            const double L = r.period()[k];
            space.push_back({L, cells_per_length(L, h), Boundary::Periodic, 0.0});
        } else {
            space.push_back(dirichlet_window(radius, h));
        }
    }
    const bool box_theta = kind == ProblemKind::PeriodicNeumann || kind == ProblemKind::Mixed;
    if (box_theta) {
        if (policy.pheno_box.size() != r.pheno_dim())
            throw InvalidArgument("truncation policy needs one phenotype box axis per phenotype "
                                  "dimension");
        pheno = policy.pheno_box;
    } else {
        for (std::size_t k = 0; k < r.pheno_dim(); ++k) pheno.push_back(dirichlet_window(radius, h));
    }
    return build_grid(std::move(space), std::move(pheno));
}

TruncationCurve eigen_truncation_sequence(const Landscape& r, ProblemKind kind,
                                          std::span<const double> radii,
                                          const TruncationPolicy& policy) {
    if (radii.empty()) throw InvalidArgument("truncation sequence needs at least one radius");
    for (std::size_t i = 1; i < radii.size(); ++i)
        if (!(radii[i] > radii[i - 1]))
            throw InvalidArgument("truncation radii must be strictly increasing");
    if (kind == ProblemKind::PeriodicNeumann)
        throw InvalidArgument("PeriodicNeumann is the reference problem, not a truncation");

    TruncationCurve curve;
    curve.kind = kind;
    for (double R : radii) {
        const Grid g = truncation_grid(r, kind, R, policy);
        const auto p = solve_point(r, g, policy.diffusivity, R, policy.eigen, kind);
        if (!curve.lambdas.empty() && p.lambda < curve.lambdas.back() - policy.eps_mono) {
            curve.monotone = false;
            curve.warnings.push_back("lambda decreased from " + std::to_string(curve.lambdas.back()) +
                                     " to " + std::to_string(p.lambda) + " at R = " +
                                     std::to_string(R) + " (discretisation effect)");
        }
        curve.radii.push_back(R);
        curve.lambdas.push_back(p.lambda);
        curve.residuals.push_back(p.residual);
        curve.iterations.push_back(p.iterations);
        curve.nodes.push_back(p.nodes);
    }
    const auto& l = curve.lambdas;
    curve.limit_estimate = l.back();
    curve.converged = l.size() >= 2 && std::abs(l.back() - l[l.size() - 2]) < policy.tol_seq;
    if (l.size() >= 3) {
        const double a = l[l.size() - 3], b = l[l.size() - 2], c = l.back();
        const double denom = (c - b) - (b - a);
        if (std::abs(denom) > 1e-14) curve.aitken_estimate = c - (c - b) * (c - b) / denom;
    }
    return curve;
}

Grid periodic_cell_grid(const Landscape& r, int space_points, const std::vector<Axis>& pheno) {
    std::vector<Axis> space;
    for (double L : r.period()) space.push_back({L, space_points, Boundary::Periodic, 0.0});
    return build_grid(std::move(space), pheno);
}

SpectralPoint periodic_eigenvalue(const Landscape& r, int space_points,
                                  const std::vector<Axis>& pheno, double d,
                                  const EigenOptions& options) {
    const Grid g = periodic_cell_grid(r, space_points, pheno);
    return solve_point(r, g, d, 1.0, options, ProblemKind::PeriodicNeumann);
}

SpectralPoint lambda_of_period(const Landscape& r, double L, const PeriodGridPolicy& policy) {
    const Landscape rl = rescale_period(r, L);
    const int points = policy.scaling == NodeScaling::ScaleWithPeriod
                           ? std::max(3, static_cast<int>(std::lround(policy.base_space_points * L)))
                           : policy.base_space_points;
    auto p = periodic_eigenvalue(rl, points, policy.pheno, policy.diffusivity, policy.eigen);
    p.parameter = L;
    return p;
}

DiffusivityLambda lambda_of_diffusivity(const Landscape& r, double d,
                                        const PeriodGridPolicy& policy) {
    if (!(d > 0.0)) throw InvalidArgument("diffusivity must be positive");
    DiffusivityLambda out;
    out.direct = periodic_eigenvalue(r, policy.base_space_points, policy.pheno, d, policy.eigen);
    out.direct.parameter = d;

    PeriodGridPolicy matched = policy;
    matched.scaling = NodeScaling::Fixed;
    matched.diffusivity = 1.0;
    out.scaled = lambda_of_period(r, 1.0 / std::sqrt(d), matched);
    out.scaled.parameter = d;
    return out;
}

}  // namespace fkpp
