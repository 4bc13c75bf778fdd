#pragma once

#include <span>
#include <vector>

#include "fkpp/dynamics.hpp"
#include "fkpp/grid.hpp"

namespace fkpp {

/// Fixed-point solver for the nonlocal problem, used as an oracle for the
/// splitting integrator. On each time slab the map w -> u^w is iterated,
/// where u^w solves the linear equation
///   du/dt = d Lap_x u + Lap_theta u + (r - rho[w]) u
/// with rho[w] frozen, by Crank-Nicolson.
struct PicardOptions {
    /// Largest inner Crank-Nicolson step; the actual step divides the slab evenly.
    double dt_inner = 1e-3;
    /// Slab length; 0 picks the largest tau with e^{r_bar tau} <= 2 and
    /// 2 A (e^{r_bar tau} - 1) / r_bar <= 1/2 (tau <= 1 / (4 A) when r_bar <= 0).
    double slab = 0.0;
    /// Stop when successive rho iterates differ by less than this in sup norm
    /// over all inner time levels and spatial nodes.
    double tolerance = 1e-10;
    int max_iterations = 100;
    /// When positive, run exactly this many iterations per slab and skip the
    /// convergence test.
    int fixed_iterations = 0;
    double cg_tolerance = 1e-14;
};

struct PicardSlab {
    double t0 = 0.0;
    double t1 = 0.0;
    int inner_steps = 0;
    /// sup |rho_{k+1} - rho_k| for every iteration k.
    std::vector<double> changes;
};

struct PicardResult {
    std::vector<double> times;    ///< every inner time level, starting at 0
    std::vector<double> sup_rho;  ///< sup_x rho at those levels
    SimState final;
    std::vector<PicardSlab> slabs;
};

/// Slab length chosen by the default rule for the given r_bar and A.
double picard_slab_length(double r_bar, double A);

/// Throws SolverError when an iteration diverges (change growing for three
/// consecutive iterations) or does not reach the tolerance within
/// max_iterations.
PicardResult picard_solve(const Grid& grid, std::span<const double> u0, double horizon,
                          std::span<const double> r_values, double diffusivity = 1.0,
                          const PicardOptions& options = {});

}  // namespace fkpp
