#pragma once

#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "fkpp/grid.hpp"

namespace fkpp {

/// r(x, theta): x has the landscape's space dimension, theta its phenotype dimension.
using FitnessFunction = std::function<double(std::span<const double>, std::span<const double>)>;

/// A fitness landscape r(x, theta), periodic in x.
///
/// `sup_r` is a dense-sampling estimate of the supremum over one spatial cell
/// times the phenotype sampling window. `tail_radius`, when set, records that
/// r <= 0 whenever |theta| > tail_radius.
class Landscape {
public:
    Landscape(FitnessFunction eval, std::vector<double> period, std::size_t pheno_dim,
              std::vector<std::pair<double, double>> theta_window,
              std::optional<double> tail_radius = std::nullopt);

    double operator()(std::span<const double> x, std::span<const double> theta) const {
        return eval_(x, theta);
    }
    const FitnessFunction& eval() const { return eval_; }
    const std::vector<double>& period() const { return period_; }
    std::size_t space_dim() const { return period_.size(); }
    std::size_t pheno_dim() const { return pheno_dim_; }
    const std::vector<std::pair<double, double>>& theta_window() const { return theta_window_; }
    double sup_r() const { return sup_r_; }
    std::optional<double> tail_radius() const { return tail_radius_; }

private:
    Landscape(FitnessFunction eval, std::vector<double> period, std::size_t pheno_dim,
              std::vector<std::pair<double, double>> theta_window,
              std::optional<double> tail_radius, double sup_r);

    friend Landscape rescale_period(const Landscape& r, double L);

    FitnessFunction eval_;
    std::vector<double> period_;
    std::size_t pheno_dim_;
    std::vector<std::pair<double, double>> theta_window_;
    std::optional<double> tail_radius_;
    double sup_r_ = 0.0;
};

enum class PresetKind { Checkerboard, EnvGradient, ConfinedZone, Constant, Separable };

std::string_view to_string(PresetKind kind);
PresetKind preset_kind_from_string(std::string_view name);

/// Named landscape family plus its parameters.
///
///   Constant      c                                  r = c
///   Separable     a0, a1, b0, b2                     r = a0 + a1 sum_k cos(2 pi x_k) + b0 - b2 |theta|^2
///   Checkerboard  r0, c = 0, q = 0                   r = +-r0 on alternating half cells, + c - q |theta|^2
///   EnvGradient   B > 0, r0                          r = r0 - |y|^2, y_k = x_k - B theta_k wrapped to [-1/2, 1/2)
///   ConfinedZone  r0, r1, radius = 0.25, theta0 = 0  r0 inside the ball |(x - 1/2, theta - theta0)| <= radius, -r1 outside
///
/// Every kind also accepts theta_lo/theta_hi (default -1/1), the phenotype
/// window used to estimate sup_r.
struct LandscapePreset {
    PresetKind kind = PresetKind::Constant;
    std::map<std::string, double> params;
    std::size_t space_dim = 1;
    std::size_t pheno_dim = 1;

    bool operator==(const LandscapePreset&) const = default;
};

Landscape make_preset(const LandscapePreset& preset);

/// r^L(x, theta) = r(x / L, theta); the period is multiplied by L.
Landscape rescale_period(const Landscape& r, double L);

/// r + c, with sup_r shifted accordingly.
Landscape shift_landscape(const Landscape& r, double c);

/// r evaluated at every grid node (node ordering of the grid). `offset`, if
/// non-empty, is added to the spatial coordinates. Periodic space axes must
/// span exactly one landscape period.
std::vector<double> sample_on_grid(const Landscape& r, const Grid& grid,
                                   std::span<const double> offset = {});

/// Fractional position of x inside a cell of length `period`, in [0, 1).
/// Values within 1e-12 of a half-cell or cell boundary snap to that boundary
/// so that nodes placed on it classify the same way at every resolution.
double cell_fraction(double x, double period);

}  // namespace fkpp
