#include "fkpp/landscape.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <set>

#include "fkpp/error.hpp"

namespace fkpp {

namespace {

constexpr int kSupSamplesPerAxis = 64;

// Dense sampling of r over [0, period)^N x theta_window.
double estimate_sup(const FitnessFunction& eval, const std::vector<double>& period,
                    const std::vector<std::pair<double, double>>& window) {
    const std::size_t n = period.size();
    const std::size_t p = window.size();
    const std::size_t dims = n + p;
    std::vector<int> idx(dims, 0);
    std::vector<double> x(n), th(p);
    double best = -std::numeric_limits<double>::infinity();
    while (true) {
        for (std::size_t k = 0; k < n; ++k) x[k] = period[k] * idx[k] / kSupSamplesPerAxis;
        for (std::size_t k = 0; k < p; ++k) {
            const auto [lo, hi] = window[k];
            th[k] = lo + (hi - lo) * idx[n + k] / kSupSamplesPerAxis;
        }
        const double v = eval(x, th);
        if (!std::isfinite(v)) throw InvalidArgument("landscape is not finite on its sampling window");
        best = std::max(best, v);
        std::size_t k = 0;
        for (; k < dims; ++k) {
            const int limit = k < n ? kSupSamplesPerAxis - 1 : kSupSamplesPerAxis;
            if (++idx[k] <= limit) break;
            idx[k] = 0;
        }
        if (k == dims) break;
    }
    return best;
}

double param(const LandscapePreset& p, const std::string& key) {
    const auto it = p.params.find(key);
    if (it == p.params.end())
        throw InvalidArgument(std::string(to_string(p.kind)) + " preset requires parameter '" +
                              key + "'");
    if (!std::isfinite(it->second))
        throw InvalidArgument("parameter '" + key + "' must be finite");
    return it->second;
}

double param_or(const LandscapePreset& p, const std::string& key, double fallback) {
    return p.params.count(key) ? param(p, key) : fallback;
}

void check_keys(const LandscapePreset& p, std::set<std::string> allowed) {
    allowed.insert("theta_lo");
    allowed.insert("theta_hi");
    for (const auto& [k, v] : p.params)
        if (!allowed.count(k))
            throw InvalidArgument("unknown parameter '" + k + "' for " +
                                  std::string(to_string(p.kind)) + " preset");
}

double sum_sq(std::span<const double> v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return s;
}

}  // namespace

double cell_fraction(double x, double period) {
    constexpr double snap = 1e-12;
    const double y = x / period;
    double f = y - std::floor(y);
    if (std::abs(f - 0.5) < snap) return 0.5;
    if (f < snap || f > 1.0 - snap) return 0.0;
    return f;
}

Landscape::Landscape(FitnessFunction eval, std::vector<double> period, std::size_t pheno_dim,
                     std::vector<std::pair<double, double>> theta_window,
                     std::optional<double> tail_radius)
    : eval_(std::move(eval)),
      period_(std::move(period)),
      pheno_dim_(pheno_dim),
      theta_window_(std::move(theta_window)),
      tail_radius_(tail_radius) {
    if (period_.empty() || period_.size() > kMaxDim || pheno_dim_ == 0 || pheno_dim_ > kMaxDim)
        throw InvalidArgument("landscape dimensions must be 1 or 2");
    if (theta_window_.size() != pheno_dim_)
        throw InvalidArgument("theta window must have one interval per phenotype axis");
    for (double L : period_)
        if (!(L > 0.0)) throw InvalidArgument("landscape period must be positive");
    for (const auto& [lo, hi] : theta_window_)
        if (!(lo < hi)) throw InvalidArgument("theta window must satisfy theta_lo < theta_hi");
    sup_r_ = estimate_sup(eval_, period_, theta_window_);
}

Landscape::Landscape(FitnessFunction eval, std::vector<double> period, std::size_t pheno_dim,
                     std::vector<std::pair<double, double>> theta_window,
                     std::optional<double> tail_radius, double sup_r)
    : eval_(std::move(eval)),
      period_(std::move(period)),
      pheno_dim_(pheno_dim),
      theta_window_(std::move(theta_window)),
      tail_radius_(tail_radius),
      sup_r_(sup_r) {}

std::string_view to_string(PresetKind kind) {
    switch (kind) {
        case PresetKind::Checkerboard: return "Checkerboard";
        case PresetKind::EnvGradient: return "EnvGradient";
        case PresetKind::ConfinedZone: return "ConfinedZone";
        case PresetKind::Constant: return "Constant";
        case PresetKind::Separable: return "Separable";
    }
    return "?";
}

PresetKind preset_kind_from_string(std::string_view name) {
    for (auto k : {PresetKind::Checkerboard, PresetKind::EnvGradient, PresetKind::ConfinedZone,
                   PresetKind::Constant, PresetKind::Separable})
        if (to_string(k) == name) return k;
    throw InvalidArgument("unknown landscape kind '" + std::string(name) + "'");
}

Landscape make_preset(const LandscapePreset& p) {
    const std::size_t n = p.space_dim;
    const std::size_t np = p.pheno_dim;
    if (n < 1 || n > kMaxDim || np < 1 || np > kMaxDim)
        throw InvalidArgument("landscape dimensions must be 1 or 2");
    const double lo = param_or(p, "theta_lo", -1.0);
    const double hi = param_or(p, "theta_hi", 1.0);
    if (!(lo < hi)) throw InvalidArgument("theta_lo must be below theta_hi");
    std::vector<std::pair<double, double>> window(np, {lo, hi});
    std::vector<double> period(n, 1.0);

    FitnessFunction f;
    std::optional<double> tail;
    switch (p.kind) {
        case PresetKind::Constant: {
            check_keys(p, {"c"});
            const double c = param(p, "c");
            f = [c](std::span<const double>, std::span<const double>) { return c; };
            if (c <= 0.0) tail = 0.0;
            break;
        }
        case PresetKind::Separable: {
            check_keys(p, {"a0", "a1", "b0", "b2"});
            const double a0 = param_or(p, "a0", 0.0), a1 = param_or(p, "a1", 0.0);
            const double b0 = param_or(p, "b0", 0.0), b2 = param_or(p, "b2", 0.0);
            if (b2 < 0.0) throw InvalidArgument("Separable preset requires b2 >= 0");
            f = [=](std::span<const double> x, std::span<const double> th) {
                double a = a0;
                for (double xk : x) a += a1 * std::cos(2.0 * std::numbers::pi * xk);
                return a + b0 - b2 * sum_sq(th);
            };
            const double top = a0 + std::abs(a1) * static_cast<double>(n) + b0;
            if (b2 > 0.0) tail = std::sqrt(std::max(0.0, top) / b2);
            else if (top <= 0.0) tail = 0.0;
            break;
        }
        case PresetKind::Checkerboard: {
            check_keys(p, {"r0", "c", "q"});
            const double r0 = param(p, "r0");
            const double c = param_or(p, "c", 0.0), q = param_or(p, "q", 0.0);
            if (q < 0.0) throw InvalidArgument("Checkerboard preset requires q >= 0");
            f = [=](std::span<const double> x, std::span<const double> th) {
                int parity = 0;
                for (double xk : x) parity += cell_fraction(xk, 1.0) < 0.5 ? 0 : 1;
                return (parity % 2 == 0 ? r0 : -r0) + c - q * sum_sq(th);
            };
            const double top = std::abs(r0) + c;
            if (q > 0.0) tail = std::sqrt(std::max(0.0, top) / q);
            else if (top <= 0.0) tail = 0.0;
            break;
        }
        case PresetKind::EnvGradient: {
            check_keys(p, {"B", "r0"});
            const double B = param(p, "B");
            const double r0 = param(p, "r0");
            if (!(B > 0.0)) throw InvalidArgument("EnvGradient preset requires B > 0");
            f = [=](std::span<const double> x, std::span<const double> th) {
                double s = 0.0;
                for (std::size_t k = 0; k < x.size(); ++k) {
                    double y = x[k] - B * th[std::min(k, th.size() - 1)];
                    y -= std::floor(y + 0.5);
                    s += y * y;
                }
                return r0 - s;
            };
            if (r0 <= 0.0) tail = 0.0;
            break;
        }
        case PresetKind::ConfinedZone: {
            check_keys(p, {"r0", "r1", "radius", "theta0"});
            const double r0 = param(p, "r0"), r1 = param(p, "r1");
            const double radius = param_or(p, "radius", 0.25);
            const double theta0 = param_or(p, "theta0", 0.0);
            if (!(radius > 0.0)) throw InvalidArgument("ConfinedZone preset requires radius > 0");
            f = [=](std::span<const double> x, std::span<const double> th) {
                double d2 = 0.0;
                for (double xk : x) {
                    const double dx = cell_fraction(xk, 1.0) - 0.5;
                    d2 += dx * dx;
                }
                for (double t : th) d2 += (t - theta0) * (t - theta0);
                return d2 <= radius * radius ? r0 : -r1;
            };
            if (r1 >= 0.0) tail = std::abs(theta0) + radius;
            break;
        }
    }
    return Landscape(std::move(f), std::move(period), np, std::move(window), tail);
}

Landscape rescale_period(const Landscape& r, double L) {
    if (!(L > 0.0) || !std::isfinite(L))
        throw InvalidArgument("period scale L must be positive, got " + std::to_string(L));
    auto inner = r.eval_;
    FitnessFunction f = [inner, L](std::span<const double> x, std::span<const double> th) {
        Point y;
        y.n = x.size();
        for (std::size_t k = 0; k < x.size(); ++k) y.v[k] = x[k] / L;
        return inner(y.span(), th);
    };
    std::vector<double> period = r.period_;
    for (double& p : period) p *= L;
    return Landscape(std::move(f), std::move(period), r.pheno_dim_, r.theta_window_,
                     r.tail_radius_, r.sup_r_);
}

Landscape shift_landscape(const Landscape& r, double c) {
    auto inner = r.eval();
    FitnessFunction f = [inner, c](std::span<const double> x, std::span<const double> th) {
        return inner(x, th) + c;
    };
    // r + c keeps r <= 0 on the tail only when c <= 0.
    std::optional<double> tail = c <= 0.0 ? r.tail_radius() : std::nullopt;
    return Landscape(std::move(f), r.period(), r.pheno_dim(), r.theta_window(), tail);
}

std::vector<double> sample_on_grid(const Landscape& r, const Grid& grid,
                                   std::span<const double> offset) {
    if (grid.space_dim() != r.space_dim() || grid.pheno_dim() != r.pheno_dim())
        throw InvalidArgument("grid and landscape dimensions differ");
    if (!offset.empty() && offset.size() != grid.space_dim())
        throw InvalidArgument("offset must have one entry per space axis");
    for (std::size_t k = 0; k < grid.space_dim(); ++k) {
        const auto& a = grid.space_axes()[k];
        if (a.bc != Boundary::Periodic) continue;
        const double L = r.period()[k];
        if (std::abs(a.length - L) > 1e-12 * std::max(1.0, L))
            throw InvalidArgument("periodic axis " + std::to_string(k) + " has length " +
                                  std::to_string(a.length) + " but the landscape period is " +
                                  std::to_string(L));
    }
    std::vector<double> out(grid.total_nodes());
    for (std::size_t s = 0; s < grid.space_nodes(); ++s) {
        Point x = grid.space_point(s);
        for (std::size_t k = 0; k < offset.size(); ++k) x.v[k] += offset[k];
        for (std::size_t q = 0; q < grid.pheno_nodes(); ++q) {
            const Point th = grid.pheno_point(q);
            const double v = r(x.span(), th.span());
            if (!std::isfinite(v))
                throw InvalidArgument("landscape is not finite at grid node " +
                                      std::to_string(grid.index(s, q)));
            out[grid.index(s, q)] = v;
        }
    }
    return out;
}

}  // namespace fkpp
