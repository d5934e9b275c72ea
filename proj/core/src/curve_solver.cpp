#include "fpprace/curve_solver.hpp"

#include <algorithm>
#include <cmath>

#include "fpprace/errors.hpp"

namespace fpprace {

namespace {

/// One Gauss-Seidel sweep of the discrete map
///   Phi(G)_i = 1 - F_i + sum_{j<i} dF_j (phi_{i-j} + phi_{i-j-1}) / 2
/// updating G and the cached phi values in place, left to right. Returns the
/// largest single-point change. `upper` selects which end of the pgf bracket
/// feeds the quadrature.
double sweep(std::vector<double>& g, std::vector<double>& phi,
             const std::vector<double>& one_minus_f, const std::vector<double>& df,
             const size_biased_law& sb, bool upper) {
    const std::size_t m = g.size();
    double max_change = 0.0;
    for (std::size_t i = 1; i < m; ++i) {
        double acc = 0.0;
        for (std::size_t j = 0; j < i; ++j)
            acc += df[j] * 0.5 * (phi[i - j] + phi[i - j - 1]);
        double next = one_minus_f[i] + acc;
        if (next > 1.0) next = 1.0;
        const double change = next - g[i];
        if (change == 0.0) continue;
        max_change = std::max(max_change, std::abs(change));
        g[i] = next;
        const bracket b = sb.pgf(next);
        phi[i] = upper ? b.hi : b.lo;
    }
    return max_change;
}

/// Deterministic edge weight c: G(t) = 1 below c and phi(G(t - c)) above,
/// realized by exact index shifting on an aligned grid.
void solve_deterministic(std::vector<double>& g, std::vector<double>& phi, double c,
                         double h, const size_biased_law& sb, bool upper) {
    const double ratio = c / h;
    const auto shift = static_cast<std::size_t>(std::llround(ratio));
    if (std::abs(ratio - static_cast<double>(shift)) > 1e-9 || shift == 0)
        throw config_error("deterministic weight value must be a positive multiple "
                           "of the grid step");
    for (std::size_t i = 0; i < g.size(); ++i) {
        if (i < shift) {
            g[i] = 1.0;
        } else {
            const bracket b = sb.pgf(g[i - shift]);
            g[i] = upper ? b.hi : b.lo;
        }
        const bracket pb = sb.pgf(g[i]);
        phi[i] = upper ? pb.hi : pb.lo;
    }
}

std::vector<double> spread_from(const std::vector<double>& phi,
                                const std::vector<double>& one_minus_f,
                                const std::vector<double>& df) {
    const std::size_t m = phi.size();
    std::vector<double> e(m);
    e[0] = 1.0;
    for (std::size_t i = 1; i < m; ++i) {
        double acc = 0.0;
        for (std::size_t j = 0; j < i; ++j)
            acc += df[j] * 0.5 * (phi[i - j] * phi[i - j] + phi[i - j - 1] * phi[i - j - 1]);
        e[i] = std::min(1.0, one_minus_f[i] + acc);
    }
    return e;
}

} // namespace

survival_grid solve_g(const weight_law& law, const size_biased_law& sb, double h,
                      double t_max, std::uint32_t max_sweeps) {
    if (!(h > 0.0) || h > 0.01 + 1e-15)
        throw config_error("solve_g: grid step h must lie in (0, 0.01]");
    if (!(t_max > 0.0)) throw config_error("solve_g: t_max must be positive");

    survival_grid grid(law, sb);
    grid.h_ = h;
    grid.t_max_ = t_max;
    const auto m = static_cast<std::size_t>(std::ceil(t_max / h - 1e-12)) + 1;

    std::vector<double> one_minus_f(m), df(m - 1);
    for (std::size_t i = 0; i < m; ++i)
        one_minus_f[i] = 1.0 - law.cdf(static_cast<double>(i) * h);
    for (std::size_t j = 0; j + 1 < m; ++j) df[j] = one_minus_f[j] - one_minus_f[j + 1];

    for (const bool upper : {false, true}) {
        std::vector<double> g(m), phi(m);
        if (!law.has_density()) {
            solve_deterministic(g, phi, law.param1(), h, sb, upper);
            grid.sweeps_ = 1;
        } else {
            // start from the subsolution 1 - F_X = Phi(0) and iterate upward
            for (std::size_t i = 0; i < m; ++i) {
                g[i] = one_minus_f[i];
                const bracket b = sb.pgf(g[i]);
                phi[i] = upper ? b.hi : b.lo;
            }
            g[0] = 1.0;
            phi[0] = 1.0;
            std::uint32_t it = 0;
            double change = 0.0;
            double floor_seen = 2.0;
            for (; it < max_sweeps; ++it) {
                const std::vector<double> before = g;
                change = sweep(g, phi, one_minus_f, df, sb, upper);
                for (std::size_t i = 0; i < m; ++i)
                    floor_seen = std::min(floor_seen, g[i] - before[i]);
                if (change < 1e-9) break;
            }
            if (change >= 1e-9)
                throw solver_error("solve_g: no convergence within sweep cap", change);
            if (floor_seen < -1e-12)
                throw solver_error("solve_g: iteration lost monotonicity", -floor_seen);
            grid.sweeps_ = it + 1;
        }
        auto e = spread_from(phi, one_minus_f, df);
        if (upper) {
            grid.g_hi_ = std::move(g);
            grid.e_hi_ = std::move(e);
        } else {
            grid.g_lo_ = std::move(g);
            grid.e_lo_ = std::move(e);
        }
    }
    return grid;
}

double survival_grid::max_bracket_width() const {
    double w = 0.0;
    for (std::size_t i = 0; i < g_lo_.size(); ++i)
        w = std::max({w, g_hi_[i] - g_lo_[i], e_hi_[i] - e_lo_[i]});
    return w;
}

namespace {
double interpolate(const std::vector<double>& v, double t, double h, double t_max) {
    if (t < 0.0) throw std::domain_error("survival_grid: negative time");
    if (t > t_max + 1e-12) throw grid_exhausted_error(t);
    const double x = std::min(t / h, static_cast<double>(v.size() - 1));
    const auto i = static_cast<std::size_t>(x);
    if (i + 1 >= v.size()) return v.back();
    const double frac = x - static_cast<double>(i);
    return v[i] * (1.0 - frac) + v[i + 1] * frac;
}
} // namespace

double survival_grid::g_at(double t) const { return interpolate(g_lo_, t, h_, t_max_); }
double survival_grid::e_at(double t) const { return interpolate(e_lo_, t, h_, t_max_); }

double survival_grid::vk_survival(double t, std::uint64_t k) const {
    return std::pow(g_at(t), static_cast<double>(k));
}

std::vector<double> edge_spread_survival(const survival_grid& grid) {
    const auto& g = grid.g_values();
    const std::size_t m = g.size();
    const double h = grid.step();
    std::vector<double> one_minus_f(m), df(m - 1), phi(m);
    for (std::size_t i = 0; i < m; ++i) {
        one_minus_f[i] = 1.0 - grid.law().cdf(static_cast<double>(i) * h);
        phi[i] = grid.offspring().pgf(g[i]).lo;
    }
    for (std::size_t j = 0; j + 1 < m; ++j) df[j] = one_minus_f[j] - one_minus_f[j + 1];
    return spread_from(phi, one_minus_f, df);
}

std::vector<double> unimodular_cdf(const survival_grid& grid,
                                   const power_law_degree_law& degree_law) {
    const auto& g = grid.g_values();
    std::vector<double> out(g.size());
    for (std::size_t i = 0; i < g.size(); ++i)
        out[i] = 1.0 - degree_law.pgf(g[i]).mid();
    return out;
}

std::vector<double> unimodular_cdf(const survival_grid& grid, std::uint64_t fixed_k) {
    const auto& g = grid.g_values();
    std::vector<double> out(g.size());
    for (std::size_t i = 0; i < g.size(); ++i)
        out[i] = 1.0 - std::pow(g[i], static_cast<double>(fixed_k));
    return out;
}

double fixed_point_residual(const survival_grid& grid) {
    const auto& g0 = grid.g_values();
    const std::size_t m = g0.size();
    const double h = grid.step();
    if (!grid.law().has_density()) {
        // exact shift map
        const double c = grid.law().param1();
        const auto shift = static_cast<std::size_t>(std::llround(c / h));
        double res = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            const double rhs =
                i < shift ? 1.0 : grid.offspring().pgf(g0[i - shift]).lo;
            res = std::max(res, std::abs(rhs - g0[i]));
        }
        return res;
    }
    std::vector<double> one_minus_f(m), df(m - 1), phi(m);
    for (std::size_t i = 0; i < m; ++i) {
        one_minus_f[i] = 1.0 - grid.law().cdf(static_cast<double>(i) * h);
        phi[i] = grid.offspring().pgf(g0[i]).lo;
    }
    for (std::size_t j = 0; j + 1 < m; ++j) df[j] = one_minus_f[j] - one_minus_f[j + 1];
    double res = 0.0;
    for (std::size_t i = 1; i < m; ++i) {
        double acc = 0.0;
        for (std::size_t j = 0; j < i; ++j)
            acc += df[j] * 0.5 * (phi[i - j] + phi[i - j - 1]);
        res = std::max(res, std::abs(std::min(1.0, one_minus_f[i] + acc) - g0[i]));
    }
    return res;
}

} // namespace fpprace
