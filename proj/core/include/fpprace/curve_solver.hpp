#pragma once

#include <cstdint>
#include <vector>

#include "fpprace/degree_model.hpp"
#include "fpprace/weight_law.hpp"

namespace fpprace {

/// Survival of a half-edge explosion time beyond the grid horizon.
struct grid_exhausted_error : std::runtime_error {
    double reached;
    explicit grid_exhausted_error(double t)
        : std::runtime_error("time " + std::to_string(t) + " lies beyond the solved grid; "
                             "resolve with a larger t_max"),
          reached(t) {}
};

/// Tabulated G(t) = P(V(1) > t) together with the edge-spread survival
///   E(t) = P(X + Va ^ Vb > t)
/// on a uniform grid. The reported values come from the lower pgf evaluation;
/// the bracket columns bound the effect of the offspring-tail truncation
/// (upper minus lower full solve).
class survival_grid {
  public:
    double step() const { return h_; }
    double t_max() const { return t_max_; }
    std::size_t size() const { return g_lo_.size(); }
    double grid_time(std::size_t i) const { return static_cast<double>(i) * h_; }

    const std::vector<double>& g_values() const { return g_lo_; }
    const std::vector<double>& e_values() const { return e_lo_; }
    double g_bracket_width(std::size_t i) const { return g_hi_[i] - g_lo_[i]; }
    double e_bracket_width(std::size_t i) const { return e_hi_[i] - e_lo_[i]; }
    double max_bracket_width() const;
    std::uint32_t sweeps() const { return sweeps_; }

    /// linear interpolation; throws grid_exhausted_error beyond t_max,
    /// std::domain_error for negative t.
    double g_at(double t) const;
    double e_at(double t) const;

    /// P(V(k) > t) = G(t)^k.
    double vk_survival(double t, std::uint64_t k) const;

    const weight_law& law() const { return law_; }
    const size_biased_law& offspring() const { return sb_; }

  private:
    friend survival_grid solve_g(const weight_law&, const size_biased_law&, double,
                                 double, std::uint32_t);
    survival_grid(const weight_law& law, const size_biased_law& sb)
        : law_(law), sb_(sb) {}
    weight_law law_;
    size_biased_law sb_;
    double h_ = 0.0, t_max_ = 0.0;
    std::vector<double> g_lo_, g_hi_, e_lo_, e_hi_;
    std::uint32_t sweeps_ = 0;
};

/// Solves the half-edge explosion survival fixed point
///   G(t) = [1 - F_X](t) + int_0^t f_X(s) E[G(t-s)^{D*-1}] ds
/// by successive approximation with product-trapezoid quadrature (exact F_X
/// cell masses, trapezoid on the pgf factor). The iteration starts from the
/// subsolution G = 1 - F_X and increases monotonically to the minimal fixed
/// point, which is the explosion-time survival; G identically 1 is also a
/// fixed point (the conservative branch) and is reached exactly when the law
/// is conservative. Deterministic laws are handled by exact index shifting.
survival_grid solve_g(const weight_law& law, const size_biased_law& sb, double h,
                      double t_max, std::uint32_t max_sweeps = 10000);

/// E(t) is computed inside solve_g; this accessor recomputes it from a given
/// grid (same quadrature with the squared pgf), mainly as a self-check hook.
std::vector<double> edge_spread_survival(const survival_grid& grid);

/// P(V(D) <= t) = 1 - E[G(t)^D] on the grid, for the concrete power law.
std::vector<double> unimodular_cdf(const survival_grid& grid,
                                   const power_law_degree_law& degree_law);
/// Degenerate D = k variant: 1 - G(t)^k exactly.
std::vector<double> unimodular_cdf(const survival_grid& grid, std::uint64_t fixed_k);

/// Applies the discrete fixed-point map once to the stored G and returns the
/// sup-norm residual |Phi(G) - G|: the quadrature-consistent self-check.
double fixed_point_residual(const survival_grid& grid);

} // namespace fpprace
