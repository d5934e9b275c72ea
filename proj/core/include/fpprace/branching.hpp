#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "fpprace/curve_solver.hpp"
#include "fpprace/degree_model.hpp"
#include "fpprace/weight_law.hpp"

namespace fpprace {

/// Root offspring of an age-dependent branching process: either a fixed
/// child count k (the V(k) processes) or a fresh draw of D (unimodular).
struct root_law {
    enum class kind { fixed, unimodular } what = kind::fixed;
    std::uint64_t k = 1;
    static root_law fixed(std::uint64_t k) { return {kind::fixed, k}; }
    static root_law unimodular() { return {kind::unimodular, 0}; }
};

/// One truncated run of the (D*-1, X) age-dependent branching process.
struct bp_run {
    double t_cap = 0.0;  // T_{M_cap}, the explosion estimate
    double t_half = 0.0; // T_{M_cap/2}, for the stall diagnostic
    bool died_out = false; // only possible for finite offspring laws with mass at 0
};

/// Explosion-time samples for V(root). The event queue serves each node's
/// children in increasing weight order through lazy order-statistic streams,
/// so memory stays O(M_cap) even though the offspring law has infinite mean.
struct explosion_estimate {
    std::vector<double> samples;     // T_{M_cap} per replica, sorted
    std::vector<double> stall;       // T_{M_cap} - T_{M_cap/2} per replica, sorted
    std::uint64_t m_cap = 0;
    bool converged = false; // median stall small relative to median estimate

    /// empirical P(V > t)
    double survival(double t) const;
};

bp_run run_bp(root_law root, const power_law_degree_law* degree_law,
              const size_biased_law& sb, const weight_law& law, std::uint64_t m_cap,
              std::uint64_t seed);

explosion_estimate estimate_v(root_law root, const power_law_degree_law* degree_law,
                              const size_biased_law& sb, const weight_law& law,
                              std::uint64_t m_cap, std::uint64_t replicas,
                              std::uint64_t seed);

/// Dominating offspring law at time t (valid for any t with G available):
///   p_k(t) = P(D* = k+1) G(t)^{k-1} for k >= 1, remainder at 0.
struct dominator_law {
    double t = 0.0;
    double g = 1.0;
    std::vector<double> pmf;   // pmf[k-1] = p_k(t), truncated table
    double mass_at_zero = 0.0;
    bracket positive_mass;     // sum_{k>=1} p_k = phi(G)/G, bracketed
    bracket mean;              // phi'(G); infinite at t = 0
    bool mean_diverges = false;
    double table_remainder = 0.0; // mass beyond the truncated table (upper bound)
};

dominator_law dominator(double t, const size_biased_law& sb, const survival_grid& grid,
                        std::size_t max_table = 4096);

/// One step record of the losing-type limit exploration.
struct losing_step {
    std::uint64_t m;
    double t_prime;      // time since the winner's explosion
    std::uint64_t s_prime; // active half-edges after the step
    std::uint64_t b_prime; // forward degree drawn at this step
};

struct losing_trajectory {
    double v_w = 0.0;            // winner explosion time used for the clock
    std::uint64_t n_star = 0;    // losing-type discoveries before the winner explodes
    std::uint64_t s0 = 0;        // active half-edges at the explosion time
    std::vector<losing_step> steps;
    std::uint64_t n_star_star = 0; // #{m : B'_m >= 1}
    bool hit_zero = false;         // H' reached within the step cap
    std::uint64_t h_prime = 0;     // hitting step when hit_zero
    std::uint64_t rejections = 0;  // resamples of the init conditioning
};

/// Explicit initial state: residual weights of the active half-edges at the
/// winner's explosion time (all strictly positive).
struct losing_init {
    double v_w = 0.0;
    std::uint64_t n_star = 0;
    std::vector<double> residuals;
};

struct losing_limit_params {
    const survival_grid* winner_grid = nullptr; // G and E of the winning type
    const size_biased_law* offspring = nullptr; // D*-1 law for B' and the init BP
    const power_law_degree_law* degree_law = nullptr; // root D of the init BP
    weight_law loser_law = weight_law::exponential(1.0); // residuals and fresh weights
    std::uint64_t steps_cap = 100000;
    std::uint64_t reject_cap = 10000; // init discoveries beyond this mean the
                                      // loser exploded first: resample
};

/// Simulates the limiting losing-type exploration (T', S', B') from either a
/// supplied init or one sampled per the status-at-explosion law: a free
/// unimodular (D, X_loser) branching process is clocked against v_w, with
/// rejection when the loser reaches reject_cap discoveries before v_w.
/// B' is drawn from
///   P(B' = k | T' = t) = P(D* = k+1) G(t)^{k+1} / E(t),  k >= 1,
/// via a tilt-rejection against the dominator (acceptance ratio G^2/E is
/// constant in k). Throws grid_exhausted_error if T' leaves the solved grid.
losing_trajectory simulate_losing_limit(const losing_limit_params& params, double v_w,
                                        std::uint64_t seed,
                                        const losing_init* supplied = nullptr);

/// Draws one B' at a fixed clock time (exposed for distribution tests).
std::uint64_t sample_b_prime(const size_biased_law& sb, const survival_grid& grid,
                             double t, rng& r);

} // namespace fpprace
