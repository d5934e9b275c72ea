#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "fpprace/detail/power_tail.hpp"
#include "fpprace/rng.hpp"

namespace fpprace {

using detail::bracket;

/// Degree law D = ceil(U^{-1/(tau-1)}) for U uniform on (0,1), tau in (2,3).
/// Then P(D = k) = (k-1)^{1-tau} - k^{1-tau} for k >= 2 and the tail is
/// P(D > x) = x^{1-tau} exactly at integer x, so every draw is >= 2 and the
/// power-law tail sandwich holds with constants c1 = 2^{1-tau}, C1 = 1 on
/// integers. The pmf cache is populated lazily up to a cutoff with the tail
/// mass carried explicitly.
class power_law_degree_law {
  public:
    explicit power_law_degree_law(double tau);

    double tau() const { return tau_; }
    double mean() const { return mean_; } // E[D] = 1 + zeta(tau - 1)

    /// P(D = k), exact closed form; 0 for k < 2.
    double pmf(std::uint64_t k) const;
    /// P(D > x) at integer x >= 1; exact.
    double tail(std::uint64_t x) const;

    /// Maps one uniform draw in (0,1] to a degree. u -> 1 forces the minimum
    /// degree 2 (the measure-zero boundary of the ceiling construction).
    std::uint64_t degree_from_uniform(double u) const;

    std::uint64_t sample(rng& r) const { return degree_from_uniform(r.u01_open()); }

    /// E[u^D] with a rigorous truncation bracket, u in [0,1].
    bracket pgf(double u) const;

    /// pmf cached up to and including k = cutoff; tail mass recorded.
    const std::vector<double>& pmf_cache(std::uint64_t cutoff) const;
    double cached_tail_mass() const { return cached_tail_mass_; }

  private:
    double tau_;
    double mean_;
    mutable std::vector<double> cache_; // cache_[k] = P(D = k)
    mutable double cached_tail_mass_ = 1.0;
};

/// The law of D* - 1 where D* is the size-biased version of D:
/// P(D* - 1 = k) = (k+1) P(D = k+1) / E[D]. This is the forward-degree /
/// offspring law of the exploration. Two backends: the analytic power-law
/// form (with bracketed tails) or an explicit finite pmf for tests.
class size_biased_law {
  public:
    static size_biased_law from_power_law(double tau);
    /// base_pmf[i] = P(D = first_degree + i); must sum to 1 (within 1e-9).
    static size_biased_law from_finite_base(const std::vector<double>& base_pmf,
                                            std::uint64_t first_degree = 2);

    /// P(D* - 1 = k), k >= 1.
    double pmf(std::uint64_t k) const;
    double base_mean() const { return base_mean_; } // E[D]
    bool finite() const { return !analytic_; }
    double tau() const { return tau_; }
    /// largest k with pmf > 0 for the finite backend; 0 means unbounded.
    std::uint64_t support_end() const;

    /// phi(u) = E[u^{D*-1}] with truncation bracket; exact for finite backend.
    bracket pgf(double u) const;
    /// phi'(u) = sum_k k p_k u^{k-1}; the dominator mean is phi'(G(t)).
    bracket pgf_derivative(double u) const;
    /// P(D*-1 > k) with bracket.
    bracket tail_mass(std::uint64_t k) const;

    /// Exact sample of D*-1. O(1) expected time for the analytic backend via
    /// a continuous-envelope rejection; inverse CDF for the finite backend.
    std::uint64_t sample(rng& r) const;

  private:
    size_biased_law() = default;
    bool analytic_ = false;
    double tau_ = 0.0;
    double base_mean_ = 0.0;
    std::vector<double> pmf_; // finite backend: pmf_[k-1] = P(D*-1 = k)
    std::vector<double> cdf_; // finite backend cumulative
    // analytic backend: cached prefix of p_k for fast pgf evaluation
    std::vector<double> prefix_;
    void ensure_prefix() const;
    mutable std::vector<double> prefix_mut_;
};

/// iid degrees with the even-sum fix applied to the last vertex.
struct degree_sequence {
    std::uint64_t n = 0;
    std::vector<std::uint32_t> degrees;
    std::uint64_t total = 0;  // L_n
    bool parity_fixed = false;

    void validate() const; // asserts the structural invariants
};

/// n iid draws; if the sum is odd, vertex n (index n-1) gets one extra
/// half-edge and parity_fixed is set. Deterministic given seed.
degree_sequence sample_degrees(const power_law_degree_law& law, std::uint64_t n,
                               std::uint64_t seed);

/// Degree sequence from explicit degrees (tests, file input).
degree_sequence make_degree_sequence(std::vector<std::uint32_t> degrees);

/// P(D*-1 = k) for an explicit finite base pmf given as (degree -> prob)
/// starting at first_degree. Normalization checked.
double size_biased_pmf(const std::vector<double>& base_pmf, std::uint64_t first_degree,
                       std::uint64_t k);

/// Uniform size-biased reordering: the first pick is uniform on [n], each
/// later pick is degree-proportional among the unpicked. Returns m vertex
/// indices (0-based).
std::vector<std::uint32_t> size_biased_reorder(const degree_sequence& d, std::uint64_t m,
                                               std::uint64_t seed);

/// Flat text format: first line n, then one degree per line.
void write_degrees(std::ostream& os, const degree_sequence& d);
degree_sequence read_degrees(std::istream& is);

} // namespace fpprace
