#include "fpprace/degree_model.hpp"

#include <algorithm>
#include <bit>
#include <cassert>
#include <istream>
#include <ostream>

#include "fpprace/errors.hpp"

namespace fpprace {

namespace {

constexpr std::uint64_t k_prefix_cap = 1u << 18; // analytic pmf prefix length

/// Hurwitz tail zeta(s, A) = sum_{k >= A} k^{-s}, s > 1, with bracket.
/// Explicit sum up to 64 then Euler-Maclaurin.
bracket hurwitz_tail(double s, std::uint64_t A) {
    double head = 0.0;
    std::uint64_t a = A;
    while (a < 64) {
        head += std::pow(static_cast<double>(a), -s);
        ++a;
    }
    const double x = static_cast<double>(a);
    const double em = std::pow(x, 1.0 - s) / (s - 1.0) + 0.5 * std::pow(x, -s) +
                      s * std::pow(x, -s - 1.0) / 12.0;
    const double err = s * (s + 1.0) * (s + 2.0) * std::pow(x, -s - 3.0) / 720.0;
    return {head + em - err, head + em + err};
}

} // namespace

// ---------------------------------------------------------------------------
// power_law_degree_law

power_law_degree_law::power_law_degree_law(double tau) : tau_(tau) {
    if (!(tau > 2.0 && tau < 3.0))
        throw config_error("degree exponent tau must lie in the open interval (2,3)");
    mean_ = 1.0 + std::riemann_zeta(tau - 1.0);
}

double power_law_degree_law::pmf(std::uint64_t k) const {
    if (k < 2) return 0.0;
    const double km1 = static_cast<double>(k - 1);
    const double kk = static_cast<double>(k);
    return std::pow(km1, 1.0 - tau_) - std::pow(kk, 1.0 - tau_);
}

double power_law_degree_law::tail(std::uint64_t x) const {
    if (x < 1) return 1.0;
    return std::pow(static_cast<double>(x), 1.0 - tau_);
}

std::uint64_t power_law_degree_law::degree_from_uniform(double u) const {
    if (!(u > 0.0)) throw std::domain_error("degree_from_uniform: u must be in (0,1]");
    if (u >= 1.0) return 2;
    double y = std::pow(u, -1.0 / (tau_ - 1.0));
    if (y >= 9.2e18) y = 9.2e18; // keep the cast below well-defined
    const auto d = static_cast<std::uint64_t>(std::ceil(y));
    return d < 2 ? 2 : d;
}

const std::vector<double>& power_law_degree_law::pmf_cache(std::uint64_t cutoff) const {
    if (cache_.size() < cutoff + 1) {
        cache_.resize(cutoff + 1, 0.0);
        for (std::uint64_t k = 2; k <= cutoff; ++k) cache_[k] = pmf(k);
        cached_tail_mass_ = tail(cutoff);
    }
    return cache_;
}

bracket power_law_degree_law::pgf(double u) const {
    if (u <= 0.0) return {0.0, 0.0};
    if (u >= 1.0) return {1.0, 1.0};
    // sum_{j>=2} P(D=j) u^j, early-terminated; truncation remainder is
    // bounded by u^{j+1} (total mass <= 1), then the analytic bracket
    //   tail(J) = J^{1-tau} u^{J+1} - (1-u) Lambda_{tau-1}(J+1, u)
    double acc = 0.0, up = u * u; // u^j
    std::uint64_t j = 2;
    for (; j <= k_prefix_cap; ++j) {
        acc += pmf(j) * up;
        up *= u;
        if (up < 1e-13) return {acc, acc + 1e-13};
    }
    const double J = static_cast<double>(j - 1);
    bracket tail_b = (-(1.0 - u)) * detail::power_tail(tau_ - 1.0, J + 1.0, u);
    tail_b += std::pow(J, 1.0 - tau_) * std::pow(u, J + 1.0);
    bracket out{acc, acc};
    out += tail_b;
    return out;
}

// ---------------------------------------------------------------------------
// size_biased_law

size_biased_law size_biased_law::from_power_law(double tau) {
    power_law_degree_law base(tau); // validates tau
    size_biased_law law;
    law.analytic_ = true;
    law.tau_ = tau;
    law.base_mean_ = base.mean();
    return law;
}

size_biased_law size_biased_law::from_finite_base(const std::vector<double>& base_pmf,
                                                  std::uint64_t first_degree) {
    double total = 0.0, mean = 0.0;
    for (std::size_t i = 0; i < base_pmf.size(); ++i) {
        if (base_pmf[i] < 0.0) throw config_error("base pmf has a negative entry");
        total += base_pmf[i];
        mean += base_pmf[i] * static_cast<double>(first_degree + i);
    }
    if (std::abs(total - 1.0) > 1e-9)
        throw config_error("base pmf is not normalized (sums to " + std::to_string(total) + ")");
    if (first_degree < 1) throw config_error("base pmf must start at degree >= 1");

    size_biased_law law;
    law.analytic_ = false;
    law.base_mean_ = mean;
    const std::uint64_t max_degree = first_degree + base_pmf.size() - 1;
    law.pmf_.assign(max_degree - 1, 0.0); // supports k = 1 .. max_degree-1
    for (std::size_t i = 0; i < base_pmf.size(); ++i) {
        const std::uint64_t j = first_degree + i; // degree
        if (j >= 2)
            law.pmf_[j - 2] = static_cast<double>(j) * base_pmf[i] / mean; // k = j-1
    }
    law.cdf_.resize(law.pmf_.size());
    double c = 0.0;
    for (std::size_t i = 0; i < law.pmf_.size(); ++i) {
        c += law.pmf_[i];
        law.cdf_[i] = c;
    }
    return law;
}

void size_biased_law::ensure_prefix() const {
    if (!prefix_mut_.empty()) return;
    prefix_mut_.resize(k_prefix_cap + 1, 0.0);
    for (std::uint64_t k = 1; k <= k_prefix_cap; ++k) {
        const double kk = static_cast<double>(k);
        prefix_mut_[k] = (kk + 1.0) *
                         (std::pow(kk, 1.0 - tau_) - std::pow(kk + 1.0, 1.0 - tau_)) /
                         base_mean_;
    }
}

double size_biased_law::pmf(std::uint64_t k) const {
    if (k < 1) return 0.0;
    if (!analytic_) return k - 1 < pmf_.size() ? pmf_[k - 1] : 0.0;
    const double kk = static_cast<double>(k);
    return (kk + 1.0) * (std::pow(kk, 1.0 - tau_) - std::pow(kk + 1.0, 1.0 - tau_)) /
           base_mean_;
}

std::uint64_t size_biased_law::support_end() const {
    return analytic_ ? 0 : pmf_.size();
}

bracket size_biased_law::pgf(double u) const {
    if (u <= 0.0) return {0.0, 0.0};
    if (u >= 1.0) return {1.0, 1.0};
    if (!analytic_) {
        double acc = 0.0, up = 1.0;
        for (std::size_t i = 0; i < pmf_.size(); ++i) {
            up *= u;
            acc += pmf_[i] * up;
        }
        return {acc, acc};
    }
    ensure_prefix();
    double acc = 0.0, up = 1.0;
    std::uint64_t k = 1;
    for (; k <= k_prefix_cap; ++k) {
        up *= u;
        acc += prefix_mut_[k] * up;
        if (up * u < 1e-13) return {acc, acc + 1e-13};
    }
    //  E[D] * sum_{k>K} p_k u^k =
    //     (K+1)^{2-tau} u^K - ((1-u)/u) Lambda_{tau-2}(K+1,u) + Lambda_{tau-1}(K+1,u)
    const double K = static_cast<double>(k - 1);
    bracket tail_b{0.0, 0.0};
    tail_b += std::pow(K + 1.0, 2.0 - tau_) * std::pow(u, K);
    tail_b += (-(1.0 - u) / u) * detail::power_tail(tau_ - 2.0, K + 1.0, u);
    tail_b += detail::power_tail(tau_ - 1.0, K + 1.0, u);
    bracket out{acc, acc};
    out += (1.0 / base_mean_) * tail_b;
    if (out.hi > 1.0) out.hi = 1.0;
    return out;
}

bracket size_biased_law::pgf_derivative(double u) const {
    if (u <= 0.0) return {pmf(1), pmf(1)};
    if (!analytic_) {
        double acc = 0.0, up = 1.0;
        for (std::size_t i = 0; i < pmf_.size(); ++i) {
            acc += static_cast<double>(i + 1) * pmf_[i] * up;
            up *= u;
        }
        return {acc, acc};
    }
    if (u >= 1.0)
        return {0.0, std::numeric_limits<double>::infinity()}; // E[D*-1] diverges
    ensure_prefix();
    double acc = 0.0, up = 1.0; // up = u^{k-1}
    std::uint64_t k = 1;
    const double tail_coeff = 2.0 * (tau_ - 1.0) / base_mean_;
    for (; k <= k_prefix_cap; ++k) {
        acc += static_cast<double>(k) * prefix_mut_[k] * up;
        // remaining terms are below tail_coeff * k^{2-tau} u^k / (1-u)
        if (tail_coeff * std::pow(static_cast<double>(k), 2.0 - tau_) * up * u /
                (1.0 - u) <
            1e-12)
            return {acc, acc + 1e-12};
        up *= u;
    }
    //  E[D] * u * sum_{k>K} k p_k u^{k-1} = (K+1)^{3-tau} u^K
    //    - ((1-u)/u) Lambda_{tau-3}(K+1,u) + Lambda_{tau-2}(K+1,u)
    //    + (Lambda_{tau-2}(K+1,u) - (K+1)^{2-tau} u^{K+1}) / u
    const double K = static_cast<double>(k - 1);
    const bracket lam2 = detail::power_tail(tau_ - 2.0, K + 1.0, u);
    bracket tail_b{0.0, 0.0};
    tail_b += std::pow(K + 1.0, 3.0 - tau_) * std::pow(u, K);
    tail_b += (-(1.0 - u) / u) * detail::power_tail(tau_ - 3.0, K + 1.0, u);
    tail_b += lam2;
    tail_b += (1.0 / u) * lam2;
    tail_b += -std::pow(K + 1.0, 2.0 - tau_) * std::pow(u, K + 1.0) / u;
    bracket out{acc, acc};
    out += (1.0 / (base_mean_ * u)) * tail_b;
    return out;
}

bracket size_biased_law::tail_mass(std::uint64_t k) const {
    if (!analytic_) {
        if (k >= pmf_.size()) return {0.0, 0.0};
        const double v = 1.0 - (k == 0 ? 0.0 : cdf_[k - 1]);
        return {v, v};
    }
    if (k == 0) return {1.0, 1.0};
    // E[D] * P(D*-1 > k) = (k+1)^{2-tau} + zeta(tau-1, k+1)
    bracket z = hurwitz_tail(tau_ - 1.0, k + 1);
    z += std::pow(static_cast<double>(k + 1), 2.0 - tau_);
    return (1.0 / base_mean_) * z;
}

std::uint64_t size_biased_law::sample(rng& r) const {
    if (!analytic_) {
        const double u = r.u01();
        auto it = std::lower_bound(cdf_.begin(), cdf_.end(), u * cdf_.back());
        return static_cast<std::uint64_t>(it - cdf_.begin()) + 1;
    }
    // Exact rejection: the target density on x in (1, inf) is
    //   f(x) = (tau-1) (floor(x)+1) x^{-tau} / E[D]   (marginal of D* = floor(x)+1)
    // enveloped by (x+1) x^{-tau}, a mixture of two Pareto components.
    const double a = tau_ - 1.0, b = tau_ - 2.0;
    const double w1 = (1.0 / b) / (1.0 / b + 1.0 / a);
    for (;;) {
        const double u = r.u01_open();
        const double x = (r.u01() < w1) ? std::pow(u, -1.0 / b) : std::pow(u, -1.0 / a);
        double fl = std::floor(x);
        if (fl > 4.6e18) fl = 4.6e18;
        const double j = fl + 1.0; // proposed D*
        if (r.u01() * (x + 1.0) <= j) return static_cast<std::uint64_t>(j) - 1;
    }
}

// ---------------------------------------------------------------------------
// degree sequences

void degree_sequence::validate() const {
    if (degrees.size() != n) throw config_error("degree sequence: size mismatch");
    std::uint64_t sum = 0;
    for (auto d : degrees) sum += d;
    if (sum != total) throw config_error("degree sequence: stored total is stale");
    if (total % 2 != 0) throw config_error("degree sequence: total degree is odd");
}

degree_sequence sample_degrees(const power_law_degree_law& law, std::uint64_t n,
                               std::uint64_t seed) {
    if (n < 2) throw config_error("sample_degrees: need n >= 2");
    degree_sequence out;
    out.n = n;
    out.degrees.resize(n);
    rng r(derive_seed(seed, 0xD364));
    std::uint64_t sum = 0;
    for (std::uint64_t v = 0; v < n; ++v) {
        std::uint64_t d = law.sample(r);
        if (d > 0x7fffffffULL) d = 0x7fffffffULL; // degree cap, see header
        out.degrees[v] = static_cast<std::uint32_t>(d);
        sum += d;
    }
    if (sum % 2 != 0) {
        out.degrees[n - 1] += 1;
        sum += 1;
        out.parity_fixed = true;
    }
    out.total = sum;
    return out;
}

degree_sequence make_degree_sequence(std::vector<std::uint32_t> degrees) {
    if (degrees.empty()) throw config_error("make_degree_sequence: empty sequence");
    degree_sequence out;
    out.n = degrees.size();
    out.degrees = std::move(degrees);
    std::uint64_t sum = 0;
    for (auto d : out.degrees) sum += d;
    if (sum % 2 != 0) {
        out.degrees.back() += 1;
        sum += 1;
        out.parity_fixed = true;
    }
    out.total = sum;
    return out;
}

double size_biased_pmf(const std::vector<double>& base_pmf, std::uint64_t first_degree,
                       std::uint64_t k) {
    if (k < 1) throw std::domain_error("size_biased_pmf: k must be >= 1");
    auto law = size_biased_law::from_finite_base(base_pmf, first_degree);
    return law.pmf(k);
}

std::vector<std::uint32_t> size_biased_reorder(const degree_sequence& d, std::uint64_t m,
                                               std::uint64_t seed) {
    const std::uint64_t n = d.n;
    if (m > n) throw std::domain_error("size_biased_reorder: m exceeds n");
    rng r(derive_seed(seed, 0x5B0D));
    std::vector<std::uint32_t> out;
    out.reserve(m);
    if (m == 0) return out;

    // Fenwick tree over degrees for exact without-replacement weighted picks.
    std::vector<std::uint64_t> fen(n + 1, 0);
    auto add = [&](std::uint64_t i, std::int64_t delta) {
        for (std::uint64_t x = i + 1; x <= n; x += x & (~x + 1))
            fen[x] = static_cast<std::uint64_t>(static_cast<std::int64_t>(fen[x]) + delta);
    };
    for (std::uint64_t v = 0; v < n; ++v) add(v, static_cast<std::int64_t>(d.degrees[v]));
    std::uint64_t remaining = d.total;

    // locate smallest index with prefix sum > target
    auto find = [&](std::uint64_t target) {
        std::uint64_t pos = 0, bit = std::bit_floor(n);
        for (; bit != 0; bit >>= 1) {
            const std::uint64_t next = pos + bit;
            if (next <= n && fen[next] <= target) {
                pos = next;
                target -= fen[next];
            }
        }
        return pos; // 0-based vertex id
    };

    // first pick uniform on [n] (not degree-biased)
    const auto first = static_cast<std::uint32_t>(r.below(n));
    out.push_back(first);
    remaining -= d.degrees[first];
    add(first, -static_cast<std::int64_t>(d.degrees[first]));

    for (std::uint64_t i = 1; i < m; ++i) {
        if (remaining == 0)
            throw std::domain_error("size_biased_reorder: degree mass exhausted");
        const std::uint64_t target = r.below(remaining);
        const std::uint64_t v = find(target);
        out.push_back(static_cast<std::uint32_t>(v));
        remaining -= d.degrees[v];
        add(v, -static_cast<std::int64_t>(d.degrees[v]));
    }
    return out;
}

void write_degrees(std::ostream& os, const degree_sequence& d) {
    os << d.n << "\n";
    for (auto deg : d.degrees) os << deg << "\n";
}

degree_sequence read_degrees(std::istream& is) {
    std::uint64_t n = 0;
    if (!(is >> n) || n == 0) throw config_error("degree file: bad vertex count");
    std::vector<std::uint32_t> degs(n);
    for (std::uint64_t i = 0; i < n; ++i) {
        if (!(is >> degs[i])) throw config_error("degree file: truncated");
    }
    return make_degree_sequence(std::move(degs));
}

} // namespace fpprace
