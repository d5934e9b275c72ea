#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

namespace fpprace {

/// Kolmogorov distance between the empirical CDFs of two integer samples.
inline double kolmogorov_distance(std::vector<std::uint64_t> a,
                                  std::vector<std::uint64_t> b) {
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
    double d = 0.0;
    std::size_t i = 0, j = 0;
    while (i < a.size() || j < b.size()) {
        std::uint64_t x;
        if (j >= b.size() || (i < a.size() && a[i] <= b[j])) x = a[i];
        else x = b[j];
        while (i < a.size() && a[i] <= x) ++i;
        while (j < b.size() && b[j] <= x) ++j;
        d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
    }
    return d;
}

/// Kolmogorov distance between empirical CDFs of real samples (sorted inputs).
inline double kolmogorov_distance_sorted(const std::vector<double>& a,
                                         const std::vector<double>& b) {
    const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
    double d = 0.0;
    std::size_t i = 0, j = 0;
    while (i < a.size() && j < b.size()) {
        if (a[i] <= b[j]) ++i;
        else ++j;
        d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
    }
    return d;
}

/// Pearson chi-square statistic against uniform expected counts.
inline double chi_square_uniform(const std::vector<std::uint64_t>& counts) {
    std::uint64_t total = 0;
    for (auto c : counts) total += c;
    const double expected = static_cast<double>(total) / static_cast<double>(counts.size());
    double stat = 0.0;
    for (auto c : counts) {
        const double d = static_cast<double>(c) - expected;
        stat += d * d / expected;
    }
    return stat;
}

struct binomial_ci {
    double freq;
    double lo, hi; // Wilson interval
};

inline binomial_ci wilson_interval(std::uint64_t successes, std::uint64_t trials,
                                   double z = 1.959963984540054) {
    const double nn = static_cast<double>(trials);
    if (trials == 0) return {0.0, 0.0, 1.0};
    const double p = static_cast<double>(successes) / nn;
    const double z2 = z * z;
    const double denom = 1.0 + z2 / nn;
    const double centre = (p + z2 / (2.0 * nn)) / denom;
    const double half = z * std::sqrt(p * (1.0 - p) / nn + z2 / (4.0 * nn * nn)) / denom;
    return {p, std::max(0.0, centre - half), std::min(1.0, centre + half)};
}

inline double median_sorted(const std::vector<double>& v) {
    if (v.empty()) return 0.0;
    const std::size_t m = v.size();
    return m % 2 == 1 ? v[m / 2] : 0.5 * (v[m / 2 - 1] + v[m / 2]);
}

inline double quantile_sorted(const std::vector<double>& v, double q) {
    if (v.empty()) return 0.0;
    const double x = q * static_cast<double>(v.size() - 1);
    const auto i = static_cast<std::size_t>(x);
    if (i + 1 >= v.size()) return v.back();
    const double frac = x - static_cast<double>(i);
    return v[i] * (1.0 - frac) + v[i + 1] * frac;
}

} // namespace fpprace
