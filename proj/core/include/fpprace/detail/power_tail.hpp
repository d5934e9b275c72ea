#pragma once

#include <cmath>
#include <stdexcept>

#include <boost/math/special_functions/gamma.hpp>

namespace fpprace::detail {

/// A value known up to a rigorously bounded interval.
struct bracket {
    double lo = 0.0;
    double hi = 0.0;
    double mid() const { return 0.5 * (lo + hi); }
    double width() const { return hi - lo; }
    bracket& operator+=(const bracket& o) {
        lo += o.lo;
        hi += o.hi;
        return *this;
    }
    bracket& operator+=(double v) {
        lo += v;
        hi += v;
        return *this;
    }
    friend bracket operator*(double c, const bracket& b) {
        return c >= 0 ? bracket{c * b.lo, c * b.hi} : bracket{c * b.hi, c * b.lo};
    }
};

/// Upper incomplete gamma Gamma(a, z) for a in (-2, 2], extended below 0 via
/// Gamma(a, z) = (Gamma(a+1, z) - z^a e^-z) / a.
inline double upper_gamma(double a, double z) {
    if (a > 0.0) return boost::math::tgamma(a, z);
    if (a == 0.0) return boost::math::expint(1, z); // E1(z)
    return (upper_gamma(a + 1.0, z) - std::pow(z, a) * std::exp(-z)) / a;
}

/// Bracketed tail sum  Lambda_s(A, u) = sum_{k >= A} k^{-s} u^k  for u in (0,1),
/// s in (-2, 2). Uses the midpoint (Euler-Maclaurin) integral approximation
///     sum_{k>=A} g(k) ~ int_{A-1/2}^inf g(x) dx,   g(x) = x^{-s} e^{-lambda x},
/// whose error is bounded by int |g''| / 24. All integrals reduce to upper
/// incomplete gamma functions.
inline bracket power_tail(double s, double A, double u) {
    if (!(u > 0.0 && u < 1.0)) throw std::domain_error("power_tail: u must be in (0,1)");
    const double lambda = -std::log(u);
    const double c = A - 0.5;
    const double zc = lambda * c;
    if (zc > 745.0) return {0.0, 0.0}; // below double underflow
    auto integral = [&](double expo) {
        // int_c^inf x^{expo} e^{-lambda x} dx = lambda^{-expo-1} Gamma(expo+1, lambda c)
        return std::pow(lambda, -expo - 1.0) * upper_gamma(expo + 1.0, zc);
    };
    const double I = integral(-s);
    // |g''| <= e^{-lambda x} ( |s(s+1)| x^{-s-2} + 2 lambda |s| x^{-s-1} + lambda^2 x^{-s} )
    auto g2 = [&](double x) {
        return std::exp(-lambda * x) *
               (std::abs(s * (s + 1.0)) * std::pow(x, -s - 2.0) +
                2.0 * lambda * std::abs(s) * std::pow(x, -s - 1.0) +
                lambda * lambda * std::pow(x, -s));
    };
    // per-cell midpoint error sums to at most (|g''(c)| + int_c |g''|) / 24
    const double err = (g2(c) + std::abs(s * (s + 1.0)) * integral(-s - 2.0) +
                        2.0 * lambda * std::abs(s) * integral(-s - 1.0) +
                        lambda * lambda * I) /
                       24.0;
    return {I - err, I + err};
}

} // namespace fpprace::detail
