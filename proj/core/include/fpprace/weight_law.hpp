#pragma once

#include <cmath>
#include <limits>
#include <string>

#include "fpprace/rng.hpp"

namespace fpprace {

/// Edge-traversal time distributions. "explosive" means the associated
/// age-dependent branching process with infinite-mean offspring reaches
/// infinitely many individuals in finite time; laws whose support touches 0
/// with polynomial mass are explosive in the degree regime handled here,
/// laws bounded away from 0 are conservative.
enum class law_kind { exponential, weibull, shifted_exponential, deterministic };

class weight_law {
  public:
    static weight_law exponential(double rate);
    static weight_law weibull(double shape, double scale);
    static weight_law shifted_exponential(double shift, double rate);
    /// value may be +infinity: such a law never fires (used to disable a type).
    static weight_law deterministic(double value);

    /// Parses "exp:1.0", "weibull:0.5:1", "sexp:1:1" (alias shifted-exp),
    /// "det:2.5" (alias deterministic), "never".
    static weight_law parse(const std::string& text);
    std::string format() const;

    law_kind kind() const { return kind_; }
    double param1() const { return a_; }
    double param2() const { return b_; }

    bool explosive() const;
    bool has_density() const { return kind_ != law_kind::deterministic; }
    /// Largest x with F(x) = 0; positive for conservative laws.
    double lower_support() const;

    double cdf(double x) const;
    double density(double x) const;
    /// Inverse CDF on (0,1). Strictly increasing for continuous kinds.
    double quantile(double p) const;

    double sample(rng& r) const { return quantile(r.u01_open()); }

  private:
    weight_law(law_kind k, double a, double b) : kind_(k), a_(a), b_(b) {}
    law_kind kind_;
    double a_; // rate | shape | shift | value
    double b_; // -    | scale | rate  | -
};

} // namespace fpprace
