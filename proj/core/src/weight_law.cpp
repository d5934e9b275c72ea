#include "fpprace/weight_law.hpp"

#include <sstream>
#include <vector>

#include "fpprace/errors.hpp"

namespace fpprace {

weight_law weight_law::exponential(double rate) {
    if (!(rate > 0)) throw config_error("exponential law needs rate > 0");
    return {law_kind::exponential, rate, 0.0};
}

weight_law weight_law::weibull(double shape, double scale) {
    if (!(shape > 0) || !(scale > 0))
        throw config_error("weibull law needs shape > 0 and scale > 0");
    return {law_kind::weibull, shape, scale};
}

weight_law weight_law::shifted_exponential(double shift, double rate) {
    if (!(shift >= 0) || !(rate > 0))
        throw config_error("shifted-exponential law needs shift >= 0 and rate > 0");
    return {law_kind::shifted_exponential, shift, rate};
}

weight_law weight_law::deterministic(double value) {
    if (!(value > 0)) throw config_error("deterministic law needs value > 0");
    return {law_kind::deterministic, value, 0.0};
}

bool weight_law::explosive() const {
    switch (kind_) {
    case law_kind::exponential: return true;
    case law_kind::weibull: return true; // quantile decays polynomially at 0
    case law_kind::shifted_exponential: return a_ == 0.0;
    case law_kind::deterministic: return false;
    }
    return false;
}

double weight_law::lower_support() const {
    switch (kind_) {
    case law_kind::shifted_exponential: return a_;
    case law_kind::deterministic: return a_;
    default: return 0.0;
    }
}

double weight_law::cdf(double x) const {
    if (x <= 0) return 0.0;
    switch (kind_) {
    case law_kind::exponential: return -std::expm1(-a_ * x);
    case law_kind::weibull: return -std::expm1(-std::pow(x / b_, a_));
    case law_kind::shifted_exponential:
        return x <= a_ ? 0.0 : -std::expm1(-b_ * (x - a_));
    case law_kind::deterministic: return x >= a_ ? 1.0 : 0.0;
    }
    return 0.0;
}

double weight_law::density(double x) const {
    if (x <= 0) return 0.0;
    switch (kind_) {
    case law_kind::exponential: return a_ * std::exp(-a_ * x);
    case law_kind::weibull: {
        const double z = x / b_;
        return (a_ / b_) * std::pow(z, a_ - 1.0) * std::exp(-std::pow(z, a_));
    }
    case law_kind::shifted_exponential:
        return x <= a_ ? 0.0 : b_ * std::exp(-b_ * (x - a_));
    case law_kind::deterministic: return 0.0;
    }
    return 0.0;
}

double weight_law::quantile(double p) const {
    switch (kind_) {
    case law_kind::exponential: return -std::log1p(-p) / a_;
    case law_kind::weibull: return b_ * std::pow(-std::log1p(-p), 1.0 / a_);
    case law_kind::shifted_exponential: return a_ - std::log1p(-p) / b_;
    case law_kind::deterministic: return a_;
    }
    return 0.0;
}

namespace {
std::vector<std::string> split_colons(const std::string& s) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == ':') {
            out.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    out.push_back(cur);
    return out;
}

double parse_pos(const std::string& s, const std::string& ctx) {
    if (s == "inf" || s == "+inf") return std::numeric_limits<double>::infinity();
    try {
        std::size_t used = 0;
        double v = std::stod(s, &used);
        if (used != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw config_error("cannot parse number '" + s + "' in weight law " + ctx);
    }
}
} // namespace

weight_law weight_law::parse(const std::string& text) {
    if (text == "never") return deterministic(std::numeric_limits<double>::infinity());
    auto parts = split_colons(text);
    const std::string& name = parts[0];
    auto want = [&](std::size_t k) {
        if (parts.size() != k + 1)
            throw config_error("weight law '" + text + "' expects " +
                               std::to_string(k) + " parameter(s)");
    };
    if (name == "exp" || name == "exponential") {
        want(1);
        return exponential(parse_pos(parts[1], text));
    }
    if (name == "weibull") {
        want(2);
        return weibull(parse_pos(parts[1], text), parse_pos(parts[2], text));
    }
    if (name == "sexp" || name == "shifted-exp" || name == "shifted-exponential") {
        want(2);
        return shifted_exponential(parse_pos(parts[1], text), parse_pos(parts[2], text));
    }
    if (name == "det" || name == "deterministic") {
        want(1);
        return deterministic(parse_pos(parts[1], text));
    }
    throw config_error("unknown weight law '" + text +
                       "' (expected exp:R | weibull:K:S | sexp:SHIFT:RATE | det:V | never)");
}

std::string weight_law::format() const {
    std::ostringstream os;
    switch (kind_) {
    case law_kind::exponential: os << "exp:" << a_; break;
    case law_kind::weibull: os << "weibull:" << a_ << ":" << b_; break;
    case law_kind::shifted_exponential: os << "sexp:" << a_ << ":" << b_; break;
    case law_kind::deterministic: os << "det:" << a_; break;
    }
    return os.str();
}

} // namespace fpprace
