#include "fpprace/branching.hpp"

#include <algorithm>
#include <cmath>
#include <queue>

#include "fpprace/errors.hpp"

namespace fpprace {

namespace {

/// Serves the order statistics of `count` iid draws of a law in increasing
/// order without materializing them. Uniform order statistics are generated
/// by the nested-power scheme in log space and mapped through the quantile.
struct sorted_batch {
    double base = 0.0; // birth time of the owner; event times are base + weight
    std::uint64_t remaining = 0;
    double log_one_minus_u = 0.0;

    double next_weight(const weight_law& law, rng& r) {
        // 1 - U_(i) = (1 - U_(i-1)) * V^{1/remaining}
        log_one_minus_u += std::log(r.u01_open()) / static_cast<double>(remaining);
        --remaining;
        double p = -std::expm1(log_one_minus_u);
        if (p >= 1.0) p = 1.0 - 1e-16;
        return law.quantile(p);
    }
};

struct stream_event {
    double time;
    std::uint32_t id; // batch index
    bool operator>(const stream_event& o) const {
        return time != o.time ? time > o.time : id > o.id;
    }
};
using stream_queue =
    std::priority_queue<stream_event, std::vector<stream_event>, std::greater<stream_event>>;

/// Shared BP engine state: batches plus the event queue over batch heads.
struct bp_engine {
    const size_biased_law* sb;
    const weight_law* law;
    rng* r;
    std::vector<sorted_batch> batches;
    stream_queue queue;

    void spawn(double birth, std::uint64_t children) {
        if (children == 0) return;
        sorted_batch b{birth, children, 0.0};
        const double w = b.next_weight(*law, *r);
        batches.push_back(b);
        queue.push({birth + w, static_cast<std::uint32_t>(batches.size() - 1)});
    }

    /// Pops the next discovery; each discovered individual immediately draws
    /// its own offspring batch. Returns the discovery time.
    double step() {
        const stream_event e = queue.top();
        queue.pop();
        sorted_batch& b = batches[e.id];
        if (b.remaining > 0) {
            const double w = b.next_weight(*law, *r);
            queue.push({b.base + w, e.id});
        }
        spawn(e.time, sb->sample(*r));
        return e.time;
    }
};

} // namespace

bp_run run_bp(root_law root, const power_law_degree_law* degree_law,
              const size_biased_law& sb, const weight_law& law, std::uint64_t m_cap,
              std::uint64_t seed) {
    if (m_cap < 2) throw config_error("run_bp: m_cap must be at least 2");
    rng r(derive_seed(seed, 0xB9));
    bp_engine eng{&sb, &law, &r, {}, {}};
    std::uint64_t root_children =
        root.what == root_law::kind::fixed ? root.k : 0;
    if (root.what == root_law::kind::unimodular) {
        if (!degree_law) throw config_error("run_bp: unimodular root needs a degree law");
        root_children = degree_law->sample(r);
    }
    eng.spawn(0.0, root_children);

    bp_run out;
    const std::uint64_t half = m_cap / 2;
    for (std::uint64_t m = 1; m <= m_cap; ++m) {
        if (eng.queue.empty()) {
            out.died_out = true;
            return out;
        }
        const double t = eng.step();
        if (m == half) out.t_half = t;
        out.t_cap = t;
    }
    return out;
}

explosion_estimate estimate_v(root_law root, const power_law_degree_law* degree_law,
                              const size_biased_law& sb, const weight_law& law,
                              std::uint64_t m_cap, std::uint64_t replicas,
                              std::uint64_t seed) {
    explosion_estimate est;
    est.m_cap = m_cap;
    est.samples.reserve(replicas);
    est.stall.reserve(replicas);
    for (std::uint64_t rep = 0; rep < replicas; ++rep) {
        const bp_run run =
            run_bp(root, degree_law, sb, law, m_cap, derive_seed(seed, 0xE57, rep));
        if (run.died_out) continue; // impossible for offspring >= 1 a.s.
        est.samples.push_back(run.t_cap);
        est.stall.push_back(run.t_cap - run.t_half);
    }
    std::sort(est.samples.begin(), est.samples.end());
    std::sort(est.stall.begin(), est.stall.end());
    if (!est.samples.empty()) {
        const double med_t = est.samples[est.samples.size() / 2];
        const double med_stall = est.stall[est.stall.size() / 2];
        // operational explosion check: the last M_cap/2 discoveries consumed
        // almost no time compared to the estimate itself
        est.converged = med_stall <= 0.01 * med_t;
    }
    return est;
}

double explosion_estimate::survival(double t) const {
    const auto it = std::upper_bound(samples.begin(), samples.end(), t);
    return static_cast<double>(samples.end() - it) / static_cast<double>(samples.size());
}

dominator_law dominator(double t, const size_biased_law& sb, const survival_grid& grid,
                        std::size_t max_table) {
    dominator_law d;
    d.t = t;
    d.g = grid.g_at(t); // throws domain/grid errors for t outside the grid
    // sum_{k>=1} p_k = phi(G)/G; for G = 1 the law is D*-1 itself
    if (d.g >= 1.0) {
        d.positive_mass = {1.0, 1.0};
    } else {
        const bracket phi = sb.pgf(d.g);
        d.positive_mass = {phi.lo / d.g, std::min(1.0, phi.hi / d.g)};
    }
    d.mass_at_zero = std::max(0.0, 1.0 - d.positive_mass.mid());
    d.mean = sb.pgf_derivative(d.g);
    d.mean_diverges = !sb.finite() && d.g >= 1.0;

    double cum = 0.0;
    double gpow = 1.0; // G^{k-1}
    for (std::uint64_t k = 1; k <= max_table; ++k) {
        const double pk = sb.pmf(k) * gpow;
        d.pmf.push_back(pk);
        cum += pk;
        gpow *= d.g;
        const double rem = d.positive_mass.hi - cum;
        if (rem < 1e-10 && k >= 8) break;
    }
    d.table_remainder = std::max(0.0, d.positive_mass.hi - cum);
    return d;
}

std::uint64_t sample_b_prime(const size_biased_law& sb, const survival_grid& grid,
                             double t, rng& r) {
    const double g = grid.g_at(t);
    const double e = grid.e_at(t);
    if (g <= 1e-14) return 0;
    const double phi = sb.pgf(g).mid();
    const double positive = std::min(1.0, g * phi / e); // sum_k q_k = G phi(G) / E
    if (r.u01() >= positive) return 0;
    // positive part: tilt p_k G^{k-1}, sampled by rejection from D*-1
    const double log_g = std::log(g);
    for (;;) {
        const std::uint64_t k = sb.sample(r);
        if (k == 1) return 1; // G^0 accepts always
        const double accept = std::exp(static_cast<double>(k - 1) * log_g);
        if (r.u01() < accept) return k;
    }
}

losing_trajectory simulate_losing_limit(const losing_limit_params& params, double v_w,
                                        std::uint64_t seed,
                                        const losing_init* supplied) {
    if (!params.winner_grid || !params.offspring)
        throw config_error("simulate_losing_limit: missing grid or offspring law");
    const survival_grid& grid = *params.winner_grid;
    const size_biased_law& sb = *params.offspring;
    rng r(derive_seed(seed, 0x105E));

    losing_trajectory out;
    std::vector<sorted_batch> batches;
    stream_queue queue; // event times on the T' clock (0 = winner explosion)

    if (supplied) {
        out.v_w = supplied->v_w;
        out.n_star = supplied->n_star;
        for (double res : supplied->residuals) {
            if (!(res > 0.0))
                throw config_error("losing init: residuals must be strictly positive");
            batches.push_back({0.0, 0, 0.0});
            queue.push({res, static_cast<std::uint32_t>(batches.size() - 1)});
        }
        out.s0 = supplied->residuals.size();
    } else {
        if (!params.degree_law)
            throw config_error("simulate_losing_limit: sampled init needs a degree law");
        // status at explosion: clock a free unimodular (D, X_loser) process
        // against v_w, conditioned on not exploding first (rejection).
        for (;;) {
            bp_engine eng{&sb, &params.loser_law, &r, {}, {}};
            eng.spawn(0.0, params.degree_law->sample(r));
            std::uint64_t n_star = 0;
            bool rejected = false;
            while (!eng.queue.empty() && eng.queue.top().time <= v_w) {
                eng.step();
                if (++n_star > params.reject_cap) {
                    rejected = true;
                    break;
                }
            }
            if (rejected) {
                ++out.rejections;
                continue;
            }
            out.v_w = v_w;
            out.n_star = n_star;
            std::uint64_t s0 = 0;
            // transfer live streams onto the T' clock
            while (!eng.queue.empty()) {
                const stream_event e = eng.queue.top();
                eng.queue.pop();
                sorted_batch b = eng.batches[e.id];
                b.base -= v_w;
                s0 += b.remaining + 1; // queued head plus the unserved rest
                batches.push_back(b);
                queue.push({e.time - v_w, static_cast<std::uint32_t>(batches.size() - 1)});
            }
            out.s0 = s0;
            break;
        }
    }

    std::uint64_t s_prime = out.s0;
    std::uint64_t m = 0;
    out.steps.reserve(256);
    while (s_prime > 0 && m < params.steps_cap) {
        const stream_event e = queue.top();
        queue.pop();
        sorted_batch& b = batches[e.id];
        if (b.remaining > 0) {
            const double w = b.next_weight(params.loser_law, r);
            queue.push({b.base + w, e.id});
        }
        ++m;
        const double t_prime = e.time;
        const std::uint64_t b_prime = sample_b_prime(sb, grid, t_prime, r);
        if (b_prime >= 1) {
            ++out.n_star_star;
            sorted_batch fresh{t_prime, b_prime, 0.0};
            const double w = fresh.next_weight(params.loser_law, r);
            batches.push_back(fresh);
            queue.push({t_prime + w, static_cast<std::uint32_t>(batches.size() - 1)});
        }
        s_prime = s_prime - 1 + b_prime; // eq-style bookkeeping: dS = B' - 1
        out.steps.push_back({m, t_prime, s_prime, b_prime});
    }
    out.hit_zero = (s_prime == 0);
    if (out.hit_zero) out.h_prime = m;
    return out;
}

} // namespace fpprace
