#include "fpprace/competition.hpp"

#include <algorithm>
#include <cmath>
#include <queue>

#include "fpprace/errors.hpp"

namespace fpprace {

namespace {

struct race_entry {
    double time;
    halfedge_id h;
    std::uint8_t type;
    std::uint64_t seq;
};
struct race_after {
    bool operator()(const race_entry& a, const race_entry& b) const {
        if (a.time != b.time) return a.time > b.time;
        if (a.type != b.type) return a.type > b.type; // type 1 wins ties
        return a.seq > b.seq;
    }
};

} // namespace

race_result race(const half_edge_graph& g, const competition_config& cfg,
                 std::uint64_t seed) {
    const std::uint64_t n = g.n;
    vertex_id s1 = cfg.v1, s2 = cfg.v2;
    if (cfg.source_rule == competition_config::sources::uniform_distinct) {
        rng sr(derive_seed(seed, 4));
        s1 = static_cast<vertex_id>(sr.below(n));
        do {
            s2 = static_cast<vertex_id>(sr.below(n));
        } while (s2 == s1);
    }
    if (s1 >= n || s2 >= n) throw config_error("race: source out of range");
    if (s1 == s2) throw config_error("race: sources must be distinct");
    if (!(cfg.rho > 0.0) || cfg.rho > 0.2)
        throw config_error("race: rho must lie in (0, 0.2]");

    race_result rr;
    rr.outcome.source1 = s1;
    rr.outcome.source2 = s2;
    rr.outcome.non_explosive_warning = !cfg.law1.explosive() && !cfg.law2.explosive();
    const auto a_n = static_cast<std::uint64_t>(
        std::ceil(std::pow(static_cast<double>(n), cfg.rho)));
    const std::uint64_t half = (a_n + 1) / 2;
    rr.outcome.a_n = a_n;
    rr.outcome.half_index = half;

    rr.color.assign(n, 0);
    rr.occupied_at.assign(n, std::numeric_limits<double>::infinity());
    std::vector<double> w1(g.L, std::numeric_limits<double>::quiet_NaN());
    std::vector<double> w2(g.L, std::numeric_limits<double>::quiet_NaN());
    rng wr1(derive_seed(seed, 1));
    rng wr2(derive_seed(seed, 3));

    std::priority_queue<race_entry, std::vector<race_entry>, race_after> q;
    std::uint64_t seq = 0;

    auto relax = [&](vertex_id v, double t, std::uint8_t type) {
        std::vector<double>& w = type == 1 ? w1 : w2;
        rng& wr = type == 1 ? wr1 : wr2;
        const weight_law& law = type == 1 ? cfg.law1 : cfg.law2;
        for (std::uint64_t h = g.offsets[v]; h < g.offsets[v + 1]; ++h) {
            const halfedge_id hh = static_cast<halfedge_id>(h);
            const halfedge_id key = std::min(hh, g.mate[hh]);
            double& x = w[key];
            if (std::isnan(x)) x = law.sample(wr);
            if (!std::isfinite(x)) continue;
            const vertex_id target = g.mate_vertex(hh);
            if (rr.color[target] != 0) continue; // already colonised, never re-enters
            q.push({t + x, hh, type, seq++});
        }
    };

    rr.color[s1] = 1;
    rr.occupied_at[s1] = 0.0;
    rr.color[s2] = 2;
    rr.occupied_at[s2] = 0.0;
    relax(s1, 0.0, 1);
    relax(s2, 0.0, 2);

    std::uint64_t count1 = 0, count2 = 0;
    while (!q.empty()) {
        const race_entry e = q.top();
        q.pop();
        const vertex_id v = g.mate_vertex(e.h);
        if (rr.color[v] != 0) {
            if (rr.color[v] != static_cast<std::int8_t>(e.type))
                rr.outcome.first_cross_block = std::min(rr.outcome.first_cross_block, e.time);
            continue;
        }
        rr.color[v] = static_cast<std::int8_t>(e.type);
        rr.occupied_at[v] = e.time;
        if (e.type == 1) {
            rr.events1.emplace_back(e.time, v);
            if (++count1 == half) rr.outcome.t1_half = e.time;
        } else {
            rr.events2.emplace_back(e.time, v);
            if (++count2 == half) rr.outcome.t2_half = e.time;
        }
        relax(v, e.time, e.type);
    }

    auto& oc = rr.outcome;
    oc.occupied1 = count1 + 1;
    oc.occupied2 = count2 + 1;
    oc.unreached = n - oc.occupied1 - oc.occupied2;
    oc.winner = oc.occupied1 >= oc.occupied2 ? 1 : 2;
    oc.n_loss = oc.winner == 1 ? oc.occupied2 : oc.occupied1;

    const double tw_half = oc.winner == 1 ? oc.t1_half : oc.t2_half;
    if (std::isfinite(tw_half)) {
        const auto& loser_events = oc.winner == 1 ? rr.events2 : rr.events1;
        oc.n_loss_star = static_cast<std::uint64_t>(
            std::upper_bound(loser_events.begin(), loser_events.end(),
                             std::make_pair(tw_half, std::numeric_limits<vertex_id>::max())) -
            loser_events.begin());
    }

    if (std::isfinite(oc.t1_half) || std::isfinite(oc.t2_half)) {
        oc.explosion_order_winner = oc.t1_half <= oc.t2_half ? 1 : 2;
        oc.proxy_mismatch = oc.explosion_order_winner != oc.winner;
    }

    // earliest time a direct edge joins the two occupied sets
    for (std::uint64_t h = 0; h < g.L; ++h) {
        const halfedge_id m = g.mate[h];
        if (m < h) continue;
        const vertex_id a = g.owner[h], b = g.owner[m];
        if (rr.color[a] == 0 || rr.color[b] == 0 || rr.color[a] == rr.color[b]) continue;
        oc.first_direct_edge =
            std::min(oc.first_direct_edge, std::max(rr.occupied_at[a], rr.occupied_at[b]));
    }

    oc.disjoint_at.resize(cfg.eps_probes.size());
    const double base = std::min(oc.t1_half, oc.t2_half);
    for (std::size_t i = 0; i < cfg.eps_probes.size(); ++i) {
        if (!std::isfinite(base)) {
            oc.disjoint_at[i] = 2; // probe unreachable
            continue;
        }
        const double probe = base + cfg.eps_probes[i];
        const bool overlap = oc.first_cross_block <= probe || oc.first_direct_edge <= probe;
        oc.disjoint_at[i] = overlap ? 0 : 1;
    }
    return rr;
}

epidemic_curve_empirical winning_curve(const half_edge_graph& g, const race_result& rr,
                                       const std::vector<double>& tgrid) {
    const auto& oc = rr.outcome;
    const double clock = oc.winner == 1 ? oc.t1_half : oc.t2_half;
    if (!std::isfinite(clock))
        throw config_error("winning_curve: the winner never reached a_n/2 discoveries");
    const auto& events = oc.winner == 1 ? rr.events1 : rr.events2;
    const vertex_id source = oc.winner == 1 ? oc.source1 : oc.source2;
    return tabulate_curve(g, events, source, oc.half_index, clock, tgrid);
}

std::optional<double> unexplored_second_moment(const half_edge_graph& g,
                                               const race_result& rr, double eps) {
    const auto& oc = rr.outcome;
    const double clock = oc.winner == 1 ? oc.t1_half : oc.t2_half;
    if (!std::isfinite(clock)) return std::nullopt;
    const double probe = clock + eps;
    const auto w = static_cast<std::int8_t>(oc.winner);
    double acc = 0.0;
    std::uint64_t count = 0;
    for (std::uint64_t v = 0; v < g.n; ++v) {
        if (rr.color[v] == w && rr.occupied_at[v] <= probe) continue;
        const double d = g.degree(static_cast<vertex_id>(v));
        acc += d * d;
        ++count;
    }
    if (count == 0) return std::nullopt;
    return acc / static_cast<double>(count);
}

} // namespace fpprace
