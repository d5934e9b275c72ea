#include "fpprace/fpp.hpp"

#include <algorithm>
#include <cmath>
#include <queue>

#include "fpprace/errors.hpp"

namespace fpprace {

namespace {

struct queue_entry {
    double time;
    halfedge_id h;
    std::uint64_t seq; // tie-break for deterministic-weight runs
};
struct entry_after {
    bool operator()(const queue_entry& a, const queue_entry& b) const {
        if (a.time != b.time) return a.time > b.time;
        return a.seq > b.seq;
    }
};
using event_queue = std::priority_queue<queue_entry, std::vector<queue_entry>, entry_after>;

constexpr halfedge_id no_mate = 0xffffffffu;

} // namespace

namespace {

template <typename WeightFn>
exploration_trace explore_impl(const half_edge_graph& g, vertex_id source,
                               WeightFn&& weight_of, stop_rule stop,
                               bool record_active_history) {
    if (source >= g.n) throw std::domain_error("explore: source out of range");

    exploration_trace tr;
    tr.source = source;
    tr.stop = stop;

    std::vector<double> occupied_at(g.n, std::numeric_limits<double>::infinity());
    event_queue q;
    std::uint64_t seq = 0;

    auto relax_vertex = [&](vertex_id v, double t) {
        for (std::uint64_t h = g.offsets[v]; h < g.offsets[v + 1]; ++h) {
            const halfedge_id hh = static_cast<halfedge_id>(h);
            const double w = weight_of(std::min(hh, g.mate[hh]));
            if (!std::isfinite(w)) continue; // +inf proxy laws never fire
            const vertex_id target = g.mate_vertex(hh);
            if (occupied_at[target] < t + w) continue; // already colonised earlier
            q.push({t + w, hh, seq++});
        }
    };

    occupied_at[source] = 0.0;
    relax_vertex(source, 0.0);

    while (!q.empty()) {
        const queue_entry e = q.top();
        q.pop();
        const vertex_id v = g.mate_vertex(e.h);
        if (occupied_at[v] <= e.time) continue; // lazy deletion (cycle removal)
        if (stop.what == stop_rule::kind::time_horizon && e.time > stop.t_star) {
            tr.exhausted = false;
            return tr;
        }
        occupied_at[v] = e.time;
        tr.events.push_back({e.time, v, g.degree(v) - 1, e.h});
        if (record_active_history) tr.active_size_history.push_back(q.size());
        if (stop.what == stop_rule::kind::discovered && tr.events.size() >= stop.m)
            return tr;
        relax_vertex(v, e.time);
    }
    tr.exhausted = true;
    return tr;
}

} // namespace

exploration_trace explore(const half_edge_graph& g, vertex_id source,
                          const weight_law& law, stop_rule stop, std::uint64_t seed,
                          bool record_active_history) {
    std::vector<double> edge_weight(g.L, std::numeric_limits<double>::quiet_NaN());
    rng wrng(derive_seed(seed, 1));
    auto weight_of = [&](halfedge_id key) {
        double& w = edge_weight[key];
        if (std::isnan(w)) w = law.sample(wrng);
        return w;
    };
    return explore_impl(g, source, weight_of, stop, record_active_history);
}

exploration_trace explore_given_weights(const half_edge_graph& g, vertex_id source,
                                        const std::vector<double>& edge_weights,
                                        stop_rule stop) {
    if (edge_weights.size() != g.L)
        throw config_error("explore_given_weights: need one slot per half-edge "
                           "(indexed by the lower id of each pair)");
    auto weight_of = [&](halfedge_id key) { return edge_weights[key]; };
    return explore_impl(g, source, weight_of, stop, false);
}

lazy_exploration explore_lazy(const degree_sequence& degrees, vertex_id source,
                              const weight_law& law, stop_rule stop,
                              std::uint64_t seed) {
    const std::uint64_t n = degrees.n;
    if (source >= n) throw std::domain_error("explore_lazy: source out of range");
    if (stop.what == stop_rule::kind::discovered && stop.m > n / 2)
        throw config_error("explore_lazy: stop exceeds n/2 discoveries (outside the "
                           "coupling regime)");

    const std::uint64_t L = degrees.total;
    std::vector<std::uint64_t> offsets(n + 1, 0);
    for (std::uint64_t v = 0; v < n; ++v) offsets[v + 1] = offsets[v] + degrees.degrees[v];
    std::vector<vertex_id> owner(L);
    for (std::uint64_t v = 0; v < n; ++v)
        for (std::uint64_t h = offsets[v]; h < offsets[v + 1]; ++h)
            owner[h] = static_cast<vertex_id>(v);

    lazy_exploration out;
    out.trace.source = source;
    out.trace.stop = stop;
    out.mate.assign(L, no_mate);

    std::vector<halfedge_id> pool(L);
    std::vector<std::uint64_t> pos(L);
    for (std::uint64_t h = 0; h < L; ++h) {
        pool[h] = static_cast<halfedge_id>(h);
        pos[h] = h;
    }
    std::uint64_t pool_size = L;
    auto pool_remove = [&](halfedge_id h) {
        const std::uint64_t p = pos[h];
        const halfedge_id last = pool[pool_size - 1];
        pool[p] = last;
        pos[last] = p;
        --pool_size;
    };

    rng prng(derive_seed(seed, 2)); // pairing stream
    rng wrng(derive_seed(seed, 1)); // weight stream
    std::vector<char> discovered(n, 0);
    event_queue q;
    std::uint64_t seq = 0;

    auto activate = [&](vertex_id v, double t, halfedge_id skip) {
        for (std::uint64_t h = offsets[v]; h < offsets[v + 1]; ++h) {
            const halfedge_id hh = static_cast<halfedge_id>(h);
            if (hh == skip || out.mate[hh] != no_mate) continue;
            const double w = law.sample(wrng);
            if (!std::isfinite(w)) continue;
            q.push({t + w, hh, seq++});
        }
    };

    discovered[source] = 1;
    activate(source, 0.0, no_mate);

    while (!q.empty()) {
        const queue_entry e = q.top();
        q.pop();
        if (out.mate[e.h] != no_mate) continue; // screened out by cycle removal
        if (stop.what == stop_rule::kind::time_horizon && e.time > stop.t_star) break;

        pool_remove(e.h);
        const halfedge_id y = pool[prng.below(pool_size)];
        pool_remove(y);
        out.mate[e.h] = y;
        out.mate[y] = e.h;

        const vertex_id v = owner[y];
        if (discovered[v]) continue; // cycle or self-loop: both half-edges retired
        discovered[v] = 1;
        out.trace.events.push_back({e.time, v, degrees.degrees[v] - 1, e.h});
        if (stop.what == stop_rule::kind::discovered && out.trace.events.size() >= stop.m)
            break;
        activate(v, e.time, y);
    }
    if (q.empty()) out.trace.exhausted = true;

    out.unpaired.assign(pool.begin(), pool.begin() + pool_size);
    std::sort(out.unpaired.begin(), out.unpaired.end());
    return out;
}

lazy_pair_exploration explore_lazy_pair(const degree_sequence& degrees, vertex_id s1,
                                        vertex_id s2, const weight_law& law1,
                                        const weight_law& law2, std::uint64_t m_each,
                                        std::uint64_t seed) {
    const std::uint64_t n = degrees.n;
    if (s1 >= n || s2 >= n) throw std::domain_error("explore_lazy_pair: source out of range");
    if (s1 == s2) throw config_error("explore_lazy_pair: sources must be distinct");
    if (m_each > n / 2)
        throw config_error("explore_lazy_pair: stop exceeds n/2 discoveries");

    const std::uint64_t L = degrees.total;
    std::vector<std::uint64_t> offsets(n + 1, 0);
    for (std::uint64_t v = 0; v < n; ++v) offsets[v + 1] = offsets[v] + degrees.degrees[v];
    std::vector<vertex_id> owner(L);
    for (std::uint64_t v = 0; v < n; ++v)
        for (std::uint64_t h = offsets[v]; h < offsets[v + 1]; ++h)
            owner[h] = static_cast<vertex_id>(v);

    lazy_pair_exploration out;
    out.trace1.source = s1;
    out.trace2.source = s2;

    std::vector<halfedge_id> mate(L, no_mate);
    std::vector<halfedge_id> pool(L);
    std::vector<std::uint64_t> pos(L);
    for (std::uint64_t h = 0; h < L; ++h) {
        pool[h] = static_cast<halfedge_id>(h);
        pos[h] = h;
    }
    std::uint64_t pool_size = L;
    auto pool_remove = [&](halfedge_id h) {
        const std::uint64_t p = pos[h];
        const halfedge_id last = pool[pool_size - 1];
        pool[p] = last;
        pos[last] = p;
        --pool_size;
    };

    struct tagged_entry {
        double time;
        halfedge_id h;
        std::uint8_t type;
        std::uint64_t seq;
    };
    struct tagged_after {
        bool operator()(const tagged_entry& a, const tagged_entry& b) const {
            if (a.time != b.time) return a.time > b.time;
            if (a.type != b.type) return a.type > b.type;
            return a.seq > b.seq;
        }
    };
    std::priority_queue<tagged_entry, std::vector<tagged_entry>, tagged_after> q;

    rng prng(derive_seed(seed, 2));
    rng wrng1(derive_seed(seed, 1));
    rng wrng2(derive_seed(seed, 3));
    std::vector<std::uint8_t> found_by(n, 0); // bitmask: 1 and/or 2
    std::uint64_t seq = 0;

    auto activate = [&](vertex_id v, double t, halfedge_id skip, std::uint8_t type) {
        rng& wr = type == 1 ? wrng1 : wrng2;
        const weight_law& law = type == 1 ? law1 : law2;
        for (std::uint64_t h = offsets[v]; h < offsets[v + 1]; ++h) {
            const halfedge_id hh = static_cast<halfedge_id>(h);
            if (hh == skip || mate[hh] != no_mate) continue;
            const double w = law.sample(wr);
            if (!std::isfinite(w)) continue;
            q.push({t + w, hh, type, seq++});
        }
    };

    found_by[s1] |= 1;
    found_by[s2] |= 2;
    activate(s1, 0.0, no_mate, 1);
    activate(s2, 0.0, no_mate, 2);

    std::uint64_t found1 = 0, found2 = 0;
    while (!q.empty() && (found1 < m_each || found2 < m_each)) {
        const tagged_entry e = q.top();
        q.pop();
        if (mate[e.h] != no_mate) continue;
        std::uint64_t& my_count = e.type == 1 ? found1 : found2;
        if (my_count >= m_each) continue; // this exploration is frozen

        pool_remove(e.h);
        const halfedge_id y = pool[prng.below(pool_size)];
        pool_remove(y);
        mate[e.h] = y;
        mate[y] = e.h;

        const vertex_id v = owner[y];
        const std::uint8_t mine = e.type, other = static_cast<std::uint8_t>(3 - e.type);
        if (found_by[v] & other) out.contact = true;
        if (found_by[v] & mine) continue; // own cycle, screened
        found_by[v] |= mine;
        ++my_count;
        auto& tr = e.type == 1 ? out.trace1 : out.trace2;
        tr.events.push_back({e.time, v, degrees.degrees[v] - 1, e.h});
        if (my_count < m_each) activate(v, e.time, y, e.type);
    }
    return out;
}

epidemic_curve_empirical tabulate_curve(const half_edge_graph& g,
                                        const std::vector<std::pair<double, vertex_id>>& events,
                                        vertex_id source, std::uint64_t a_n,
                                        double clock_start,
                                        const std::vector<double>& tgrid,
                                        std::uint32_t degree_cap) {
    epidemic_curve_empirical c;
    c.tgrid = tgrid;
    c.degree_cap = degree_cap;
    c.a_n = a_n;
    c.n = g.n;
    c.clock_start = clock_start;
    const std::uint32_t rows = degree_cap + 2; // per-k rows plus the >cap bucket
    c.occupied.assign(rows, std::vector<double>(tgrid.size(), 0.0));
    c.edge_fraction.assign(tgrid.size(), 0.0);

    c.degree_pmf_hat.assign(rows, 0.0);
    for (std::uint64_t v = 0; v < g.n; ++v) {
        const std::uint32_t d = g.degree(static_cast<vertex_id>(v));
        c.degree_pmf_hat[std::min(d, degree_cap + 1)] += 1.0 / static_cast<double>(g.n);
    }

    auto row_of = [&](vertex_id v) { return std::min(g.degree(v), degree_cap + 1); };

    // events are time-sorted; sweep the grid with a single pointer
    const double inv_n = 1.0 / static_cast<double>(g.n);
    const double inv_edges = 2.0 / static_cast<double>(g.L);
    std::vector<double> row_acc(rows, 0.0);
    row_acc[row_of(source)] += inv_n; // the source is occupied from time 0
    double edge_acc = 0.0;
    std::size_t ev = 0;
    for (std::size_t i = 0; i < tgrid.size(); ++i) {
        const double cutoff = clock_start + tgrid[i];
        while (ev < events.size() && events[ev].first <= cutoff) {
            row_acc[row_of(events[ev].second)] += inv_n;
            edge_acc += inv_edges; // each discovery consumes one spreading edge
            ++ev;
        }
        for (std::uint32_t k = 0; k < rows; ++k) c.occupied[k][i] = row_acc[k];
        c.edge_fraction[i] = edge_acc;
    }
    double occ = 0.0;
    for (std::uint32_t k = 0; k < rows; ++k) occ += row_acc[k];
    c.saturation = occ;
    return c;
}

epidemic_curve_empirical epidemic_curve(const half_edge_graph& g, vertex_id source,
                                        const weight_law& law, std::uint64_t a_n,
                                        const std::vector<double>& tgrid,
                                        std::uint64_t seed) {
    if (a_n >= g.n) throw config_error("epidemic_curve: a_n must be below n");
    if (a_n == 0) throw config_error("epidemic_curve: a_n must be positive");
    if (tgrid.empty()) throw config_error("epidemic_curve: empty time grid");
    const double t_max = tgrid.back();

    // explore to exhaustion, but once the a_n-th discovery fixes the clock we
    // can cut at T_{a_n} + t_max; emulate with a two-phase run
    exploration_trace head = explore(g, source, law, stop_rule::discovered(a_n), seed);
    if (head.discovered() < a_n)
        throw config_error("epidemic_curve: source component exhausted before a_n "
                           "discoveries; choose another source");
    const double t_an = head.events.back().time;
    exploration_trace full =
        explore(g, source, law, stop_rule::time_horizon(t_an + t_max), seed);

    std::vector<std::pair<double, vertex_id>> events;
    events.reserve(full.events.size());
    for (const auto& e : full.events) events.emplace_back(e.time, e.vertex);
    return tabulate_curve(g, events, source, a_n, t_an, tgrid);
}

} // namespace fpprace
