#include "fpprace/config_model.hpp"

#include <algorithm>
#include <istream>
#include <ostream>
#include <unordered_map>

#include "fpprace/errors.hpp"

namespace fpprace {

half_edge_graph pair_uniform(const degree_sequence& degrees, std::uint64_t seed) {
    if (degrees.total % 2 != 0)
        throw config_error("pair_uniform: total degree must be even");
    half_edge_graph g;
    g.n = degrees.n;
    g.L = degrees.total;
    g.offsets.resize(g.n + 1);
    g.offsets[0] = 0;
    for (std::uint64_t v = 0; v < g.n; ++v)
        g.offsets[v + 1] = g.offsets[v] + degrees.degrees[v];
    g.owner.resize(g.L);
    for (std::uint64_t v = 0; v < g.n; ++v)
        for (std::uint64_t h = g.offsets[v]; h < g.offsets[v + 1]; ++h)
            g.owner[h] = static_cast<vertex_id>(v);

    constexpr halfedge_id unmatched = 0xffffffffu;
    g.mate.assign(g.L, unmatched);

    // pool of unmatched half-edges with swap-removal
    std::vector<halfedge_id> pool(g.L);
    std::vector<std::uint64_t> pos(g.L);
    for (std::uint64_t h = 0; h < g.L; ++h) {
        pool[h] = static_cast<halfedge_id>(h);
        pos[h] = h;
    }
    std::uint64_t pool_size = g.L;
    auto remove = [&](halfedge_id h) {
        const std::uint64_t p = pos[h];
        const halfedge_id last = pool[pool_size - 1];
        pool[p] = last;
        pos[last] = p;
        --pool_size;
    };

    rng r(derive_seed(seed, 0xC4A1));
    for (std::uint64_t h = 0; h < g.L; ++h) {
        if (g.mate[h] != unmatched) continue;
        remove(static_cast<halfedge_id>(h));
        const halfedge_id partner = pool[r.below(pool_size)];
        remove(partner);
        g.mate[h] = partner;
        g.mate[partner] = static_cast<halfedge_id>(h);
    }
    return g;
}

void half_edge_graph::check_invariants(const degree_sequence* expected) const {
    if (offsets.size() != n + 1 || mate.size() != L || owner.size() != L)
        throw config_error("half_edge_graph: inconsistent sizes");
    if (L % 2 != 0) throw config_error("half_edge_graph: odd half-edge count");
    for (std::uint64_t h = 0; h < L; ++h) {
        if (mate[h] == h) throw config_error("half_edge_graph: fixed point in mate");
        if (mate[mate[h]] != h) throw config_error("half_edge_graph: mate not involutive");
        if (h < offsets[owner[h]] || h >= offsets[owner[h] + 1])
            throw config_error("half_edge_graph: ownership broken");
    }
    if (expected) {
        for (std::uint64_t v = 0; v < n; ++v)
            if (degree(static_cast<vertex_id>(v)) != expected->degrees[v])
                throw config_error("half_edge_graph: degree mismatch with sequence");
    }
}

std::vector<std::pair<halfedge_id, vertex_id>> neighbors_via_halfedges(
    const half_edge_graph& g, vertex_id v) {
    if (v >= g.n) throw std::domain_error("neighbors_via_halfedges: vertex out of range");
    std::vector<std::pair<halfedge_id, vertex_id>> out;
    out.reserve(g.degree(v));
    for (std::uint64_t h = g.offsets[v]; h < g.offsets[v + 1]; ++h)
        out.emplace_back(static_cast<halfedge_id>(h), g.mate_vertex(static_cast<halfedge_id>(h)));
    return out;
}

graph_stats compute_stats(const half_edge_graph& g) {
    graph_stats s;
    std::unordered_map<std::uint64_t, std::uint32_t> bundle;
    bundle.reserve(g.L / 2);
    for (std::uint64_t h = 0; h < g.L; ++h) {
        const halfedge_id m = g.mate[h];
        if (m < h) continue; // count each edge once
        const vertex_id a = g.owner[h], b = g.owner[m];
        if (a == b) {
            ++s.self_loops;
            continue;
        }
        const std::uint64_t key =
            (static_cast<std::uint64_t>(std::min(a, b)) << 32) | std::max(a, b);
        if (++bundle[key] > 1) ++s.multi_edges;
    }
    std::uint32_t maxd = 0;
    for (std::uint64_t v = 0; v < g.n; ++v) maxd = std::max(maxd, g.degree(static_cast<vertex_id>(v)));
    s.max_degree = maxd;
    s.degree_pmf.assign(maxd + 1, 0.0);
    for (std::uint64_t v = 0; v < g.n; ++v)
        s.degree_pmf[g.degree(static_cast<vertex_id>(v))] += 1.0 / static_cast<double>(g.n);
    return s;
}

void write_graph(std::ostream& os, const half_edge_graph& g) {
    os << g.n << " " << g.L << "\n";
    for (std::uint64_t v = 0; v < g.n; ++v) os << g.degree(static_cast<vertex_id>(v)) << "\n";
    for (std::uint64_t h = 0; h < g.L; ++h) os << h << " " << g.mate[h] << "\n";
}

half_edge_graph read_graph(std::istream& is) {
    half_edge_graph g;
    if (!(is >> g.n >> g.L)) throw config_error("graph file: bad header");
    g.offsets.resize(g.n + 1);
    g.offsets[0] = 0;
    for (std::uint64_t v = 0; v < g.n; ++v) {
        std::uint32_t d = 0;
        if (!(is >> d)) throw config_error("graph file: truncated degree block");
        g.offsets[v + 1] = g.offsets[v] + d;
    }
    if (g.offsets[g.n] != g.L) throw config_error("graph file: degrees do not sum to L");
    g.owner.resize(g.L);
    for (std::uint64_t v = 0; v < g.n; ++v)
        for (std::uint64_t h = g.offsets[v]; h < g.offsets[v + 1]; ++h)
            g.owner[h] = static_cast<vertex_id>(v);
    g.mate.assign(g.L, 0);
    for (std::uint64_t i = 0; i < g.L; ++i) {
        std::uint64_t h = 0, m = 0;
        if (!(is >> h >> m) || h >= g.L || m >= g.L)
            throw config_error("graph file: bad pair line");
        g.mate[h] = static_cast<halfedge_id>(m);
    }
    g.check_invariants();
    return g;
}

} // namespace fpprace
