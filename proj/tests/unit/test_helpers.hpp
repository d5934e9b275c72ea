#pragma once

#include <vector>

#include "fpprace/config_model.hpp"

namespace fpprace::testing {

/// Builds a half_edge_graph with an explicit pairing: degrees per vertex plus
/// a list of half-edge pairs covering every half-edge exactly once.
inline half_edge_graph make_graph(const std::vector<std::uint32_t>& degrees,
                                  const std::vector<std::pair<halfedge_id, halfedge_id>>& pairs) {
    half_edge_graph g;
    g.n = degrees.size();
    g.offsets.resize(g.n + 1);
    g.offsets[0] = 0;
    for (std::size_t v = 0; v < g.n; ++v) g.offsets[v + 1] = g.offsets[v] + degrees[v];
    g.L = g.offsets[g.n];
    g.owner.resize(g.L);
    for (std::size_t v = 0; v < g.n; ++v)
        for (std::uint64_t h = g.offsets[v]; h < g.offsets[v + 1]; ++h)
            g.owner[h] = static_cast<vertex_id>(v);
    g.mate.assign(g.L, 0);
    for (auto [a, b] : pairs) {
        g.mate[a] = b;
        g.mate[b] = a;
    }
    g.check_invariants();
    return g;
}

/// Path v0 - v1 - ... - v_{k-1}; edge i pairs half-edges in order.
inline half_edge_graph make_path(std::size_t k) {
    std::vector<std::uint32_t> degs(k, 2);
    degs.front() = 1;
    degs.back() = 1;
    std::vector<std::pair<halfedge_id, halfedge_id>> pairs;
    // vertex 0 owns h0; inner vertex i owns two; the left one links backwards
    halfedge_id h = 0;
    std::vector<halfedge_id> left(k), right(k);
    for (std::size_t v = 0; v < k; ++v) {
        if (v == 0) {
            right[v] = h++;
        } else if (v + 1 == k) {
            left[v] = h++;
        } else {
            left[v] = h++;
            right[v] = h++;
        }
    }
    for (std::size_t v = 0; v + 1 < k; ++v) pairs.emplace_back(right[v], left[v + 1]);
    return make_graph(degs, pairs);
}

} // namespace fpprace::testing
