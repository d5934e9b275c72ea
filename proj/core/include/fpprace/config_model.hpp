#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "fpprace/degree_model.hpp"

namespace fpprace {

using vertex_id = std::uint32_t;
using halfedge_id = std::uint32_t;

/// Configuration-model multigraph stored as a half-edge pairing. Vertex v
/// owns the contiguous half-edge range [offsets[v], offsets[v+1]); mate is a
/// fixed-point-free involution. Self-loops and multi-edges are kept.
struct half_edge_graph {
    std::uint64_t n = 0;
    std::vector<std::uint64_t> offsets; // size n+1
    std::vector<halfedge_id> mate;      // size L
    std::vector<vertex_id> owner;       // size L, owner[h] = vertex of h
    std::uint64_t L = 0;

    std::uint32_t degree(vertex_id v) const {
        return static_cast<std::uint32_t>(offsets[v + 1] - offsets[v]);
    }
    vertex_id mate_vertex(halfedge_id h) const { return owner[mate[h]]; }

    /// involution / ownership / conservation invariants; throws on violation.
    void check_invariants(const degree_sequence* expected = nullptr) const;
};

struct graph_stats {
    std::uint64_t self_loops = 0;
    std::uint64_t multi_edges = 0; // edges beyond the first in a parallel bundle
    std::uint32_t max_degree = 0;
    std::vector<double> degree_pmf; // empirical, index = degree
};

/// Uniform perfect matching on half-edges: the lowest-id unmatched half-edge
/// is matched to a uniform unmatched partner, repeatedly. Deterministic given
/// seed. Requires an even total (the parity fix is degree_model's job).
half_edge_graph pair_uniform(const degree_sequence& degrees, std::uint64_t seed);

/// (halfedge, mate-vertex) pairs incident to v, in half-edge order.
std::vector<std::pair<halfedge_id, vertex_id>> neighbors_via_halfedges(
    const half_edge_graph& g, vertex_id v);

graph_stats compute_stats(const half_edge_graph& g);

/// Text format: "n L" header line, then one "h mate[h]" line per half-edge h
/// in increasing h. Degrees are implied by a following offsets block; see
/// write_graph for the exact layout.
void write_graph(std::ostream& os, const half_edge_graph& g);
half_edge_graph read_graph(std::istream& is);

} // namespace fpprace
