#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

#include "fpprace/config_model.hpp"
#include "fpprace/weight_law.hpp"

namespace fpprace {

/// Stopping rule for an exploration: stop after M discoveries, at a time
/// horizon, or run to exhaustion of the reachable component.
struct stop_rule {
    enum class kind { discovered, time_horizon, exhaustion } what = kind::exhaustion;
    std::uint64_t m = 0;
    double t_star = 0.0;

    static stop_rule discovered(std::uint64_t m) { return {kind::discovered, m, 0.0}; }
    static stop_rule time_horizon(double t) { return {kind::time_horizon, 0, t}; }
    static stop_rule exhaustion() { return {}; }
};

struct exploration_event {
    double time;                 // T_m, strictly increasing for continuous laws
    vertex_id vertex;            // the (m+1)st vertex of the smallest-weight graph
    std::uint32_t forward_degree; // degree minus one (the spreading edge is used up)
    halfedge_id parent_halfedge; // half-edge on the already-discovered side
};

struct exploration_trace {
    vertex_id source = 0;
    std::vector<exploration_event> events; // ordered by time
    stop_rule stop;
    bool exhausted = false; // queue drained before the rule fired
    std::vector<std::uint64_t> active_size_history; // optional, per event

    std::uint64_t discovered() const { return events.size(); }
    /// T_m with T_0 = 0 (the source); m in [0, events.size()].
    double time_of(std::uint64_t m) const { return m == 0 ? 0.0 : events[m - 1].time; }
};

/// Full-graph first-passage percolation from `source`. One weight per edge,
/// drawn lazily on first frontier contact and cached; arrivals are queued per
/// half-edge and entries whose target is already discovered are discarded on
/// pop (this lazy deletion is exactly the cycle-removal screening: discarded
/// entries are those that would close a cycle).
exploration_trace explore(const half_edge_graph& g, vertex_id source,
                          const weight_law& law, stop_rule stop, std::uint64_t seed,
                          bool record_active_history = false);

/// Same engine with externally supplied edge weights, indexed by the lower
/// half-edge id of each pair. Used by exact small-instance oracles.
exploration_trace explore_given_weights(const half_edge_graph& g, vertex_id source,
                                        const std::vector<double>& edge_weights,
                                        stop_rule stop);

/// On-the-fly variant: the pairing is constructed jointly with the
/// exploration. The fired half-edge pairs to a uniform unpaired half-edge;
/// pairs landing inside the smallest-weight graph close a cycle and both
/// half-edges leave the active set. The partial pairing is extendable to a
/// full uniform pairing.
struct lazy_exploration {
    exploration_trace trace;
    std::vector<halfedge_id> mate;      // 0xffffffff where still unpaired
    std::vector<halfedge_id> unpaired;  // the remaining pool
};
lazy_exploration explore_lazy(const degree_sequence& degrees, vertex_id source,
                              const weight_law& law, stop_rule stop,
                              std::uint64_t seed);

/// Joint free exploration from two sources with independent weight families
/// on a shared on-the-fly pairing; used for disjointness diagnostics. Each
/// exploration runs until it has made `m_each` discoveries. `contact` is set
/// if one exploration paired into a vertex already discovered by the other.
struct lazy_pair_exploration {
    exploration_trace trace1, trace2;
    bool contact = false;
};
lazy_pair_exploration explore_lazy_pair(const degree_sequence& degrees, vertex_id s1,
                                        vertex_id s2, const weight_law& law1,
                                        const weight_law& law2, std::uint64_t m_each,
                                        std::uint64_t seed);

/// Empirical epidemic curve: fractions of degree-k vertices occupied at
/// T_{a_n} + t and the fraction of edges that have spread the flow, on a
/// fixed grid of offsets t.
struct epidemic_curve_empirical {
    std::vector<double> tgrid;       // offsets from the clock start
    std::uint32_t degree_cap = 64;   // per-degree rows up to here
    // occupied[k][i] = fraction of vertices with degree k occupied at t_i;
    // row degree_cap+1 aggregates all degrees above the cap.
    std::vector<std::vector<double>> occupied;
    std::vector<double> edge_fraction; // of L_n/2
    std::vector<double> degree_pmf_hat; // empirical degree fractions, same rows
    std::uint64_t a_n = 0;
    std::uint64_t n = 0;
    double clock_start = 0.0; // T_{a_n} in absolute exploration time
    double saturation = 0.0;  // fraction of vertices occupied at the end of the run
};

/// Runs the exploration to T_{a_n} + max(tgrid) (or exhaustion) and tabulates
/// the curve. a_n must be below n.
epidemic_curve_empirical epidemic_curve(const half_edge_graph& g, vertex_id source,
                                        const weight_law& law, std::uint64_t a_n,
                                        const std::vector<double>& tgrid,
                                        std::uint64_t seed);

/// Shared helper: tabulate a curve from any (time, vertex) event list.
epidemic_curve_empirical tabulate_curve(const half_edge_graph& g,
                                        const std::vector<std::pair<double, vertex_id>>& events,
                                        vertex_id source, std::uint64_t a_n,
                                        double clock_start,
                                        const std::vector<double>& tgrid,
                                        std::uint32_t degree_cap = 64);

} // namespace fpprace
