#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

#include "fpprace/config_model.hpp"
#include "fpprace/fpp.hpp"
#include "fpprace/weight_law.hpp"

namespace fpprace {

struct competition_config {
    weight_law law1 = weight_law::exponential(1.0);
    weight_law law2 = weight_law::exponential(1.0);
    enum class sources { uniform_distinct, fixed } source_rule = sources::uniform_distinct;
    vertex_id v1 = 0, v2 = 0; // used when source_rule == fixed
    double rho = 0.1;         // a_n = ceil(n^rho); capped at 0.2 upstream
    std::vector<double> eps_probes;
};

/// not-applicable marker for probe-dependent statistics
inline constexpr std::uint64_t na_count = std::numeric_limits<std::uint64_t>::max();

struct competition_outcome {
    int winner = 1; // by final occupied count; ties go to type 1
    vertex_id source1 = 0, source2 = 0;
    std::uint64_t occupied1 = 0, occupied2 = 0, unreached = 0;
    std::uint64_t n_loss = 0;      // total vertices of the losing type, source included
    std::uint64_t n_loss_star = na_count; // losing discoveries by T^(W)_{a_n/2}
    double t1_half = std::numeric_limits<double>::infinity();
    double t2_half = std::numeric_limits<double>::infinity();
    int explosion_order_winner = 0; // smaller T_half proxy; 0 when undefined
    bool proxy_mismatch = false;    // proxy disagrees with the occupied-count winner
    std::vector<std::uint8_t> disjoint_at; // per eps: 1 yes, 0 no, 2 not applicable
    double first_cross_block = std::numeric_limits<double>::infinity();
    double first_direct_edge = std::numeric_limits<double>::infinity();
    bool non_explosive_warning = false;
    std::uint64_t a_n = 0, half_index = 0;
};

/// Full race state kept for curves and diagnostics.
struct race_result {
    competition_outcome outcome;
    std::vector<std::int8_t> color; // 0 untouched, 1, 2
    std::vector<double> occupied_at;
    std::vector<std::pair<double, vertex_id>> events1, events2; // non-source discoveries
};

/// Two-type first-passage competition on a built graph: one shared event
/// queue, independent per-(type,edge) weights drawn lazily on first frontier
/// contact, first occupier keeps the vertex forever. Runs to queue
/// exhaustion. Deterministic ties break by type index then insertion order.
race_result race(const half_edge_graph& g, const competition_config& cfg,
                 std::uint64_t seed);

/// Winner-relative epidemic curve, clocked from T^(W)_{a_n/2}.
epidemic_curve_empirical winning_curve(const half_edge_graph& g, const race_result& rr,
                                       const std::vector<double>& tgrid);

/// Second moment of the degree of a uniform vertex outside the winner's
/// occupied set at T^(W)_{a_n/2} + eps; not-applicable (nullopt) when the
/// probe time was never reached or no vertex remains outside.
std::optional<double> unexplored_second_moment(const half_edge_graph& g,
                                               const race_result& rr, double eps);

} // namespace fpprace
