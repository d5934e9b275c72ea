#include <doctest.h>

#include <map>
#include <sstream>

#include "fpprace/config_model.hpp"
#include "fpprace/errors.hpp"
#include "fpprace/stats.hpp"

using namespace fpprace;

TEST_CASE("pair_uniform rejects odd totals") {
    degree_sequence d;
    d.n = 2;
    d.degrees = {2, 1};
    d.total = 3;
    CHECK_THROWS_AS(pair_uniform(d, 1), config_error);
}

TEST_CASE("single degree-2 vertex always forms a self-loop") {
    const auto d = make_degree_sequence({2});
    const auto g = pair_uniform(d, 123);
    CHECK(g.mate[0] == 1);
    CHECK(g.mate[1] == 0);
    CHECK(compute_stats(g).self_loops == 1);
    const auto nb = neighbors_via_halfedges(g, 0);
    REQUIRE(nb.size() == 2);
    CHECK(nb[0].second == 0); // its own id as mate-vertex, twice
    CHECK(nb[1].second == 0);
}

TEST_CASE("degrees (2,2): double edge with probability 2/3") {
    const auto d = make_degree_sequence({2, 2});
    std::uint64_t double_edges = 0, self_loop_pairs = 0;
    const std::uint64_t runs = 100000;
    for (std::uint64_t s = 0; s < runs; ++s) {
        const auto g = pair_uniform(d, s);
        const auto st = compute_stats(g);
        if (st.self_loops == 2) ++self_loop_pairs;
        else ++double_edges;
    }
    CHECK(std::abs(static_cast<double>(double_edges) / runs - 2.0 / 3.0) < 0.01);
    CHECK(std::abs(static_cast<double>(self_loop_pairs) / runs - 1.0 / 3.0) < 0.01);
}

TEST_CASE("degrees (3,3): all 15 matchings equally likely" * doctest::timeout(120)) {
    const auto d = make_degree_sequence({3, 3});
    std::map<std::vector<halfedge_id>, std::uint64_t> counts;
    const std::uint64_t runs = 100000;
    for (std::uint64_t s = 0; s < runs; ++s) {
        const auto g = pair_uniform(d, 7000000 + s);
        // canonical encoding: mate of each of h = 0..5
        counts[g.mate] += 1;
    }
    REQUIRE(counts.size() == 15);
    std::vector<std::uint64_t> c;
    for (const auto& [key, v] : counts) c.push_back(v);
    CHECK(chi_square_uniform(c) < 29.141); // df = 14 at the 1% level
}

TEST_CASE("built graph conserves the degree sequence" * doctest::timeout(120)) {
    const auto d = sample_degrees(power_law_degree_law(2.5), 10000, 5);
    const auto g = pair_uniform(d, 5);
    g.check_invariants(&d); // involution, ownership, conservation
    std::uint64_t handshake = 0;
    for (std::uint64_t v = 0; v < g.n; ++v)
        handshake += neighbors_via_halfedges(g, static_cast<vertex_id>(v)).size();
    CHECK(handshake == g.L);
}

TEST_CASE("double edge shows up in neighbor lists") {
    // find a seed that pairs (2,2) into a double edge
    const auto d = make_degree_sequence({2, 2});
    for (std::uint64_t s = 0;; ++s) {
        const auto g = pair_uniform(d, s);
        if (compute_stats(g).self_loops == 0) {
            const auto nb = neighbors_via_halfedges(g, 0);
            REQUIRE(nb.size() == 2);
            CHECK(nb[0].second == 1);
            CHECK(nb[1].second == 1);
            break;
        }
    }
}

TEST_CASE("graph text round-trip preserves the mate array") {
    const auto d = sample_degrees(power_law_degree_law(2.7), 300, 11);
    const auto g = pair_uniform(d, 11);
    std::stringstream ss;
    write_graph(ss, g);
    const auto back = read_graph(ss);
    CHECK(back.mate == g.mate);
    CHECK(back.offsets == g.offsets);
}

TEST_CASE("neighbors_via_halfedges rejects out-of-range vertices") {
    const auto g = pair_uniform(make_degree_sequence({2, 2}), 3);
    CHECK_THROWS_AS(neighbors_via_halfedges(g, 7), std::domain_error);
}
