#include <doctest.h>

#include <cmath>
#include <map>

#include "fpprace/errors.hpp"
#include "fpprace/fpp.hpp"
#include "fpprace/stats.hpp"
#include "test_helpers.hpp"

using namespace fpprace;
using fpprace::testing::make_graph;

namespace {

/// Independent quadratic-time relaxation oracle: repeatedly relaxes every
/// edge until no distance improves. Shares the arithmetic shape of the
/// engine (dist[u] + w), so agreement is exact, not approximate.
std::vector<double> relaxation_oracle(const half_edge_graph& g, vertex_id source,
                                      const std::vector<double>& edge_weights) {
    std::vector<double> dist(g.n, std::numeric_limits<double>::infinity());
    dist[source] = 0.0;
    for (;;) {
        bool improved = false;
        for (std::uint64_t h = 0; h < g.L; ++h) {
            const halfedge_id hh = static_cast<halfedge_id>(h);
            const double w = edge_weights[std::min(hh, g.mate[hh])];
            if (!std::isfinite(w)) continue;
            const vertex_id a = g.owner[hh], b = g.mate_vertex(hh);
            if (dist[a] + w < dist[b]) {
                dist[b] = dist[a] + w;
                improved = true;
            }
        }
        if (!improved) return dist;
    }
}

half_edge_graph triangle() {
    // v0 owns h0,h1; v1 owns h2,h3; v2 owns h4,h5
    // edges: (h0,h2) v0-v1, (h3,h4) v1-v2, (h1,h5) v0-v2
    return make_graph({2, 2, 2}, {{0, 2}, {3, 4}, {1, 5}});
}

} // namespace

TEST_CASE("triangle with hand weights reproduces the hand Dijkstra") {
    const auto g = triangle();
    std::vector<double> w(g.L, 0.0);
    w[0] = 1.0; // v0-v1
    w[3] = 2.0; // v1-v2
    w[1] = 5.0; // v0-v2
    const auto tr = explore_given_weights(g, 0, w, stop_rule::exhaustion());
    REQUIRE(tr.events.size() == 2);
    CHECK(tr.events[0].vertex == 1);
    CHECK(tr.events[0].time == 1.0);
    CHECK(tr.events[1].vertex == 2);
    CHECK(tr.events[1].time == 3.0);
    CHECK(tr.exhausted);
}

TEST_CASE("self-loop-only vertex yields an empty trace") {
    const auto g = make_graph({2}, {{0, 1}});
    const auto tr = explore(g, 0, weight_law::exponential(1.0), stop_rule::exhaustion(), 1);
    CHECK(tr.events.empty());
    CHECK(tr.exhausted);
}

TEST_CASE("discovery times equal the quadratic relaxation oracle exactly") {
    rng wr(2024);
    for (const std::uint64_t n : {10ull, 100ull, 1000ull}) {
        const auto d = sample_degrees(power_law_degree_law(2.5), n, n);
        const auto g = pair_uniform(d, n + 1);
        std::vector<double> w(g.L, 0.0);
        for (std::uint64_t h = 0; h < g.L; ++h)
            if (g.mate[h] > h) w[h] = -std::log(wr.u01_open());
        const auto tr = explore_given_weights(g, 0, w, stop_rule::exhaustion());
        const auto oracle = relaxation_oracle(g, 0, w);
        std::vector<double> dist(g.n, std::numeric_limits<double>::infinity());
        dist[0] = 0.0;
        for (const auto& e : tr.events) dist[e.vertex] = e.time;
        for (std::uint64_t v = 0; v < g.n; ++v) {
            if (std::isinf(oracle[v])) CHECK(std::isinf(dist[v]));
            else CHECK(dist[v] == oracle[v]); // exact, same float operations
        }
    }
}

TEST_CASE("forward degrees and distinctness at the coupling scale" * doctest::timeout(300)) {
    const std::uint64_t n = 100000;
    const auto d = sample_degrees(power_law_degree_law(2.5), n, 17);
    const auto g = pair_uniform(d, 17);
    const auto m = static_cast<std::uint64_t>(std::ceil(std::pow(n, 0.1)));
    const auto tr = explore(g, 3, weight_law::exponential(1.0), stop_rule::discovered(m), 17);
    REQUIRE(tr.events.size() == m);
    std::vector<bool> seen(n, false);
    seen[3] = true;
    for (const auto& e : tr.events) {
        CHECK(!seen[e.vertex]); // all discovered vertices distinct
        seen[e.vertex] = true;
        CHECK(e.forward_degree == g.degree(e.vertex) - 1);
    }
    for (std::size_t i = 1; i < tr.events.size(); ++i)
        CHECK(tr.events[i].time > tr.events[i - 1].time);
}

TEST_CASE("monotone coupling: doubling weights doubles every T_m") {
    const auto d = sample_degrees(power_law_degree_law(2.5), 2000, 5);
    const auto g = pair_uniform(d, 5);
    const auto fast = explore(g, 0, weight_law::exponential(1.0), stop_rule::exhaustion(), 9);
    const auto slow = explore(g, 0, weight_law::exponential(0.5), stop_rule::exhaustion(), 9);
    REQUIRE(fast.events.size() == slow.events.size());
    for (std::size_t i = 0; i < fast.events.size(); ++i) {
        CHECK(slow.events[i].vertex == fast.events[i].vertex);
        CHECK(slow.events[i].time == 2.0 * fast.events[i].time);
    }
}

TEST_CASE("lazy exploration: one pairing per discovery at M=1") {
    const auto d = sample_degrees(power_law_degree_law(2.5), 1000, 3);
    const auto le = explore_lazy(d, 0, weight_law::exponential(1.0),
                                 stop_rule::discovered(1), 3);
    std::uint64_t paired = 0;
    for (auto m : le.mate)
        if (m != 0xffffffffu) ++paired;
    CHECK(paired == 2); // exactly one pairing; sibling screening is deferred
    CHECK(le.trace.events.size() == 1);
    CHECK(paired + le.unpaired.size() == d.total);
}

TEST_CASE("lazy exploration refuses stops beyond n/2") {
    const auto d = sample_degrees(power_law_degree_law(2.5), 100, 3);
    CHECK_THROWS_AS(explore_lazy(d, 0, weight_law::exponential(1.0),
                                 stop_rule::discovered(51), 3),
                    config_error);
}

TEST_CASE("lazy partial pairing extends to a uniform matching") {
    // run one lazy discovery on degrees (3,3), complete the pool uniformly,
    // and check the completed matchings stay uniform over all 15
    const auto d = make_degree_sequence({3, 3});
    std::map<std::vector<halfedge_id>, std::uint64_t> counts;
    const std::uint64_t runs = 30000;
    for (std::uint64_t s = 0; s < runs; ++s) {
        auto le = explore_lazy(d, 0, weight_law::exponential(1.0),
                               stop_rule::discovered(1), 900 + s);
        rng r(s);
        auto pool = le.unpaired;
        while (!pool.empty()) {
            const halfedge_id a = pool[0];
            pool.erase(pool.begin());
            const std::uint64_t j = r.below(pool.size());
            const halfedge_id b = pool[j];
            pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(j));
            le.mate[a] = b;
            le.mate[b] = a;
        }
        counts[le.mate] += 1;
    }
    REQUIRE(counts.size() == 15);
    std::vector<std::uint64_t> c;
    for (const auto& [k, v] : counts) c.push_back(v);
    CHECK(chi_square_uniform(c) < 29.141); // df = 14 at the 1% level
}

TEST_CASE("lazy and full explorations agree in law on degrees (2,2,2)" *
          doctest::timeout(300)) {
    const auto d = make_degree_sequence({2, 2, 2});
    const std::uint64_t runs = 100000;
    std::vector<double> t1_full, t1_lazy;
    std::vector<std::uint64_t> v_full(3, 0), v_lazy(3, 0);
    for (std::uint64_t s = 0; s < runs; ++s) {
        const auto g = pair_uniform(d, s);
        const auto tf = explore(g, 0, weight_law::exponential(1.0),
                                stop_rule::discovered(1), s * 2 + 1);
        if (!tf.events.empty()) {
            t1_full.push_back(tf.events[0].time);
            ++v_full[tf.events[0].vertex];
        }
        const auto tl = explore_lazy(d, 0, weight_law::exponential(1.0),
                                     stop_rule::discovered(1), s * 2);
        if (!tl.trace.events.empty()) {
            t1_lazy.push_back(tl.trace.events[0].time);
            ++v_lazy[tl.trace.events[0].vertex];
        }
    }
    std::sort(t1_full.begin(), t1_full.end());
    std::sort(t1_lazy.begin(), t1_lazy.end());
    CHECK(kolmogorov_distance_sorted(t1_full, t1_lazy) < 0.02);
    for (std::size_t v = 1; v < 3; ++v) {
        const double f = static_cast<double>(v_full[v]) / static_cast<double>(t1_full.size());
        const double l = static_cast<double>(v_lazy[v]) / static_cast<double>(t1_lazy.size());
        CHECK(std::abs(f - l) < 0.015);
    }
}

TEST_CASE("epidemic curve bookkeeping on a mid-sized graph") {
    const std::uint64_t n = 20000;
    const auto d = sample_degrees(power_law_degree_law(2.5), n, 77);
    const auto g = pair_uniform(d, 77);
    const std::uint64_t a_n = 4;
    std::vector<double> grid;
    for (int i = 0; i <= 40; ++i) grid.push_back(0.1 * i);
    const auto c = epidemic_curve(g, 1, weight_law::exponential(1.0), a_n, grid, 77);

    // t = 0: exactly a_n discoveries plus the source
    double occ0 = 0.0, occ_last = 0.0;
    for (const auto& row : c.occupied) {
        occ0 += row.front();
        occ_last += row.back();
    }
    CHECK(occ0 * static_cast<double>(n) == doctest::Approx(a_n + 1).epsilon(1e-9));
    CHECK(c.saturation == doctest::Approx(occ_last).epsilon(1e-12));

    // monotone in t, and the ratio to the degree fraction is a CDF estimate
    for (std::size_t k = 0; k < c.occupied.size(); ++k) {
        for (std::size_t i = 1; i < grid.size(); ++i)
            CHECK(c.occupied[k][i] >= c.occupied[k][i - 1]);
        if (c.degree_pmf_hat[k] > 0)
            for (std::size_t i = 0; i < grid.size(); ++i)
                CHECK(c.occupied[k][i] / c.degree_pmf_hat[k] <= 1.0 + 1e-12);
    }
    // each discovery consumes exactly one spreading edge
    for (std::size_t i = 0; i < grid.size(); ++i) {
        double occ = 0.0;
        for (const auto& row : c.occupied) occ += row[i];
        const double discovered = occ * static_cast<double>(n) - 1.0;
        CHECK(c.edge_fraction[i] * (static_cast<double>(g.L) / 2.0) ==
              doctest::Approx(discovered).epsilon(1e-9));
        CHECK(c.edge_fraction[i] >= (i ? c.edge_fraction[i - 1] : 0.0));
        CHECK(c.edge_fraction[i] <= 1.0);
    }
    CHECK_THROWS_AS(epidemic_curve(g, 1, weight_law::exponential(1.0), n, grid, 77),
                    config_error);
}
