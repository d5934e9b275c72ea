#include <doctest.h>

#include <cmath>
#include <map>
#include <sstream>

#include "fpprace/degree_model.hpp"
#include "fpprace/errors.hpp"
#include "fpprace/stats.hpp"

using namespace fpprace;

TEST_CASE("degree law rejects tau outside (2,3)") {
    CHECK_THROWS_AS(power_law_degree_law(2.0), config_error);
    CHECK_THROWS_AS(power_law_degree_law(3.0), config_error);
    CHECK_THROWS_AS(power_law_degree_law(1.5), config_error);
    CHECK_NOTHROW(power_law_degree_law(2.0001));
}

TEST_CASE("forced-draw table for tau = 2.5") {
    // ceil(u^{-2/3}) evaluated by hand; the 0.9 row pins the construction
    power_law_degree_law law(2.5);
    CHECK(law.degree_from_uniform(0.9) == 2);
    CHECK(law.degree_from_uniform(0.5) == 2);
    CHECK(law.degree_from_uniform(0.25) == 3);
    CHECK(law.degree_from_uniform(0.1) == 5);
    CHECK(law.degree_from_uniform(0.01) == 22);
    CHECK(law.degree_from_uniform(1.0) == 2); // boundary maps to the minimum
    CHECK_THROWS_AS(law.degree_from_uniform(0.0), std::domain_error);
}

TEST_CASE("degree pmf, tail and mean agree with closed forms") {
    power_law_degree_law law(2.5);
    CHECK(law.pmf(2) == doctest::Approx(1.0 - std::pow(2.0, -1.5)).epsilon(1e-14));
    CHECK(law.pmf(1) == 0.0);
    CHECK(law.tail(10) == doctest::Approx(std::pow(10.0, -1.5)).epsilon(1e-14));
    // E[D] = 1 + zeta(1.5)
    CHECK(law.mean() == doctest::Approx(3.612375348685488).epsilon(1e-12));
    const auto& cache = law.pmf_cache(4096);
    double sum = 0.0;
    for (double p : cache) sum += p;
    CHECK(sum + law.cached_tail_mass() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("sample_degrees: parity fix, determinism, minimum degree") {
    power_law_degree_law law(2.5);
    CHECK_THROWS_AS(sample_degrees(law, 1, 7), config_error);

    const auto a = sample_degrees(law, 5000, 42);
    const auto b = sample_degrees(law, 5000, 42);
    const auto c = sample_degrees(law, 5000, 43);
    CHECK(a.degrees == b.degrees);
    CHECK(a.degrees != c.degrees);
    CHECK(a.total % 2 == 0);
    a.validate();
    for (std::size_t v = 0; v + 1 < a.degrees.size(); ++v) CHECK(a.degrees[v] >= 2);

    // raw draws summing odd get the last-vertex fix
    const auto fixed = make_degree_sequence({3, 2});
    CHECK(fixed.parity_fixed);
    CHECK(fixed.degrees == std::vector<std::uint32_t>{3, 3});
    CHECK(fixed.total == 6);
}

TEST_CASE("empirical tail sits in the power-law sandwich" * doctest::timeout(120)) {
    const double tau = 2.5;
    power_law_degree_law law(tau);
    rng r(1);
    const std::uint64_t samples = 1000000;
    const std::vector<std::uint64_t> xs = {2, 3, 5, 10, 32, 100, 316, 1000};
    std::vector<std::uint64_t> exceed(xs.size(), 0);
    std::uint64_t min_seen = ~0ull;
    for (std::uint64_t i = 0; i < samples; ++i) {
        const std::uint64_t d = law.sample(r);
        min_seen = std::min(min_seen, d);
        for (std::size_t j = 0; j < xs.size(); ++j)
            if (d > xs[j]) ++exceed[j];
    }
    CHECK(min_seen >= 2); // P(D >= 2) = 1 by construction
    const double c1 = std::pow(2.0, 1.0 - tau), C1 = 1.0;
    for (std::size_t j = 0; j < xs.size(); ++j) {
        const double x = static_cast<double>(xs[j]);
        const double p = std::pow(x, 1.0 - tau); // exact tail at integer x
        const double sigma = std::sqrt(p * (1.0 - p) / static_cast<double>(samples));
        const double emp = static_cast<double>(exceed[j]) / static_cast<double>(samples);
        CHECK(emp >= c1 * p - 4.0 * sigma);
        CHECK(emp <= C1 * p + 4.0 * sigma);
    }
}

TEST_CASE("size-biased pmf hand values") {
    const std::vector<double> half_half = {0.5, 0.5}; // P(D=2)=P(D=3)=1/2
    CHECK(size_biased_pmf(half_half, 2, 1) == doctest::Approx(0.4).epsilon(1e-14));
    CHECK(size_biased_pmf(half_half, 2, 2) == doctest::Approx(0.6).epsilon(1e-14));
    const std::vector<double> degenerate = {1.0}; // P(D=2)=1
    CHECK(size_biased_pmf(degenerate, 2, 1) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK_THROWS_AS(size_biased_pmf(half_half, 2, 0), std::domain_error);
    CHECK_THROWS_AS(size_biased_pmf({0.5, 0.4}, 2, 1), config_error);
}

TEST_CASE("size-biased laws normalize") {
    for (const std::vector<double> base :
         {std::vector<double>{0.5, 0.5}, {0.2, 0.3, 0.5}, {1.0}, {0.1, 0.0, 0.9}}) {
        auto law = size_biased_law::from_finite_base(base, 2);
        double sum = 0.0;
        for (std::uint64_t k = 1; k <= law.support_end(); ++k) sum += law.pmf(k);
        CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
    }
    auto analytic = size_biased_law::from_power_law(2.5);
    double partial = 0.0;
    for (std::uint64_t k = 1; k <= 50000; ++k) partial += analytic.pmf(k);
    const auto tail = analytic.tail_mass(50000);
    CHECK(partial + tail.mid() == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("analytic size-biased pgf matches brute force with bounded brackets") {
    auto law = size_biased_law::from_power_law(2.5);
    for (double u : {0.3, 0.9, 0.999}) {
        double brute = 0.0, up = 1.0;
        for (std::uint64_t k = 1; k <= 20000000; ++k) {
            up *= u;
            brute += law.pmf(k) * up;
        }
        const auto b = law.pgf(u);
        CHECK(b.width() < 1e-6);
        CHECK(std::abs(b.mid() - brute) < 2e-7);
    }
    CHECK(law.pgf(1.0).mid() == 1.0);
    CHECK(law.pgf(0.0).mid() == 0.0);
    // tight bracket even vanishingly close to 1
    CHECK(law.pgf(1.0 - 1e-7).width() < 1e-6);
    CHECK(law.pgf(1.0 - 1e-7).mid() < 1.0);
    // monotone in u
    double prev = -1.0;
    for (double u = 0.0; u <= 1.0; u += 0.05) {
        const double v = law.pgf(u).mid();
        CHECK(v >= prev);
        prev = v;
    }
}

TEST_CASE("pgf derivative matches finite differences away from 1") {
    auto law = size_biased_law::from_power_law(2.5);
    for (double u : {0.2, 0.6, 0.9}) {
        const double eps = 1e-6;
        const double fd = (law.pgf(u + eps).mid() - law.pgf(u - eps).mid()) / (2 * eps);
        CHECK(law.pgf_derivative(u).mid() == doctest::Approx(fd).epsilon(1e-3));
    }
    auto fin = size_biased_law::from_finite_base({0.5, 0.5}, 2);
    // phi(u) = 0.4 u + 0.6 u^2, phi'(0.5) = 0.4 + 0.6 = 1.0
    CHECK(fin.pgf_derivative(0.5).mid() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("exact size-biased sampler matches the pmf" * doctest::timeout(120)) {
    auto law = size_biased_law::from_power_law(2.5);
    rng r(7);
    const std::uint64_t n = 1000000;
    std::map<std::uint64_t, std::uint64_t> counts;
    std::uint64_t beyond100 = 0;
    for (std::uint64_t i = 0; i < n; ++i) {
        const auto k = law.sample(r);
        CHECK(k >= 1);
        if (k <= 6) ++counts[k];
        if (k > 100) ++beyond100;
    }
    for (std::uint64_t k = 1; k <= 6; ++k) {
        const double p = law.pmf(k);
        const double sigma = std::sqrt(p * (1 - p) / static_cast<double>(n));
        CHECK(std::abs(static_cast<double>(counts[k]) / static_cast<double>(n) - p) <
              4.5 * sigma);
    }
    const double ptail = law.tail_mass(100).mid();
    const double sigma_tail = std::sqrt(ptail * (1 - ptail) / static_cast<double>(n));
    CHECK(std::abs(static_cast<double>(beyond100) / static_cast<double>(n) - ptail) <
          4.5 * sigma_tail);
}

TEST_CASE("size-biased reorder laws") {
    SUBCASE("single vertex") {
        const auto d = make_degree_sequence({2});
        const auto order = size_biased_reorder(d, 1, 5);
        CHECK(order == std::vector<std::uint32_t>{0});
    }
    SUBCASE("m > n rejected") {
        const auto d = make_degree_sequence({2, 2});
        CHECK_THROWS_AS(size_biased_reorder(d, 3, 5), std::domain_error);
    }
    SUBCASE("equal degrees: second pick uniform over the rest") {
        const auto d = make_degree_sequence({2, 2, 2, 2});
        std::vector<std::uint64_t> counts(3, 0);
        const std::uint64_t runs = 100000;
        for (std::uint64_t s = 0; s < runs; ++s) {
            const auto order = size_biased_reorder(d, 2, s);
            // relative index of the second pick among the three others
            std::uint32_t rel = 0;
            for (std::uint32_t v = 0; v < 4; ++v) {
                if (v == order[0]) continue;
                if (v == order[1]) break;
                ++rel;
            }
            ++counts[rel];
        }
        CHECK(chi_square_uniform(counts) < 9.210); // df = 2 at the 1% level
    }
    SUBCASE("equal degrees: exchangeability of the full order") {
        const auto d = make_degree_sequence({3, 3, 3, 3});
        std::vector<std::uint64_t> pos_of_v0(4, 0);
        const std::uint64_t runs = 100000;
        for (std::uint64_t s = 0; s < runs; ++s) {
            const auto order = size_biased_reorder(d, 4, 1000000 + s);
            for (std::uint32_t i = 0; i < 4; ++i)
                if (order[i] == 0) ++pos_of_v0[i];
        }
        CHECK(chi_square_uniform(pos_of_v0) < 11.345); // df = 3 at the 1% level
    }
    SUBCASE("degrees (2,6): first pick uniform, second forced") {
        const auto d = make_degree_sequence({2, 6});
        std::uint64_t first_is_v0 = 0;
        const std::uint64_t runs = 100000;
        for (std::uint64_t s = 0; s < runs; ++s) {
            const auto order = size_biased_reorder(d, 2, 31337 + s);
            if (order[0] == 0) {
                ++first_is_v0;
                CHECK(order[1] == 1); // the only unpicked vertex
            }
        }
        const double freq = static_cast<double>(first_is_v0) / static_cast<double>(runs);
        CHECK(std::abs(freq - 0.5) < 0.01);
    }
}

TEST_CASE("degree sequence text round-trip") {
    const auto d = sample_degrees(power_law_degree_law(2.5), 500, 99);
    std::stringstream ss;
    write_degrees(ss, d);
    const auto back = read_degrees(ss);
    CHECK(back.degrees == d.degrees);
    CHECK(back.total == d.total);
}
