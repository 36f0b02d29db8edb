#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "paco/two_opt.hpp"

using namespace paco;

TEST_CASE("a crossing square tour is uncrossed to the perimeter") {
    // Side 10 keeps the diagonal strictly longer after rounding (14 vs 10).
    const Instance sq("sq", {{0.0, 0.0}, {10.0, 0.0}, {10.0, 10.0}, {0.0, 10.0}});
    const Tour crossed = make_tour(sq, {0, 2, 1, 3});
    REQUIRE(crossed.length == 48); // 14+10+14+10

    const Tour fixed = two_opt(sq, crossed, TwoOptParams{});
    CHECK(fixed.length == 40);
    CHECK(is_permutation_of_n(4, fixed.order));
    CHECK(tour_length(sq, fixed.order) == 40);
}

TEST_CASE("an already 2-opt-optimal tour is returned unchanged") {
    const Instance sq("sq", {{0.0, 0.0}, {10.0, 0.0}, {10.0, 10.0}, {0.0, 10.0}});
    const Tour perimeter = make_tour(sq, {0, 1, 2, 3});
    const Tour after = two_opt(sq, perimeter, TwoOptParams{});
    CHECK(after.order == perimeter.order);
    CHECK(after.length == 40);

    // On a unit square rounding makes the crossed tour tie the perimeter, so
    // no strictly improving move exists and 2-opt must leave it alone.
    const Instance unit("unit", {{0.0, 0.0}, {1.0, 0.0}, {1.0, 1.0}, {0.0, 1.0}});
    const Tour tied = make_tour(unit, {0, 2, 1, 3});
    REQUIRE(tied.length == 4);
    const Tour kept = two_opt(unit, tied, TwoOptParams{});
    CHECK(kept.order == tied.order);
}

TEST_CASE("unbounded 2-opt reaches a state no single move can improve") {
    std::mt19937_64 gen(77);
    for (int round = 0; round < 20; ++round) {
        const Instance inst = oracle::random_instance(gen, 9);
        std::vector<std::uint32_t> order{0, 1, 2, 3, 4, 5, 6, 7, 8};
        std::shuffle(order.begin(), order.end(), gen);
        const Tour start = make_tour(inst, order);
        const Tour done = two_opt(inst, start, TwoOptParams{});
        CHECK(done.length <= start.length);
        CHECK(is_permutation_of_n(9, done.order));
        CHECK(tour_length(inst, done.order) == done.length);
        CHECK_FALSE(oracle::two_opt_improvable(inst, done.order));
    }
}

TEST_CASE("2-opt never worsens a tour") {
    std::mt19937_64 gen(101);
    for (int round = 0; round < 50; ++round) {
        const std::uint32_t n = 5 + static_cast<std::uint32_t>(gen() % 20);
        const Instance inst = oracle::random_instance(gen, n);
        std::vector<std::uint32_t> order(n);
        for (std::uint32_t i = 0; i < n; ++i) order[i] = i;
        std::shuffle(order.begin(), order.end(), gen);
        const Tour start = make_tour(inst, order);
        TwoOptParams params;
        params.window = static_cast<std::uint32_t>(gen() % (n + 1)); // 0..n
        const Tour done = two_opt(inst, start, params);
        CHECK(done.length <= start.length);
        CHECK(is_permutation_of_n(n, done.order));
        CHECK(tour_length(inst, done.order) == done.length);
    }
}

TEST_CASE("window >= n-1 reproduces the unbounded result exactly") {
    std::mt19937_64 gen(131);
    for (int round = 0; round < 25; ++round) {
        const std::uint32_t n = 8 + static_cast<std::uint32_t>(gen() % 13);
        const Instance inst = oracle::random_instance(gen, n);
        std::vector<std::uint32_t> order(n);
        for (std::uint32_t i = 0; i < n; ++i) order[i] = i;
        std::shuffle(order.begin(), order.end(), gen);
        const Tour start = make_tour(inst, order);

        TwoOptParams unbounded;
        TwoOptParams wide;
        wide.window = n - 1;
        const Tour a = two_opt(inst, start, unbounded);
        const Tour b = two_opt(inst, start, wide);
        // Same scan order and same admissible pairs: identical move sequence.
        CHECK(a.order == b.order);
        CHECK(a.length == b.length);
    }
}

TEST_CASE("a narrow window only restricts, never breaks, the search") {
    std::mt19937_64 gen(151);
    const Instance inst = oracle::random_instance(gen, 30);
    std::vector<std::uint32_t> order(30);
    for (std::uint32_t i = 0; i < 30; ++i) order[i] = i;
    std::shuffle(order.begin(), order.end(), gen);
    const Tour start = make_tour(inst, order);

    TwoOptParams narrow;
    narrow.window = 3;
    const Tour done = two_opt(inst, start, narrow);
    CHECK(done.length <= start.length);
    CHECK(is_permutation_of_n(30, done.order));

    TwoOptParams unbounded;
    const Tour full = two_opt(inst, start, unbounded);
    CHECK(full.length <= done.length);
}

TEST_CASE("maybe_two_opt consumes exactly one draw either way") {
    const Instance sq("sq", {{0.0, 0.0}, {10.0, 0.0}, {10.0, 10.0}, {0.0, 10.0}});
    const Tour crossed = make_tour(sq, {0, 2, 1, 3});

    SUBCASE("probability 0 is the identity") {
        TwoOptParams params;
        params.probability = 0.0;
        Rng rng(5);
        Rng twin(5);
        const Tour out = maybe_two_opt(sq, crossed, params, rng);
        CHECK(out.order == crossed.order);
        twin.uniform();
        CHECK(rng.next_u64() == twin.next_u64()); // streams stayed in lockstep
    }

    SUBCASE("probability 1 always runs the search") {
        TwoOptParams params;
        params.probability = 1.0;
        Rng rng(5);
        const Tour out = maybe_two_opt(sq, crossed, params, rng);
        CHECK(out.length == 40);
    }
}

TEST_CASE("trigger rate over many seeded trials is binomial") {
    const Instance sq("sq", {{0.0, 0.0}, {10.0, 0.0}, {10.0, 10.0}, {0.0, 10.0}});
    const Tour crossed = make_tour(sq, {0, 2, 1, 3});
    TwoOptParams params;
    params.probability = 0.001;

    const int trials = 1000000;
    Rng rng(99);
    int runs = 0;
    for (int t = 0; t < trials; ++t) {
        const Tour out = maybe_two_opt(sq, crossed, params, rng);
        if (out.length == 40) ++runs;
    }
    const double expected = trials * params.probability;
    const double sigma = std::sqrt(trials * params.probability * (1 - params.probability));
    CHECK(std::abs(runs - expected) <= 3 * sigma);
}

TEST_CASE("two_opt params validate probability range") {
    TwoOptParams params;
    params.probability = 1.5;
    CHECK_THROWS_AS(params.validate(), std::invalid_argument);
}
