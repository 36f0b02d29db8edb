#pragma once

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "paco/instance.hpp"
#include "paco/rng.hpp"

namespace paco {

struct TwoOptParams {
    double probability = 0.0; // chance of running on a fresh tour
    std::uint32_t window = 0; // max position separation, 0 = unbounded

    void validate() const {
        if (probability < 0.0 || probability > 1.0)
            throw std::invalid_argument("2-opt probability must be in [0,1]");
    }
};

namespace detail {

// One first-improvement scan in lexicographic (i, j) order. Applies the first
// improving reversal and reports the length delta; 0 means no move exists.
// The window bounds j - i on the linear order and never wraps the cycle.
inline std::int64_t two_opt_scan(const Instance& inst, std::vector<std::uint32_t>& order,
                                 std::uint32_t window) {
    const std::uint32_t n = static_cast<std::uint32_t>(order.size());
    for (std::uint32_t i = 0; i + 1 < n; ++i) {
        const std::uint32_t a = order[i];
        const std::uint32_t b = order[i + 1];
        const std::int32_t d_ab = inst.dist(a, b);
        const std::uint32_t j_end =
            (window == 0) ? n - 1 : std::min(n - 1, i + window);
        for (std::uint32_t j = i + 1; j <= j_end; ++j) {
            if (i == 0 && j == n - 1) continue; // same edge pair, zero gain
            const std::uint32_t c = order[j];
            const std::uint32_t d = order[(j + 1) % n];
            const std::int64_t before = static_cast<std::int64_t>(d_ab) + inst.dist(c, d);
            const std::int64_t after = static_cast<std::int64_t>(inst.dist(a, c)) +
                                       inst.dist(b, d);
            if (after < before) {
                std::reverse(order.begin() + i + 1, order.begin() + j + 1);
                return after - before;
            }
        }
    }
    return 0;
}

} // namespace detail

// First-improvement 2-opt, restarted from the top after every accepted move,
// until a full scan finds nothing. Every accepted move strictly shortens the
// integer tour length, so the loop terminates. Never worsens the tour.
inline Tour two_opt(const Instance& inst, Tour tour, const TwoOptParams& params) {
    std::int64_t length = tour.length;
    for (;;) {
        const std::int64_t delta = detail::two_opt_scan(inst, tour.order, params.window);
        if (delta == 0) break;
        length += delta;
    }
    tour.length = length;
    return tour;
}

// Runs 2-opt with the configured probability. Consumes exactly one uniform
// draw whether or not the search runs.
inline Tour maybe_two_opt(const Instance& inst, Tour tour, const TwoOptParams& params,
                          Rng& rng) {
    const double u = rng.uniform();
    if (u < params.probability) return two_opt(inst, std::move(tour), params);
    return tour;
}

} // namespace paco
