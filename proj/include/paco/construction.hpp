#pragma once

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "paco/colony.hpp"
#include "paco/instance.hpp"
#include "paco/rng.hpp"

namespace paco {

// x^e with a repeated-multiplication fast path for small integer exponents.
// alpha and beta are 5.0 in the standard presets, so this sits in the hot loop.
class Power {
public:
    explicit Power(double exponent = 1.0) : e_(exponent) {
        const double r = std::round(exponent);
        integral_ = (r == exponent && r >= 0.0 && r <= 64.0);
        ie_ = integral_ ? static_cast<unsigned>(r) : 0;
    }

    double exponent() const { return e_; }

    double operator()(double x) const {
        if (!integral_) return std::pow(x, e_);
        double result = 1.0;
        double base = x;
        for (unsigned e = ie_; e != 0; e >>= 1) {
            if (e & 1) result *= base;
            base *= base;
        }
        return result;
    }

private:
    double e_;
    unsigned ie_;
    bool integral_;
};

// eta(i,j)^beta where eta = 1/max(d,1). The clamp keeps duplicate-coordinate
// pairs selectable. Precomputed as a table when the instance carries a
// distance matrix, otherwise evaluated from coordinates per candidate.
class Heuristic {
public:
    Heuristic(const Instance& inst, double beta) : inst_(&inst), pow_(beta) {
        if (inst.has_matrix()) {
            const std::uint32_t n = inst.n();
            table_.resize(static_cast<std::size_t>(n) * n);
            for (std::uint32_t i = 0; i < n; ++i) {
                const std::int32_t* row = inst.dist_row(i);
                float* out = table_.data() + static_cast<std::size_t>(i) * n;
                for (std::uint32_t j = 0; j < n; ++j)
                    out[j] = static_cast<float>(pow_(1.0 / std::max<std::int32_t>(row[j], 1)));
            }
        }
    }

    double beta() const { return pow_.exponent(); }

    double eta_beta(std::uint32_t i, std::uint32_t j) const {
        if (!table_.empty())
            return table_[static_cast<std::size_t>(i) * inst_->n() + j];
        return pow_(1.0 / std::max<std::int32_t>(inst_->dist(i, j), 1));
    }

    // Row pointer for the table-backed case, nullptr otherwise.
    const float* row(std::uint32_t i) const {
        return table_.empty() ? nullptr
                              : table_.data() + static_cast<std::size_t>(i) * inst_->n();
    }

private:
    const Instance* inst_;
    Power pow_;
    std::vector<float> table_;
};

// Caller-owned construction workspace.
struct ConstructionScratch {
    std::vector<std::uint8_t> visited;
    std::vector<std::uint32_t> candidates; // unvisited cities, ascending
    std::vector<std::uint32_t> order;      // tour under construction
    std::uint64_t comparisons = 0;         // candidate-score evaluations, monotone

    void prepare(std::uint32_t n) {
        visited.assign(n, 0);
        candidates.clear();
        candidates.reserve(n);
        order.clear();
        order.reserve(n);
    }
};

// Pheromone view over the colony for one constructing ant. Per selection step
// it gathers the <=2m neighbour contributions around the current city into a
// dense tau^alpha array, so candidate scoring is a single load. The g_best/
// l_best ratios are frozen when the construction starts.
class ColonyPheromone {
public:
    ColonyPheromone(const Colony& colony, double alpha)
        : colony_(&colony), pow_(alpha), tau0_(colony.tau0()) {
        const std::uint32_t n = colony.instance().n();
        tau0_alpha_ = pow_(tau0_);
        acc_.assign(n, 0.0);
        mult_.assign(n, tau0_alpha_);
        ratios_.assign(colony.ant_count(), 0.0);
        touched_.reserve(2 * colony.ant_count());
    }

    double alpha() const { return pow_.exponent(); }

    // Freeze the per-ant contribution ratios for the coming construction.
    void begin_construction() { colony_->snapshot_ratios(ratios_); }

    void begin_step(std::uint32_t city) {
        const std::uint32_t m = colony_->ant_count();
        for (std::uint32_t k = 0; k < m; ++k) {
            const double r = ratios_[k];
            if (r == 0.0) continue;
            const auto pair = colony_->read_pair(k, city);
            if (!pair) continue;
            add(pair->a, r);
            add(pair->b, r);
        }
        for (const std::uint32_t c : touched_) mult_[c] = pow_(tau0_ + acc_[c]);
    }

    double tau_alpha(std::uint32_t j) const { return mult_[j]; }

    void end_step() {
        for (const std::uint32_t c : touched_) {
            acc_[c] = 0.0;
            mult_[c] = tau0_alpha_;
        }
        touched_.clear();
    }

private:
    void add(std::uint32_t city, double r) {
        if (acc_[city] == 0.0) touched_.push_back(city);
        acc_[city] += r;
    }

    const Colony* colony_;
    Power pow_;
    double tau0_;
    double tau0_alpha_;
    std::vector<double> acc_;
    std::vector<double> mult_;
    std::vector<double> ratios_;
    std::vector<std::uint32_t> touched_;
};

// Classic-mode pheromone matrix. Symmetric, entries kept positive.
class PheromoneMatrix {
public:
    static constexpr double kFloor = 1e-6;

    PheromoneMatrix(std::uint32_t n, double rho, double tau_init)
        : n_(n), rho_(rho), tau_(static_cast<std::size_t>(n) * n, tau_init) {
        if (n > kDistMatrixMaxCities)
            throw std::invalid_argument(
                "pheromone matrix limited to n <= " + std::to_string(kDistMatrixMaxCities) +
                ", got " + std::to_string(n));
        if (rho < 0.0 || rho > 1.0)
            throw std::invalid_argument("evaporation rate must be in [0,1]");
        if (tau_init <= 0.0)
            throw std::invalid_argument("initial pheromone must be positive");
    }

    std::uint32_t n() const { return n_; }
    double rho() const { return rho_; }
    double tau(std::uint32_t i, std::uint32_t j) const {
        return tau_[static_cast<std::size_t>(i) * n_ + j];
    }
    const double* row(std::uint32_t i) const {
        return tau_.data() + static_cast<std::size_t>(i) * n_;
    }

    // tau <- (1-rho) tau, clamped to a positive floor.
    void evaporate() {
        const double keep = 1.0 - rho_;
        for (double& t : tau_) {
            t *= keep;
            if (t < kFloor) t = kFloor;
        }
    }

    // Each edge of each tour gains 1/C on both (i,j) and (j,i).
    void deposit(std::span<const Tour> tours) {
        for (const Tour& t : tours) {
            const double delta = 1.0 / static_cast<double>(t.length);
            const std::size_t n = t.order.size();
            for (std::size_t p = 0; p < n; ++p) {
                const std::uint32_t i = t.order[p];
                const std::uint32_t j = t.order[(p + 1) % n];
                tau_[static_cast<std::size_t>(i) * n_ + j] += delta;
                tau_[static_cast<std::size_t>(j) * n_ + i] += delta;
            }
        }
    }

private:
    std::uint32_t n_;
    double rho_;
    std::vector<double> tau_;
};

inline void classic_evaporate(PheromoneMatrix& pm) { pm.evaporate(); }
inline void classic_deposit(PheromoneMatrix& pm, std::span<const Tour> tours) {
    pm.deposit(tours);
}

// Classic-mode pheromone view: direct matrix lookup.
class MatrixPheromone {
public:
    MatrixPheromone(const PheromoneMatrix& pm, double alpha) : pm_(&pm), pow_(alpha) {}

    void begin_construction() {}
    void begin_step(std::uint32_t city) { row_ = pm_->row(city); }
    double tau_alpha(std::uint32_t j) const { return pow_(row_[j]); }
    void end_step() {}

private:
    const PheromoneMatrix* pm_;
    Power pow_;
    const double* row_ = nullptr;
};

template <typename S>
concept PheromoneSource = requires(S s, std::uint32_t city) {
    s.begin_step(city);
    { s.tau_alpha(city) } -> std::convertible_to<double>;
    s.end_step();
};

// Independent Roulette: one fresh uniform per candidate, consumed in ascending
// city order; the candidate maximising tau^alpha * eta^beta * u wins, ties
// broken by lowest city index. Adds one comparison per candidate scored.
template <PheromoneSource Phero>
std::uint32_t select_next(std::uint32_t current, ConstructionScratch& scratch,
                          Phero& phero, const Heuristic& heur, Rng& rng) {
    auto& cand = scratch.candidates;
    phero.begin_step(current);
    double best_score = -1.0;
    std::size_t best_pos = 0;
    if (const float* eta_row = heur.row(current)) {
        for (std::size_t p = 0; p < cand.size(); ++p) {
            const std::uint32_t j = cand[p];
            const double u = rng.uniform();
            const double score = phero.tau_alpha(j) * eta_row[j] * u;
            if (score > best_score) {
                best_score = score;
                best_pos = p;
            }
        }
    } else {
        for (std::size_t p = 0; p < cand.size(); ++p) {
            const std::uint32_t j = cand[p];
            const double u = rng.uniform();
            const double score = phero.tau_alpha(j) * heur.eta_beta(current, j) * u;
            if (score > best_score) {
                best_score = score;
                best_pos = p;
            }
        }
    }
    phero.end_step();
    scratch.comparisons += cand.size();

    const std::uint32_t next = cand[best_pos];
    cand.erase(cand.begin() + static_cast<std::ptrdiff_t>(best_pos));
    scratch.visited[next] = 1;
    return next;
}

// Full tour from a uniformly random start city: n-1 selection steps,
// exactly n(n-1)/2 comparisons.
template <PheromoneSource Phero>
Tour construct_full(ConstructionScratch& scratch, Phero& phero, const Heuristic& heur,
                    const Instance& inst, Rng& rng) {
    const std::uint32_t n = inst.n();
    scratch.prepare(n);
    phero.begin_construction();

    const std::uint32_t start = rng.uniform_below(n);
    for (std::uint32_t c = 0; c < n; ++c)
        if (c != start) scratch.candidates.push_back(c);
    scratch.visited[start] = 1;
    scratch.order.push_back(start);

    std::uint32_t current = start;
    for (std::uint32_t step = 1; step < n; ++step) {
        current = select_next(current, scratch, phero, heur, rng);
        scratch.order.push_back(current);
    }
    return Tour{scratch.order, cycle_length(inst, scratch.order)};
}

// Partial construction: copy `n - m_mod` consecutive cities of l_best starting
// at position `start_pos` (cyclic), then rebuild the remaining m_mod cities.
// Selection runs while two or more candidates remain; the last free city is
// appended without scoring, so a rebuild of k cities costs k(k-1)/2 + (k-1)
// comparisons. m_mod = 0 reproduces l_best; m_mod = n rebuilds a full tour
// starting from l_best[start_pos].
template <PheromoneSource Phero>
Tour construct_partial_at(ConstructionScratch& scratch, Phero& phero,
                          const Heuristic& heur, const Instance& inst,
                          std::span<const std::uint32_t> l_best_order,
                          std::uint32_t start_pos, std::uint32_t m_mod, Rng& rng) {
    const std::uint32_t n = inst.n();
    if (m_mod > n) throw std::invalid_argument("m_mod exceeds city count");
    scratch.prepare(n);
    phero.begin_construction();

    const std::uint32_t preserved = n - m_mod;
    for (std::uint32_t t = 0; t < preserved; ++t) {
        const std::uint32_t city = l_best_order[(start_pos + t) % n];
        scratch.order.push_back(city);
        scratch.visited[city] = 1;
    }
    if (preserved == 0) {
        // Nothing retained: anchor the rebuild at the start city itself.
        const std::uint32_t anchor = l_best_order[start_pos];
        scratch.order.push_back(anchor);
        scratch.visited[anchor] = 1;
    }
    for (std::uint32_t c = 0; c < n; ++c)
        if (!scratch.visited[c]) scratch.candidates.push_back(c);

    std::uint32_t current = scratch.order.back();
    while (scratch.candidates.size() > 1) {
        current = select_next(current, scratch, phero, heur, rng);
        scratch.order.push_back(current);
    }
    if (!scratch.candidates.empty()) {
        // Final city is forced; no score is evaluated.
        const std::uint32_t last = scratch.candidates.back();
        scratch.candidates.pop_back();
        scratch.visited[last] = 1;
        scratch.order.push_back(last);
    }
    return Tour{scratch.order, cycle_length(inst, scratch.order)};
}

// Drawn-parameter form: start position uniform over all n cyclic positions,
// modified count uniform over {2, ..., max(2, floor(max_mod_frac * n))}.
template <PheromoneSource Phero>
Tour construct_partial(ConstructionScratch& scratch, Phero& phero, const Heuristic& heur,
                       const Instance& inst, std::span<const std::uint32_t> l_best_order,
                       double max_mod_frac, Rng& rng) {
    const std::uint32_t n = inst.n();
    const std::uint32_t start_pos = rng.uniform_below(n);
    const auto cap = static_cast<std::uint32_t>(
        std::max(2.0, std::floor(max_mod_frac * static_cast<double>(n))));
    const std::uint32_t m_mod = 2 + rng.uniform_below(cap - 1);
    return construct_partial_at(scratch, phero, heur, inst, l_best_order, start_pos,
                                m_mod, rng);
}

} // namespace paco
