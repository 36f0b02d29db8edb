#pragma once

#include <atomic>
#include <barrier>
#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <exception>
#include <mutex>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "paco/colony.hpp"
#include "paco/construction.hpp"
#include "paco/instance.hpp"
#include "paco/two_opt.hpp"

namespace paco {

enum class Mode { partial_aco, paco_full, classic_aco };

inline const char* mode_name(Mode m) {
    switch (m) {
        case Mode::partial_aco: return "partial";
        case Mode::paco_full: return "paco";
        case Mode::classic_aco: return "classic";
    }
    return "?";
}

inline std::optional<Mode> mode_from_name(const std::string& s) {
    if (s == "partial") return Mode::partial_aco;
    if (s == "paco") return Mode::paco_full;
    if (s == "classic") return Mode::classic_aco;
    return std::nullopt;
}

struct RunConfig {
    std::uint32_t ants = 16;
    std::uint64_t iterations = 100000;
    double alpha = 5.0;
    double beta = 5.0;
    double partial_prob = 0.95;  // chance of a partial (vs full) construction
    double max_mod_frac = 1.0;   // cap on the rebuilt fraction of the tour
    double two_opt_prob = 0.0;
    std::uint32_t two_opt_window = 0;
    std::uint32_t workers = 8;
    std::uint64_t seed = 1;
    double rho = 0.1;      // classic-mode evaporation rate
    double tau_max = 1.0;  // classic-mode initial pheromone
    double tau0 = 1.0;     // base pheromone for edges absent from all l_bests
    double time_budget_s = 0.0;           // 0 = run all iterations
    double convergence_interval_s = 1.0;  // 0 = final sample only
    bool synchronous = false;  // barriered iterations, deterministic per seed
    bool validate_tours = false;

    void validate() const {
        if (ants < 1) throw std::invalid_argument("ants must be >= 1");
        if (iterations < 1) throw std::invalid_argument("iterations must be >= 1");
        if (workers < 1) throw std::invalid_argument("workers must be >= 1");
        if (partial_prob < 0.0 || partial_prob > 1.0)
            throw std::invalid_argument("partial_prob must be in [0,1]");
        if (max_mod_frac <= 0.0 || max_mod_frac > 1.0)
            throw std::invalid_argument("max_mod_frac must be in (0,1]");
        if (two_opt_prob < 0.0 || two_opt_prob > 1.0)
            throw std::invalid_argument("two_opt_prob must be in [0,1]");
        if (rho < 0.0 || rho > 1.0) throw std::invalid_argument("rho must be in [0,1]");
        if (tau0 <= 0.0) throw std::invalid_argument("tau0 must be positive");
        if (tau_max <= 0.0) throw std::invalid_argument("tau_max must be positive");
        if (time_budget_s < 0.0) throw std::invalid_argument("time budget must be >= 0");
    }
};

struct ConvergenceSample {
    double elapsed_s;
    std::int64_t g_best_length;
    std::uint64_t iterations_done;
};

struct RunReport {
    std::int64_t best_length = 0;
    Tour best_tour;
    std::optional<double> pct_error;
    double wall_time_s = 0.0;
    std::uint64_t iterations_done = 0;
    std::uint64_t comparisons_total = 0;
    std::vector<ConvergenceSample> convergence;
};

inline void convergence_csv(const RunReport& report, std::ostream& out) {
    out << "elapsed_s,g_best_length,iterations_done\n";
    out.precision(6);
    for (const auto& s : report.convergence)
        out << std::fixed << s.elapsed_s << ',' << s.g_best_length << ','
            << s.iterations_done << "\n";
}

namespace detail {

using Clock = std::chrono::steady_clock;

inline double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

inline void check_tour(const Instance& inst, const Tour& t) {
    if (tour_length(inst, t.order) != t.length)
        throw std::logic_error("tour length cache does not match recomputation");
}

struct WorkerRange {
    std::uint32_t first, last; // ants [first, last)
};

inline std::vector<WorkerRange> partition_ants(std::uint32_t ants, std::uint32_t workers) {
    const std::uint32_t w = std::min(workers, ants);
    std::vector<WorkerRange> ranges(w);
    for (std::uint32_t i = 0; i < w; ++i)
        ranges[i] = {ants * i / w, ants * (i + 1) / w};
    return ranges;
}

// Per-ant construction step shared by the P-ACO modes. Seeding iterations
// always build a full tour; later iterations flip the partial/full coin.
template <PheromoneSource Phero>
Tour build_candidate(Ant& ant, ConstructionScratch& scratch, Phero& phero,
                     const Heuristic& heur, const Instance& inst, const RunConfig& cfg,
                     double eff_partial_prob, bool seeding, const TwoOptParams& ls) {
    Tour t;
    if (seeding) {
        t = construct_full(scratch, phero, heur, inst, ant.rng());
    } else {
        const double coin = ant.rng().uniform();
        if (coin < eff_partial_prob)
            t = construct_partial(scratch, phero, heur, inst, ant.l_best().order,
                                  cfg.max_mod_frac, ant.rng());
        else
            t = construct_full(scratch, phero, heur, inst, ant.rng());
    }
    if (cfg.validate_tours) check_tour(inst, t);
    t = maybe_two_opt(inst, std::move(t), ls, ant.rng());
    if (cfg.validate_tours) check_tour(inst, t);
    return t;
}

} // namespace detail

// Full run. Iteration 1 seeds every ant's l_best with a full construction;
// the remaining iterations follow the configured mode. Stops after
// cfg.iterations iterations or once the wall-time budget expires, whichever
// comes first; an in-flight iteration always completes.
inline RunReport run(const Instance& inst, const RunConfig& cfg, Mode mode) {
    cfg.validate();
    if (mode == Mode::classic_aco && inst.n() > kDistMatrixMaxCities)
        throw std::invalid_argument("classic mode requires n <= " +
                                    std::to_string(kDistMatrixMaxCities));

    const auto start = detail::Clock::now();
    const std::uint32_t m = cfg.ants;
    const double eff_partial_prob =
        (mode == Mode::partial_aco) ? cfg.partial_prob : 0.0;
    const TwoOptParams ls{cfg.two_opt_prob, cfg.two_opt_window};

    Heuristic heur(inst, cfg.beta);
    Colony colony(inst, m, cfg.tau0, cfg.seed);
    std::optional<PheromoneMatrix> matrix;
    if (mode == Mode::classic_aco)
        matrix.emplace(inst.n(), cfg.rho, cfg.tau_max);

    const auto ranges = detail::partition_ants(m, cfg.workers);
    const std::uint32_t w = static_cast<std::uint32_t>(ranges.size());

    std::atomic<std::uint64_t> constructions{0};
    std::atomic<bool> budget_stop{false}; // finish the in-flight iteration, then halt
    std::atomic<bool> abort_run{false};   // a worker failed, halt as soon as possible
    std::vector<std::uint64_t> comparisons(w, 0);
    std::vector<std::exception_ptr> errors(w);
    std::exception_ptr apply_error;

    const bool budgeted = cfg.time_budget_s > 0.0;
    auto budget_expired = [&]() {
        return budgeted && detail::seconds_since(start) >= cfg.time_budget_s;
    };

    // Convergence monitor; workers never pay for sampling.
    std::vector<ConvergenceSample> samples;
    std::mutex mon_mx;
    std::condition_variable mon_cv;
    bool finished = false;
    std::thread monitor;
    if (cfg.convergence_interval_s > 0.0) {
        monitor = std::thread([&] {
            std::unique_lock<std::mutex> lk(mon_mx);
            const auto interval = std::chrono::duration<double>(cfg.convergence_interval_s);
            while (!mon_cv.wait_for(lk, interval, [&] { return finished; })) {
                if (!colony.has_g_best()) continue;
                samples.push_back({detail::seconds_since(start), colony.g_best_length(),
                                   constructions.load(std::memory_order_relaxed) / m});
            }
        });
    }

    auto apply_update = [&](Ant& ant, Tour&& t) {
        if (colony.update_l_best(ant, std::move(t)))
            colony.update_g_best(ant.l_best());
        constructions.fetch_add(1, std::memory_order_relaxed);
    };

    if (mode != Mode::classic_aco && !cfg.synchronous) {
        // Asynchronous: each worker loops its ants independently and applies
        // updates immediately; other workers observe them via the seqlocked
        // slices whenever they next gather.
        auto worker = [&](std::uint32_t wi) {
            try {
                ConstructionScratch scratch;
                ColonyPheromone phero(colony, cfg.alpha);
                for (std::uint64_t iter = 1; iter <= cfg.iterations; ++iter) {
                    // Iteration 1 (seeding) always runs; a budget stop only
                    // prevents starting further iterations.
                    if (abort_run.load(std::memory_order_relaxed)) break;
                    if (iter > 1 && budget_stop.load(std::memory_order_relaxed)) break;
                    for (std::uint32_t k = ranges[wi].first; k < ranges[wi].last; ++k) {
                        Ant& ant = colony.ant(k);
                        Tour t = detail::build_candidate(ant, scratch, phero, heur, inst,
                                                         cfg, eff_partial_prob,
                                                         iter == 1, ls);
                        apply_update(ant, std::move(t));
                    }
                    if (budget_expired()) budget_stop.store(true, std::memory_order_relaxed);
                }
                comparisons[wi] = scratch.comparisons;
            } catch (...) {
                errors[wi] = std::current_exception();
                abort_run.store(true, std::memory_order_relaxed);
            }
        };
        std::vector<std::thread> threads;
        threads.reserve(w);
        for (std::uint32_t wi = 0; wi < w; ++wi) threads.emplace_back(worker, wi);
        for (auto& t : threads) t.join();
    } else {
        // Barriered iterations. Constructions read a frozen colony; updates
        // (and the classic matrix update) happen in the completion step, in
        // ant order, so results depend only on the seed, not the worker count.
        std::vector<std::optional<Tour>> built(m);
        std::uint64_t iter = 0;
        auto on_completion = [&]() noexcept {
            try {
                if (matrix) {
                    matrix->evaporate();
                    std::vector<Tour> tours;
                    tours.reserve(m);
                    for (auto& b : built)
                        if (b) tours.push_back(*b);
                    matrix->deposit(tours);
                }
                for (std::uint32_t k = 0; k < m; ++k) {
                    if (!built[k]) continue; // a worker failed mid-iteration
                    apply_update(colony.ant(k), std::move(*built[k]));
                    built[k].reset();
                }
            } catch (...) {
                apply_error = std::current_exception();
                abort_run.store(true, std::memory_order_relaxed);
            }
            ++iter;
            if (iter >= cfg.iterations || budget_expired())
                budget_stop.store(true, std::memory_order_relaxed);
        };
        std::barrier sync(w, on_completion);

        auto worker = [&](std::uint32_t wi) {
            ConstructionScratch scratch;
            ColonyPheromone phero(colony, cfg.alpha);
            std::optional<MatrixPheromone> mat_phero;
            if (matrix) mat_phero.emplace(*matrix, cfg.alpha);
            while (!budget_stop.load(std::memory_order_relaxed) &&
                   !abort_run.load(std::memory_order_relaxed)) {
                try {
                    for (std::uint32_t k = ranges[wi].first; k < ranges[wi].last; ++k) {
                        Ant& ant = colony.ant(k);
                        built[k] = matrix
                                       ? detail::build_candidate(ant, scratch, *mat_phero,
                                                                 heur, inst, cfg, 0.0,
                                                                 false, ls)
                                       : detail::build_candidate(ant, scratch, phero, heur,
                                                                 inst, cfg, eff_partial_prob,
                                                                 iter == 0, ls);
                    }
                } catch (...) {
                    errors[wi] = std::current_exception();
                    abort_run.store(true, std::memory_order_relaxed);
                }
                sync.arrive_and_wait();
            }
            comparisons[wi] = scratch.comparisons;
        };
        std::vector<std::thread> threads;
        threads.reserve(w);
        for (std::uint32_t wi = 0; wi < w; ++wi) threads.emplace_back(worker, wi);
        for (auto& t : threads) t.join();
    }

    {
        std::lock_guard<std::mutex> lk(mon_mx);
        finished = true;
    }
    mon_cv.notify_all();
    if (monitor.joinable()) monitor.join();

    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
    if (apply_error) std::rethrow_exception(apply_error);

    RunReport report;
    report.best_tour = colony.g_best_copy();
    report.best_length = report.best_tour.length;
    detail::check_tour(inst, report.best_tour);
    if (inst.optimum()) {
        const double opt = static_cast<double>(*inst.optimum());
        report.pct_error = 100.0 * (static_cast<double>(report.best_length) - opt) / opt;
    }
    report.wall_time_s = detail::seconds_since(start);
    report.iterations_done = constructions.load() / m;
    for (const std::uint64_t c : comparisons) report.comparisons_total += c;
    samples.push_back({report.wall_time_s, report.best_length, report.iterations_done});
    report.convergence = std::move(samples);
    return report;
}

// Time-limited reference run: standard P-ACO (full constructions every
// iteration) until the budget expires, reporting how many iterations fit.
// Pairing report.iterations_done against a PartialACO run's iteration count
// over the same wall time yields the relative speedup.
inline RunReport run_timed_baseline(const Instance& inst, RunConfig cfg,
                                    double budget_s) {
    if (budget_s <= 0.0) throw std::invalid_argument("budget must be positive");
    cfg.time_budget_s = budget_s;
    return run(inst, cfg, Mode::paco_full);
}

} // namespace paco
