#pragma once

#include <atomic>
#include <cstdint>
#include <limits>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "paco/instance.hpp"
#include "paco/rng.hpp"

namespace paco {

// Per-ant state. The tour and rng are touched only by the owning worker;
// the neighbour slice and length are published for concurrent readers.
class Ant {
public:
    Ant(std::uint32_t id, std::uint32_t n, Rng rng)
        : id_(id), rng_(std::move(rng)), nbr_(2 * static_cast<std::size_t>(n)) {}

    std::uint32_t id() const { return id_; }
    Rng& rng() { return rng_; }

    bool has_l_best() const { return !l_best_.order.empty(); }
    const Tour& l_best() const { return l_best_; }
    std::int64_t published_length() const {
        return l_best_len_.load(std::memory_order_relaxed);
    }

private:
    friend class Colony;

    // Seqlock write: only the owning worker calls this.
    void publish(const Tour& tour) {
        const std::uint64_t v = version_.fetch_add(1, std::memory_order_acq_rel);
        (void)v; // now odd: readers retry
        const std::size_t n = tour.order.size();
        for (std::size_t pos = 0; pos < n; ++pos) {
            const std::uint32_t city = tour.order[pos];
            const std::uint32_t prev = tour.order[(pos + n - 1) % n];
            const std::uint32_t next = tour.order[(pos + 1) % n];
            nbr_[2 * city].store(prev, std::memory_order_relaxed);
            nbr_[2 * city + 1].store(next, std::memory_order_relaxed);
        }
        l_best_len_.store(tour.length, std::memory_order_relaxed);
        version_.fetch_add(1, std::memory_order_release);
    }

    // Seqlock read of one city's neighbour pair in this ant's l_best, plus the
    // matching tour length. Never returns a blend of two tours; returns
    // nullopt while no tour is published or under sustained write contention.
    struct PairRead {
        std::uint32_t a, b;
        std::int64_t length;
    };
    std::optional<PairRead> read_pair(std::uint32_t city) const {
        for (int tries = 0; tries < 64; ++tries) {
            const std::uint64_t v1 = version_.load(std::memory_order_acquire);
            if (v1 == 0) return std::nullopt;
            if (v1 & 1) continue;
            PairRead r{nbr_[2 * city].load(std::memory_order_relaxed),
                       nbr_[2 * city + 1].load(std::memory_order_relaxed),
                       l_best_len_.load(std::memory_order_relaxed)};
            std::atomic_thread_fence(std::memory_order_acquire);
            if (version_.load(std::memory_order_relaxed) == v1) return r;
        }
        return std::nullopt;
    }

    std::uint32_t id_;
    Rng rng_;
    Tour l_best_; // owner-only
    std::atomic<std::uint64_t> version_{0};
    std::atomic<std::int64_t> l_best_len_{std::numeric_limits<std::int64_t>::max()};
    std::vector<std::atomic<std::uint32_t>> nbr_; // [2*city], [2*city+1]
};

// Shared colony state: per-ant best tours, the global best, and the
// edge-indexed neighbour slices that replace a pheromone matrix.
class Colony {
public:
    Colony(const Instance& inst, std::uint32_t ant_count, double tau0,
           std::uint64_t master_seed)
        : inst_(&inst), tau0_(tau0) {
        if (ant_count < 1) throw std::invalid_argument("ant count must be >= 1");
        if (tau0 <= 0.0) throw std::invalid_argument("tau0 must be positive");
        ants_.reserve(ant_count);
        for (std::uint32_t k = 0; k < ant_count; ++k)
            ants_.push_back(std::make_unique<Ant>(k, inst.n(),
                                                  Rng::for_stream(master_seed, k)));
    }

    const Instance& instance() const { return *inst_; }
    std::uint32_t ant_count() const { return static_cast<std::uint32_t>(ants_.size()); }
    double tau0() const { return tau0_; }
    Ant& ant(std::uint32_t k) { return *ants_[k]; }
    const Ant& ant(std::uint32_t k) const { return *ants_[k]; }

    std::int64_t g_best_length() const {
        return g_best_len_.load(std::memory_order_relaxed);
    }
    bool has_g_best() const {
        return g_best_length() != std::numeric_limits<std::int64_t>::max();
    }
    Tour g_best_copy() const {
        std::lock_guard<std::mutex> lock(g_mutex_);
        return g_best_;
    }

    // Replaces the ant's l_best iff the candidate is strictly shorter and
    // republishes its neighbour slice. Ties keep the incumbent.
    bool update_l_best(Ant& ant, Tour candidate) {
        if (!is_permutation_of_n(inst_->n(), candidate.order))
            throw std::invalid_argument("candidate tour is not a permutation");
        if (ant.has_l_best() && candidate.length >= ant.l_best_.length) return false;
        ant.l_best_ = std::move(candidate);
        ant.publish(ant.l_best_);
        return true;
    }

    // Replaces g_best iff strictly shorter; safe under concurrent submission.
    bool update_g_best(const Tour& candidate) {
        std::int64_t cur = g_best_len_.load(std::memory_order_relaxed);
        while (candidate.length < cur) {
            if (g_best_len_.compare_exchange_weak(cur, candidate.length,
                                                  std::memory_order_relaxed)) {
                std::lock_guard<std::mutex> lock(g_mutex_);
                if (g_best_.order.empty() || candidate.length < g_best_.length)
                    g_best_ = candidate;
                return true;
            }
        }
        return false;
    }

    // tau(i,j) = tau0 + sum over ants whose l_best contains undirected edge
    // {i,j} of g_best/l_best, using the g_best value at read time. Each
    // contribution is clamped to (0,1]; a stale g_best read can otherwise
    // momentarily exceed a freshly improved l_best under asynchrony.
    double pheromone(std::uint32_t i, std::uint32_t j) const {
        const double g = static_cast<double>(g_best_length());
        double tau = tau0_;
        for (const auto& ant : ants_) {
            const auto r = ant->read_pair(i);
            if (!r) continue;
            if (r->a == j || r->b == j)
                tau += contribution(g, static_cast<double>(r->length));
        }
        return tau;
    }

    // g_best/l_best ratio per ant, snapshotted at construction start.
    // Zero marks an ant with no published tour yet.
    void snapshot_ratios(std::span<double> out) const {
        const double g = static_cast<double>(g_best_length());
        for (std::size_t k = 0; k < ants_.size(); ++k) {
            const std::int64_t len = ants_[k]->published_length();
            out[k] = (len == std::numeric_limits<std::int64_t>::max())
                         ? 0.0
                         : contribution(g, static_cast<double>(len));
        }
    }

    std::optional<Ant::PairRead> read_pair(std::uint32_t ant, std::uint32_t city) const {
        return ants_[ant]->read_pair(city);
    }

private:
    static double contribution(double g_len, double l_len) {
        const double r = g_len / l_len;
        return r > 1.0 ? 1.0 : r;
    }

    const Instance* inst_;
    double tau0_;
    std::vector<std::unique_ptr<Ant>> ants_;
    std::atomic<std::int64_t> g_best_len_{std::numeric_limits<std::int64_t>::max()};
    mutable std::mutex g_mutex_;
    Tour g_best_;
};

} // namespace paco
