#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "paco/engine.hpp"

namespace paco {

// One point of the parameter grid swept over each instance.
struct GridPoint {
    double max_mod_frac = 1.0;
    double partial_prob = 1.0;
    double two_opt_prob = 0.0;
};

struct ExperimentSpec {
    std::string label = "experiment";
    std::vector<std::string> instance_paths;
    std::string optima_path;
    Mode mode = Mode::partial_aco;
    std::uint32_t trials = 10;
    RunConfig base;
    std::vector<double> max_mod_grid{1.0};
    std::vector<double> partial_prob_grid; // empty: keep base.partial_prob
    std::vector<double> two_opt_prob_grid; // empty: keep base.two_opt_prob
    bool include_baseline = true;  // measure a paco_full reference per instance
    bool timed_baseline = false;   // pair baselines by wall-time budget instead
    std::string out_dir;           // empty: no files written

    std::vector<GridPoint> grid() const {
        std::vector<GridPoint> points;
        const std::vector<double> pps =
            partial_prob_grid.empty() ? std::vector<double>{base.partial_prob}
                                      : partial_prob_grid;
        const std::vector<double> tops =
            two_opt_prob_grid.empty() ? std::vector<double>{base.two_opt_prob}
                                      : two_opt_prob_grid;
        for (const double frac : max_mod_grid)
            for (const double pp : pps)
                for (const double top : tops) points.push_back({frac, pp, top});
        return points;
    }

    void validate() const {
        if (trials < 1) throw std::invalid_argument("trials must be >= 1");
        if (instance_paths.empty())
            throw std::invalid_argument("experiment needs at least one instance");
        if (max_mod_grid.empty())
            throw std::invalid_argument("parameter grid must be non-empty");
        for (const auto& path : instance_paths)
            if (!std::filesystem::exists(path))
                throw std::invalid_argument("instance file not found: " + path);
        base.validate();
    }
};

enum class Pairing { equal_iterations, time_budget };

// Per-trial raw record.
struct RunRecord {
    std::string instance;
    std::string row_label;
    std::uint32_t trial = 0;
    std::uint64_t seed = 0;
    std::int64_t best_length = 0;
    double pct_error = std::numeric_limits<double>::quiet_NaN();
    double wall_s = 0.0;
    std::uint64_t iterations = 0;
    std::uint64_t comparisons = 0;
};

// Aggregated row of a results table.
struct AggregateStats {
    std::string label;
    std::string instance;
    std::string mode;
    std::uint32_t trials = 0;
    std::uint64_t iterations = 0; // configured iteration count (pairing basis)
    double max_mod_frac = 1.0;
    double partial_prob = 1.0;
    double two_opt_prob = 0.0;
    std::uint32_t two_opt_window = 0;
    double err_mean = std::numeric_limits<double>::quiet_NaN();
    double err_sd = std::numeric_limits<double>::quiet_NaN();
    double err_best = std::numeric_limits<double>::quiet_NaN();
    double err_worst = std::numeric_limits<double>::quiet_NaN();
    double time_mean_s = 0.0;
    double time_sd_s = 0.0;
    double iters_mean = 0.0;
    double speedup = 0.0; // 0 = no baseline attached
    Pairing pairing = Pairing::equal_iterations;
    std::string error; // non-empty when the row failed
};

inline const char* pairing_name(Pairing p) {
    return p == Pairing::equal_iterations ? "equal_iterations" : "time_budget";
}

namespace detail {

struct MeanSd {
    double mean = 0.0, sd = 0.0, min = 0.0, max = 0.0;
};

inline MeanSd mean_sd(const std::vector<double>& xs) {
    MeanSd out;
    if (xs.empty()) return out;
    double sum = 0.0;
    out.min = out.max = xs[0];
    for (const double x : xs) {
        sum += x;
        out.min = std::min(out.min, x);
        out.max = std::max(out.max, x);
    }
    out.mean = sum / static_cast<double>(xs.size());
    if (xs.size() > 1) {
        double ss = 0.0;
        for (const double x : xs) ss += (x - out.mean) * (x - out.mean);
        out.sd = std::sqrt(ss / static_cast<double>(xs.size() - 1)); // sample sd
    }
    return out;
}

inline std::string fmt_double(double v) {
    std::ostringstream os;
    os << std::setprecision(17) << v;
    return os.str();
}

} // namespace detail

// Aggregates per-trial records into one table row. %-error fields stay NaN
// when any record lacks a known optimum.
inline AggregateStats aggregate_stats(const std::vector<RunRecord>& records) {
    AggregateStats out;
    out.trials = static_cast<std::uint32_t>(records.size());
    std::vector<double> errs, times, iters;
    bool have_errors = !records.empty();
    for (const auto& r : records) {
        if (std::isnan(r.pct_error)) have_errors = false;
        errs.push_back(r.pct_error);
        times.push_back(r.wall_s);
        iters.push_back(static_cast<double>(r.iterations));
    }
    if (have_errors) {
        const auto e = detail::mean_sd(errs);
        out.err_mean = e.mean;
        out.err_sd = e.sd;
        out.err_best = e.min;
        out.err_worst = e.max;
    }
    const auto t = detail::mean_sd(times);
    out.time_mean_s = t.mean;
    out.time_sd_s = t.sd;
    out.iters_mean = detail::mean_sd(iters).mean;
    return out;
}

// Relative speedup of `reference` against `baseline`. Equal-iteration rows
// compare mean wall times; time-budget rows compare iteration counts.
inline double report_speedup(const AggregateStats& reference,
                             const AggregateStats& baseline) {
    if (reference.pairing != baseline.pairing)
        throw std::invalid_argument("speedup requires rows with the same pairing basis");
    if (reference.instance != baseline.instance)
        throw std::invalid_argument("speedup requires rows on the same instance");
    if (reference.pairing == Pairing::equal_iterations) {
        if (reference.iterations != baseline.iterations)
            throw std::invalid_argument("equal-iteration pairing needs matching counts");
        return baseline.time_mean_s / reference.time_mean_s;
    }
    return reference.iters_mean / baseline.iters_mean;
}

inline void write_summary_csv(const std::vector<AggregateStats>& rows,
                              std::ostream& out) {
    out << "label,instance,mode,trials,iterations,max_mod,partial_prob,two_opt_prob,"
           "two_opt_window,err_mean,err_sd,err_best,err_worst,time_mean_s,time_sd_s,"
           "iters_mean,speedup,pairing,error\n";
    for (const auto& r : rows) {
        out << r.label << ',' << r.instance << ',' << r.mode << ',' << r.trials << ','
            << r.iterations << ',' << detail::fmt_double(r.max_mod_frac) << ','
            << detail::fmt_double(r.partial_prob) << ','
            << detail::fmt_double(r.two_opt_prob) << ',' << r.two_opt_window << ','
            << detail::fmt_double(r.err_mean) << ',' << detail::fmt_double(r.err_sd)
            << ',' << detail::fmt_double(r.err_best) << ','
            << detail::fmt_double(r.err_worst) << ','
            << detail::fmt_double(r.time_mean_s) << ','
            << detail::fmt_double(r.time_sd_s) << ','
            << detail::fmt_double(r.iters_mean) << ','
            << detail::fmt_double(r.speedup) << ',' << pairing_name(r.pairing) << ','
            << r.error << "\n";
    }
}

inline std::vector<AggregateStats> read_summary_csv(std::istream& in) {
    std::vector<AggregateStats> rows;
    std::string line;
    std::getline(in, line); // header
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<std::string> f;
        std::string field;
        std::istringstream ls(line);
        while (std::getline(ls, field, ',')) f.push_back(field);
        while (f.size() < 19) f.emplace_back();
        AggregateStats r;
        r.label = f[0];
        r.instance = f[1];
        r.mode = f[2];
        r.trials = static_cast<std::uint32_t>(std::stoul(f[3]));
        r.iterations = std::stoull(f[4]);
        r.max_mod_frac = std::stod(f[5]);
        r.partial_prob = std::stod(f[6]);
        r.two_opt_prob = std::stod(f[7]);
        r.two_opt_window = static_cast<std::uint32_t>(std::stoul(f[8]));
        r.err_mean = std::stod(f[9]);
        r.err_sd = std::stod(f[10]);
        r.err_best = std::stod(f[11]);
        r.err_worst = std::stod(f[12]);
        r.time_mean_s = std::stod(f[13]);
        r.time_sd_s = std::stod(f[14]);
        r.iters_mean = std::stod(f[15]);
        r.speedup = std::stod(f[16]);
        r.pairing = f[17] == "time_budget" ? Pairing::time_budget
                                           : Pairing::equal_iterations;
        r.error = f[18];
        rows.push_back(std::move(r));
    }
    return rows;
}

inline void write_runs_csv(const std::vector<RunRecord>& records, std::ostream& out) {
    out << "instance,row,trial,seed,best_length,pct_error,wall_s,iterations,"
           "comparisons\n";
    for (const auto& r : records)
        out << r.instance << ',' << r.row_label << ',' << r.trial << ',' << r.seed << ','
            << r.best_length << ',' << detail::fmt_double(r.pct_error) << ','
            << detail::fmt_double(r.wall_s) << ',' << r.iterations << ','
            << r.comparisons << "\n";
}

// Human-readable aligned rendering of a results table.
inline void render_table(const std::vector<AggregateStats>& rows, std::ostream& out) {
    out << std::left << std::setw(16) << "instance" << std::setw(9) << "mode"
        << std::setw(8) << "maxmod" << std::setw(7) << "pp" << std::setw(8) << "2opt"
        << std::right << std::setw(10) << "err_mean" << std::setw(9) << "err_sd"
        << std::setw(9) << "best" << std::setw(9) << "worst" << std::setw(11)
        << "time_s" << std::setw(10) << "speedup" << "\n";
    for (const auto& r : rows) {
        out << std::left << std::setw(16) << r.instance << std::setw(9) << r.mode
            << std::setw(8) << std::setprecision(3) << r.max_mod_frac << std::setw(7)
            << r.partial_prob << std::setw(8) << r.two_opt_prob << std::right
            << std::fixed << std::setprecision(2);
        if (std::isnan(r.err_mean))
            out << std::setw(10) << "-" << std::setw(9) << "-" << std::setw(9) << "-"
                << std::setw(9) << "-";
        else
            out << std::setw(10) << r.err_mean << std::setw(9) << r.err_sd
                << std::setw(9) << r.err_best << std::setw(9) << r.err_worst;
        out << std::setw(11) << r.time_mean_s;
        if (r.speedup > 0.0)
            out << std::setw(9) << r.speedup << 'x';
        else
            out << std::setw(10) << "-";
        if (!r.error.empty()) out << "  ERROR: " << r.error;
        out << "\n";
        out.unsetf(std::ios::fixed);
        out << std::setprecision(6);
    }
}

struct ExperimentResult {
    std::vector<AggregateStats> rows;
    std::vector<RunRecord> records;
};

namespace detail {

inline std::string row_label(const GridPoint& g, const char* mode) {
    std::ostringstream os;
    os << mode << "_mm" << g.max_mod_frac << "_pp" << g.partial_prob << "_ls"
       << g.two_opt_prob;
    return os.str();
}

inline void maybe_write_convergence(const std::string& out_dir,
                                    const std::string& instance,
                                    const std::string& row, std::uint32_t trial,
                                    const RunReport& report) {
    if (out_dir.empty() || report.convergence.empty()) return;
    const std::filesystem::path dir = std::filesystem::path(out_dir) / "conv";
    std::filesystem::create_directories(dir);
    std::ofstream out(dir / (instance + "_" + row + "_t" + std::to_string(trial) +
                             ".csv"));
    convergence_csv(report, out);
}

} // namespace detail

// Runs the full sweep: for every instance and grid point, `trials` seeded
// runs (seed = base seed + trial index), aggregated into one row each.
// Per-run failures are recorded on their row without aborting the sweep.
inline ExperimentResult run_experiment(const ExperimentSpec& spec,
                                       std::ostream& log = std::cout) {
    spec.validate();
    ExperimentResult result;

    std::map<std::string, std::int64_t> optima;
    if (!spec.optima_path.empty()) {
        std::ifstream in(spec.optima_path);
        if (!in)
            throw std::runtime_error("cannot open optima file: " + spec.optima_path);
        optima = load_optima(in);
    }

    if (!spec.out_dir.empty())
        std::filesystem::create_directories(spec.out_dir);

    for (const auto& path : spec.instance_paths) {
        Instance inst = parse_tsplib_file(path);
        if (const auto it = optima.find(inst.name()); it != optima.end())
            inst.set_optimum(it->second);

        // Reference rows for the speedup column.
        std::optional<AggregateStats> baseline;
        std::vector<RunRecord> baseline_trials;
        if (spec.include_baseline && spec.mode != Mode::paco_full &&
            !spec.timed_baseline) {
            AggregateStats row;
            row.label = spec.label;
            row.instance = inst.name();
            row.mode = mode_name(Mode::paco_full);
            row.iterations = spec.base.iterations;
            row.two_opt_window = spec.base.two_opt_window;
            std::vector<RunRecord> records;
            for (std::uint32_t t = 0; t < spec.trials; ++t) {
                RunConfig cfg = spec.base;
                cfg.seed = spec.base.seed + t;
                try {
                    const RunReport rep = run(inst, cfg, Mode::paco_full);
                    RunRecord rec{inst.name(), "baseline", t, cfg.seed, rep.best_length,
                                  rep.pct_error.value_or(
                                      std::numeric_limits<double>::quiet_NaN()),
                                  rep.wall_time_s, rep.iterations_done,
                                  rep.comparisons_total};
                    records.push_back(rec);
                    detail::maybe_write_convergence(spec.out_dir, inst.name(),
                                                    "baseline", t, rep);
                } catch (const std::exception& e) {
                    row.error = e.what();
                    break;
                }
            }
            const AggregateStats agg = aggregate_stats(records);
            row.trials = agg.trials;
            row.err_mean = agg.err_mean;
            row.err_sd = agg.err_sd;
            row.err_best = agg.err_best;
            row.err_worst = agg.err_worst;
            row.time_mean_s = agg.time_mean_s;
            row.time_sd_s = agg.time_sd_s;
            row.iters_mean = agg.iters_mean;
            result.rows.push_back(row);
            for (auto& r : records) result.records.push_back(r);
            if (row.error.empty()) baseline = row;
            log << "[" << spec.label << "] " << inst.name()
                << " baseline (paco_full): " << row.time_mean_s << " s mean\n";
        }

        for (const GridPoint& g : spec.grid()) {
            AggregateStats row;
            row.label = spec.label;
            row.instance = inst.name();
            row.mode = mode_name(spec.mode);
            row.iterations = spec.base.iterations;
            row.max_mod_frac = g.max_mod_frac;
            row.partial_prob = g.partial_prob;
            row.two_opt_prob = g.two_opt_prob;
            row.two_opt_window = spec.base.two_opt_window;
            const std::string label = detail::row_label(g, mode_name(spec.mode));

            std::vector<RunRecord> records;
            std::vector<RunRecord> timed_records;
            for (std::uint32_t t = 0; t < spec.trials; ++t) {
                RunConfig cfg = spec.base;
                cfg.seed = spec.base.seed + t;
                cfg.max_mod_frac = g.max_mod_frac;
                cfg.partial_prob = g.partial_prob;
                cfg.two_opt_prob = g.two_opt_prob;
                try {
                    const RunReport rep = run(inst, cfg, spec.mode);
                    records.push_back({inst.name(), label, t, cfg.seed, rep.best_length,
                                       rep.pct_error.value_or(
                                           std::numeric_limits<double>::quiet_NaN()),
                                       rep.wall_time_s, rep.iterations_done,
                                       rep.comparisons_total});
                    detail::maybe_write_convergence(spec.out_dir, inst.name(), label, t,
                                                    rep);
                    if (spec.timed_baseline) {
                        // Give standard P-ACO the same wall time this trial used.
                        RunConfig base_cfg = spec.base;
                        base_cfg.seed = spec.base.seed + 7777 + t;
                        const RunReport brep =
                            run_timed_baseline(inst, base_cfg, rep.wall_time_s);
                        timed_records.push_back(
                            {inst.name(), "timed_baseline", t, base_cfg.seed,
                             brep.best_length,
                             brep.pct_error.value_or(
                                 std::numeric_limits<double>::quiet_NaN()),
                             brep.wall_time_s, brep.iterations_done,
                             brep.comparisons_total});
                        detail::maybe_write_convergence(spec.out_dir, inst.name(),
                                                        "timed_baseline", t, brep);
                    }
                } catch (const std::exception& e) {
                    row.error = e.what();
                }
            }

            const AggregateStats agg = aggregate_stats(records);
            row.trials = agg.trials;
            row.err_mean = agg.err_mean;
            row.err_sd = agg.err_sd;
            row.err_best = agg.err_best;
            row.err_worst = agg.err_worst;
            row.time_mean_s = agg.time_mean_s;
            row.time_sd_s = agg.time_sd_s;
            row.iters_mean = agg.iters_mean;
            if (baseline) {
                row.pairing = Pairing::equal_iterations;
                row.speedup = report_speedup(row, *baseline);
            }
            result.rows.push_back(row);
            for (auto& r : records) result.records.push_back(r);

            if (spec.timed_baseline && !timed_records.empty()) {
                AggregateStats brow;
                brow.label = spec.label;
                brow.instance = inst.name();
                brow.mode = "paco_timed";
                brow.iterations = spec.base.iterations;
                brow.pairing = Pairing::time_budget;
                const AggregateStats bagg = aggregate_stats(timed_records);
                brow.trials = bagg.trials;
                brow.err_mean = bagg.err_mean;
                brow.err_sd = bagg.err_sd;
                brow.err_best = bagg.err_best;
                brow.err_worst = bagg.err_worst;
                brow.time_mean_s = bagg.time_mean_s;
                brow.time_sd_s = bagg.time_sd_s;
                brow.iters_mean = bagg.iters_mean;
                AggregateStats ref = row;
                ref.pairing = Pairing::time_budget;
                ref.iters_mean = static_cast<double>(spec.base.iterations);
                brow.speedup = report_speedup(ref, brow);
                result.rows.push_back(brow);
                for (auto& r : timed_records) result.records.push_back(r);
            }

            log << "[" << spec.label << "] " << inst.name() << " " << label << ": ";
            if (!std::isnan(row.err_mean)) log << row.err_mean << "% mean err, ";
            log << row.time_mean_s << " s mean";
            if (row.speedup > 0.0) log << ", " << row.speedup << "x";
            if (!row.error.empty()) log << " ERROR: " << row.error;
            log << "\n";
        }
    }

    if (!spec.out_dir.empty()) {
        std::ofstream summary(std::filesystem::path(spec.out_dir) /
                              (spec.label + "_summary.csv"));
        write_summary_csv(result.rows, summary);
        std::ofstream runs(std::filesystem::path(spec.out_dir) /
                           (spec.label + "_runs.csv"));
        write_runs_csv(result.records, runs);
    }
    return result;
}

} // namespace paco
