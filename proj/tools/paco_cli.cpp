// Command-line front end: single solves and benchmark sweeps.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

#include "paco/bench.hpp"
#include "paco/config.hpp"
#include "paco/engine.hpp"

namespace {

int run_solve(const std::string& instance_path, const std::string& mode_name,
              const paco::RunConfig& cfg, const std::string& optima_path,
              const std::string& convergence_path, double time_budget) {
    paco::Instance inst = paco::parse_tsplib_file(instance_path);
    if (!optima_path.empty()) {
        std::ifstream in(optima_path);
        if (!in) throw std::runtime_error("cannot open optima file: " + optima_path);
        const auto optima = paco::load_optima(in);
        if (const auto it = optima.find(inst.name()); it != optima.end())
            inst.set_optimum(it->second);
    }

    const auto mode = paco::mode_from_name(mode_name);
    if (!mode) throw std::runtime_error("unknown mode '" + mode_name + "'");

    paco::RunConfig run_cfg = cfg;
    run_cfg.time_budget_s = time_budget;
    const paco::RunReport report = paco::run(inst, run_cfg, *mode);

    std::cout << "instance:    " << inst.name() << " (" << inst.n() << " cities)\n"
              << "mode:        " << mode_name << "\n"
              << "best length: " << report.best_length << "\n";
    if (report.pct_error)
        std::cout << "error:       " << std::fixed << std::setprecision(2)
                  << *report.pct_error << "% vs optimum " << *inst.optimum() << "\n";
    std::cout << "time:        " << std::fixed << std::setprecision(2)
              << report.wall_time_s << " s\n"
              << "iterations:  " << report.iterations_done << "\n"
              << "comparisons: " << report.comparisons_total << "\n";

    if (!convergence_path.empty()) {
        std::ofstream out(convergence_path);
        if (!out)
            throw std::runtime_error("cannot write convergence csv: " + convergence_path);
        paco::convergence_csv(report, out);
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"PartialACO TSP solver and benchmark harness"};
    app.require_subcommand(1);

    // --- solve ---
    auto* solve = app.add_subcommand("solve", "solve a single TSPLIB instance");
    std::string instance_path;
    std::string mode = "partial";
    std::string optima_path;
    std::string convergence_path;
    double time_budget = 0.0;
    paco::RunConfig cfg;
    solve->add_option("instance", instance_path, "TSPLIB .tsp file (EUC_2D)")
        ->required();
    solve->add_option("--mode", mode, "partial | paco | classic")
        ->check(CLI::IsMember({"partial", "paco", "classic"}));
    solve->add_option("--ants", cfg.ants, "ant count");
    solve->add_option("--iters", cfg.iterations, "iteration count");
    solve->add_option("--alpha", cfg.alpha, "pheromone exponent");
    solve->add_option("--beta", cfg.beta, "heuristic exponent");
    solve->add_option("--partial-prob", cfg.partial_prob,
                      "probability of a partial construction");
    solve->add_option("--max-mod", cfg.max_mod_frac,
                      "max fraction of the tour rebuilt per construction");
    solve->add_option("--two-opt-prob", cfg.two_opt_prob, "2-opt probability");
    solve->add_option("--two-opt-window", cfg.two_opt_window,
                      "2-opt position window (0 = unbounded)");
    solve->add_option("--workers", cfg.workers, "parallel workers");
    solve->add_option("--seed", cfg.seed, "master RNG seed");
    solve->add_option("--rho", cfg.rho, "classic-mode evaporation rate");
    solve->add_option("--optima", optima_path, "optima config file");
    solve->add_option("--convergence-csv", convergence_path,
                      "write convergence samples to this CSV");
    solve->add_option("--convergence-interval", cfg.convergence_interval_s,
                      "sampling interval in seconds");
    solve->add_option("--time-budget", time_budget,
                      "wall-clock budget in seconds (0 = none)");
    solve->add_flag("--sync", cfg.synchronous, "barriered deterministic iterations");
    solve->add_flag("--validate", cfg.validate_tours,
                    "validate every constructed tour");

    // --- bench ---
    auto* bench = app.add_subcommand("bench", "run a benchmark sweep");
    std::string config_path;
    std::string preset;
    std::string instances_dir = "data";
    std::string bench_optima;
    std::string out_dir;
    unsigned trials_override = 0;
    bool full_trials = false;
    bench->add_option("config", config_path, "experiment config file");
    bench->add_option("--preset", preset, "built-in preset table1..table8");
    bench->add_option("--instances-dir", instances_dir,
                      "directory holding <name>.tsp files (presets)");
    bench->add_option("--optima", bench_optima, "optima config file (presets)");
    bench->add_option("--out", out_dir, "output directory for CSV reports");
    bench->add_option("--trials", trials_override, "override trial count");
    bench->add_flag("--full", full_trials, "use 100 trials per row");

    CLI11_PARSE(app, argc, argv);

    try {
        if (solve->parsed()) {
            if (cfg.convergence_interval_s == 0.0 && !convergence_path.empty())
                cfg.convergence_interval_s = 1.0;
            return run_solve(instance_path, mode, cfg, optima_path, convergence_path,
                             time_budget);
        }

        paco::ExperimentSpec spec;
        if (!preset.empty()) {
            std::string optima = bench_optima;
            if (optima.empty()) {
                const auto fallback = std::filesystem::path(instances_dir) / "optima.txt";
                if (std::filesystem::exists(fallback)) optima = fallback.string();
            }
            spec = paco::table_preset(preset, instances_dir, optima);
        } else if (!config_path.empty()) {
            std::ifstream in(config_path);
            if (!in) throw std::runtime_error("cannot open config: " + config_path);
            spec = paco::parse_experiment_config(in);
        } else {
            throw std::runtime_error("bench needs a config file or --preset");
        }
        if (full_trials) spec.trials = 100;
        if (trials_override > 0) spec.trials = trials_override;
        if (!out_dir.empty()) spec.out_dir = out_dir;

        const paco::ExperimentResult result = paco::run_experiment(spec);
        std::cout << "\n";
        paco::render_table(result.rows, std::cout);
        return 0;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
