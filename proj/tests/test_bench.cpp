#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "oracles.hpp"
#include "paco/bench.hpp"
#include "paco/config.hpp"

using namespace paco;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() /
               ("paco_bench_test_" + std::to_string(std::random_device{}()));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

std::string write_instance(const TempDir& dir, const Instance& inst) {
    const fs::path p = dir.path / (inst.name() + ".tsp");
    std::ofstream out(p);
    emit_tsplib(inst, out);
    return p.string();
}

} // namespace

TEST_CASE("aggregate stats over {2%, 4%}") {
    std::vector<RunRecord> records(2);
    records[0].pct_error = 2.0;
    records[0].wall_s = 1.0;
    records[0].iterations = 100;
    records[1].pct_error = 4.0;
    records[1].wall_s = 3.0;
    records[1].iterations = 100;
    const AggregateStats agg = aggregate_stats(records);
    CHECK(agg.trials == 2);
    CHECK(agg.err_mean == doctest::Approx(3.0).epsilon(1e-15));
    CHECK(agg.err_sd == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
    CHECK(agg.err_best == 2.0);
    CHECK(agg.err_worst == 4.0);
    CHECK(agg.time_mean_s == doctest::Approx(2.0));
    CHECK(agg.iters_mean == doctest::Approx(100.0));
}

TEST_CASE("single-trial aggregates collapse to one value") {
    std::vector<RunRecord> records(1);
    records[0].pct_error = 3.5;
    records[0].wall_s = 2.0;
    const AggregateStats agg = aggregate_stats(records);
    CHECK(agg.err_mean == 3.5);
    CHECK(agg.err_best == 3.5);
    CHECK(agg.err_worst == 3.5);
    CHECK(agg.err_sd == 0.0);
}

TEST_CASE("speedup: equal-iteration pairing compares mean wall times") {
    AggregateStats baseline;
    baseline.instance = "pcb442";
    baseline.iterations = 100000;
    baseline.time_mean_s = 40.53;
    AggregateStats reference = baseline;
    reference.time_mean_s = 17.94;
    CHECK(report_speedup(reference, baseline) == doctest::Approx(2.26).epsilon(0.002));
    CHECK(report_speedup(baseline, baseline) == doctest::Approx(1.0));
}

TEST_CASE("speedup: time-budget pairing compares iteration counts") {
    AggregateStats baseline;
    baseline.instance = "mona-lisa100K";
    baseline.pairing = Pairing::time_budget;
    baseline.iters_mean = 83.40;
    AggregateStats reference = baseline;
    reference.iters_mean = 100000.0;
    CHECK(report_speedup(reference, baseline) == doctest::Approx(1199.04).epsilon(1e-4));
}

TEST_CASE("speedup rejects mismatched pairing bases") {
    AggregateStats a, b;
    a.instance = b.instance = "x";
    a.pairing = Pairing::equal_iterations;
    b.pairing = Pairing::time_budget;
    CHECK_THROWS_AS(report_speedup(a, b), std::invalid_argument);

    b.pairing = Pairing::equal_iterations;
    b.instance = "y";
    CHECK_THROWS_AS(report_speedup(a, b), std::invalid_argument);

    b.instance = "x";
    a.iterations = 1000;
    b.iterations = 2000;
    CHECK_THROWS_AS(report_speedup(a, b), std::invalid_argument);
}

TEST_CASE("summary CSV round-trips exactly") {
    std::vector<AggregateStats> rows(2);
    rows[0].label = "t";
    rows[0].instance = "a";
    rows[0].mode = "partial";
    rows[0].trials = 3;
    rows[0].iterations = 1000;
    rows[0].max_mod_frac = 0.1;
    rows[0].partial_prob = 0.95;
    rows[0].two_opt_prob = 0.001;
    rows[0].err_mean = 2.7182818284590452;
    rows[0].err_sd = 0.3331;
    rows[0].err_best = 1.0 / 3.0;
    rows[0].err_worst = 4.444444444444444;
    rows[0].time_mean_s = 17.94;
    rows[0].time_sd_s = 0.26;
    rows[0].iters_mean = 1000.0;
    rows[0].speedup = 2.26;
    rows[1] = rows[0];
    rows[1].instance = "b";
    rows[1].pairing = Pairing::time_budget;
    rows[1].err_mean = 0.1 + 0.2; // not representable exactly; must survive
    rows[1].error = "boom";

    std::ostringstream out;
    write_summary_csv(rows, out);
    std::istringstream in(out.str());
    const auto back = read_summary_csv(in);
    REQUIRE(back.size() == 2);
    for (std::size_t i = 0; i < 2; ++i) {
        CHECK(back[i].instance == rows[i].instance);
        CHECK(back[i].err_mean == rows[i].err_mean);   // bit-exact
        CHECK(back[i].err_best == rows[i].err_best);   // bit-exact
        CHECK(back[i].time_mean_s == rows[i].time_mean_s);
        CHECK(back[i].speedup == rows[i].speedup);
        CHECK(back[i].pairing == rows[i].pairing);
        CHECK(back[i].error == rows[i].error);
    }
}

TEST_CASE("experiment config parses scalars, lists and strings") {
    std::istringstream in(
        "# sweep config\n"
        "label = \"demo\"\n"
        "instances = [\"a.tsp\", \"b.tsp\"]\n"
        "optima = \"optima.txt\"\n"
        "mode = \"partial\"\n"
        "trials = 4\n"
        "ants = 8\n"
        "iterations = 500\n"
        "alpha = 5.0\n"
        "beta = 5.0\n"
        "workers = 2\n"
        "seed = 99\n"
        "max_mod = [0.5, 0.1]\n"
        "partial_prob = [1.0, 0.95]\n"
        "two_opt_prob = [0.0]\n"
        "two_opt_window = 500\n"
        "baseline = false\n"
        "out_dir = \"results\"\n");
    const ExperimentSpec spec = parse_experiment_config(in);
    CHECK(spec.label == "demo");
    REQUIRE(spec.instance_paths.size() == 2);
    CHECK(spec.instance_paths[1] == "b.tsp");
    CHECK(spec.mode == Mode::partial_aco);
    CHECK(spec.trials == 4);
    CHECK(spec.base.ants == 8);
    CHECK(spec.base.iterations == 500);
    CHECK(spec.base.seed == 99);
    CHECK(spec.base.two_opt_window == 500);
    CHECK(spec.max_mod_grid == std::vector<double>{0.5, 0.1});
    CHECK(spec.partial_prob_grid == std::vector<double>{1.0, 0.95});
    CHECK_FALSE(spec.include_baseline);
    CHECK(spec.out_dir == "results");
    CHECK(spec.grid().size() == 4);
}

TEST_CASE("experiment config rejects malformed input") {
    std::istringstream unknown("bogus_key = 3\n");
    CHECK_THROWS_AS(parse_experiment_config(unknown), ParseError);
    std::istringstream noval("trials =\n");
    CHECK_THROWS_AS(parse_experiment_config(noval), ParseError);
    std::istringstream badnum("trials = \"many\"\n");
    CHECK_THROWS_AS(parse_experiment_config(badnum), ParseError);
    std::istringstream badlist("max_mod = [0.5\n");
    CHECK_THROWS_AS(parse_experiment_config(badlist), ParseError);
    std::istringstream badmode("mode = \"warp\"\n");
    CHECK_THROWS_AS(parse_experiment_config(badmode), ParseError);
}

TEST_CASE("presets exist for tables 1 through 8 with the reference parameters") {
    for (int i = 1; i <= 8; ++i) {
        const ExperimentSpec spec =
            table_preset("table" + std::to_string(i), "data", "");
        CHECK(spec.base.ants == 16);
        CHECK(spec.base.iterations == 100000);
        CHECK(spec.base.alpha == 5.0);
        CHECK(spec.base.beta == 5.0);
        CHECK(spec.base.workers == 8);
        CHECK_FALSE(spec.instance_paths.empty());
    }
    CHECK(table_preset("table1", "d", "").mode == Mode::paco_full);
    CHECK(table_preset("table3", "d", "").max_mod_grid ==
          std::vector<double>{0.5, 0.4, 0.3, 0.2, 0.1});
    CHECK(table_preset("table4", "d", "").partial_prob_grid ==
          std::vector<double>{0.95});
    CHECK(table_preset("table5", "d", "").two_opt_prob_grid ==
          std::vector<double>{0.001});
    CHECK(table_preset("table7", "d", "").base.two_opt_window == 500);
    CHECK(table_preset("table7", "d", "").max_mod_grid == std::vector<double>{0.01});
    CHECK(table_preset("table8", "d", "").timed_baseline);
    CHECK_THROWS_AS(table_preset("table9", "d", ""), std::invalid_argument);
}

TEST_CASE("run_experiment sweeps a grid and writes reports") {
    TempDir dir;
    std::mt19937_64 gen(5);
    const Instance inst = oracle::random_instance(gen, 16, 300.0, "mini");
    const std::string path = write_instance(dir, inst);

    std::ofstream optima(dir.path / "optima.txt");
    optima << "mini " << oracle::held_karp(inst) << "\n";
    optima.close();

    ExperimentSpec spec;
    spec.label = "smoke";
    spec.instance_paths = {path};
    spec.optima_path = (dir.path / "optima.txt").string();
    spec.trials = 2;
    spec.base.ants = 4;
    spec.base.iterations = 60;
    spec.base.workers = 1;
    spec.base.seed = 42;
    spec.base.convergence_interval_s = 0.001;
    spec.max_mod_grid = {1.0, 0.5};
    spec.partial_prob_grid = {1.0};
    spec.out_dir = (dir.path / "out").string();

    std::ostringstream log;
    const ExperimentResult result = run_experiment(spec, log);

    // 1 baseline row + 2 grid rows.
    REQUIRE(result.rows.size() == 3);
    CHECK(result.rows[0].mode == "paco");
    CHECK(result.records.size() == 6);
    for (const auto& row : result.rows) {
        CHECK(row.error.empty());
        CHECK(row.trials == 2);
        CHECK_FALSE(std::isnan(row.err_mean));
        CHECK(row.err_best <= row.err_mean);
        CHECK(row.err_mean <= row.err_worst);
        CHECK(row.err_sd >= 0.0);
    }
    CHECK(result.rows[1].speedup > 0.0);

    CHECK(fs::exists(dir.path / "out" / "smoke_summary.csv"));
    CHECK(fs::exists(dir.path / "out" / "smoke_runs.csv"));
    CHECK(fs::exists(dir.path / "out" / "conv"));

    // Round-trip of emitted aggregates.
    std::ifstream in(dir.path / "out" / "smoke_summary.csv");
    const auto back = read_summary_csv(in);
    REQUIRE(back.size() == 3);
    for (std::size_t i = 0; i < back.size(); ++i) {
        CHECK(back[i].err_mean == result.rows[i].err_mean);
        CHECK(back[i].time_mean_s == result.rows[i].time_mean_s);
        CHECK(back[i].speedup == result.rows[i].speedup);
    }
}

TEST_CASE("sweeps are deterministic for workers=1 and a fixed master seed") {
    TempDir dir;
    std::mt19937_64 gen(7);
    const Instance inst = oracle::random_instance(gen, 18, 400.0, "det");
    const std::string path = write_instance(dir, inst);

    ExperimentSpec spec;
    spec.label = "det";
    spec.instance_paths = {path};
    spec.trials = 3;
    spec.base.ants = 4;
    spec.base.iterations = 80;
    spec.base.workers = 1;
    spec.base.seed = 7;
    spec.include_baseline = false;
    spec.max_mod_grid = {1.0, 0.3};

    std::ostringstream log;
    const ExperimentResult a = run_experiment(spec, log);
    const ExperimentResult b = run_experiment(spec, log);
    REQUIRE(a.records.size() == b.records.size());
    for (std::size_t i = 0; i < a.records.size(); ++i) {
        CHECK(a.records[i].best_length == b.records[i].best_length);
        CHECK(a.records[i].comparisons == b.records[i].comparisons);
        CHECK(a.records[i].seed == b.records[i].seed);
    }
    // Fresh seeds shift results.
    spec.base.seed = 8;
    const ExperimentResult c = run_experiment(spec, log);
    bool any_diff = false;
    for (std::size_t i = 0; i < a.records.size(); ++i)
        any_diff = any_diff || a.records[i].comparisons != c.records[i].comparisons;
    CHECK(any_diff);
}

TEST_CASE("timed-baseline pairing produces a time_budget row") {
    TempDir dir;
    std::mt19937_64 gen(9);
    const Instance inst = oracle::random_instance(gen, 20, 400.0, "timed");
    const std::string path = write_instance(dir, inst);

    ExperimentSpec spec;
    spec.label = "timed";
    spec.instance_paths = {path};
    spec.trials = 1;
    spec.base.ants = 2;
    spec.base.iterations = 300;
    spec.base.workers = 1;
    spec.base.seed = 3;
    spec.include_baseline = false;
    spec.timed_baseline = true;

    std::ostringstream log;
    const ExperimentResult result = run_experiment(spec, log);
    REQUIRE(result.rows.size() == 2);
    CHECK(result.rows[0].pairing == Pairing::equal_iterations);
    CHECK(result.rows[1].pairing == Pairing::time_budget);
    CHECK(result.rows[1].mode == "paco_timed");
    CHECK(result.rows[1].iters_mean >= 1.0);
    CHECK(result.rows[1].speedup > 0.0);
}

TEST_CASE("experiment validation catches bad specs") {
    ExperimentSpec spec;
    spec.instance_paths = {"/definitely/not/here.tsp"};
    CHECK_THROWS_AS(spec.validate(), std::invalid_argument);
    spec.instance_paths.clear();
    CHECK_THROWS_AS(spec.validate(), std::invalid_argument);
    spec.trials = 0;
    CHECK_THROWS_AS(spec.validate(), std::invalid_argument);
}
