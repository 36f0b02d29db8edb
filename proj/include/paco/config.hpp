#pragma once

#include <cctype>
#include <filesystem>
#include <istream>
#include <map>
#include <string>
#include <variant>
#include <vector>

#include "paco/bench.hpp"

namespace paco {

// Flat TOML-style experiment config: `key = value` lines where a value is a
// quoted string, number, boolean, or [list]. '#' starts a comment.
namespace config_detail {

struct Value {
    std::vector<std::string> items; // scalars hold exactly one item
    bool is_list = false;
    int line = 0;

    const std::string& scalar() const {
        if (items.size() != 1)
            throw ParseError(line, "expected a single value, got a list");
        return items[0];
    }
    double number() const {
        try {
            return std::stod(scalar());
        } catch (const std::exception&) {
            throw ParseError(line, "expected a number, got '" + scalar() + "'");
        }
    }
    std::uint64_t integer() const {
        try {
            return std::stoull(scalar());
        } catch (const std::exception&) {
            throw ParseError(line, "expected an integer, got '" + scalar() + "'");
        }
    }
    bool boolean() const {
        const std::string& s = scalar();
        if (s == "true") return true;
        if (s == "false") return false;
        throw ParseError(line, "expected true/false, got '" + s + "'");
    }
    std::vector<double> numbers() const {
        std::vector<double> out;
        for (const auto& s : items) {
            try {
                out.push_back(std::stod(s));
            } catch (const std::exception&) {
                throw ParseError(line, "expected a number, got '" + s + "'");
            }
        }
        return out;
    }
};

inline std::string strip_comment(const std::string& line) {
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        if (line[i] == '"') quoted = !quoted;
        if (line[i] == '#' && !quoted) return line.substr(0, i);
    }
    return line;
}

inline std::vector<std::string> split_list(const std::string& body, int line_no) {
    std::vector<std::string> out;
    std::string cur;
    bool quoted = false;
    for (const char c : body) {
        if (c == '"') {
            quoted = !quoted;
            continue;
        }
        if (c == ',' && !quoted) {
            const std::string t = detail::trim(cur);
            if (!t.empty()) out.push_back(t);
            cur.clear();
            continue;
        }
        cur += c;
    }
    if (quoted) throw ParseError(line_no, "unterminated string");
    const std::string t = detail::trim(cur);
    if (!t.empty()) out.push_back(t);
    return out;
}

inline std::map<std::string, Value> parse_keyvals(std::istream& in) {
    std::map<std::string, Value> out;
    std::string raw;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        const std::string line = detail::trim(strip_comment(raw));
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ParseError(line_no, "expected 'key = value', got '" + line + "'");
        const std::string key = detail::trim(line.substr(0, eq));
        std::string body = detail::trim(line.substr(eq + 1));
        if (key.empty() || body.empty())
            throw ParseError(line_no, "expected 'key = value', got '" + line + "'");
        Value v;
        v.line = line_no;
        if (body.front() == '[') {
            if (body.back() != ']') throw ParseError(line_no, "unterminated list");
            v.is_list = true;
            v.items = split_list(body.substr(1, body.size() - 2), line_no);
        } else {
            v.items = split_list(body, line_no);
            if (v.items.size() != 1)
                throw ParseError(line_no, "unexpected comma outside a list");
        }
        out[key] = std::move(v);
    }
    return out;
}

} // namespace config_detail

inline ExperimentSpec parse_experiment_config(std::istream& in) {
    auto kv = config_detail::parse_keyvals(in);
    ExperimentSpec spec;
    spec.max_mod_grid.clear();

    auto take = [&](const char* key) -> const config_detail::Value* {
        const auto it = kv.find(key);
        return it == kv.end() ? nullptr : &it->second;
    };

    if (const auto* v = take("label")) spec.label = v->scalar();
    if (const auto* v = take("instances")) spec.instance_paths = v->items;
    if (const auto* v = take("optima")) spec.optima_path = v->scalar();
    if (const auto* v = take("mode")) {
        const auto m = mode_from_name(v->scalar());
        if (!m) throw ParseError(v->line, "unknown mode '" + v->scalar() + "'");
        spec.mode = *m;
    }
    if (const auto* v = take("trials"))
        spec.trials = static_cast<std::uint32_t>(v->integer());
    if (const auto* v = take("ants"))
        spec.base.ants = static_cast<std::uint32_t>(v->integer());
    if (const auto* v = take("iterations")) spec.base.iterations = v->integer();
    if (const auto* v = take("alpha")) spec.base.alpha = v->number();
    if (const auto* v = take("beta")) spec.base.beta = v->number();
    if (const auto* v = take("workers"))
        spec.base.workers = static_cast<std::uint32_t>(v->integer());
    if (const auto* v = take("seed")) spec.base.seed = v->integer();
    if (const auto* v = take("rho")) spec.base.rho = v->number();
    if (const auto* v = take("tau_max")) spec.base.tau_max = v->number();
    if (const auto* v = take("tau0")) spec.base.tau0 = v->number();
    if (const auto* v = take("two_opt_window"))
        spec.base.two_opt_window = static_cast<std::uint32_t>(v->integer());
    if (const auto* v = take("convergence_interval"))
        spec.base.convergence_interval_s = v->number();
    if (const auto* v = take("synchronous")) spec.base.synchronous = v->boolean();
    if (const auto* v = take("validate_tours")) spec.base.validate_tours = v->boolean();
    if (const auto* v = take("baseline")) spec.include_baseline = v->boolean();
    if (const auto* v = take("timed_baseline")) spec.timed_baseline = v->boolean();
    if (const auto* v = take("out_dir")) spec.out_dir = v->scalar();

    if (const auto* v = take("max_mod")) spec.max_mod_grid = v->numbers();
    if (spec.max_mod_grid.empty()) spec.max_mod_grid.push_back(1.0);
    if (const auto* v = take("partial_prob")) spec.partial_prob_grid = v->numbers();
    if (const auto* v = take("two_opt_prob")) spec.two_opt_prob_grid = v->numbers();

    static const char* known[] = {
        "label",      "instances",      "optima",        "mode",
        "trials",     "ants",           "iterations",    "alpha",
        "beta",       "workers",        "seed",          "rho",
        "tau_max",    "tau0",           "two_opt_window", "convergence_interval",
        "synchronous", "validate_tours", "baseline",      "timed_baseline",
        "out_dir",    "max_mod",        "partial_prob",  "two_opt_prob"};
    for (const auto& [key, value] : kv) {
        bool ok = false;
        for (const char* k : known) ok = ok || key == k;
        if (!ok) throw ParseError(value.line, "unknown key '" + key + "'");
    }
    return spec;
}

// Built-in benchmark presets. Tables 1-6 sweep five mid-size TSPLIB instances
// with 16 ants, 100k iterations and alpha = beta = 5; tables 7-8 target the
// four large art instances with a 1% modification cap and windowed 2-opt.
inline ExperimentSpec table_preset(const std::string& name,
                                   const std::string& instance_dir,
                                   const std::string& optima_path) {
    const std::vector<std::string> midsize = {"pcb442", "d657", "rat783", "pr1002",
                                              "pr2392"};
    const std::vector<std::string> art = {"mona-lisa100K", "vangogh120K", "venus140K",
                                          "earring200K"};

    ExperimentSpec spec;
    spec.label = name;
    spec.optima_path = optima_path;
    spec.base.ants = 16;
    spec.base.iterations = 100000;
    spec.base.alpha = 5.0;
    spec.base.beta = 5.0;
    spec.base.workers = 8;
    spec.base.seed = 1000;
    spec.trials = 10;
    spec.base.convergence_interval_s = 1.0;

    auto use = [&](const std::vector<std::string>& names) {
        for (const auto& n : names)
            spec.instance_paths.push_back(
                (std::filesystem::path(instance_dir) / (n + ".tsp")).string());
    };
    const std::vector<double> caps = {0.5, 0.4, 0.3, 0.2, 0.1};

    if (name == "table1") {
        use(midsize);
        spec.mode = Mode::paco_full;
        spec.include_baseline = false;
    } else if (name == "table2") {
        use(midsize);
        spec.partial_prob_grid = {1.0};
    } else if (name == "table3") {
        use(midsize);
        spec.max_mod_grid = caps;
        spec.partial_prob_grid = {1.0};
    } else if (name == "table4") {
        use(midsize);
        spec.max_mod_grid = caps;
        spec.partial_prob_grid = {0.95};
    } else if (name == "table5") {
        use(midsize);
        spec.partial_prob_grid = {1.0};
        spec.two_opt_prob_grid = {0.001};
    } else if (name == "table6") {
        use(midsize);
        spec.max_mod_grid = caps;
        spec.partial_prob_grid = {1.0};
        spec.two_opt_prob_grid = {0.001};
    } else if (name == "table7" || name == "table8") {
        use(art);
        spec.max_mod_grid = {0.01};
        spec.partial_prob_grid = {1.0};
        spec.two_opt_prob_grid = {0.001};
        spec.base.two_opt_window = 500;
        spec.include_baseline = false;
        spec.timed_baseline = name == "table8";
    } else {
        throw std::invalid_argument("unknown preset '" + name +
                                    "' (expected table1..table8)");
    }
    return spec;
}

} // namespace paco
