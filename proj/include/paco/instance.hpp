#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <istream>
#include <limits>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace paco {

// Above this size the full distance matrix is not materialised and
// distances are computed on demand from coordinates.
inline constexpr std::uint32_t kDistMatrixMaxCities = 5000;

struct ParseError : std::runtime_error {
    int line;
    ParseError(int line_no, const std::string& what)
        : std::runtime_error("line " + std::to_string(line_no) + ": " + what),
          line(line_no) {}
};

// TSPLIB EUC_2D: Euclidean distance rounded to nearest integer, .5 rounds up.
inline std::int32_t euc2d(double x1, double y1, double x2, double y2) {
    const double dx = x1 - x2;
    const double dy = y1 - y2;
    return static_cast<std::int32_t>(std::sqrt(dx * dx + dy * dy) + 0.5);
}

// Immutable city set with coordinates and an integer distance oracle.
// Safe to share across any number of concurrent readers.
class Instance {
public:
    Instance(std::string name, std::vector<std::pair<double, double>> coords,
             std::optional<std::int64_t> optimum = std::nullopt)
        : name_(std::move(name)), optimum_(optimum) {
        if (coords.size() < 3)
            throw std::invalid_argument("instance needs at least 3 cities, got " +
                                        std::to_string(coords.size()));
        if (optimum_ && *optimum_ <= 0)
            throw std::invalid_argument("known optimum must be positive");
        n_ = static_cast<std::uint32_t>(coords.size());
        xs_.reserve(n_);
        ys_.reserve(n_);
        for (const auto& [x, y] : coords) {
            if (!std::isfinite(x) || !std::isfinite(y))
                throw std::invalid_argument("non-finite coordinate");
            xs_.push_back(x);
            ys_.push_back(y);
        }
        if (n_ <= kDistMatrixMaxCities) {
            dmat_.resize(static_cast<std::size_t>(n_) * n_);
            for (std::uint32_t i = 0; i < n_; ++i) {
                dmat_[static_cast<std::size_t>(i) * n_ + i] = 0;
                for (std::uint32_t j = i + 1; j < n_; ++j) {
                    const std::int32_t d = euc2d(xs_[i], ys_[i], xs_[j], ys_[j]);
                    dmat_[static_cast<std::size_t>(i) * n_ + j] = d;
                    dmat_[static_cast<std::size_t>(j) * n_ + i] = d;
                }
            }
        }
    }

    const std::string& name() const { return name_; }
    std::uint32_t n() const { return n_; }
    double x(std::uint32_t i) const { return xs_[i]; }
    double y(std::uint32_t i) const { return ys_[i]; }
    std::optional<std::int64_t> optimum() const { return optimum_; }
    void set_optimum(std::int64_t value) {
        if (value <= 0) throw std::invalid_argument("known optimum must be positive");
        optimum_ = value;
    }
    bool has_matrix() const { return !dmat_.empty(); }

    std::int32_t dist(std::uint32_t i, std::uint32_t j) const {
        if (!dmat_.empty())
            return dmat_[static_cast<std::size_t>(i) * n_ + j];
        return euc2d(xs_[i], ys_[i], xs_[j], ys_[j]);
    }

    // Row pointer into the distance matrix, nullptr when not materialised.
    const std::int32_t* dist_row(std::uint32_t i) const {
        return dmat_.empty() ? nullptr : dmat_.data() + static_cast<std::size_t>(i) * n_;
    }

private:
    std::string name_;
    std::uint32_t n_ = 0;
    std::vector<double> xs_, ys_;
    std::optional<std::int64_t> optimum_;
    std::vector<std::int32_t> dmat_;
};

// Cyclic permutation of city indices plus its cached length.
struct Tour {
    std::vector<std::uint32_t> order;
    std::int64_t length = 0;
};

inline bool is_permutation_of_n(std::uint32_t n, std::span<const std::uint32_t> order) {
    if (order.size() != n) return false;
    std::vector<bool> seen(n, false);
    for (const std::uint32_t c : order) {
        if (c >= n || seen[c]) return false;
        seen[c] = true;
    }
    return true;
}

// Cycle length without permutation validation; callers own the precondition.
inline std::int64_t cycle_length(const Instance& inst, std::span<const std::uint32_t> order) {
    std::int64_t total = 0;
    const std::size_t n = order.size();
    for (std::size_t i = 0; i + 1 < n; ++i)
        total += inst.dist(order[i], order[i + 1]);
    total += inst.dist(order[n - 1], order[0]);
    return total;
}

// Total cycle length including the closing edge. Rejects non-permutations.
inline std::int64_t tour_length(const Instance& inst, std::span<const std::uint32_t> order) {
    if (!is_permutation_of_n(inst.n(), order))
        throw std::invalid_argument("order is not a permutation of 0.." +
                                    std::to_string(inst.n() - 1));
    return cycle_length(inst, order);
}

inline Tour make_tour(const Instance& inst, std::vector<std::uint32_t> order) {
    const std::int64_t len = tour_length(inst, order);
    return Tour{std::move(order), len};
}

namespace detail {

inline std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

// Splits "KEY : value" / "KEY: value" headers; returns false for non-headers.
inline bool split_header(const std::string& line, std::string& key, std::string& value) {
    const auto colon = line.find(':');
    if (colon == std::string::npos) return false;
    key = trim(line.substr(0, colon));
    value = trim(line.substr(colon + 1));
    return !key.empty();
}

} // namespace detail

// Parses a TSPLIB-format instance (EUC_2D only). 1-based ids in the file are
// mapped to 0-based indices in file order.
inline Instance parse_tsplib(std::istream& in) {
    std::string name = "unnamed";
    std::optional<std::uint32_t> dimension;
    std::optional<std::string> edge_weight_type;
    bool in_coords = false;
    std::vector<std::pair<double, double>> coords;

    std::string raw;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        const std::string line = detail::trim(raw);
        if (line.empty()) continue;
        if (line == "EOF") break;

        if (!in_coords) {
            if (line == "NODE_COORD_SECTION") {
                if (!dimension)
                    throw ParseError(line_no, "NODE_COORD_SECTION before DIMENSION");
                if (!edge_weight_type)
                    throw ParseError(line_no, "missing EDGE_WEIGHT_TYPE header");
                in_coords = true;
                coords.reserve(*dimension);
                continue;
            }
            std::string key, value;
            if (!detail::split_header(line, key, value))
                throw ParseError(line_no, "malformed header line: '" + line + "'");
            if (key == "NAME") {
                name = value;
            } else if (key == "DIMENSION") {
                try {
                    const long long d = std::stoll(value);
                    if (d < 3)
                        throw ParseError(line_no, "DIMENSION must be at least 3");
                    dimension = static_cast<std::uint32_t>(d);
                } catch (const ParseError&) {
                    throw;
                } catch (const std::exception&) {
                    throw ParseError(line_no, "non-numeric DIMENSION: '" + value + "'");
                }
            } else if (key == "EDGE_WEIGHT_TYPE") {
                if (value != "EUC_2D")
                    throw ParseError(line_no, "unsupported EDGE_WEIGHT_TYPE: '" + value +
                                                  "' (only EUC_2D)");
                edge_weight_type = value;
            }
            // TYPE, COMMENT and other headers are accepted and ignored.
            continue;
        }

        if (coords.size() == *dimension)
            throw ParseError(line_no, "more coordinate lines than DIMENSION " +
                                          std::to_string(*dimension));
        std::istringstream fields(line);
        std::string id;
        double x = 0.0, y = 0.0;
        if (!(fields >> id >> x >> y))
            throw ParseError(line_no, "expected 'id x y', got '" + line + "'");
        std::string rest;
        if (fields >> rest)
            throw ParseError(line_no, "trailing content after coordinates: '" + rest + "'");
        if (!std::isfinite(x) || !std::isfinite(y))
            throw ParseError(line_no, "non-finite coordinate");
        coords.emplace_back(x, y);
    }

    if (!in_coords)
        throw ParseError(line_no, "missing NODE_COORD_SECTION");
    if (coords.size() != *dimension)
        throw ParseError(line_no, "DIMENSION is " + std::to_string(*dimension) + " but " +
                                      std::to_string(coords.size()) +
                                      " coordinate lines were read");
    return Instance(name, std::move(coords));
}

inline Instance parse_tsplib_file(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot open instance file: " + path);
    try {
        return parse_tsplib(in);
    } catch (const ParseError& e) {
        throw std::runtime_error(path + ": " + e.what());
    }
}

inline void emit_tsplib(const Instance& inst, std::ostream& out) {
    out << "NAME : " << inst.name() << "\n";
    out << "TYPE : TSP\n";
    out << "DIMENSION : " << inst.n() << "\n";
    out << "EDGE_WEIGHT_TYPE : EUC_2D\n";
    out << "NODE_COORD_SECTION\n";
    out.precision(17);
    for (std::uint32_t i = 0; i < inst.n(); ++i)
        out << (i + 1) << " " << inst.x(i) << " " << inst.y(i) << "\n";
    out << "EOF\n";
}

// Optima config: lines of "instance-name optimum-length", '#' comments.
inline std::map<std::string, std::int64_t> load_optima(std::istream& in) {
    std::map<std::string, std::int64_t> out;
    std::string raw;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        const std::string line = detail::trim(raw);
        if (line.empty() || line[0] == '#') continue;
        std::istringstream fields(line);
        std::string name;
        long long value = 0;
        if (!(fields >> name >> value) || value <= 0)
            throw ParseError(line_no, "expected 'instance-name optimum-length', got '" +
                                          line + "'");
        out[name] = value;
    }
    return out;
}

// Exhaustive optimum for tiny instances, city 0 fixed. Oracle for tests.
inline Tour brute_force_optimum(const Instance& inst) {
    const std::uint32_t n = inst.n();
    if (n > 10)
        throw std::invalid_argument("brute force limited to n <= 10, got " +
                                    std::to_string(n));
    std::vector<std::uint32_t> perm(n);
    for (std::uint32_t i = 0; i < n; ++i) perm[i] = i;
    std::vector<std::uint32_t> best = perm;
    std::int64_t best_len = cycle_length(inst, perm);
    while (std::next_permutation(perm.begin() + 1, perm.end())) {
        const std::int64_t len = cycle_length(inst, perm);
        if (len < best_len) {
            best_len = len;
            best = perm;
        }
    }
    return Tour{std::move(best), best_len};
}

} // namespace paco
