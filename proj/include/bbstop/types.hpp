// Core domain types shared across the library.
#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace bbstop {

// Relative tolerance used whenever a time has to be matched against a grid
// node.
inline constexpr double kTimeMatchRelTol = 1e-12;

// Pinned-process parameters: the process is conditioned to end at the
// strike at the horizon.
struct BridgeSpec {
    double strike = 0.0;   // S, currency units
    double horizon = 0.0;  // T, years
    double sigma = 0.0;    // volatility, price / sqrt(time)
    double lambda = 0.0;   // discount rate per unit time

    void validate() const {
        if (!(horizon > 0.0)) throw std::invalid_argument("BridgeSpec: horizon must be > 0");
        if (!(sigma > 0.0)) throw std::invalid_argument("BridgeSpec: sigma must be > 0");
        if (!(lambda >= 0.0)) throw std::invalid_argument("BridgeSpec: lambda must be >= 0");
        if (!std::isfinite(strike)) throw std::invalid_argument("BridgeSpec: strike must be finite");
    }

    // sample_path accepts sigma == 0 as a degenerate zero-noise mode; the
    // rest of the library requires sigma > 0.
    void validate_allow_zero_sigma() const {
        if (!(horizon > 0.0)) throw std::invalid_argument("BridgeSpec: horizon must be > 0");
        if (!(sigma >= 0.0)) throw std::invalid_argument("BridgeSpec: sigma must be >= 0");
        if (!(lambda >= 0.0)) throw std::invalid_argument("BridgeSpec: lambda must be >= 0");
        if (!std::isfinite(strike)) throw std::invalid_argument("BridgeSpec: strike must be finite");
    }
};

// Strictly increasing partition t_0 = 0 < ... < t_N = T.
struct TimeGrid {
    std::vector<double> nodes;

    TimeGrid() = default;
    explicit TimeGrid(std::vector<double> ns) : nodes(std::move(ns)) {}

    std::size_t size() const { return nodes.size(); }
    double front() const { return nodes.front(); }
    double back() const { return nodes.back(); }
    double operator[](std::size_t i) const { return nodes[i]; }

    void validate() const {
        if (nodes.size() < 3) throw std::invalid_argument("TimeGrid: needs at least 3 nodes (N >= 2)");
        for (std::size_t i = 1; i < nodes.size(); ++i) {
            if (!(nodes[i] > nodes[i - 1]))
                throw std::invalid_argument("TimeGrid: nodes must be strictly increasing");
        }
    }

    // Index of the node matching t within the relative tolerance, or npos.
    static constexpr std::size_t npos = static_cast<std::size_t>(-1);
    std::size_t find_node(double t) const {
        const double tol = kTimeMatchRelTol * std::max(std::fabs(back()), 1.0);
        for (std::size_t i = 0; i < nodes.size(); ++i) {
            if (std::fabs(nodes[i] - t) <= tol) return i;
        }
        return npos;
    }
};

inline TimeGrid uniform_grid(std::size_t n, double horizon, double start = 0.0) {
    if (n < 1) throw std::invalid_argument("uniform_grid: n must be >= 1");
    std::vector<double> nodes(n + 1);
    for (std::size_t i = 0; i <= n; ++i) {
        nodes[i] = start + (horizon - start) * static_cast<double>(i) / static_cast<double>(n);
    }
    nodes.back() = horizon;
    return TimeGrid(std::move(nodes));
}

// Time-stamped price sequence.
struct PricePath {
    std::vector<double> times;
    std::vector<double> values;

    std::size_t size() const { return times.size(); }
    bool empty() const { return times.empty(); }

    void validate() const {
        if (times.size() != values.size())
            throw std::invalid_argument("PricePath: times/values length mismatch");
        if (times.empty()) throw std::invalid_argument("PricePath: empty path");
        for (std::size_t i = 0; i < times.size(); ++i) {
            if (!std::isfinite(values[i])) throw std::invalid_argument("PricePath: non-finite value");
            if (i > 0 && !(times[i] > times[i - 1]))
                throw std::invalid_argument("PricePath: times must be strictly increasing");
        }
    }
};

}  // namespace bbstop
