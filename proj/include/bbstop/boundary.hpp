// Optimal stopping boundary of the pinned put: kernel evaluation, the
// backward fixed-point solver, the zero-discount closed form, put/call
// parity, volatility rescaling, and the value function.
#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "bbstop/spline.hpp"
#include "bbstop/types.hpp"

namespace bbstop {

enum class OptionSide { put, call };

inline const char* to_string(OptionSide s) {
    return s == OptionSide::put ? "put" : "call";
}

// Shepp's constant for the zero-discount boundary, kept at the four
// printed decimals.
inline constexpr double kSheppConstant = 0.8399;

// Grid-sampled stopping boundary with cubic-spline interpolation between
// the nodes.
struct Boundary {
    TimeGrid grid;
    std::vector<double> values;
    OptionSide side = OptionSide::put;

    Boundary() = default;
    Boundary(TimeGrid g, std::vector<double> v, OptionSide s);

    double operator()(double t) const { return spline_(t); }
    const CubicSpline& spline() const { return spline_; }

private:
    CubicSpline spline_;
};

struct SolverConfig {
    double delta = 1e-3;        // relative fixed-point tolerance
    int max_iterations = 1000;  // per-node cap, guards divergence
    TimeGrid grid;

    void validate() const {
        if (!(delta > 0.0)) throw std::invalid_argument("SolverConfig: delta must be > 0");
        if (max_iterations < 1) throw std::invalid_argument("SolverConfig: max_iterations must be >= 1");
        grid.validate();
    }
};

struct SolverStats {
    std::vector<int> iterations;  // per interior node, index-aligned with the grid
};

class GridTooCoarseError : public std::runtime_error {
public:
    GridTooCoarseError(std::size_t node, const std::string& what)
        : std::runtime_error(what), node(node) {}
    std::size_t node;
};

class NonConvergenceError : public std::runtime_error {
public:
    NonConvergenceError(std::size_t node, double last_iterate, double residual,
                        const std::string& what)
        : std::runtime_error(what), node(node), last_iterate(last_iterate), residual(residual) {}
    std::size_t node;
    double last_iterate;
    double residual;
};

// Pricing-representation kernel. Requires t <= u < T; at u == t the
// continuous limit is used: (1/(T-t) + lambda) * (S - x1) * 1{x2 >= x1}.
double kernel(double t, double x1, double u, double x2, const BridgeSpec& spec);

// Logarithmically spaced partition of [0, T]: t_i = log(1 + (i/N)(e^T - 1)).
TimeGrid log_grid(std::size_t n, double horizon);

// Backward fixed-point solve of the free-boundary equation (put side).
Boundary solve_boundary(const BridgeSpec& spec, const SolverConfig& config,
                        SolverStats* stats = nullptr);

// Closed form S - B*sigma*sqrt(T - t), valid only for lambda == 0.
Boundary closed_form_boundary_lambda0(const BridgeSpec& spec, const TimeGrid& grid);

// Put/call reflection about the strike.
Boundary call_boundary_from_put(const Boundary& put, double strike);

// Maps a boundary solved with unit volatility, strike sigma^{-1/2}*S, and
// horizon sigma*T back to the volatility-sigma problem, sampled on
// target_grid.
Boundary rescale_boundary(const Boundary& unit_vol, double sigma, const TimeGrid& target_grid);

// Same map, with the target grid taken node-by-node from the source grid
// (t = u / sigma).
Boundary rescale_boundary(const Boundary& unit_vol, double sigma);

// Value of the option at (t, x) by quadrature of the kernel against the
// interpolated boundary.
double value_function(double t, double x, const Boundary& boundary, const BridgeSpec& spec);

}  // namespace bbstop
