#include "bbstop/bridge.hpp"

#include <cmath>
#include <stdexcept>

namespace bbstop {

namespace {

void check_window(double t, double u, const BridgeSpec& spec) {
    const double T = spec.horizon;
    if (!(t < T)) throw std::invalid_argument("bridge: t must be < horizon");
    if (!(u >= t && u <= T)) throw std::invalid_argument("bridge: u must lie in [t, T]");
}

}  // namespace

double bridge_mean(double t, double x, double u, const BridgeSpec& spec) {
    spec.validate_allow_zero_sigma();
    check_window(t, u, spec);
    const double T = spec.horizon;
    return x * (T - u) / (T - t) + spec.strike * (u - t) / (T - t);
}

double bridge_stddev(double t, double u, const BridgeSpec& spec) {
    spec.validate_allow_zero_sigma();
    check_window(t, u, spec);
    const double T = spec.horizon;
    return spec.sigma * std::sqrt((u - t) * (T - u) / (T - t));
}

PricePath sample_path(double t0, double x0, const TimeGrid& grid,
                      const BridgeSpec& spec, NormalRng& rng) {
    spec.validate_allow_zero_sigma();
    if (grid.size() < 2) throw std::invalid_argument("sample_path: grid needs at least 2 nodes");
    const double tol = kTimeMatchRelTol * std::max(std::fabs(spec.horizon), 1.0);
    if (std::fabs(grid.front() - t0) > tol)
        throw std::invalid_argument("sample_path: grid must start at t0");
    if (std::fabs(grid.back() - spec.horizon) > tol)
        throw std::invalid_argument("sample_path: grid must end at the horizon");

    PricePath path;
    path.times = grid.nodes;
    path.values.resize(grid.size());
    path.values[0] = x0;
    for (std::size_t i = 1; i < grid.size(); ++i) {
        const double tp = grid[i - 1];
        const double tc = grid[i];
        const double mean = bridge_mean(tp, path.values[i - 1], tc, spec);
        const double sd = bridge_stddev(tp, tc, spec);
        path.values[i] = mean + sd * rng.gauss();
    }
    // The last restarted mean is exactly the strike and the stddev is zero,
    // but pin explicitly to keep the terminal value bit-exact.
    path.values.back() = spec.strike;
    return path;
}

PricePath sample_path(double t0, double x0, const TimeGrid& grid,
                      const BridgeSpec& spec, std::uint64_t seed) {
    NormalRng rng(seed);
    return sample_path(t0, x0, grid, spec, rng);
}

PricePath sample_path_through(double t0, double x0, double t_mid, double x_mid,
                              const TimeGrid& grid, const BridgeSpec& spec,
                              NormalRng& rng) {
    spec.validate_allow_zero_sigma();
    if (!(t0 < t_mid && t_mid < spec.horizon))
        throw std::invalid_argument("sample_path_through: need t0 < t_mid < horizon");
    const std::size_t mid = grid.find_node(t_mid);
    if (mid == TimeGrid::npos)
        throw std::invalid_argument("sample_path_through: t_mid is not a grid node");

    TimeGrid first(std::vector<double>(grid.nodes.begin(), grid.nodes.begin() + mid + 1));
    TimeGrid second(std::vector<double>(grid.nodes.begin() + mid, grid.nodes.end()));

    BridgeSpec first_spec = spec;
    first_spec.strike = x_mid;
    first_spec.horizon = grid[mid];

    PricePath head = sample_path(t0, x0, first, first_spec, rng);
    PricePath tail = sample_path(grid[mid], x_mid, second, spec, rng);

    PricePath path;
    path.times = grid.nodes;
    path.values = head.values;
    path.values.insert(path.values.end(), tail.values.begin() + 1, tail.values.end());
    return path;
}

PricePath sample_path_through(double t0, double x0, double t_mid, double x_mid,
                              const TimeGrid& grid, const BridgeSpec& spec,
                              std::uint64_t seed) {
    NormalRng rng(seed);
    return sample_path_through(t0, x0, t_mid, x_mid, grid, spec, rng);
}

double marginal_quantile(double t, double q, double t0, double x0,
                         const BridgeSpec& spec) {
    spec.validate();
    if (!(q > 0.0 && q < 1.0)) throw std::invalid_argument("marginal_quantile: q must lie in (0, 1)");
    if (!(t0 < t && t < spec.horizon))
        throw std::invalid_argument("marginal_quantile: need t0 < t < horizon");
    return bridge_mean(t0, x0, t, spec) + bridge_stddev(t0, t, spec) * norm_quantile(q);
}

}  // namespace bbstop
