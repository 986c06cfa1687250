// Brownian-bridge process model: conditional moments, marginal quantiles,
// and exact sequential path sampling.
#pragma once

#include <cstdint>

#include "bbstop/rng.hpp"
#include "bbstop/types.hpp"

namespace bbstop {

// Conditional mean of the bridge at time u, restarted at (t, x).
double bridge_mean(double t, double x, double u, const BridgeSpec& spec);

// Conditional standard deviation at time u, restarted at t. Zero exactly
// at u == t and u == T.
double bridge_stddev(double t, double u, const BridgeSpec& spec);

// Exact (distribution-preserving) sequential sampling on the given grid.
// The grid must start at t0 and end at the horizon. The terminal value is
// the strike, exactly. sigma == 0 is accepted as a degenerate zero-noise
// mode and yields the straight line from (t0, x0) to (T, S).
PricePath sample_path(double t0, double x0, const TimeGrid& grid,
                      const BridgeSpec& spec, NormalRng& rng);
PricePath sample_path(double t0, double x0, const TimeGrid& grid,
                      const BridgeSpec& spec, std::uint64_t seed);

// Two independent bridge segments glued at a grid node: (t0, x0) ->
// (t_mid, x_mid) and (t_mid, x_mid) -> (T, S). The value at t_mid equals
// x_mid exactly.
PricePath sample_path_through(double t0, double x0, double t_mid, double x_mid,
                              const TimeGrid& grid, const BridgeSpec& spec,
                              NormalRng& rng);
PricePath sample_path_through(double t0, double x0, double t_mid, double x_mid,
                              const TimeGrid& grid, const BridgeSpec& spec,
                              std::uint64_t seed);

// q-quantile of the marginal distribution at time t of the bridge
// restarted at (t0, x0).
double marginal_quantile(double t, double q, double t0, double x0,
                         const BridgeSpec& spec);

}  // namespace bbstop
