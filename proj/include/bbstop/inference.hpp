// Volatility inference: maximum-likelihood estimation from a partially
// observed path, pointwise confidence curves for the stopping boundary,
// and the coverage experiment validating them.
#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "bbstop/boundary.hpp"
#include "bbstop/types.hpp"

namespace bbstop {

struct VolEstimate {
    double sigma_hat = 0.0;
    std::size_t n = 0;      // number of increments
    double fisher = 0.0;    // information per observation, 2 / sigma_hat^2

    bool degenerate() const { return sigma_hat == 0.0; }
};

// MLE of the volatility from the observed path; the spec's sigma field is
// ignored. All observation times must be strictly below the horizon.
VolEstimate mle_sigma(const PricePath& path, const BridgeSpec& spec);

double fisher_information(double sigma);

struct ConfidenceBand {
    TimeGrid grid;
    std::vector<double> lower;   // c2
    std::vector<double> center;  // solved boundary at sigma_hat
    std::vector<double> upper;   // c1
    double alpha = 0.0;
    double fd_step = 0.0;
};

using BoundarySolverFn = std::function<Boundary(double sigma)>;

// Delta-method pointwise band around the boundary solved at sigma_hat,
// with a one-sided forward difference of step epsilon for the sensitivity.
ConfidenceBand confidence_curves(const VolEstimate& est, const BridgeSpec& spec_template,
                                 const SolverConfig& config, double alpha,
                                 double epsilon = 1e-2);

// Same construction with an arbitrary boundary map; used to validate the
// finite-difference slope against closed forms.
ConfidenceBand confidence_curves_with(const VolEstimate& est, const BoundarySolverFn& solve,
                                      double alpha, double epsilon);

struct CoverageResult {
    TimeGrid grid;                      // solver grid the bands live on
    std::vector<double> proportion;     // per-node non-inclusion proportion
    std::size_t replications = 0;       // successful replications
    std::size_t failures = 0;           // degenerate / failed replications
    double band_lower = 0.0;            // alpha - z_{0.975} sqrt(alpha(1-alpha)/M)
    double band_upper = 0.0;
};

// Simulates M bridge paths on an equally spaced N-grid, estimates sigma
// from the first n increments of each, builds bands, and records per node
// whether the true-sigma boundary falls outside them.
CoverageResult coverage_experiment(double true_sigma, std::size_t n, std::size_t n_grid,
                                   std::size_t replications, double alpha,
                                   const BridgeSpec& spec, double x0, std::uint64_t seed,
                                   int workers = 1);

}  // namespace bbstop
