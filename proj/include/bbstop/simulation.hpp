// Stopping rules applied to discrete paths and the Monte Carlo payoff
// study comparing the true boundary, the estimated boundary, and the
// confidence-curve strategies.
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "bbstop/boundary.hpp"
#include "bbstop/inference.hpp"
#include "bbstop/types.hpp"

namespace bbstop {

struct StoppingRule {
    Boundary boundary;

    OptionSide side() const { return boundary.side; }
};

enum class BandCurve { lower, center, upper };

StoppingRule rule_from_band(const ConfidenceBand& band, BandCurve which);

// Smallest index j >= from_index with X_{t_j} at or beyond the rule's
// interpolated level (<= for put, >= for call); the final index if the
// rule is never hit.
std::size_t first_hit(const PricePath& path, const StoppingRule& rule, std::size_t from_index);

// e^{-lambda (t_tau - t_from)} G(X_tau) with tau from first_hit.
double discounted_payoff(const PricePath& path, const StoppingRule& rule, double strike,
                         double lambda, std::size_t from_index);

struct ExperimentConfig {
    BridgeSpec spec;
    double x0 = 0.0;                  // starting value of the simulated paths
    std::size_t base_nodes = 200;     // N: evaluation nodes t_i = i T / N
    std::size_t frequency = 1;        // r: sampling multiplier (paths live on j T / (rN))
    std::size_t replications = 0;     // M
    std::vector<double> quantiles;    // q levels in (0, 1)
    std::vector<std::size_t> eval_indices;  // i in 1..N-1
    double estimation_fraction = 1.0;  // portion of the history used for sigma_hat
    double alpha = 0.05;               // band level; 1.0 collapses the band onto the center
    double fd_step = 1e-2;
    double delta = 1e-3;
    std::uint64_t seed = 0;
    int workers = 1;
    // Test hooks: skip estimation with a fixed sigma_hat, and/or take the
    // "true" rule from the solver instead of the closed form.
    std::optional<double> injected_sigma;
    bool use_solved_true = false;

    void validate() const;
};

struct PayoffCell {
    double t = 0.0;
    double q = 0.0;
    std::string rule;
    double mean = 0.0;
    double variance = 0.0;
    double se = 0.0;
    std::size_t count = 0;
    std::size_t failures = 0;
};

// Paired per-path differences against the true-boundary rule.
struct PairedCell {
    double t = 0.0;
    double q = 0.0;
    std::string rule;
    double mean_diff = 0.0;
    double se_diff = 0.0;
    std::size_t count = 0;
};

struct PayoffStudy {
    std::vector<PayoffCell> cells;
    std::vector<PairedCell> paired;
};

extern const char* const kRuleNames[4];  // "true", "center", "upper", "lower"

PayoffStudy run_payoff_study(const ExperimentConfig& config);

}  // namespace bbstop
