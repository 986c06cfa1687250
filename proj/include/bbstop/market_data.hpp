// Real-data ingestion: strike normalization, pinning diagnostics, history
// splitting, and profit aggregation across options and history fractions.
#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "bbstop/types.hpp"

namespace bbstop {

struct OptionRecord {
    std::string id;
    double strike = 0.0;
    PricePath path;            // raw prices on raw time stamps
    std::vector<double> oi;    // daily open interest, day 0 .. K

    void validate() const {
        if (!(strike > 0.0)) throw std::invalid_argument("OptionRecord: strike must be > 0");
        path.validate();
    }
};

// Divides prices by the strike and rescales time linearly so the maturity
// lands at 1 (the first observation lands at 0).
PricePath normalize(const OptionRecord& record);

// |final value - 1| of a strike-normalized path.
double pinning_deviance(const PricePath& normalized);

// Exponentially weighted open interest; weights sum to one and increase
// toward maturity.
double weighted_oi(const std::vector<double>& oi);

struct SplitPath {
    PricePath history;  // indices 0 .. floor(rho N)
    PricePath future;   // indices floor(rho N) .. N (split index in both)
    std::size_t split_index = 0;
    bool history_degenerate = false;  // too short for volatility estimation
};

SplitPath split_path(const PricePath& path, double rho);

struct ProfitSample {
    std::string option_id;
    double pinning_dev = 0.0;
    double rho = 0.0;
    std::string strategy;
    double profit = 0.0;
};

struct ProfitAggregate {
    double threshold = 0.0;
    std::map<std::string, double> mean_profit;  // per strategy
    std::size_t cohort_size = 0;                // |J(p)|
    bool empty_cohort = false;
};

// (1 / (|P| |J(p)|)) * sum over options with deviance below the threshold
// and over all history fractions present in the samples.
ProfitAggregate aggregate_profit(const std::vector<ProfitSample>& samples, double threshold);

// (A(p) - B(p)) / B(p); requires both strategies present and a non-empty
// cohort.
double relative_profit(const ProfitAggregate& agg, const std::string& strategy_a,
                       const std::string& strategy_b);

}  // namespace bbstop
