#include "bbstop/market_data.hpp"

#include <cmath>
#include <set>
#include <stdexcept>

namespace bbstop {

PricePath normalize(const OptionRecord& record) {
    record.validate();
    const PricePath& raw = record.path;
    PricePath out;
    out.times.resize(raw.size());
    out.values.resize(raw.size());
    const double t0 = raw.times.front();
    const double span = raw.times.back() - t0;
    for (std::size_t i = 0; i < raw.size(); ++i) {
        out.times[i] = raw.size() == 1 ? 0.0 : (raw.times[i] - t0) / span;
        out.values[i] = raw.values[i] / record.strike;
    }
    if (out.times.size() > 1) out.times.back() = 1.0;
    return out;
}

double pinning_deviance(const PricePath& normalized) {
    if (normalized.empty()) throw std::invalid_argument("pinning_deviance: empty path");
    return std::fabs(normalized.values.back() - 1.0);
}

double weighted_oi(const std::vector<double>& oi) {
    if (oi.empty()) throw std::invalid_argument("weighted_oi: empty series");
    const double k_max = static_cast<double>(oi.size() - 1);
    double wsum = 0.0;
    double total = 0.0;
    for (std::size_t k = 0; k < oi.size(); ++k) {
        if (oi[k] < 0.0) throw std::invalid_argument("weighted_oi: negative open interest");
        const double frac = oi.size() == 1 ? 1.0 : static_cast<double>(k) / k_max;
        const double w = std::exp(-(1.0 - frac));
        wsum += w;
        total += w * oi[k];
    }
    return total / wsum;
}

SplitPath split_path(const PricePath& path, double rho) {
    path.validate();
    if (!(rho > 0.0 && rho < 1.0)) throw std::invalid_argument("split_path: rho must lie in (0, 1)");
    const std::size_t last = path.size() - 1;
    const std::size_t k = static_cast<std::size_t>(std::floor(rho * static_cast<double>(last)));
    SplitPath out;
    out.split_index = k;
    out.history.times.assign(path.times.begin(), path.times.begin() + k + 1);
    out.history.values.assign(path.values.begin(), path.values.begin() + k + 1);
    out.future.times.assign(path.times.begin() + k, path.times.end());
    out.future.values.assign(path.values.begin() + k, path.values.end());
    out.history_degenerate = k < 1;
    return out;
}

ProfitAggregate aggregate_profit(const std::vector<ProfitSample>& samples, double threshold) {
    if (samples.empty()) throw std::invalid_argument("aggregate_profit: no samples");
    std::set<double> rho_levels;
    std::set<std::string> cohort;
    for (const ProfitSample& s : samples) {
        rho_levels.insert(s.rho);
        if (s.pinning_dev < threshold) cohort.insert(s.option_id);
    }

    ProfitAggregate agg;
    agg.threshold = threshold;
    agg.cohort_size = cohort.size();
    if (cohort.empty()) {
        agg.empty_cohort = true;
        return agg;
    }
    const double denom = static_cast<double>(rho_levels.size()) * static_cast<double>(cohort.size());
    for (const ProfitSample& s : samples) {
        if (!cohort.count(s.option_id)) continue;
        agg.mean_profit[s.strategy] += s.profit / denom;
    }
    return agg;
}

double relative_profit(const ProfitAggregate& agg, const std::string& strategy_a,
                       const std::string& strategy_b) {
    if (agg.empty_cohort) throw std::invalid_argument("relative_profit: empty cohort");
    const auto a = agg.mean_profit.find(strategy_a);
    const auto b = agg.mean_profit.find(strategy_b);
    if (a == agg.mean_profit.end() || b == agg.mean_profit.end())
        throw std::invalid_argument("relative_profit: strategy not present");
    if (b->second == 0.0) throw std::invalid_argument("relative_profit: zero baseline profit");
    return (a->second - b->second) / b->second;
}

}  // namespace bbstop
