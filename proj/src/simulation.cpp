#include "bbstop/simulation.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "bbstop/bridge.hpp"
#include "bbstop/normal.hpp"
#include "bbstop/parallel.hpp"
#include "bbstop/rng.hpp"

namespace bbstop {

const char* const kRuleNames[4] = {"true", "center", "upper", "lower"};

StoppingRule rule_from_band(const ConfidenceBand& band, BandCurve which) {
    const std::vector<double>* values = nullptr;
    switch (which) {
        case BandCurve::lower: values = &band.lower; break;
        case BandCurve::center: values = &band.center; break;
        case BandCurve::upper: values = &band.upper; break;
    }
    return StoppingRule{Boundary(band.grid, *values, OptionSide::put)};
}

std::size_t first_hit(const PricePath& path, const StoppingRule& rule, std::size_t from_index) {
    if (from_index >= path.size())
        throw std::invalid_argument("first_hit: from_index out of range");
    const std::size_t last = path.size() - 1;
    for (std::size_t j = from_index; j < last; ++j) {
        const double level = rule.boundary(path.times[j]);
        if (rule.side() == OptionSide::put ? path.values[j] <= level : path.values[j] >= level) {
            return j;
        }
    }
    return last;
}

double discounted_payoff(const PricePath& path, const StoppingRule& rule, double strike,
                         double lambda, std::size_t from_index) {
    const std::size_t tau = first_hit(path, rule, from_index);
    const double gain = rule.side() == OptionSide::put
                            ? std::max(strike - path.values[tau], 0.0)
                            : std::max(path.values[tau] - strike, 0.0);
    return std::exp(-lambda * (path.times[tau] - path.times[from_index])) * gain;
}

void ExperimentConfig::validate() const {
    spec.validate();
    if (base_nodes < 2) throw std::invalid_argument("ExperimentConfig: base_nodes must be >= 2");
    if (frequency < 1) throw std::invalid_argument("ExperimentConfig: frequency must be >= 1");
    if (replications < 1) throw std::invalid_argument("ExperimentConfig: replications must be >= 1");
    if (quantiles.empty()) throw std::invalid_argument("ExperimentConfig: quantiles must be non-empty");
    for (double q : quantiles) {
        if (!(q > 0.0 && q < 1.0))
            throw std::invalid_argument("ExperimentConfig: quantiles must lie in (0, 1)");
    }
    if (eval_indices.empty())
        throw std::invalid_argument("ExperimentConfig: eval_indices must be non-empty");
    for (std::size_t i : eval_indices) {
        if (i < 1 || i >= base_nodes)
            throw std::invalid_argument("ExperimentConfig: eval_indices must lie in [1, N)");
    }
    if (!(estimation_fraction > 0.0 && estimation_fraction <= 1.0))
        throw std::invalid_argument("ExperimentConfig: estimation_fraction must lie in (0, 1]");
    if (!(alpha > 0.0 && alpha <= 1.0))
        throw std::invalid_argument("ExperimentConfig: alpha must lie in (0, 1]");
    if (!(fd_step > 0.0)) throw std::invalid_argument("ExperimentConfig: fd_step must be > 0");
    if (!(delta > 0.0)) throw std::invalid_argument("ExperimentConfig: delta must be > 0");
}

namespace {

struct PathOutcome {
    double payoff[4] = {0.0, 0.0, 0.0, 0.0};
    bool failed = false;
};

struct Moments {
    double mean = std::numeric_limits<double>::quiet_NaN();
    double variance = std::numeric_limits<double>::quiet_NaN();
    double se = std::numeric_limits<double>::quiet_NaN();
    std::size_t count = 0;
};

Moments moments_of(const std::vector<double>& xs) {
    Moments m;
    m.count = xs.size();
    if (xs.empty()) return m;
    double sum = 0.0;
    for (double x : xs) sum += x;
    m.mean = sum / static_cast<double>(xs.size());
    if (xs.size() < 2) return m;
    double ss = 0.0;
    for (double x : xs) ss += (x - m.mean) * (x - m.mean);
    m.variance = ss / static_cast<double>(xs.size() - 1);
    m.se = std::sqrt(m.variance / static_cast<double>(xs.size()));
    return m;
}

}  // namespace

PayoffStudy run_payoff_study(const ExperimentConfig& config) {
    config.validate();
    const BridgeSpec& spec = config.spec;
    const double T = spec.horizon;
    const std::size_t n = config.base_nodes;
    const std::size_t r = config.frequency;

    SolverConfig solver;
    solver.delta = config.delta;
    solver.grid = log_grid(n, T);

    const Boundary true_boundary = [&] {
        if (config.use_solved_true) return solve_boundary(spec, solver);
        if (spec.lambda == 0.0) return closed_form_boundary_lambda0(spec, solver.grid);
        SolverConfig fine = solver;
        fine.grid = log_grid(1000, T);
        return solve_boundary(spec, fine);
    }();
    const StoppingRule true_rule{true_boundary};

    const TimeGrid path_grid = uniform_grid(n * r, T);
    const double z = config.alpha >= 1.0 ? 0.0 : norm_quantile(1.0 - 0.5 * config.alpha);

    PayoffStudy study;
    std::size_t cell_index = 0;
    for (std::size_t i : config.eval_indices) {
        const double t_i = path_grid[r * i];
        for (double q : config.quantiles) {
            const double x_q = marginal_quantile(t_i, q, 0.0, config.x0, spec);
            const std::size_t from = r * i;
            const std::size_t hist_last = static_cast<std::size_t>(
                std::floor(config.estimation_fraction * static_cast<double>(from)));
            const std::uint64_t cell_seed = derive_seed(config.seed, cell_index);

            std::vector<PathOutcome> outcomes(config.replications);
            parallel_for(config.replications, config.workers, [&](std::size_t m) {
                PathOutcome& out = outcomes[m];
                const PricePath path = sample_path_through(0.0, config.x0, t_i, x_q, path_grid,
                                                           spec, derive_seed(cell_seed, m));
                try {
                    VolEstimate est;
                    if (config.injected_sigma) {
                        est.sigma_hat = *config.injected_sigma;
                        est.n = hist_last;
                        est.fisher = fisher_information(est.sigma_hat);
                    } else {
                        if (hist_last < 1) throw std::runtime_error("history too short");
                        PricePath history;
                        history.times.assign(path.times.begin(), path.times.begin() + hist_last + 1);
                        history.values.assign(path.values.begin(),
                                              path.values.begin() + hist_last + 1);
                        est = mle_sigma(history, spec);
                        if (est.degenerate()) throw std::runtime_error("degenerate estimate");
                    }

                    BridgeSpec est_spec = spec;
                    est_spec.sigma = est.sigma_hat;
                    const Boundary center = solve_boundary(est_spec, solver);
                    BridgeSpec bump_spec = spec;
                    bump_spec.sigma = est.sigma_hat + config.fd_step;
                    const Boundary bumped = solve_boundary(bump_spec, solver);
                    const double scale =
                        z / std::sqrt(static_cast<double>(est.n) * est.fisher);

                    std::vector<double> upper(center.values.size());
                    std::vector<double> lower(center.values.size());
                    for (std::size_t k = 0; k < center.values.size(); ++k) {
                        const double half = scale *
                            std::fabs((bumped.values[k] - center.values[k]) / config.fd_step);
                        upper[k] = center.values[k] + half;
                        lower[k] = center.values[k] - half;
                    }

                    const StoppingRule center_rule{center};
                    const StoppingRule upper_rule{
                        Boundary(center.grid, std::move(upper), OptionSide::put)};
                    const StoppingRule lower_rule{
                        Boundary(center.grid, std::move(lower), OptionSide::put)};

                    out.payoff[0] = discounted_payoff(path, true_rule, spec.strike, spec.lambda, from);
                    out.payoff[1] =
                        discounted_payoff(path, center_rule, spec.strike, spec.lambda, from);
                    out.payoff[2] =
                        discounted_payoff(path, upper_rule, spec.strike, spec.lambda, from);
                    out.payoff[3] =
                        discounted_payoff(path, lower_rule, spec.strike, spec.lambda, from);
                } catch (const std::exception&) {
                    out.failed = true;
                }
            });

            std::size_t failures = 0;
            std::vector<double> per_rule[4];
            for (const PathOutcome& out : outcomes) {
                if (out.failed) {
                    ++failures;
                    continue;
                }
                for (int k = 0; k < 4; ++k) per_rule[k].push_back(out.payoff[k]);
            }
            for (int k = 0; k < 4; ++k) {
                const Moments m = moments_of(per_rule[k]);
                study.cells.push_back(
                    {t_i, q, kRuleNames[k], m.mean, m.variance, m.se, m.count, failures});
                if (k > 0) {
                    std::vector<double> diffs(per_rule[k].size());
                    for (std::size_t p = 0; p < diffs.size(); ++p) {
                        diffs[p] = per_rule[k][p] - per_rule[0][p];
                    }
                    const Moments dm = moments_of(diffs);
                    study.paired.push_back({t_i, q, kRuleNames[k], dm.mean, dm.se, dm.count});
                }
            }
            ++cell_index;
        }
    }
    return study;
}

}  // namespace bbstop
