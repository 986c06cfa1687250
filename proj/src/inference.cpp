#include "bbstop/inference.hpp"

#include <cmath>
#include <cstdint>
#include <stdexcept>

#include "bbstop/bridge.hpp"
#include "bbstop/normal.hpp"
#include "bbstop/parallel.hpp"
#include "bbstop/rng.hpp"

namespace bbstop {

VolEstimate mle_sigma(const PricePath& path, const BridgeSpec& spec) {
    path.validate();
    if (path.size() < 2) throw std::invalid_argument("mle_sigma: need at least one increment");
    const double T = spec.horizon;
    if (!(T > 0.0)) throw std::invalid_argument("mle_sigma: horizon must be > 0");
    for (double t : path.times) {
        if (!(t < T)) throw std::invalid_argument("mle_sigma: observation times must be < horizon");
    }

    BridgeSpec unit = spec;
    unit.sigma = 1.0;
    double sum = 0.0;
    const std::size_t n = path.size() - 1;
    for (std::size_t i = 1; i <= n; ++i) {
        const double m = bridge_mean(path.times[i - 1], path.values[i - 1], path.times[i], unit);
        const double s = bridge_stddev(path.times[i - 1], path.times[i], unit);
        const double r = (path.values[i] - m) / s;
        sum += r * r;
    }
    VolEstimate est;
    est.n = n;
    est.sigma_hat = std::sqrt(sum / static_cast<double>(n));
    // A path glued to its conditional means leaves rounding residue of a
    // few ulps; treat such estimates as exactly degenerate.
    const double scale = std::fabs(spec.strike) / std::sqrt(T);
    if (est.sigma_hat <= 1e-12 * scale) est.sigma_hat = 0.0;
    est.fisher = est.sigma_hat > 0.0 ? fisher_information(est.sigma_hat) : 0.0;
    return est;
}

double fisher_information(double sigma) {
    if (!(sigma > 0.0)) throw std::invalid_argument("fisher_information: sigma must be > 0");
    return 2.0 / (sigma * sigma);
}

ConfidenceBand confidence_curves_with(const VolEstimate& est, const BoundarySolverFn& solve,
                                      double alpha, double epsilon) {
    if (!(alpha > 0.0 && alpha < 1.0))
        throw std::invalid_argument("confidence_curves: alpha must lie in (0, 1)");
    if (!(epsilon > 0.0)) throw std::invalid_argument("confidence_curves: epsilon must be > 0");
    if (est.degenerate() || !(est.sigma_hat > 0.0))
        throw std::invalid_argument("confidence_curves: degenerate volatility estimate");
    if (est.n < 1) throw std::invalid_argument("confidence_curves: estimate has no increments");

    const Boundary center = solve(est.sigma_hat);
    const Boundary bumped = solve(est.sigma_hat + epsilon);

    const double z = norm_quantile(1.0 - 0.5 * alpha);
    const double scale =
        z / std::sqrt(static_cast<double>(est.n) * fisher_information(est.sigma_hat));

    ConfidenceBand band;
    band.grid = center.grid;
    band.alpha = alpha;
    band.fd_step = epsilon;
    band.center = center.values;
    band.lower.resize(center.values.size());
    band.upper.resize(center.values.size());
    for (std::size_t i = 0; i < center.values.size(); ++i) {
        const double slope = (bumped.values[i] - center.values[i]) / epsilon;
        const double half = scale * std::fabs(slope);
        band.lower[i] = center.values[i] - half;
        band.upper[i] = center.values[i] + half;
    }
    return band;
}

ConfidenceBand confidence_curves(const VolEstimate& est, const BridgeSpec& spec_template,
                                 const SolverConfig& config, double alpha, double epsilon) {
    return confidence_curves_with(
        est,
        [&](double sigma) {
            BridgeSpec spec = spec_template;
            spec.sigma = sigma;
            return solve_boundary(spec, config);
        },
        alpha, epsilon);
}

CoverageResult coverage_experiment(double true_sigma, std::size_t n, std::size_t n_grid,
                                   std::size_t replications, double alpha,
                                   const BridgeSpec& spec, double x0, std::uint64_t seed,
                                   int workers) {
    if (!(true_sigma > 0.0)) throw std::invalid_argument("coverage_experiment: sigma must be > 0");
    if (n < 1 || n >= n_grid)
        throw std::invalid_argument("coverage_experiment: need 1 <= n < N");
    if (replications < 1) throw std::invalid_argument("coverage_experiment: M must be >= 1");

    BridgeSpec true_spec = spec;
    true_spec.sigma = true_sigma;
    true_spec.validate();

    SolverConfig config;
    config.grid = log_grid(n_grid, spec.horizon);

    // Reference boundary the bands are checked against.
    Boundary truth = [&] {
        if (spec.lambda == 0.0) return closed_form_boundary_lambda0(true_spec, config.grid);
        SolverConfig fine;
        fine.grid = log_grid(1000, spec.horizon);
        const Boundary hi = solve_boundary(true_spec, fine);
        std::vector<double> values(config.grid.size());
        for (std::size_t i = 0; i < values.size(); ++i) values[i] = hi(config.grid[i]);
        return Boundary(config.grid, std::move(values), OptionSide::put);
    }();

    const TimeGrid sample_grid = uniform_grid(n_grid, spec.horizon);
    const std::size_t n_nodes = config.grid.size();

    std::vector<std::vector<std::uint8_t>> outside(replications);
    std::vector<std::uint8_t> failed(replications, 0);

    parallel_for(replications, workers, [&](std::size_t m) {
        PricePath path = sample_path(0.0, x0, sample_grid, true_spec, derive_seed(seed, m));
        PricePath observed;
        observed.times.assign(path.times.begin(), path.times.begin() + n + 1);
        observed.values.assign(path.values.begin(), path.values.begin() + n + 1);
        try {
            const VolEstimate est = mle_sigma(observed, spec);
            if (est.degenerate()) throw std::runtime_error("degenerate estimate");
            const ConfidenceBand band = confidence_curves(est, spec, config, alpha);
            std::vector<std::uint8_t> out(n_nodes, 0);
            for (std::size_t i = 0; i < n_nodes; ++i) {
                out[i] = (truth.values[i] < band.lower[i] || truth.values[i] > band.upper[i]) ? 1 : 0;
            }
            outside[m] = std::move(out);
        } catch (const std::exception&) {
            failed[m] = 1;
        }
    });

    CoverageResult result;
    result.grid = config.grid;
    result.proportion.assign(n_nodes, 0.0);
    for (std::size_t m = 0; m < replications; ++m) {
        if (failed[m]) {
            ++result.failures;
            continue;
        }
        ++result.replications;
        for (std::size_t i = 0; i < n_nodes; ++i) result.proportion[i] += outside[m][i];
    }
    if (result.replications > 0) {
        for (double& p : result.proportion) p /= static_cast<double>(result.replications);
    }
    const double half = norm_quantile(0.975) *
                        std::sqrt(alpha * (1.0 - alpha) / static_cast<double>(replications));
    result.band_lower = alpha - half;
    result.band_upper = alpha + half;
    return result;
}

}  // namespace bbstop
