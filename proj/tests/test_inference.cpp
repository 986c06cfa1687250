#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "bbstop/bridge.hpp"
#include "bbstop/inference.hpp"
#include "bbstop/rng.hpp"
#include "bbstop/types.hpp"

using namespace bbstop;

namespace {

const BridgeSpec kSpec{10.0, 1.0, 1.0, 0.0};

// Path whose every standardized one-step residual equals c.
PricePath constant_residual_path(double c, std::size_t n, double x0) {
    BridgeSpec unit = kSpec;
    unit.sigma = 1.0;
    PricePath p;
    p.times.push_back(0.0);
    p.values.push_back(x0);
    for (std::size_t i = 1; i <= n; ++i) {
        const double t = 0.9 * static_cast<double>(i) / static_cast<double>(n);
        const double m = bridge_mean(p.times.back(), p.values.back(), t, unit);
        const double s = bridge_stddev(p.times.back(), t, unit);
        p.times.push_back(t);
        p.values.push_back(m + c * s);
    }
    return p;
}

}  // namespace

TEST_CASE("fisher information") {
    CHECK(fisher_information(1.0) == doctest::Approx(2.0));
    CHECK(fisher_information(2.0) == doctest::Approx(0.5));
    std::mt19937_64 gen(3);
    std::uniform_real_distribution<double> u(0.01, 10.0);
    for (int k = 0; k < 50; ++k) {
        const double s = u(gen);
        CHECK(fisher_information(s) * s * s == doctest::Approx(2.0).epsilon(1e-12));
    }
    CHECK_THROWS(fisher_information(0.0));
    CHECK_THROWS(fisher_information(-1.0));
}

TEST_CASE("mle on the deterministic line is degenerate") {
    const PricePath line = constant_residual_path(0.0, 20, 9.0);
    const VolEstimate est = mle_sigma(line, kSpec);
    CHECK(est.sigma_hat == 0.0);
    CHECK(est.degenerate());
    CHECK(est.n == 20);
}

TEST_CASE("mle recovers a constant standardized residual") {
    for (double c : {0.3, -0.7, 2.0}) {
        const VolEstimate est = mle_sigma(constant_residual_path(c, 25, 10.0), kSpec);
        CHECK(est.sigma_hat == doctest::Approx(std::fabs(c)).epsilon(1e-12));
        CHECK(est.fisher == doctest::Approx(2.0 / (c * c)).epsilon(1e-12));
    }
}

TEST_CASE("mle scale equivariance") {
    const double c = 0.8, scale = 3.5;
    const VolEstimate base = mle_sigma(constant_residual_path(c, 25, 10.0), kSpec);
    const VolEstimate scaled = mle_sigma(constant_residual_path(c * scale, 25, 10.0), kSpec);
    CHECK(scaled.sigma_hat == doctest::Approx(scale * base.sigma_hat).epsilon(1e-12));
}

TEST_CASE("mle input validation") {
    PricePath single;
    single.times = {0.0};
    single.values = {10.0};
    CHECK_THROWS(mle_sigma(single, kSpec));
    PricePath at_horizon;
    at_horizon.times = {0.0, 1.0};
    at_horizon.values = {10.0, 10.0};
    CHECK_THROWS(mle_sigma(at_horizon, kSpec));
}

TEST_CASE("mle sampling distribution at moderate replication count") {
    const TimeGrid grid = uniform_grid(201, 1.0);
    const std::size_t reps = 300;
    double sum = 0.0, ss = 0.0;
    std::vector<double> zs(reps);
    for (std::size_t k = 0; k < reps; ++k) {
        const PricePath path = sample_path(0.0, 10.0, grid, kSpec, derive_seed(900, k));
        PricePath obs;
        obs.times.assign(path.times.begin(), path.times.begin() + 201);
        obs.values.assign(path.values.begin(), path.values.begin() + 201);
        const VolEstimate est = mle_sigma(obs, kSpec);
        zs[k] = std::sqrt(200.0) * (est.sigma_hat - 1.0);
        sum += zs[k];
    }
    const double mean = sum / reps;
    for (double z : zs) ss += (z - mean) * (z - mean);
    const double var = ss / (reps - 1);
    CHECK(var > 0.35);
    CHECK(var < 0.65);
}

TEST_CASE("confidence band structure") {
    const VolEstimate est{1.0, 200, 2.0};
    SolverConfig config;
    config.grid = log_grid(50, 1.0);
    const ConfidenceBand band = confidence_curves(est, kSpec, config, 0.05);
    const std::size_t n = band.grid.size();
    for (std::size_t i = 0; i < n; ++i) {
        CHECK(band.lower[i] <= band.center[i]);
        CHECK(band.center[i] <= band.upper[i]);
        CHECK(0.5 * (band.lower[i] + band.upper[i]) ==
              doctest::Approx(band.center[i]).epsilon(1e-14));
    }
    CHECK(band.upper.back() == doctest::Approx(10.0).epsilon(1e-9));
    CHECK(band.lower.back() == doctest::Approx(10.0).epsilon(1e-9));

    const ConfidenceBand collapsed = confidence_curves(est, kSpec, config, 0.9999);
    for (std::size_t i = 0; i < n; ++i) {
        CHECK(collapsed.upper[i] - collapsed.lower[i] < 1e-3 * 10.0);
    }
    CHECK_THROWS(confidence_curves(VolEstimate{0.0, 200, 0.0}, kSpec, config, 0.05));
    CHECK_THROWS(confidence_curves(est, kSpec, config, 1.0));
}

TEST_CASE("band half-width scales as 1/sqrt(n)") {
    const TimeGrid grid = log_grid(30, 1.0);
    const auto closed_form = [&](double sigma) {
        BridgeSpec spec = kSpec;
        spec.sigma = sigma;
        return closed_form_boundary_lambda0(spec, grid);
    };
    const ConfidenceBand narrow =
        confidence_curves_with(VolEstimate{1.0, 200, 2.0}, closed_form, 0.05, 1e-2);
    const ConfidenceBand wide =
        confidence_curves_with(VolEstimate{1.0, 100, 2.0}, closed_form, 0.05, 1e-2);
    for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
        const double hn = narrow.upper[i] - narrow.center[i];
        const double hw = wide.upper[i] - wide.center[i];
        CHECK(hw == doctest::Approx(hn * std::sqrt(2.0)).epsilon(1e-12));
    }
}

TEST_CASE("finite-difference slope matches the closed form sensitivity") {
    const TimeGrid grid = log_grid(30, 1.0);
    const auto closed_form = [&](double sigma) {
        BridgeSpec spec = kSpec;
        spec.sigma = sigma;
        return closed_form_boundary_lambda0(spec, grid);
    };
    const VolEstimate est{1.0, 200, 2.0};
    const ConfidenceBand band = confidence_curves_with(est, closed_form, 0.05, 1e-2);
    const double scale = 1.959963984540054 / std::sqrt(200.0 * 2.0);
    for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
        const double slope_true = kSheppConstant * std::sqrt(1.0 - grid[i]);
        const double slope_fd = (band.upper[i] - band.center[i]) / scale;
        CHECK(std::fabs(slope_fd - slope_true) <= 0.05 * slope_true);
    }
}

TEST_CASE("coverage with an effectively infinite band is zero") {
    const CoverageResult res =
        coverage_experiment(1.0, 10, 30, 1, 1e-12, kSpec, 10.0, 5u, 1);
    CHECK(res.replications + res.failures == 1);
    for (std::size_t i = 1; i + 1 < res.proportion.size(); ++i) CHECK(res.proportion[i] == 0.0);
}

TEST_CASE("coverage determinism across runs and workers") {
    const CoverageResult a = coverage_experiment(1.0, 15, 40, 6, 0.05, kSpec, 10.0, 77u, 1);
    const CoverageResult b = coverage_experiment(1.0, 15, 40, 6, 0.05, kSpec, 10.0, 77u, 1);
    const CoverageResult c = coverage_experiment(1.0, 15, 40, 6, 0.05, kSpec, 10.0, 77u, 4);
    CHECK(a.proportion == b.proportion);
    CHECK(a.proportion == c.proportion);
    CHECK(a.failures == c.failures);
}

TEST_CASE("coverage reference band formula") {
    const CoverageResult res = coverage_experiment(1.0, 10, 30, 2, 0.05, kSpec, 10.0, 5u, 1);
    const double half = 1.959963984540054 * std::sqrt(0.05 * 0.95 / 2.0);
    CHECK(res.band_lower == doctest::Approx(0.05 - half).epsilon(1e-9));
    CHECK(res.band_upper == doctest::Approx(0.05 + half).epsilon(1e-9));
}
