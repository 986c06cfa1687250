// Acceptance gate: one check per criterion, each printing a single
// PASS/FAIL line. The binary exits nonzero if any criterion fails.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "bbstop/boundary.hpp"
#include "bbstop/bridge.hpp"
#include "bbstop/inference.hpp"
#include "bbstop/parallel.hpp"
#include "bbstop/rng.hpp"
#include "bbstop/simulation.hpp"
#include "bbstop/types.hpp"

using namespace bbstop;

namespace {

const BridgeSpec kSpec{10.0, 1.0, 1.0, 0.0};
constexpr double kPi = 3.14159265358979323846;

int g_failures = 0;

void report(int criterion, bool pass, const std::string& detail) {
    std::printf("%s criterion %d: %s\n", pass ? "PASS" : "FAIL", criterion, detail.c_str());
    std::fflush(stdout);
    if (!pass) ++g_failures;
}

double elapsed_s(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::string slurp(const std::string& file) {
    std::ifstream in(file, std::ios::binary);
    if (!in) return "<missing:" + file + ">";
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// 1. Closed-form oracle: sup error <= 0.02 at N=200, weakly decreasing
// over N in {20, 50, 100, 200}, single-threaded runtime <= 30 s.
void criterion1() {
    const auto start = std::chrono::steady_clock::now();
    std::vector<double> sups;
    for (std::size_t n : {20u, 50u, 100u, 200u}) {
        SolverConfig config;
        config.delta = 1e-3;
        config.grid = log_grid(n, 1.0);
        const Boundary b = solve_boundary(kSpec, config);
        double sup = 0.0;
        for (std::size_t i = 0; i < b.values.size(); ++i) {
            const double cf = 10.0 - 0.8399 * std::sqrt(1.0 - config.grid[i]);
            sup = std::max(sup, std::fabs(b.values[i] - cf));
        }
        sups.push_back(sup);
    }
    const double secs = elapsed_s(start);
    bool pass = sups.back() <= 0.02 && secs <= 30.0;
    for (std::size_t k = 1; k < sups.size(); ++k) pass = pass && sups[k] <= sups[k - 1];
    std::ostringstream os;
    os << "sup errors vs closed form: ";
    for (double s : sups) os << s << " ";
    os << "(need <= 0.02 at N=200, weakly decreasing; " << secs << " s)";
    report(1, pass, os.str());
}

// 2. Last-node formula at lambda = 0, 1e-12 relative.
void criterion2() {
    SolverConfig config;
    config.grid = log_grid(200, 1.0);
    const Boundary b = solve_boundary(kSpec, config);
    const double d = 1.0 - config.grid[199];
    const double expected = 10.0 - 2.0 * std::sqrt(d / (2.0 * kPi));
    const double rel = std::fabs(b.values[199] - expected) / std::fabs(expected);
    std::ostringstream os;
    os << "b(t_{N-1}) relative error " << rel << " (need <= 1e-12)";
    report(2, rel <= 1e-12, os.str());
}

// 3. Parity to machine precision; sigma rescaling within 2x solver delta.
void criterion3() {
    SolverConfig config;
    config.grid = log_grid(200, 1.0);
    const Boundary put = solve_boundary(kSpec, config);
    const Boundary call = call_boundary_from_put(put, 10.0);
    double parity = 0.0;
    for (std::size_t i = 0; i < put.values.size(); ++i) {
        parity = std::max(parity, std::fabs(call.values[i] + put.values[i] - 20.0));
    }

    const double sigma = 2.0;
    BridgeSpec direct_spec = kSpec;
    direct_spec.sigma = sigma;
    const Boundary direct = solve_boundary(direct_spec, config);
    std::vector<double> scaled_nodes(config.grid.size());
    for (std::size_t i = 0; i < scaled_nodes.size(); ++i) scaled_nodes[i] = sigma * config.grid[i];
    BridgeSpec unit{10.0 / std::sqrt(sigma), sigma, 1.0, 0.0};
    SolverConfig unit_config;
    unit_config.grid = TimeGrid(scaled_nodes);
    const Boundary rescaled =
        rescale_boundary(solve_boundary(unit, unit_config), sigma, config.grid);
    double worst = 0.0;
    bool rescale_ok = true;
    for (std::size_t i = 0; i < direct.values.size(); ++i) {
        const double diff = std::fabs(rescaled.values[i] - direct.values[i]);
        worst = std::max(worst, diff / std::fabs(direct.values[i]));
        rescale_ok = rescale_ok && diff <= 2.0 * config.delta * std::fabs(direct.values[i]);
    }
    std::ostringstream os;
    os << "parity residual " << parity << " (need <= 1e-12), rescale relative error " << worst
       << " (need <= 2e-3)";
    report(3, parity <= 1e-12 && rescale_ok, os.str());
}

// 4. Value-function identity at 20 nodes; quadrature vs Monte Carlo at
// (0, S) within 3 SE; runtime <= 2 min.
void criterion4() {
    const auto start = std::chrono::steady_clock::now();
    SolverConfig config;
    config.grid = log_grid(200, 1.0);
    const Boundary b = solve_boundary(kSpec, config);

    double worst_identity = 0.0;
    for (int k = 0; k < 20; ++k) {
        const std::size_t i = static_cast<std::size_t>(k) * 10;  // nodes 0, 10, ..., 190
        const double t = config.grid[i];
        const double bt = b.values[i];
        worst_identity =
            std::max(worst_identity, std::fabs(value_function(t, bt, b, kSpec) - (10.0 - bt)));
    }
    const bool identity_ok = worst_identity <= 1e-3 * 10.0;

    const double quad = value_function(0.0, 10.0, b, kSpec);
    // Refine the path grid toward T: the boundary climbs like sqrt(T - u)
    // there, so freezing it per interval needs geometrically shrinking steps.
    std::vector<double> nodes;
    for (int i = 0; i < 198; ++i) nodes.push_back(0.99 * i / 198.0);
    for (double d = 0.01; d > 1e-8; d *= 0.85) nodes.push_back(1.0 - d);
    nodes.push_back(1.0);
    const TimeGrid path_grid{nodes};
    const std::size_t m = 100000;
    std::vector<double> payoff(m);
    parallel_for(m, default_workers(), [&](std::size_t k) {
        const PricePath path = sample_path(0.0, 10.0, path_grid, kSpec, derive_seed(424242, k));
        // Discrete monitoring misses between-node crossings, an O(sqrt(dt))
        // bias. Conditioned on its endpoints the bridge is a standard
        // Brownian bridge over each step, so the crossing probability of a
        // locally frozen boundary level is exp(-2 ab / (sigma^2 dt)).
        std::mt19937_64 gen(derive_seed(434343, k));
        std::uniform_real_distribution<double> unif(0.0, 1.0);
        double value = 0.0;
        for (std::size_t i = 0; i + 1 < path.size(); ++i) {
            const double level_i = b(path.times[i]);
            if (path.values[i] <= level_i) {
                value = 10.0 - path.values[i];
                break;
            }
            const double dt = path.times[i + 1] - path.times[i];
            const double mid = 0.5 * (path.times[i] + path.times[i + 1]);
            // Past the last interior solver node the spline misfits the
            // square-root shape of the boundary; use the profile directly.
            const double a_sp = b.grid[b.grid.size() - 2];
            const double level =
                mid <= a_sp ? b(mid)
                            : 10.0 + (b.values[b.values.size() - 2] - 10.0) *
                                         std::sqrt((1.0 - mid) / (1.0 - a_sp));
            const double a_gap = path.values[i] - level;
            if (a_gap <= 0.0) {
                // The rising boundary overtakes the current state within
                // this interval; stop here at the actual path value.
                value = 10.0 - path.values[i];
                break;
            }
            // Pay the frozen level on every crossing, certain or sampled.
            // Paying the endpoint overshoot instead would couple the stop
            // decision to the future of the path and overstate the value.
            const double b_gap = path.values[i + 1] - level;
            if (b_gap <= 0.0) {
                value = 10.0 - level;
                break;
            }
            const double p_cross = std::exp(-2.0 * a_gap * b_gap / dt);
            if (unif(gen) < p_cross) {
                value = 10.0 - level;
                break;
            }
        }
        payoff[k] = value;
    });
    double sum = 0.0;
    for (double p : payoff) sum += p;
    const double mean = sum / static_cast<double>(m);
    double ss = 0.0;
    for (double p : payoff) ss += (p - mean) * (p - mean);
    const double se = std::sqrt(ss / static_cast<double>(m - 1) / static_cast<double>(m));
    const double secs = elapsed_s(start);
    const bool mc_ok = std::fabs(quad - mean) <= 3.0 * se && secs <= 120.0;
    std::ostringstream os;
    os << "max |V(t,b(t)) - (S-b(t))| = " << worst_identity << " (need <= 0.01); V(0,S) quad "
       << quad << " vs MC " << mean << " +- " << se << " (need within 3 SE; " << secs << " s)";
    report(4, identity_ok && mc_ok, os.str());
}

// 5. Sample variance of sqrt(n)(sigma_hat - sigma) in [0.425, 0.575] over
// 1e3 replications, n = 200 equal steps.
void criterion5() {
    const TimeGrid grid = uniform_grid(201, 1.0);
    const std::size_t reps = 1000;
    std::vector<double> zs(reps);
    parallel_for(reps, default_workers(), [&](std::size_t k) {
        const PricePath path = sample_path(0.0, 10.0, grid, kSpec, derive_seed(51515, k));
        PricePath obs;
        obs.times.assign(path.times.begin(), path.times.begin() + 201);
        obs.values.assign(path.values.begin(), path.values.begin() + 201);
        zs[k] = std::sqrt(200.0) * (mle_sigma(obs, kSpec).sigma_hat - 1.0);
    });
    double sum = 0.0;
    for (double z : zs) sum += z;
    const double mean = sum / static_cast<double>(reps);
    double ss = 0.0;
    for (double z : zs) ss += (z - mean) * (z - mean);
    const double var = ss / static_cast<double>(reps - 1);
    std::ostringstream os;
    os << "var of sqrt(n)(sigma_hat - sigma) = " << var << " (need in [0.425, 0.575])";
    report(5, var >= 0.425 && var <= 0.575, os.str());
}

// 6. Coverage: M=200, n=66, N=200, alpha=0.05; >= 90% of interior nodes
// inside alpha +- 3 sqrt(alpha(1-alpha)/M).
void criterion6() {
    const auto start = std::chrono::steady_clock::now();
    const std::size_t m_reps = 200;
    const double alpha = 0.05;
    const CoverageResult res = coverage_experiment(1.0, 66, 200, m_reps, alpha, kSpec, 10.0,
                                                   60606u, default_workers());
    const double half = 3.0 * std::sqrt(alpha * (1.0 - alpha) / static_cast<double>(m_reps));
    std::size_t inside = 0, interior = 0;
    for (std::size_t i = 1; i + 1 < res.proportion.size(); ++i) {
        ++interior;
        if (res.proportion[i] >= alpha - half && res.proportion[i] <= alpha + half) ++inside;
    }
    const double frac = static_cast<double>(inside) / static_cast<double>(interior);
    const double secs = elapsed_s(start);
    std::ostringstream os;
    os << 100.0 * frac << "% of interior nodes within alpha +- " << half << " ("
       << res.failures << " failed replications; need >= 90%; " << secs << " s)";
    report(6, frac >= 0.90 && secs <= 1800.0, os.str());
}

// 7. Payoff study: r=25 estimated-boundary mean within 3 paired SE of the
// true-boundary mean at every cell; r=1 variance ordering
// upper <= center <= lower in > 75% of cells.
void criterion7() {
    ExperimentConfig cfg;
    cfg.spec = kSpec;
    cfg.x0 = 10.0;
    cfg.base_nodes = 200;
    cfg.replications = 200;
    cfg.quantiles = {0.2, 0.4, 0.6, 0.8};
    cfg.eval_indices = {40, 80, 120, 160};
    cfg.seed = 70707;
    cfg.workers = default_workers();

    cfg.frequency = 25;
    const PayoffStudy high = run_payoff_study(cfg);
    std::size_t mean_cells = 0, mean_ok = 0;
    for (const PairedCell& p : high.paired) {
        if (p.rule != "center") continue;
        ++mean_cells;
        if (std::fabs(p.mean_diff) <= 3.0 * p.se_diff) ++mean_ok;
    }

    cfg.frequency = 1;
    const PayoffStudy low = run_payoff_study(cfg);
    std::size_t var_cells = 0, var_ordered = 0;
    for (std::size_t c = 0; c + 3 < low.cells.size(); c += 4) {
        const double v_center = low.cells[c + 1].variance;
        const double v_upper = low.cells[c + 2].variance;
        const double v_lower = low.cells[c + 3].variance;
        ++var_cells;
        if (v_upper <= v_center && v_center <= v_lower) ++var_ordered;
    }
    const double frac = static_cast<double>(var_ordered) / static_cast<double>(var_cells);
    std::ostringstream os;
    os << "r=25 mean within 3 paired SE at " << mean_ok << "/" << mean_cells
       << " cells (need all); r=1 variance ordering in " << 100.0 * frac
       << "% of cells (need > 75%)";
    report(7, mean_ok == mean_cells && mean_cells == 16 && frac > 0.75, os.str());
}

// 8. Determinism: seeded CLI runs byte-identical across repeats and across
// worker counts {1, 4}.
void criterion8() {
    const std::string cli = BBSTOP_CLI_PATH;
    auto run = [&](const std::string& args) {
        const std::string cmd = cli + " " + args + " > acceptance_cli_log.txt 2>&1";
        return std::system(cmd.c_str()) == 0;
    };
    bool ok = true;

    ok = ok && run("solve --strike 10 --sigma 1 --nodes 100 --out acc_solve_a");
    ok = ok && run("solve --strike 10 --sigma 1 --nodes 100 --out acc_solve_b");
    ok = ok && slurp("acc_solve_a.csv") == slurp("acc_solve_b.csv");

    std::ofstream("acc_cov.json")
        << "{\"strike\":10,\"horizon\":1,\"sigma\":1,\"lambda\":0,\"x0\":10,"
           "\"n\":30,\"nodes\":80,\"replications\":12,\"alpha\":0.05,\"seed\":88}";
    ok = ok && run("study --kind coverage --config acc_cov.json --workers 1 --out acc_cov_1");
    ok = ok && run("study --kind coverage --config acc_cov.json --workers 1 --out acc_cov_1b");
    ok = ok && run("study --kind coverage --config acc_cov.json --workers 4 --out acc_cov_4");
    ok = ok && slurp("acc_cov_1.csv") == slurp("acc_cov_1b.csv");
    ok = ok && slurp("acc_cov_1.csv") == slurp("acc_cov_4.csv");

    std::ofstream("acc_pay.json")
        << "{\"spec\":{\"strike\":10,\"horizon\":1,\"sigma\":1,\"lambda\":0},\"x0\":10,"
           "\"base_nodes\":60,\"frequency\":1,\"replications\":16,\"quantiles\":[0.3,0.7],"
           "\"eval_indices\":[20,40],\"seed\":99}";
    ok = ok && run("study --kind payoff --config acc_pay.json --workers 1 --out acc_pay_1");
    ok = ok && run("study --kind payoff --config acc_pay.json --workers 4 --out acc_pay_4");
    ok = ok && slurp("acc_pay_1.csv") == slurp("acc_pay_4.csv");

    report(8, ok, "seeded CLI outputs byte-identical across reruns and workers {1, 4}");
}

}  // namespace

int main() {
    criterion1();
    criterion2();
    criterion3();
    criterion4();
    criterion5();
    criterion6();
    criterion7();
    criterion8();
    if (g_failures > 0) {
        std::printf("%d criterion(s) failed\n", g_failures);
        return 1;
    }
    std::printf("all acceptance criteria passed\n");
    return 0;
}
