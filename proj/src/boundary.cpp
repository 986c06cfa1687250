#include "bbstop/boundary.hpp"

#include <cmath>
#include <sstream>

#include "bbstop/normal.hpp"

namespace bbstop {

namespace {

constexpr double kPi = 3.14159265358979323846;

double mu(double t, double x, double u, const BridgeSpec& spec) {
    const double T = spec.horizon;
    return x * (T - u) / (T - t) + spec.strike * (u - t) / (T - t);
}

double nu(double t, double u, const BridgeSpec& spec) {
    const double T = spec.horizon;
    return spec.sigma * std::sqrt((u - t) * (T - u) / (T - t));
}

// Closed-form upper estimate of the integral of the kernel over [a, T],
// taken at half weight as the tail term of the Riemann sum and of the
// value-function quadrature.
double tail_estimate(double t, double x1, double a, const BridgeSpec& spec) {
    const double T = spec.horizon;
    const double lam = spec.lambda;
    const double d = T - a;
    const double h = std::exp(-lam * (a - t)) *
                     ((spec.strike - x1) * d / (T - t) * (1.0 + 0.5 * lam * d) +
                      spec.sigma * std::sqrt(2.0 * d / kPi) * (1.0 + lam * d / 3.0));
    return 0.5 * h;
}

}  // namespace

Boundary::Boundary(TimeGrid g, std::vector<double> v, OptionSide s)
    : grid(std::move(g)), values(std::move(v)), side(s) {
    grid.validate();
    if (values.size() != grid.size())
        throw std::invalid_argument("Boundary: values/grid length mismatch");
    spline_ = CubicSpline(grid.nodes, values);
}

double kernel(double t, double x1, double u, double x2, const BridgeSpec& spec) {
    spec.validate();
    const double T = spec.horizon;
    if (!(u < T)) throw std::invalid_argument("kernel: u must be < horizon (singular at u = T)");
    if (!(u >= t)) throw std::invalid_argument("kernel: u must be >= t");
    const double lam = spec.lambda;
    const double factor = std::exp(-lam * (u - t)) * (1.0 / (T - u) + lam);
    if (u == t) {
        // nu == 0: Phi(z) degenerates to the indicator 1{x2 >= x1}.
        return factor * (spec.strike - x1) * (x2 >= x1 ? 1.0 : 0.0);
    }
    const double m = mu(t, x1, u, spec);
    const double s = nu(t, u, spec);
    const double z = (x2 - m) / s;
    return factor * ((spec.strike - m) * norm_cdf(z) + s * norm_pdf(z));
}

TimeGrid log_grid(std::size_t n, double horizon) {
    if (n < 2) throw std::invalid_argument("log_grid: n must be >= 2");
    if (!(horizon > 0.0)) throw std::invalid_argument("log_grid: horizon must be > 0");
    std::vector<double> nodes(n + 1);
    const double scale = std::expm1(horizon);
    for (std::size_t i = 0; i <= n; ++i) {
        nodes[i] = std::log1p(static_cast<double>(i) / static_cast<double>(n) * scale);
    }
    nodes.front() = 0.0;
    nodes.back() = horizon;
    return TimeGrid(std::move(nodes));
}

Boundary solve_boundary(const BridgeSpec& spec, const SolverConfig& config,
                        SolverStats* stats) {
    spec.validate();
    config.validate();
    const TimeGrid& grid = config.grid;
    const std::size_t n = grid.size() - 1;  // N
    const double S = spec.strike;
    const double T = spec.horizon;
    const double lam = spec.lambda;
    const double d = T - grid[n - 1];  // last subinterval width

    if (!(lam * d < 1.0)) {
        std::ostringstream os;
        os << "solve_boundary: grid too coarse at node " << (n - 1)
           << ": lambda*(T - t_{N-1}) = " << lam * d << " must be < 1";
        throw GridTooCoarseError(n - 1, os.str());
    }
    const double last_denom = 0.5 - 0.25 * lam * d;
    if (!(last_denom > 0.0)) {
        std::ostringstream os;
        os << "solve_boundary: grid too coarse at node " << (n - 1)
           << ": non-positive last-node denominator";
        throw GridTooCoarseError(n - 1, os.str());
    }

    std::vector<double> b(n + 1);
    b[n] = S;
    b[n - 1] = (0.5 * S * (1.0 - 0.5 * lam * d) -
                spec.sigma * std::sqrt(d / (2.0 * kPi)) * (1.0 + lam * d / 3.0)) /
               last_denom;

    // Denominators of the interior update must be positive at every node
    // before any iteration starts.
    std::vector<double> denom(n, 0.0);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        denom[i] = 1.0 - 0.5 * std::exp(-lam * (grid[n - 1] - grid[i])) *
                             (1.0 + 0.5 * lam * d) * d / (T - grid[i]);
        if (!(denom[i] > 0.0)) {
            std::ostringstream os;
            os << "solve_boundary: grid too coarse at node " << i
               << ": non-positive fixed-point denominator";
            throw GridTooCoarseError(i, os.str());
        }
    }

    if (stats) stats->iterations.assign(n + 1, 0);

    for (std::size_t ii = n - 1; ii-- > 0;) {
        const std::size_t i = ii;
        const double ti = grid[i];
        const double tail = std::exp(-lam * (grid[n - 1] - ti)) * 0.5 *
                            (S * d / (T - ti) * (1.0 + 0.5 * lam * d) +
                             spec.sigma * std::sqrt(2.0 * d / kPi) * (1.0 + lam * d / 3.0));
        const auto apply = [&](double x) {
            double sum = 0.0;
            for (std::size_t j = i + 1; j < n; ++j) {
                sum += (grid[j] - grid[j - 1]) * kernel(ti, x, grid[j], b[j], spec);
            }
            return (S - sum - tail) / denom[i];
        };

        double prev2 = 0.0;
        double prev1 = b[i + 1];
        double cur = b[i + 1];
        int iter = 0;
        double rel = 0.0;
        for (;;) {
            const double next = apply(cur);
            const double scale = std::fabs(cur) > 0.0 ? std::fabs(cur) : 1.0;
            rel = std::fabs(next - cur) / scale;
            prev2 = prev1;
            prev1 = cur;
            cur = next;
            ++iter;
            if (rel <= config.delta) break;
            if (iter >= config.max_iterations) {
                std::ostringstream os;
                os << "solve_boundary: fixed point did not converge at node " << i
                   << " after " << iter << " iterations (residual " << rel << ")";
                throw NonConvergenceError(i, cur, rel, os.str());
            }
        }
        if (iter < 2) {
            // A second application is needed to estimate the contraction rate.
            prev2 = prev1;
            prev1 = cur;
            cur = apply(cur);
            ++iter;
        }
        // The map contracts slowly on coarse grids, leaving a geometric tail
        // beyond the last step. Aitken's delta-squared step removes it.
        const double d1 = prev1 - prev2;
        const double d2 = cur - prev1;
        const double dd = d2 - d1;
        if (std::fabs(d2) < std::fabs(d1) && std::fabs(dd) > 0.0) {
            const double accel = cur - d2 * d2 / dd;
            if (std::isfinite(accel)) cur = accel;
        }
        b[i] = cur;
        if (stats) stats->iterations[i] = iter;
    }

    return Boundary(grid, std::move(b), OptionSide::put);
}

Boundary closed_form_boundary_lambda0(const BridgeSpec& spec, const TimeGrid& grid) {
    spec.validate();
    if (spec.lambda != 0.0)
        throw std::invalid_argument("closed_form_boundary_lambda0: requires lambda == 0");
    grid.validate();
    std::vector<double> values(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        values[i] = spec.strike - kSheppConstant * spec.sigma * std::sqrt(spec.horizon - grid[i]);
    }
    return Boundary(grid, std::move(values), OptionSide::put);
}

Boundary call_boundary_from_put(const Boundary& put, double strike) {
    if (put.side != OptionSide::put)
        throw std::invalid_argument("call_boundary_from_put: input must be put-side");
    std::vector<double> values(put.values.size());
    for (std::size_t i = 0; i < values.size(); ++i) values[i] = 2.0 * strike - put.values[i];
    return Boundary(put.grid, std::move(values), OptionSide::call);
}

Boundary rescale_boundary(const Boundary& unit_vol, double sigma, const TimeGrid& target_grid) {
    if (!(sigma > 0.0)) throw std::invalid_argument("rescale_boundary: sigma must be > 0");
    target_grid.validate();
    const double root = std::sqrt(sigma);
    std::vector<double> values(target_grid.size());
    for (std::size_t i = 0; i < target_grid.size(); ++i) {
        values[i] = root * unit_vol(sigma * target_grid[i]);
    }
    return Boundary(target_grid, std::move(values), unit_vol.side);
}

Boundary rescale_boundary(const Boundary& unit_vol, double sigma) {
    if (!(sigma > 0.0)) throw std::invalid_argument("rescale_boundary: sigma must be > 0");
    std::vector<double> nodes(unit_vol.grid.size());
    std::vector<double> values(unit_vol.grid.size());
    const double root = std::sqrt(sigma);
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        nodes[i] = unit_vol.grid[i] / sigma;
        values[i] = root * unit_vol.values[i];
    }
    return Boundary(TimeGrid(std::move(nodes)), std::move(values), unit_vol.side);
}

double value_function(double t, double x, const Boundary& boundary, const BridgeSpec& spec) {
    spec.validate();
    const double T = spec.horizon;
    if (!(t >= 0.0 && t < T)) throw std::invalid_argument("value_function: t must lie in [0, T)");

    const TimeGrid& bgrid = boundary.grid;
    const double a_spline = bgrid[bgrid.size() - 2];  // t_{N-1}
    const double d_last = spec.horizon - a_spline;
    const double b_last = boundary.values[bgrid.size() - 2];

    // Past the last solved node the spline has no interior knots and misfits
    // the square-root shape the boundary takes near the horizon; use the
    // profile anchored at (t_{N-1}, b(t_{N-1})) there instead.
    const auto boundary_at = [&](double u) {
        if (u <= a_spline) return boundary(u);
        return spec.strike + (b_last - spec.strike) * std::sqrt((T - u) / d_last);
    };
    const auto f = [&](double u) { return kernel(t, x, u, boundary_at(u), spec); };
    const auto simpson = [&](double a, double b) {
        const double m = 0.5 * (a + b);
        return (b - a) / 6.0 * (f(a) + 4.0 * f(m) + f(b));
    };

    const TimeGrid& grid = boundary.grid;
    const double a_last = a_spline;
    double total = 0.0;

    // Smooth part: composite Simpson over the boundary grid, one panel per
    // subinterval, starting at t.
    double start = t;
    if (t < a_last) {
        std::size_t j = 0;
        while (grid[j] <= t) ++j;
        double prev = t;
        for (; grid[j] <= a_last && j < grid.size(); ++j) {
            total += simpson(prev, grid[j]);
            prev = grid[j];
            if (grid[j] == a_last) break;
        }
        start = a_last;
    }

    // The kernel grows like (T - u)^{-1/2} toward the horizon: refine the
    // last stretch geometrically and close with the half-bound tail
    // estimate on the final sliver.
    double lo = start;
    for (int k = 0; k < 24; ++k) {
        const double hi = T - 0.5 * (T - lo);
        total += simpson(lo, 0.5 * (lo + hi)) + simpson(0.5 * (lo + hi), hi);
        lo = hi;
    }
    total += tail_estimate(t, x, lo, spec);
    return total;
}

}  // namespace bbstop
