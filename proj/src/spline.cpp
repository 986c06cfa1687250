#include "bbstop/spline.hpp"

#include <algorithm>
#include <stdexcept>

namespace bbstop {

CubicSpline::CubicSpline(std::vector<double> xs, std::vector<double> ys)
    : xs_(std::move(xs)), ys_(std::move(ys)) {
    const std::size_t n = xs_.size();
    if (n < 2 || ys_.size() != n)
        throw std::invalid_argument("CubicSpline: need at least 2 matching nodes");
    for (std::size_t i = 1; i < n; ++i) {
        if (!(xs_[i] > xs_[i - 1]))
            throw std::invalid_argument("CubicSpline: abscissae must be strictly increasing");
    }
    c2_.assign(n, 0.0);
    if (n == 2) return;

    // Thomas algorithm for the natural-spline tridiagonal system.
    std::vector<double> sub(n, 0.0), diag(n, 0.0), sup(n, 0.0), rhs(n, 0.0);
    for (std::size_t i = 1; i + 1 < n; ++i) {
        const double h0 = xs_[i] - xs_[i - 1];
        const double h1 = xs_[i + 1] - xs_[i];
        sub[i] = h0;
        diag[i] = 2.0 * (h0 + h1);
        sup[i] = h1;
        rhs[i] = 6.0 * ((ys_[i + 1] - ys_[i]) / h1 - (ys_[i] - ys_[i - 1]) / h0);
    }
    for (std::size_t i = 2; i + 1 < n; ++i) {
        const double w = sub[i] / diag[i - 1];
        diag[i] -= w * sup[i - 1];
        rhs[i] -= w * rhs[i - 1];
    }
    for (std::size_t i = n - 2; i >= 1; --i) {
        c2_[i] = (rhs[i] - sup[i] * c2_[i + 1]) / diag[i];
        if (i == 1) break;
    }
}

double CubicSpline::operator()(double x) const {
    if (xs_.empty()) throw std::logic_error("CubicSpline: empty");
    if (x <= xs_.front()) x = xs_.front();
    if (x >= xs_.back()) x = xs_.back();
    const auto it = std::upper_bound(xs_.begin(), xs_.end(), x);
    std::size_t i = (it == xs_.begin()) ? 0 : static_cast<std::size_t>(it - xs_.begin()) - 1;
    if (i >= xs_.size() - 1) i = xs_.size() - 2;
    const double h = xs_[i + 1] - xs_[i];
    const double a = (xs_[i + 1] - x) / h;
    const double b = (x - xs_[i]) / h;
    return a * ys_[i] + b * ys_[i + 1] +
           ((a * a * a - a) * c2_[i] + (b * b * b - b) * c2_[i + 1]) * h * h / 6.0;
}

}  // namespace bbstop
