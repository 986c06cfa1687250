// Natural cubic spline interpolation through a set of nodes.
#pragma once

#include <cstddef>
#include <vector>

namespace bbstop {

class CubicSpline {
public:
    CubicSpline() = default;
    CubicSpline(std::vector<double> xs, std::vector<double> ys);

    // Evaluates the spline; arguments outside the node range are clamped
    // to the endpoints.
    double operator()(double x) const;

    bool empty() const { return xs_.empty(); }

private:
    std::vector<double> xs_;
    std::vector<double> ys_;
    std::vector<double> c2_;  // second derivatives at the nodes
};

}  // namespace bbstop
