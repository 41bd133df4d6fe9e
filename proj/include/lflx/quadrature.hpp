#pragma once

#include <span>
#include <vector>

namespace lflx {

/// Composite Simpson on uniformly spaced samples; an odd interval count is
/// closed with the 3/8 rule on the last three intervals. Two samples fall
/// back to the trapezoid, fewer return 0.
double simpson(std::span<const double> t, std::span<const double> y);

/// Running integral with the same O(h^4) construction at every even index;
/// odd indices use Simpson up to i-3 plus the 3/8 rule (i = 1: trapezoid).
std::vector<double> cumulative_simpson(std::span<const double> t, std::span<const double> y);

/// Per-sample weights w so that simpson(t, y) == sum_i w[i] y[i].
std::vector<double> simpson_weights(std::span<const double> t);

/// Gauss-Legendre nodes/weights on [-1, 1], cached per order.
struct GaussRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};
const GaussRule& gauss_legendre(int order);

/// Composite Gauss-Legendre integral of f over [a, b] with `panels` panels
/// of `order` points each.
template <class F>
double gauss_integrate(F&& f, double a, double b, int panels, int order) {
    const GaussRule& rule = gauss_legendre(order);
    const double h = (b - a) / panels;
    double total = 0.0;
    for (int p = 0; p < panels; ++p) {
        const double mid = a + (p + 0.5) * h;
        double s = 0.0;
        for (std::size_t q = 0; q < rule.nodes.size(); ++q)
            s += rule.weights[q] * f(mid + 0.5 * h * rule.nodes[q]);
        total += 0.5 * h * s;
    }
    return total;
}

}  // namespace lflx
