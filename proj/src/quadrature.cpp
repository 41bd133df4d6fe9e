#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>

#include "lflx/quadrature.hpp"

namespace lflx {

namespace {

double seg_38(std::span<const double> t, std::span<const double> y, std::size_t i0) {
    // 3/8 rule over intervals [i0, i0+3]
    const double h = (t[i0 + 3] - t[i0]) / 3.0;
    return 3.0 * h / 8.0 * (y[i0] + 3.0 * y[i0 + 1] + 3.0 * y[i0 + 2] + y[i0 + 3]);
}

double seg_simpson(std::span<const double> t, std::span<const double> y, std::size_t i0) {
    // Simpson over intervals [i0, i0+2]
    const double h = (t[i0 + 2] - t[i0]) / 2.0;
    return h / 3.0 * (y[i0] + 4.0 * y[i0 + 1] + y[i0 + 2]);
}

}  // namespace

double simpson(std::span<const double> t, std::span<const double> y) {
    if (t.size() != y.size()) throw std::invalid_argument("simpson: size mismatch");
    const std::size_t m = t.size();
    if (m < 2) return 0.0;
    if (m == 2) return 0.5 * (t[1] - t[0]) * (y[0] + y[1]);
    const std::size_t nint = m - 1;
    double s = 0.0;
    std::size_t i = 0;
    std::size_t even_end = nint % 2 == 0 ? nint : nint - 3;
    for (; i + 2 <= even_end; i += 2) s += seg_simpson(t, y, i);
    if (nint % 2 != 0) s += seg_38(t, y, nint - 3);
    return s;
}

std::vector<double> cumulative_simpson(std::span<const double> t, std::span<const double> y) {
    if (t.size() != y.size()) throw std::invalid_argument("cumulative_simpson: size mismatch");
    const std::size_t m = t.size();
    std::vector<double> cum(m, 0.0);
    if (m < 2) return cum;
    cum[1] = 0.5 * (t[1] - t[0]) * (y[0] + y[1]);
    for (std::size_t i = 2; i < m; ++i) {
        if (i % 2 == 0) {
            cum[i] = cum[i - 2] + seg_simpson(t, y, i - 2);
        } else if (i >= 3) {
            cum[i] = cum[i - 3] + seg_38(t, y, i - 3);
        }
    }
    return cum;
}

std::vector<double> simpson_weights(std::span<const double> t) {
    const std::size_t m = t.size();
    std::vector<double> w(m, 0.0);
    if (m < 2) return w;
    if (m == 2) {
        w[0] = w[1] = 0.5 * (t[1] - t[0]);
        return w;
    }
    const std::size_t nint = m - 1;
    std::size_t even_end = nint % 2 == 0 ? nint : nint - 3;
    for (std::size_t i = 0; i + 2 <= even_end; i += 2) {
        const double h = (t[i + 2] - t[i]) / 2.0;
        w[i] += h / 3.0;
        w[i + 1] += 4.0 * h / 3.0;
        w[i + 2] += h / 3.0;
    }
    if (nint % 2 != 0) {
        const std::size_t i0 = nint - 3;
        const double h = (t[i0 + 3] - t[i0]) / 3.0;
        w[i0] += 3.0 * h / 8.0;
        w[i0 + 1] += 9.0 * h / 8.0;
        w[i0 + 2] += 9.0 * h / 8.0;
        w[i0 + 3] += 3.0 * h / 8.0;
    }
    return w;
}

const GaussRule& gauss_legendre(int order) {
    static std::mutex mu;
    static std::map<int, GaussRule> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(order);
    if (it != cache.end()) return it->second;

    GaussRule rule;
    rule.nodes.resize(order);
    rule.weights.resize(order);
    const int half = (order + 1) / 2;
    for (int i = 0; i < half; ++i) {
        // Newton iteration from the Chebyshev estimate of the i-th root
        double x = std::cos(M_PI * (i + 0.75) / (order + 0.5));
        double pp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = 0.0;
            for (int j = 0; j < order; ++j) {
                double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j + 1.0) * x * p1 - j * p2) / (j + 1.0);
            }
            pp = order * (x * p0 - p1) / (x * x - 1.0);
            double dx = p0 / pp;
            x -= dx;
            if (std::fabs(dx) < 1e-15) break;
        }
        rule.nodes[i] = -x;
        rule.nodes[order - 1 - i] = x;
        const double w = 2.0 / ((1.0 - x * x) * pp * pp);
        rule.weights[i] = w;
        rule.weights[order - 1 - i] = w;
    }
    return cache.emplace(order, std::move(rule)).first->second;
}

}  // namespace lflx
