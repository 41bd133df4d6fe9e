#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unordered_map>

#include "lflx/mollifier.hpp"
#include "lflx/quadrature.hpp"

namespace lflx {

namespace {

constexpr int kGaussOrder = 32;
constexpr int kBasePanels = 8;  // 8 x 32 = 256 nodes minimum
constexpr double kGaussianTheta = 0.5;

inline double bump_profile(double r) {
    if (r >= 1.0) return 0.0;
    return std::exp(-1.0 / (1.0 - r * r));
}

inline double sinc(double x) {
    if (std::fabs(x) < 1e-8) return 1.0 - x * x / 6.0;
    return std::sin(x) / x;
}

int panels_for(double s) {
    // keep each panel below ~24 radians of phase so GL32 stays spectral
    int p = kBasePanels + static_cast<int>(s / 24.0);
    return std::min(p, 512);
}

double bump_integral(int dim, double s) {
    const int panels = panels_for(s);
    if (dim == 2) {
        return gauss_integrate(
            [s](double r) { return bump_profile(r) * std::cyl_bessel_j(0.0, s * r) * r; }, 0.0,
            1.0, panels, kGaussOrder);
    }
    return gauss_integrate([s](double r) { return bump_profile(r) * sinc(s * r) * r * r; }, 0.0,
                           1.0, panels, kGaussOrder);
}

double bump_normalization(int dim) {
    // same quadrature as the s = 0 transform so that m(0) == 1 exactly
    static const double c2 = bump_integral(2, 0.0);
    static const double c3 = bump_integral(3, 0.0);
    return dim == 2 ? c2 : c3;
}

}  // namespace

double Mollifier::kernel_value(int dim, double r) const {
    if (kind_ == Kind::Gaussian) {
        const double t2 = kGaussianTheta * kGaussianTheta;
        return std::pow(kTwoPi * t2, -0.5 * dim) * std::exp(-r * r / (2.0 * t2));
    }
    const double surface = dim == 2 ? kTwoPi : 2.0 * kTwoPi;
    return bump_profile(r) / (surface * bump_normalization(dim));
}

double Mollifier::transform_value(int dim, double s) const {
    if (dim != 2 && dim != 3) throw std::invalid_argument("Mollifier: dim must be 2 or 3");
    if (kind_ == Kind::Gaussian) {
        const double t2 = kGaussianTheta * kGaussianTheta;
        return std::exp(-0.5 * t2 * s * s);
    }
    return bump_integral(dim, s) / bump_normalization(dim);
}

std::shared_ptr<const std::vector<double>> Mollifier::multiplier(const Grid& grid,
                                                                 double ell) const {
    if (!(ell > 0.0) || ell > kTwoPi)
        throw std::invalid_argument("Mollifier::multiplier: need 0 < ell <= 2*pi");
    const auto key = std::make_tuple(grid.dim(), grid.n(), ell);
    {
        std::lock_guard<std::mutex> lock(mu_);
        auto it = cache_.find(key);
        if (it != cache_.end()) return it->second;
    }

    const int n = grid.n();
    const int d = grid.dim();
    auto table = std::make_shared<std::vector<double>>(grid.points());
    std::unordered_map<std::int64_t, double> memo;  // keyed by integer |k|^2
    auto value = [&](std::int64_t k2) {
        auto it = memo.find(k2);
        if (it != memo.end()) return it->second;
        double v = transform_value(d, ell * std::sqrt(static_cast<double>(k2)));
        memo.emplace(k2, v);
        return v;
    };
    if (d == 2) {
        for (int i = 0; i < n; ++i) {
            const std::int64_t ki = grid.wavenumber(i);
            for (int j = 0; j < n; ++j) {
                const std::int64_t kj = grid.wavenumber(j);
                (*table)[static_cast<std::int64_t>(i) * n + j] = value(ki * ki + kj * kj);
            }
        }
    } else {
        for (int i = 0; i < n; ++i) {
            const std::int64_t ki = grid.wavenumber(i);
            for (int j = 0; j < n; ++j) {
                const std::int64_t kj = grid.wavenumber(j);
                for (int k = 0; k < n; ++k) {
                    const std::int64_t kk = grid.wavenumber(k);
                    (*table)[(static_cast<std::int64_t>(i) * n + j) * n + k] =
                        value(ki * ki + kj * kj + kk * kk);
                }
            }
        }
    }

    std::lock_guard<std::mutex> lock(mu_);
    auto [it, inserted] = cache_.emplace(key, table);
    return it->second;
}

}  // namespace lflx
