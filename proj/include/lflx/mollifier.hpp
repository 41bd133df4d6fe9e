#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <tuple>
#include <vector>

#include "lflx/grid.hpp"

namespace lflx {

/// Radial coarse-graining kernel G and its Fourier multiplier tables.
///
/// Bump: G(x) = exp(-1/(1-|x|^2)) on |x| < 1, zero outside, normalized to
/// unit mass over the d-dimensional unit ball. Filtering at scale ell uses
/// the dilation G_ell(x) = ell^-d G(x/ell); on the torus the multiplier of
/// the periodized kernel equals the full-space radial transform evaluated
/// at ell*|k| (exact by unfolding the periodization), so no periodization
/// error enters for any ell.
///
/// Gaussian: exp(-|x|^2/(2 theta^2)) with theta = 1/2, unit mass. Provided
/// for cross-checks only; it has no compact support, so it does not conform
/// to the kernel class the estimates assume.
class Mollifier {
  public:
    enum class Kind { Bump, Gaussian };

    explicit Mollifier(Kind kind = Kind::Bump) : kind_(kind) {}

    Kind kind() const { return kind_; }

    /// Unit-scale normalized kernel value at radius r.
    double kernel_value(int dim, double r) const;

    /// Radial Fourier transform profile m(s) with s = ell*|k|; m(0) = 1
    /// exactly. Bump values come from composite Gauss-Legendre quadrature
    /// (>= 256 nodes, more for oscillatory s) to ~1e-12 absolute.
    double transform_value(int dim, double s) const;

    /// Per-mode multiplier table for (grid, ell), cached. Safe for
    /// concurrent readers; duplicate computation on a cache miss race is
    /// accepted. Throws unless 0 < ell <= 2*pi.
    std::shared_ptr<const std::vector<double>> multiplier(const Grid& grid, double ell) const;

  private:
    Kind kind_;
    mutable std::mutex mu_;
    mutable std::map<std::tuple<int, int, double>, std::shared_ptr<const std::vector<double>>>
        cache_;
};

}  // namespace lflx
