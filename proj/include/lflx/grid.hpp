#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>

namespace lflx {

inline constexpr double kTwoPi = 6.283185307179586476925286766559;

/// Uniform periodic collocation grid on [0, 2*pi)^dim.
///
/// The box side is fixed to 2*pi so wavenumbers are integers; per axis the
/// retained wavenumbers are the integers in [-n/2, n/2).
class Grid {
  public:
    Grid(int dim, int n) : dim_(dim), n_(n) {
        if (dim != 2 && dim != 3)
            throw std::invalid_argument("Grid: dim must be 2 or 3");
        if (n < 8 || (n & (n - 1)) != 0)
            throw std::invalid_argument("Grid: n must be a power of two >= 8");
        points_ = 1;
        for (int a = 0; a < dim; ++a) points_ *= n;
    }

    int dim() const { return dim_; }
    int n() const { return n_; }
    std::int64_t points() const { return points_; }

    double spacing() const { return kTwoPi / n_; }
    double cell_volume() const {
        double v = 1.0;
        for (int a = 0; a < dim_; ++a) v *= spacing();
        return v;
    }
    double volume() const {
        double v = 1.0;
        for (int a = 0; a < dim_; ++a) v *= kTwoPi;
        return v;
    }

    /// Signed integer wavenumber for a storage index along one axis.
    int wavenumber(int index) const { return index < n_ / 2 ? index : index - n_; }

    /// 2/3-rule cutoff: modes with any |k_axis| > cutoff are aliased garbage
    /// after a pseudo-spectral product and get truncated.
    int dealias_cutoff() const { return n_ / 3; }

    bool operator==(const Grid& o) const { return dim_ == o.dim_ && n_ == o.n_; }
    bool operator!=(const Grid& o) const { return !(*this == o); }

  private:
    int dim_;
    int n_;
    std::int64_t points_;
};

}  // namespace lflx
