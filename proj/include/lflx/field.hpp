#pragma once

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "lflx/grid.hpp"

namespace lflx {

using cplx = std::complex<double>;

/// Periodic field stored as a full complex Fourier spectrum,
/// f(x) = sum_k coeff(k) exp(i k.x), one spectrum per component.
///
/// Real-valued fields keep Hermitian symmetry coeff(-k) = conj(coeff(k));
/// hermitian_symmetrize() re-enforces it after nonlinear operations.
/// Storage is component-contiguous, row-major in the wavevector indices
/// (last axis fastest).
class SpectralField {
  public:
    SpectralField(const Grid& grid, int components)
        : grid_(grid), ncomp_(components),
          coef_(static_cast<std::size_t>(components) * grid.points()) {
        if (components < 1) throw std::invalid_argument("SpectralField: components < 1");
    }

    const Grid& grid() const { return grid_; }
    int components() const { return ncomp_; }
    std::int64_t points() const { return grid_.points(); }

    cplx* comp(int c) { return coef_.data() + static_cast<std::size_t>(c) * grid_.points(); }
    const cplx* comp(int c) const {
        return coef_.data() + static_cast<std::size_t>(c) * grid_.points();
    }

    cplx& at(int c, std::int64_t idx) { return comp(c)[idx]; }
    const cplx& at(int c, std::int64_t idx) const { return comp(c)[idx]; }

    std::vector<cplx>& raw() { return coef_; }
    const std::vector<cplx>& raw() const { return coef_; }

    void fill_zero() { coef_.assign(coef_.size(), cplx(0.0, 0.0)); }

  private:
    Grid grid_;
    int ncomp_;
    std::vector<cplx> coef_;
};

/// Collocation-lattice view of a real field: one value per grid point and
/// component, same layout conventions as SpectralField.
class RealField {
  public:
    RealField(const Grid& grid, int components)
        : grid_(grid), ncomp_(components),
          val_(static_cast<std::size_t>(components) * grid.points(), 0.0) {
        if (components < 1) throw std::invalid_argument("RealField: components < 1");
    }

    const Grid& grid() const { return grid_; }
    int components() const { return ncomp_; }
    std::int64_t points() const { return grid_.points(); }

    double* comp(int c) { return val_.data() + static_cast<std::size_t>(c) * grid_.points(); }
    const double* comp(int c) const {
        return val_.data() + static_cast<std::size_t>(c) * grid_.points();
    }

    double& at(int c, std::int64_t idx) { return comp(c)[idx]; }
    double at(int c, std::int64_t idx) const { return comp(c)[idx]; }

    std::vector<double>& raw() { return val_; }
    const std::vector<double>& raw() const { return val_; }

  private:
    Grid grid_;
    int ncomp_;
    std::vector<double> val_;
};

}  // namespace lflx
