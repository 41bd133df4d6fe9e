#pragma once

#include <array>
#include <cstdint>

#include "lflx/field.hpp"

namespace lflx {

/// Deterministic generators; identical spec => bit-identical coefficients.
struct SyntheticSpec {
    enum class Kind { RandomBesov, SingleMode, Shear, TaylorGreen };
    Kind kind = Kind::RandomBesov;
    double sigma = 0.5;       // increment regularity target (RandomBesov)
    std::uint64_t seed = 1;
    int k_min = 1;
    int k_max = 0;            // 0 -> n/3
    double amplitude = 1.0;   // L2 norm of the result
    std::array<int, 3> k{1, 0, 0};  // SingleMode wavevector
    int axis = 1;                   // SingleMode component
};

/// Isotropic random-phase solenoidal field with shell energy spectrum
/// E(k) ~ k^-(2*sigma+1) over [k_min, k_max], normalized to L2 norm
/// `amplitude`. Ensemble-mean S_2(r) then scales like r^(2*sigma) inside
/// [2*pi/k_max, 2*pi/k_min]. Phases come from SplitMix64 streams; the
/// amplitude profile is deterministic so the spectrum is exact up to
/// shell binning.
SpectralField random_besov_field(const Grid& grid, const SyntheticSpec& spec);

/// u = (sin x cos y, -cos x sin y) in 2D; the same cellular flow times
/// cos z with a zero third component in 3D.
SpectralField taylor_green(const Grid& grid);

/// u = (sin y, 0[, 0]).
SpectralField shear(const Grid& grid);

/// Single trigonometric mode: component `axis` = amplitude * sin(k.x).
/// Requires k[axis] == 0 so the field is solenoidal.
SpectralField single_mode(const Grid& grid, const std::array<int, 3>& k, int axis,
                          double amplitude = 1.0);

SpectralField synthesize(const Grid& grid, const SyntheticSpec& spec);

/// Shell-summed kinetic energy, bin s = floor(|k|): E[s] = 1/2 sum (2pi)^d |u_hat|^2,
/// together with the energy-weighted mean |k| and mode count per bin.
struct ShellSpectrum {
    std::vector<double> energy;
    std::vector<double> mean_k;
    std::vector<double> count;
};
ShellSpectrum shell_energy(const SpectralField& u);

}  // namespace lflx
