#pragma once

#include <array>
#include <vector>

#include "lflx/field.hpp"

namespace lflx {

/// Inverse transform to collocation samples (imaginary residue discarded).
RealField to_real(const SpectralField& f);

/// Forward transform; output is Hermitian-symmetrized so the field is
/// exactly real-valued and the mean mode exactly real.
SpectralField to_spectral(const RealField& v);

void hermitian_symmetrize(SpectralField& f);

/// Spectral derivative along one axis: coeff(k) *= i*k_axis.
/// The Nyquist plane k_axis = -n/2 is zeroed (it has no conjugate partner).
SpectralField derivative(const SpectralField& f, int axis);

SpectralField laplacian(const SpectralField& f);

/// L2-orthogonal projection onto divergence-free fields,
/// coeff(k) -= k (k . coeff(k)) / |k|^2; mean mode untouched.
SpectralField leray_project(const SpectralField& u);
void leray_project_inplace(SpectralField& u);

/// 2/3-rule truncation: zero every mode with any |k_axis| > n/3.
SpectralField dealias(const SpectralField& f);
void dealias_inplace(SpectralField& f);

/// L^p norm over the torus by equal-weight collocation quadrature
/// (pointwise Euclidean magnitude for multi-component fields).
/// p = infinity gives the max norm. Throws for p < 1.
double lp_norm(const RealField& v, double p);
double lp_norm(const SpectralField& f, double p);

/// L^2 norm by Parseval: sqrt((2*pi)^d * sum_k |coeff|^2).
double l2_norm_spectral(const SpectralField& f);

/// L^2 inner product over the torus via Parseval (component-summed).
double inner_product(const SpectralField& a, const SpectralField& b);

/// max_k |k . coeff(k)|, the spectral divergence residual.
double max_divergence(const SpectralField& u);

/// Max pointwise Euclidean magnitude on the collocation lattice.
double max_magnitude(const RealField& v);

/// Zero-embed the spectrum into a finer grid (same dim, larger n).
SpectralField pad_spectrum(const SpectralField& f, const Grid& fine);

/// Pick every (n_fine/n_coarse)-th collocation point.
RealField subsample(const RealField& fine, const Grid& coarse);

/// out(x) = in(x + offset*h), lattice-exact circular shift.
RealField circular_shift(const RealField& v, const std::array<int, 3>& offset);

/// |k|^2 per flat mode index.
std::vector<double> mode_k2_table(const Grid& g);

/// Pseudo-spectral tensor product with sharp 2/3 truncation:
/// component (i*d + j) holds T_K[(g_i h_j)]^hat. This is the product the
/// solver's nonlinearity and the budget analyzers share.
SpectralField product_tensor_dealiased(const SpectralField& g, const SpectralField& h);

// small arithmetic helpers
void axpy(SpectralField& y, double a, const SpectralField& x);  // y += a*x
void scale(SpectralField& f, double a);

}  // namespace lflx
