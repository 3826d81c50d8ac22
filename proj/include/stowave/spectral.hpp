#pragma once

#include <functional>
#include <string>

#include "stowave/field.hpp"

namespace stowave {

/** Scalar Fourier symbol kappa -> m(kappa) with a descriptive name.
 *  The symbol receives |kappa|^2 and the frequency vector; it must be finite
 *  on the grid's frequency set.
 */
struct FourierMultiplier {
    std::string name;
    std::function<double(double kabs2, const std::array<double, 3>& k)> symbol;

    static FourierMultiplier identity();
    static FourierMultiplier helmholtz_inverse();  // 1/(1+|kappa|^2)
    static FourierMultiplier one_minus_laplacian();
};

// Forward/inverse transforms. forward_transform rejects non-finite input.
SpectralCoeffs forward_transform(const RealField& f);
RealField inverse_transform(const SpectralCoeffs& c);

SpectralCoeffs apply_multiplier(const SpectralCoeffs& c, const FourierMultiplier& m);
RealField apply_multiplier(const RealField& f, const FourierMultiplier& m);

// Spectral derivatives. Component j has symbol i*kappa_j; the symbol is set
// to zero on Nyquist planes so derivatives of real fields are real.
std::vector<RealField> gradient(const RealField& f);
RealField divergence(const std::vector<RealField>& g);
// Laplacian realized as div(grad(.)) so that the two compose exactly.
RealField laplacian(const RealField& f);

// Quadrature: h^d * sum of values.
double integrate(const RealField& f);
double inner(const RealField& f, const RealField& g);  // h^d * sum f*g
double l2_norm(const RealField& f);

// Littlewood-Paley blocks. Smooth dyadic annulus projectors built from a
// fixed quintic polynomial cutoff; annulus ratio 2. Block j = -1 holds
// frequencies |kappa| <= 1. Blocks -1..max_lp_block(grid) reconstruct the
// identity exactly on the represented frequencies.
RealField lp_block(const RealField& f, int j);
int max_lp_block(const TorusGrid& g);
// the radial cutoff profile: 1 on [0,1], 0 on [2,inf), quintic in between
double lp_cutoff(double r);

// 2/3-rule dealiasing: zero all modes with |k_j| > n/3 on some axis.
SpectralCoeffs dealias(const SpectralCoeffs& c);
RealField dealias(const RealField& f);

// Pointwise operations. Products of spectral-origin fields should pass
// dealias_product = true (2/3 truncation applied to the product).
RealField pointwise_product(const RealField& f, const RealField& g, bool dealias_product = false);
// exp(f); rejects inputs with |f| > 700 (would overflow silently otherwise)
RealField pointwise_exp(const RealField& f);
RealField pointwise_power(const RealField& f, int p);

// Deterministic auxiliary fields used by calibration routines and tests.
// Smooth random field: Gaussian spectral coefficients with an exp(-|k|^2/2kc^2)
// envelope, truncated to the dealias band, unit L2 norm.
RealField random_smooth_field(const TorusGrid& g, uint64_t seed, double corr_scale = 0.0);
// Compactly supported radial bump (quintic edge) of inner/outer radius at a point.
RealField radial_bump(const TorusGrid& g, const std::array<double, 3>& center, double r_inner,
                      double r_outer, double amplitude = 1.0);
// Gaussian of width sigma truncated at 5*sigma (spectrally clean compact data:
// the jump at the cut is exp(-12.5) of the peak).
RealField gaussian_blob(const TorusGrid& g, const std::array<double, 3>& center, double sigma,
                        double amplitude = 1.0);

} // namespace stowave
