#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "stowave/spectral.hpp"

namespace stowave {

/** Radial spectral smoothing kernel at scale eps.
 *
 * The mollified symbol is etahat(eps*|kappa|) with etahat(0) = 1, etahat
 * decreasing and etahat(r) = 0 for r >= 1 (a fixed quintic polynomial bump),
 * so a mollified field is band-limited to |kappa| < 1/eps. eps == 0 is the
 * identity (grid-cutoff regularization only), used by the regularity
 * diagnostics that refine the grid.
 */
struct Mollifier {
    double eps = 0.0;

    static double profile(double r);  // etahat
    double symbol(double kabs) const { return eps == 0.0 ? 1.0 : profile(eps * kabs); }
};

/** One sample of spatial white noise on the grid.
 *
 * Spectral coefficients are independent Gaussians per +/- frequency pair
 * with E|xi_hat(kappa)|^2 = 1/M^d and nothing on the Nyquist planes, which
 * gives the defining covariance E<xi,phi><xi,psi> = <phi,psi>_{L2} for test
 * functions supported on the represented frequencies. Draws are keyed by
 * (seed, integer frequency vector), so refining the grid keeps every shared
 * mode identical.
 */
struct NoiseRealization {
    uint64_t seed = 0;
    const TorusGrid* grid = nullptr;
    RealField xi;
};

NoiseRealization sample_white_noise(uint64_t seed, const TorusGrid& grid);

/** Wick constants for one (grid, eps) pair. */
struct RenormConstants {
    int d = 0;
    double eps = 0.0;
    double side = 0.0;
    double a = 0.0;       // E |grad X_eps(x)|^2, exact mode sum
    double b = 0.0;       // E |grad X2_eps(x)|^2, Monte Carlo (d = 3)
    double b_se = 0.0;    // standard error of b
    int b_samples = 0;
};

// a_eps = M^{-d} sum_{kappa} |kappa|^2 etahat(eps|kappa|)^2 / (1+|kappa|^2)^2,
// summed over the represented noise frequencies (Nyquist planes excluded).
double renorm_constant_a(const Mollifier& m, const TorusGrid& grid);

// b_eps by Monte Carlo over n_seeds independent noise samples (d = 3 only);
// throws if the standard error exceeds 5% of the estimate.
RenormConstants renorm_constant_b(const Mollifier& m, const TorusGrid& grid, int n_seeds = 200,
                                  uint64_t seed_base = 0xb000, int threads = 1);

/** The renormalized noise objects of one realization.
 *
 * X solves (1-Delta)X = xi_eps; wick_grad_x_sq = |grad X|^2 - a_eps;
 * X2 = (1-Delta)^{-1} wick_grad_x_sq. In d = 3 additionally
 * X3 = 2(1-Delta)^{-1}(grad X . grad X2), wick_grad_x2_sq = |grad X2|^2 - b_eps,
 * cross = grad X . grad X3, and W = X + X2 + X3; in d = 2, W = X.
 * Quadratic combinations of multiplier-chain fields are 2/3-dealiased.
 */
struct StochasticLift {
    int d = 0;
    double eps = 0.0;
    uint64_t seed = 0;
    const TorusGrid* grid = nullptr;
    RenormConstants consts;

    RealField X;
    RealField X2;               // X^{flower}
    RealField X3;               // X^{tree}, d = 3
    RealField wick_grad_x_sq;   // :|grad X|^2:
    RealField wick_grad_x2_sq;  // :|grad X2|^2:, d = 3
    RealField cross;            // grad X . grad X3, d = 3
    RealField W;
};

StochasticLift build_lift(const NoiseRealization& noise, const Mollifier& m,
                          std::optional<RenormConstants> consts = std::nullopt);

// per-epsilon ensemble statistics of <object, phi> with noise coupled by seed
struct ConvergenceStudy {
    std::vector<double> eps;
    std::vector<double> a;                  // a_eps per level
    std::vector<double> mean_unrenorm;      // <|grad X_eps|^2, phi>
    std::vector<double> se_unrenorm;
    std::vector<double> mean_wick;          // <:|grad X_eps|^2:, phi>
    std::vector<double> se_wick;
    std::vector<double> cauchy_diff;        // mean |pairing(eps_i) - pairing(eps_{i+1})|
    std::vector<double> coupled_l2_diff;    // mean ||X_eps - X_{eps/2}||_L2
};

ConvergenceStudy convergence_study(const TorusGrid& grid, const std::vector<double>& eps_seq,
                                   const RealField& phi, int n_seeds, uint64_t seed_base = 1,
                                   int threads = 1);

} // namespace stowave
