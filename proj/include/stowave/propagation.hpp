#pragma once

#include "stowave/dynamics.hpp"

namespace stowave {

/** The Lipschitz profile psi: 1 on (-inf,0], 1-r on [0,1], 0 on [1,inf),
 *  and the propagation speed used throughout. */
struct BumpProfile {
    static constexpr double speed = 2.0;
    static double psi(double r);
};

/** Backward cone at apex (t, x): {(s,y): 0 <= s <= t, |y-x| <= 2(t-s)}. */
struct ConeSpec {
    double t = 0.0;
    std::array<double, 3> x = {0.0, 0.0, 0.0};
};

// phi(y) = psi(|y - x| - 2(t - s)); rejects bumps whose support would wrap
// around the torus (2(t-s) + 1 > M/2).
RealField bump_field(const ConeSpec& cone, double s, const TorusGrid& grid);

struct BumpDerivativeReport {
    double max_err_interior = 0.0;   // | |grad phi|_fd - (1/2)|dphi/ds|_fd | away from kinks
    double max_err_indicator = 0.0;  // | |grad phi|_fd - chi_annulus | away from kinks
    double mismatch_measure = 0.0;   // area where the indicator match fails by > 0.5
};

BumpDerivativeReport bump_derivative_identity_check(const ConeSpec& cone, double s,
                                                    const TorusGrid& grid);

// e_{(t,x)}(s) = int phi 1/2 e^{2W}(p^2 + |grad v|^2 + C v^2 - v^2 Z_>),
// with the Z_> term evaluated as the grid pairing <phi e^{2W} Z_>, v^2>.
double local_energy(const WaveState& state, const TransformedOperator& op, const ConeSpec& cone,
                    double C_local);

// Smallest C (floor 1, factor-2 bisection, then doubled for margin) with
//   int phi e^{2W}(1/4 |grad v|^2 + C v^2) >= |<phi e^{2W} Z_>, v^2>|
// over n_samples random localized fields and the given cones.
double calibrate_local_constant(const TransformedOperator& op, const std::vector<ConeSpec>& cones,
                                int n_samples = 200, uint64_t seed = 0xca1);

struct LocalEnergyTrace {
    ConeSpec apex;
    std::vector<double> s;
    std::vector<double> e;
    double K_fit = 0.0;          // max log-slope between samples
    double bound_scale = 0.0;    // ||chi_{B(R)} Z_<=||_inf + C_local
    double min_e = 0.0;
    bool positive_pass = false;
    bool envelope_pass = false;  // e(s) <= e^{K_fit s} e(0) (1 + 1e-6)
    bool pass = false;
};

LocalEnergyTrace gronwall_local_check(const std::vector<WaveState>& snapshots,
                                      const TransformedOperator& op, const TruncationConfig& tr,
                                      const ConeSpec& cone, double C_local);

struct ConeReport {
    double L = 0.0;
    double R = 0.0;
    double sup_inside = 0.0;      // sup over admissible cone points of |u_R - u_L|
    double max_ref = 0.0;         // max |u^{(L)}| over the run
    double tol = 0.0;             // tol_cone = rel_tol * max_ref
    double outside_diff = 0.0;    // sup outside B(L) at the final time
    LocalEnergyTrace diff_trace;  // local energy of b = v_R - v_L
    bool inside_pass = false;
    bool power_pass = false;      // outside_diff > 10 * tol
    bool pass = false;
};

// Evolves the same data under truncations R >= L on one lift and compares
// the physical fields over every backward cone contained in [0, L/2] x B(L).
ConeReport cone_agreement(const RealField& v0, const RealField& p0, const TransformedOperator& op,
                          double R, double L, const EvolveConfig& cfg, double C_gg,
                          double C_local, double rel_tol = 1e-6);

struct SupportControlReport {
    std::vector<double> t;
    std::vector<double> mass_ratio;  // mass outside B(x0, r0 + t + 3h) / total mass
    double worst = 0.0;
    bool pass = false;  // worst <= 1e-8
};

// Zero-noise control: compactly supported data stay inside the unit-speed
// support (plus a 3h collar) up to time T.
SupportControlReport classical_speed_check(const WaveState& initial,
                                           const std::array<double, 3>& support_center,
                                           double support_radius, const TransformedOperator& op,
                                           const TruncationConfig& tr, const EvolveConfig& cfg);

// Compactly supported mean-zero data profile (difference of two nested bumps)
// for the classical-speed and cone controls.
RealField mean_zero_bump(const TorusGrid& g, const std::array<double, 3>& center, double r0,
                         double amplitude = 1.0);

} // namespace stowave
