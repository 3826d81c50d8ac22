#pragma once

#include "stowave/hamiltonian.hpp"

namespace stowave {

/** Transformed-coordinate state; the physical pair is (e^{W_>}v, e^{W_>}p). */
struct WaveState {
    RealField v;
    RealField p;  // dv/dt
    double t = 0.0;
};

struct EvolveConfig {
    double dt = 0.0;       // derived from cfl when 0
    double cfl = 0.25;     // dt = cfl / omega_max, omega_max = pi sqrt(d) / h
    double T = 1.0;
    bool cubic = true;
    int record_stride = 10;
    bool keep_snapshots = false;

    double step_size(const TorusGrid& g) const;
};

struct EnergyTrace {
    std::vector<double> t;
    std::vector<double> E_R;
    std::vector<double> E_gg;
    std::vector<double> log_slope;  // slope of log E_gg between samples
};

struct EvolveResult {
    WaveState state;
    EnergyTrace trace;
    std::vector<WaveState> snapshots;  // populated when keep_snapshots
};

// acceleration in v-coordinates: A_R v - (cubic ? e^{2W_>} v^3 : 0)
RealField rhs(const WaveState& state, const TransformedOperator& op, const TruncationConfig& tr,
              const EvolveConfig& cfg);

// one Stormer-Verlet (kick-drift-kick) step; throws on non-finite state
WaveState step(const WaveState& state, const TransformedOperator& op, const TruncationConfig& tr,
               const EvolveConfig& cfg);

EvolveResult evolve(const WaveState& initial, const TransformedOperator& op,
                    const TruncationConfig& tr, const EvolveConfig& cfg);

// E^(R) = 1/2 int e^{2W}p^2 - 1/2 form_R(v) + (cubic) 1/4 int e^{4W}v^4
double energy_ER(const WaveState& state, const TransformedOperator& op,
                 const TruncationConfig& tr, const EvolveConfig& cfg);

// E_>> = E^(R) + 1/2 int e^{2W}(C_gg + chi Z_<=) v^2; nonnegative once C_gg
// is calibrated -- values below -1e-8 throw (calibration broken).
double energy_Egg(const WaveState& state, const TransformedOperator& op,
                  const TruncationConfig& tr, const EvolveConfig& cfg);

struct GronwallReport {
    double K_fit = 0.0;        // max observed log-slope of E_gg
    double bound_scale = 0.0;  // ||C_gg + chi Z_<=||_inf
    double min_E_gg = 0.0;
    bool slope_pass = false;   // K_fit <= 4 * bound_scale
    bool positive_pass = false;
    bool envelope_pass = false;  // E_gg(t) <= e^{K_fit t} E_gg(0) (1 + 1e-6)
    bool pass = false;
};

GronwallReport gronwall_check(const EnergyTrace& trace, const TransformedOperator& op,
                              const TruncationConfig& tr);

/** Dense mild-solution oracle on tiny grids (<= 24^d points).
 *
 * Assembles the quadratic-form matrix of -H_>> and the weighted mass matrix
 * B = diag(e^{2W_>} h^d), solves the generalized symmetric eigenproblem, and
 * runs Picard iteration on the Duhamel formula with integrand
 * u^3 + u Xi^R_<= using composite-Simpson quadrature in time. The horizon is
 * halved and the solves composed when the iteration fails to contract.
 */
WaveState duhamel_oracle(const WaveState& initial, const TransformedOperator& op,
                         const TruncationConfig& tr, const EvolveConfig& cfg,
                         double picard_tol = 1e-10, int quad_points = 512);

} // namespace stowave
