#pragma once

#include <vector>

#include "stowave/spectral.hpp"

namespace stowave {

/** Weighted high/low frequency splitting U_> f = sum_k w_k P_{>L_k} f.
 *
 * The weights (w_k) are a Lipschitz partition of unity subordinate to dyadic
 * annuli |x - center| ~ 2^k around the torus center (shell 0 is the core,
 * the outermost shell absorbs the remainder so the partition is exact).
 * Cutoffs follow the linear schedule L_k = L + k; P_{>L} projects onto
 * |kappa| > 2^L, sharp by default, smooth as an option.
 */
class LocalizationSchedule {
  public:
    enum class Cutoff { sharp, smooth };

    LocalizationSchedule(const TorusGrid& grid, double base_level, Cutoff cutoff = Cutoff::sharp);

    const TorusGrid& grid() const { return *grid_; }
    double base_level() const { return base_; }
    int shells() const { return static_cast<int>(weights_.size()); }
    const RealField& weight(int k) const { return weights_[k]; }
    double cutoff_level(int k) const { return base_ + k; }  // L_k
    Cutoff cutoff_kind() const { return cutoff_; }

    // spectral symbol of P_{> L_k} at |kappa| = r
    double high_symbol(int k, double r) const;

  private:
    const TorusGrid* grid_;
    double base_;
    Cutoff cutoff_;
    std::vector<RealField> weights_;
};

struct SplitField {
    RealField high;
    RealField low;
};

// high = sum_k w_k P_{>L_k} f, low = sum_k w_k P_{<=L_k} f; high + low = f.
SplitField split(const RealField& f, const LocalizationSchedule& sched);

// positive-regularity variant: high = (1-Delta)^{-1} U_> ((1-Delta) f), etc.
SplitField split_conjugated(const RealField& f, const LocalizationSchedule& sched);

struct DecayReport {
    std::vector<double> levels;      // L values
    std::vector<double> norms;       // measured Holder norms of U_> f at -alpha-delta
    double fitted_rate = 0.0;        // decay exponent per unit L (base 2)
    double delta = 0.0;
    bool pass = false;               // fitted_rate >= delta/2
};

// Measures || U_> f ||_{C^{-alpha-delta}} across base levels and fits the
// exponential decay rate in L.
DecayReport decay_check(const RealField& f, const std::vector<double>& levels, double alpha,
                        double delta, LocalizationSchedule::Cutoff cutoff = LocalizationSchedule::Cutoff::sharp);

} // namespace stowave
