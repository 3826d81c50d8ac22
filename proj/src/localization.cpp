#include "stowave/localization.hpp"

#include <cmath>
#include <stdexcept>

#include "stowave/besov.hpp"

namespace stowave {

LocalizationSchedule::LocalizationSchedule(const TorusGrid& grid, double base_level, Cutoff cutoff)
    : grid_(&grid), base_(base_level), cutoff_(cutoff) {
    // shell boundaries at radii 2^k; the last shell covers out to the torus
    // diameter so the hats sum to one everywhere
    const double maxdist = 0.5 * grid.side() * std::sqrt(static_cast<double>(grid.dim()));
    int shells = 1;
    while (std::pow(2.0, shells - 1) < maxdist) ++shells;

    auto hat = [shells](int k, double r) {
        // piecewise-linear in r: shell 0 is 1 on [0,1] ramping to 0 at 2,
        // shell k peaks at 2^k, the last shell stays 1 beyond its peak
        const double peak = std::pow(2.0, k);
        if (k == 0) {
            if (r <= 1.0) return 1.0;
            return r >= 2.0 ? 0.0 : 2.0 - r;
        }
        const double lo = 0.5 * peak, hi = 2.0 * peak;
        if (r <= lo) return 0.0;
        if (r <= peak) return (r - lo) / (peak - lo);
        if (k + 1 == shells) return 1.0;
        return r >= hi ? 0.0 : (hi - r) / (hi - peak);
    };

    auto cen = grid.center();
    for (int k = 0; k < shells; ++k) {
        RealField w(grid);
        for (std::size_t i = 0; i < grid.size(); ++i) {
            auto cs = grid.coords(i);
            std::array<double, 3> x = {0, 0, 0};
            for (int j = 0; j < grid.dim(); ++j) x[j] = grid.coord(cs[j]);
            w[i] = hat(k, grid.torus_dist(x, cen));
        }
        weights_.push_back(std::move(w));
    }
}

double LocalizationSchedule::high_symbol(int k, double r) const {
    const double cut = std::pow(2.0, cutoff_level(k));
    if (cutoff_ == Cutoff::sharp) return r > cut ? 1.0 : 0.0;
    return 1.0 - lp_cutoff(r / cut);
}

SplitField split(const RealField& f, const LocalizationSchedule& sched) {
    const TorusGrid& g = sched.grid();
    if (!(g == *f.grid)) throw std::invalid_argument("split: field not on schedule grid");
    SplitField out{RealField(g), RealField(g)};
    for (int k = 0; k < sched.shells(); ++k) {
        FourierMultiplier hp{"P_>", [&sched, k](double k2, const std::array<double, 3>&) {
                                 return sched.high_symbol(k, std::sqrt(k2));
                             }};
        RealField hi = apply_multiplier(f, hp);
        RealField lo = f - hi;
        out.high += pointwise_product(sched.weight(k), hi);
        out.low += pointwise_product(sched.weight(k), lo);
    }
    return out;
}

SplitField split_conjugated(const RealField& f, const LocalizationSchedule& sched) {
    auto lifted = apply_multiplier(f, FourierMultiplier::one_minus_laplacian());
    auto sp = split(lifted, sched);
    SplitField out;
    out.high = apply_multiplier(sp.high, FourierMultiplier::helmholtz_inverse());
    out.low = apply_multiplier(sp.low, FourierMultiplier::helmholtz_inverse());
    return out;
}

DecayReport decay_check(const RealField& f, const std::vector<double>& levels, double alpha,
                        double delta, LocalizationSchedule::Cutoff cutoff) {
    if (!(alpha > 0.0) || !(delta > 0.0))
        throw std::invalid_argument("decay_check: alpha, delta must be positive");
    DecayReport rep;
    rep.levels = levels;
    rep.delta = delta;
    for (double L : levels) {
        LocalizationSchedule sched(*f.grid, L, cutoff);
        auto sp = split(f, sched);
        rep.norms.push_back(holder_norm(sp.high, -alpha - delta));
    }
    // least-squares slope of log2(norm) against L; vacuous pass when the high
    // part is identically zero at every level
    bool all_zero = true;
    for (double n : rep.norms)
        if (n > 0.0) all_zero = false;
    if (all_zero) {
        rep.fitted_rate = INFINITY;
        rep.pass = true;
        return rep;
    }
    const std::size_t m = levels.size();
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < m; ++i) {
        const double x = levels[i], y = std::log2(rep.norms[i]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
    rep.fitted_rate = -slope;
    rep.pass = rep.fitted_rate >= 0.5 * delta;
    return rep;
}

} // namespace stowave
