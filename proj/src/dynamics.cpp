#include "stowave/dynamics.hpp"

#include <cmath>
#include <stdexcept>

namespace stowave {

double EvolveConfig::step_size(const TorusGrid& g) const {
    if (dt != 0.0) return dt;  // negative dt runs the reversible step backwards
    if (!(cfl > 0.0) || cfl > 0.5)
        throw std::invalid_argument("EvolveConfig: cfl must be in (0, 0.5]");
    const double omega_max = M_PI * std::sqrt(static_cast<double>(g.dim())) / g.spacing();
    return cfl / omega_max;
}

RealField rhs(const WaveState& state, const TransformedOperator& op, const TruncationConfig& tr,
              const EvolveConfig& cfg) {
    RealField a = apply_H_in_v(state.v, op, tr, Variant::trunc);
    if (cfg.cubic) {
        for (std::size_t i = 0; i < a.size(); ++i) {
            const double vi = state.v[i];
            a[i] -= op.exp2W[i] * vi * vi * vi;
        }
    }
    return a;
}

WaveState step(const WaveState& state, const TransformedOperator& op, const TruncationConfig& tr,
               const EvolveConfig& cfg) {
    const double dt = cfg.step_size(*op.grid);
    WaveState next;
    next.t = state.t + dt;
    RealField a = rhs(state, op, tr, cfg);
    next.p = state.p;
    for (std::size_t i = 0; i < a.size(); ++i) next.p[i] += 0.5 * dt * a[i];
    next.v = state.v;
    for (std::size_t i = 0; i < a.size(); ++i) next.v[i] += dt * next.p[i];
    WaveState half{next.v, next.p, next.t};
    RealField a2 = rhs(half, op, tr, cfg);
    for (std::size_t i = 0; i < a.size(); ++i) next.p[i] += 0.5 * dt * a2[i];
    if (!next.v.all_finite() || !next.p.all_finite())
        throw std::runtime_error("step: state became non-finite at t = " + std::to_string(next.t));
    return next;
}

double energy_ER(const WaveState& state, const TransformedOperator& op,
                 const TruncationConfig& tr, const EvolveConfig& cfg) {
    double kinetic = 0.0;
    for (std::size_t i = 0; i < state.p.size(); ++i)
        kinetic += op.exp2W[i] * state.p[i] * state.p[i];
    kinetic *= 0.5 * op.grid->cell_volume();
    double e = kinetic - 0.5 * quadratic_form(state.v, op, tr, Variant::trunc);
    if (cfg.cubic) {
        double quartic = 0.0;
        for (std::size_t i = 0; i < state.v.size(); ++i) {
            const double u = op.expW[i] * state.v[i];  // physical field
            quartic += u * u * u * u;
        }
        e += 0.25 * quartic * op.grid->cell_volume();
    }
    return e;
}

double energy_Egg(const WaveState& state, const TransformedOperator& op,
                  const TruncationConfig& tr, const EvolveConfig& cfg) {
    double shift = 0.0;
    for (std::size_t i = 0; i < state.v.size(); ++i) {
        const double xi_low = tr.C_gg + tr.chi[i] * op.Z_low[i];
        shift += op.exp2W[i] * xi_low * state.v[i] * state.v[i];
    }
    const double e = energy_ER(state, op, tr, cfg) + 0.5 * shift * op.grid->cell_volume();
    if (e < -1e-8)
        throw std::runtime_error("energy_Egg: negative rough energy, calibration broken");
    return e;
}

EvolveResult evolve(const WaveState& initial, const TransformedOperator& op,
                    const TruncationConfig& tr, const EvolveConfig& cfg) {
    const double dt = cfg.step_size(*op.grid);
    const long n_steps = std::lround(cfg.T / dt);
    EvolveResult res;
    res.state = initial;

    auto record = [&](const WaveState& s) {
        res.trace.t.push_back(s.t);
        res.trace.E_R.push_back(energy_ER(s, op, tr, cfg));
        const double egg = energy_Egg(s, op, tr, cfg);
        res.trace.E_gg.push_back(egg);
        const std::size_t k = res.trace.t.size();
        if (k >= 2 && res.trace.E_gg[k - 2] > 0.0 && egg > 0.0)
            res.trace.log_slope.push_back((std::log(egg) - std::log(res.trace.E_gg[k - 2])) /
                                          (res.trace.t[k - 1] - res.trace.t[k - 2]));
        else if (k >= 2)
            res.trace.log_slope.push_back(0.0);
        if (cfg.keep_snapshots) res.snapshots.push_back(s);
    };

    record(res.state);
    for (long i = 0; i < n_steps; ++i) {
        res.state = step(res.state, op, tr, cfg);
        if ((i + 1) % cfg.record_stride == 0 || i + 1 == n_steps) record(res.state);
    }
    return res;
}

GronwallReport gronwall_check(const EnergyTrace& trace, const TransformedOperator& op,
                              const TruncationConfig& tr) {
    if (trace.t.empty()) throw std::invalid_argument("gronwall_check: empty trace");
    GronwallReport rep;
    for (double s : trace.log_slope) rep.K_fit = std::max(rep.K_fit, s);

    double scale = 0.0;
    for (std::size_t i = 0; i < op.Z_low.size(); ++i)
        scale = std::max(scale, std::fabs(tr.C_gg + tr.chi[i] * op.Z_low[i]));
    rep.bound_scale = scale;

    rep.min_E_gg = trace.E_gg[0];
    for (double e : trace.E_gg) rep.min_E_gg = std::min(rep.min_E_gg, e);
    rep.positive_pass = rep.min_E_gg >= -1e-8;

    rep.envelope_pass = true;
    const double e0 = trace.E_gg[0];
    for (std::size_t i = 0; i < trace.t.size(); ++i) {
        const double bound = std::exp(rep.K_fit * (trace.t[i] - trace.t[0])) * e0 * (1.0 + 1e-6);
        if (trace.E_gg[i] > bound + 1e-12) rep.envelope_pass = false;
    }
    rep.slope_pass = rep.K_fit <= 4.0 * rep.bound_scale;
    rep.pass = rep.slope_pass && rep.positive_pass && rep.envelope_pass;
    return rep;
}

} // namespace stowave
