#include "stowave/hamiltonian.hpp"

#include <cmath>
#include <stdexcept>

#include "stowave/rng.hpp"

namespace stowave {

namespace {

RealField dot_dealias(const std::vector<RealField>& a, const std::vector<RealField>& b) {
    RealField out(*a.at(0).grid);
    for (std::size_t j = 0; j < a.size(); ++j) out += pointwise_product(a[j], b[j]);
    return dealias(out);
}

// largest eigenvalue of a symmetric tridiagonal matrix by Sturm bisection
double tridiag_top_eigenvalue(const std::vector<double>& alpha, const std::vector<double>& beta) {
    const int k = static_cast<int>(alpha.size());
    double lo = alpha[0], hi = alpha[0];
    for (int i = 0; i < k; ++i) {
        const double off = (i > 0 ? std::fabs(beta[i - 1]) : 0.0) +
                           (i + 1 < k ? std::fabs(beta[i]) : 0.0);
        lo = std::min(lo, alpha[i] - off);
        hi = std::max(hi, alpha[i] + off);
    }
    auto count_below = [&](double x) {
        // eigenvalues < x via the LDL^T sign recurrence
        int cnt = 0;
        double d = alpha[0] - x;
        if (d < 0) ++cnt;
        for (int i = 1; i < k; ++i) {
            const double b2 = beta[i - 1] * beta[i - 1];
            d = alpha[i] - x - b2 / (d == 0.0 ? 1e-300 : d);
            if (d < 0) ++cnt;
        }
        return cnt;
    };
    for (int it = 0; it < 200 && hi - lo > 1e-12 * std::max(1.0, std::fabs(hi)); ++it) {
        const double mid = 0.5 * (lo + hi);
        if (count_below(mid) >= k)
            hi = mid;
        else
            lo = mid;
    }
    return 0.5 * (lo + hi);
}

const RealField& zpart(const TransformedOperator& op, const TruncationConfig& cfg,
                       Variant variant, RealField& scratch) {
    switch (variant) {
        case Variant::high:
            return op.Z_high;
        case Variant::trunc:
            scratch = op.Z_high + pointwise_product(cfg.chi, op.Z_low);
            return scratch;
        case Variant::gap:
        default:
            scratch = op.Z_high;
            for (auto& x : scratch.v) x -= cfg.C_gg;
            return scratch;
    }
}

} // namespace

TransformedOperator build_transformed(const StochasticLift& lift, const LocalizationSchedule& sched) {
    const TorusGrid& g = *lift.grid;
    TransformedOperator op;
    op.d = lift.d;
    op.grid = &g;
    op.schedule_base = sched.base_level();

    auto wsplit = split_conjugated(lift.W, sched);
    op.W_high = wsplit.high;
    op.W_low = wsplit.low;
    if (op.W_high.max_abs() > 300.0)
        throw std::runtime_error("build_transformed: max|W_>| > 300, exponential overflow");

    auto gw_low = gradient(op.W_low);
    auto lap_w_low = laplacian(op.W_low);

    if (lift.d == 2) {
        // Z = X - Delta X_<= + :|grad X|^2: - 2 grad X . grad X_<= + |grad X_<=|^2
        auto gx = gradient(lift.X);
        op.Z = lift.W - lap_w_low + lift.wick_grad_x_sq - 2.0 * dot_dealias(gx, gw_low) +
               dot_dealias(gw_low, gw_low);
    } else {
        // Z = W - Delta W_<= + :|grad X2|^2: + |grad X3|^2 + 2 grad X . grad X3
        //     + 2 grad X2 . grad X3 - 2 grad W . grad W_<= + |grad W_<=|^2
        auto g3 = gradient(lift.X3);
        auto g2 = gradient(lift.X2);
        auto gw = gradient(lift.W);
        op.Z = lift.W - lap_w_low + lift.wick_grad_x2_sq + dot_dealias(g3, g3) + 2.0 * lift.cross +
               2.0 * dot_dealias(g2, g3) - 2.0 * dot_dealias(gw, gw_low) +
               dot_dealias(gw_low, gw_low);
    }

    auto zsplit = split(op.Z, sched);
    op.Z_high = zsplit.high;
    op.Z_low = zsplit.low;

    op.expW = pointwise_exp(op.W_high);
    op.expmW = pointwise_exp(-1.0 * op.W_high);
    op.exp2W = pointwise_exp(2.0 * op.W_high);
    op.expm2W = pointwise_exp(-2.0 * op.W_high);
    op.gradW_high = gradient(op.W_high);
    return op;
}

TruncationConfig make_truncation(const TorusGrid& grid, double R, double C_gg) {
    if (!(R > 0.0)) throw std::invalid_argument("make_truncation: R must be positive");
    if (R > 0.5 * grid.side())
        throw std::invalid_argument("make_truncation: ball of radius R must fit the torus (R <= M/2)");
    TruncationConfig cfg;
    cfg.R = R;
    cfg.C_gg = C_gg;
    cfg.chi = RealField(grid);
    auto cen = grid.center();
    for (std::size_t i = 0; i < grid.size(); ++i) {
        auto cs = grid.coords(i);
        std::array<double, 3> x = {0, 0, 0};
        for (int j = 0; j < grid.dim(); ++j) x[j] = grid.coord(cs[j]);
        cfg.chi[i] = grid.torus_dist(x, cen) <= R ? 1.0 : 0.0;
    }
    return cfg;
}

RealField apply_H_in_v(const RealField& v, const TransformedOperator& op,
                       const TruncationConfig& cfg, Variant variant) {
    if (!v.all_finite()) throw std::invalid_argument("apply_H_in_v: non-finite input");
    auto gv = gradient(v);
    for (auto& comp : gv) comp = pointwise_product(op.exp2W, comp);
    RealField out = pointwise_product(op.expm2W, divergence(gv));
    RealField scratch;
    const RealField& z = zpart(op, cfg, variant, scratch);
    for (std::size_t i = 0; i < v.size(); ++i) out[i] += z[i] * v[i];
    return out;
}

double quadratic_form(const RealField& v, const TransformedOperator& op,
                      const TruncationConfig& cfg, Variant variant) {
    auto gv = gradient(v);
    double grad_term = 0.0;
    for (const auto& comp : gv)
        for (std::size_t i = 0; i < comp.size(); ++i)
            grad_term += op.exp2W[i] * comp[i] * comp[i];
    RealField scratch;
    const RealField& z = zpart(op, cfg, variant, scratch);
    double pot_term = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) pot_term += op.exp2W[i] * z[i] * v[i] * v[i];
    return (-grad_term + pot_term) * op.grid->cell_volume();
}

double weighted_mass(const RealField& v, const TransformedOperator& op) {
    double s = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) s += op.exp2W[i] * v[i] * v[i];
    return s * op.grid->cell_volume();
}

double calibrate_C_gg(const TransformedOperator& op, uint64_t seed, double tol) {
    const TorusGrid& g = *op.grid;
    const TruncationConfig dummy;  // variant high ignores the truncation
    auto binner = [&](const RealField& a, const RealField& b) {
        double s = 0.0;
        for (std::size_t i = 0; i < a.size(); ++i) s += op.exp2W[i] * a[i] * b[i];
        return s * g.cell_volume();
    };

    // Lanczos in the weighted inner product with full reorthogonalization
    std::vector<RealField> basis;
    std::vector<double> alpha, beta;
    RealField q = random_smooth_field(g, seed);
    q *= 1.0 / std::sqrt(binner(q, q));
    basis.push_back(q);

    const int max_iter = 10000;
    double lambda_prev = -INFINITY;
    int settled = 0;
    for (int it = 0; it < max_iter; ++it) {
        RealField w = apply_H_in_v(basis.back(), op, dummy, Variant::high);
        const double a = binner(w, basis.back());
        alpha.push_back(a);
        w -= a * basis.back();
        if (!beta.empty()) w -= beta.back() * basis[basis.size() - 2];
        for (const auto& b : basis) w -= binner(w, b) * b;  // reorthogonalize
        const double bnorm = std::sqrt(binner(w, w));

        // top Ritz value of the tridiagonal
        const double lambda = tridiag_top_eigenvalue(alpha, beta);
        if (std::fabs(lambda - lambda_prev) <= tol * std::max(1.0, std::fabs(lambda))) {
            if (++settled >= 2) return std::max(lambda, 0.0) + 1.0;
        } else {
            settled = 0;
        }
        lambda_prev = lambda;

        if (bnorm < 1e-12) return std::max(lambda, 0.0) + 1.0;  // Krylov space exhausted
        beta.push_back(bnorm);
        basis.push_back((1.0 / bnorm) * w);
    }
    throw std::runtime_error("calibrate_C_gg: no convergence within 10^4 Lanczos steps");
}

RealField mixed_test_field(const TorusGrid& g, uint64_t seed) {
    uint64_t st = hash_key(seed, 0x7e57);
    const double u = uniform_open(st);
    if (u < 0.6) return random_smooth_field(g, hash_key(seed, 1), g.freq_step() * (1.0 + 10.0 * uniform_open(st)));
    // compactly supported bump at a random center
    std::array<double, 3> c = {0, 0, 0};
    for (int j = 0; j < g.dim(); ++j) c[j] = g.side() * uniform_open(st);
    const double r_out = 0.8 + 1.7 * uniform_open(st);
    auto f = radial_bump(g, c, 0.5 * r_out, r_out);
    const double nrm = l2_norm(f);
    if (nrm > 0.0) f *= 1.0 / nrm;
    return f;
}

QuadraticFormReport form_bounds_check(const TransformedOperator& op, double C_gg,
                                      const std::vector<double>& radii, int n_samples,
                                      uint64_t seed) {
    QuadraticFormReport rep;
    rep.radii = radii;
    rep.samples = n_samples;

    std::vector<RealField> family;
    family.reserve(n_samples);
    for (int i = 0; i < n_samples; ++i) family.push_back(mixed_test_field(*op.grid, hash_key(seed, i)));

    // constant-free bounds first (they do not involve the truncation)
    TruncationConfig cfg_free;
    cfg_free.C_gg = C_gg;
    double worst_norm_equiv = 0.0;
    for (const auto& v : family) {
        const double q_high = quadratic_form(v, op, cfg_free, Variant::high);
        const double q_gap = quadratic_form(v, op, cfg_free, Variant::gap);
        const double m = weighted_mass(v, op);
        const double tol = 1e-10 * (std::fabs(q_high) + std::fabs(q_gap) + m);
        if (!(std::fabs(q_high) <= -q_gap + tol)) ++rep.violations;
        if (!(-q_gap <= -q_high + C_gg * m + tol)) ++rep.violations;

        auto gv = gradient(v);
        double h1 = inner(v, v);
        for (const auto& comp : gv) h1 += inner(comp, comp);
        worst_norm_equiv = std::max(worst_norm_equiv, h1 / (-q_gap + m));
    }

    // The needed constants of the two R-dependent bounds. For v supported
    // inside B(R) the values are R-independent, so maximizing over candidate
    // sets nested in R gives a nondecreasing measured constant; the random
    // family's per-R values only fluctuate around an R-independent level, so
    // it enters through its uniform (all radii) requirement.
    auto need = [&](const RealField& v, const TruncationConfig& cfg) {
        const double q_R = quadratic_form(v, op, cfg, Variant::trunc);
        const double q_gap = quadratic_form(v, op, cfg, Variant::gap);
        const double m = weighted_mass(v, op);
        return std::max((std::fabs(q_R) + 2.0 * q_gap) / m, (-q_gap + 2.0 * q_R) / m);
    };

    double family_need = 0.0;
    std::vector<TruncationConfig> cfgs;
    for (double R : radii) {
        cfgs.push_back(make_truncation(*op.grid, R, C_gg));
        for (const auto& v : family) family_need = std::max(family_need, need(v, cfgs.back()));
    }

    const TorusGrid& g = *op.grid;
    auto cen = g.center();
    const int stride = std::max(1, g.pts() / 16);
    for (std::size_t ri = 0; ri < radii.size(); ++ri) {
        double c_need = family_need;
        // compactly supported probes everywhere inside the ball
        for (double r_out : {1.2, 2.0, 3.0}) {
            if (r_out > radii[ri]) continue;
            for (std::size_t i = 0; i < g.size(); ++i) {
                auto cs = g.coords(i);
                bool on_lattice = true;
                for (int j = 0; j < g.dim(); ++j)
                    if (cs[j] % stride != 0) on_lattice = false;
                if (!on_lattice) continue;
                std::array<double, 3> x = {0, 0, 0};
                for (int j = 0; j < g.dim(); ++j) x[j] = g.coord(cs[j]);
                if (g.torus_dist(x, cen) + r_out > radii[ri]) continue;
                c_need = std::max(c_need, need(radial_bump(g, x, 0.5 * r_out, r_out), cfgs[ri]));
            }
        }
        rep.c_measured.push_back(std::max(c_need, 0.0));
        rep.norm_equiv_c.push_back(worst_norm_equiv);
    }

    rep.pass = rep.violations == 0;
    for (std::size_t i = 1; i < rep.c_measured.size(); ++i)
        if (rep.c_measured[i] + 1e-12 < rep.c_measured[i - 1]) rep.pass = false;
    return rep;
}

} // namespace stowave
