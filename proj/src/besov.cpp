#include "stowave/besov.hpp"

#include <cmath>
#include <stdexcept>
#include <thread>

#include "stowave/rng.hpp"

namespace stowave {

namespace {

double lp_norm_weighted(const RealField& f, double p, double nu) {
    const TorusGrid& g = *f.grid;
    auto cen = g.center();
    auto weight = [&](std::size_t i) {
        if (nu == 0.0) return 1.0;
        auto cs = g.coords(i);
        std::array<double, 3> x = {0, 0, 0};
        for (int j = 0; j < g.dim(); ++j) x[j] = g.coord(cs[j]);
        const double r = g.torus_dist(x, cen);
        return std::pow(1.0 + r * r, 0.5 * nu);
    };
    if (std::isinf(p)) {
        double m = 0.0;
        for (std::size_t i = 0; i < f.size(); ++i) m = std::max(m, std::fabs(f[i]) * weight(i));
        return m;
    }
    double s = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) s += std::pow(std::fabs(f[i]) * weight(i), p);
    return std::pow(s * g.cell_volume(), 1.0 / p);
}

} // namespace

double assemble_besov(const std::vector<double>& block_norms, double s, double q) {
    if (std::isinf(q)) {
        double m = 0.0;
        for (std::size_t j = 0; j < block_norms.size(); ++j)
            m = std::max(m, std::pow(2.0, (static_cast<double>(j) - 1.0) * s) * block_norms[j]);
        return m;
    }
    double acc = 0.0;
    for (std::size_t j = 0; j < block_norms.size(); ++j)
        acc += std::pow(std::pow(2.0, (static_cast<double>(j) - 1.0) * s) * block_norms[j], q);
    return std::pow(acc, 1.0 / q);
}

NormReport besov_norm(const RealField& f, const BesovParams& params) {
    if (params.p < 1.0 || params.q < 1.0)
        throw std::invalid_argument("besov_norm: p, q must be >= 1");
    const TorusGrid& g = *f.grid;
    NormReport rep;
    rep.resolution = g.pts();
    const int jmax = max_lp_block(g);
    for (int j = -1; j <= jmax; ++j)
        rep.block_norms.push_back(lp_norm_weighted(lp_block(f, j), params.p, params.nu));
    rep.norm = assemble_besov(rep.block_norms, params.s, params.q);
    return rep;
}

double holder_norm(const RealField& f, double s) {
    BesovParams p;
    p.s = s;
    p.p = INFINITY;
    p.q = INFINITY;
    return besov_norm(f, p).norm;
}

IndicatorRegularityReport indicator_regularity_check(double radius, const std::vector<int>& resolutions,
                                                     int d, double side) {
    if (radius >= 0.5 * side) throw std::invalid_argument("indicator ball must fit the torus");
    IndicatorRegularityReport rep;
    rep.resolutions = resolutions;
    const std::vector<double> ps = {1.0, 2.0};
    rep.critical_norms.resize(ps.size());
    rep.supercritical_norms.resize(ps.size());
    for (std::size_t pi = 0; pi < ps.size(); ++pi) {
        for (int n : resolutions) {
            TorusGrid g(d, side, n);
            RealField chi(g);
            auto cen = g.center();
            for (std::size_t i = 0; i < g.size(); ++i) {
                auto cs = g.coords(i);
                std::array<double, 3> x = {0, 0, 0};
                for (int j = 0; j < g.dim(); ++j) x[j] = g.coord(cs[j]);
                chi[i] = g.torus_dist(x, cen) <= radius ? 1.0 : 0.0;
            }
            BesovParams bp;
            bp.p = ps[pi];
            bp.q = INFINITY;
            bp.s = 1.0 / ps[pi];
            rep.critical_norms[pi].push_back(besov_norm(chi, bp).norm);
            bp.s = 1.0 / ps[pi] + 0.2;
            rep.supercritical_norms[pi].push_back(besov_norm(chi, bp).norm);
        }
    }
    rep.critical_stable = true;
    rep.supercritical_grows = true;
    for (std::size_t pi = 0; pi < ps.size(); ++pi) {
        double lo = rep.critical_norms[pi][0], hi = lo;
        for (double v : rep.critical_norms[pi]) {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        rep.stability_ratio.push_back(hi / lo);
        if (hi / lo > 2.0) rep.critical_stable = false;
        for (std::size_t r = 1; r < rep.supercritical_norms[pi].size(); ++r)
            if (!(rep.supercritical_norms[pi][r] > rep.supercritical_norms[pi][r - 1]))
                rep.supercritical_grows = false;
    }
    return rep;
}

InterpolationReport interpolation_check(const TorusGrid& g, double s1, double s2, double theta,
                                        double p, double q, int n_samples, uint64_t seed) {
    if (!(s1 < s2) || !(theta > 0.0) || !(theta < 1.0))
        throw std::invalid_argument("interpolation_check: need s1 < s2 and theta in (0,1)");
    InterpolationReport rep;
    const double smid = theta * s1 + (1.0 - theta) * s2;
    for (int i = 0; i < n_samples; ++i) {
        auto f = random_smooth_field(g, hash_key(seed, i, 0x1e7));
        BesovParams bp;
        bp.p = p;
        bp.q = q;
        bp.s = smid;
        const double lhs = besov_norm(f, bp).norm;
        bp.s = s1;
        const double n1 = besov_norm(f, bp).norm;
        bp.s = s2;
        const double n2 = besov_norm(f, bp).norm;
        const double rhs = std::pow(n1, theta) * std::pow(n2, 1.0 - theta);
        const double ratio = lhs / rhs;
        rep.worst_ratio = std::max(rep.worst_ratio, ratio);
        if (ratio > 4.0) ++rep.violations;
    }
    rep.pass = rep.violations == 0;
    return rep;
}

LiftRegularityReport lift_regularity_report(int d, double side, const std::vector<int>& resolutions,
                                            int n_seeds, double eps, uint64_t seed_base, int threads) {
    if (resolutions.size() < 3)
        throw std::invalid_argument("lift_regularity_report: need at least 3 resolutions");
    LiftRegularityReport rep;
    rep.resolutions = resolutions;

    struct Obj {
        std::string name;
        double target;
    };
    std::vector<Obj> objs;
    if (d == 2) {
        objs = {{"xi", -1.0}, {"X", 1.0}, {"wick_grad_x_sq", 0.0}};
    } else {
        objs = {{"xi", -1.5}, {"X", 0.5},  {"X2", 1.0},
                {"X3", 1.5},  {"wick_grad_x_sq", -1.0}, {"wick_grad_x2_sq", 0.0},
                {"cross", -0.5}};
    }
    const int nr = static_cast<int>(resolutions.size());
    // norms[seed][object][resolution][0=sub,1=super]
    std::vector<std::vector<std::vector<std::array<double, 2>>>> norms(
        n_seeds, std::vector<std::vector<std::array<double, 2>>>(
                     objs.size(), std::vector<std::array<double, 2>>(nr)));

    // Wick constants depend on (grid, eps) only; compute once per resolution.
    std::vector<std::optional<RenormConstants>> consts(nr);
    if (d == 3)
        for (int r = 0; r < nr; ++r) {
            TorusGrid g(d, side, resolutions[r]);
            consts[r] = renorm_constant_b(Mollifier{eps}, g, 48, hash_key(seed_base, 0xbb, resolutions[r]));
        }

    std::vector<std::thread> pool;
    const int nthreads = std::max(1, std::min(threads, n_seeds));
    auto work = [&](int t0) {
        for (int s = t0; s < n_seeds; s += nthreads) {
            for (int r = 0; r < nr; ++r) {
                TorusGrid g(d, side, resolutions[r]);
                auto noise = sample_white_noise(hash_key(seed_base, s, 0x11f7), g);
                auto lift = build_lift(noise, Mollifier{eps}, consts[r]);
                for (std::size_t o = 0; o < objs.size(); ++o) {
                    const RealField* f = nullptr;
                    if (objs[o].name == "xi") f = &noise.xi;
                    else if (objs[o].name == "X") f = &lift.X;
                    else if (objs[o].name == "X2") f = &lift.X2;
                    else if (objs[o].name == "X3") f = &lift.X3;
                    else if (objs[o].name == "wick_grad_x_sq") f = &lift.wick_grad_x_sq;
                    else if (objs[o].name == "wick_grad_x2_sq") f = &lift.wick_grad_x2_sq;
                    else f = &lift.cross;
                    BesovParams bp{0.0, INFINITY, INFINITY, 0.0};
                    auto blocks = besov_norm(*f, bp).block_norms;
                    norms[s][o][r][0] = assemble_besov(blocks, objs[o].target - 0.1, INFINITY);
                    norms[s][o][r][1] = assemble_besov(blocks, objs[o].target + 0.1, INFINITY);
                }
            }
        }
    };
    for (int t = 0; t < nthreads; ++t) pool.emplace_back(work, t);
    for (auto& th : pool) th.join();

    rep.pass = true;
    for (std::size_t o = 0; o < objs.size(); ++o) {
        ObjectTrend tr;
        tr.object = objs[o].name;
        tr.target = objs[o].target;
        tr.seeds = n_seeds;
        tr.gate_stability = objs[o].name == "X";
        for (int s = 0; s < n_seeds; ++s) {
            double lo = norms[s][o][0][0], hi = lo;
            for (int r = 0; r < nr; ++r) {
                lo = std::min(lo, norms[s][o][r][0]);
                hi = std::max(hi, norms[s][o][r][0]);
            }
            if (hi <= 2.0 * lo) ++tr.stable_votes;
            bool grow = true;
            for (int r = 1; r < nr; ++r)
                if (!(norms[s][o][r][1] > norms[s][o][r - 1][1])) grow = false;
            if (grow) ++tr.growing_votes;
        }
        tr.pass = 2 * tr.growing_votes > n_seeds &&
                  (!tr.gate_stability || 2 * tr.stable_votes > n_seeds);
        if (!tr.pass) rep.pass = false;
        rep.trends.push_back(tr);
    }
    return rep;
}

} // namespace stowave
