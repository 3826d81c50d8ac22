#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "stowave/besov.hpp"
#include "stowave/rng.hpp"

using namespace stowave;

namespace {

RealField harmonic(const TorusGrid& g, int k1, int k2) {
    RealField f(g);
    for (std::size_t i = 0; i < g.size(); ++i) {
        auto c = g.coords(i);
        f[i] = std::cos(g.freq_step() * (k1 * g.coord(c[0]) + k2 * g.coord(c[1])));
    }
    return f;
}

} // namespace

TEST_CASE("besov norm: zero field, scaling, s-monotonicity, aggregation") {
    TorusGrid g(2, 16.0, 64);
    RealField z(g);
    BesovParams bp{0.5, 2.0, 2.0, 0.0};
    CHECK(besov_norm(z, bp).norm == 0.0);

    auto f = random_smooth_field(g, 4);
    const double n1 = besov_norm(f, bp).norm;
    CHECK(besov_norm(3.5 * f, bp).norm == doctest::Approx(3.5 * n1).epsilon(1e-12));

    BesovParams lo{0.25, 2.0, 2.0, 0.0}, hi{1.25, 2.0, 2.0, 0.0};
    CHECK(besov_norm(f, lo).norm <= besov_norm(f, hi).norm);

    // the assembled norm is exactly the ell^q aggregation of the blocks
    auto rep = besov_norm(f, bp);
    double acc = 0.0;
    for (std::size_t j = 0; j < rep.block_norms.size(); ++j)
        acc += std::pow(std::pow(2.0, (static_cast<int>(j) - 1) * bp.s) * rep.block_norms[j], bp.q);
    CHECK(rep.norm == doctest::Approx(std::pow(acc, 1.0 / bp.q)).epsilon(1e-13));
}

TEST_CASE("besov norm of a single harmonic tracks 2^{j s}") {
    TorusGrid g(2, 16.0, 128);
    auto f = harmonic(g, 21, 0);  // |kappa| = 8.25, about 2^3
    BesovParams bp{1.0, 2.0, 2.0, 0.0};
    const double nb = besov_norm(f, bp).norm;
    const double ratio = nb / (8.25 * l2_norm(f));
    CHECK(ratio > 0.25);
    CHECK(ratio < 2.0);
}

TEST_CASE("weighted norms order by weight exponent") {
    TorusGrid g(2, 16.0, 64);
    // bump away from the center so the weight differs from 1 on its support
    auto f = radial_bump(g, {2.0, 2.0, 0.0}, 0.5, 1.5);
    BesovParams wm{0.5, INFINITY, INFINITY, -1.0};
    BesovParams w0{0.5, INFINITY, INFINITY, 0.0};
    BesovParams wp{0.5, INFINITY, INFINITY, 1.0};
    CHECK(besov_norm(f, wm).norm < besov_norm(f, w0).norm);
    CHECK(besov_norm(f, w0).norm < besov_norm(f, wp).norm);
}

TEST_CASE("indicator regularity: critical stability and supercritical growth") {
    auto rep = indicator_regularity_check(2.0, {64, 128, 256}, 2, 16.0);
    CHECK(rep.critical_stable);
    for (double r : rep.stability_ratio) CHECK(r <= 2.0);
    CHECK(rep.supercritical_grows);
}

TEST_CASE("indicator norm at deeply supercritical smoothness grows at least 1.5x per refinement") {
    // at s = 1/p + 1 each dyadic refinement roughly doubles the norm
    const double side = 16.0, radius = 2.0;
    for (double p : {1.0, 2.0}) {
        std::vector<double> norms;
        for (int n : {64, 128, 256}) {
            TorusGrid g(2, side, n);
            RealField chi(g);
            auto cen = g.center();
            for (std::size_t i = 0; i < g.size(); ++i) {
                auto cs = g.coords(i);
                chi[i] = g.torus_dist({g.coord(cs[0]), g.coord(cs[1]), 0.0}, cen) <= radius ? 1.0 : 0.0;
            }
            BesovParams bp{1.0 / p + 1.0, p, INFINITY, 0.0};
            norms.push_back(besov_norm(chi, bp).norm);
        }
        CHECK(norms[1] >= 1.5 * norms[0]);
        CHECK(norms[2] >= 1.5 * norms[1]);
    }
}

TEST_CASE("indicator norm at s = 0, p = q = 2 stays within the profile constant of L2") {
    TorusGrid g(2, 16.0, 128);
    RealField chi(g);
    auto cen = g.center();
    for (std::size_t i = 0; i < g.size(); ++i) {
        auto cs = g.coords(i);
        chi[i] = g.torus_dist({g.coord(cs[0]), g.coord(cs[1]), 0.0}, cen) <= 2.0 ? 1.0 : 0.0;
    }
    BesovParams bp{0.0, 2.0, 2.0, 0.0};
    const double nb = besov_norm(chi, bp).norm;
    const double l2 = l2_norm(chi);
    CHECK(nb <= l2 * 1.0000001);
    CHECK(nb >= l2 / std::sqrt(2.0));
}

TEST_CASE("interpolation inequality holds with constant 4 on random fields") {
    TorusGrid g(2, 16.0, 64);
    auto rep = interpolation_check(g, 0.25, 1.25, 0.5, 2.0, 2.0, 100);
    CHECK(rep.pass);
    CHECK(rep.violations == 0);

    // single harmonic: both sides nearly coincide
    auto f = harmonic(g, 9, 4);
    BesovParams bp{0.75, 2.0, 2.0, 0.0};
    const double lhs = besov_norm(f, bp).norm;
    bp.s = 0.25;
    const double a = besov_norm(f, bp).norm;
    bp.s = 1.25;
    const double b = besov_norm(f, bp).norm;
    CHECK(lhs / (std::sqrt(a) * std::sqrt(b)) <= 2.0);
    CHECK(lhs / (std::sqrt(a) * std::sqrt(b)) >= 0.5);
}

TEST_CASE("fractional leibniz bound with constant 8 at s = 1/2") {
    TorusGrid g(2, 16.0, 64);
    int violations = 0;
    for (int i = 0; i < 100; ++i) {
        auto f = random_smooth_field(g, hash_key(1, i));
        auto h = random_smooth_field(g, hash_key(2, i));
        auto fg = pointwise_product(f, h, true);
        BesovParams prod{0.5, 2.0, 2.0, 0.0};
        BesovParams half{0.5, 4.0, 2.0, 0.0};
        const double lhs = besov_norm(fg, prod).norm;
        auto l4 = [&](const RealField& u) {
            double s = 0.0;
            for (double x : u.v) s += x * x * x * x;
            return std::pow(s * g.cell_volume(), 0.25);
        };
        const double rhs = besov_norm(f, half).norm * l4(h) + l4(f) * besov_norm(h, half).norm;
        if (lhs > 8.0 * rhs) ++violations;
    }
    CHECK(violations == 0);
}

TEST_CASE("lift regularity trends in 2d" * doctest::timeout(600)) {
    auto rep = lift_regularity_report(2, 16.0, {32, 64, 128}, 6, 0.0, 42);
    for (const auto& tr : rep.trends) {
        INFO(tr.object, " stable=", tr.stable_votes, " grow=", tr.growing_votes);
        CHECK(tr.pass);
    }
    CHECK(rep.pass);
}
