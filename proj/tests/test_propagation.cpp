#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "stowave/propagation.hpp"
#include "stowave/rng.hpp"

using namespace stowave;

namespace {

StochasticLift zero_lift(const TorusGrid& g) {
    NoiseRealization z;
    z.grid = &g;
    z.xi = RealField(g);
    RenormConstants rc;
    rc.d = g.dim();
    rc.side = g.side();
    return build_lift(z, Mollifier{0.25}, rc);
}

TransformedOperator free_op(const TorusGrid& g) {
    LocalizationSchedule sched(g, 1.0);
    return build_transformed(zero_lift(g), sched);
}

TransformedOperator noisy_op(const TorusGrid& g, uint64_t seed = 11, double eps = 0.125) {
    auto lift = build_lift(sample_white_noise(seed, g), Mollifier{eps});
    LocalizationSchedule sched(g, 1.0);
    return build_transformed(lift, sched);
}

} // namespace

TEST_CASE("bump profile values") {
    CHECK(BumpProfile::psi(-2.0) == 1.0);
    CHECK(BumpProfile::psi(0.5) == 0.5);
    CHECK(BumpProfile::psi(1.5) == 0.0);
    CHECK(BumpProfile::speed == 2.0);
}

TEST_CASE("bump field: center value, annulus midpoint, support, wrap rejection") {
    TorusGrid g(2, 16.0, 128);
    ConeSpec cone{1.0, g.center()};
    auto phi = bump_field(cone, 0.25, g);
    // at the apex point
    CHECK(phi[g.index({64, 64, 0})] == 1.0);
    const double reach = 2.0 * (cone.t - 0.25);
    for (std::size_t i = 0; i < g.size(); ++i) {
        auto cs = g.coords(i);
        const double r =
            g.torus_dist({g.coord(cs[0]), g.coord(cs[1]), 0.0}, cone.x) - reach;
        if (std::fabs(r - 0.5) < 1e-9) CHECK(phi[i] == doctest::Approx(0.5).epsilon(1e-12));
        if (r >= 1.0) CHECK(phi[i] == 0.0);
        CHECK(phi[i] >= 0.0);
        CHECK(phi[i] <= 1.0);
    }
    ConeSpec wide{3.6, g.center()};
    CHECK_THROWS_AS(bump_field(wide, 0.0, g), std::invalid_argument);
}

TEST_CASE("bump derivative identities sharpen with resolution") {
    const double side = 16.0;
    ConeSpec cone{1.2, {8.0, 8.0, 0.0}};
    double prev_measure = INFINITY;
    for (int n : {128, 256, 512}) {
        TorusGrid g(2, side, n);
        auto rep = bump_derivative_identity_check(cone, 0.4, g);
        if (n >= 256) CHECK(rep.max_err_indicator < 0.05);
        CHECK(rep.max_err_interior < 0.05);
        CHECK(rep.mismatch_measure < prev_measure);
        // boundary band shrinks proportionally to h
        CHECK(rep.mismatch_measure < 60.0 * side / n);
        prev_measure = rep.mismatch_measure;
    }
}

TEST_CASE("local energy: zero state and constant-field quadrature") {
    TorusGrid g(2, 16.0, 64);
    auto op = free_op(g);
    ConeSpec cone{1.0, g.center()};

    WaveState z;
    z.v = RealField(g);
    z.p = RealField(g);
    z.t = 0.2;
    CHECK(local_energy(z, op, cone, 1.0) == 0.0);

    WaveState c;
    c.v = RealField(g);
    c.p = RealField(g);
    c.t = 0.2;
    for (auto& x : c.v.v) x = 0.8;
    const double e = local_energy(c, op, cone, 1.0);
    // oracle: 1/2 C c^2 * int phi with the bump integrated by the same quadrature
    double iphi = 0.0;
    const double reach = 2.0 * (cone.t - c.t);
    for (std::size_t i = 0; i < g.size(); ++i) {
        auto cs = g.coords(i);
        const double r = g.torus_dist({g.coord(cs[0]), g.coord(cs[1]), 0.0}, cone.x);
        iphi += BumpProfile::psi(r - reach);
    }
    iphi *= g.cell_volume();
    CHECK(e == doctest::Approx(0.5 * 1.0 * 0.8 * 0.8 * iphi).epsilon(1e-12));
}

TEST_CASE("local constant: free floor and calibrated nonnegativity") {
    TorusGrid g(2, 16.0, 64);
    std::vector<ConeSpec> cones = {{1.0, g.center()}, {1.5, {6.0, 10.0, 0.0}}};

    auto op0 = free_op(g);
    CHECK(calibrate_local_constant(op0, cones, 50) == 1.0);

    auto op = noisy_op(g);
    const double C1 = calibrate_local_constant(op, cones, 200, 0xca1);
    const double C2 = calibrate_local_constant(op, cones, 200, 0xca2);
    CHECK(C1 <= 2.0 * C2);
    CHECK(C2 <= 2.0 * C1);

    // fresh localized states stay nonnegative
    for (int i = 0; i < 200; ++i) {
        uint64_t st = hash_key(0xafe, i);
        std::array<double, 3> c = {g.side() * uniform_open(st), g.side() * uniform_open(st), 0.0};
        WaveState s;
        s.v = radial_bump(g, c, 0.4, 0.9 + uniform_open(st));
        s.v = pointwise_product(s.v, random_smooth_field(g, hash_key(0xafe, i, 2), 3.0));
        s.p = RealField(g);
        s.t = 0.3;
        CHECK(local_energy(s, op, cones[0], C1) >= -1e-12);
    }
}

TEST_CASE("local gronwall: zero data and free finite-speed control") {
    TorusGrid g(2, 16.0, 128);
    auto op = free_op(g);
    auto tr = make_truncation(g, 4.0);
    EvolveConfig cfg;
    cfg.cubic = false;
    cfg.T = 1.0;
    cfg.cfl = 0.25;
    cfg.record_stride = 20;
    cfg.keep_snapshots = true;

    WaveState z;
    z.v = RealField(g);
    z.p = RealField(g);
    auto res0 = evolve(z, op, tr, cfg);
    ConeSpec cone{1.0, g.center()};
    auto t0 = gronwall_local_check(res0.snapshots, op, tr, cone, 1.0);
    for (double e : t0.e) CHECK(e == 0.0);
    CHECK(t0.pass);

    // data supported outside B(x, 2t + 1): the local energy stays at zero
    WaveState far;
    far.v = mean_zero_bump(g, {2.0, 2.0, 0.0}, 1.0);
    far.p = RealField(g);
    const double dist_to_apex = g.torus_dist({2.0, 2.0, 0.0}, {8.0, 8.0, 0.0});
    REQUIRE(dist_to_apex > 2.0 * cone.t + 1.0 + 1.0);
    auto res = evolve(far, op, tr, cfg);
    auto trc = gronwall_local_check(res.snapshots, op, tr, cone, 1.0);
    const double scale = l2_norm(far.v);
    for (double e : trc.e) CHECK(std::fabs(e) <= 1e-10 * scale);
}

TEST_CASE("local gronwall on a noisy run has finite fitted slope") {
    TorusGrid g(2, 16.0, 128);
    auto op = noisy_op(g, 21);
    auto tr = make_truncation(g, 4.0, calibrate_C_gg(op));
    std::vector<ConeSpec> cones = {{1.2, g.center()}};
    const double C = calibrate_local_constant(op, cones, 100);

    EvolveConfig cfg;
    cfg.cubic = true;
    cfg.T = 1.2;
    cfg.cfl = 0.25;
    cfg.record_stride = 40;
    cfg.keep_snapshots = true;
    WaveState s;
    s.v = radial_bump(g, g.center(), 1.0, 2.5);
    s.p = RealField(g);
    auto res = evolve(s, op, tr, cfg);
    auto trc = gronwall_local_check(res.snapshots, op, tr, cones[0], C);
    CHECK(trc.positive_pass);
    CHECK(trc.envelope_pass);
    CHECK(std::isfinite(trc.K_fit));
    CHECK(trc.pass);
}

TEST_CASE("cone agreement: R = L and free noise give zero difference") {
    TorusGrid g(2, 16.0, 64);
    EvolveConfig cfg;
    cfg.cubic = true;
    cfg.cfl = 0.25;
    cfg.record_stride = 20;

    RealField v0 = radial_bump(g, g.center(), 0.8, 1.6);
    RealField p0(g);

    auto op = noisy_op(g);
    const double cgg = calibrate_C_gg(op);
    auto rep_same = cone_agreement(v0, p0, op, 4.0, 4.0, cfg, cgg, 2.0);
    CHECK(rep_same.sup_inside == 0.0);
    CHECK(rep_same.inside_pass);

    auto op0 = free_op(g);
    auto rep_free = cone_agreement(v0, p0, op0, 8.0, 4.0, cfg, 1.0, 1.0);
    CHECK(rep_free.sup_inside < 1e-13);
}

TEST_CASE("cone agreement: truncation radii differ only outside the cones" * doctest::timeout(600)) {
    TorusGrid g(2, 16.0, 128);
    auto op = noisy_op(g, 31);
    const double cgg = calibrate_C_gg(op);
    std::vector<ConeSpec> cones = {{2.0, g.center()}};
    const double C = calibrate_local_constant(op, cones, 100);

    EvolveConfig cfg;
    cfg.cubic = true;
    cfg.cfl = 0.1;
    cfg.record_stride = 40;

    const double L = 4.0, R = 8.0;
    auto cen = g.center();
    RealField v0 = gaussian_blob(g, cen, 0.5);
    std::array<double, 3> off = {cen[0] + L + 1.5, cen[1], 0.0};
    v0 += gaussian_blob(g, off, 0.4, 0.5);
    RealField p0(g);

    auto rep = cone_agreement(v0, p0, op, R, L, cfg, cgg, C);
    INFO("sup_inside=", rep.sup_inside, " tol=", rep.tol, " outside=", rep.outside_diff);
    CHECK(rep.inside_pass);
    CHECK(rep.power_pass);
    CHECK(rep.diff_trace.positive_pass);
    CHECK(rep.pass);
}

TEST_CASE("classical speed control: compact data stay in the light cone" * doctest::timeout(300)) {
    TorusGrid g(2, 16.0, 128);
    auto op = free_op(g);
    auto tr = make_truncation(g, 4.0);
    EvolveConfig cfg;
    cfg.cubic = false;
    cfg.T = 4.0;
    cfg.cfl = 0.25;
    cfg.record_stride = 100;

    auto cen = g.center();
    WaveState s;
    s.v = mean_zero_bump(g, cen, 1.0);
    s.p = RealField(g);
    auto rep = classical_speed_check(s, cen, 1.0, op, tr, cfg);
    INFO("worst ratio ", rep.worst);
    CHECK(rep.pass);
}
