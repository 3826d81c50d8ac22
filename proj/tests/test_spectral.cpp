#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>

#include "stowave/rng.hpp"
#include "stowave/spectral.hpp"

using namespace stowave;

namespace {

RealField harmonic_cos(const TorusGrid& g, const std::array<int, 3>& kvec, double amp = 1.0) {
    RealField f(g);
    for (std::size_t i = 0; i < g.size(); ++i) {
        auto c = g.coords(i);
        double phase = 0.0;
        for (int j = 0; j < g.dim(); ++j) phase += g.freq_step() * kvec[j] * g.coord(c[j]);
        f[i] = amp * std::cos(phase);
    }
    return f;
}

} // namespace

TEST_CASE("forward transform: constant field is pure zero mode") {
    TorusGrid g(2, 16.0, 32);
    RealField f(g);
    for (auto& x : f.v) x = 1.0;
    auto c = forward_transform(f);
    CHECK(std::abs(c[0] - std::complex<double>(1.0, 0.0)) < 1e-13);
    double off = 0.0;
    for (std::size_t i = 1; i < c.size(); ++i) off = std::max(off, std::abs(c[i]));
    CHECK(off < 1e-13);
}

TEST_CASE("forward transform: single cosine splits into +/- pair") {
    TorusGrid g(2, 16.0, 32);
    auto f = harmonic_cos(g, {1, 0, 0});
    auto c = forward_transform(f);
    const std::size_t ip = g.index({1, 0, 0});
    const std::size_t im = g.index({31, 0, 0});
    CHECK(std::abs(c[ip] - 0.5) < 1e-12);
    CHECK(std::abs(c[im] - 0.5) < 1e-12);
    double off = 0.0;
    for (std::size_t i = 0; i < c.size(); ++i)
        if (i != ip && i != im) off = std::max(off, std::abs(c[i]));
    CHECK(off < 1e-12);
}

TEST_CASE("round trip and Parseval on random fields") {
    for (int dim : {2, 3}) {
        TorusGrid g(dim, 8.0, dim == 2 ? 32 : 16);
        for (uint64_t seed = 0; seed < (dim == 2 ? 100u : 20u); ++seed) {
            RealField f(g);
            uint64_t st = hash_key(seed, 11);
            for (auto& x : f.v) x = gaussian(st);
            auto c = forward_transform(f);
            auto back = inverse_transform(c);
            double err = 0.0, scale = f.max_abs();
            for (std::size_t i = 0; i < f.size(); ++i)
                err = std::max(err, std::fabs(back[i] - f[i]));
            CHECK(err / scale < 1e-12);

            // h^d sum f^2 = M^d sum |c|^2
            double lhs = inner(f, f);
            double rhs = 0.0;
            for (auto& z : c.c) rhs += std::norm(z);
            rhs *= g.volume();
            CHECK(std::fabs(lhs - rhs) / lhs < 1e-10);
        }
    }
}

TEST_CASE("forward transform rejects non-finite input") {
    TorusGrid g(2, 4.0, 8);
    RealField f(g);
    f[3] = std::nan("");
    CHECK_THROWS_AS(forward_transform(f), std::invalid_argument);
}

TEST_CASE("multiplier: helmholtz inverse halves |kappa| = 1 plane wave") {
    // M = 2*pi so that kappa_0 = e_1 exactly
    TorusGrid g(2, 2.0 * M_PI, 16);
    auto f = harmonic_cos(g, {1, 0, 0});
    auto out = apply_multiplier(f, FourierMultiplier::helmholtz_inverse());
    double err = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) err = std::max(err, std::fabs(out[i] - 0.5 * f[i]));
    CHECK(err < 1e-12);
}

TEST_CASE("multiplier: identity and inverse composition") {
    TorusGrid g(2, 16.0, 32);
    auto f = random_smooth_field(g, 42);
    auto idf = apply_multiplier(f, FourierMultiplier::identity());
    double err = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) err = std::max(err, std::fabs(idf[i] - f[i]));
    CHECK(err < 1e-12);

    auto comp = apply_multiplier(apply_multiplier(f, FourierMultiplier::helmholtz_inverse()),
                                 FourierMultiplier::one_minus_laplacian());
    err = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) err = std::max(err, std::fabs(comp[i] - f[i]));
    CHECK(err / f.max_abs() < 1e-12);
}

TEST_CASE("multiplier with real even symbol preserves Hermitian symmetry") {
    TorusGrid g(2, 16.0, 32);
    auto f = random_smooth_field(g, 5);
    auto c = apply_multiplier(forward_transform(f), FourierMultiplier::helmholtz_inverse());
    double worst = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        auto cs = g.coords(i);
        std::array<int, 3> m = {0, 0, 0};
        for (int j = 0; j < g.dim(); ++j) m[j] = (g.pts() - cs[j]) % g.pts();
        worst = std::max(worst, std::abs(c[i] - std::conj(c[g.index(m)])));
    }
    CHECK(worst < 1e-13);
}

TEST_CASE("gradient: constant and exact harmonic") {
    TorusGrid g(2, 16.0, 64);
    RealField cst(g);
    for (auto& x : cst.v) x = 3.0;
    auto gc = gradient(cst);
    CHECK(gc[0].max_abs() < 1e-12);
    CHECK(gc[1].max_abs() < 1e-12);

    RealField s(g);
    for (std::size_t i = 0; i < g.size(); ++i)
        s[i] = std::sin(2.0 * M_PI * g.coord(g.coords(i)[0]) / g.side());
    auto gs = gradient(s);
    double err = 0.0;
    const double k = 2.0 * M_PI / g.side();
    for (std::size_t i = 0; i < g.size(); ++i) {
        const double want = k * std::cos(2.0 * M_PI * g.coord(g.coords(i)[0]) / g.side());
        err = std::max(err, std::fabs(gs[0][i] - want));
    }
    CHECK(err < 1e-10);
    CHECK(gs[1].max_abs() < 1e-10);
}

TEST_CASE("integration by parts: int grad f . grad g = -int f lap g") {
    TorusGrid g(2, 16.0, 64);
    auto f = random_smooth_field(g, 1);
    auto h = random_smooth_field(g, 2);
    auto gf = gradient(f);
    auto gh = gradient(h);
    double lhs = inner(gf[0], gh[0]) + inner(gf[1], gh[1]);
    double rhs = -inner(f, laplacian(h));
    CHECK(std::fabs(lhs - rhs) / std::fabs(lhs) < 1e-10);
}

TEST_CASE("littlewood-paley: constant lives in block -1") {
    TorusGrid g(2, 16.0, 32);
    RealField f(g);
    for (auto& x : f.v) x = 2.5;
    auto b = lp_block(f, -1);
    double err = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) err = std::max(err, std::fabs(b[i] - f[i]));
    CHECK(err < 1e-12);
    CHECK(lp_block(f, 0).max_abs() < 1e-12);
    CHECK(lp_block(f, 3).max_abs() < 1e-12);
}

TEST_CASE("littlewood-paley: harmonic concentrates in neighboring blocks") {
    TorusGrid g(2, 16.0, 128);
    // |kappa| = 2pi/16 * 10 ~ 3.93, between 2^1 and 2^2
    auto f = harmonic_cos(g, {10, 0, 0});
    const int j0 = 2;
    double inside = 0.0, outside = 0.0;
    for (int j = -1; j <= max_lp_block(g); ++j) {
        const double nrm = l2_norm(lp_block(f, j));
        if (j >= j0 - 1 && j <= j0 + 1)
            inside += nrm * nrm;
        else
            outside += nrm * nrm;
    }
    CHECK(outside / (inside + outside) < 1e-12);
}

TEST_CASE("littlewood-paley reconstruction") {
    TorusGrid g(2, 16.0, 64);
    uint64_t st = 99;
    RealField f(g);
    for (auto& x : f.v) x = gaussian(st);
    RealField sum(g);
    for (int j = -1; j <= max_lp_block(g); ++j) sum += lp_block(f, j);
    double err = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) err = std::max(err, std::fabs(sum[i] - f[i]));
    CHECK(err / f.max_abs() < 1e-10);
}

TEST_CASE("integrate: area, mean-zero harmonic, Parseval cross-check") {
    TorusGrid g(2, 4.0, 16);
    RealField one(g);
    for (auto& x : one.v) x = 1.0;
    CHECK(integrate(one) == doctest::Approx(16.0).epsilon(1e-14));

    TorusGrid g2(2, 16.0, 64);
    RealField s(g2);
    for (std::size_t i = 0; i < g2.size(); ++i)
        s[i] = std::sin(2.0 * M_PI * g2.coord(g2.coords(i)[0]) / g2.side());
    CHECK(std::fabs(integrate(s)) < 1e-12);

    auto f = random_smooth_field(g2, 17);
    auto c = forward_transform(f);
    double spec = 0.0;
    for (auto& z : c.c) spec += std::norm(z);
    spec *= g2.volume();
    CHECK(std::fabs(integrate(pointwise_product(f, f)) - spec) / spec < 1e-10);
}

TEST_CASE("pointwise: product with one, exp of zero") {
    TorusGrid g(2, 8.0, 16);
    auto f = random_smooth_field(g, 3);
    RealField one(g);
    for (auto& x : one.v) x = 1.0;
    auto p = pointwise_product(f, one);
    for (std::size_t i = 0; i < f.size(); ++i) CHECK(p[i] == f[i]);

    RealField z(g);
    auto e = pointwise_exp(z);
    for (std::size_t i = 0; i < e.size(); ++i) CHECK(e[i] == 1.0);
}

TEST_CASE("pointwise exp rejects overflow range") {
    TorusGrid g(2, 8.0, 16);
    RealField f(g);
    f[0] = 701.0;
    CHECK_THROWS_AS(pointwise_exp(f), std::domain_error);
}

TEST_CASE("dealiased product of band-limited harmonics matches product-to-sum") {
    TorusGrid g(2, 16.0, 64);
    // both harmonics and their sum/difference stay inside the 2/3 band (|k| <= 21)
    auto f = harmonic_cos(g, {5, 0, 0});
    auto h = harmonic_cos(g, {3, 0, 0});
    auto p = pointwise_product(f, h, true);
    auto sum = harmonic_cos(g, {8, 0, 0}, 0.5);
    auto dif = harmonic_cos(g, {2, 0, 0}, 0.5);
    double err = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i)
        err = std::max(err, std::fabs(p[i] - sum[i] - dif[i]));
    CHECK(err < 1e-10);
}

TEST_CASE("dealias projector is idempotent and kills the top third") {
    TorusGrid g(2, 16.0, 48);
    uint64_t st = 1234;
    RealField f(g);
    for (auto& x : f.v) x = gaussian(st);
    auto once = dealias(f);
    auto twice = dealias(once);
    double err = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) err = std::max(err, std::fabs(once[i] - twice[i]));
    CHECK(err < 1e-12);
    auto c = dealias(forward_transform(f));
    double top = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        auto cs = g.coords(i);
        if (std::abs(g.kindex(cs[0])) > 16 || std::abs(g.kindex(cs[1])) > 16)
            top = std::max(top, std::abs(c[i]));
    }
    CHECK(top == 0.0);
}
