#include "stowave/spectral.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>

#include "stowave/rng.hpp"

namespace stowave {

namespace {

// Plan cache keyed by (d, n). Planning is not thread-safe in FFTW, execution
// through fftw_execute_dft with fresh buffers is. FFTW_UNALIGNED keeps the
// plans valid for any buffer the caller allocates.
struct PlanPair {
    fftw_plan fwd = nullptr;
    fftw_plan bwd = nullptr;
};

PlanPair& plans_for(const TorusGrid& g) {
    static std::map<std::pair<int, int>, PlanPair> cache;
    static std::mutex mtx;
    std::lock_guard<std::mutex> lock(mtx);
    auto key = std::make_pair(g.dim(), g.pts());
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;

    std::vector<std::complex<double>> buf(g.size());
    auto* p = reinterpret_cast<fftw_complex*>(buf.data());
    int dims[3] = {g.pts(), g.pts(), g.pts()};
    PlanPair pp;
    pp.fwd = fftw_plan_dft(g.dim(), dims, p, p, FFTW_FORWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
    pp.bwd = fftw_plan_dft(g.dim(), dims, p, p, FFTW_BACKWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
    return cache.emplace(key, pp).first->second;
}

void check_same_grid(const TorusGrid* a, const TorusGrid* b) {
    if (!a || !b || !(*a == *b)) throw std::invalid_argument("fields live on different grids");
}

// frequency vector for a flat index
inline void freq_vec(const TorusGrid& g, std::size_t idx, std::array<double, 3>& k, double& kabs2) {
    auto c = g.coords(idx);
    kabs2 = 0.0;
    for (int j = 0; j < g.dim(); ++j) {
        k[j] = g.freq(c[j]);
        kabs2 += k[j] * k[j];
    }
    for (int j = g.dim(); j < 3; ++j) k[j] = 0.0;
}

} // namespace

FourierMultiplier FourierMultiplier::identity() {
    return {"id", [](double, const std::array<double, 3>&) { return 1.0; }};
}

FourierMultiplier FourierMultiplier::helmholtz_inverse() {
    return {"(1-Delta)^{-1}", [](double k2, const std::array<double, 3>&) { return 1.0 / (1.0 + k2); }};
}

FourierMultiplier FourierMultiplier::one_minus_laplacian() {
    return {"(1-Delta)", [](double k2, const std::array<double, 3>&) { return 1.0 + k2; }};
}

SpectralCoeffs forward_transform(const RealField& f) {
    if (!f.grid) throw std::invalid_argument("forward_transform: field without grid");
    if (!f.all_finite()) throw std::invalid_argument("forward_transform: non-finite input");
    const TorusGrid& g = *f.grid;
    SpectralCoeffs out(g);
    std::vector<std::complex<double>> buf(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) buf[i] = {f[i], 0.0};
    auto* p = reinterpret_cast<fftw_complex*>(buf.data());
    fftw_execute_dft(plans_for(g).fwd, p, p);
    const double scale = 1.0 / static_cast<double>(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) out[i] = buf[i] * scale;
    return out;
}

RealField inverse_transform(const SpectralCoeffs& c) {
    if (!c.grid) throw std::invalid_argument("inverse_transform: coefficients without grid");
    const TorusGrid& g = *c.grid;
    std::vector<std::complex<double>> buf(c.c);
    auto* p = reinterpret_cast<fftw_complex*>(buf.data());
    fftw_execute_dft(plans_for(g).bwd, p, p);
    RealField out(g);
    for (std::size_t i = 0; i < g.size(); ++i) out[i] = buf[i].real();
    return out;
}

SpectralCoeffs apply_multiplier(const SpectralCoeffs& c, const FourierMultiplier& m) {
    const TorusGrid& g = *c.grid;
    SpectralCoeffs out(g);
    std::array<double, 3> k;
    double k2;
    for (std::size_t i = 0; i < g.size(); ++i) {
        freq_vec(g, i, k, k2);
        const double mv = m.symbol(k2, k);
        if (!std::isfinite(mv)) throw std::invalid_argument("apply_multiplier: symbol not finite on K");
        out[i] = mv * c[i];
    }
    return out;
}

RealField apply_multiplier(const RealField& f, const FourierMultiplier& m) {
    return inverse_transform(apply_multiplier(forward_transform(f), m));
}

std::vector<RealField> gradient(const RealField& f) {
    const TorusGrid& g = *f.grid;
    SpectralCoeffs c = forward_transform(f);
    std::vector<SpectralCoeffs> dc(g.dim(), SpectralCoeffs(g));
    for (std::size_t i = 0; i < g.size(); ++i) {
        auto cs = g.coords(i);
        for (int j = 0; j < g.dim(); ++j) {
            const double kj = g.is_nyquist(cs[j]) ? 0.0 : g.freq(cs[j]);
            dc[j][i] = std::complex<double>(0.0, kj) * c[i];
        }
    }
    std::vector<RealField> out;
    out.reserve(g.dim());
    for (int j = 0; j < g.dim(); ++j) out.push_back(inverse_transform(dc[j]));
    return out;
}

RealField divergence(const std::vector<RealField>& gr) {
    const TorusGrid& g = *gr.at(0).grid;
    SpectralCoeffs acc(g);
    for (int j = 0; j < g.dim(); ++j) {
        check_same_grid(gr[j].grid, &g);
        SpectralCoeffs c = forward_transform(gr[j]);
        for (std::size_t i = 0; i < g.size(); ++i) {
            auto cs = g.coords(i);
            const double kj = g.is_nyquist(cs[j]) ? 0.0 : g.freq(cs[j]);
            acc[i] += std::complex<double>(0.0, kj) * c[i];
        }
    }
    return inverse_transform(acc);
}

RealField laplacian(const RealField& f) {
    const TorusGrid& g = *f.grid;
    SpectralCoeffs c = forward_transform(f);
    for (std::size_t i = 0; i < g.size(); ++i) {
        auto cs = g.coords(i);
        double k2 = 0.0;
        for (int j = 0; j < g.dim(); ++j) {
            const double kj = g.is_nyquist(cs[j]) ? 0.0 : g.freq(cs[j]);
            k2 += kj * kj;
        }
        c[i] *= -k2;
    }
    return inverse_transform(c);
}

double integrate(const RealField& f) {
    double s = 0.0;
    for (double x : f.v) s += x;
    return s * f.grid->cell_volume();
}

double inner(const RealField& f, const RealField& g) {
    check_same_grid(f.grid, g.grid);
    double s = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) s += f[i] * g[i];
    return s * f.grid->cell_volume();
}

double l2_norm(const RealField& f) { return std::sqrt(inner(f, f)); }

double lp_cutoff(double r) {
    if (r <= 1.0) return 1.0;
    if (r >= 1.5) return 0.0;
    const double x = 2.0 * (r - 1.0);
    const double s = x * x * x * (10.0 + x * (-15.0 + 6.0 * x));  // quintic smoothstep
    return 1.0 - s;
}

int max_lp_block(const TorusGrid& g) {
    const double kmax = g.max_axis_freq() * std::sqrt(static_cast<double>(g.dim()));
    int j = 0;
    while (std::pow(2.0, j + 1) < kmax) ++j;
    return j;
}

RealField lp_block(const RealField& f, int j) {
    if (j < -1) throw std::invalid_argument("lp_block: j must be >= -1");
    // Delta_{-1} = m(|kappa|), Delta_j = m(|kappa|/2^{j+1}) - m(|kappa|/2^j);
    // the sum over j = -1 .. max_lp_block telescopes to 1 on the grid.
    FourierMultiplier m;
    m.name = "Delta_" + std::to_string(j);
    m.symbol = [j](double k2, const std::array<double, 3>&) {
        const double r = std::sqrt(k2);
        if (j == -1) return lp_cutoff(r);
        return lp_cutoff(r / std::pow(2.0, j + 1)) - lp_cutoff(r / std::pow(2.0, j));
    };
    return apply_multiplier(f, m);
}

SpectralCoeffs dealias(const SpectralCoeffs& c) {
    const TorusGrid& g = *c.grid;
    const int kc = g.pts() / 3;
    SpectralCoeffs out(g);
    for (std::size_t i = 0; i < g.size(); ++i) {
        auto cs = g.coords(i);
        bool keep = true;
        for (int j = 0; j < g.dim(); ++j)
            if (std::abs(g.kindex(cs[j])) > kc) keep = false;
        out[i] = keep ? c[i] : std::complex<double>(0.0, 0.0);
    }
    return out;
}

RealField dealias(const RealField& f) { return inverse_transform(dealias(forward_transform(f))); }

RealField pointwise_product(const RealField& f, const RealField& g, bool dealias_product) {
    check_same_grid(f.grid, g.grid);
    RealField out(*f.grid);
    for (std::size_t i = 0; i < f.size(); ++i) out[i] = f[i] * g[i];
    if (dealias_product) out = dealias(out);
    return out;
}

RealField pointwise_exp(const RealField& f) {
    if (f.max_abs() > 700.0)
        throw std::domain_error("pointwise_exp: |input| > 700 would overflow");
    RealField out(*f.grid);
    for (std::size_t i = 0; i < f.size(); ++i) out[i] = std::exp(f[i]);
    return out;
}

RealField pointwise_power(const RealField& f, int p) {
    RealField out(*f.grid);
    for (std::size_t i = 0; i < f.size(); ++i) {
        double y = 1.0;
        for (int q = 0; q < p; ++q) y *= f[i];
        out[i] = y;
    }
    return out;
}

RealField random_smooth_field(const TorusGrid& g, uint64_t seed, double corr_scale) {
    // default correlation frequency: a quarter of the dealias band
    const double kc = corr_scale > 0.0 ? corr_scale : (g.freq_step() * g.pts() / 12.0);
    SpectralCoeffs c(g);
    const int half = g.pts() / 2;
    for (std::size_t i = 0; i < g.size(); ++i) {
        auto cs = g.coords(i);
        std::array<int, 3> k = {0, 0, 0};
        bool nyq = false;
        for (int j = 0; j < g.dim(); ++j) {
            k[j] = g.kindex(cs[j]);
            if (k[j] == -half) nyq = true;
        }
        if (nyq) continue;
        // canonical representative of the +/- pair, chosen on k itself so the
        // draw is resolution-independent
        bool canonical = true;
        for (int j = 0; j < g.dim(); ++j) {
            if (k[j] > 0) break;
            if (k[j] < 0) {
                canonical = false;
                break;
            }
        }
        if (!canonical) continue;
        double k2 = 0.0;
        for (int j = 0; j < g.dim(); ++j) {
            const double kj = g.freq_step() * k[j];
            k2 += kj * kj;
        }
        uint64_t st = hash_key(seed, k[0], k[1], k[2], 7);
        auto z = gaussian_pair(st);
        const double env = std::exp(-k2 / (2.0 * kc * kc));
        const bool self = (k[0] == 0 && k[1] == 0 && k[2] == 0);
        if (self) {
            c[i] = {z[0] * env, 0.0};
        } else {
            c[i] = {z[0] * env, z[1] * env};
            std::array<int, 3> cm = {0, 0, 0};
            for (int j = 0; j < g.dim(); ++j) cm[j] = (g.pts() - cs[j]) % g.pts();
            c[g.index(cm)] = std::conj(c[i]);
        }
    }
    RealField f = inverse_transform(dealias(c));
    const double nrm = l2_norm(f);
    if (nrm > 0.0) f *= 1.0 / nrm;
    return f;
}

RealField gaussian_blob(const TorusGrid& g, const std::array<double, 3>& center, double sigma,
                        double amplitude) {
    if (!(sigma > 0.0)) throw std::invalid_argument("gaussian_blob: sigma must be positive");
    const double cut = 5.0 * sigma;
    RealField f(g);
    for (std::size_t i = 0; i < g.size(); ++i) {
        auto cs = g.coords(i);
        std::array<double, 3> x = {0, 0, 0};
        for (int j = 0; j < g.dim(); ++j) x[j] = g.coord(cs[j]);
        const double r = g.torus_dist(x, center);
        f[i] = r >= cut ? 0.0 : amplitude * std::exp(-r * r / (2.0 * sigma * sigma));
    }
    return f;
}

RealField radial_bump(const TorusGrid& g, const std::array<double, 3>& center, double r_inner,
                      double r_outer, double amplitude) {
    if (!(0.0 <= r_inner && r_inner < r_outer))
        throw std::invalid_argument("radial_bump: need 0 <= r_inner < r_outer");
    RealField f(g);
    for (std::size_t i = 0; i < g.size(); ++i) {
        auto cs = g.coords(i);
        std::array<double, 3> x = {0, 0, 0};
        for (int j = 0; j < g.dim(); ++j) x[j] = g.coord(cs[j]);
        const double r = g.torus_dist(x, center);
        f[i] = amplitude * lp_cutoff(1.0 + 0.5 * (r - r_inner) / (r_outer - r_inner));
    }
    return f;
}

} // namespace stowave
