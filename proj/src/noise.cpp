#include "stowave/noise.hpp"

#include <cmath>
#include <stdexcept>
#include <thread>

#include "stowave/rng.hpp"

namespace stowave {

double Mollifier::profile(double r) {
    if (r <= 0.0) return 1.0;
    if (r >= 1.0) return 0.0;
    return 1.0 - r * r * r * (10.0 + r * (-15.0 + 6.0 * r));
}

namespace {

FourierMultiplier mollify_symbol(const Mollifier& m) {
    return {"mollify", [m](double k2, const std::array<double, 3>&) {
                return m.symbol(std::sqrt(k2));
            }};
}

// run fn(i) for i in [0, count) on the requested number of threads
void parallel_for(int count, int threads, const std::function<void(int)>& fn) {
    threads = std::max(1, std::min(threads, count));
    if (threads == 1) {
        for (int i = 0; i < count; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t)
        pool.emplace_back([&, t]() {
            for (int i = t; i < count; i += threads) fn(i);
        });
    for (auto& th : pool) th.join();
}

} // namespace

NoiseRealization sample_white_noise(uint64_t seed, const TorusGrid& grid) {
    SpectralCoeffs c(grid);
    const int half = grid.pts() / 2;
    const double amp_pair = 1.0 / std::sqrt(2.0 * grid.volume());
    const double amp_self = 1.0 / std::sqrt(grid.volume());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        auto cs = grid.coords(i);
        std::array<int, 3> k = {0, 0, 0};
        bool nyq = false;
        for (int j = 0; j < grid.dim(); ++j) {
            k[j] = grid.kindex(cs[j]);
            if (k[j] == -half) nyq = true;
        }
        if (nyq) continue;
        bool canonical = true;
        bool self = true;
        for (int j = 0; j < grid.dim(); ++j) {
            if (k[j] != 0) self = false;
            if (k[j] > 0) break;
            if (k[j] < 0) {
                canonical = false;
                break;
            }
        }
        if (!canonical) continue;
        uint64_t st = hash_key(seed, k[0], k[1], k[2]);
        auto z = gaussian_pair(st);
        if (self) {
            c[i] = {z[0] * amp_self, 0.0};
        } else {
            c[i] = {z[0] * amp_pair, z[1] * amp_pair};
            std::array<int, 3> cm = {0, 0, 0};
            for (int j = 0; j < grid.dim(); ++j) cm[j] = (grid.pts() - cs[j]) % grid.pts();
            c[grid.index(cm)] = std::conj(c[i]);
        }
    }
    NoiseRealization out;
    out.seed = seed;
    out.grid = &grid;
    out.xi = inverse_transform(c);
    return out;
}

double renorm_constant_a(const Mollifier& m, const TorusGrid& grid) {
    const int half = grid.pts() / 2;
    double sum = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        auto cs = grid.coords(i);
        bool nyq = false;
        double k2 = 0.0;
        for (int j = 0; j < grid.dim(); ++j) {
            if (grid.kindex(cs[j]) == -half) nyq = true;
            const double kj = grid.freq(cs[j]);
            k2 += kj * kj;
        }
        if (nyq) continue;
        const double eta = m.symbol(std::sqrt(k2));
        sum += k2 * eta * eta / ((1.0 + k2) * (1.0 + k2));
    }
    return sum / grid.volume();
}

namespace {

// |grad X_eps|^2 (dealiased) and X itself from a noise sample
struct XChain {
    RealField X;
    RealField grad_x_sq;
};

XChain x_chain(const NoiseRealization& noise, const Mollifier& m) {
    XChain out;
    auto xi_hat = forward_transform(noise.xi);
    auto moll = apply_multiplier(xi_hat, mollify_symbol(m));
    out.X = inverse_transform(apply_multiplier(moll, FourierMultiplier::helmholtz_inverse()));
    auto gx = gradient(out.X);
    RealField s = pointwise_product(gx[0], gx[0]);
    for (int j = 1; j < noise.grid->dim(); ++j) s += pointwise_product(gx[j], gx[j]);
    out.grad_x_sq = dealias(s);
    return out;
}

} // namespace

RenormConstants renorm_constant_b(const Mollifier& m, const TorusGrid& grid, int n_seeds,
                                  uint64_t seed_base, int threads) {
    if (grid.dim() != 3) throw std::invalid_argument("renorm_constant_b: d = 3 only");
    const double a = renorm_constant_a(m, grid);
    std::vector<double> samples(n_seeds, 0.0);
    parallel_for(n_seeds, threads, [&](int i) {
        auto noise = sample_white_noise(hash_key(seed_base, i, 0x5eed), grid);
        auto xc = x_chain(noise, m);
        RealField wick = xc.grad_x_sq;
        for (auto& x : wick.v) x -= a;
        auto X2 = apply_multiplier(wick, FourierMultiplier::helmholtz_inverse());
        auto g2 = gradient(X2);
        double acc = 0.0;
        for (int j = 0; j < 3; ++j)
            for (double x : g2[j].v) acc += x * x;
        samples[i] = acc / static_cast<double>(grid.size());
    });
    RenormConstants out;
    out.d = 3;
    out.eps = m.eps;
    out.side = grid.side();
    out.a = a;
    out.b_samples = n_seeds;
    double mean = 0.0;
    for (double s : samples) mean += s;
    mean /= n_seeds;
    double var = 0.0;
    for (double s : samples) var += (s - mean) * (s - mean);
    var /= std::max(1, n_seeds - 1);
    out.b = mean;
    out.b_se = std::sqrt(var / n_seeds);
    if (out.b > 0.0 && out.b_se > 0.05 * out.b)
        throw std::runtime_error("renorm_constant_b: standard error above 5% of estimate");
    return out;
}

StochasticLift build_lift(const NoiseRealization& noise, const Mollifier& m,
                          std::optional<RenormConstants> consts) {
    const TorusGrid& grid = *noise.grid;
    StochasticLift lift;
    lift.d = grid.dim();
    lift.eps = m.eps;
    lift.seed = noise.seed;
    lift.grid = &grid;
    if (consts) {
        lift.consts = *consts;
    } else {
        lift.consts.d = grid.dim();
        lift.consts.eps = m.eps;
        lift.consts.side = grid.side();
        lift.consts.a = renorm_constant_a(m, grid);
        if (grid.dim() == 3) {
            auto rc = renorm_constant_b(m, grid);
            lift.consts = rc;
        }
    }

    auto xc = x_chain(noise, m);
    lift.X = xc.X;
    lift.wick_grad_x_sq = xc.grad_x_sq;
    for (auto& x : lift.wick_grad_x_sq.v) x -= lift.consts.a;
    lift.X2 = apply_multiplier(lift.wick_grad_x_sq, FourierMultiplier::helmholtz_inverse());

    if (grid.dim() == 2) {
        lift.W = lift.X;
        return lift;
    }

    auto gx = gradient(lift.X);
    auto g2 = gradient(lift.X2);
    RealField dot(grid);
    for (int j = 0; j < 3; ++j) dot += pointwise_product(gx[j], g2[j]);
    dot = dealias(dot);
    lift.X3 = apply_multiplier(2.0 * dot, FourierMultiplier::helmholtz_inverse());

    RealField g2sq(grid);
    for (int j = 0; j < 3; ++j) g2sq += pointwise_product(g2[j], g2[j]);
    lift.wick_grad_x2_sq = dealias(g2sq);
    for (auto& x : lift.wick_grad_x2_sq.v) x -= lift.consts.b;

    auto g3 = gradient(lift.X3);
    RealField cr(grid);
    for (int j = 0; j < 3; ++j) cr += pointwise_product(gx[j], g3[j]);
    lift.cross = dealias(cr);

    lift.W = lift.X + lift.X2 + lift.X3;
    return lift;
}

ConvergenceStudy convergence_study(const TorusGrid& grid, const std::vector<double>& eps_seq,
                                   const RealField& phi, int n_seeds, uint64_t seed_base,
                                   int threads) {
    for (std::size_t i = 1; i < eps_seq.size(); ++i)
        if (!(eps_seq[i] < eps_seq[i - 1]))
            throw std::invalid_argument("convergence_study: eps sequence must decrease");
    const int ne = static_cast<int>(eps_seq.size());
    ConvergenceStudy st;
    st.eps = eps_seq;
    st.a.resize(ne);
    for (int e = 0; e < ne; ++e) st.a[e] = renorm_constant_a(Mollifier{eps_seq[e]}, grid);

    // pairing(seed, eps) tables, coupled through the shared seed
    std::vector<std::vector<double>> unren(ne, std::vector<double>(n_seeds));
    std::vector<std::vector<double>> wick(ne, std::vector<double>(n_seeds));
    std::vector<std::vector<double>> l2diff(ne > 1 ? ne - 1 : 0, std::vector<double>(n_seeds));
    parallel_for(n_seeds, threads, [&](int i) {
        auto noise = sample_white_noise(hash_key(seed_base, i, 0xc0), grid);
        RealField prevX;
        for (int e = 0; e < ne; ++e) {
            auto xc = x_chain(noise, Mollifier{eps_seq[e]});
            unren[e][i] = inner(xc.grad_x_sq, phi);
            wick[e][i] = unren[e][i] - st.a[e] * integrate(phi);
            if (e > 0) l2diff[e - 1][i] = l2_norm(xc.X - prevX);
            prevX = xc.X;
        }
    });

    auto mean_se = [&](const std::vector<double>& xs, double& mean, double& se) {
        mean = 0.0;
        for (double x : xs) mean += x;
        mean /= xs.size();
        double var = 0.0;
        for (double x : xs) var += (x - mean) * (x - mean);
        var /= std::max<std::size_t>(1, xs.size() - 1);
        se = std::sqrt(var / xs.size());
    };
    st.mean_unrenorm.resize(ne);
    st.se_unrenorm.resize(ne);
    st.mean_wick.resize(ne);
    st.se_wick.resize(ne);
    for (int e = 0; e < ne; ++e) {
        mean_se(unren[e], st.mean_unrenorm[e], st.se_unrenorm[e]);
        mean_se(wick[e], st.mean_wick[e], st.se_wick[e]);
    }
    for (int e = 0; e + 1 < ne; ++e) {
        double acc = 0.0;
        for (int i = 0; i < n_seeds; ++i) acc += std::fabs(wick[e][i] - wick[e + 1][i]);
        st.cauchy_diff.push_back(acc / n_seeds);
        acc = 0.0;
        for (int i = 0; i < n_seeds; ++i) acc += l2diff[e][i];
        st.coupled_l2_diff.push_back(acc / n_seeds);
    }
    return st;
}

} // namespace stowave
