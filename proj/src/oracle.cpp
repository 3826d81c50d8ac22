#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>

#include "stowave/dynamics.hpp"

namespace stowave {

namespace {

struct EigenSystem {
    Eigen::MatrixXd V;       // B-orthonormal eigenvectors, columns
    Eigen::VectorXd omega;   // sqrt of eigenvalues of -H_>> (all >= 1 after calibration)
    Eigen::MatrixXd VtB;     // V^T B, maps fields to eigen coordinates
};

EigenSystem assemble(const TransformedOperator& op, const TruncationConfig& tr) {
    const TorusGrid& g = *op.grid;
    const int N = static_cast<int>(g.size());
    const double hd = g.cell_volume();

    // quadratic-form matrix of -H_>> and weighted mass matrix
    Eigen::MatrixXd S(N, N);
    RealField e(g);
    for (int j = 0; j < N; ++j) {
        e[j] = 1.0;
        auto col = apply_H_in_v(e, op, tr, Variant::gap);
        for (int i = 0; i < N; ++i) S(i, j) = -hd * op.exp2W[i] * col[i];
        e[j] = 0.0;
    }
    S = 0.5 * (S + S.transpose().eval());  // kill round-off asymmetry
    Eigen::VectorXd Bdiag(N);
    for (int i = 0; i < N; ++i) Bdiag(i) = hd * op.exp2W[i];

    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(S, Bdiag.asDiagonal().toDenseMatrix());
    if (es.info() != Eigen::Success) throw std::runtime_error("duhamel_oracle: eigensolve failed");
    if (es.eigenvalues().minCoeff() <= 0.0)
        throw std::runtime_error("duhamel_oracle: -H_>> not positive, calibrate C_gg first");

    EigenSystem sys;
    sys.V = es.eigenvectors();
    sys.omega = es.eigenvalues().cwiseSqrt();
    sys.VtB = sys.V.transpose() * Bdiag.asDiagonal();
    return sys;
}

// One Picard solve over [0, horizon]; returns false if the iteration fails
// to contract.
bool picard_segment(const EigenSystem& sys, const TransformedOperator& op,
                    const TruncationConfig& tr, bool cubic, const Eigen::VectorXd& y0,
                    const Eigen::VectorXd& yd0, double horizon, int nq, double tol,
                    Eigen::VectorXd& y_out, Eigen::VectorXd& yd_out) {
    const int N = static_cast<int>(y0.size());
    const double ds = horizon / nq;
    const auto& w = sys.omega;

    // homogeneous part at the nodes
    Eigen::MatrixXd hom(N, nq + 1);
    for (int j = 0; j <= nq; ++j) {
        const double t = j * ds;
        for (int k = 0; k < N; ++k) {
            const double wt = w(k) * t;
            hom(k, j) = std::cos(wt) * y0(k) + std::sin(wt) / w(k) * yd0(k);
        }
    }

    Eigen::MatrixXd Y = hom;
    Eigen::MatrixXd G(N, nq + 1);
    Eigen::MatrixXd Cc(N, nq + 1), Sc(N, nq + 1);  // cumulative cos/sin integrals

    const int max_iter = 200;
    double prev_diff = INFINITY;
    int grew = 0;
    for (int it = 0; it < max_iter; ++it) {
        // forcing g = Xi^R_<= v - (cubic) e^{2W} v^3 in eigen coordinates
        for (int j = 0; j <= nq; ++j) {
            Eigen::VectorXd v = sys.V * Y.col(j);
            Eigen::VectorXd gv(N);
            for (int i = 0; i < N; ++i) {
                const double xi_low = tr.C_gg + tr.chi[i] * op.Z_low[i];
                double val = xi_low * v(i);
                if (cubic) val -= op.exp2W[i] * v(i) * v(i) * v(i);
                gv(i) = val;
            }
            G.col(j) = sys.VtB * gv;
        }
        // cumulative integrals of cos(w s) G and sin(w s) G on the node grid;
        // Simpson pairs per parity, 4-point start for the odd chain
        Eigen::MatrixXd Fc(N, nq + 1), Fs(N, nq + 1);
        for (int j = 0; j <= nq; ++j)
            for (int k = 0; k < N; ++k) {
                const double ws = w(k) * j * ds;
                Fc(k, j) = std::cos(ws) * G(k, j);
                Fs(k, j) = std::sin(ws) * G(k, j);
            }
        auto cumulate = [&](const Eigen::MatrixXd& F, Eigen::MatrixXd& out) {
            out.col(0).setZero();
            if (nq >= 3)
                out.col(1) = out.col(0) +
                             ds / 24.0 * (9.0 * F.col(0) + 19.0 * F.col(1) - 5.0 * F.col(2) + F.col(3));
            else
                out.col(1) = 0.5 * ds * (F.col(0) + F.col(1));
            for (int j = 2; j <= nq; ++j)
                out.col(j) = out.col(j - 2) +
                             ds / 3.0 * (F.col(j - 2) + 4.0 * F.col(j - 1) + F.col(j));
        };
        cumulate(Fc, Cc);
        cumulate(Fs, Sc);

        double diff = 0.0;
        for (int j = 0; j <= nq; ++j) {
            Eigen::VectorXd ynew(N);
            const double t = j * ds;
            for (int k = 0; k < N; ++k) {
                const double wt = w(k) * t;
                ynew(k) = hom(k, j) +
                          (std::sin(wt) * Cc(k, j) - std::cos(wt) * Sc(k, j)) / w(k);
            }
            diff = std::max(diff, (ynew - Y.col(j)).norm());
            Y.col(j) = ynew;
        }
        if (diff <= tol) {
            y_out = Y.col(nq);
            yd_out.resize(N);
            for (int k = 0; k < N; ++k) {
                const double wt = w(k) * horizon;
                yd_out(k) = -w(k) * std::sin(wt) * y0(k) + std::cos(wt) * yd0(k) +
                            std::cos(wt) * Cc(k, nq) + std::sin(wt) * Sc(k, nq);
            }
            return true;
        }
        grew = diff > prev_diff ? grew + 1 : 0;
        if (grew >= 3 || !std::isfinite(diff)) return false;
        prev_diff = diff;
    }
    return false;
}

} // namespace

WaveState duhamel_oracle(const WaveState& initial, const TransformedOperator& op,
                         const TruncationConfig& tr, const EvolveConfig& cfg, double picard_tol,
                         int quad_points) {
    const TorusGrid& g = *op.grid;
    const std::size_t max_pts = g.dim() == 2 ? 24 * 24 : 24 * 24 * 24;
    if (g.size() > max_pts)
        throw std::invalid_argument("duhamel_oracle: grid too large for dense matrices");

    auto sys = assemble(op, tr);
    const int N = static_cast<int>(g.size());

    Eigen::VectorXd v0(N), p0(N);
    for (int i = 0; i < N; ++i) {
        v0(i) = initial.v[i];
        p0(i) = initial.p[i];
    }
    Eigen::VectorXd y = sys.VtB * v0;
    Eigen::VectorXd yd = sys.VtB * p0;

    double remaining = cfg.T;
    double horizon = cfg.T;
    const double min_horizon = cfg.T / 1024.0;
    while (remaining > 1e-14 * cfg.T) {
        const double h = std::min(horizon, remaining);
        const int nq = std::max(8, static_cast<int>(std::lround(quad_points * h / cfg.T)) & ~1);
        Eigen::VectorXd ynew, ydnew;
        if (picard_segment(sys, op, tr, cfg.cubic, y, yd, h, nq, picard_tol, ynew, ydnew)) {
            y = ynew;
            yd = ydnew;
            remaining -= h;
        } else {
            horizon = 0.5 * h;
            if (horizon < min_horizon)
                throw std::runtime_error("duhamel_oracle: Picard fails to contract");
        }
    }

    Eigen::VectorXd vf = sys.V * y;
    Eigen::VectorXd pf = sys.V * yd;
    WaveState out;
    out.t = initial.t + cfg.T;
    out.v = RealField(g);
    out.p = RealField(g);
    for (int i = 0; i < N; ++i) {
        out.v[i] = vf(i);
        out.p[i] = pf(i);
    }
    return out;
}

} // namespace stowave
