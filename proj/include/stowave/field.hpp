#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <vector>

namespace stowave {

/** Periodic discretization of the torus (M*T)^d, d = 2 or 3.
 *
 * Grid points are x_i = i*h, i = 0..n-1 per axis, h = M/n. The dual
 * frequency set is K = {2*pi*k/M : k integer, -n/2 <= k < n/2} per axis,
 * stored in standard FFT order (index i maps to k = i for i < n/2 and
 * k = i-n otherwise). Odd-order derivative symbols vanish on the Nyquist
 * planes |k| = n/2 so that derivatives of real fields stay real; noise
 * sampling puts no mass there either.
 */
class TorusGrid {
  public:
    TorusGrid(int dim, double side, int pts);

    int dim() const { return d_; }
    double side() const { return side_; }            // M
    int pts() const { return n_; }                   // n per axis
    double spacing() const { return h_; }            // h = M/n
    std::size_t size() const { return size_; }       // n^d
    double cell_volume() const { return cellvol_; }  // h^d
    double volume() const { return vol_; }           // M^d

    // integer frequency k in [-n/2, n/2) for array index i in [0, n)
    int kindex(int i) const { return i < n_ / 2 ? i : i - n_; }
    bool is_nyquist(int i) const { return i == n_ / 2; }
    // physical frequency kappa = 2*pi*k/M
    double freq(int i) const { return k0_ * kindex(i); }
    double freq_step() const { return k0_; }  // 2*pi/M

    std::array<int, 3> coords(std::size_t idx) const;
    std::size_t index(const std::array<int, 3>& c) const;
    double coord(int i) const { return h_ * i; }

    // largest |kappa| along one axis (Nyquist), used for CFL bounds
    double max_axis_freq() const { return k0_ * (n_ / 2); }

    // minimum-image distance between physical points
    double torus_dist(const std::array<double, 3>& a, const std::array<double, 3>& b) const;
    std::array<double, 3> center() const;

    bool operator==(const TorusGrid& o) const {
        return d_ == o.d_ && n_ == o.n_ && side_ == o.side_;
    }

  private:
    int d_;
    double side_;
    int n_;
    double h_, cellvol_, vol_, k0_;
    std::size_t size_;
};

/** One real value per grid point, row-major. */
struct RealField {
    const TorusGrid* grid = nullptr;
    std::vector<double> v;

    RealField() = default;
    explicit RealField(const TorusGrid& g) : grid(&g), v(g.size(), 0.0) {}

    double& operator[](std::size_t i) { return v[i]; }
    double operator[](std::size_t i) const { return v[i]; }
    std::size_t size() const { return v.size(); }

    RealField& operator+=(const RealField& o);
    RealField& operator-=(const RealField& o);
    RealField& operator*=(double c);

    double max_abs() const;
    bool all_finite() const;
};

RealField operator+(RealField a, const RealField& b);
RealField operator-(RealField a, const RealField& b);
RealField operator*(double c, RealField a);

/** One complex coefficient per frequency in K, same storage order as the
 *  real grid. For real fields the coefficients are Hermitian-symmetric,
 *  c(-kappa) = conj(c(kappa)). With the normalization used throughout
 *  (forward transform divides by n^d), Parseval reads
 *      h^d * sum_x f(x)^2 = M^d * sum_kappa |c(kappa)|^2.
 */
struct SpectralCoeffs {
    const TorusGrid* grid = nullptr;
    std::vector<std::complex<double>> c;

    SpectralCoeffs() = default;
    explicit SpectralCoeffs(const TorusGrid& g) : grid(&g), c(g.size(), {0.0, 0.0}) {}

    std::complex<double>& operator[](std::size_t i) { return c[i]; }
    const std::complex<double>& operator[](std::size_t i) const { return c[i]; }
    std::size_t size() const { return c.size(); }
};

} // namespace stowave
