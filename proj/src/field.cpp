#include "stowave/field.hpp"

#include <cmath>
#include <stdexcept>

namespace stowave {

TorusGrid::TorusGrid(int dim, double side, int pts) : d_(dim), side_(side), n_(pts) {
    if (d_ != 2 && d_ != 3) throw std::invalid_argument("TorusGrid: dimension must be 2 or 3");
    if (side_ <= 0.0) throw std::invalid_argument("TorusGrid: side length must be positive");
    if (n_ < 8 || n_ % 2 != 0) throw std::invalid_argument("TorusGrid: n must be even and >= 8");
    h_ = side_ / n_;
    k0_ = 2.0 * M_PI / side_;
    size_ = 1;
    cellvol_ = 1.0;
    vol_ = 1.0;
    for (int j = 0; j < d_; ++j) {
        size_ *= static_cast<std::size_t>(n_);
        cellvol_ *= h_;
        vol_ *= side_;
    }
}

std::array<int, 3> TorusGrid::coords(std::size_t idx) const {
    std::array<int, 3> c = {0, 0, 0};
    if (d_ == 2) {
        c[1] = static_cast<int>(idx % n_);
        c[0] = static_cast<int>(idx / n_);
    } else {
        c[2] = static_cast<int>(idx % n_);
        idx /= n_;
        c[1] = static_cast<int>(idx % n_);
        c[0] = static_cast<int>(idx / n_);
    }
    return c;
}

std::size_t TorusGrid::index(const std::array<int, 3>& c) const {
    if (d_ == 2) return static_cast<std::size_t>(c[0]) * n_ + c[1];
    return (static_cast<std::size_t>(c[0]) * n_ + c[1]) * n_ + c[2];
}

double TorusGrid::torus_dist(const std::array<double, 3>& a, const std::array<double, 3>& b) const {
    double s = 0.0;
    for (int j = 0; j < d_; ++j) {
        double dj = std::fabs(a[j] - b[j]);
        dj = std::fmod(dj, side_);
        if (dj > 0.5 * side_) dj = side_ - dj;
        s += dj * dj;
    }
    return std::sqrt(s);
}

std::array<double, 3> TorusGrid::center() const {
    std::array<double, 3> c = {0.0, 0.0, 0.0};
    for (int j = 0; j < d_; ++j) c[j] = 0.5 * side_;
    return c;
}

RealField& RealField::operator+=(const RealField& o) {
    for (std::size_t i = 0; i < v.size(); ++i) v[i] += o.v[i];
    return *this;
}

RealField& RealField::operator-=(const RealField& o) {
    for (std::size_t i = 0; i < v.size(); ++i) v[i] -= o.v[i];
    return *this;
}

RealField& RealField::operator*=(double c) {
    for (double& x : v) x *= c;
    return *this;
}

double RealField::max_abs() const {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::fabs(x));
    return m;
}

bool RealField::all_finite() const {
    for (double x : v)
        if (!std::isfinite(x)) return false;
    return true;
}

RealField operator+(RealField a, const RealField& b) { return a += b; }
RealField operator-(RealField a, const RealField& b) { return a -= b; }
RealField operator*(double c, RealField a) { return a *= c; }

} // namespace stowave
