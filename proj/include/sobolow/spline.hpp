#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace sobolow {

// Clamped cubic spline (first derivatives prescribed at both ends). Used to
// evaluate tabulated eigenfunctions and their derivatives between grid nodes.
class CubicSpline {
public:
    CubicSpline() = default;

    CubicSpline(std::vector<double> x, std::vector<double> y, double left_slope, double right_slope)
        : x_(std::move(x)), y_(std::move(y)) {
        const std::size_t n = x_.size();
        if (n < 2 || y_.size() != n) throw std::invalid_argument("CubicSpline: need matching x,y with n >= 2");
        for (std::size_t i = 0; i + 1 < n; ++i)
            if (!(x_[i + 1] > x_[i])) throw std::invalid_argument("CubicSpline: abscissae must increase");

        // tridiagonal system for the moments (second derivatives)
        std::vector<double> a(n, 0.0), b(n, 0.0), c(n, 0.0), r(n, 0.0);
        double h0 = x_[1] - x_[0];
        b[0] = 2.0 * h0;
        c[0] = h0;
        r[0] = 6.0 * ((y_[1] - y_[0]) / h0 - left_slope);
        for (std::size_t i = 1; i + 1 < n; ++i) {
            double hm = x_[i] - x_[i - 1], hp = x_[i + 1] - x_[i];
            a[i] = hm;
            b[i] = 2.0 * (hm + hp);
            c[i] = hp;
            r[i] = 6.0 * ((y_[i + 1] - y_[i]) / hp - (y_[i] - y_[i - 1]) / hm);
        }
        double hn = x_[n - 1] - x_[n - 2];
        a[n - 1] = hn;
        b[n - 1] = 2.0 * hn;
        r[n - 1] = 6.0 * (right_slope - (y_[n - 1] - y_[n - 2]) / hn);

        // Thomas sweep; the matrix is diagonally dominant
        m_.assign(n, 0.0);
        for (std::size_t i = 1; i < n; ++i) {
            double w = a[i] / b[i - 1];
            b[i] -= w * c[i - 1];
            r[i] -= w * r[i - 1];
        }
        m_[n - 1] = r[n - 1] / b[n - 1];
        for (std::size_t i = n - 1; i-- > 0;) m_[i] = (r[i] - c[i] * m_[i + 1]) / b[i];
    }

    // End slopes from one-sided 4-point Lagrange differentiation.
    static CubicSpline with_fd_slopes(std::vector<double> x, std::vector<double> y) {
        if (x.size() < 4) throw std::invalid_argument("CubicSpline::with_fd_slopes: need >= 4 points");
        double sl = lagrange_deriv(x.data(), y.data(), x.front());
        std::size_t n = x.size();
        double xr[4] = {x[n - 4], x[n - 3], x[n - 2], x[n - 1]};
        double yr[4] = {y[n - 4], y[n - 3], y[n - 2], y[n - 1]};
        double sr = lagrange_deriv(xr, yr, x.back());
        return CubicSpline(std::move(x), std::move(y), sl, sr);
    }

    double value(double x) const {
        auto [i, t, h] = locate(x);
        double xa = x_[i], xb = x_[i + 1];
        double A = (xb - t) / h, B = (t - xa) / h;
        return A * y_[i] + B * y_[i + 1]
             + ((A * A * A - A) * m_[i] + (B * B * B - B) * m_[i + 1]) * h * h / 6.0;
    }

    double deriv(double x) const {
        auto [i, t, h] = locate(x);
        double xa = x_[i], xb = x_[i + 1];
        double A = (xb - t) / h, B = (t - xa) / h;
        return (y_[i + 1] - y_[i]) / h
             + ((3.0 * B * B - 1.0) * m_[i + 1] - (3.0 * A * A - 1.0) * m_[i]) * h / 6.0;
    }

    const std::vector<double>& abscissae() const { return x_; }

private:
    struct Loc { std::size_t i; double t; double h; };

    Loc locate(double x) const {
        double t = std::clamp(x, x_.front(), x_.back());
        auto it = std::upper_bound(x_.begin(), x_.end(), t);
        std::size_t i = (it == x_.begin()) ? 0 : static_cast<std::size_t>(it - x_.begin()) - 1;
        if (i + 1 >= x_.size()) i = x_.size() - 2;
        return {i, t, x_[i + 1] - x_[i]};
    }

    static double lagrange_deriv(const double* x, const double* y, double at) {
        double s = 0.0;
        for (int j = 0; j < 4; ++j) {
            double num = 0.0, den = 1.0;
            for (int k = 0; k < 4; ++k) {
                if (k == j) continue;
                den *= x[j] - x[k];
                double prod = 1.0;
                for (int m = 0; m < 4; ++m) {
                    if (m == j || m == k) continue;
                    prod *= at - x[m];
                }
                num += prod;
            }
            s += y[j] * num / den;
        }
        return s;
    }

    std::vector<double> x_, y_, m_;
};

} // namespace sobolow
