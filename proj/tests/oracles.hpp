#pragma once

// Test-only reference integrators and generators, independent of the adaptive
// machinery they are used to check.

#include <cmath>
#include <functional>
#include <random>
#include <vector>

#include "entrex/smallalg.hpp"

namespace oracles {

using Vec = std::vector<double>;

/// Classical fixed-step RK4 on y' = f(y, t); returns y(t1).
inline Vec rk4_fixed(const std::function<Vec(const Vec&, double)>& f, Vec y, double t0, double t1,
                     long steps) {
    const double h = (t1 - t0) / static_cast<double>(steps);
    double t = t0;
    const size_t n = y.size();
    Vec k1, k2, k3, k4, tmp(n);
    for (long s = 0; s < steps; ++s) {
        k1 = f(y, t);
        for (size_t i = 0; i < n; ++i) tmp[i] = y[i] + 0.5 * h * k1[i];
        k2 = f(tmp, t + 0.5 * h);
        for (size_t i = 0; i < n; ++i) tmp[i] = y[i] + 0.5 * h * k2[i];
        k3 = f(tmp, t + 0.5 * h);
        for (size_t i = 0; i < n; ++i) tmp[i] = y[i] + h * k3[i];
        k4 = f(tmp, t + h);
        for (size_t i = 0; i < n; ++i) y[i] += h / 6.0 * (k1[i] + 2 * k2[i] + 2 * k3[i] + k4[i]);
        t += h;
    }
    return y;
}

/// Fixed-step RK4 fundamental matrix of Phi' = A(t) Phi, Phi(t0) = I.
inline entrex::smallalg::Mat rk4_fundamental(
    const std::function<entrex::smallalg::Mat(double)>& a, int dim, double t0, double t1,
    long steps) {
    auto f = [&a, dim](const Vec& z, double t) {
        const entrex::smallalg::Mat m = a(t);
        Vec out(z.size(), 0.0);
        for (int i = 0; i < dim; ++i)
            for (int k = 0; k < dim; ++k)
                for (int j = 0; j < dim; ++j)
                    out[static_cast<size_t>(i) * dim + j] +=
                        m(i, k) * z[static_cast<size_t>(k) * dim + j];
        return out;
    };
    Vec id(static_cast<size_t>(dim) * dim, 0.0);
    for (int i = 0; i < dim; ++i) id[static_cast<size_t>(i) * dim + i] = 1.0;
    const Vec flat = rk4_fixed(f, id, t0, t1, steps);
    entrex::smallalg::Mat phi(dim);
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j) phi(i, j) = flat[static_cast<size_t>(i) * dim + j];
    return phi;
}

/// Composite-trapezoid reference value of an integral on a fine grid.
inline double integral_trapezoid(const std::function<double(double)>& f, double a, double b,
                                 long n) {
    double s = 0.5 * (f(a) + f(b));
    const double h = (b - a) / static_cast<double>(n);
    for (long i = 1; i < n; ++i) s += f(a + h * i);
    return s * h;
}

inline std::mt19937& rng(unsigned seed = 20240917u) {
    static std::mt19937 gen(seed);
    return gen;
}

inline double uniform(double lo, double hi) {
    std::uniform_real_distribution<double> d(lo, hi);
    return d(rng());
}

inline entrex::smallalg::Mat random_mat(int dim, double scale = 1.0) {
    entrex::smallalg::Mat m(dim);
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j) m(i, j) = uniform(-scale, scale);
    return m;
}

/// Random orthogonal matrix as a product of Givens rotations.
inline entrex::smallalg::Mat random_orthogonal(int dim) {
    entrex::smallalg::Mat q = entrex::smallalg::Mat::identity(dim);
    for (int p = 0; p < dim; ++p)
        for (int r = p + 1; r < dim; ++r) {
            const double th = uniform(0.0, 6.283185307179586);
            const double c = std::cos(th), s = std::sin(th);
            for (int j = 0; j < dim; ++j) {
                const double a = q(p, j), b = q(r, j);
                q(p, j) = c * a - s * b;
                q(r, j) = s * a + c * b;
            }
        }
    return q;
}

}  // namespace oracles
