#pragma once

#include <cmath>
#include <functional>
#include <limits>

#include "entrex/errors.hpp"

namespace entrex {

/// Brent's method on a bracketing interval [a, b] with f(a)*f(b) <= 0.
/// Combines bisection, secant and inverse quadratic interpolation.
inline double brent(const std::function<double(double)>& f, double a, double b,
                    double xtol = 1e-13, int maxit = 200) {
    double fa = f(a), fb = f(b);
    if (fa == 0.0) return a;
    if (fb == 0.0) return b;
    if (fa * fb > 0.0) throw InvalidInput("brent: root not bracketed");
    double c = a, fc = fa, d = b - a, e = d;
    for (int iter = 0; iter < maxit; ++iter) {
        if (std::abs(fc) < std::abs(fb)) {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        const double tol1 = 2.0 * std::numeric_limits<double>::epsilon() * std::abs(b) + 0.5 * xtol;
        const double xm = 0.5 * (c - b);
        if (std::abs(xm) <= tol1 || fb == 0.0) return b;
        if (std::abs(e) >= tol1 && std::abs(fa) > std::abs(fb)) {
            double p, q;
            const double s = fb / fa;
            if (a == c) {
                p = 2.0 * xm * s;
                q = 1.0 - s;
            } else {
                const double qq = fa / fc;
                const double r = fb / fc;
                p = s * (2.0 * xm * qq * (qq - r) - (b - a) * (r - 1.0));
                q = (qq - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if (p > 0.0) q = -q;
            p = std::abs(p);
            const double min1 = 3.0 * xm * q - std::abs(tol1 * q);
            const double min2 = std::abs(e * q);
            if (2.0 * p < (min1 < min2 ? min1 : min2)) {
                e = d;
                d = p / q;
            } else {
                d = xm;
                e = d;
            }
        } else {
            d = xm;
            e = d;
        }
        a = b;
        fa = fb;
        if (std::abs(d) > tol1)
            b += d;
        else
            b += (xm >= 0.0 ? tol1 : -tol1);
        fb = f(b);
        if (fb * fc > 0.0) {
            c = a;
            fc = fa;
            e = d = b - a;
        }
    }
    return b;
}

}  // namespace entrex
