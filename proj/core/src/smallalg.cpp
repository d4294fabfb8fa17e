#include "entrex/smallalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "entrex/errors.hpp"

namespace entrex::smallalg {

namespace {
constexpr double kEps = std::numeric_limits<double>::epsilon();
}

Mat::Mat(int dim, double fill) : dim_(dim), a_(static_cast<size_t>(dim) * dim, fill) {
    if (dim < 1) throw InvalidInput("Mat: dim must be >= 1");
}

Mat::Mat(std::initializer_list<std::initializer_list<double>> rows) {
    dim_ = static_cast<int>(rows.size());
    if (dim_ < 1) throw InvalidInput("Mat: dim must be >= 1");
    a_.reserve(static_cast<size_t>(dim_) * dim_);
    for (const auto& r : rows) {
        if (static_cast<int>(r.size()) != dim_) throw InvalidInput("Mat: ragged initializer");
        a_.insert(a_.end(), r.begin(), r.end());
    }
}

Mat Mat::identity(int dim) {
    Mat m(dim);
    for (int i = 0; i < dim; ++i) m(i, i) = 1.0;
    return m;
}

Mat Mat::transpose() const {
    Mat t(dim_);
    for (int i = 0; i < dim_; ++i)
        for (int j = 0; j < dim_; ++j) t(j, i) = (*this)(i, j);
    return t;
}

double Mat::trace() const {
    double s = 0.0;
    for (int i = 0; i < dim_; ++i) s += (*this)(i, i);
    return s;
}

double Mat::norm_inf() const {
    double best = 0.0;
    for (int i = 0; i < dim_; ++i) {
        double row = 0.0;
        for (int j = 0; j < dim_; ++j) row += std::abs((*this)(i, j));
        best = std::max(best, row);
    }
    return best;
}

double Mat::norm_fro() const {
    double s = 0.0;
    for (double v : a_) s += v * v;
    return std::sqrt(s);
}

bool Mat::all_finite() const {
    for (double v : a_)
        if (!std::isfinite(v)) return false;
    return true;
}

Mat& Mat::operator+=(const Mat& o) {
    for (size_t k = 0; k < a_.size(); ++k) a_[k] += o.a_[k];
    return *this;
}

Mat& Mat::operator-=(const Mat& o) {
    for (size_t k = 0; k < a_.size(); ++k) a_[k] -= o.a_[k];
    return *this;
}

Mat& Mat::operator*=(double s) {
    for (double& v : a_) v *= s;
    return *this;
}

Mat operator*(const Mat& a, const Mat& b) {
    const int n = a.dim();
    Mat c(n);
    for (int i = 0; i < n; ++i)
        for (int k = 0; k < n; ++k) {
            const double aik = a(i, k);
            if (aik == 0.0) continue;
            for (int j = 0; j < n; ++j) c(i, j) += aik * b(k, j);
        }
    return c;
}

std::vector<double> operator*(const Mat& a, const std::vector<double>& x) {
    const int n = a.dim();
    std::vector<double> y(n, 0.0);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) y[i] += a(i, j) * x[j];
    return y;
}

namespace {

void check_input(const Mat& m, const char* op) {
    if (m.dim() < 1 || m.dim() > kMaxDim)
        throw InvalidInput(std::string(op) + ": dim must be in [1, 16]");
    if (!m.all_finite()) throw InvalidInput(std::string(op) + ": non-finite entries");
}

// Reduce to upper Hessenberg form by stabilized elementary similarity
// transformations (pivoted Gaussian elimination).
void hessenberg(Mat& a) {
    const int n = a.dim();
    for (int m = 1; m < n - 1; ++m) {
        double x = 0.0;
        int piv = m;
        for (int j = m; j < n; ++j) {
            if (std::abs(a(j, m - 1)) > std::abs(x)) {
                x = a(j, m - 1);
                piv = j;
            }
        }
        if (piv != m) {
            for (int j = m - 1; j < n; ++j) std::swap(a(piv, j), a(m, j));
            for (int j = 0; j < n; ++j) std::swap(a(j, piv), a(j, m));
        }
        if (x != 0.0) {
            for (int i = m + 1; i < n; ++i) {
                double y = a(i, m - 1);
                if (y == 0.0) continue;
                y /= x;
                a(i, m - 1) = y;
                for (int j = m; j < n; ++j) a(i, j) -= y * a(m, j);
                for (int j = 0; j < n; ++j) a(j, m) += y * a(j, i);
            }
        }
    }
    for (int i = 2; i < n; ++i)
        for (int j = 0; j < i - 1; ++j) a(i, j) = 0.0;
}

// Francis double-shift QR on an upper Hessenberg matrix; eigenvalues only.
// Returns false when the sweep cap is hit; whatever has deflated so far plus
// the current diagonal approximations are appended in that case.
bool hqr(Mat& h, std::vector<std::complex<double>>& out, int max_sweeps) {
    const int n = h.dim();
    double anorm = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = std::max(i - 1, 0); j < n; ++j) anorm += std::abs(h(i, j));

    int nn = n - 1;
    double t = 0.0;
    int sweeps = 0;
    while (nn >= 0) {
        int its = 0;
        int l = 0;
        do {
            for (l = nn; l >= 1; --l) {
                double s = std::abs(h(l - 1, l - 1)) + std::abs(h(l, l));
                if (s == 0.0) s = anorm;
                if (std::abs(h(l, l - 1)) <= kEps * s) {
                    h(l, l - 1) = 0.0;
                    break;
                }
            }
            if (l < 0) l = 0;
            double x = h(nn, nn);
            if (l == nn) {
                out.emplace_back(x + t, 0.0);
                --nn;
            } else {
                double y = h(nn - 1, nn - 1);
                double w = h(nn, nn - 1) * h(nn - 1, nn);
                if (l == nn - 1) {
                    double p = 0.5 * (y - x);
                    double q = p * p + w;
                    double z = std::sqrt(std::abs(q));
                    x += t;
                    if (q >= 0.0) {
                        z = p + (p >= 0.0 ? z : -z);
                        out.emplace_back(x + z, 0.0);
                        out.emplace_back(z != 0.0 ? x - w / z : x + z, 0.0);
                    } else {
                        out.emplace_back(x + p, z);
                        out.emplace_back(x + p, -z);
                    }
                    nn -= 2;
                } else {
                    if (++sweeps > max_sweeps) {
                        for (int i = nn; i >= 0; --i) out.emplace_back(h(i, i) + t, 0.0);
                        return false;
                    }
                    if (its == 10 || its == 20) {
                        t += x;
                        for (int i = 0; i <= nn; ++i) h(i, i) -= x;
                        double s = std::abs(h(nn, nn - 1)) + std::abs(h(nn - 1, nn - 2));
                        y = x = 0.75 * s;
                        w = -0.4375 * s * s;
                    }
                    ++its;
                    double p = 0.0, q = 0.0, r = 0.0;
                    int m;
                    for (m = nn - 2; m >= l; --m) {
                        double z = h(m, m);
                        double rr = x - z;
                        double ss = y - z;
                        p = (rr * ss - w) / h(m + 1, m) + h(m, m + 1);
                        q = h(m + 1, m + 1) - z - rr - ss;
                        r = h(m + 2, m + 1);
                        double s = std::abs(p) + std::abs(q) + std::abs(r);
                        p /= s;
                        q /= s;
                        r /= s;
                        if (m == l) break;
                        double u = std::abs(h(m, m - 1)) * (std::abs(q) + std::abs(r));
                        double v = std::abs(p) *
                                   (std::abs(h(m - 1, m - 1)) + std::abs(z) + std::abs(h(m + 1, m + 1)));
                        if (u <= kEps * v) break;
                    }
                    for (int i = m + 2; i <= nn; ++i) {
                        h(i, i - 2) = 0.0;
                        if (i != m + 2) h(i, i - 3) = 0.0;
                    }
                    for (int k = m; k <= nn - 1; ++k) {
                        if (k != m) {
                            p = h(k, k - 1);
                            q = h(k + 1, k - 1);
                            r = 0.0;
                            if (k != nn - 1) r = h(k + 2, k - 1);
                            x = std::abs(p) + std::abs(q) + std::abs(r);
                            if (x != 0.0) {
                                p /= x;
                                q /= x;
                                r /= x;
                            }
                        }
                        double s = std::sqrt(p * p + q * q + r * r);
                        if (p < 0.0) s = -s;
                        if (s == 0.0) continue;
                        if (k == m) {
                            if (l != m) h(k, k - 1) = -h(k, k - 1);
                        } else {
                            h(k, k - 1) = -s * x;
                        }
                        p += s;
                        x = p / s;
                        y = q / s;
                        double z = r / s;
                        q /= p;
                        r /= p;
                        for (int j = k; j <= nn; ++j) {
                            double pp = h(k, j) + q * h(k + 1, j);
                            if (k != nn - 1) {
                                pp += r * h(k + 2, j);
                                h(k + 2, j) -= pp * z;
                            }
                            h(k + 1, j) -= pp * y;
                            h(k, j) -= pp * x;
                        }
                        const int mmin = nn < k + 3 ? nn : k + 3;
                        for (int i = l; i <= mmin; ++i) {
                            double pp = x * h(i, k) + y * h(i, k + 1);
                            if (k != nn - 1) {
                                pp += z * h(i, k + 2);
                                h(i, k + 2) -= pp * r;
                            }
                            h(i, k + 1) -= pp * q;
                            h(i, k) -= pp;
                        }
                    }
                }
            }
        } while (l < nn - 1);
    }
    return true;
}

void sort_descending(std::vector<std::complex<double>>& v) {
    std::sort(v.begin(), v.end(), [](const std::complex<double>& a, const std::complex<double>& b) {
        if (a.real() != b.real()) return a.real() > b.real();
        return a.imag() > b.imag();
    });
}

}  // namespace

Spectrum eigenvalues(const Mat& m) {
    check_input(m, "eigenvalues");
    Spectrum spec;
    const int n = m.dim();
    if (n == 1) {
        spec.values = {{m(0, 0), 0.0}};
        return spec;
    }
    if (n == 2) {
        // Stable closed form: larger-magnitude root first, mate via the product.
        const double tr = m.trace();
        const double dt = m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
        const double half = 0.5 * tr;
        const double disc = half * half - dt;
        if (disc >= 0.0) {
            const double r = std::sqrt(disc);
            const double big = half + (half >= 0.0 ? r : -r);
            const double other = (big != 0.0) ? dt / big : half - r;
            spec.values = {{big, 0.0}, {other, 0.0}};
        } else {
            const double im = std::sqrt(-disc);
            spec.values = {{half, im}, {half, -im}};
        }
        sort_descending(spec.values);
        return spec;
    }
    Mat h = m;
    hessenberg(h);
    spec.converged = hqr(h, spec.values, 100 * n);
    sort_descending(spec.values);
    return spec;
}

std::vector<double> sym_eigenvalues(const Mat& m) {
    check_input(m, "sym_eigenvalues");
    const int n = m.dim();
    Mat s(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) s(i, j) = 0.5 * (m(i, j) + m(j, i));

    const double stop = 1e-14 * (1.0 + s.norm_fro());
    for (int sweep = 0; sweep < 60; ++sweep) {
        double off = 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) off += 2.0 * s(i, j) * s(i, j);
        if (std::sqrt(off) < stop) break;
        for (int p = 0; p < n - 1; ++p) {
            for (int q = p + 1; q < n; ++q) {
                const double apq = s(p, q);
                if (apq == 0.0) continue;
                const double tau = (s(q, q) - s(p, p)) / (2.0 * apq);
                const double t = (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double sn = t * c;
                s(p, p) -= t * apq;
                s(q, q) += t * apq;
                s(p, q) = s(q, p) = 0.0;
                for (int k = 0; k < n; ++k) {
                    if (k == p || k == q) continue;
                    const double akp = s(k, p);
                    const double akq = s(k, q);
                    s(k, p) = s(p, k) = c * akp - sn * akq;
                    s(k, q) = s(q, k) = sn * akp + c * akq;
                }
            }
        }
    }
    std::vector<double> ev(n);
    for (int i = 0; i < n; ++i) ev[i] = s(i, i);
    std::sort(ev.rbegin(), ev.rend());
    return ev;
}

double sym_eigen_max(const Mat& m) { return sym_eigenvalues(m).front(); }

SingularValues singular_values(const Mat& m) {
    check_input(m, "singular_values");
    const int n = m.dim();
    Mat g(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            double s = 0.0;
            for (int k = 0; k < n; ++k) s += m(k, i) * m(k, j);
            g(i, j) = s;
        }
    SingularValues sv;
    sv.values = sym_eigenvalues(g);
    for (double& v : sv.values) v = std::sqrt(std::max(v, 0.0));
    return sv;
}

namespace {

struct Lu {
    Mat lu;
    std::vector<int> perm;
    double sign = 1.0;
    bool singular = false;
};

Lu lu_decompose(const Mat& a) {
    const int n = a.dim();
    Lu f{a, std::vector<int>(n), 1.0, false};
    for (int i = 0; i < n; ++i) f.perm[i] = i;
    for (int c = 0; c < n; ++c) {
        int piv = c;
        for (int r = c + 1; r < n; ++r)
            if (std::abs(f.lu(r, c)) > std::abs(f.lu(piv, c))) piv = r;
        if (piv != c) {
            for (int j = 0; j < n; ++j) std::swap(f.lu(piv, j), f.lu(c, j));
            std::swap(f.perm[piv], f.perm[c]);
            f.sign = -f.sign;
        }
        const double d = f.lu(c, c);
        if (d == 0.0) {
            f.singular = true;
            continue;
        }
        for (int r = c + 1; r < n; ++r) {
            const double factor = f.lu(r, c) / d;
            f.lu(r, c) = factor;
            for (int j = c + 1; j < n; ++j) f.lu(r, j) -= factor * f.lu(c, j);
        }
    }
    return f;
}

std::vector<double> lu_backsolve(const Lu& f, const std::vector<double>& b) {
    const int n = f.lu.dim();
    std::vector<double> x(n);
    for (int i = 0; i < n; ++i) x[i] = b[f.perm[i]];
    for (int i = 1; i < n; ++i)
        for (int j = 0; j < i; ++j) x[i] -= f.lu(i, j) * x[j];
    for (int i = n - 1; i >= 0; --i) {
        for (int j = i + 1; j < n; ++j) x[i] -= f.lu(i, j) * x[j];
        x[i] /= f.lu(i, i);
    }
    return x;
}

}  // namespace

double det(const Mat& m) {
    check_input(m, "det");
    Lu f = lu_decompose(m);
    if (f.singular) return 0.0;
    double d = f.sign;
    for (int i = 0; i < m.dim(); ++i) d *= f.lu(i, i);
    return d;
}

std::vector<double> lu_solve(const Mat& a, const std::vector<double>& b) {
    check_input(a, "lu_solve");
    if (static_cast<int>(b.size()) != a.dim()) throw InvalidInput("lu_solve: size mismatch");
    Lu f = lu_decompose(a);
    if (f.singular) throw InvalidInput("lu_solve: singular matrix");
    return lu_backsolve(f, b);
}

Mat expm(const Mat& m) {
    check_input(m, "expm");
    const double norm = m.norm_inf();
    if (norm > 1e3) throw std::range_error("expm: norm exceeds 1e3");
    const int n = m.dim();

    // Scale below the (6,6) Pade accuracy radius.
    int s = 0;
    if (norm > 0.5) s = static_cast<int>(std::ceil(std::log2(norm / 0.5)));
    Mat a = m;
    if (s > 0) a *= std::ldexp(1.0, -s);

    static const double b[] = {665280.0, 332640.0, 75600.0, 10080.0, 840.0, 42.0, 1.0};
    const Mat id = Mat::identity(n);
    const Mat a2 = a * a;
    const Mat a4 = a2 * a2;
    const Mat a6 = a2 * a4;
    const Mat u = a * (b[1] * id + b[3] * a2 + b[5] * a4);
    const Mat v = b[0] * id + b[2] * a2 + b[4] * a4 + b[6] * a6;

    const Mat num = v + u;
    const Mat den = v - u;
    Lu f = lu_decompose(den);
    if (f.singular) throw std::range_error("expm: Pade denominator singular");
    Mat r(n);
    std::vector<double> col(n);
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) col[i] = num(i, j);
        std::vector<double> x = lu_backsolve(f, col);
        for (int i = 0; i < n; ++i) r(i, j) = x[i];
    }
    for (int k = 0; k < s; ++k) r = r * r;
    return r;
}

}  // namespace entrex::smallalg
