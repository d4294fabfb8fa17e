#include "entrex/smallalg.hpp"

#include <cmath>
#include <complex>

#include <doctest.h>

#include "entrex/errors.hpp"
#include "oracles.hpp"

using namespace entrex::smallalg;
using entrex::InvalidInput;

namespace {

// Companion matrix of x^n + c[n-1] x^(n-1) + ... + c[0].
Mat companion(const std::vector<double>& c) {
    const int n = static_cast<int>(c.size());
    Mat m(n);
    for (int i = 1; i < n; ++i) m(i, i - 1) = 1.0;
    for (int i = 0; i < n; ++i) m(i, n - 1) = -c[static_cast<size_t>(i)];
    return m;
}

}  // namespace

TEST_CASE("eigenvalues: 2x2 closed form") {
    // [[0,-1],[1, a(bt - b0)]] at a=2, b=1, b0=3, t=0.
    const Mat m{{0.0, -1.0}, {1.0, -6.0}};
    const Spectrum s = eigenvalues(m);
    const double r = std::sqrt(32.0);
    CHECK(s.converged);
    CHECK(s.values[0].real() == doctest::Approx((-6.0 + r) / 2.0).epsilon(1e-12));
    CHECK(s.values[1].real() == doctest::Approx((-6.0 - r) / 2.0).epsilon(1e-12));
    CHECK(s.values[0].imag() == 0.0);
    CHECK(s.values[1].imag() == 0.0);
}

TEST_CASE("eigenvalues: identity and complex pair") {
    const Spectrum id = eigenvalues(Mat::identity(2));
    CHECK(id.values[0] == std::complex<double>(1.0, 0.0));
    CHECK(id.values[1] == std::complex<double>(1.0, 0.0));

    const Spectrum rot = eigenvalues(Mat{{0.0, -1.0}, {1.0, 0.0}});
    CHECK(rot.values[0].imag() == doctest::Approx(1.0));
    CHECK(rot.values[1].imag() == doctest::Approx(-1.0));
    CHECK(rot.values[0].real() == doctest::Approx(0.0));
}

TEST_CASE("eigenvalues: companion matrix of (x-1)(x-2)(x-3)(x-4)") {
    // x^4 - 10x^3 + 35x^2 - 50x + 24
    const Mat m = companion({24.0, -50.0, 35.0, -10.0});
    const Spectrum s = eigenvalues(m);
    REQUIRE(s.converged);
    REQUIRE(s.values.size() == 4);
    for (int k = 0; k < 4; ++k) {
        CHECK(s.values[static_cast<size_t>(k)].real() == doctest::Approx(4.0 - k).epsilon(1e-9));
        CHECK(std::abs(s.values[static_cast<size_t>(k)].imag()) < 1e-9);
    }
}

TEST_CASE("eigenvalues: trace and determinant invariants on random matrices") {
    for (int dim : {3, 4, 5, 8, 16}) {
        for (int rep = 0; rep < 20; ++rep) {
            const Mat m = oracles::random_mat(dim, 2.0);
            const Spectrum s = eigenvalues(m);
            REQUIRE(s.converged);
            std::complex<double> sum = 0.0, prod = 1.0;
            for (const auto& v : s.values) {
                sum += v;
                prod *= v;
            }
            const double tr = m.trace();
            CHECK(std::abs(sum.real() - tr) <= 1e-10 * (1.0 + std::abs(tr)));
            CHECK(std::abs(sum.imag()) <= 1e-10 * (1.0 + std::abs(tr)));
            if (dim <= 4) {
                const double d = det(m);
                CHECK(std::abs(prod.real() - d) <= 1e-8 * (1.0 + std::abs(d)));
                CHECK(std::abs(prod.imag()) <= 1e-8 * (1.0 + std::abs(d)));
            }
        }
    }
}

TEST_CASE("eigenvalues: rejects bad input") {
    Mat m(2);
    m(0, 0) = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS((void)eigenvalues(m), InvalidInput);
    CHECK_THROWS_AS((void)eigenvalues(Mat(17)), InvalidInput);
}

TEST_CASE("sym_eigen_max: diagonal and exchange") {
    CHECK(sym_eigen_max(Mat{{-2.0, 0.0}, {0.0, 5.0}}) == doctest::Approx(5.0));
    CHECK(sym_eigen_max(Mat{{0.0, 1.0}, {1.0, 0.0}}) == doctest::Approx(1.0));
}

TEST_CASE("sym_eigen_max: symmetrized wall linearization") {
    // [[0,-1],[1,-2]] symmetrizes to [[0,0],[0,-2]]; largest eigenvalue 0.
    const Mat m{{0.0, -1.0}, {1.0, -2.0}};
    CHECK(sym_eigen_max(m) == doctest::Approx(0.0).epsilon(1e-13));
}

TEST_CASE("sym_eigen_max: Rayleigh quotient bound and probe") {
    // Upper bound holds in any dimension; the 2-d probe gets within 1e-6.
    for (int rep = 0; rep < 5; ++rep) {
        Mat m = oracles::random_mat(2, 3.0);
        m = 0.5 * (m + m.transpose());
        const double lmax = sym_eigen_max(m);
        double best = -1e300;
        for (int k = 0; k < 10000; ++k) {
            const double th = oracles::uniform(0.0, 3.14159265358979323846);
            const double v0 = std::cos(th), v1 = std::sin(th);
            const double q = v0 * (m(0, 0) * v0 + m(0, 1) * v1) + v1 * (m(1, 0) * v0 + m(1, 1) * v1);
            CHECK(q <= lmax + 1e-12);
            best = std::max(best, q);
        }
        CHECK(lmax - best <= 1e-6 * (1.0 + std::abs(lmax)));
    }
    for (int dim : {4, 6}) {
        Mat m = oracles::random_mat(dim, 3.0);
        m = 0.5 * (m + m.transpose());
        const double lmax = sym_eigen_max(m);
        for (int k = 0; k < 2000; ++k) {
            std::vector<double> v(static_cast<size_t>(dim));
            double norm = 0.0;
            for (auto& x : v) {
                x = oracles::uniform(-1.0, 1.0);
                norm += x * x;
            }
            norm = std::sqrt(norm);
            double q = 0.0;
            for (int i = 0; i < dim; ++i)
                for (int j = 0; j < dim; ++j)
                    q += (v[static_cast<size_t>(i)] / norm) * m(i, j) * (v[static_cast<size_t>(j)] / norm);
            CHECK(q <= lmax + 1e-12);
        }
    }
}

TEST_CASE("singular_values: known cases") {
    const double th = 0.7;
    const Mat rot{{std::cos(th), -std::sin(th)}, {std::sin(th), std::cos(th)}};
    const SingularValues sr = singular_values(rot);
    CHECK(sr.values[0] == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(sr.values[1] == doctest::Approx(1.0).epsilon(1e-13));

    const SingularValues sd = singular_values(Mat{{3.0, 0.0}, {0.0, -2.0}});
    CHECK(sd.values[0] == doctest::Approx(3.0));
    CHECK(sd.values[1] == doctest::Approx(2.0));

    // M^T M = [[1,1],[1,2]] with eigenvalues (3 +- sqrt(5))/2.
    const SingularValues ss = singular_values(Mat{{1.0, 1.0}, {0.0, 1.0}});
    const double golden = (1.0 + std::sqrt(5.0)) / 2.0;
    CHECK(ss.values[0] == doctest::Approx(golden).epsilon(1e-12));
    CHECK(ss.values[1] == doctest::Approx(2.0 / (1.0 + std::sqrt(5.0))).epsilon(1e-12));
}

TEST_CASE("singular_values: orthogonal matrices have unit spectrum") {
    for (int dim : {2, 3, 4, 6}) {
        for (int rep = 0; rep < 10; ++rep) {
            const Mat q = oracles::random_orthogonal(dim);
            const SingularValues sv = singular_values(q);
            for (double v : sv.values) CHECK(std::abs(v - 1.0) <= 1e-12);
        }
    }
}

TEST_CASE("expm: closed-form cases") {
    const Mat z(3);
    const Mat ez = expm(z);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) CHECK(ez(i, j) == doctest::Approx(i == j ? 1.0 : 0.0));

    const double t = 2.0;
    const Mat gen{{0.0, -t}, {t, 0.0}};
    const Mat r = expm(gen);
    CHECK(r(0, 0) == doctest::Approx(std::cos(t)).epsilon(1e-12));
    CHECK(r(0, 1) == doctest::Approx(-std::sin(t)).epsilon(1e-12));
    CHECK(r(1, 0) == doctest::Approx(std::sin(t)).epsilon(1e-12));
    CHECK(r(1, 1) == doctest::Approx(std::cos(t)).epsilon(1e-12));

    const Mat d = expm(Mat{{1.0, 0.0}, {0.0, 2.0}});
    CHECK(d(0, 0) == doctest::Approx(std::exp(1.0)).epsilon(1e-12));
    CHECK(d(1, 1) == doctest::Approx(std::exp(2.0)).epsilon(1e-12));
    CHECK(d(0, 1) == doctest::Approx(0.0));
}

TEST_CASE("expm: inverse property and overflow guard") {
    for (int dim : {2, 3, 5}) {
        for (int rep = 0; rep < 10; ++rep) {
            Mat m = oracles::random_mat(dim, 1.0);
            const double target = oracles::uniform(0.1, 10.0);
            m *= target / std::max(m.norm_inf(), 1e-12);
            const Mat p = expm(m) * expm(-1.0 * m);
            for (int i = 0; i < dim; ++i)
                for (int j = 0; j < dim; ++j)
                    CHECK(std::abs(p(i, j) - (i == j ? 1.0 : 0.0)) <= 1e-10);
        }
    }
    Mat big(2);
    big(0, 1) = 2e3;
    CHECK_THROWS_AS((void)expm(big), std::range_error);
}

TEST_CASE("lu_solve and det") {
    const Mat a{{2.0, 1.0}, {1.0, 3.0}};
    const auto x = lu_solve(a, {5.0, 10.0});
    CHECK(x[0] == doctest::Approx(1.0));
    CHECK(x[1] == doctest::Approx(3.0));
    CHECK(det(a) == doctest::Approx(5.0));
    CHECK(det(Mat{{1.0, 2.0}, {2.0, 4.0}}) == doctest::Approx(0.0));
    CHECK_THROWS_AS((void)lu_solve(Mat{{1.0, 2.0}, {2.0, 4.0}}, {1.0, 1.0}), InvalidInput);
}
