#include "entrex/flows.hpp"

#include <cmath>

#include <doctest.h>

#include "entrex/errors.hpp"
#include "oracles.hpp"

using namespace entrex;
using dynsys::Vec;

namespace {
constexpr double kPi = 3.14159265358979323846;

void check_jac_matches_fd(const dynsys::FlowSystem& flow, const Vec& z, double t, double tol) {
    const auto analytic = flow.jac(z, t);
    dynsys::FlowSystem numeric = flow;
    numeric.jac = nullptr;
    const auto fd = numeric.jacobian(z, t);
    for (int i = 0; i < flow.dim; ++i)
        for (int j = 0; j < flow.dim; ++j)
            CHECK(std::abs(analytic(i, j) - fd(i, j)) <= tol * (1.0 + std::abs(analytic(i, j))));
}
}  // namespace

TEST_CASE("solid-body: stagnation point, wall tangency, wall drift") {
    const auto model = flows::solid_body({2.0, 1.0});
    const Vec at_center = model.flow.rhs({0.0, 1.0}, 0.0);
    CHECK(at_center[0] == doctest::Approx(0.0));
    CHECK(at_center[1] == doctest::Approx(0.0));

    const Vec on_wall = model.flow.rhs({5.0, 0.0}, 0.0);
    CHECK(on_wall[0] == doctest::Approx(1.0));  // beta
    CHECK(on_wall[1] == 0.0);

    CHECK(model.reduced.rhs({5.0}, 0.0)[0] == doctest::Approx(1.0));
}

TEST_CASE("solid-body: wall linearization family") {
    // Along gamma(t) = (beta t - b, 0) the balance-function coefficient matrix
    // is [[0, -1], [1, alpha (beta t - b)]].
    const double alpha = 2.0, beta = 1.0, b = 3.0;
    const auto model = flows::solid_body({alpha, beta});
    for (double t : {0.0, 1.0, 2.5, 6.0}) {
        const Vec reduced{beta * t - b};
        const auto a = model.linearization(reduced, t);
        CHECK(a(0, 0) == 0.0);
        CHECK(a(0, 1) == -1.0);
        CHECK(a(1, 0) == 1.0);
        CHECK(a(1, 1) == doctest::Approx(alpha * (beta * t - b)).epsilon(1e-14));
    }
}

TEST_CASE("solid-body: analytic Jacobian matches finite differences") {
    const auto model = flows::solid_body({1.7, 0.8});
    for (int rep = 0; rep < 1000; ++rep) {
        const Vec z{oracles::uniform(-4.0, 4.0), oracles::uniform(0.0, 3.0)};
        check_jac_matches_fd(model.flow, z, 0.0, 1e-5);
    }
}

TEST_CASE("solid-body: manifold invariance and time-reversal symmetry") {
    const auto model = flows::solid_body({2.3, 1.4});
    for (int rep = 0; rep < 1000; ++rep) {
        const double z1 = oracles::uniform(-10.0, 10.0);
        const Vec f = model.flow.rhs({z1, 0.0}, 0.0);
        CHECK(std::abs(f[1]) <= 1e-14);  // normal component on the wall
    }
    for (int rep = 0; rep < 200; ++rep) {
        const Vec z{oracles::uniform(-4.0, 4.0), oracles::uniform(0.0, 3.0)};
        const Vec f = model.flow.rhs(z, 0.0);
        const Vec g = model.flow.rhs({-z[0], z[1]}, 0.0);
        CHECK(g[0] == doctest::Approx(f[0]).epsilon(1e-14));
        CHECK(g[1] == doctest::Approx(-f[1]).epsilon(1e-14));
    }
}

TEST_CASE("solid-body parameters must be positive") {
    CHECK_THROWS_AS((void)flows::solid_body({0.0, 1.0}), InvalidInput);
    CHECK_THROWS_AS((void)flows::solid_body({1.0, -2.0}), InvalidInput);
}

TEST_CASE("fast-slow form: critical manifold and slow drift") {
    const auto fs = flows::solid_body_fastslow_split({2.0, 1.0});
    // Fast field vanishes on {y = 0} and on {x = 0}.
    for (double v : {-2.0, -0.3, 0.7, 3.0}) {
        CHECK(fs.fast_rhs({v}, {0.0})[0] == doctest::Approx(0.0));
        CHECK(fs.fast_rhs({0.0}, {v})[0] == doctest::Approx(0.0));
    }
    // Slow subsystem on {x = 0}: y' = beta.
    CHECK(fs.slow_rhs({0.0}, {1.23})[0] == doctest::Approx(1.0));
    CHECK(fs.slow_flow.rhs({0.9}, 0.0)[0] == doctest::Approx(1.0));
    // Fast Jacobian on the wall branch is alpha * y.
    CHECK(fs.fast_jacobian(fs.critical_x({0.7}), {0.7})(0, 0) == doctest::Approx(1.4));
}

TEST_CASE("fast-slow form: scaling round-trip onto the original field") {
    const flows::SolidBodyParams p{2.0, 1.0};
    const auto model = flows::solid_body(p);
    for (double eps : {1.0, 0.25}) {
        const auto fast = flows::solid_body_fastslow(p, eps);
        const double se = std::sqrt(eps);
        const double x0 = 0.8, y0 = -0.6;
        // (z1, z2, t) = (y/sqrt(eps), x, s/sqrt(eps))
        const auto zt = dynsys::integrate(model.flow, {y0 / se, x0}, 0.0, 2.0, 1e-12);
        const auto xs = dynsys::integrate(fast, {x0, y0}, 0.0, 2.0 * se, 1e-12);
        for (double t : {0.4, 0.8, 1.2, 1.6, 2.0}) {
            const Vec z = zt.at(t);
            const Vec w = xs.at(t * se);
            CHECK(std::abs(z[0] - w[1] / se) <= 1e-8);
            CHECK(std::abs(z[1] - w[0]) <= 1e-8);
        }
    }
    CHECK_THROWS_AS((void)flows::solid_body_fastslow({2.0, 1.0}, 0.0), InvalidInput);
}

TEST_CASE("km: surface invariance and the reduced field") {
    const flows::KuhlmannMuldoonParams p{0.3, 4.74};
    const auto model = flows::kuhlmann_muldoon(p);
    const double k = std::pow(1.5, p.eta - 1.0);
    for (double z2 : {-0.45, -0.2, 0.0, 0.17, 0.4}) {
        const Vec f = model.flow.rhs({1.5, z2}, 0.0);
        CHECK(f[0] == doctest::Approx(0.0).epsilon(1e-14));
        // Tangential component equals the reduced dynamics exactly.
        const double reduced = model.reduced.rhs({z2}, 0.0)[0];
        CHECK(f[1] == doctest::Approx(reduced).epsilon(1e-14));
        const double expected = -k * (std::cos(kPi * z2) + p.alpha_s * std::sin(2.0 * kPi * z2));
        CHECK(reduced == doctest::Approx(expected).epsilon(1e-14));
    }
    // Reduced speed at the midplane, eta = 4.74: -(3/2)^3.74.
    CHECK(model.reduced.rhs({0.0}, 0.0)[0] == doctest::Approx(-std::pow(1.5, 3.74)).epsilon(1e-14));
    CHECK(model.reduced.rhs({0.0}, 0.0)[0] == doctest::Approx(-4.5558).epsilon(2e-4));
}

TEST_CASE("km: analytic Jacobian matches finite differences") {
    const auto model = flows::kuhlmann_muldoon({0.25, 4.3});
    for (int rep = 0; rep < 1000; ++rep) {
        const Vec z{oracles::uniform(0.2, 1.5), oracles::uniform(-0.45, 0.45)};
        check_jac_matches_fd(model.flow, z, 0.0, 1e-5);
    }
}

TEST_CASE("km: Jacobian entries on the surface in closed form") {
    const flows::KuhlmannMuldoonParams p{0.1, 4.74};
    const auto model = flows::kuhlmann_muldoon(p);
    const double k = std::pow(1.5, p.eta - 1.0);
    for (double g2 : {-0.3, 0.0, 0.25, 0.4}) {
        const auto a = model.flow.jac({1.5, g2}, 0.0);
        const double c = std::cos(kPi * g2) + p.alpha_s * std::sin(2.0 * kPi * g2);
        const double s2 = 2.0 * p.alpha_s * std::cos(2.0 * kPi * g2) - std::sin(kPi * g2);
        CHECK(a(0, 1) == doctest::Approx(0.0).epsilon(1e-13));
        CHECK(a(1, 0) ==
              doctest::Approx(-std::pow(1.5, p.eta - 2.0) * (2.0 * p.eta + 1.0) * c).epsilon(1e-12));
        CHECK(a(1, 1) == doctest::Approx(-k * kPi * s2).epsilon(1e-12));
        // Divergence-free on the surface: the two diagonal entries cancel.
        CHECK(a(0, 0) == doctest::Approx(-a(1, 1)).epsilon(1e-12));
    }
}

TEST_CASE("km: domain guard and parameter validation") {
    const auto model = flows::kuhlmann_muldoon({0.1, 4.74});
    CHECK_THROWS_AS((void)model.flow.rhs({0.0, 0.1}, 0.0), FlowDomainError);
    CHECK_THROWS_AS((void)model.flow.rhs({-0.5, 0.1}, 0.0), FlowDomainError);
    CHECK_THROWS_AS((void)flows::kuhlmann_muldoon({0.1, 3.9}), InvalidInput);
    CHECK_THROWS_AS((void)flows::kuhlmann_muldoon({0.1, 5.1}), InvalidInput);
}

TEST_CASE("km: published normal-rate integrand and the geometric rate") {
    const flows::KuhlmannMuldoonParams p{0.5, 4.74};
    CHECK(flows::nile_integrand_km(0.0, p) ==
          doctest::Approx(-kPi * std::pow(1.5, 3.74)).epsilon(1e-12));
    CHECK(flows::nile_integrand_km(0.0, p) == doctest::Approx(-14.313).epsilon(1e-3));
    CHECK(flows::nile_integrand_km(0.0, {0.0, 4.74}) == doctest::Approx(0.0));

    // The surface-normal strain rate (geometric, normal (1,0)) is the exact
    // negative of the published integrand (tangential rate, direction (0,1));
    // their zero sets coincide.
    const auto model = flows::kuhlmann_muldoon(p);
    for (int rep = 0; rep < 100; ++rep) {
        const double g2 = oracles::uniform(-0.49, 0.49);
        const auto a = model.flow.jac({1.5, g2}, 0.0);
        CHECK(a(0, 0) == doctest::Approx(-flows::nile_integrand_km(g2, p)).epsilon(1e-12));
    }

    // Zeros of the integrand do not depend on the positive prefactor.
    for (int rep = 0; rep < 100; ++rep) {
        const double g2 = oracles::uniform(-0.49, 0.49);
        const double raw = 2.0 * p.alpha_s * std::cos(2.0 * kPi * g2) - std::sin(kPi * g2);
        const double full = flows::nile_integrand_km(g2, p);
        if (raw > 1e-12) CHECK(full < 0.0);
        if (raw < -1e-12) CHECK(full > 0.0);
    }
}

TEST_CASE("registry: ids, defaults, unknown flows") {
    const auto ids = flows::registry_ids();
    REQUIRE(ids.size() == 2);
    CHECK(ids[0] == "solid-body");
    CHECK(ids[1] == "km");
    CHECK(flows::registry_has("km"));
    CHECK(!flows::registry_has("lorenz"));

    const auto sb = flows::make_flow("solid-body", {{"alpha", 3.0}});
    CHECK(sb.flow.param("alpha") == doctest::Approx(3.0));
    CHECK(sb.flow.param("beta") == doctest::Approx(1.0));
    CHECK_THROWS_AS((void)flows::make_flow("lorenz"), InvalidInput);
    CHECK(flows::param_info("km").size() == 2);
}
