#include "entrex/flows.hpp"

#include <cmath>

#include "entrex/errors.hpp"

namespace entrex::flows {

namespace {

constexpr double kPi = 3.14159265358979323846;

void check_solid_body(const SolidBodyParams& p) {
    if (!(p.alpha > 0.0) || !(p.beta > 0.0))
        throw InvalidInput("solid_body: alpha and beta must be strictly positive");
}

void check_km(const KuhlmannMuldoonParams& p) {
    if (!(p.eta >= 4.0 && p.eta <= 5.0))
        throw InvalidInput("kuhlmann_muldoon: eta must lie in [4, 5]");
    if (!std::isfinite(p.alpha_s)) throw InvalidInput("kuhlmann_muldoon: alpha_s must be finite");
}

}  // namespace

ModelFlow solid_body(const SolidBodyParams& p) {
    check_solid_body(p);
    const double a = p.alpha, b = p.beta;

    ModelFlow m;
    m.id = "solid-body";

    m.flow.dim = 2;
    m.flow.name = "solid-body";
    m.flow.params = {{"alpha", a}, {"beta", b}};
    m.flow.rhs = [a, b](const Vec& z, double) {
        return Vec{-(z[1] - b), z[0] * (1.0 - std::exp(-a * z[1]))};
    };
    m.flow.jac = [a](const Vec& z, double) {
        const double e = std::exp(-a * z[1]);
        return smallalg::Mat{{0.0, -1.0}, {1.0 - e, a * z[0] * e}};
    };

    m.manifold = dynsys::FlatManifold(Vec{0.0, 0.0}, Vec{0.0, 1.0});

    m.reduced.dim = 1;
    m.reduced.name = "solid-body/wall";
    m.reduced.params = m.flow.params;
    m.reduced.rhs = [b](const Vec&, double) { return Vec{b}; };
    m.reduced.jac = [](const Vec&, double) { return smallalg::Mat{{0.0}}; };

    m.embed = [](const Vec& r) { return Vec{r[0], 0.0}; };
    m.reduce = [](const Vec& z) { return Vec{z[0]}; };

    // Near-wall linear model for the spectral balance functions: the full
    // rotational coupling plus the normal strain rate alpha*z1 at the wall.
    m.linearization = [a](const Vec& r, double) {
        return smallalg::Mat{{0.0, -1.0}, {1.0, a * r[0]}};
    };

    m.default_reduced_z0 = Vec{-1.0};
    return m;
}

dynsys::FlowSystem solid_body_fastslow(const SolidBodyParams& p, double eps) {
    check_solid_body(p);
    if (!(eps > 0.0 && eps <= 1.0)) throw InvalidInput("solid_body_fastslow: eps must be in (0, 1]");
    const double a = p.alpha, b = p.beta;
    dynsys::FlowSystem f;
    f.dim = 2;
    f.name = "solid-body/fast-slow";
    f.params = {{"alpha", a}, {"beta", b}, {"eps", eps}};
    f.rhs = [a, b, eps](const Vec& z, double) {
        return Vec{z[1] * (1.0 - std::exp(-a * z[0])) / eps, -(z[0] - b)};
    };
    f.jac = [a, eps](const Vec& z, double) {
        const double e = std::exp(-a * z[0]);
        return smallalg::Mat{{z[1] * a * e / eps, (1.0 - e) / eps}, {-1.0, 0.0}};
    };
    return f;
}

FastSlowSystem solid_body_fastslow_split(const SolidBodyParams& p) {
    check_solid_body(p);
    const double a = p.alpha, b = p.beta;
    FastSlowSystem fs;
    fs.fast_dim = 1;
    fs.slow_dim = 1;
    fs.fast_rhs = [a](const Vec& x, const Vec& y) { return Vec{y[0] * (1.0 - std::exp(-a * x[0]))}; };
    fs.slow_rhs = [b](const Vec& x, const Vec&) { return Vec{-(x[0] - b)}; };
    fs.fast_jacobian = [a](const Vec& x, const Vec& y) {
        return smallalg::Mat{{y[0] * a * std::exp(-a * x[0])}};
    };
    fs.critical_x = [](const Vec&) { return Vec{0.0}; };
    fs.slow_flow.dim = 1;
    fs.slow_flow.name = "solid-body/slow";
    fs.slow_flow.params = {{"alpha", a}, {"beta", b}};
    fs.slow_flow.rhs = [b](const Vec&, double) { return Vec{b}; };
    fs.slow_flow.jac = [](const Vec&, double) { return smallalg::Mat{{0.0}}; };
    return fs;
}

double nile_integrand_km(double gamma2, const KuhlmannMuldoonParams& p) {
    const double k = std::pow(1.5, p.eta - 1.0);
    return -k * kPi * (2.0 * p.alpha_s * std::cos(2.0 * kPi * gamma2) - std::sin(kPi * gamma2));
}

ModelFlow kuhlmann_muldoon(const KuhlmannMuldoonParams& p) {
    check_km(p);
    const double as = p.alpha_s, eta = p.eta;

    auto S = [as](double z2) { return std::sin(kPi * z2) - 2.0 * as * std::cos(2.0 * kPi * z2); };
    auto dS = [as](double z2) {
        return kPi * std::cos(kPi * z2) + 4.0 * kPi * as * std::sin(2.0 * kPi * z2);
    };
    auto C = [as](double z2) { return std::cos(kPi * z2) + as * std::sin(2.0 * kPi * z2); };
    auto dC = [as](double z2) {
        return -kPi * std::sin(kPi * z2) + 2.0 * kPi * as * std::cos(2.0 * kPi * z2);
    };

    ModelFlow m;
    m.id = "km";

    m.flow.dim = 2;
    m.flow.name = "km";
    m.flow.params = {{"alpha_s", as}, {"eta", eta}};
    m.flow.rhs = [=](const Vec& z, double) {
        const double z1 = z[0], z2 = z[1];
        if (z1 <= 0.0) throw FlowDomainError("km: z1 must be positive (z1^eta with fractional eta)");
        const double zp = std::pow(z1, eta);
        const double zpm1 = std::pow(z1, eta - 1.0);
        return Vec{kPi * zp * (1.0 - (2.0 / 3.0) * z1) * S(z2),
                   ((eta + 1.0) * zpm1 - (2.0 / 3.0) * (eta + 2.0) * zp) * C(z2)};
    };
    m.flow.jac = [=](const Vec& z, double) {
        const double z1 = z[0], z2 = z[1];
        if (z1 <= 0.0) throw FlowDomainError("km: z1 must be positive (z1^eta with fractional eta)");
        const double zp = std::pow(z1, eta);
        const double zpm1 = std::pow(z1, eta - 1.0);
        const double zpm2 = std::pow(z1, eta - 2.0);
        smallalg::Mat j(2);
        j(0, 0) = kPi * (eta * zpm1 - (2.0 / 3.0) * (eta + 1.0) * zp) * S(z2);
        j(0, 1) = kPi * zp * (1.0 - (2.0 / 3.0) * z1) * dS(z2);
        j(1, 0) = ((eta + 1.0) * (eta - 1.0) * zpm2 - (2.0 / 3.0) * (eta + 2.0) * eta * zpm1) * C(z2);
        j(1, 1) = ((eta + 1.0) * zpm1 - (2.0 / 3.0) * (eta + 2.0) * zp) * dC(z2);
        return j;
    };
    m.flow.domain = dynsys::DomainBox{Vec{1e-9, -0.5}, Vec{1.5, 0.5}};

    m.manifold = dynsys::FlatManifold(Vec{1.5, 0.0}, Vec{1.0, 0.0});

    const double k = std::pow(1.5, eta - 1.0);
    m.reduced.dim = 1;
    m.reduced.name = "km/surface";
    m.reduced.params = m.flow.params;
    m.reduced.rhs = [k, C](const Vec& z, double) { return Vec{-k * C(z[0])}; };
    m.reduced.jac = [k, dC](const Vec& z, double) { return smallalg::Mat{{-k * dC(z[0])}}; };
    m.reduced.domain = dynsys::DomainBox{Vec{-0.5}, Vec{0.5}};

    m.embed = [](const Vec& r) { return Vec{1.5, r[0]}; };
    m.reduce = [](const Vec& z) { return Vec{z[1]}; };

    auto jac = m.flow.jac;
    m.linearization = [jac](const Vec& r, double t) { return jac(Vec{1.5, r[0]}, t); };
    KuhlmannMuldoonParams pp = p;
    m.nile_integrand = [pp](const Vec& r, double) { return nile_integrand_km(r[0], pp); };

    m.default_reduced_z0 = Vec{0.4};
    return m;
}

std::vector<std::string> registry_ids() { return {"solid-body", "km"}; }

bool registry_has(const std::string& id) {
    for (const auto& s : registry_ids())
        if (s == id) return true;
    return false;
}

ModelFlow make_flow(const std::string& id, const std::map<std::string, double>& params) {
    auto get = [&params](const std::string& key, double dflt) {
        auto it = params.find(key);
        return it == params.end() ? dflt : it->second;
    };
    if (id == "solid-body") {
        SolidBodyParams p;
        p.alpha = get("alpha", p.alpha);
        p.beta = get("beta", p.beta);
        return solid_body(p);
    }
    if (id == "km") {
        KuhlmannMuldoonParams p;
        p.alpha_s = get("alpha_s", p.alpha_s);
        p.eta = get("eta", p.eta);
        return kuhlmann_muldoon(p);
    }
    throw InvalidInput("make_flow: unknown flow id '" + id + "'");
}

std::vector<ParamInfo> param_info(const std::string& id) {
    if (id == "solid-body")
        return {{"alpha", 2.0, "wall regularization rate (> 0)"},
                {"beta", 1.0, "drift speed along the wall (> 0)"}};
    if (id == "km")
        return {{"alpha_s", 0.1, "vortex asymmetry"}, {"eta", 4.74, "radial shape exponent in [4, 5]"}};
    throw InvalidInput("param_info: unknown flow id '" + id + "'");
}

}  // namespace entrex::flows
