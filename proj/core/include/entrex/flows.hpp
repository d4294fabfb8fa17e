#pragma once

// Built-in model flows: a regularized solid-body rotation over a fixed wall
// and the asymmetric Kuhlmann-Muldoon liquid-bridge model. Each model bundles
// the ambient field with analytic Jacobian, its flat invariant manifold, the
// reduced on-manifold dynamics, and the linear coefficient family consumed by
// the spectral balance functions.

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "entrex/dynsys.hpp"

namespace entrex::flows {

using dynsys::Vec;

struct SolidBodyParams {
    double alpha = 2.0;  // wall regularization rate, > 0
    double beta = 1.0;   // drift speed along the wall, > 0
};

struct KuhlmannMuldoonParams {
    double alpha_s = 0.1;  // asymmetry of the vortex
    double eta = 4.74;     // radial shape exponent, in [4, 5]
};

/// Interval gate on one coordinate; samples outside contribute nothing to
/// balance integrals.
struct NeighbourhoodSpec {
    int coordinate_index = 0;
    double lower = 0.0;
    double upper = 0.0;
};

struct ModelFlow {
    std::string id;
    dynsys::FlowSystem flow;        // ambient field
    dynsys::FlatManifold manifold;  // invariant wall/surface
    dynsys::FlowSystem reduced;     // dynamics restricted to the manifold

    std::function<Vec(const Vec&)> embed;   // reduced coords -> ambient point on M
    std::function<Vec(const Vec&)> reduce;  // ambient point on M -> reduced coords

    /// Coefficient matrix A(t) of the linear normal/tangential dynamics along
    /// the on-manifold trajectory through `reduced_state`; the spectral
    /// balance functions (eigenvalue and Lyapunov-exponent kinds) sample it.
    std::function<smallalg::Mat(const Vec& reduced_state, double t)> linearization;

    /// Optional closed-form normal-rate integrand along the reduced
    /// trajectory; when absent the geometric normal rate n^T A n is used.
    std::function<double(const Vec& reduced_state, double t)> nile_integrand;

    Vec default_reduced_z0;
};

/// Fast-slow split eps*x' = f(x,y), y' = g(x,y) with the critical manifold
/// {f(x,y,0) = 0} and the slow dynamics on it.
struct FastSlowSystem {
    int fast_dim = 0;
    int slow_dim = 0;
    std::function<Vec(const Vec& x, const Vec& y)> fast_rhs;
    std::function<Vec(const Vec& x, const Vec& y)> slow_rhs;
    std::function<smallalg::Mat(const Vec& x, const Vec& y)> fast_jacobian;
    std::function<Vec(const Vec& y)> critical_x;
    dynsys::FlowSystem slow_flow;
};

/// Rotation about (0, beta) regularized so the wall {z2 = 0} is invariant:
///   z1' = -(z2 - beta),  z2' = z1 (1 - exp(-alpha z2)).
/// On the wall the drift is z1' = beta.
ModelFlow solid_body(const SolidBodyParams& p);

/// The same field rescaled to explicit fast-slow form at finite eps:
///   eps x' = y (1 - exp(-alpha x)),  y' = -(x - beta),
/// under (z1, z2, t) = (y/sqrt(eps), x, s/sqrt(eps)).
dynsys::FlowSystem solid_body_fastslow(const SolidBodyParams& p, double eps);

/// Fast-slow split of the solid-body field on the wall branch {x = 0}.
FastSlowSystem solid_body_fastslow_split(const SolidBodyParams& p);

/// Planar Kuhlmann-Muldoon vortex model at aspect ratio 2/3 with asymmetry
/// alpha_s; the capillary surface {z1 = 3/2} is invariant, and on it
///   z2' = -(3/2)^(eta-1) [cos(pi z2) + alpha_s sin(2 pi z2)].
ModelFlow kuhlmann_muldoon(const KuhlmannMuldoonParams& p);

/// Closed-form normal-rate integrand of the Kuhlmann-Muldoon model along the
/// surface: -(3/2)^(eta-1) pi [2 alpha_s cos(2 pi g2) - sin(pi g2)].
double nile_integrand_km(double gamma2, const KuhlmannMuldoonParams& p);

/// Registry of model flows addressable by id ("solid-body", "km").
std::vector<std::string> registry_ids();
bool registry_has(const std::string& id);
ModelFlow make_flow(const std::string& id, const std::map<std::string, double>& params = {});

struct ParamInfo {
    std::string name;
    double default_value;
    std::string note;
};
std::vector<ParamInfo> param_info(const std::string& id);

}  // namespace entrex::flows
