#pragma once

// Vector-field abstraction, manifold representations, adaptive trajectory
// integration (state and variational), and cumulative quadrature.

#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "entrex/smallalg.hpp"

namespace entrex::dynsys {

using Vec = std::vector<double>;

/// Axis-aligned box; integration stops with a domain-exit signal outside it.
struct DomainBox {
    Vec lo, hi;
    bool contains(const Vec& z) const;
};

/// A parameterized vector field z' = h(z, t). When no analytic Jacobian is
/// supplied, central finite differences with step 1e-6*(1+|z|) are used.
struct FlowSystem {
    int dim = 0;
    std::string name;
    std::vector<std::pair<std::string, double>> params;

    std::function<Vec(const Vec&, double)> rhs;
    std::function<smallalg::Mat(const Vec&, double)> jac;  // optional
    std::optional<DomainBox> domain;

    Vec operator()(const Vec& z, double t) const { return rhs(z, t); }
    smallalg::Mat jacobian(const Vec& z, double t) const;
    double param(const std::string& key) const;
};

/// Flat manifold: affine subspace through base_point with an orthonormal set
/// of unit normals (one normal for the codimension-one case).
struct FlatManifold {
    Vec base_point;
    std::vector<Vec> normals;

    FlatManifold() = default;
    FlatManifold(Vec base, Vec unit_normal);
    const Vec& unit_normal() const { return normals.front(); }
    int codim() const { return static_cast<int>(normals.size()); }
};

/// Graph manifold {z[x_indices] = m(z[y_indices], t)} with analytic derivative
/// dm_dy of shape x_dim x y_dim (row-major).
struct GraphManifold {
    std::vector<int> x_indices;
    std::vector<int> y_indices;
    std::function<Vec(const Vec& y, double t)> m;
    std::function<std::vector<double>(const Vec& y, double t)> dm_dy;
};

using ManifoldSpec = std::variant<FlatManifold, GraphManifold>;

/// Time-stamped states with stored velocities; evaluation between nodes is
/// cubic Hermite, exact at the nodes.
class Trajectory {
  public:
    Trajectory() = default;
    Trajectory(std::vector<double> times, std::vector<Vec> states, std::vector<Vec> derivs);

    const std::vector<double>& times() const { return times_; }
    const std::vector<Vec>& states() const { return states_; }
    const std::vector<Vec>& derivs() const { return derivs_; }
    double t_begin() const { return times_.front(); }
    double t_end() const { return times_.back(); }
    int dim() const { return states_.empty() ? 0 : static_cast<int>(states_.front().size()); }

    Vec at(double t) const;
    double coord_at(double t, int k) const;

    bool domain_exit = false;  // integration stopped at the domain boundary

  private:
    std::vector<double> times_;
    std::vector<Vec> states_;
    std::vector<Vec> derivs_;
    size_t segment(double t) const;
};

/// Adaptive embedded Runge-Kutta 4(5), Dormand-Prince coefficients, local
/// error controlled with atol = rtol = tol. Throws StiffnessError when the
/// step collapses below 1e-14; leaving the declared domain box is a signal
/// recorded on the trajectory, not an error.
Trajectory integrate(const FlowSystem& flow, const Vec& z0, double t0, double t_end, double tol);

/// Fundamental solution of Z' = A(t) Z with Phi(t0) = I.
class FundamentalSolution {
  public:
    FundamentalSolution() = default;
    FundamentalSolution(Trajectory flat, int dim) : flat_(std::move(flat)), dim_(dim) {}

    int dim() const { return dim_; }
    const std::vector<double>& times() const { return flat_.times(); }
    smallalg::Mat at(double t) const;

  private:
    Trajectory flat_;
    int dim_ = 0;
};

/// Time-dependent matrix family, typically a linearization along a trajectory.
struct MatrixFamily {
    int dim = 0;
    std::function<smallalg::Mat(double)> at;
};

/// Linearization A(t) = D_z h(gamma(t), t) of a flow along a trajectory.
MatrixFamily linearization_along(const FlowSystem& flow, const Trajectory& gamma);

/// Integrate the matrix ODE Phi' = A(t) Phi, Phi(t0) = I.
FundamentalSolution integrate_variational(const MatrixFamily& family, double t0, double t_end,
                                          double tol);
FundamentalSolution integrate_variational(const FlowSystem& flow, const Trajectory& gamma,
                                          double t0, double t_end, double tol);

/// Cumulative integral of sampled data returned at every sample time, first
/// entry exactly zero. Uniform grids get a parabolic (Simpson-class) rule,
/// nonuniform grids composite trapezoid.
std::vector<double> cumulative_quadrature(const std::vector<double>& times,
                                          const std::vector<double>& values);

/// Trapezoid-only cumulative integral; the lowest-assumption rule, used for
/// measured data regardless of grid spacing.
std::vector<double> cumulative_trapezoid(const std::vector<double>& times,
                                         const std::vector<double>& values);

/// Orthogonal projection onto a flat manifold. Graph manifolds are rejected.
Vec project_to_manifold(const ManifoldSpec& m, const Vec& p);

/// Signed distance along the normals: max_k |<p - base, n_k>| for flat manifolds.
double manifold_distance(const FlatManifold& m, const Vec& p);

/// First time after t_after at which coordinate k crosses `level` in the given
/// direction (+1 upward, -1 downward, 0 either); bracketed on the sample grid
/// and refined on the Hermite interpolant.
std::optional<double> first_crossing(const Trajectory& traj, int k, double level, double t_after,
                                     int direction = 0);

}  // namespace entrex::dynsys
