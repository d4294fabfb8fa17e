#include "entrex/dynsys.hpp"

#include <algorithm>
#include <cmath>

#include "entrex/errors.hpp"
#include "entrex/rootfind.hpp"

namespace entrex::dynsys {

namespace {

double norm2(const Vec& v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

bool all_finite(const Vec& v) {
    for (double x : v)
        if (!std::isfinite(x)) return false;
    return true;
}

}  // namespace

bool DomainBox::contains(const Vec& z) const {
    for (size_t i = 0; i < z.size(); ++i)
        if (z[i] < lo[i] || z[i] > hi[i]) return false;
    return true;
}

smallalg::Mat FlowSystem::jacobian(const Vec& z, double t) const {
    if (jac) return jac(z, t);
    const double h = 1e-6 * (1.0 + norm2(z));
    smallalg::Mat j(dim);
    Vec zp = z, zm = z;
    for (int c = 0; c < dim; ++c) {
        zp[c] = z[c] + h;
        zm[c] = z[c] - h;
        const Vec fp = rhs(zp, t);
        const Vec fm = rhs(zm, t);
        for (int r = 0; r < dim; ++r) j(r, c) = (fp[r] - fm[r]) / (2.0 * h);
        zp[c] = z[c];
        zm[c] = z[c];
    }
    return j;
}

double FlowSystem::param(const std::string& key) const {
    for (const auto& [k, v] : params)
        if (k == key) return v;
    throw InvalidInput("FlowSystem '" + name + "': unknown parameter '" + key + "'");
}

FlatManifold::FlatManifold(Vec base, Vec unit_normal) : base_point(std::move(base)) {
    const double n = norm2(unit_normal);
    if (std::abs(n - 1.0) > 1e-12)
        throw InvalidInput("FlatManifold: normal must be a unit vector");
    normals.push_back(std::move(unit_normal));
}

Trajectory::Trajectory(std::vector<double> times, std::vector<Vec> states, std::vector<Vec> derivs)
    : times_(std::move(times)), states_(std::move(states)), derivs_(std::move(derivs)) {
    if (times_.size() < 1 || times_.size() != states_.size() || times_.size() != derivs_.size())
        throw InvalidInput("Trajectory: inconsistent sizes");
    for (size_t i = 0; i + 1 < times_.size(); ++i)
        if (!(times_[i] < times_[i + 1])) throw InvalidInput("Trajectory: times must increase");
    for (const auto& s : states_)
        if (!all_finite(s)) throw InvalidInput("Trajectory: non-finite state");
}

size_t Trajectory::segment(double t) const {
    const double slack = 1e-9 * (1.0 + times_.back() - times_.front());
    if (t < times_.front() - slack || t > times_.back() + slack)
        throw InvalidInput("Trajectory: time outside stored span");
    auto it = std::upper_bound(times_.begin(), times_.end(), t);
    size_t k = static_cast<size_t>(std::distance(times_.begin(), it));
    if (k == 0) return 0;
    if (k >= times_.size()) return times_.size() - 2;
    return k - 1;
}

Vec Trajectory::at(double t) const {
    if (times_.size() == 1) return states_.front();
    const size_t k = segment(t);
    if (t == times_[k]) return states_[k];
    if (t == times_[k + 1]) return states_[k + 1];
    const double h = times_[k + 1] - times_[k];
    const double s = (t - times_[k]) / h;
    const double s2 = s * s, s3 = s2 * s;
    const double h00 = 2 * s3 - 3 * s2 + 1;
    const double h10 = s3 - 2 * s2 + s;
    const double h01 = -2 * s3 + 3 * s2;
    const double h11 = s3 - s2;
    Vec out(states_[k].size());
    for (size_t i = 0; i < out.size(); ++i)
        out[i] = h00 * states_[k][i] + h10 * h * derivs_[k][i] + h01 * states_[k + 1][i] +
                 h11 * h * derivs_[k + 1][i];
    return out;
}

double Trajectory::coord_at(double t, int c) const { return at(t)[c]; }

namespace {

// Dormand-Prince 4(5) tableau.
constexpr double kC[7] = {0.0, 1.0 / 5, 3.0 / 10, 4.0 / 5, 8.0 / 9, 1.0, 1.0};
constexpr double kA[7][6] = {
    {},
    {1.0 / 5},
    {3.0 / 40, 9.0 / 40},
    {44.0 / 45, -56.0 / 15, 32.0 / 9},
    {19372.0 / 6561, -25360.0 / 2187, 64448.0 / 6561, -212.0 / 729},
    {9017.0 / 3168, -355.0 / 33, 46732.0 / 5247, 49.0 / 176, -5103.0 / 18656},
    {35.0 / 384, 0.0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84},
};
constexpr double kErr[7] = {71.0 / 57600,  0.0,        -71.0 / 16695, 71.0 / 1920,
                            -17253.0 / 339200, 22.0 / 525, -1.0 / 40};

struct StepResult {
    Vec y;
    Vec f_new;  // FSAL stage
    double err;
};

StepResult dp45_step(const std::function<Vec(const Vec&, double)>& f, const Vec& y, double t,
                     double h, const Vec& f0, double tol) {
    const size_t n = y.size();
    Vec k[7];
    k[0] = f0;
    Vec stage(n);
    for (int s = 1; s < 7; ++s) {
        for (size_t i = 0; i < n; ++i) {
            double acc = 0.0;
            for (int j = 0; j < s; ++j) acc += kA[s][j] * k[j][i];
            stage[i] = y[i] + h * acc;
        }
        k[s] = f(stage, t + kC[s] * h);
    }
    StepResult r;
    r.y = stage;  // stage 6 used the 5th-order weights, so this is y_{n+1}
    r.f_new = k[6];
    double err = 0.0;
    for (size_t i = 0; i < n; ++i) {
        double e = 0.0;
        for (int s = 0; s < 7; ++s) e += kErr[s] * k[s][i];
        e *= h;
        const double sc = tol + tol * std::max(std::abs(y[i]), std::abs(r.y[i]));
        err += (e / sc) * (e / sc);
    }
    r.err = std::sqrt(err / static_cast<double>(n));
    return r;
}

}  // namespace

Trajectory integrate(const FlowSystem& flow, const Vec& z0, double t0, double t_end, double tol) {
    if (!(t_end > t0)) throw InvalidInput("integrate: t_end must exceed t0");
    if (static_cast<int>(z0.size()) != flow.dim) throw InvalidInput("integrate: state size mismatch");
    if (!all_finite(z0)) throw InvalidInput("integrate: non-finite initial state");
    if (flow.domain && !flow.domain->contains(z0))
        throw InvalidInput("integrate: initial state outside the domain box");
    if (!(tol > 0.0)) throw InvalidInput("integrate: tol must be positive");

    std::vector<double> times{t0};
    std::vector<Vec> states{z0};
    Vec f0 = flow.rhs(z0, t0);
    std::vector<Vec> derivs{f0};
    bool domain_exit = false;

    double t = t0;
    Vec y = z0;
    const double span = t_end - t0;
    double h = std::min(span / 100.0, 0.1 * (1.0 + norm2(y)) / (norm2(f0) + 1e-12));
    h = std::clamp(h, 1e-10 * span, span);

    while (t < t_end) {
        if (h < 1e-14) throw StiffnessError("integrate: step size underflow");
        h = std::min(h, t_end - t);

        bool outside_field_domain = false;
        bool stage_failed = false;
        StepResult step;
        try {
            step = dp45_step(flow.rhs, y, t, h, f0, tol);
        } catch (const FlowDomainError&) {
            stage_failed = true;
            outside_field_domain = true;
        }
        if (!stage_failed && !all_finite(step.y)) stage_failed = true;

        if (stage_failed) {
            h *= 0.5;
            if (h < 1e-14) {
                if (outside_field_domain) {
                    domain_exit = true;
                    break;
                }
                throw StiffnessError("integrate: step size underflow");
            }
            continue;
        }

        if (step.err <= 1.0) {
            if (flow.domain && !flow.domain->contains(step.y)) {
                // Shrink toward the boundary; give up once the remaining step
                // cannot move the state meaningfully.
                if (h > 1e-12 * (1.0 + std::abs(t))) {
                    h *= 0.5;
                    continue;
                }
                domain_exit = true;
                break;
            }
            t += h;
            y = step.y;
            f0 = step.f_new;
            times.push_back(t);
            states.push_back(y);
            derivs.push_back(f0);
            h *= std::clamp(0.9 * std::pow(std::max(step.err, 1e-10), -0.2), 1.0, 5.0);
        } else {
            h *= std::clamp(0.9 * std::pow(step.err, -0.2), 0.2, 0.9);
        }
    }

    Trajectory traj(std::move(times), std::move(states), std::move(derivs));
    traj.domain_exit = domain_exit;
    return traj;
}

smallalg::Mat FundamentalSolution::at(double t) const {
    const Vec flat = flat_.at(t);
    smallalg::Mat m(dim_);
    for (int i = 0; i < dim_; ++i)
        for (int j = 0; j < dim_; ++j) m(i, j) = flat[static_cast<size_t>(i) * dim_ + j];
    return m;
}

MatrixFamily linearization_along(const FlowSystem& flow, const Trajectory& gamma) {
    MatrixFamily fam;
    fam.dim = flow.dim;
    fam.at = [flow, gamma](double t) { return flow.jacobian(gamma.at(t), t); };
    return fam;
}

FundamentalSolution integrate_variational(const MatrixFamily& family, double t0, double t_end,
                                          double tol) {
    const int d = family.dim;
    FlowSystem matode;
    matode.dim = d * d;
    matode.name = "variational";
    matode.rhs = [family, d](const Vec& z, double t) {
        const smallalg::Mat a = family.at(t);
        Vec out(static_cast<size_t>(d) * d, 0.0);
        for (int i = 0; i < d; ++i)
            for (int k = 0; k < d; ++k) {
                const double aik = a(i, k);
                if (aik == 0.0) continue;
                for (int j = 0; j < d; ++j)
                    out[static_cast<size_t>(i) * d + j] += aik * z[static_cast<size_t>(k) * d + j];
            }
        return out;
    };
    Vec id(static_cast<size_t>(d) * d, 0.0);
    for (int i = 0; i < d; ++i) id[static_cast<size_t>(i) * d + i] = 1.0;
    return FundamentalSolution(integrate(matode, id, t0, t_end, tol), d);
}

FundamentalSolution integrate_variational(const FlowSystem& flow, const Trajectory& gamma,
                                          double t0, double t_end, double tol) {
    if (t0 < gamma.t_begin() - 1e-12 || t_end > gamma.t_end() + 1e-12)
        throw InvalidInput("integrate_variational: gamma does not cover [t0, t_end]");
    return integrate_variational(linearization_along(flow, gamma), t0, t_end, tol);
}

std::vector<double> cumulative_quadrature(const std::vector<double>& times,
                                          const std::vector<double>& values) {
    const size_t n = times.size();
    if (n < 2 || values.size() != n)
        throw InvalidInput("cumulative_quadrature: need at least 2 samples");
    for (size_t i = 0; i + 1 < n; ++i)
        if (!(times[i] < times[i + 1]))
            throw InvalidInput("cumulative_quadrature: times must strictly increase");
    for (double v : values)
        if (!std::isfinite(v)) throw InvalidInput("cumulative_quadrature: non-finite value");

    const double dt = (times.back() - times.front()) / static_cast<double>(n - 1);
    bool uniform = true;
    for (size_t i = 0; i + 1 < n; ++i) {
        if (std::abs(times[i + 1] - times[i] - dt) > 1e-9 * dt) {
            uniform = false;
            break;
        }
    }

    std::vector<double> out(n, 0.0);
    if (!uniform || n == 2) {
        for (size_t i = 0; i + 1 < n; ++i)
            out[i + 1] = out[i] + 0.5 * (times[i + 1] - times[i]) * (values[i] + values[i + 1]);
        return out;
    }
    // Per-interval parabola through three neighbouring samples; exact for
    // polynomials of degree <= 2, Simpson-class accuracy on smooth data.
    for (size_t i = 0; i + 1 < n; ++i) {
        double seg;
        if (i == 0) {
            seg = dt * (5.0 / 12.0 * values[0] + 2.0 / 3.0 * values[1] - 1.0 / 12.0 * values[2]);
        } else {
            seg = dt * (-1.0 / 12.0 * values[i - 1] + 2.0 / 3.0 * values[i] +
                        5.0 / 12.0 * values[i + 1]);
        }
        out[i + 1] = out[i] + seg;
    }
    return out;
}

std::vector<double> cumulative_trapezoid(const std::vector<double>& times,
                                         const std::vector<double>& values) {
    const size_t n = times.size();
    if (n < 2 || values.size() != n)
        throw InvalidInput("cumulative_trapezoid: need at least 2 samples");
    for (size_t i = 0; i + 1 < n; ++i)
        if (!(times[i] < times[i + 1]))
            throw InvalidInput("cumulative_trapezoid: times must strictly increase");
    std::vector<double> out(n, 0.0);
    for (size_t i = 0; i + 1 < n; ++i)
        out[i + 1] = out[i] + 0.5 * (times[i + 1] - times[i]) * (values[i] + values[i + 1]);
    return out;
}

Vec project_to_manifold(const ManifoldSpec& m, const Vec& p) {
    if (std::holds_alternative<GraphManifold>(m))
        throw UnsupportedManifoldKind("project_to_manifold: graph manifolds are not supported");
    const auto& flat = std::get<FlatManifold>(m);
    Vec out = p;
    for (const Vec& nrm : flat.normals) {
        double dot = 0.0;
        for (size_t i = 0; i < p.size(); ++i) dot += (p[i] - flat.base_point[i]) * nrm[i];
        for (size_t i = 0; i < p.size(); ++i) out[i] -= dot * nrm[i];
    }
    return out;
}

double manifold_distance(const FlatManifold& m, const Vec& p) {
    double best = 0.0;
    for (const Vec& nrm : m.normals) {
        double dot = 0.0;
        for (size_t i = 0; i < p.size(); ++i) dot += (p[i] - m.base_point[i]) * nrm[i];
        best = std::max(best, std::abs(dot));
    }
    return best;
}

std::optional<double> first_crossing(const Trajectory& traj, int k, double level, double t_after,
                                     int direction) {
    const auto& ts = traj.times();
    for (size_t i = 0; i + 1 < ts.size(); ++i) {
        if (ts[i + 1] <= t_after) continue;
        const double a = std::max(ts[i], t_after);
        const double ga = traj.coord_at(a, k) - level;
        const double gb = traj.coord_at(ts[i + 1], k) - level;
        if (direction > 0 && !(gb > ga)) continue;
        if (direction < 0 && !(gb < ga)) continue;
        if (ga == 0.0 && gb == 0.0) continue;
        if (ga * gb > 0.0) continue;
        if (gb == 0.0) return ts[i + 1];
        if (ga == 0.0) {
            if (a > t_after) return a;
            continue;
        }
        const double root = brent([&](double t) { return traj.coord_at(t, k) - level; }, a, ts[i + 1]);
        if (root > t_after) return root;
    }
    return std::nullopt;
}

}  // namespace entrex::dynsys
