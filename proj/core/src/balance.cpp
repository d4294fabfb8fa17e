#include "entrex/balance.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <fstream>
#include <limits>
#include <numeric>

#include <nlohmann/json.hpp>

#include "entrex/errors.hpp"
#include "entrex/rootfind.hpp"
#include "entrex/textio.hpp"

namespace entrex::balance {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

using Cplx = std::complex<double>;

double interp_linear(const std::vector<double>& ts, const std::vector<double>& vs, double t) {
    auto it = std::upper_bound(ts.begin(), ts.end(), t);
    size_t k = static_cast<size_t>(std::distance(ts.begin(), it));
    if (k == 0) return vs.front();
    if (k >= ts.size()) return vs.back();
    const double w = (t - ts[k - 1]) / (ts[k] - ts[k - 1]);
    return (1.0 - w) * vs[k - 1] + w * vs[k];
}

double interp_hermite(const std::vector<double>& ts, const std::vector<double>& vs,
                      const std::vector<double>& ds, double t) {
    auto it = std::upper_bound(ts.begin(), ts.end(), t);
    size_t k = static_cast<size_t>(std::distance(ts.begin(), it));
    if (k == 0) return vs.front();
    if (k >= ts.size()) return vs.back();
    --k;
    const double h = ts[k + 1] - ts[k];
    const double s = (t - ts[k]) / h;
    const double s2 = s * s, s3 = s2 * s;
    return (2 * s3 - 3 * s2 + 1) * vs[k] + (s3 - 2 * s2 + s) * h * ds[k] +
           (-2 * s3 + 3 * s2) * vs[k + 1] + (s3 - s2) * h * ds[k + 1];
}

}  // namespace

std::string BalanceKind::label() const {
    switch (type) {
        case Type::instant_eig: return "eig[" + std::to_string(index) + "]";
        case Type::fast_slow: return "fastslow[" + std::to_string(index) + "]";
        case Type::ftle:
            return std::string("ftle[") + std::to_string(index) + "," +
                   (mode == FtleMode::exact ? "exact" : "commuting") + "]";
        case Type::nile: return "nile";
        case Type::measured_velocity: return "velocity";
    }
    return "?";
}

BalanceKind BalanceKind::parse(const std::string& method, int index, const std::string& mode) {
    BalanceKind k;
    k.index = index;
    if (method == "eig")
        k.type = Type::instant_eig;
    else if (method == "fastslow")
        k.type = Type::fast_slow;
    else if (method == "ftle")
        k.type = Type::ftle;
    else if (method == "nile")
        k.type = Type::nile;
    else if (method == "velocity")
        k.type = Type::measured_velocity;
    else
        throw InvalidInput("unknown balance method '" + method + "'");
    if (mode == "exact")
        k.mode = FtleMode::exact;
    else if (mode == "commuting")
        k.mode = FtleMode::commuting;
    else
        throw InvalidInput("unknown ftle mode '" + mode + "'");
    return k;
}

double BalanceSeries::value_at(double t) const {
    if (!slopes.empty()) return interp_hermite(times, values, slopes, t);
    return interp_linear(times, values, t);
}

double BalanceSeries::max_abs() const {
    double m = 0.0;
    for (double v : values)
        if (std::isfinite(v)) m = std::max(m, std::abs(v));
    return m;
}

std::vector<double> SeriesGrid::times(bool exclude_t0) const {
    if (n < 2) throw InvalidInput("SeriesGrid: need at least 2 points");
    if (!(t_end > t0)) throw InvalidInput("SeriesGrid: t_end must exceed t0");
    std::vector<double> ts;
    ts.reserve(static_cast<size_t>(n));
    const double h = (t_end - t0) / static_cast<double>(n - 1);
    for (int i = exclude_t0 ? 1 : 0; i < n; ++i) ts.push_back(t0 + h * i);
    return ts;
}

// ---------------------------------------------------------------------------
// Eigenvalue branch tracking
// ---------------------------------------------------------------------------

namespace {

struct Tracked {
    // branches[j][k] = value of branch j at sample k
    std::vector<std::vector<Cplx>> branches;
    int ambiguous = 0;
    int failures = 0;
};

double assignment_cost(const std::vector<Cplx>& prev, const std::vector<Cplx>& cur,
                       const std::vector<int>& perm) {
    double c = 0.0;
    for (size_t i = 0; i < prev.size(); ++i) c += std::norm(prev[i] - cur[perm[i]]);
    return c;
}

// Nearest-value matching between consecutive samples. Exact cost ties (branch
// merge/split events) keep the incoming sorted order and are counted as
// ambiguous crossings.
std::vector<int> match_branches(const std::vector<Cplx>& prev, const std::vector<Cplx>& cur,
                                int* ambiguous) {
    const int d = static_cast<int>(prev.size());
    std::vector<int> identity(d);
    std::iota(identity.begin(), identity.end(), 0);
    double scale = 1.0;
    for (const Cplx& v : prev) scale += std::norm(v);
    for (const Cplx& v : cur) scale += std::norm(v);
    const double tie_tol = 1e-10 * scale;

    if (d <= 7) {
        std::vector<int> perm = identity, best = identity;
        double best_cost = assignment_cost(prev, cur, perm);
        double second = kInf;
        while (std::next_permutation(perm.begin(), perm.end())) {
            const double c = assignment_cost(prev, cur, perm);
            if (c < best_cost - tie_tol) {
                second = best_cost;
                best_cost = c;
                best = perm;
            } else {
                second = std::min(second, c);
            }
        }
        if (second - best_cost <= tie_tol) ++(*ambiguous);
        return best;
    }

    // Greedy fallback for larger dimensions.
    std::vector<int> out(d, -1);
    std::vector<bool> used(d, false);
    for (int i = 0; i < d; ++i) {
        double bestc = kInf;
        int bestj = -1;
        for (int j = 0; j < d; ++j) {
            if (used[j]) continue;
            const double c = std::norm(prev[i] - cur[j]);
            if (c < bestc) {
                bestc = c;
                bestj = j;
            }
        }
        used[bestj] = true;
        out[i] = bestj;
    }
    return out;
}

Tracked track_eigen_branches(const std::function<smallalg::Mat(double)>& family,
                             const std::vector<double>& ts) {
    const double span = ts.back() - ts.front();
    Tracked tr;
    std::vector<Cplx> prev;
    for (size_t k = 0; k < ts.size(); ++k) {
        smallalg::Spectrum spec = smallalg::eigenvalues(family(ts[k]));
        for (int attempt = 1; !spec.converged && attempt <= 3; ++attempt)
            spec = smallalg::eigenvalues(family(ts[k] + attempt * 1e-9 * span));
        if (!spec.converged) ++tr.failures;

        const int d = static_cast<int>(spec.values.size());
        if (tr.branches.empty()) tr.branches.resize(d);
        if (k == 0) {
            for (int j = 0; j < d; ++j) tr.branches[j].push_back(spec.values[j]);
        } else {
            const std::vector<int> perm = match_branches(prev, spec.values, &tr.ambiguous);
            for (int j = 0; j < d; ++j) tr.branches[j].push_back(spec.values[perm[j]]);
        }
        prev.resize(d);
        for (int j = 0; j < d; ++j) prev[j] = tr.branches[j].back();
    }
    return tr;
}

BalanceSeries make_integral_series(std::vector<double> ts, std::vector<double> integrand,
                                   BalanceKind kind) {
    BalanceSeries s;
    s.values = dynsys::cumulative_quadrature(ts, integrand);
    s.times = std::move(ts);
    s.slopes = std::move(integrand);
    s.kind = kind;
    s.t0 = s.times.front();
    return s;
}

BalanceSeries tracked_eig_series(const std::function<smallalg::Mat(double)>& family, int j,
                                 const SeriesGrid& grid, BalanceKind kind) {
    std::vector<double> ts = grid.times();
    Tracked tr = track_eigen_branches(family, ts);
    if (j < 0 || j >= static_cast<int>(tr.branches.size()))
        throw InvalidInput("balance: branch index out of range");
    if (100 * tr.failures > static_cast<int>(ts.size()))
        throw DegradedQualityError("balance: eigenvalue iteration failed on more than 1% of samples");
    std::vector<double> integrand(ts.size());
    for (size_t k = 0; k < ts.size(); ++k) integrand[k] = tr.branches[j][k].real();
    BalanceSeries s = make_integral_series(std::move(ts), std::move(integrand), kind);
    s.ambiguous_crossings = tr.ambiguous;
    return s;
}

}  // namespace

BalanceSeries series_instant_eig(const dynsys::MatrixFamily& a, int j, const SeriesGrid& grid) {
    BalanceKind kind;
    kind.type = BalanceKind::Type::instant_eig;
    kind.index = j;
    return tracked_eig_series(a.at, j, grid, kind);
}

BalanceSeries series_fastslow(const flows::FastSlowSystem& fs, const dynsys::Trajectory& slow,
                              int j, const SeriesGrid& grid) {
    BalanceKind kind;
    kind.type = BalanceKind::Type::fast_slow;
    kind.index = j;
    auto family = [&fs, &slow](double t) {
        const Vec y = slow.at(t);
        return fs.fast_jacobian(fs.critical_x(y), y);
    };
    return tracked_eig_series(family, j, grid, kind);
}

BalanceSeries series_ftle(const dynsys::MatrixFamily& a, int j, FtleMode mode,
                          const SeriesGrid& grid, double ode_tol) {
    if (j < 0 || j >= a.dim) throw InvalidInput("series_ftle: branch index out of range");
    BalanceKind kind;
    kind.type = BalanceKind::Type::ftle;
    kind.index = j;
    kind.mode = mode;

    BalanceSeries s;
    s.kind = kind;
    s.t0 = grid.t0;
    s.times = grid.times(/*exclude_t0=*/true);
    s.values.resize(s.times.size());

    auto rate = [&](const smallalg::Mat& phi, double t) {
        const smallalg::SingularValues sv = smallalg::singular_values(phi);
        const double delta = sv.values[static_cast<size_t>(j)];
        return delta > 0.0 ? std::log(delta) / (t - grid.t0) : -kInf;
    };

    if (mode == FtleMode::exact) {
        const dynsys::FundamentalSolution phi = integrate_variational(a, grid.t0, grid.t_end, ode_tol);
        for (size_t k = 0; k < s.times.size(); ++k) s.values[k] = rate(phi.at(s.times[k]), s.times[k]);
        return s;
    }

    // Commuting mode: Phi(t) = expm of the entrywise cumulative integral of A.
    const std::vector<double> full = grid.times();
    const int d = a.dim;
    std::vector<std::vector<double>> entry(static_cast<size_t>(d) * d);
    for (auto& e : entry) e.reserve(full.size());
    for (double t : full) {
        const smallalg::Mat m = a.at(t);
        for (int i = 0; i < d; ++i)
            for (int c = 0; c < d; ++c) entry[static_cast<size_t>(i) * d + c].push_back(m(i, c));
    }
    std::vector<std::vector<double>> cum(entry.size());
    for (size_t e = 0; e < entry.size(); ++e) cum[e] = dynsys::cumulative_quadrature(full, entry[e]);
    for (size_t k = 1; k < full.size(); ++k) {
        smallalg::Mat b(d);
        for (int i = 0; i < d; ++i)
            for (int c = 0; c < d; ++c) b(i, c) = cum[static_cast<size_t>(i) * d + c][k];
        s.values[k - 1] = rate(smallalg::expm(b), full[k]);
    }
    return s;
}

double nile_point(const dynsys::FlowSystem& flow, const dynsys::ManifoldSpec& manifold,
                  const Vec& p, double t) {
    double pscale = 1.0;
    for (double x : p) pscale += std::abs(x);

    if (std::holds_alternative<dynsys::FlatManifold>(manifold)) {
        const auto& flat = std::get<dynsys::FlatManifold>(manifold);
        if (dynsys::manifold_distance(flat, p) > 1e-10 * pscale)
            throw InvalidInput("nile_point: point is not on the manifold");
        const smallalg::Mat a = flow.jacobian(p, t);
        const int codim = flat.codim();
        if (codim == 1) {
            const Vec& n = flat.unit_normal();
            double s = 0.0;
            for (size_t i = 0; i < n.size(); ++i)
                for (size_t c = 0; c < n.size(); ++c) s += n[i] * a(static_cast<int>(i), static_cast<int>(c)) * n[c];
            return s;
        }
        // Restricted symmetric eigenproblem over the normal space.
        smallalg::Mat b(codim);
        for (int r = 0; r < codim; ++r)
            for (int c = 0; c < codim; ++c) {
                double s = 0.0;
                for (size_t i = 0; i < p.size(); ++i)
                    for (size_t k = 0; k < p.size(); ++k)
                        s += flat.normals[r][i] *
                             0.5 * (a(static_cast<int>(i), static_cast<int>(k)) + a(static_cast<int>(k), static_cast<int>(i))) *
                             flat.normals[c][k];
                b(r, c) = s;
            }
        return smallalg::sym_eigen_max(b);
    }

    const auto& g = std::get<dynsys::GraphManifold>(manifold);
    const int mx = static_cast<int>(g.x_indices.size());
    const int ny = static_cast<int>(g.y_indices.size());
    Vec y(ny);
    for (int i = 0; i < ny; ++i) y[i] = p[g.y_indices[i]];
    const Vec xg = g.m(y, t);
    for (int i = 0; i < mx; ++i)
        if (std::abs(p[g.x_indices[i]] - xg[i]) > 1e-10 * pscale)
            throw InvalidInput("nile_point: point is not on the graph manifold");
    const smallalg::Mat a = flow.jacobian(p, t);
    const std::vector<double> dm = g.dm_dy(y, t);  // mx x ny, row-major
    smallalg::Mat gamma(mx);
    for (int r = 0; r < mx; ++r)
        for (int c = 0; c < mx; ++c) {
            double s = a(g.x_indices[r], g.x_indices[c]);
            for (int k = 0; k < ny; ++k)
                s -= dm[static_cast<size_t>(r) * ny + k] * a(g.y_indices[k], g.x_indices[c]);
            gamma(r, c) = s;
        }
    return smallalg::sym_eigen_max(gamma);
}

BalanceSeries series_nile(const dynsys::FlowSystem& flow, const dynsys::ManifoldSpec& manifold,
                          const dynsys::Trajectory& gamma, const SeriesGrid& grid) {
    std::vector<double> ts = grid.times();
    std::vector<double> integrand(ts.size());
    for (size_t k = 0; k < ts.size(); ++k)
        integrand[k] = nile_point(flow, manifold, gamma.at(ts[k]), ts[k]);
    BalanceKind kind;
    kind.type = BalanceKind::Type::nile;
    return make_integral_series(std::move(ts), std::move(integrand), kind);
}

BalanceSeries series_velocity(const std::vector<double>& times, const std::vector<double>& vn,
                              const std::vector<bool>& in_gate) {
    if (times.size() != vn.size() || times.size() != in_gate.size())
        throw InvalidInput("series_velocity: size mismatch");
    size_t inside = 0;
    for (bool b : in_gate) inside += b ? 1 : 0;
    if (inside == 0) throw NoSignalError("series_velocity: no in-gate samples");
    std::vector<double> gated(vn.size());
    for (size_t i = 0; i < vn.size(); ++i) gated[i] = in_gate[i] ? vn[i] : 0.0;

    BalanceSeries s;
    s.values = dynsys::cumulative_trapezoid(times, gated);
    s.times = times;
    s.slopes = std::move(gated);
    s.kind.type = BalanceKind::Type::measured_velocity;
    s.t0 = times.front();
    return s;
}

std::optional<ExitPrediction> find_exit(const BalanceSeries& series, const ExitSearchOptions& opt) {
    const auto& ts = series.times;
    const auto& vs = series.values;
    if (ts.size() < 3) throw InvalidInput("find_exit: need at least 3 samples");

    const double zt = opt.zero_tol > 0.0 ? opt.zero_tol : 1e-9 * (1.0 + series.max_abs());

    auto make_prediction = [&](double t_root, std::pair<double, double> bracket) {
        ExitPrediction p;
        p.T = t_root;
        p.bracket = bracket;
        // Centered difference of the interpolated series at the local grid scale.
        size_t k = static_cast<size_t>(
            std::distance(ts.begin(), std::upper_bound(ts.begin(), ts.end(), t_root)));
        k = std::min(std::max<size_t>(k, 1), ts.size() - 1);
        const double h = ts[k] - ts[k - 1];
        const double lo = std::max(t_root - h, ts.front());
        const double hi = std::min(t_root + h, ts.back());
        p.dF_dt_at_T = (series.value_at(hi) - series.value_at(lo)) / (hi - lo);
        p.degenerate = std::abs(p.dF_dt_at_T) < opt.deriv_tol;
        return p;
    };

    // Leading plateau: the run of near-zero values forced by the integral
    // definition; the first nontrivial zero lies beyond it.
    size_t start = ts.size();
    for (size_t i = 0; i < vs.size(); ++i) {
        if (std::isfinite(vs[i]) && std::abs(vs[i]) > zt) {
            start = i;
            break;
        }
    }
    if (start < ts.size()) {
        for (size_t k = start; k + 1 < ts.size(); ++k) {
            if (!std::isfinite(vs[k]) || !std::isfinite(vs[k + 1])) continue;
            if (vs[k] * vs[k + 1] < 0.0) {
                const double root = brent([&series](double t) { return series.value_at(t); },
                                          ts[k], ts[k + 1]);
                return make_prediction(root, {ts[k], ts[k + 1]});
            }
            if (std::abs(vs[k + 1]) <= zt)
                return make_prediction(ts[k + 1], {ts[k], ts[k + 1]});
        }
    }
    if (opt.force_trivial) return make_prediction(ts.front(), {ts.front(), ts.front()});
    return std::nullopt;
}

Vec exit_point(const dynsys::FlowSystem& reduced_flow, const Vec& z0_on_m, double t0, double T,
               double tol) {
    if (T < t0) throw InvalidInput("exit_point: T must not precede t0");
    if (T - t0 < 1e-14) return z0_on_m;
    const dynsys::Trajectory traj = dynsys::integrate(reduced_flow, z0_on_m, t0, T, tol);
    if (traj.domain_exit && traj.t_end() < T - 1e-9 * (T - t0))
        throw FlowDomainError("exit_point: on-manifold dynamics left the domain before T");
    return traj.states().back();
}

namespace {

std::function<double(double)> nile_integrand_along(const flows::ModelFlow& model,
                                                   const dynsys::Trajectory& reduced_traj) {
    if (model.nile_integrand) {
        return [&model, &reduced_traj](double t) {
            return model.nile_integrand(reduced_traj.at(t), t);
        };
    }
    return [&model, &reduced_traj](double t) {
        const Vec p = model.embed(reduced_traj.at(t));
        return nile_point(model.flow, model.manifold, p, t);
    };
}

}  // namespace

double default_span(const flows::ModelFlow& model, const Vec& reduced_z0, double t0) {
    const Vec z0 = reduced_z0.empty() ? model.default_reduced_z0 : reduced_z0;
    constexpr double kCap = 16384.0;
    for (double window = 1.0; window <= kCap; window *= 2.0) {
        const dynsys::Trajectory traj = dynsys::integrate(model.reduced, z0, t0, t0 + window, 1e-8);
        auto integrand = nile_integrand_along(model, traj);
        const int n = 512;
        const double end = traj.t_end();
        const double h = (end - t0) / n;
        double g0 = 0.0;
        double t_prev = t0;
        for (int i = 0; i <= n; ++i) {
            const double t = t0 + i * h;
            const double g = integrand(t);
            if (g0 == 0.0) {
                g0 = g;
            } else if (g * g0 < 0.0) {
                const double t_sc = brent(
                    [&integrand](double x) { return integrand(x); }, t_prev, t);
                return 8.0 * (t_sc - t0);
            }
            t_prev = t;
        }
        if (traj.domain_exit) break;  // a longer window cannot add new samples
    }
    return kCap;
}

PipelineResult run_balance(const flows::ModelFlow& model, const PipelineConfig& cfg) {
    PipelineResult out;
    out.reduced_z0 = cfg.reduced_z0.empty() ? model.default_reduced_z0 : cfg.reduced_z0;
    const double span = cfg.span > 0.0 ? cfg.span : default_span(model, out.reduced_z0, cfg.t0);
    const dynsys::Trajectory reduced_traj =
        dynsys::integrate(model.reduced, out.reduced_z0, cfg.t0, cfg.t0 + span, cfg.ode_tol);
    out.span_used = reduced_traj.t_end() - cfg.t0;

    SeriesGrid grid{cfg.t0, reduced_traj.t_end(), cfg.grid_points};

    switch (cfg.kind.type) {
        case BalanceKind::Type::instant_eig: {
            dynsys::MatrixFamily fam;
            fam.dim = model.flow.dim;
            fam.at = [&model, &reduced_traj](double t) {
                return model.linearization(reduced_traj.at(t), t);
            };
            out.series = series_instant_eig(fam, cfg.kind.index, grid);
            break;
        }
        case BalanceKind::Type::fast_slow: {
            if (model.id != "solid-body")
                throw InvalidInput("run_balance: no fast-slow form registered for flow '" +
                                   model.id + "'");
            flows::SolidBodyParams p;
            p.alpha = model.flow.param("alpha");
            p.beta = model.flow.param("beta");
            const flows::FastSlowSystem fs = flows::solid_body_fastslow_split(p);
            out.series = series_fastslow(fs, reduced_traj, cfg.kind.index, grid);
            break;
        }
        case BalanceKind::Type::ftle: {
            dynsys::MatrixFamily fam;
            fam.dim = model.flow.dim;
            fam.at = [&model, &reduced_traj](double t) {
                return model.linearization(reduced_traj.at(t), t);
            };
            out.series = series_ftle(fam, cfg.kind.index, cfg.kind.mode, grid, cfg.ode_tol);
            break;
        }
        case BalanceKind::Type::nile: {
            std::vector<double> ts = grid.times();
            auto integrand = nile_integrand_along(model, reduced_traj);
            std::vector<double> g(ts.size());
            for (size_t k = 0; k < ts.size(); ++k) g[k] = integrand(ts[k]);
            BalanceKind kind;
            kind.type = BalanceKind::Type::nile;
            out.series = make_integral_series(std::move(ts), std::move(g), kind);
            break;
        }
        case BalanceKind::Type::measured_velocity:
            throw InvalidInput("run_balance: the velocity kind requires sampled data (see ingest)");
    }
    out.series.z0 = out.reduced_z0;
    out.series.t0 = cfg.t0;

    ExitSearchOptions opt;
    opt.zero_tol = cfg.zero_tol;
    opt.deriv_tol = cfg.deriv_tol;
    out.exit = find_exit(out.series, opt);
    if (out.exit) {
        const Vec red = exit_point(model.reduced, out.reduced_z0, cfg.t0, out.exit->T, cfg.ode_tol);
        out.exit->exit_state = model.embed(red);
    }
    return out;
}

SweepResult sweep(const std::string& flow_id, const std::string& param_name,
                  const std::vector<double>& values,
                  const std::map<std::string, double>& fixed_params, const PipelineConfig& cfg) {
    if (values.empty()) throw InvalidInput("sweep: empty parameter range");
    SweepResult result;
    result.flow_id = flow_id;
    result.param_name = param_name;

    for (double v : values) {
        SweepRow row;
        row.param = v;
        try {
            std::map<std::string, double> params = fixed_params;
            PipelineConfig row_cfg = cfg;
            if (flow_id == "solid-body" && param_name == "b") {
                row_cfg.reduced_z0 = Vec{-v};  // entry-offset pseudo-parameter
            } else {
                params[param_name] = v;
            }
            const flows::ModelFlow model = flows::make_flow(flow_id, params);
            result.dim = model.flow.dim;
            const PipelineResult r = run_balance(model, row_cfg);
            if (r.exit) {
                row.ok = true;
                row.exit = r.exit;
            } else {
                row.error = "no nontrivial zero in span";
            }
        } catch (const std::exception& e) {
            row.error = e.what();
        }
        result.rows.push_back(std::move(row));
    }

    // Ordinary least squares of T against the parameter over usable rows.
    std::vector<double> xs, ys;
    for (const auto& row : result.rows)
        if (row.ok) {
            xs.push_back(row.param);
            ys.push_back(row.exit->T);
        }
    if (xs.size() >= 2) {
        const double n = static_cast<double>(xs.size());
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        for (size_t i = 0; i < xs.size(); ++i) {
            sx += xs[i];
            sy += ys[i];
            sxx += xs[i] * xs[i];
            sxy += xs[i] * ys[i];
        }
        const double denom = n * sxx - sx * sx;
        if (std::abs(denom) > 1e-300) {
            LinearFit fit;
            fit.slope = (n * sxy - sx * sy) / denom;
            fit.intercept = (sy - fit.slope * sx) / n;
            double ss_res = 0, ss_tot = 0;
            const double mean = sy / n;
            for (size_t i = 0; i < xs.size(); ++i) {
                const double pred = fit.intercept + fit.slope * xs[i];
                ss_res += (ys[i] - pred) * (ys[i] - pred);
                ss_tot += (ys[i] - mean) * (ys[i] - mean);
            }
            fit.r2 = ss_tot > 1e-300 ? 1.0 - ss_res / ss_tot : (ss_res < 1e-300 ? 1.0 : 0.0);
            result.fit = fit;
        }
    }
    return result;
}

void write_sweep_csv(const SweepResult& result, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("write_sweep_csv: cannot open '" + path + "'");
    out << "param,T";
    for (int i = 1; i <= result.dim; ++i) out << ",exit_" << i;
    out << ",dF_dt,degenerate\n";
    const double nan = std::numeric_limits<double>::quiet_NaN();
    for (const auto& row : result.rows) {
        out << fmt_double(row.param);
        if (row.ok) {
            out << ',' << fmt_double(row.exit->T);
            for (int i = 0; i < result.dim; ++i) out << ',' << fmt_double(row.exit->exit_state[i]);
            out << ',' << fmt_double(row.exit->dF_dt_at_T) << ',' << (row.exit->degenerate ? 1 : 0);
        } else {
            for (int i = 0; i < result.dim + 2; ++i) out << ',' << fmt_double(nan);
            out << ",0";
        }
        out << '\n';
    }
}

void write_sweep_json(const SweepResult& result, const std::string& config_json,
                      const std::string& path) {
    nlohmann::json j;
    j["flow"] = result.flow_id;
    j["param"] = result.param_name;
    if (result.fit) {
        j["fit"] = {{"slope", result.fit->slope},
                    {"intercept", result.fit->intercept},
                    {"r2", result.fit->r2}};
    } else {
        j["fit"] = nullptr;
    }
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& row : result.rows) {
        nlohmann::json r;
        r["param"] = row.param;
        r["ok"] = row.ok;
        if (row.ok)
            r["T"] = row.exit->T;
        else
            r["error"] = row.error;
        rows.push_back(std::move(r));
    }
    j["rows"] = std::move(rows);
    j["config"] = config_json.empty() ? nlohmann::json(nullptr) : nlohmann::json::parse(config_json);
    std::ofstream out(path);
    if (!out) throw std::runtime_error("write_sweep_json: cannot open '" + path + "'");
    out << j.dump(2) << '\n';
}

PerturbResult perturb_first_order(const std::function<double(double, double)>& f, double t0_root,
                                  double zero_tol, double deriv_tol) {
    const double f00 = f(t0_root, 0.0);
    if (std::abs(f00) > zero_tol)
        throw InvalidInput("perturb_first_order: F(T0, 0) is not a root within zero_tol");
    const double ht = 1e-5, hd = 1e-5;
    const double df_dt = (f(t0_root + ht, 0.0) - f(t0_root - ht, 0.0)) / (2.0 * ht);
    if (std::abs(df_dt) < deriv_tol)
        throw InvalidInput("perturb_first_order: degenerate root, |dF/dt| below deriv_tol");
    const double df_dd = (f(t0_root, hd) - f(t0_root, -hd)) / (2.0 * hd);
    return PerturbResult{t0_root, -df_dd / df_dt};
}

}  // namespace entrex::balance
