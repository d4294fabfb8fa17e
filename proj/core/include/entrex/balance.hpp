#pragma once

// Balance functions along on-manifold reference trajectories: cumulative
// integrals (or finite-time rates) of growth/decay measures whose first
// nontrivial zero predicts when a nearby particle exits a neighbourhood of
// the manifold. Five kinds: instantaneous eigenvalues, fast-subsystem
// eigenvalues, finite-time Lyapunov exponents, normal infinitesimal Lyapunov
// exponents, and measured normal velocity.

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "entrex/dynsys.hpp"
#include "entrex/flows.hpp"

namespace entrex::balance {

using dynsys::Vec;

enum class FtleMode { exact, commuting };

struct BalanceKind {
    enum class Type { instant_eig, fast_slow, ftle, nile, measured_velocity };
    Type type = Type::nile;
    int index = 0;                     // spectral branch j
    FtleMode mode = FtleMode::exact;   // ftle only

    std::string label() const;
    /// Parse a CLI method name: eig | fastslow | ftle | nile | velocity.
    static BalanceKind parse(const std::string& method, int index = 0,
                             const std::string& mode = "exact");
};

struct BalanceSeries {
    std::vector<double> times;
    std::vector<double> values;
    std::vector<double> slopes;  // integrand samples when known, else empty
    BalanceKind kind;
    double t0 = 0.0;
    Vec z0;                      // reduced starting point of the reference trajectory
    int ambiguous_crossings = 0; // exact eigenvalue-branch assignment ties

    double value_at(double t) const;  // cubic Hermite when slopes exist, else linear
    double max_abs() const;
};

/// Uniform sample grid over [t0, t0 + span].
struct SeriesGrid {
    double t0 = 0.0;
    double t_end = 1.0;
    int n = 2001;
    std::vector<double> times(bool exclude_t0 = false) const;
};

/// Cumulative integral of Re(lambda_j(t)) of a matrix family, branch j tracked
/// by nearest-value matching between consecutive samples; exact assignment
/// ties (branch merges/splits) keep the sorted order and are counted.
BalanceSeries series_instant_eig(const dynsys::MatrixFamily& a, int j, const SeriesGrid& grid);

/// Cumulative integral of Re(rho_j(t)), the fast-subsystem eigenvalues along a
/// slow trajectory on the critical manifold.
BalanceSeries series_fastslow(const flows::FastSlowSystem& fs, const dynsys::Trajectory& slow,
                              int j, const SeriesGrid& grid);

/// Finite-time Lyapunov exponent l_j(t) = ln(delta_j(t)) / (t - t0). The grid
/// excludes t0. Exact mode integrates the variational equation; commuting mode
/// uses Phi = expm of the cumulative integral of A, which is exact only for
/// commuting families. Singular-value underflow yields -inf sentinels that
/// root finding skips.
BalanceSeries series_ftle(const dynsys::MatrixFamily& a, int j, FtleMode mode,
                          const SeriesGrid& grid, double ode_tol = 1e-10);

/// Instantaneous maximal growth rate normal to the manifold at p: n^T A n for
/// flat codimension-one manifolds, the largest eigenvalue of the symmetrized
/// reduced matrix for graph manifolds, and the restricted symmetric
/// eigenproblem over the normal space for higher codimension.
double nile_point(const dynsys::FlowSystem& flow, const dynsys::ManifoldSpec& manifold,
                  const Vec& p, double t);

/// Cumulative integral of nile_point along an on-manifold trajectory.
BalanceSeries series_nile(const dynsys::FlowSystem& flow, const dynsys::ManifoldSpec& manifold,
                          const dynsys::Trajectory& gamma, const SeriesGrid& grid);

/// Cumulative integral of measured normal velocity with integrand zeroed
/// outside the region gate (mask per sample). Throws NoSignalError when no
/// sample is in-gate.
BalanceSeries series_velocity(const std::vector<double>& times, const std::vector<double>& vn,
                              const std::vector<bool>& in_gate);

struct ExitPrediction {
    double T = 0.0;
    Vec exit_state;       // ambient exit point; filled by the pipeline
    double dF_dt_at_T = 0.0;
    bool degenerate = false;
    std::pair<double, double> bracket{0.0, 0.0};
};

struct ExitSearchOptions {
    double zero_tol = -1.0;   // < 0: auto, 1e-9 * (1 + max|F|)
    double deriv_tol = 1e-6;
    bool force_trivial = false;  // report T = t0 when no nontrivial zero exists
};

/// First nontrivial zero after the leading plateau, Brent-refined on the
/// interpolated series; nullopt when the series never changes sign.
std::optional<ExitPrediction> find_exit(const BalanceSeries& series,
                                        const ExitSearchOptions& opt = {});

/// Integrate the on-manifold dynamics from z0 to T and return the state.
Vec exit_point(const dynsys::FlowSystem& reduced_flow, const Vec& z0_on_m, double t0, double T,
               double tol = 1e-12);

/// Crude a-priori search span: four times the doubled first sign change of the
/// normal-rate integrand along the reduced trajectory.
double default_span(const flows::ModelFlow& model, const Vec& reduced_z0, double t0);

struct PipelineConfig {
    BalanceKind kind;
    double t0 = 0.0;
    Vec reduced_z0;          // empty: model default
    double span = -1.0;      // <= 0: auto
    int grid_points = 2001;
    double ode_tol = 1e-10;
    double zero_tol = -1.0;  // < 0: auto
    double deriv_tol = 1e-6;
};

struct PipelineResult {
    BalanceSeries series;
    std::optional<ExitPrediction> exit;
    double span_used = 0.0;
    Vec reduced_z0;
};

/// Build the reduced trajectory, the selected series, locate the exit and map
/// it to the ambient exit point.
PipelineResult run_balance(const flows::ModelFlow& model, const PipelineConfig& cfg);

struct SweepRow {
    double param = 0.0;
    bool ok = false;
    std::string error;  // per-row failure, sweep continues
    std::optional<ExitPrediction> exit;
};

struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
};

struct SweepResult {
    std::string flow_id;
    std::string param_name;
    int dim = 0;  // ambient dimension, fixes the CSV exit columns
    std::vector<SweepRow> rows;
    std::optional<LinearFit> fit;  // absent for fewer than two usable rows
};

/// One balance pipeline per parameter value. For the solid-body flow the
/// pseudo-parameter "b" varies the entry point z0 = (-b, 0) instead of a
/// field parameter.
SweepResult sweep(const std::string& flow_id, const std::string& param_name,
                  const std::vector<double>& values,
                  const std::map<std::string, double>& fixed_params, const PipelineConfig& cfg);

/// CSV: header `param,T,exit_1,...,exit_d,dF_dt,degenerate`; shortest
/// round-trip float formatting; byte-identical for identical inputs.
void write_sweep_csv(const SweepResult& result, const std::string& path);

/// JSON sidecar: fit (or null) plus the caller's fully resolved config echo.
void write_sweep_json(const SweepResult& result, const std::string& config_json,
                      const std::string& path);

struct PerturbResult {
    double T0 = 0.0;
    double T1 = 0.0;
};

/// First-order coefficient of the perturbed root T(delta) = T0 + delta*T1 + ...
/// of F(t; delta) = 0, via centered differences of the two partials at
/// (T0, 0). Requires |F(T0,0)| <= zero_tol and |dF/dt| >= deriv_tol.
PerturbResult perturb_first_order(const std::function<double(double, double)>& f, double t0_root,
                                  double zero_tol = 1e-6, double deriv_tol = 1e-6);

}  // namespace entrex::balance
