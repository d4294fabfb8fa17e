#pragma once

// Ingestion of externally produced particle-trajectory samples: computes the
// normal-rate and measured-velocity balance series with region gating,
// detects zero crossings, and extrapolates the series to predict upcoming
// exits.

#include <optional>
#include <string>
#include <vector>

#include "entrex/balance.hpp"
#include "entrex/dynsys.hpp"
#include "entrex/flows.hpp"

namespace entrex::ingest {

struct TrajectorySample {
    double t = 0.0;
    dynsys::Vec position;
    double normal_velocity = 0.0;
    std::optional<double> normal_rate;  // locally sampled n^T A n, when measured
};

enum class Extrapolation { none, linear, quadratic };

struct IngestConfig {
    dynsys::ManifoldSpec manifold;
    flows::NeighbourhoodSpec gate;
    double t0 = 0.0;
    Extrapolation extrapolation = Extrapolation::quadratic;
    int extrapolation_window = 25;
};

struct LoadResult {
    std::vector<TrajectorySample> samples;  // sorted by time, duplicates collapsed
    int dim = 0;
    bool has_normal_rate = false;
    int duplicates_collapsed = 0;
};

/// Load `t,z1,...,zd,vn[,ann]` CSV (comma separated, '.' decimal, '#'
/// comments, header required). Samples are sorted by time; duplicate
/// timestamps collapse to the last occurrence.
LoadResult load_samples(const std::string& path, const std::string& format = "csv");

struct IngestResult {
    balance::BalanceSeries sigma;     // cumulative normal-rate balance
    balance::BalanceSeries velocity;  // cumulative measured normal velocity
    std::vector<bool> in_gate;
};

/// Project positions onto the manifold, take the normal-rate integrand from
/// the measured column (or evaluate it from `flow` at the projected point),
/// zero both integrands outside the gate, and accumulate by trapezoid.
IngestResult ingest_balance(const std::vector<TrajectorySample>& samples,
                            const IngestConfig& config,
                            const dynsys::FlowSystem* flow = nullptr);

/// Least-squares polynomial over the trailing window; smallest real root
/// beyond the last sample time, absent when no such root exists.
std::optional<double> predict_next_zero(const balance::BalanceSeries& series,
                                        const IngestConfig& config);

struct ReportSummary {
    std::optional<double> first_zero_sigma;
    std::optional<double> first_zero_v;
    std::optional<double> predicted_zero;
};

struct ReportPaths {
    std::string csv;
    std::string json;
    std::string plot;
};

/// Write the `t,F_sigma,F_v,in_gate` CSV, the JSON summary, and a gnuplot
/// script rendering both series against the zero line.
void write_report(const IngestResult& result, const ReportSummary& summary,
                  const IngestConfig& config, const ReportPaths& paths);

}  // namespace entrex::ingest
