#include "entrex/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "entrex/errors.hpp"
#include "entrex/textio.hpp"

namespace entrex::ingest {

namespace {

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur += c;
        }
    }
    out.push_back(cur);
    for (auto& s : out) {
        while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.erase(s.begin());
        while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.pop_back();
    }
    return out;
}

double parse_double(const std::string& tok, long line_no) {
    double v;
    const char* first = tok.data();
    const char* last = tok.data() + tok.size();
    auto res = std::from_chars(first, last, v);
    if (res.ec != std::errc{} || res.ptr != last)
        throw ParseError("malformed numeric field '" + tok + "'", line_no);
    return v;
}

}  // namespace

LoadResult load_samples(const std::string& path, const std::string& format) {
    if (format != "csv") throw InvalidInput("load_samples: unknown format '" + format + "'");
    std::ifstream in(path);
    if (!in) throw std::runtime_error("load_samples: cannot open '" + path + "'");

    LoadResult out;
    std::string line;
    long line_no = 0;
    bool have_header = false;
    size_t ncols = 0;

    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#') continue;
        const std::vector<std::string> tok = split_csv(line);
        if (!have_header) {
            if (tok.size() < 3 || tok.front() != "t")
                throw ParseError("header must be t,z1,...,zd,vn[,ann]", line_no);
            out.has_normal_rate = (tok.back() == "ann");
            ncols = tok.size();
            out.dim = static_cast<int>(ncols) - 2 - (out.has_normal_rate ? 1 : 0);
            if (out.dim < 1) throw ParseError("header must carry at least one state column", line_no);
            have_header = true;
            continue;
        }
        if (tok.size() != ncols)
            throw ParseError("expected " + std::to_string(ncols) + " fields, got " +
                                 std::to_string(tok.size()),
                             line_no);
        TrajectorySample s;
        s.t = parse_double(tok[0], line_no);
        if (!std::isfinite(s.t)) throw ParseError("non-finite time", line_no);
        s.position.resize(out.dim);
        for (int i = 0; i < out.dim; ++i) s.position[i] = parse_double(tok[1 + i], line_no);
        s.normal_velocity = parse_double(tok[1 + out.dim], line_no);
        if (out.has_normal_rate) s.normal_rate = parse_double(tok[2 + out.dim], line_no);
        out.samples.push_back(std::move(s));
    }
    if (!have_header || out.samples.empty()) throw ParseError("no data rows in '" + path + "'");

    std::stable_sort(out.samples.begin(), out.samples.end(),
                     [](const TrajectorySample& a, const TrajectorySample& b) { return a.t < b.t; });
    std::vector<TrajectorySample> dedup;
    dedup.reserve(out.samples.size());
    for (auto& s : out.samples) {
        if (!dedup.empty() && dedup.back().t == s.t) {
            dedup.back() = std::move(s);  // last occurrence wins
            ++out.duplicates_collapsed;
        } else {
            dedup.push_back(std::move(s));
        }
    }
    out.samples = std::move(dedup);
    return out;
}

IngestResult ingest_balance(const std::vector<TrajectorySample>& samples,
                            const IngestConfig& config, const dynsys::FlowSystem* flow) {
    if (!(config.gate.lower < config.gate.upper))
        throw InvalidInput("ingest_balance: gate bounds must be ordered");

    std::vector<double> ts;
    std::vector<double> sigma_integrand;
    std::vector<double> vn;
    std::vector<bool> in_gate;
    size_t inside = 0;

    for (const auto& s : samples) {
        if (s.t < config.t0) continue;
        const double coord = s.position[static_cast<size_t>(config.gate.coordinate_index)];
        const bool gated = coord >= config.gate.lower && coord <= config.gate.upper;
        inside += gated ? 1 : 0;
        double rate = 0.0;
        if (gated) {
            if (s.normal_rate) {
                rate = *s.normal_rate;  // measured column wins
            } else {
                if (flow == nullptr)
                    throw InvalidInput(
                        "ingest_balance: samples carry no normal-rate column and no flow was given");
                const dynsys::Vec proj = dynsys::project_to_manifold(config.manifold, s.position);
                rate = balance::nile_point(*flow, config.manifold, proj, s.t);
            }
        }
        ts.push_back(s.t);
        sigma_integrand.push_back(gated ? rate : 0.0);
        vn.push_back(s.normal_velocity);
        in_gate.push_back(gated);
    }
    if (inside < 3) throw NoSignalError("ingest_balance: fewer than 3 in-gate samples");

    IngestResult out;
    out.velocity = balance::series_velocity(ts, vn, in_gate);
    out.velocity.t0 = config.t0;

    out.sigma.values = dynsys::cumulative_trapezoid(ts, sigma_integrand);
    out.sigma.times = std::move(ts);
    out.sigma.slopes = std::move(sigma_integrand);
    out.sigma.kind.type = balance::BalanceKind::Type::nile;
    out.sigma.t0 = config.t0;

    out.in_gate = std::move(in_gate);
    return out;
}

std::optional<double> predict_next_zero(const balance::BalanceSeries& series,
                                        const IngestConfig& config) {
    if (config.extrapolation == Extrapolation::none) return std::nullopt;
    const int w = config.extrapolation_window;
    if (w < 3) throw InvalidInput("predict_next_zero: window must be >= 3");
    const int n = static_cast<int>(series.times.size());
    if (n < w) throw InvalidInput("predict_next_zero: series shorter than the window");

    const int degree = config.extrapolation == Extrapolation::linear ? 1 : 2;
    const double t_last = series.times.back();

    // Least squares in shifted time x = t - t_last over the trailing window.
    const int m = degree + 1;
    smallalg::Mat ata(m);
    std::vector<double> atb(m, 0.0);
    for (int i = n - w; i < n; ++i) {
        const double x = series.times[i] - t_last;
        double pow_cache[5] = {1.0, x, x * x, x * x * x, x * x * x * x};
        for (int r = 0; r < m; ++r) {
            atb[r] += pow_cache[r] * series.values[i];
            for (int c = 0; c < m; ++c) ata(r, c) += pow_cache[r + c];
        }
    }
    std::vector<double> coef;
    try {
        coef = smallalg::lu_solve(ata, atb);
    } catch (const InvalidInput&) {
        return std::nullopt;  // rank-deficient fit
    }
    double scale = 0.0;
    for (double c : coef) scale = std::max(scale, std::abs(c));
    if (!(scale > 0.0)) return std::nullopt;

    std::vector<double> roots;
    if (degree == 2 && std::abs(coef[2]) > 1e-12 * scale) {
        const double disc = coef[1] * coef[1] - 4.0 * coef[2] * coef[0];
        if (disc < 0.0) return std::nullopt;
        const double sq = std::sqrt(disc);
        roots.push_back((-coef[1] + sq) / (2.0 * coef[2]));
        roots.push_back((-coef[1] - sq) / (2.0 * coef[2]));
    } else if (std::abs(coef[1]) > 1e-14 * scale) {
        roots.push_back(-coef[0] / coef[1]);
    } else {
        return std::nullopt;
    }
    std::optional<double> best_x;
    for (double x : roots)
        if (x > 0.0 && (!best_x || x < *best_x)) best_x = x;
    if (!best_x) return std::nullopt;
    return t_last + *best_x;
}

namespace {

nlohmann::json manifold_json(const dynsys::ManifoldSpec& m) {
    if (std::holds_alternative<dynsys::FlatManifold>(m)) {
        const auto& flat = std::get<dynsys::FlatManifold>(m);
        return {{"kind", "flat"}, {"base_point", flat.base_point}, {"normals", flat.normals}};
    }
    return {{"kind", "graph"}};
}

const char* extrapolation_name(Extrapolation e) {
    switch (e) {
        case Extrapolation::none: return "none";
        case Extrapolation::linear: return "linear";
        case Extrapolation::quadratic: return "quadratic";
    }
    return "?";
}

}  // namespace

void write_report(const IngestResult& result, const ReportSummary& summary,
                  const IngestConfig& config, const ReportPaths& paths) {
    if (result.sigma.times.empty()) throw InvalidInput("write_report: empty series");

    {
        std::ofstream out(paths.csv);
        if (!out) throw std::runtime_error("write_report: cannot open '" + paths.csv + "'");
        out << "t,F_sigma,F_v,in_gate\n";
        for (size_t i = 0; i < result.sigma.times.size(); ++i) {
            out << fmt_double(result.sigma.times[i]) << ',' << fmt_double(result.sigma.values[i])
                << ',' << fmt_double(result.velocity.values[i]) << ','
                << (result.in_gate[i] ? 1 : 0) << '\n';
        }
    }
    {
        nlohmann::json j;
        auto opt_json = [](const std::optional<double>& v) {
            return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
        };
        j["first_zero_sigma"] = opt_json(summary.first_zero_sigma);
        j["first_zero_v"] = opt_json(summary.first_zero_v);
        j["predicted_zero"] = opt_json(summary.predicted_zero);
        j["gate"] = {{"coordinate_index", config.gate.coordinate_index},
                     {"lower", config.gate.lower},
                     {"upper", config.gate.upper}};
        j["config"] = {{"t0", config.t0},
                       {"extrapolation", extrapolation_name(config.extrapolation)},
                       {"extrapolation_window", config.extrapolation_window},
                       {"manifold", manifold_json(config.manifold)}};
        std::ofstream out(paths.json);
        if (!out) throw std::runtime_error("write_report: cannot open '" + paths.json + "'");
        out << j.dump(2) << '\n';
    }
    {
        std::ofstream out(paths.plot);
        if (!out) throw std::runtime_error("write_report: cannot open '" + paths.plot + "'");
        std::string csv_name = paths.csv;
        if (const auto pos = csv_name.find_last_of('/'); pos != std::string::npos)
            csv_name = csv_name.substr(pos + 1);
        out << "# balance series with zero line; run with: gnuplot -persist " << paths.plot << "\n"
            << "set datafile separator ','\n"
            << "set xlabel 't'\n"
            << "set ylabel 'balance'\n"
            << "set grid\n"
            << "plot '" << csv_name << "' using 1:2 with lines title 'F_sigma', \\\n"
            << "     '' using 1:3 with lines title 'F_v', \\\n"
            << "     0 with lines dashtype 2 title ''\n";
    }
}

}  // namespace entrex::ingest
