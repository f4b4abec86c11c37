#pragma once

#include "capacity.hpp"
#include "engine.hpp"
#include "scanning.hpp"
#include "scenario.hpp"

#include <algorithm>
#include <limits>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace robustwork {

struct StrategyAnalysis {
    std::string name;
    ScanVector alpha;
    AVector a; ///< system-wide
    RegionVerdict verdict;
};

struct AnalysisReport {
    FeasibleSet fs;
    std::vector<StrategyAnalysis> strategies;
    /// Largest unscanned length per type under the optimal vector.
    std::vector<std::optional<Integer>> thresholds;
    bool no_malicious = false;
};

/// Capacity-region analysis without simulation: maximal configurations,
/// a-vectors and verdicts for scan-none / scan-all / optimal scanning.
inline AnalysisReport analyze(const Scenario& sc) {
    AnalysisReport report;
    report.fs = enumerate_maximal_configs(sc.capacity, sc.vm_types);
    report.no_malicious = true;
    for (std::size_t j = 0; j < sc.type_count(); ++j) {
        report.thresholds.push_back(scan_threshold(sc.arrivals, j));
        if (sc.arrivals.types[j].malicious_rate > 0)
            report.no_malicious = false;
    }
    auto add = [&](std::string name, ScanVector alpha) {
        StrategyAnalysis s;
        s.name = std::move(name);
        s.a = a_vector(alpha, sc.arrivals);
        s.verdict = classify(sc.arrivals, alpha, report.fs);
        s.alpha = std::move(alpha);
        report.strategies.push_back(std::move(s));
    };
    if (report.no_malicious) {
        add("none", scan_none(sc.arrivals));
    } else {
        add("none", scan_none(sc.arrivals));
        add("all", scan_all(sc.arrivals));
        add("opt", optimal_alpha(sc.arrivals));
    }
    if (sc.strategy == ScanStrategy::Custom)
        add("custom", sc.custom_alpha);
    return report;
}

inline std::string describe_margin(const RegionVerdict& v) {
    if (v.unbounded())
        return "inf";
    return to_string(*v.margin) + " (" + format_double(to_double(*v.margin)) + ")";
}

inline std::string verdict_label(const RegionVerdict& v) {
    if (v.strictly_inside())
        return "inside";
    if (v.inside)
        return "boundary (not guaranteed stable)";
    return "outside";
}

inline void print_analysis(std::ostream& out, const Scenario& sc, const AnalysisReport& r) {
    out << "scenario: " << sc.name << "\n";
    out << "servers: " << sc.arrivals.n_servers << "\n";
    out << "maximal configurations per server:";
    for (const auto& c : r.fs.maximal_configs) {
        out << " (";
        for (std::size_t j = 0; j < c.size(); ++j)
            out << (j ? "," : "") << c[j];
        out << ")";
    }
    out << "\n";
    out << "optimal scan thresholds (largest unscanned length):";
    for (std::size_t j = 0; j < r.thresholds.size(); ++j)
        out << " " << sc.vm_types[j].name << "=" << (r.thresholds[j] ? r.thresholds[j]->str() : std::string("never-scan"));
    out << "\n";
    if (r.no_malicious)
        out << "no malicious traffic: optimal scanning equals scan-none\n";
    for (const auto& s : r.strategies) {
        out << "strategy " << s.name << ": a/server =";
        for (const auto& aj : s.a)
            out << " " << format_double(to_double(aj / Rational(sc.arrivals.n_servers)));
        out << "; verdict " << verdict_label(s.verdict) << "; margin " << describe_margin(s.verdict) << "\n";
    }
}

/// Pointwise ratio and difference of two metric series (a over b).
struct ComparisonRow {
    std::int64_t slot = 0;
    std::optional<double> ratio_avg_latency, diff_avg_latency;
    std::optional<double> ratio_max_latency, diff_max_latency;
    double ratio_avg_queue_work = 0, diff_avg_queue_work = 0;
    double ratio_max_queue_work = 0, diff_max_queue_work = 0;
};

inline std::vector<ComparisonRow> compare_series(const std::vector<MetricsSample>& a, const std::vector<MetricsSample>& b) {
    auto ratio = [](double x, double y) { return y != 0 ? x / y : std::numeric_limits<double>::infinity(); };
    std::vector<ComparisonRow> rows;
    const std::size_t n = std::min(a.size(), b.size());
    for (std::size_t i = 0; i < n; ++i) {
        if (a[i].slot != b[i].slot)
            throw ConfigError("compared runs sample at different slots");
        ComparisonRow row;
        row.slot = a[i].slot;
        if (a[i].avg_latency && b[i].avg_latency) {
            row.ratio_avg_latency = ratio(*a[i].avg_latency, *b[i].avg_latency);
            row.diff_avg_latency = *a[i].avg_latency - *b[i].avg_latency;
        }
        if (a[i].max_latency && b[i].max_latency) {
            row.ratio_max_latency = ratio(static_cast<double>(*a[i].max_latency), static_cast<double>(*b[i].max_latency));
            row.diff_max_latency = static_cast<double>(*a[i].max_latency - *b[i].max_latency);
        }
        row.ratio_avg_queue_work = ratio(a[i].avg_queue_work, b[i].avg_queue_work);
        row.diff_avg_queue_work = a[i].avg_queue_work - b[i].avg_queue_work;
        row.ratio_max_queue_work = ratio(static_cast<double>(a[i].max_queue_work), static_cast<double>(b[i].max_queue_work));
        row.diff_max_queue_work = static_cast<double>(a[i].max_queue_work - b[i].max_queue_work);
        rows.push_back(row);
    }
    return rows;
}

inline void write_comparison_csv(std::ostream& out, const std::vector<ComparisonRow>& rows) {
    auto opt = [](const std::optional<double>& v) { return v ? format_double(*v) : std::string(); };
    out << "slot,ratio_avg_latency,diff_avg_latency,ratio_max_latency,diff_max_latency,"
           "ratio_avg_queue_work,diff_avg_queue_work,ratio_max_queue_work,diff_max_queue_work\n";
    for (const auto& r : rows)
        out << r.slot << ',' << opt(r.ratio_avg_latency) << ',' << opt(r.diff_avg_latency) << ',' << opt(r.ratio_max_latency) << ','
            << opt(r.diff_max_latency) << ',' << format_double(r.ratio_avg_queue_work) << ',' << format_double(r.diff_avg_queue_work)
            << ',' << format_double(r.ratio_max_queue_work) << ',' << format_double(r.diff_max_queue_work) << '\n';
}

/// One malicious-rate scaling of a stability sweep.
struct SweepRow {
    Rational kappa_scale;
    RegionVerdict none, all, opt;
    /// Filled when the sweep also simulates the scenario's own strategy.
    std::optional<std::int64_t> end_queue_work;
    std::optional<std::int64_t> mid_queue_work;
};

inline Scenario with_kappa_scale(Scenario sc, const Rational& scale) {
    for (auto& t : sc.arrivals.types)
        t.malicious_rate *= scale;
    return sc;
}

inline std::vector<SweepRow> sweep(const Scenario& sc, const std::vector<Rational>& scales, bool simulate) {
    const auto fs = enumerate_maximal_configs(sc.capacity, sc.vm_types);
    std::vector<SweepRow> rows;
    for (const auto& scale : scales) {
        if (scale < 0)
            throw ConfigError("kappa scale must be non-negative");
        const Scenario scaled = with_kappa_scale(sc, scale);
        SweepRow row;
        row.kappa_scale = scale;
        row.none = classify(scaled.arrivals, scan_none(scaled.arrivals), fs);
        row.all = classify(scaled.arrivals, scan_all(scaled.arrivals), fs);
        row.opt = classify(scaled.arrivals, optimal_alpha(scaled.arrivals), fs);
        if (simulate) {
            auto result = run(scaled);
            if (!result.samples.empty()) {
                row.end_queue_work = result.samples.back().total_queue_work();
                row.mid_queue_work = result.samples[(result.samples.size() - 1) / 2].total_queue_work();
            }
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

inline void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows) {
    auto margin = [](const RegionVerdict& v) { return v.unbounded() ? std::string("inf") : format_double(to_double(*v.margin)); };
    out << "kappa_scale,margin_none,margin_all,margin_opt,stable_none,stable_all,stable_opt,mid_queue_work,end_queue_work\n";
    for (const auto& r : rows) {
        out << to_string(r.kappa_scale) << ',' << margin(r.none) << ',' << margin(r.all) << ',' << margin(r.opt) << ','
            << r.none.strictly_inside() << ',' << r.all.strictly_inside() << ',' << r.opt.strictly_inside() << ',';
        if (r.mid_queue_work)
            out << *r.mid_queue_work;
        out << ',';
        if (r.end_queue_work)
            out << *r.end_queue_work;
        out << '\n';
    }
}

} // namespace robustwork
