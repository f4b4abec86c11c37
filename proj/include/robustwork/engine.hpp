#pragma once

#include "capacity.hpp"
#include "metrics.hpp"
#include "scanning.hpp"
#include "scenario.hpp"
#include "sched_core.hpp"
#include "sched_dist.hpp"
#include "workload.hpp"

#include <functional>
#include <optional>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

namespace robustwork {

/// Scan vector a scenario starts with (adaptive runs start with scan-all).
inline ScanVector initial_scan_vector(const Scenario& sc) {
    switch (sc.strategy) {
    case ScanStrategy::None: return scan_none(sc.arrivals);
    case ScanStrategy::All: return scan_all(sc.arrivals);
    case ScanStrategy::Opt: return optimal_alpha(sc.arrivals);
    case ScanStrategy::Custom: return sc.custom_alpha;
    case ScanStrategy::Adaptive: return scan_all(sc.arrivals);
    }
    return scan_none(sc.arrivals);
}

/// Workload generator, scheduler and metrics of one run.
class Simulation {
public:
    explicit Simulation(const Scenario& sc)
        : scenario_(sc), fs_(enumerate_maximal_configs(sc.capacity, sc.vm_types)), alpha_(initial_scan_vector(sc)),
          generator_(sc.arrivals, sc.seed), metrics_(sc.type_count()) {
        sc.validate();
        if (sc.mode == SchedulerMode::Centralized)
            scheduler_.emplace<CentralScheduler>(sc.arrivals, alpha_, fs_, sc.seed, sc.z_weight);
        else
            scheduler_.emplace<DistScheduler>(sc.arrivals, alpha_, fs_, sc.seed, sc.routing, sc.workload_metric, sc.z_weight, sc.refresh);
        if (sc.strategy == ScanStrategy::Adaptive) {
            // Rates are unknown during warmup: treat pending work as genuine.
            std::vector<WeightParams> params(sc.type_count());
            for (std::size_t j = 0; j < sc.type_count(); ++j)
                params[j].mean_reciprocal = to_double(sc.arrivals.types[j].lengths.mean_reciprocal_length());
            model().set_params(std::move(params));
        }
    }

    /// Advances one slot; fills the arrival buffer, steps, observes.
    const SlotReport& step() {
        arrivals_.clear();
        generator_.slot_arrivals(slot_, arrivals_);
        if (arrival_hook_)
            arrival_hook_(arrivals_);
        const SlotReport& report = std::visit(
            [&](auto& s) -> const SlotReport& {
                if constexpr (std::is_same_v<std::decay_t<decltype(s)>, std::monostate>)
                    throw ContractViolation("simulation has no scheduler");
                else
                    return s.step(arrivals_);
            },
            scheduler_);
        metrics_.observe(report);
        ++slot_;
        return report;
    }

    SchedulingModel& model() {
        if (auto* c = std::get_if<CentralScheduler>(&scheduler_))
            return c->model();
        return std::get<DistScheduler>(scheduler_).model();
    }

    void set_scan_vector(ScanVector alpha) {
        alpha_ = std::move(alpha);
        model().set_scan_vector(alpha_);
    }

    /// Called with each slot's arrivals before the scheduler sees them.
    void on_arrivals(std::function<void(const std::vector<Job>&)> hook) { arrival_hook_ = std::move(hook); }

    const FeasibleSet& feasible_set() const { return fs_; }
    const ScanVector& scan_vector() const { return alpha_; }
    const MetricsCollector& metrics() const { return metrics_; }
    std::int64_t slot() const { return slot_; }
    const Scenario& scenario() const { return scenario_; }

private:
    Scenario scenario_;
    FeasibleSet fs_;
    ScanVector alpha_;
    WorkloadGenerator generator_;
    MetricsCollector metrics_;
    std::variant<std::monostate, CentralScheduler, DistScheduler> scheduler_;
    std::vector<Job> arrivals_;
    std::function<void(const std::vector<Job>&)> arrival_hook_;
    std::int64_t slot_ = 0;
};

struct RunSummary {
    std::int64_t slots = 0;
    std::int64_t completions = 0;
    std::int64_t detections = 0;
    std::int64_t malicious_completed = 0;
    std::int64_t final_queue_work = 0;
    /// Adaptive runs: estimated per-server rates.
    std::vector<double> estimated_genuine, estimated_malicious;
    std::vector<std::string> warnings;
};

struct RunResult {
    std::vector<MetricsSample> samples;
    /// Verdict for the scan vector in force at the end of the run.
    RegionVerdict verdict;
    ScanVector final_alpha;
    RunSummary summary;
};

namespace detail {

/// End of an adaptive warmup: estimates rates from the scan log and
/// switches to the scan vector that is optimal for them.
inline void switch_to_estimate(Simulation& sim, const Scenario& sc, const std::vector<ScanLogEntry>& log, RunSummary& summary) {
    const std::size_t types = sc.type_count();
    if (log.empty()) {
        summary.warnings.push_back("no arrivals during warmup; keeping scan-all for every type");
        return;
    }
    auto est = estimate_rates(log, sc.warmup_slots, sc.arrivals.n_servers, types);
    // Decide alpha over the scenario's length support with the estimated rates.
    ArrivalSpec decide = est.spec;
    for (std::size_t j = 0; j < types; ++j)
        decide.types[j].lengths = sc.arrivals.types[j].lengths;
    ScanVector alpha = optimal_alpha(decide);
    const ScanVector fallback = scan_all(sc.arrivals);
    std::vector<WeightParams> params(types);
    for (std::size_t j = 0; j < types; ++j) {
        summary.estimated_genuine.push_back(to_double(est.spec.per_server_genuine(j)));
        summary.estimated_malicious.push_back(to_double(est.spec.per_server_malicious(j)));
        params[j].mean_reciprocal = to_double(est.spec.types[j].lengths.mean_reciprocal_length());
        if (!est.observed[j]) {
            summary.warnings.push_back("type '" + sc.vm_types[j].name + "' had no scanned jobs during warmup; keeping scan-all");
            for (const auto& [length, a] : fallback.row(j))
                alpha.set(j, length, a);
            params[j].genuine_fraction = 1.0;
        } else {
            const Rational total = est.spec.total_rate(j);
            params[j].genuine_fraction = total > 0 ? to_double(est.spec.genuine_fraction(j)) : 1.0;
        }
    }
    sim.model().set_params(std::move(params));
    sim.set_scan_vector(std::move(alpha));
}

} // namespace detail

/// Runs the scenario; adaptive scenarios warm up with scan-all first. The
/// optional observer sees every slot report.
inline RunResult run(const Scenario& sc, const std::function<void(const SlotReport&)>& observer = {}) {
    Simulation sim(sc);
    RunResult result;
    std::int64_t warmup_left = sc.strategy == ScanStrategy::Adaptive ? sc.warmup_slots : 0;
    // Job ids count up from zero, so a job's log entry sits at its id.
    std::vector<ScanLogEntry> log;
    auto reveal = [&](std::int64_t id, Truth t) {
        if (id >= 0 && static_cast<std::size_t>(id) < log.size())
            log[static_cast<std::size_t>(id)].revealed = t;
    };
    if (warmup_left > 0)
        sim.on_arrivals([&](const std::vector<Job>& arrivals) {
            for (const auto& job : arrivals) {
                if (static_cast<std::size_t>(job.id) != log.size())
                    throw ContractViolation("job ids are not sequential");
                log.push_back({job.type, job.length, std::nullopt});
            }
        });

    for (std::int64_t s = 0; s < sc.total_slots; ++s) {
        const auto& report = sim.step();
        if (observer)
            observer(report);
        if (warmup_left > 0) {
            for (const auto& job : report.detected)
                reveal(job.id, Truth::Malicious);
            for (auto id : report.scanned_genuine)
                reveal(id, Truth::Genuine);
            if (--warmup_left == 0) {
                sim.on_arrivals(nullptr);
                detail::switch_to_estimate(sim, sc, log, result.summary);
                log = {};
            }
        }
        if (sim.metrics().due(sc.sample_every))
            result.samples.push_back(sim.metrics().snapshot());
    }

    result.final_alpha = sim.scan_vector();
    result.verdict = classify(sc.arrivals, result.final_alpha, sim.feasible_set());
    const auto& m = sim.metrics();
    result.summary.slots = m.slots();
    result.summary.completions = m.completions();
    result.summary.detections = m.detections();
    result.summary.malicious_completed = m.malicious_completed();
    if (!result.samples.empty())
        result.summary.final_queue_work = result.samples.back().total_queue_work();
    return result;
}

} // namespace robustwork
