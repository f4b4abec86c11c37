#pragma once

#include "capacity.hpp"
#include "rng.hpp"
#include "scanning.hpp"
#include "type_queue.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace robustwork {

/// What happened in one slot.
struct SlotReport {
    std::int64_t slot = 0;
    /// Z at slot start (after admissions), the weights N' was chosen from.
    std::vector<double> z;
    /// System-wide configuration served this slot.
    Configuration config;
    /// End-of-slot totals per type.
    std::vector<std::int64_t> x, y, jobs;
    /// Sum of squared end-of-slot Z over all queues.
    double lyapunov = 0.0;
    std::vector<Job> completed;
    std::vector<Job> detected;
    /// Ids of jobs whose scan found them genuine.
    std::vector<std::int64_t> scanned_genuine;
    /// Per type: Process_X units, scans, idle calls, summed Z drain.
    std::vector<std::int64_t> process_units, scans, idle_calls;
    std::vector<double> z_drain;

    void reset(std::size_t types, std::int64_t at_slot) {
        slot = at_slot;
        z.assign(types, 0.0);
        config.counts.assign(types, 0);
        x.assign(types, 0);
        y.assign(types, 0);
        jobs.assign(types, 0);
        lyapunov = 0.0;
        completed.clear();
        detected.clear();
        scanned_genuine.clear();
        process_units.assign(types, 0);
        scans.assign(types, 0);
        idle_calls.assign(types, 0);
        z_drain.assign(types, 0.0);
    }

    std::int64_t total_work() const {
        std::int64_t t = 0;
        for (std::size_t j = 0; j < x.size(); ++j)
            t += x[j] + y[j];
        return t;
    }
};

/// Index of the maximal configuration maximizing sum_j N_j Z_j; ties go to
/// the lexicographically smallest (configs are kept in ascending order).
template <typename W>
std::size_t argmax_config(std::span<const W> z, const FeasibleSet& fs) {
    if (fs.maximal_configs.empty())
        throw ContractViolation("feasible set has no configurations");
    std::size_t best = 0;
    W best_value{};
    for (std::size_t k = 0; k < fs.maximal_configs.size(); ++k) {
        W value{};
        for (std::size_t j = 0; j < z.size(); ++j)
            value += W(fs.maximal_configs[k][j]) * z[j];
        if (k == 0 || value > best_value) {
            best = k;
            best_value = value;
        }
    }
    return best;
}

/// Scheduling constants derived from rates and a scan vector: Z parameters
/// and a dense alpha lookup for admissions.
class SchedulingModel {
public:
    SchedulingModel() = default;
    SchedulingModel(const ArrivalSpec& spec, const ScanVector& alpha, ZWeight mode = ZWeight::PerJob) : mode_(mode) {
        set_rates(spec);
        set_scan_vector(alpha);
    }

    /// Rates used in Z. Types without traffic get rho = 1.
    void set_rates(const ArrivalSpec& spec) {
        params_.clear();
        for (std::size_t j = 0; j < spec.type_count(); ++j) {
            WeightParams p;
            p.has_traffic = spec.total_rate(j) > 0;
            p.genuine_fraction = p.has_traffic ? to_double(spec.genuine_fraction(j)) : 1.0;
            p.mean_reciprocal = to_double(spec.types[j].lengths.mean_reciprocal_length());
            params_.push_back(p);
        }
    }

    void set_params(std::vector<WeightParams> params) { params_ = std::move(params); }

    void set_scan_vector(const ScanVector& alpha) {
        alpha_.assign(alpha.type_count(), {});
        for (std::size_t j = 0; j < alpha.type_count(); ++j) {
            for (const auto& [length, a] : alpha.row(j)) {
                auto& row = alpha_[j];
                if (row.size() <= static_cast<std::size_t>(length))
                    row.resize(static_cast<std::size_t>(length) + 1, -1.0);
                row[static_cast<std::size_t>(length)] = to_double(a);
            }
        }
    }

    double alpha(std::size_t j, std::int64_t length) const {
        if (j >= alpha_.size() || length < 0 || static_cast<std::size_t>(length) >= alpha_[j].size() ||
            alpha_[j][static_cast<std::size_t>(length)] < 0.0)
            throw ContractViolation("no scan probability for type " + std::to_string(j) + " length " + std::to_string(length));
        return alpha_[j][static_cast<std::size_t>(length)];
    }

    const WeightParams& params(std::size_t j) const { return params_[j]; }
    std::size_t type_count() const { return params_.size(); }
    ZWeight mode() const { return mode_; }

private:
    std::vector<WeightParams> params_;
    std::vector<std::vector<double>> alpha_;
    ZWeight mode_ = ZWeight::PerJob;
};

namespace detail {

/// Admission coin flip: one draw per job whatever alpha is, so scan
/// streams stay aligned across strategies.
inline void admit_job(TypeQueue& q, Job job, const SchedulingModel& model, RandomStream& scan_rng) {
    const double a = model.alpha(job.type, job.length);
    const bool scan = scan_rng.uniform01() < a;
    q.admit(std::move(job), scan);
}

/// Runs `calls` Process_job invocations on q. Returns the number of calls
/// that found no unscheduled job.
inline std::int64_t serve_type(TypeQueue& q, std::size_t j, std::int64_t calls, const SchedulingModel& model, RandomStream& rng,
                               SlotReport& report) {
    const auto& p = model.params(j);
    for (std::int64_t c = 0; c < calls; ++c) {
        auto ev = q.process_job(rng, p, model.mode());
        switch (ev.kind) {
        case ServiceKind::Idle:
            report.idle_calls[j] += calls - c;
            return calls - c;
        case ServiceKind::Process:
            ++report.process_units[j];
            if (ev.finished)
                report.completed.push_back(std::move(*ev.finished));
            break;
        case ServiceKind::Scan:
            ++report.scans[j];
            if (ev.scanned_genuine)
                report.scanned_genuine.push_back(ev.job_id);
            if (ev.finished)
                report.detected.push_back(std::move(*ev.finished));
            break;
        }
        report.z_drain[j] += ev.z_drain;
    }
    return 0;
}

} // namespace detail

/// Centralized RobustMaxWork over n identical servers with one queue per
/// type. Each slot: admit arrivals with the scan coin, compute Z, pick the
/// per-server argmax configuration N*, and serve n * N* Process_job calls.
class CentralScheduler {
public:
    CentralScheduler(const ArrivalSpec& spec, const ScanVector& alpha, FeasibleSet fs, std::uint64_t seed, ZWeight mode = ZWeight::PerJob)
        : model_(spec, alpha, mode), fs_(std::move(fs)), n_servers_(spec.n_servers), queues_(spec.type_count()),
          scan_rng_(seed, StreamId::ScanCoin, 0), process_rng_(seed, StreamId::ProcessCoin, 0) {
        if (fs_.j_count != spec.type_count())
            throw ContractViolation("feasible set and arrival spec disagree on the number of types");
    }

    void admit(Job job) {
        if (job.type >= queues_.size())
            throw ContractViolation("job type out of range");
        detail::admit_job(queues_[job.type], std::move(job), model_, scan_rng_);
    }

    std::vector<double> compute_z() const {
        std::vector<double> z(queues_.size());
        for (std::size_t j = 0; j < queues_.size(); ++j)
            z[j] = queues_[j].z(model_.params(j), model_.mode());
        return z;
    }

    /// One slot of RobustMaxWork.
    const SlotReport& step(std::vector<Job> arrivals) {
        const std::size_t types = queues_.size();
        report_.reset(types, slot_);
        for (auto& job : arrivals)
            admit(std::move(job));

        report_.z = compute_z();
        const auto& best = fs_.maximal_configs[argmax_config<double>(report_.z, fs_)];
        for (std::size_t j = 0; j < types; ++j)
            report_.config.counts[j] = static_cast<int>(best[j] * n_servers_);

        for (std::size_t j = 0; j < types; ++j) {
            queues_[j].begin_slot();
            detail::serve_type(queues_[j], j, report_.config[j], model_, process_rng_, report_);
        }
        for (auto& q : queues_)
            q.end_slot();

        for (std::size_t j = 0; j < types; ++j) {
            report_.x[j] = queues_[j].x();
            report_.y[j] = queues_[j].y();
            report_.jobs[j] = queues_[j].job_count();
            const double zj = queues_[j].z(model_.params(j), model_.mode());
            report_.lyapunov += zj * zj;
        }
        ++slot_;
        return report_;
    }

    const TypeQueue& queue(std::size_t j) const { return queues_[j]; }
    std::size_t type_count() const { return queues_.size(); }
    std::int64_t slot() const { return slot_; }
    const FeasibleSet& feasible_set() const { return fs_; }
    SchedulingModel& model() { return model_; }
    const SchedulingModel& model() const { return model_; }

private:
    SchedulingModel model_;
    FeasibleSet fs_;
    std::int64_t n_servers_;
    std::vector<TypeQueue> queues_;
    RandomStream scan_rng_;
    RandomStream process_rng_;
    std::int64_t slot_ = 0;
    SlotReport report_;
};

} // namespace robustwork
