#pragma once

#include "domain.hpp"
#include "rng.hpp"

#include <cstdint>
#include <deque>
#include <optional>
#include <vector>

namespace robustwork {

/// How Z charges the scan slot of a job waiting in the pending pool.
enum class ZWeight {
    /// One slot per pending job: Z = X + rho Y + (#pending jobs).
    PerJob,
    /// Distribution constant: Z = X + Y (rho + E[1/l]).
    DistributionMean,
};

/// Per-type constants entering Z.
struct WeightParams {
    double genuine_fraction = 1.0; ///< lambda / (lambda + kappa)
    double mean_reciprocal = 1.0;  ///< E[1/l]
    bool has_traffic = true;
};

/// Z_j = X_j + Y_j * rho_j + scan cost, in any arithmetic W.
template <typename W>
W z_weight(std::int64_t x, std::int64_t y, std::int64_t pending_jobs, const W& genuine_fraction, const W& mean_reciprocal, ZWeight mode) {
    W z = W(x) + W(y) * genuine_fraction;
    if (mode == ZWeight::PerJob)
        z += W(pending_jobs);
    else
        z += W(y) * mean_reciprocal;
    return z;
}

enum class ServiceKind { Idle, Process, Scan };

/// One Process_job call.
struct ServiceEvent {
    ServiceKind kind = ServiceKind::Idle;
    /// Z before minus Z after this unit of service.
    double z_drain = 0.0;
    /// The finished (Process) or detected (Scan) job, when the event ended it.
    std::optional<Job> finished;
    /// Scan revealed a genuine job.
    bool scanned_genuine = false;
    /// Id of the job that received the unit or the scan.
    std::int64_t job_id = -1;
};

/// Queued work of one type: a no-scan pool (total remaining X) and a
/// pending-scan pool (total length Y). During a slot every job is served
/// at most once; jobs are picked oldest-arrival first.
class TypeQueue {
public:
    /// Queues job as pending-scan (scan == true) or no-scan.
    void admit(Job job, bool scan) {
        if (scan) {
            job.scan_status = ScanStatus::PendingScan;
            y_ += job.length;
            pending_.push_back(std::move(job));
        } else {
            job.scan_status = ScanStatus::NoScan;
            x_ += job.remaining;
            direct_.push_back(std::move(job));
        }
    }

    std::int64_t x() const { return x_; }
    std::int64_t y() const { return y_; }
    std::int64_t q() const { return x_ + y_; }
    std::int64_t pending_jobs() const { return static_cast<std::int64_t>(pending_.size()); }
    std::int64_t job_count() const {
        return static_cast<std::int64_t>(direct_.size() + scanned_.size() + pending_.size() + served_direct_.size() +
                                         served_scanned_.size() + scanned_now_.size());
    }
    bool empty() const { return job_count() == 0; }

    template <typename W = double>
    W z(const W& genuine_fraction, const W& mean_reciprocal, ZWeight mode) const {
        return z_weight<W>(x_, y_, pending_jobs(), genuine_fraction, mean_reciprocal, mode);
    }

    double z(const WeightParams& p, ZWeight mode) const {
        if (y_ > 0 && !p.has_traffic)
            throw ContractViolation("pending-scan work on a type with no traffic");
        return z_weight<double>(x_, y_, pending_jobs(), p.genuine_fraction, p.mean_reciprocal, mode);
    }

    /// Starts a slot: every queued job becomes schedulable once.
    void begin_slot() {
        residual_x_ = x_;
        residual_y_ = y_;
    }

    bool has_unscheduled_x() const { return !direct_.empty() || !scanned_.empty(); }
    bool has_unscheduled_y() const { return !pending_.empty(); }
    std::int64_t residual_x() const { return residual_x_; }
    std::int64_t residual_y() const { return residual_y_; }

    /// Process_job: X with probability residual X / (X + Y), else Y,
    /// falling back to whichever pool still has unscheduled jobs.
    ServiceEvent process_job(RandomStream& rng, const WeightParams& p, ZWeight mode) {
        const bool hx = has_unscheduled_x();
        const bool hy = has_unscheduled_y();
        if (hx && hy) {
            const double r = rng.uniform01();
            const double share = static_cast<double>(residual_x_) / static_cast<double>(residual_x_ + residual_y_);
            return r < share ? process_x() : process_y(p, mode);
        }
        if (hy)
            return process_y(p, mode);
        if (hx)
            return process_x();
        return {};
    }

    /// One unit of the oldest unscheduled no-scan job.
    ServiceEvent process_x() {
        if (!has_unscheduled_x())
            throw ContractViolation("process_x on an exhausted pool");
        const bool from_scanned =
            direct_.empty() || (!scanned_.empty() && older(scanned_.front(), direct_.front()));
        auto& pool = from_scanned ? scanned_ : direct_;
        Job job = std::move(pool.front());
        pool.pop_front();
        residual_x_ -= job.remaining;
        --job.remaining;
        const auto id = job.id;
        --x_;
        ServiceEvent ev;
        ev.kind = ServiceKind::Process;
        ev.z_drain = 1.0;
        ev.job_id = id;
        if (job.remaining == 0)
            ev.finished = std::move(job);
        else
            (from_scanned ? served_scanned_ : served_direct_).push_back(std::move(job));
        return ev;
    }

    /// Scans the oldest pending job: malicious jobs leave the system,
    /// genuine ones join the no-scan pool from the next slot on.
    ServiceEvent process_y(const WeightParams& p, ZWeight mode) {
        if (!has_unscheduled_y())
            throw ContractViolation("process_y on an exhausted pool");
        Job job = std::move(pending_.front());
        pending_.pop_front();
        const auto length = job.length;
        residual_y_ -= length;
        y_ -= length;
        const double scan_cost = mode == ZWeight::PerJob ? 1.0 : static_cast<double>(length) * p.mean_reciprocal;
        const double before = static_cast<double>(length) * p.genuine_fraction + scan_cost;
        ServiceEvent ev;
        ev.kind = ServiceKind::Scan;
        ev.job_id = job.id;
        if (job.truth(TruthKey{}) == Truth::Malicious) {
            ev.z_drain = before;
            ev.finished = std::move(job);
        } else {
            ev.z_drain = before - static_cast<double>(length);
            ev.scanned_genuine = true;
            job.scan_status = ScanStatus::ScannedGenuine;
            x_ += length;
            scanned_now_.push_back(std::move(job));
        }
        return ev;
    }

    /// Ends a slot: served jobs return to the heads of their pools and
    /// freshly scanned genuine jobs become schedulable.
    void end_slot() {
        for (auto it = served_direct_.rbegin(); it != served_direct_.rend(); ++it)
            direct_.push_front(std::move(*it));
        for (auto it = served_scanned_.rbegin(); it != served_scanned_.rend(); ++it)
            scanned_.push_front(std::move(*it));
        for (auto& job : scanned_now_)
            scanned_.push_back(std::move(job));
        served_direct_.clear();
        served_scanned_.clear();
        scanned_now_.clear();
        residual_x_ = 0;
        residual_y_ = 0;
    }

    /// Exact bookkeeping check used by tests: X and Y equal the pool sums.
    bool totals_consistent() const {
        std::int64_t xs = 0;
        std::int64_t ys = 0;
        for (const auto* pool : {&direct_, &scanned_})
            for (const auto& job : *pool) {
                if (job.remaining < 1 || job.remaining > job.length)
                    return false;
                xs += job.remaining;
            }
        for (const auto& job : pending_)
            ys += job.length;
        return xs == x_ && ys == y_;
    }

    /// Visits every queued job (slot boundaries only).
    template <typename F>
    void for_each_job(F&& f) const {
        for (const auto& job : direct_)
            f(job);
        for (const auto& job : scanned_)
            f(job);
        for (const auto& job : pending_)
            f(job);
    }

private:
    static bool older(const Job& a, const Job& b) {
        return a.arrival_slot != b.arrival_slot ? a.arrival_slot < b.arrival_slot : a.id < b.id;
    }

    std::deque<Job> direct_;  // NoScan, arrival order
    std::deque<Job> scanned_; // ScannedGenuine, arrival order
    std::deque<Job> pending_; // PendingScan, arrival order
    std::vector<Job> served_direct_;
    std::vector<Job> served_scanned_;
    std::vector<Job> scanned_now_;
    std::int64_t x_ = 0;
    std::int64_t y_ = 0;
    std::int64_t residual_x_ = 0;
    std::int64_t residual_y_ = 0;
};

} // namespace robustwork
