#pragma once

#include "sched_core.hpp"

#include <optional>
#include <span>
#include <string_view>

namespace robustwork {

enum class RoutingPolicy { JSQ, JSW, UR, RR, P2Q, P2W };

/// What JSW and P2W minimize.
enum class WorkloadMetric {
    ZWeight,   ///< local Z_j
    RawLength, ///< local Q_j, the summed remaining length
};

/// When a server may pick a new configuration.
enum class RefreshRule {
    /// After a slot in which some configured job slot found no job.
    OnShortfall,
    /// Every slot, like the centralized scheduler.
    EverySlot,
};

inline std::string_view to_string(RoutingPolicy p) {
    switch (p) {
    case RoutingPolicy::JSQ: return "JSQ";
    case RoutingPolicy::JSW: return "JSW";
    case RoutingPolicy::UR: return "UR";
    case RoutingPolicy::RR: return "RR";
    case RoutingPolicy::P2Q: return "P2Q";
    case RoutingPolicy::P2W: return "P2W";
    }
    return "?";
}

inline RoutingPolicy parse_routing_policy(std::string_view s) {
    for (auto p : {RoutingPolicy::JSQ, RoutingPolicy::JSW, RoutingPolicy::UR, RoutingPolicy::RR, RoutingPolicy::P2Q, RoutingPolicy::P2W}) {
        auto name = to_string(p);
        if (s.size() == name.size() && std::equal(s.begin(), s.end(), name.begin(), [](char a, char b) { return std::toupper(a) == b; }))
            return p;
    }
    throw ConfigError("unknown routing policy '" + std::string(s) + "'");
}

/// A server with its own per-type queues running RobustMaxWork locally.
class ServerNode {
public:
    ServerNode(std::size_t types, std::uint64_t seed, std::uint64_t index)
        : queues_(types), scan_rng_(seed, StreamId::ScanCoin, index), process_rng_(seed, StreamId::ProcessCoin, index) {}

    /// Admission at this server, with the server's own scan coin.
    void admit(Job job, const SchedulingModel& model) {
        if (job.type >= queues_.size())
            throw ContractViolation("job type out of range");
        detail::admit_job(queues_[job.type], std::move(job), model, scan_rng_);
    }

    double z(std::size_t j, const SchedulingModel& model) const { return queues_[j].z(model.params(j), model.mode()); }
    std::int64_t work(std::size_t j) const { return queues_[j].q(); }
    std::int64_t job_count(std::size_t j) const { return queues_[j].job_count(); }
    const TypeQueue& queue(std::size_t j) const { return queues_[j]; }
    const std::optional<std::size_t>& config_index() const { return config_; }
    bool refresh_due() const { return refresh_due_; }

    bool empty() const {
        for (const auto& q : queues_)
            if (!q.empty())
                return false;
        return true;
    }

    /// One local slot. At a refresh point the server idles if it holds no
    /// work, otherwise re-picks the argmax configuration from its local Z;
    /// it then serves its current configuration.
    void local_step(const FeasibleSet& fs, const SchedulingModel& model, RefreshRule rule, SlotReport& report) {
        const std::size_t types = queues_.size();
        if (!config_ || refresh_due_ || rule == RefreshRule::EverySlot) {
            if (empty()) {
                config_.reset();
                refresh_due_ = true;
                return;
            }
            z_buffer_.resize(types);
            for (std::size_t j = 0; j < types; ++j)
                z_buffer_[j] = z(j, model);
            config_ = argmax_config<double>(z_buffer_, fs);
            refresh_due_ = false;
        }
        const auto& config = fs.maximal_configs[*config_];
        bool shortfall = false;
        for (std::size_t j = 0; j < types; ++j) {
            report.config.counts[j] += config[j];
            if (config[j] == 0)
                continue;
            queues_[j].begin_slot();
            if (detail::serve_type(queues_[j], j, config[j], model, process_rng_, report) > 0)
                shortfall = true;
            queues_[j].end_slot();
        }
        refresh_due_ = shortfall;
    }

private:
    std::vector<TypeQueue> queues_;
    RandomStream scan_rng_;
    RandomStream process_rng_;
    std::optional<std::size_t> config_;
    bool refresh_due_ = true;
    std::vector<double> z_buffer_;
};

/// Chooses the server for an arriving job.
class Router {
public:
    Router(RoutingPolicy policy, std::size_t types, std::size_t servers, std::uint64_t seed, WorkloadMetric metric = WorkloadMetric::ZWeight)
        : policy_(policy), metric_(metric), rr_pointer_(types, servers == 0 ? 0 : servers - 1), rng_(seed, StreamId::Routing) {}

    RoutingPolicy policy() const { return policy_; }
    WorkloadMetric metric() const { return metric_; }
    std::size_t rr_pointer(std::size_t j) const { return rr_pointer_[j]; }
    void set_rr_pointer(std::size_t j, std::size_t at) { rr_pointer_[j] = at; }

    std::size_t route(const Job& job, std::span<const ServerNode> servers, const SchedulingModel& model) {
        const std::size_t n = servers.size();
        if (n == 0)
            throw ContractViolation("no servers to route to");
        const std::size_t j = job.type;
        switch (policy_) {
        case RoutingPolicy::UR:
            return static_cast<std::size_t>(rng_.uniform_int(0, static_cast<std::int64_t>(n) - 1));
        case RoutingPolicy::RR:
            rr_pointer_[j] = (rr_pointer_[j] + 1) % n;
            return rr_pointer_[j];
        case RoutingPolicy::JSQ:
            return argmin_all(n, [&](std::size_t s) { return static_cast<double>(servers[s].job_count(j)); });
        case RoutingPolicy::JSW:
            return argmin_all(n, [&](std::size_t s) { return workload(servers[s], j, model); });
        case RoutingPolicy::P2Q:
        case RoutingPolicy::P2W: {
            if (n == 1)
                return 0;
            auto [a, b] = sample_pair(n);
            auto metric = [&](std::size_t s) {
                return policy_ == RoutingPolicy::P2Q ? static_cast<double>(servers[s].job_count(j)) : workload(servers[s], j, model);
            };
            const double ma = metric(a);
            const double mb = metric(b);
            if (ma != mb)
                return ma < mb ? a : b;
            return std::min(a, b);
        }
        }
        return 0;
    }

    /// Two distinct servers; every unordered pair is equally likely.
    std::pair<std::size_t, std::size_t> sample_pair(std::size_t n) {
        const auto a = static_cast<std::size_t>(rng_.uniform_int(0, static_cast<std::int64_t>(n) - 1));
        auto b = static_cast<std::size_t>(rng_.uniform_int(0, static_cast<std::int64_t>(n) - 2));
        if (b >= a)
            ++b;
        return {a, b};
    }

private:
    double workload(const ServerNode& s, std::size_t j, const SchedulingModel& model) const {
        return metric_ == WorkloadMetric::ZWeight ? s.z(j, model) : static_cast<double>(s.work(j));
    }

    template <typename F>
    static std::size_t argmin_all(std::size_t n, F metric) {
        std::size_t best = 0;
        double best_value = metric(0);
        for (std::size_t s = 1; s < n; ++s) {
            const double v = metric(s);
            if (v < best_value) {
                best = s;
                best_value = v;
            }
        }
        return best;
    }

    RoutingPolicy policy_;
    WorkloadMetric metric_;
    std::vector<std::size_t> rr_pointer_;
    RandomStream rng_;
};

/// Decentralized RobustMaxWork: route every arrival to one server, then
/// step every server locally.
class DistScheduler {
public:
    DistScheduler(const ArrivalSpec& spec, const ScanVector& alpha, FeasibleSet fs, std::uint64_t seed, RoutingPolicy policy,
                  WorkloadMetric metric = WorkloadMetric::ZWeight, ZWeight mode = ZWeight::PerJob, RefreshRule rule = RefreshRule::OnShortfall)
        : model_(spec, alpha, mode), fs_(std::move(fs)), rule_(rule),
          router_(policy, spec.type_count(), static_cast<std::size_t>(spec.n_servers), seed, metric) {
        if (fs_.j_count != spec.type_count())
            throw ContractViolation("feasible set and arrival spec disagree on the number of types");
        nodes_.reserve(static_cast<std::size_t>(spec.n_servers));
        for (std::int64_t s = 0; s < spec.n_servers; ++s)
            nodes_.emplace_back(spec.type_count(), seed, static_cast<std::uint64_t>(s));
    }

    /// Routes and admits one job; returns the chosen server.
    std::size_t dispatch(Job job) {
        const auto s = router_.route(job, nodes_, model_);
        nodes_[s].admit(std::move(job), model_);
        return s;
    }

    const SlotReport& step(std::vector<Job> arrivals) {
        const std::size_t types = model_.type_count();
        report_.reset(types, slot_);
        for (auto& job : arrivals)
            dispatch(std::move(job));
        for (auto& node : nodes_)
            for (std::size_t j = 0; j < types; ++j)
                report_.z[j] += node.z(j, model_);
        for (auto& node : nodes_)
            node.local_step(fs_, model_, rule_, report_);
        for (auto& node : nodes_) {
            for (std::size_t j = 0; j < types; ++j) {
                const auto& q = node.queue(j);
                report_.x[j] += q.x();
                report_.y[j] += q.y();
                report_.jobs[j] += q.job_count();
                const double zj = node.z(j, model_);
                report_.lyapunov += zj * zj;
            }
        }
        ++slot_;
        return report_;
    }

    std::span<const ServerNode> nodes() const { return nodes_; }
    const Router& router() const { return router_; }
    Router& router() { return router_; }
    std::int64_t slot() const { return slot_; }
    SchedulingModel& model() { return model_; }
    const SchedulingModel& model() const { return model_; }
    const FeasibleSet& feasible_set() const { return fs_; }

private:
    SchedulingModel model_;
    FeasibleSet fs_;
    RefreshRule rule_;
    Router router_;
    std::vector<ServerNode> nodes_;
    std::int64_t slot_ = 0;
    SlotReport report_;
};

} // namespace robustwork
