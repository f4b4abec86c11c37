#pragma once

#include "capacity.hpp"
#include "domain.hpp"
#include "scanning.hpp"
#include "sched_dist.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <fstream>
#include <istream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace robustwork {

enum class SchedulerMode { Centralized, Decentralized };
enum class ScanStrategy { None, All, Opt, Custom, Adaptive };

/// A complete, reproducible experiment description.
struct Scenario {
    std::string name = "scenario";
    std::vector<std::string> resource_names;
    ResourceVector capacity;
    std::vector<VMTypeSpec> vm_types;
    ArrivalSpec arrivals;

    SchedulerMode mode = SchedulerMode::Centralized;
    RoutingPolicy routing = RoutingPolicy::JSW;
    WorkloadMetric workload_metric = WorkloadMetric::ZWeight;
    RefreshRule refresh = RefreshRule::OnShortfall;

    ScanStrategy strategy = ScanStrategy::Opt;
    ScanVector custom_alpha;
    std::int64_t warmup_slots = 0;
    ZWeight z_weight = ZWeight::PerJob;

    std::int64_t total_slots = 500000;
    std::int64_t sample_every = 10000;
    std::uint64_t seed = 42;

    std::size_t type_count() const { return vm_types.size(); }

    void validate() const {
        if (vm_types.empty())
            throw ConfigError("scenario needs at least one VM type");
        if (arrivals.type_count() != vm_types.size())
            throw ConfigError("arrival rates given for " + std::to_string(arrivals.type_count()) + " types, " +
                              std::to_string(vm_types.size()) + " VM types defined");
        arrivals.validate();
        for (const auto& t : vm_types)
            if (t.demand.size() != capacity.size())
                throw ConfigError("VM type '" + t.name + "' lists " + std::to_string(t.demand.size()) + " demands for " +
                                  std::to_string(capacity.size()) + " resources");
        if (total_slots <= 0)
            throw ConfigError("run.slots must be positive");
        if (sample_every <= 0 || total_slots % sample_every != 0)
            throw ConfigError("run.sample_every must be positive and divide run.slots");
        if (strategy == ScanStrategy::Adaptive && (warmup_slots <= 0 || warmup_slots >= total_slots))
            throw ConfigError("scan.warmup_slots must lie in [1, run.slots)");
        if (strategy == ScanStrategy::Custom) {
            if (custom_alpha.type_count() != vm_types.size())
                throw ConfigError("custom scan table must cover every VM type");
            for (std::size_t j = 0; j < vm_types.size(); ++j)
                for (auto length : arrivals.types[j].lengths.support())
                    if (!custom_alpha.row(j).contains(length))
                        throw ConfigError("custom scan table misses type '" + vm_types[j].name + "' length " + std::to_string(length));
        }
    }
};

namespace detail {

inline std::vector<std::string> split_list(const std::string& s, char sep = ',') {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, sep)) {
        auto t = trim(item);
        if (!t.empty())
            out.emplace_back(t);
    }
    return out;
}

inline std::vector<Rational> parse_rational_list(const std::string& s) {
    std::vector<Rational> out;
    for (const auto& item : split_list(s))
        out.push_back(parse_rational(item));
    return out;
}

inline std::string lower(std::string s) {
    for (auto& c : s)
        c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
}

/// "lo-hi" or "L".
inline std::pair<std::int64_t, std::int64_t> parse_range(const std::string& s) {
    auto dash = s.find('-');
    if (dash == std::string::npos) {
        auto v = parse_int(s);
        return {v, v};
    }
    return {parse_int(s.substr(0, dash)), parse_int(s.substr(dash + 1))};
}

/// "0.7:1-50, 0.15:251-300".
inline LengthDistribution parse_bands(const std::string& s) {
    std::vector<LengthBand> bands;
    for (const auto& item : split_list(s)) {
        auto colon = item.find(':');
        if (colon == std::string::npos)
            throw ConfigError("length band '" + item + "' must look like probability:lo-hi");
        auto [lo, hi] = parse_range(std::string(trim(item.substr(colon + 1))));
        bands.push_back({parse_rational(item.substr(0, colon)), lo, hi});
    }
    return LengthDistribution(std::move(bands));
}

using Section = boost::property_tree::ptree;

inline const Section& section(const Section& root, const std::string& name) {
    auto it = root.find(name);
    if (it == root.not_found())
        throw ConfigError("scenario is missing section [" + name + "]");
    return it->second;
}

inline std::optional<std::string> value(const Section& sec, const std::string& key) {
    auto it = sec.find(key);
    if (it == sec.not_found())
        return std::nullopt;
    return std::string(trim(it->second.data()));
}

inline std::string required(const Section& sec, const std::string& name, const std::string& key) {
    auto v = value(sec, key);
    if (!v)
        throw ConfigError("scenario is missing [" + name + "] " + key);
    return *v;
}

} // namespace detail

/// Reads the sectioned key/value scenario format (see docs/scenario_format.md).
inline Scenario parse_scenario(std::istream& in) {
    namespace pt = boost::property_tree;
    pt::ptree root;
    try {
        pt::read_ini(in, root);
    } catch (const pt::ini_parser_error& e) {
        throw ConfigError(std::string("scenario syntax: ") + e.what());
    }
    using detail::required;
    using detail::value;

    Scenario sc;
    if (auto it = root.find("scenario"); it != root.not_found())
        if (auto name = value(it->second, "name"))
            sc.name = *name;

    const auto& servers = detail::section(root, "servers");
    sc.arrivals.n_servers = parse_int(required(servers, "servers", "count"));
    sc.capacity.amounts = detail::parse_rational_list(required(servers, "servers", "capacity"));
    if (auto names = value(servers, "resources"))
        sc.resource_names = detail::split_list(*names);
    if (!sc.resource_names.empty() && sc.resource_names.size() != sc.capacity.size())
        throw ConfigError("[servers] resources and capacity lengths differ");

    for (const auto& [name, node] : detail::section(root, "vm_types"))
        sc.vm_types.push_back({name, {detail::parse_rational_list(node.data())}});
    const std::size_t types = sc.vm_types.size();

    const auto& arrivals = detail::section(root, "arrivals");
    const auto scope = detail::lower(value(arrivals, "scope").value_or("per_server"));
    if (scope != "per_server" && scope != "system")
        throw ConfigError("[arrivals] scope must be per_server or system");
    const auto genuine = detail::parse_rational_list(required(arrivals, "arrivals", "genuine"));
    const auto malicious = detail::parse_rational_list(value(arrivals, "malicious").value_or(""));
    if (genuine.size() != types || (!malicious.empty() && malicious.size() != types))
        throw ConfigError("[arrivals] needs one rate per VM type");

    const auto& lengths = detail::section(root, "lengths");
    const auto default_bands = value(lengths, "bands");
    for (const auto& [key, node] : lengths) {
        if (key == "bands")
            continue;
        bool known = false;
        for (const auto& t : sc.vm_types)
            known = known || t.name == key;
        if (!known)
            throw ConfigError("[lengths] override for unknown VM type '" + key + "'");
    }
    const Rational scale = scope == "per_server" ? Rational(sc.arrivals.n_servers) : Rational(1);
    for (std::size_t j = 0; j < types; ++j) {
        TypeArrivals ta;
        ta.genuine_rate = genuine[j] * scale;
        ta.malicious_rate = malicious.empty() ? Rational(0) : malicious[j] * scale;
        auto override_bands = value(lengths, sc.vm_types[j].name);
        if (!override_bands && !default_bands)
            throw ConfigError("no length distribution for VM type '" + sc.vm_types[j].name + "'");
        ta.lengths = detail::parse_bands(override_bands ? *override_bands : *default_bands);
        sc.arrivals.types.push_back(std::move(ta));
    }

    if (auto it = root.find("scan"); it != root.not_found()) {
        const auto& scan = it->second;
        const auto strategy = detail::lower(value(scan, "strategy").value_or("opt"));
        if (strategy == "none")
            sc.strategy = ScanStrategy::None;
        else if (strategy == "all")
            sc.strategy = ScanStrategy::All;
        else if (strategy == "opt")
            sc.strategy = ScanStrategy::Opt;
        else if (strategy == "custom")
            sc.strategy = ScanStrategy::Custom;
        else if (strategy == "adaptive")
            sc.strategy = ScanStrategy::Adaptive;
        else
            throw ConfigError("unknown scan strategy '" + strategy + "'");
        if (auto w = value(scan, "warmup_slots"))
            sc.warmup_slots = parse_int(*w);
        const auto zw = detail::lower(value(scan, "z_weight").value_or("per_job"));
        if (zw == "per_job")
            sc.z_weight = ZWeight::PerJob;
        else if (zw == "distribution_mean")
            sc.z_weight = ZWeight::DistributionMean;
        else
            throw ConfigError("unknown z_weight '" + zw + "'");
    }

    if (sc.strategy == ScanStrategy::Custom) {
        sc.custom_alpha = ScanVector(types);
        for (const auto& [key, node] : detail::section(root, "alpha")) {
            std::size_t j = types;
            for (std::size_t k = 0; k < types; ++k)
                if (sc.vm_types[k].name == key)
                    j = k;
            if (j == types)
                throw ConfigError("[alpha] entry for unknown VM type '" + key + "'");
            for (const auto& item : detail::split_list(node.data())) {
                auto colon = item.find(':');
                if (colon == std::string::npos)
                    throw ConfigError("[alpha] entry '" + item + "' must look like lo-hi:probability");
                auto [lo, hi] = detail::parse_range(std::string(detail::trim(item.substr(0, colon))));
                const Rational a = parse_rational(item.substr(colon + 1));
                for (auto length : sc.arrivals.types[j].lengths.support())
                    if (length >= lo && length <= hi)
                        sc.custom_alpha.set(j, length, a);
            }
        }
    }

    if (auto it = root.find("run"); it != root.not_found()) {
        const auto& run = it->second;
        const auto sched = detail::lower(value(run, "scheduler").value_or("centralized"));
        if (sched == "centralized")
            sc.mode = SchedulerMode::Centralized;
        else if (sched == "decentralized")
            sc.mode = SchedulerMode::Decentralized;
        else
            throw ConfigError("unknown scheduler '" + sched + "'");
        if (auto r = value(run, "routing"))
            sc.routing = parse_routing_policy(*r);
        const auto metric = detail::lower(value(run, "workload_metric").value_or("z"));
        if (metric == "z")
            sc.workload_metric = WorkloadMetric::ZWeight;
        else if (metric == "length")
            sc.workload_metric = WorkloadMetric::RawLength;
        else
            throw ConfigError("unknown workload_metric '" + metric + "'");
        const auto refresh = detail::lower(value(run, "refresh").value_or("on_shortfall"));
        if (refresh == "on_shortfall")
            sc.refresh = RefreshRule::OnShortfall;
        else if (refresh == "every_slot")
            sc.refresh = RefreshRule::EverySlot;
        else
            throw ConfigError("unknown refresh rule '" + refresh + "'");
        if (auto v = value(run, "slots"))
            sc.total_slots = parse_int(*v);
        if (auto v = value(run, "sample_every"))
            sc.sample_every = parse_int(*v);
        if (auto v = value(run, "seed"))
            sc.seed = static_cast<std::uint64_t>(parse_int(*v));
    }

    sc.validate();
    return sc;
}

inline Scenario load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot open scenario '" + path + "'");
    return parse_scenario(in);
}

} // namespace robustwork
