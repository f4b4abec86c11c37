#pragma once

#include "capacity.hpp"
#include "domain.hpp"

#include <map>
#include <optional>
#include <vector>

namespace robustwork {

/// Scanning probabilities alpha(j, L) over each type's length support.
class ScanVector {
public:
    ScanVector() = default;
    explicit ScanVector(std::size_t type_count) : table_(type_count) {}

    std::size_t type_count() const { return table_.size(); }

    void set(std::size_t j, std::int64_t length, Rational alpha) {
        if (alpha < 0 || alpha > 1)
            throw ConfigError("scan probability must lie in [0, 1]");
        table_.at(j)[length] = std::move(alpha);
    }

    const Rational& alpha(std::size_t j, std::int64_t length) const {
        const auto& row = table_.at(j);
        auto it = row.find(length);
        if (it == row.end())
            throw ContractViolation("no scan probability for type " + std::to_string(j) + " length " + std::to_string(length));
        return it->second;
    }

    const std::map<std::int64_t, Rational>& row(std::size_t j) const { return table_.at(j); }

    bool is_binary() const {
        for (const auto& row : table_)
            for (const auto& [length, a] : row)
                if (a != 0 && a != 1)
                    return false;
        return true;
    }

    bool operator==(const ScanVector&) const = default;

private:
    std::vector<std::map<std::int64_t, Rational>> table_;
};

/// Expected arriving weight per type, system-wide work units per slot.
using AVector = std::vector<Rational>;

namespace detail {

template <typename Rule>
ScanVector make_scan_vector(const ArrivalSpec& spec, Rule rule) {
    ScanVector alpha(spec.type_count());
    for (std::size_t j = 0; j < spec.type_count(); ++j)
        for (auto length : spec.types[j].lengths.support())
            alpha.set(j, length, rule(j, length) ? Rational(1) : Rational(0));
    return alpha;
}

} // namespace detail

inline ScanVector scan_none(const ArrivalSpec& spec) {
    return detail::make_scan_vector(spec, [](std::size_t, std::int64_t) { return false; });
}

/// Scan every job longer than the one-slot scan itself.
inline ScanVector scan_all(const ArrivalSpec& spec) {
    return detail::make_scan_vector(spec, [](std::size_t, std::int64_t length) { return length > 1; });
}

/// The a-minimizing 0/1 vector: scan exactly when
/// lambda/(lambda+kappa) + 1/L < 1, i.e. kappa * L > lambda + kappa.
/// Types without traffic are never scanned.
inline ScanVector optimal_alpha(const ArrivalSpec& spec) {
    return detail::make_scan_vector(spec, [&](std::size_t j, std::int64_t length) {
        const auto& t = spec.types[j];
        if (t.malicious_rate <= 0)
            return false;
        return t.malicious_rate * length > t.genuine_rate + t.malicious_rate;
    });
}

/// Largest length left unscanned by optimal_alpha, floor((lambda+kappa)/kappa).
/// Empty when kappa is zero (nothing is ever scanned).
inline std::optional<Integer> scan_threshold(const ArrivalSpec& spec, std::size_t j) {
    const auto& t = spec.types[j];
    if (t.malicious_rate <= 0)
        return std::nullopt;
    return floor((t.genuine_rate + t.malicious_rate) / t.malicious_rate);
}

/// Expected Z-weight arriving per slot. Arriving work of type j splits over
/// lengths in proportion to p(L) * L / E[l]; unscanned work counts in full,
/// scanned work counts its genuine share plus one slot per scanned job.
inline AVector a_vector(const ScanVector& alpha, const ArrivalSpec& spec) {
    AVector a(spec.type_count(), Rational(0));
    for (std::size_t j = 0; j < spec.type_count(); ++j) {
        const auto& t = spec.types[j];
        const Rational total = t.genuine_rate + t.malicious_rate;
        if (total == 0)
            continue;
        const Rational mean = t.lengths.mean_length();
        for (auto length : t.lengths.support()) {
            const Rational p = t.lengths.probability_of(length);
            const Rational work_share = p * length / mean;
            const Rational& s = alpha.alpha(j, length);
            a[j] += total * work_share * (1 - s);
            a[j] += s * (t.genuine_rate * work_share + total * p / mean);
        }
    }
    return a;
}

/// Capacity-region verdict for RobustMaxWork with scan vector alpha. fs is
/// the per-server set; the spec's server count scales it.
inline RegionVerdict classify(const ArrivalSpec& spec, const ScanVector& alpha, const FeasibleSet& fs) {
    return membership(a_vector(alpha, spec), system_region(fs, spec.n_servers));
}

/// One observed arrival: its label is known only if it was scanned.
struct ScanLogEntry {
    std::size_t type = 0;
    std::int64_t length = 1;
    std::optional<Truth> revealed;
};

struct RateEstimate {
    ArrivalSpec spec;
    /// Type had at least one scanned job, so its genuine share is known.
    std::vector<bool> observed;
};

/// Empirical rates from a scan log covering elapsed_slots slots. Unscanned
/// work is split by the type's scanned genuine/malicious job ratio.
inline RateEstimate estimate_rates(const std::vector<ScanLogEntry>& log, std::int64_t elapsed_slots, std::int64_t n_servers, std::size_t type_count) {
    if (elapsed_slots <= 0)
        throw ContractViolation("estimate_rates needs a positive observation window");
    if (log.empty())
        throw InsufficientData("scan log is empty");

    struct Tally {
        Integer genuine_work = 0, malicious_work = 0, unscanned_work = 0;
        std::int64_t genuine_jobs = 0, malicious_jobs = 0;
        std::map<std::int64_t, std::int64_t> lengths;
        std::int64_t jobs = 0;
    };
    std::vector<Tally> tally(type_count);
    for (const auto& e : log) {
        if (e.type >= type_count)
            throw ContractViolation("scan log entry has unknown type");
        auto& t = tally[e.type];
        ++t.lengths[e.length];
        ++t.jobs;
        if (!e.revealed) {
            t.unscanned_work += e.length;
        } else if (*e.revealed == Truth::Genuine) {
            t.genuine_work += e.length;
            ++t.genuine_jobs;
        } else {
            t.malicious_work += e.length;
            ++t.malicious_jobs;
        }
    }

    RateEstimate est;
    est.spec.n_servers = n_servers;
    est.observed.assign(type_count, false);
    const Rational slots(elapsed_slots);
    for (std::size_t j = 0; j < type_count; ++j) {
        const auto& t = tally[j];
        TypeArrivals ta;
        const std::int64_t scanned = t.genuine_jobs + t.malicious_jobs;
        if (scanned > 0) {
            const Rational g(t.genuine_jobs, scanned);
            ta.genuine_rate = (Rational(t.genuine_work) + g * Rational(t.unscanned_work)) / slots;
            ta.malicious_rate = (Rational(t.malicious_work) + (1 - g) * Rational(t.unscanned_work)) / slots;
            est.observed[j] = true;
        } else {
            ta.genuine_rate = Rational(t.unscanned_work) / slots;
            ta.malicious_rate = 0;
        }
        if (t.jobs == 0) {
            ta.lengths = LengthDistribution::constant(1);
        } else {
            std::vector<LengthBand> bands;
            for (const auto& [length, count] : t.lengths)
                bands.push_back({Rational(count, t.jobs), length, length});
            ta.lengths = LengthDistribution(std::move(bands));
        }
        est.spec.types.push_back(std::move(ta));
    }
    return est;
}

} // namespace robustwork
