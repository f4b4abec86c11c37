#pragma once

#include "rational.hpp"
#include "rng.hpp"

#include <algorithm>
#include <compare>
#include <cstdint>
#include <string>
#include <vector>

namespace robustwork {

struct ResourceVector {
    std::vector<Rational> amounts;

    std::size_t size() const { return amounts.size(); }
};

/// A VM type: the resources a single job of this type occupies on a server.
struct VMTypeSpec {
    std::string name;
    ResourceVector demand;
};

/// Probability mass spread uniformly over the integer lengths lo..hi.
struct LengthBand {
    Rational probability;
    std::int64_t lo = 1;
    std::int64_t hi = 1;
};

/// Discrete job-length law made of uniform integer bands.
class LengthDistribution {
public:
    LengthDistribution() = default;

    explicit LengthDistribution(std::vector<LengthBand> bands) : bands_(std::move(bands)) {
        validate();
        Rational acc = 0;
        for (const auto& b : bands_) {
            acc += b.probability;
            cumulative_.push_back(to_double(acc));
        }
        cumulative_.back() = 1.0;
    }

    /// Point mass at a single length.
    static LengthDistribution constant(std::int64_t length) { return LengthDistribution({{Rational(1), length, length}}); }

    const std::vector<LengthBand>& bands() const { return bands_; }

    /// Sorted lengths with positive probability.
    std::vector<std::int64_t> support() const {
        std::vector<std::int64_t> out;
        for (const auto& b : bands_)
            if (b.probability > 0)
                for (auto l = b.lo; l <= b.hi; ++l)
                    out.push_back(l);
        std::sort(out.begin(), out.end());
        return out;
    }

    /// P(length == L).
    Rational probability_of(std::int64_t length) const {
        for (const auto& b : bands_)
            if (length >= b.lo && length <= b.hi)
                return b.probability / Rational(b.hi - b.lo + 1);
        return 0;
    }

    Rational mean_length() const {
        Rational m = 0;
        for (const auto& b : bands_)
            m += b.probability * Rational(b.lo + b.hi, 2);
        return m;
    }

    Rational mean_reciprocal_length() const {
        Rational m = 0;
        for (const auto& b : bands_) {
            Rational harmonic = 0;
            for (auto l = b.lo; l <= b.hi; ++l)
                harmonic += Rational(1, l);
            m += b.probability * harmonic / Rational(b.hi - b.lo + 1);
        }
        return m;
    }

    std::int64_t max_length() const {
        std::int64_t m = 0;
        for (const auto& b : bands_)
            if (b.probability > 0)
                m = std::max(m, b.hi);
        return m;
    }

    std::int64_t sample(RandomStream& rng) const {
        const double u = rng.uniform01();
        std::size_t k = 0;
        while (k + 1 < cumulative_.size() && u >= cumulative_[k])
            ++k;
        return rng.uniform_int(bands_[k].lo, bands_[k].hi);
    }

private:
    void validate() const {
        if (bands_.empty())
            throw ConfigError("length distribution needs at least one band");
        Rational total = 0;
        for (const auto& b : bands_) {
            if (b.lo < 1 || b.hi < b.lo)
                throw ConfigError("length band must satisfy 1 <= lo <= hi");
            if (b.probability < 0)
                throw ConfigError("length band probability must be non-negative");
            total += b.probability;
        }
        if (total != 1)
            throw ConfigError("length band probabilities sum to " + to_string(total) + ", expected 1");
        auto sorted = bands_;
        std::sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) { return a.lo < b.lo; });
        for (std::size_t i = 1; i < sorted.size(); ++i)
            if (sorted[i].lo <= sorted[i - 1].hi)
                throw ConfigError("length bands overlap");
    }

    std::vector<LengthBand> bands_;
    std::vector<double> cumulative_;
};

/// Arrival law of one VM type. Rates are system-wide expected work units
/// per slot.
struct TypeArrivals {
    Rational genuine_rate;
    Rational malicious_rate;
    LengthDistribution lengths;
};

struct ArrivalSpec {
    std::vector<TypeArrivals> types;
    std::int64_t n_servers = 1;

    std::size_t type_count() const { return types.size(); }

    Rational total_rate(std::size_t j) const { return types[j].genuine_rate + types[j].malicious_rate; }
    Rational per_server_genuine(std::size_t j) const { return types[j].genuine_rate / Rational(n_servers); }
    Rational per_server_malicious(std::size_t j) const { return types[j].malicious_rate / Rational(n_servers); }

    /// lambda / (lambda + kappa); undefined for a dead type.
    Rational genuine_fraction(std::size_t j) const {
        const Rational total = total_rate(j);
        if (total == 0)
            throw ContractViolation("genuine fraction of a type with no traffic");
        return types[j].genuine_rate / total;
    }

    void validate() const {
        if (n_servers < 1)
            throw ConfigError("need at least one server");
        for (const auto& t : types)
            if (t.genuine_rate < 0 || t.malicious_rate < 0)
                throw ConfigError("arrival rates must be non-negative");
    }
};

enum class Truth { Genuine, Malicious };
enum class ScanStatus { NoScan, PendingScan, ScannedGenuine };

class Job;

/// Passkey for reading a job's hidden label. Only the scan operation,
/// metrics, rate estimation and verification harnesses construct one.
class TruthKey {
    TruthKey() = default;
    friend class TypeQueue;
    friend class MetricsCollector;
    friend struct TruthInspector;
};

class Job {
public:
    Job() = default;
    Job(std::int64_t id, std::size_t type, std::int64_t length, Truth truth, std::int64_t arrival_slot)
        : id(id), type(type), length(length), arrival_slot(arrival_slot), remaining(length), truth_(truth) {}

    std::int64_t id = 0;
    std::size_t type = 0;
    std::int64_t length = 1;
    std::int64_t arrival_slot = 0;
    std::int64_t remaining = 1;
    ScanStatus scan_status = ScanStatus::NoScan;

    Truth truth(TruthKey) const { return truth_; }

private:
    Truth truth_ = Truth::Genuine;
};

/// Reads hidden labels for tests, oracles and the adaptive scan log.
struct TruthInspector {
    static Truth truth(const Job& job) { return job.truth(TruthKey{}); }
};

/// Simultaneously runnable jobs per type on one server (or n servers).
struct Configuration {
    std::vector<int> counts;

    std::size_t size() const { return counts.size(); }
    int operator[](std::size_t j) const { return counts[j]; }
    auto operator<=>(const Configuration&) const = default;
};

/// Whether config's summed demands fit inside capacity in every resource.
inline bool job_fits(const Configuration& config, const std::vector<VMTypeSpec>& demands, const ResourceVector& capacity) {
    if (config.size() != demands.size())
        throw ContractViolation("configuration has " + std::to_string(config.size()) + " types, demands have " + std::to_string(demands.size()));
    for (std::size_t r = 0; r < capacity.size(); ++r) {
        Rational used = 0;
        for (std::size_t j = 0; j < demands.size(); ++j) {
            if (demands[j].demand.size() != capacity.size())
                throw ContractViolation("demand and capacity dimension differ");
            used += demands[j].demand.amounts[r] * config[j];
        }
        if (used > capacity.amounts[r])
            return false;
    }
    return true;
}

} // namespace robustwork
