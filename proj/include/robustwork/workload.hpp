#pragma once

#include "domain.hpp"
#include "rng.hpp"

#include <cstdint>
#include <vector>

namespace robustwork {

/// Per-slot job source: on every server, for every type and class, one
/// Bernoulli trial with success probability (per-server rate) / E[l].
/// Identical seed and spec give identical job sequences.
class WorkloadGenerator {
public:
    WorkloadGenerator(ArrivalSpec spec, std::uint64_t seed)
        : spec_(std::move(spec)), rng_(seed, StreamId::Arrivals) {
        spec_.validate();
        for (std::size_t j = 0; j < spec_.type_count(); ++j) {
            const Rational mean = spec_.types[j].lengths.mean_length();
            const Rational rates[2] = {spec_.per_server_genuine(j), spec_.per_server_malicious(j)};
            for (const auto& rate : rates) {
                const Rational p = rate / mean;
                if (p > 1)
                    throw ConfigError("type " + std::to_string(j) + ": per-server job probability " + to_string(p) + " exceeds 1");
                probability_.push_back(to_double(p));
            }
        }
    }

    const ArrivalSpec& spec() const { return spec_; }

    /// Appends this slot's arrivals to out.
    void slot_arrivals(std::int64_t slot, std::vector<Job>& out) {
        const std::size_t types = spec_.type_count();
        for (std::int64_t server = 0; server < spec_.n_servers; ++server) {
            for (std::size_t j = 0; j < types; ++j) {
                for (int c = 0; c < 2; ++c) {
                    const double p = probability_[2 * j + static_cast<std::size_t>(c)];
                    if (p <= 0.0)
                        continue;
                    if (rng_.uniform01() < p) {
                        const auto length = spec_.types[j].lengths.sample(rng_);
                        out.emplace_back(next_id_++, j, length, c == 0 ? Truth::Genuine : Truth::Malicious, slot);
                    }
                }
            }
        }
    }

    std::vector<Job> slot_arrivals(std::int64_t slot) {
        std::vector<Job> out;
        slot_arrivals(slot, out);
        return out;
    }

private:
    ArrivalSpec spec_;
    RandomStream rng_;
    std::vector<double> probability_;
    std::int64_t next_id_ = 0;
};

} // namespace robustwork
