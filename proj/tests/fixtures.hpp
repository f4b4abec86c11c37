#pragma once

#include <robustwork/robustwork.hpp>

#include <string>
#include <vector>

namespace fixtures {

namespace rw = robustwork;
using rw::Rational;

inline rw::ResourceVector ec2_capacity() { return {{Rational(30), Rational(30), Rational(4000)}}; }

inline std::vector<rw::VMTypeSpec> ec2_types() {
    return {{"standard", {{Rational(15), Rational(8), Rational(1690)}}},
            {"high_memory", {{Rational(171, 10), Rational(13, 2), Rational(420)}}},
            {"high_cpu", {{Rational(7), Rational(20), Rational(1690)}}}};
}

inline rw::LengthDistribution ec2_lengths() {
    return rw::LengthDistribution({{Rational(7, 10), 1, 50}, {Rational(3, 20), 251, 300}, {Rational(3, 20), 451, 500}});
}

/// Per-server genuine 0.99 (1, 1/3, 2/3), malicious (0.7, 0.01, 0.01), on n servers.
inline rw::ArrivalSpec ec2_spec(std::int64_t n = 100, bool malicious = true) {
    rw::ArrivalSpec spec;
    spec.n_servers = n;
    const Rational g[3] = {Rational(99, 100), Rational(33, 100), Rational(66, 100)};
    const Rational m[3] = {Rational(7, 10), Rational(1, 100), Rational(1, 100)};
    for (int j = 0; j < 3; ++j)
        spec.types.push_back({g[j] * n, malicious ? m[j] * n : Rational(0), ec2_lengths()});
    return spec;
}

inline rw::FeasibleSet ec2_fs() { return rw::enumerate_maximal_configs(ec2_capacity(), ec2_types()); }

inline rw::Job job(std::int64_t id, std::size_t type, std::int64_t length, bool genuine = true, std::int64_t arrival = 0) {
    return rw::Job(id, type, length, genuine ? rw::Truth::Genuine : rw::Truth::Malicious, arrival);
}

inline std::string scenario_path(const std::string& name) { return std::string(ROBUSTWORK_SCENARIO_DIR) + "/" + name; }

} // namespace fixtures
