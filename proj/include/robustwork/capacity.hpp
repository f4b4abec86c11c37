#pragma once

#include "domain.hpp"
#include "lp.hpp"

#include <optional>
#include <vector>

namespace robustwork {

/// The maximal per-server configurations; their convex hull (together with
/// downward closure) is the capacity region. `servers` scales the region
/// for a pool of identical servers.
struct FeasibleSet {
    std::vector<Configuration> maximal_configs;
    std::size_t j_count = 0;
    std::int64_t servers = 1;
};

/// Outcome of a capacity-region membership test.
struct RegionVerdict {
    /// a lies in co(S) (boundary included).
    bool inside = false;
    /// Largest eps with (1 + eps) a in co(S); empty when unbounded (a == 0).
    std::optional<Rational> margin;
    /// Convex weights over maximal_configs dominating a; empty when outside.
    std::vector<Rational> witness;

    bool unbounded() const { return !margin.has_value(); }
    /// Strict interior: the stability condition.
    bool strictly_inside() const { return inside && (unbounded() || *margin > 0); }
};

namespace detail {

inline bool can_add(const std::vector<Rational>& used, const VMTypeSpec& type, const ResourceVector& capacity) {
    for (std::size_t r = 0; r < capacity.size(); ++r)
        if (used[r] + type.demand.amounts[r] > capacity.amounts[r])
            return false;
    return true;
}

inline void enumerate_dfs(std::size_t j, Configuration& current, std::vector<Rational>& used, const std::vector<VMTypeSpec>& demands,
                          const ResourceVector& capacity, std::vector<Configuration>& out) {
    if (j == demands.size()) {
        // Maximal iff no single extra job of any type still fits.
        for (const auto& type : demands)
            if (can_add(used, type, capacity))
                return;
        out.push_back(current);
        return;
    }
    for (;;) {
        enumerate_dfs(j + 1, current, used, demands, capacity, out);
        if (!can_add(used, demands[j], capacity))
            break;
        ++current.counts[j];
        for (std::size_t r = 0; r < capacity.size(); ++r)
            used[r] += demands[j].demand.amounts[r];
    }
    for (std::size_t r = 0; r < capacity.size(); ++r)
        used[r] -= demands[j].demand.amounts[r] * current.counts[j];
    current.counts[j] = 0;
}

} // namespace detail

/// All maximal feasible per-server configurations in ascending
/// lexicographic order.
inline FeasibleSet enumerate_maximal_configs(const ResourceVector& capacity, const std::vector<VMTypeSpec>& demands) {
    for (const auto& type : demands) {
        if (type.demand.size() != capacity.size())
            throw ContractViolation("VM type '" + type.name + "' has wrong resource dimension");
        bool constrained = false;
        for (std::size_t r = 0; r < capacity.size(); ++r) {
            if (type.demand.amounts[r] < 0)
                throw ConfigError("VM type '" + type.name + "' has a negative demand");
            if (type.demand.amounts[r] > 0)
                constrained = true;
        }
        if (!constrained)
            throw ConfigError("VM type '" + type.name + "' demands nothing; feasible set is unbounded");
    }
    for (const auto& amount : capacity.amounts)
        if (amount < 0)
            throw ConfigError("server capacity must be non-negative");

    FeasibleSet fs;
    fs.j_count = demands.size();
    Configuration current{std::vector<int>(demands.size(), 0)};
    std::vector<Rational> used(capacity.size(), Rational(0));
    detail::enumerate_dfs(0, current, used, demands, capacity, fs.maximal_configs);
    std::sort(fs.maximal_configs.begin(), fs.maximal_configs.end());
    return fs;
}

/// The region of n identical servers: membership(a, system) is
/// membership(a / n, per-server).
inline FeasibleSet system_region(const FeasibleSet& per_server, std::int64_t n) {
    if (n < 1)
        throw ContractViolation("system_region needs n >= 1");
    FeasibleSet out = per_server;
    out.servers = per_server.servers * n;
    return out;
}

/// Exact test of a against co(S), solving
///     max s  s.t.  sum_k mu_k N^(k) >= s a,  sum_k mu_k <= 1,  mu, s >= 0.
/// Since S is downward closed and contains 0, a is inside iff s* >= 1, and
/// the multiplicative margin is s* - 1.
inline RegionVerdict membership(const std::vector<Rational>& a, const FeasibleSet& fs) {
    if (a.size() != fs.j_count)
        throw ContractViolation("arrival vector has " + std::to_string(a.size()) + " types, feasible set has " + std::to_string(fs.j_count));
    for (const auto& v : a)
        if (v < 0)
            throw ContractViolation("arrival vector must be non-negative");

    const std::size_t k_count = fs.maximal_configs.size();
    const std::size_t n = k_count + 1; // mu_1..mu_K, s
    std::vector<std::vector<Rational>> A;
    std::vector<Rational> b;
    for (std::size_t j = 0; j < fs.j_count; ++j) {
        std::vector<Rational> row(n, Rational(0));
        for (std::size_t k = 0; k < k_count; ++k)
            row[k] = -Rational(fs.maximal_configs[k][j]);
        row[k_count] = a[j] / Rational(fs.servers);
        A.push_back(std::move(row));
        b.emplace_back(0);
    }
    std::vector<Rational> mass(n, Rational(1));
    mass[k_count] = 0;
    A.push_back(std::move(mass));
    b.emplace_back(1);
    std::vector<Rational> c(n, Rational(0));
    c[k_count] = 1;

    RegionVerdict verdict;
    const auto sol = lp::maximize(A, b, c);
    if (sol.status == lp::Status::Unbounded) {
        verdict.inside = true;
        verdict.witness.assign(k_count, Rational(0));
        if (k_count > 0)
            verdict.witness[0] = 1;
        return verdict;
    }
    const Rational s = sol.objective;
    verdict.margin = s - 1;
    verdict.inside = s >= 1;
    if (verdict.inside) {
        Rational total = 0;
        for (std::size_t k = 0; k < k_count; ++k)
            total += sol.x[k];
        verdict.witness.assign(sol.x.begin(), sol.x.begin() + static_cast<std::ptrdiff_t>(k_count));
        for (auto& w : verdict.witness)
            w /= total;
    }
    return verdict;
}

} // namespace robustwork
