#pragma once

#include "rational.hpp"

#include <cstddef>
#include <vector>

namespace robustwork::lp {

enum class Status { Optimal, Unbounded };

struct Solution {
    Status status = Status::Optimal;
    Rational objective;
    std::vector<Rational> x;
};

/// Exact primal simplex for
///     maximize c.x  subject to  A x <= b,  x >= 0
/// with b >= 0, so the origin is a feasible starting basis. Bland's rule
/// guarantees termination on degenerate problems.
inline Solution maximize(const std::vector<std::vector<Rational>>& A, const std::vector<Rational>& b, const std::vector<Rational>& c) {
    const std::size_t m = A.size();
    const std::size_t n = c.size();
    for (std::size_t i = 0; i < m; ++i) {
        if (A[i].size() != n)
            throw ContractViolation("lp: row width differs from objective width");
        if (b[i] < 0)
            throw ContractViolation("lp: right-hand side must be non-negative");
    }

    // Tableau rows 0..m-1 are constraints over n structural + m slack
    // columns; last column is the rhs.
    const std::size_t width = n + m + 1;
    std::vector<std::vector<Rational>> t(m, std::vector<Rational>(width));
    std::vector<Rational> reduced(width);
    std::vector<std::size_t> basis(m);
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t k = 0; k < n; ++k)
            t[i][k] = A[i][k];
        t[i][n + i] = 1;
        t[i][width - 1] = b[i];
        basis[i] = n + i;
    }
    // reduced[k] = c_B B^-1 A_k - c_k; entering column has reduced < 0.
    for (std::size_t k = 0; k < n; ++k)
        reduced[k] = -c[k];

    for (;;) {
        std::size_t enter = width;
        for (std::size_t k = 0; k + 1 < width; ++k)
            if (reduced[k] < 0) {
                enter = k;
                break;
            }
        if (enter == width)
            break;

        std::size_t leave = m;
        Rational best_ratio;
        for (std::size_t i = 0; i < m; ++i) {
            if (t[i][enter] <= 0)
                continue;
            Rational ratio = t[i][width - 1] / t[i][enter];
            if (leave == m || ratio < best_ratio || (ratio == best_ratio && basis[i] < basis[leave])) {
                leave = i;
                best_ratio = ratio;
            }
        }
        if (leave == m)
            return {Status::Unbounded, {}, {}};

        const Rational pivot = t[leave][enter];
        for (auto& v : t[leave])
            v /= pivot;
        for (std::size_t i = 0; i < m; ++i) {
            if (i == leave || t[i][enter] == 0)
                continue;
            const Rational f = t[i][enter];
            for (std::size_t k = 0; k < width; ++k)
                t[i][k] -= f * t[leave][k];
        }
        if (reduced[enter] != 0) {
            const Rational f = reduced[enter];
            for (std::size_t k = 0; k < width; ++k)
                reduced[k] -= f * t[leave][k];
        }
        basis[leave] = enter;
    }

    Solution sol;
    sol.objective = reduced[width - 1];
    sol.x.assign(n, Rational(0));
    for (std::size_t i = 0; i < m; ++i)
        if (basis[i] < n)
            sol.x[basis[i]] = t[i][width - 1];
    return sol;
}

} // namespace robustwork::lp
