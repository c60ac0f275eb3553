// Copyright 2026 The qwalk Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

/**
 * @file
 * Chebyshev expansion of f(x) = (1 - (1 - x^2)^b) / x, which approximates
 * 1/x on [-1, -1/kappa] and [1/kappa, 1]:
 *
 *     f(x) = sum_j a_j T_{2j+1}(x),  a_j = 4 (-1)^j P[X >= b + j + 1],
 *
 * with X ~ Binomial(2b, 1/2). The tail probabilities are summed in log
 * space since b reaches 10^5 and more for realistic condition numbers.
 */

#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "qwalk/error.hpp"

namespace qwalk {

struct ChebyshevPlan {
    double kappa = 1.0;
    double epsilon = 0.0;
    std::uint64_t b = 1;
    std::uint64_t j0 = 0;
    std::vector<double> coeffs;  ///< a_0 .. a_{j0}
};

/// P[X >= m] for X ~ Binomial(n, 1/2).
inline double binomialUpperTail(std::uint64_t n, std::uint64_t m) {
    if (m == 0) return 1.0;
    if (m > n) return 0.0;
    const double dn = static_cast<double>(n);
    const double dm = static_cast<double>(m);
    // log of the leading term C(n, m) / 2^n; later terms follow by ratio.
    double term = std::exp(std::lgamma(dn + 1) - std::lgamma(dm + 1) - std::lgamma(dn - dm + 1) - dn * std::log(2.0));
    double sum = 0.0;
    for (std::uint64_t i = m; i <= n; ++i) {
        sum += term;
        if (term < 1e-18 * sum || term == 0.0) break;
        term *= static_cast<double>(n - i) / static_cast<double>(i + 1);
    }
    return sum;
}

inline std::vector<double> chebyshevCoefficients(std::uint64_t b, std::uint64_t count) {
    std::vector<double> a(count);
    for (std::uint64_t j = 0; j < count; ++j) {
        const double tail = binomialUpperTail(2 * b, b + j + 1);
        a[j] = (j % 2 == 0 ? 4.0 : -4.0) * tail;
    }
    return a;
}

/// j0 = ceil(sqrt(b ln(4b/eps))), capped at b - 1 where the series ends.
inline std::uint64_t truncationOrder(std::uint64_t b, double epsilon) {
    const double bd = static_cast<double>(b);
    const auto j0 = static_cast<std::uint64_t>(std::ceil(std::sqrt(bd * std::log(4.0 * bd / epsilon))));
    return std::min(j0, b - 1);
}

/// Plan with an explicit b, bypassing the kappa formula.
inline ChebyshevPlan chebyshevPlanForB(std::uint64_t b, double epsilon) {
    if (b < 1) throw Error(Errc::InvalidArgument, "b must be at least 1");
    if (!(epsilon > 0.0 && epsilon < 1.0)) throw Error(Errc::InvalidArgument, "epsilon must lie in (0, 1)");
    ChebyshevPlan p;
    p.epsilon = epsilon;
    p.b = b;
    p.j0 = truncationOrder(b, epsilon);
    p.coeffs = chebyshevCoefficients(b, p.j0 + 1);
    return p;
}

/// b = ceil(kappa^2 ln(kappa/eps)), natural logarithms throughout.
inline ChebyshevPlan chebyshevPlan(double kappa, double epsilon) {
    if (!(kappa >= 1.0) || !std::isfinite(kappa)) throw Error(Errc::InvalidArgument, "kappa must be >= 1");
    if (!(epsilon > 0.0 && epsilon < 1.0)) throw Error(Errc::InvalidArgument, "epsilon must lie in (0, 1)");
    const double raw = std::ceil(kappa * kappa * std::log(kappa / epsilon));
    if (raw > 1e15) throw Error(Errc::InvalidArgument, "kappa too large for a Chebyshev plan");
    ChebyshevPlan p = chebyshevPlanForB(std::max<std::uint64_t>(1, static_cast<std::uint64_t>(raw)), epsilon);
    p.kappa = kappa;
    return p;
}

/// f(x) = (1 - (1 - x^2)^b) / x, with f(0) = 0.
inline double inverseApproximation(double x, std::uint64_t b) {
    if (x == 0.0) return 0.0;
    return (1.0 - std::pow(1.0 - x * x, static_cast<double>(b))) / x;
}

}  // namespace qwalk
