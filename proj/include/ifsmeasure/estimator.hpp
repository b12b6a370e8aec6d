#pragma once

#include "numeric.hpp"
#include "trace.hpp"

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace ifsmeasure {

/// Power-series coefficients a_0..a_k of the determinant and alpha_0..alpha_k
/// of its derivative in the observable direction.
struct CoefficientTable {
    std::size_t k = 0;
    std::vector<BigReal> a;
    std::vector<BigReal> alpha;
};

/// From log det(I - zL) = -sum_m t_m z^m / m:
///   a_n     = -(1/n) sum_{m=1..n} t_m a_{n-m}
///   alpha_n = -sum_{m=1..n} (tau_m / m) a_{n-m}
/// O(k^2).
inline CoefficientTable coeffs_recursive(const TraceTable& traces) {
    const std::size_t k = traces.k;
    if (traces.t.size() != k || traces.tau.size() != k)
        throw std::invalid_argument("coeffs_recursive: trace table is incomplete");
    CoefficientTable c;
    c.k = k;
    c.a.assign(k + 1, BigReal(0));
    c.alpha.assign(k + 1, BigReal(0));
    c.a[0] = 1;
    for (std::size_t n = 1; n <= k; ++n) {
        BigReal sa = 0;
        BigReal salpha = 0;
        for (std::size_t m = 1; m <= n; ++m) {
            sa += traces.t[m - 1] * c.a[n - m];
            salpha += traces.tau[m - 1] / m * c.a[n - m];
        }
        c.a[n] = -sa / n;
        c.alpha[n] = -salpha;
    }
    return c;
}

/// (a_n, alpha_n) by literal enumeration of the ordered compositions
/// n = n_1 + ... + n_l. Cost grows like 2^n; meant as a cross-check.
inline std::pair<BigReal, BigReal> coeffs_direct(const TraceTable& traces, std::size_t n) {
    if (n > traces.k) throw std::invalid_argument("coeffs_direct: n exceeds trace table length");
    if (n == 0) return {BigReal(1), BigReal(0)};
    if (n > 24) throw std::invalid_argument("coeffs_direct: n too large for composition enumeration");

    // Indexed by the number of parts l.
    std::vector<BigReal> a_by_parts(n + 1, BigReal(0));
    std::vector<BigReal> alpha_by_parts(n + 1, BigReal(0));
    std::vector<std::size_t> parts;
    // Bit j of `cuts` set means a part boundary after position j+1.
    const unsigned long compositions = 1UL << (n - 1);
    for (unsigned long cuts = 0; cuts < compositions; ++cuts) {
        parts.clear();
        std::size_t len = 1;
        for (std::size_t j = 0; j + 1 < n; ++j) {
            if (cuts & (1UL << j)) {
                parts.push_back(len);
                len = 1;
            } else {
                ++len;
            }
        }
        parts.push_back(len);

        BigReal product = 1;
        for (auto p : parts) product *= traces.t[p - 1] / p;
        BigReal derivative = 0;
        for (std::size_t j = 0; j < parts.size(); ++j) {
            BigReal term = traces.tau[parts[j] - 1] / parts[j];
            for (std::size_t m = 0; m < parts.size(); ++m)
                if (m != j) term *= traces.t[parts[m] - 1] / parts[m];
            derivative += term;
        }
        a_by_parts[parts.size()] += product;
        alpha_by_parts[parts.size()] += derivative;
    }

    BigReal a = 0;
    BigReal alpha = 0;
    BigReal factorial = 1;
    for (std::size_t l = 1; l <= n; ++l) {
        factorial *= l;
        const BigReal sign = (l % 2) ? -1 : 1;
        a += sign / factorial * a_by_parts[l];
        alpha += sign / factorial * alpha_by_parts[l];
    }
    return {a, alpha};
}

/// Approximants mu_j = (sum_{n<=j} alpha_n) / (sum_{n<=j} n a_n), j = 1..k.
struct EstimateSeries {
    std::string label;
    /// values[j-1] = mu_j, or nullopt when the denominator is numerically zero.
    std::vector<std::optional<BigReal>> values;
    /// Leading digits mu_j shares with mu_{j-1}; 0 for j = 1.
    std::vector<int> stable_digits;
    std::vector<BigReal> denominators;

    std::size_t k() const noexcept { return values.size(); }
    /// The last available approximant.
    const BigReal& last() const {
        for (auto it = values.rbegin(); it != values.rend(); ++it)
            if (*it) return **it;
        throw numeric_error("no approximant available for " + label);
    }
    const BigReal& at(std::size_t j) const {
        if (j < 1 || j > values.size() || !values[j - 1])
            throw numeric_error("approximant k=" + std::to_string(j) + " unavailable for " + label);
        return *values[j - 1];
    }
};

inline EstimateSeries estimate(const CoefficientTable& coeffs, std::string g_label, const PrecisionContext& ctx) {
    EstimateSeries s;
    s.label = std::move(g_label);
    const BigReal floor = ctx.pow10_neg(ctx.digits() - ctx.guard());
    BigReal num = coeffs.alpha[0];
    BigReal den = 0;
    std::optional<BigReal> previous;
    for (std::size_t j = 1; j <= coeffs.k; ++j) {
        num += coeffs.alpha[j];
        den += BigReal(j) * coeffs.a[j];
        s.denominators.push_back(den);
        if (abs(den) < floor) {
            s.values.emplace_back(std::nullopt);
            s.stable_digits.push_back(0);
            continue;
        }
        BigReal mu = num / den;
        s.stable_digits.push_back(previous ? agreeing_digits(mu, *previous, ctx.digits()) : 0);
        previous = mu;
        s.values.emplace_back(std::move(mu));
    }
    return s;
}

}  // namespace ifsmeasure
