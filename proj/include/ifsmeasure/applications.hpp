#pragma once

#include "estimator.hpp"
#include "observable.hpp"
#include "trace.hpp"

#include <map>
#include <numeric>
#include <span>
#include <vector>

namespace ifsmeasure {

struct IntegrateOptions {
    Enumeration mode = Enumeration::classes;
    unsigned workers = 1;
};

/// mu_1(g) .. mu_k(g) for several observables, sharing one orbit computation.
inline std::vector<EstimateSeries> integrate_many(const ValidatedSystem& sys, std::span<const Observable> observables,
                                                  std::size_t k, const IntegrateOptions& opts = {}) {
    if (k < 1) throw std::invalid_argument("integrate: k must be positive");
    const auto levels = compute_orbits(sys, k, opts.mode, opts.workers);
    const auto tables = trace_tables(levels, sys.weights(), observables, opts.workers);
    std::vector<EstimateSeries> out;
    out.reserve(tables.size());
    for (std::size_t i = 0; i < tables.size(); ++i)
        out.push_back(estimate(coeffs_recursive(tables[i]), observables[i].label(), sys.context()));
    return out;
}

inline EstimateSeries integrate(const ValidatedSystem& sys, const Observable& g, std::size_t k,
                                const IntegrateOptions& opts = {}) {
    return integrate_many(sys, std::span<const Observable>(&g, 1), k, opts).front();
}

/// Hausdorff moments gamma_0..gamma_M.
struct MomentVector {
    std::size_t order = 0;
    std::vector<BigReal> values;
    std::vector<EstimateSeries> series;
};

inline MomentVector moments(const ValidatedSystem& sys, std::size_t order, std::size_t k,
                            const IntegrateOptions& opts = {}) {
    MomentVector out;
    out.order = order;
    out.values.push_back(BigReal(1));
    if (order == 0) return out;
    std::vector<Observable> monomials;
    for (std::size_t n = 1; n <= order; ++n) monomials.push_back(Observable::monomial(n));
    out.series = integrate_many(sys, monomials, k, opts);
    for (const auto& s : out.series) out.values.push_back(s.last());
    return out;
}

namespace detail {

struct ExactAffine {
    std::vector<Rational> ratio, offset;
};

inline ExactAffine exact_affine_maps(const IFSConfig& ifs) {
    ExactAffine out;
    for (std::size_t i = 0; i < ifs.maps.size(); ++i) {
        const auto* f = std::get_if<Affine>(&ifs.maps[i].form);
        if (!f) throw unsupported_error("exact affine oracle: map " + std::to_string(i + 1) + " is not affine");
        if (!f->ratio.exact() || !f->offset.exact())
            throw unsupported_error("exact affine oracle: map " + std::to_string(i + 1) + " is not rational");
        out.ratio.push_back(*f->ratio.exact());
        out.offset.push_back(*f->offset.exact());
    }
    return out;
}

inline std::vector<Rational> exact_weights(const WeightSpec& w) {
    if (!w.is_constant()) throw unsupported_error("exact affine oracle: weights must be constant");
    std::vector<Rational> out;
    for (const auto& p : w.constants()) {
        if (!p.exact()) throw unsupported_error("exact affine oracle: weights must be rational");
        out.push_back(*p.exact());
    }
    return out;
}

inline Rational rational_pow(const Rational& x, std::size_t n) {
    Rational r = 1;
    for (std::size_t i = 0; i < n; ++i) r *= x;
    return r;
}

}  // namespace detail

/// Exact moments of an affine system with rational data:
///   gamma_n = sum_{i<n} C(n,i) gamma_i sum_j p_j rho_j^i t_j^{n-i} / (1 - sum_j p_j rho_j^n).
inline std::vector<Rational> moments_oracle_affine(const IFSConfig& ifs, std::size_t order) {
    const auto maps = detail::exact_affine_maps(ifs);
    const auto p = detail::exact_weights(ifs.weights);
    if (p.size() != maps.ratio.size()) throw unsupported_error("exact affine oracle: weight count mismatch");
    if (!check_nonoverlap(ifs, 1)) throw unsupported_error("exact affine oracle: maps overlap at level 1");

    std::vector<Rational> gamma{Rational(1)};
    for (std::size_t n = 1; n <= order; ++n) {
        Rational num = 0;
        BigInt binom = 1;
        for (std::size_t i = 0; i < n; ++i) {
            if (i > 0) binom = binom * (n - i + 1) / i;
            Rational inner = 0;
            for (std::size_t j = 0; j < p.size(); ++j)
                inner += p[j] * detail::rational_pow(maps.ratio[j], i) * detail::rational_pow(maps.offset[j], n - i);
            num += Rational(binom) * gamma[i] * inner;
        }
        Rational den = 1;
        for (std::size_t j = 0; j < p.size(); ++j) den -= p[j] * detail::rational_pow(maps.ratio[j], n);
        gamma.push_back(num / den);
    }
    return gamma;
}

struct WassersteinResult {
    BigReal value{0};
    bool sign_condition_ok = false;
    /// w_j = |mu_j^(p)(x) - mu_j^(q)(x)|, j = 1..k.
    std::vector<std::optional<BigReal>> per_k;
    EstimateSeries p_series;
    EstimateSeries q_series;
};

namespace detail {

/// Map indices ordered by the position of their level-1 cylinder.
inline std::vector<std::size_t> left_to_right(const IFSConfig& ifs) {
    std::vector<std::size_t> order(ifs.maps.size());
    std::iota(order.begin(), order.end(), 0);
    std::vector<BigReal> left;
    for (const auto& m : ifs.maps) left.push_back(eval_map(m, BigReal(0)));
    std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return left[a] < left[b]; });
    return order;
}

/// Partial sums sum_{j<=i} (p_j - q_j), in cylinder order, never change sign.
inline bool partial_sums_keep_sign(const IFSConfig& ifs, const WeightSpec& p, const WeightSpec& q) {
    if (!p.is_constant() || !q.is_constant()) throw unsupported_error("wasserstein: weights must be constant");
    const auto order = left_to_right(ifs);
    const BigReal tol = pow(BigReal(10), -static_cast<long>(BigReal::default_precision()) + 5);
    bool has_pos = false, has_neg = false;
    Rational exact = 0;
    BigReal approx = 0;
    bool all_exact = true;
    for (auto i : order) {
        const auto& pi = p.constants()[i];
        const auto& qi = q.constants()[i];
        if (pi.exact() && qi.exact())
            exact += *pi.exact() - *qi.exact();
        else
            all_exact = false;
        approx += pi.value() - qi.value();
        const int s = all_exact ? (exact > 0 ? 1 : (exact < 0 ? -1 : 0))
                                : (approx > tol ? 1 : (approx < -tol ? -1 : 0));
        has_pos = has_pos || s > 0;
        has_neg = has_neg || s < 0;
    }
    return !(has_pos && has_neg);
}

inline void require_wasserstein_hypotheses(const IFSConfig& ifs) {
    if (!ifs.second_weights) throw config_error("wasserstein: second weight vector q is missing");
    for (std::size_t i = 0; i < ifs.maps.size(); ++i)
        if (derivative_sign(ifs.maps[i], 256) <= 0)
            throw unsupported_error("wasserstein: map " + std::to_string(i + 1) +
                                    " does not have a positive derivative on [0,1]");
    if (!check_nonoverlap(ifs, 1)) throw unsupported_error("wasserstein: maps overlap at level 1");
}

}  // namespace detail

/// W_1 between the stationary measures for weights p and q on the same maps,
/// as the distance between first moments. Refuses when the partial-sum sign
/// condition fails, since the first-moment formula is then unavailable.
inline WassersteinResult wasserstein(const ValidatedSystem& sys, std::size_t k, const IntegrateOptions& opts = {}) {
    const auto& ifs = sys.config();
    detail::require_wasserstein_hypotheses(ifs);
    WassersteinResult out;
    out.sign_condition_ok = detail::partial_sums_keep_sign(ifs, ifs.weights, *ifs.second_weights);
    if (!out.sign_condition_ok)
        throw validation_error(
            "wasserstein: partial sums of p - q change sign; the first-moment formula for W1 does not apply");
    const auto q_sys = sys.with_weights(*ifs.second_weights);

    const auto levels = compute_orbits(sys, k, opts.mode, opts.workers);
    const Observable x = Observable::monomial(1);
    const std::span<const Observable> gs(&x, 1);
    out.p_series = estimate(coeffs_recursive(trace_tables(levels, sys.weights(), gs, opts.workers).front()), "x (p)",
                            sys.context());
    out.q_series = estimate(coeffs_recursive(trace_tables(levels, q_sys.weights(), gs, opts.workers).front()),
                            "x (q)", sys.context());
    for (std::size_t j = 0; j < k; ++j) {
        const auto& a = out.p_series.values[j];
        const auto& b = out.q_series.values[j];
        if (a && b)
            out.per_k.emplace_back(BigReal(abs(*a - *b)));
        else
            out.per_k.emplace_back(std::nullopt);
    }
    for (auto it = out.per_k.rbegin(); it != out.per_k.rend(); ++it) {
        if (*it) {
            out.value = **it;
            return out;
        }
    }
    throw numeric_error("wasserstein: no approximant available");
}

/// |sum p_i t_i / (1 - sum p_i rho_i) - sum q_i t_i / (1 - sum q_i rho_i)|
inline Rational wasserstein_oracle_affine(const IFSConfig& ifs) {
    detail::require_wasserstein_hypotheses(ifs);
    const auto maps = detail::exact_affine_maps(ifs);
    const auto p = detail::exact_weights(ifs.weights);
    const auto q = detail::exact_weights(*ifs.second_weights);
    if (!detail::partial_sums_keep_sign(ifs, ifs.weights, *ifs.second_weights))
        throw validation_error("wasserstein: partial sums of p - q change sign");
    auto mean = [&](const std::vector<Rational>& w) {
        Rational num = 0, den = 1;
        for (std::size_t i = 0; i < w.size(); ++i) {
            num += w[i] * maps.offset[i];
            den -= w[i] * maps.ratio[i];
        }
        return Rational(num / den);
    };
    const Rational d = mean(p) - mean(q);
    return d < 0 ? Rational(-d) : d;
}

/// Lyapunov exponent -int sum_i p_i log|phi_i'| dmu.
inline EstimateSeries lyapunov(const ValidatedSystem& sys, std::size_t k, const IntegrateOptions& opts = {}) {
    return integrate(sys, Observable::lyapunov(sys), k, opts);
}

/// int g dmu for g given piecewise on the level-K cylinders, via
/// int g dmu = sum_{|w|=K} p_w int g o phi_w dmu.
inline BigReal integrate_piecewise(const ValidatedSystem& sys, std::size_t level,
                                   const std::map<Word, Observable>& pieces, std::size_t k,
                                   const IntegrateOptions& opts = {}) {
    if (!sys.weights().is_constant()) throw unsupported_error("piecewise integration needs constant weights");
    if (!check_nonoverlap(sys.config(), static_cast<int>(level)))
        throw validation_error("piecewise integration: cylinders overlap at level " + std::to_string(level));
    const auto words = all_words(sys.size(), level);
    std::vector<Observable> composed;
    std::vector<BigReal> word_weights;
    for (const auto& w : words) {
        auto it = pieces.find(w);
        if (it == pieces.end()) throw config_error("piecewise integration: no piece for cylinder " + w.str());
        composed.push_back(Observable::cylinder(it->second, w, sys.maps()));
        BigReal pw = 1;
        for (std::size_t j = 0; j < w.size(); ++j) pw *= sys.weights().constants()[w[j]].value();
        word_weights.push_back(std::move(pw));
    }
    const auto series = integrate_many(sys, composed, k, opts);
    std::vector<BigReal> terms;
    for (std::size_t i = 0; i < series.size(); ++i) terms.push_back(word_weights[i] * series[i].last());
    return pairwise_sum(terms);
}

inline constexpr double kDefaultOracleBudget = 1 << 26;

/// sum_{|w|=n} p_w(x0) g(phi_w(x0)), the push-forward of delta_{x0} after n
/// steps. Depth-first so each prefix image is computed once.
inline BigReal iterate_oracle(const ValidatedSystem& sys, const Observable& g, std::size_t n, const BigReal& x0,
                              double budget = kDefaultOracleBudget) {
    if (n < 1) throw std::invalid_argument("iterate_oracle: depth must be positive");
    if (x0 < 0 || x0 > 1) throw std::invalid_argument("iterate_oracle: x0 must lie in [0,1]");
    const std::size_t N = sys.size();
    if (std::pow(static_cast<double>(N), static_cast<double>(n)) > budget)
        throw numeric_error("iterate_oracle: " + std::to_string(N) + "^" + std::to_string(n) +
                            " words exceed the evaluation budget");
    const auto& maps = sys.maps();
    const auto& weights = sys.weights();

    // points[d], mass[d]: image and accumulated weight after d map applications.
    std::vector<BigReal> points(n + 1), mass(n + 1);
    std::vector<std::size_t> choice(n + 1, 0);
    points[0] = x0;
    mass[0] = 1;
    BigReal total = 0;
    std::size_t depth = 0;
    while (true) {
        if (depth == n) {
            total += mass[n] * g(points[n]);
            --depth;
            continue;
        }
        if (choice[depth] == N) {
            if (depth == 0) break;
            --depth;
            continue;
        }
        const std::size_t i = choice[depth]++;
        mass[depth + 1] = mass[depth] * weights.at(i, points[depth]);
        points[depth + 1] = eval_map(maps[i], points[depth]);
        ++depth;
        choice[depth] = 0;
    }
    return total;
}

}  // namespace ifsmeasure
