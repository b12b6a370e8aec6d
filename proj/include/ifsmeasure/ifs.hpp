#pragma once

#include "numeric.hpp"

#include <algorithm>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace ifsmeasure {

/// x -> ratio * x + offset
struct Affine {
    Scalar ratio;
    Scalar offset;
};

/// x -> (a x + b) / (c x + d)
struct Moebius {
    Scalar a, b, c, d;
};

/// x -> amplitude * sin(pi x / 4) + offset
struct SineAffine {
    Scalar amplitude;
    Scalar offset;
};

/// One contraction from the closed catalog. Every member is entire or
/// meromorphic with a known closed-form derivative.
struct MapSpec {
    std::variant<Affine, Moebius, SineAffine> form;

    static MapSpec affine(Scalar ratio, Scalar offset) {
        if (ratio.value() == 0) throw config_error("affine map: ratio must be non-zero");
        return {Affine{std::move(ratio), std::move(offset)}};
    }
    static MapSpec moebius(Scalar a, Scalar b, Scalar c, Scalar d) {
        if (a.value() * d.value() - b.value() * c.value() == 0)
            throw config_error("moebius map: ad - bc must be non-zero");
        return {Moebius{std::move(a), std::move(b), std::move(c), std::move(d)}};
    }
    static MapSpec sine_affine(Scalar amplitude, Scalar offset) {
        return {SineAffine{std::move(amplitude), std::move(offset)}};
    }

    bool is_affine() const noexcept { return std::holds_alternative<Affine>(form); }
};

/// Polynomial with coefficients c0, c1, ..., cd.
struct Polynomial {
    std::vector<Scalar> coeffs;

    template <class T>
    T operator()(const T& x) const {
        if (coeffs.empty()) return T(BigReal(0));
        T acc = T(coeffs.back().value());
        for (auto it = coeffs.rbegin() + 1; it != coeffs.rend(); ++it) acc = acc * x + T(it->value());
        return acc;
    }

    /// Bound on |p'| over [0,1].
    BigReal lipschitz_bound() const {
        BigReal bound = 0;
        for (std::size_t j = 1; j < coeffs.size(); ++j) bound += BigReal(j) * abs(coeffs[j].value());
        return bound;
    }
};

namespace detail {

template <class T>
T map_value(const MapSpec& m, const T& z) {
    return std::visit(
        [&](const auto& f) -> T {
            using F = std::decay_t<decltype(f)>;
            if constexpr (std::is_same_v<F, Affine>) {
                return T(f.ratio.value()) * z + T(f.offset.value());
            } else if constexpr (std::is_same_v<F, Moebius>) {
                const T den = T(f.c.value()) * z + T(f.d.value());
                if (abs(den) == 0) throw domain_error("moebius map evaluated at its pole");
                return (T(f.a.value()) * z + T(f.b.value())) / den;
            } else {
                const T arg = z * T(quarter_pi());
                return T(f.amplitude.value()) * sin(arg) + T(f.offset.value());
            }
        },
        m.form);
}

template <class T>
T map_derivative(const MapSpec& m, const T& z) {
    return std::visit(
        [&](const auto& f) -> T {
            using F = std::decay_t<decltype(f)>;
            if constexpr (std::is_same_v<F, Affine>) {
                return T(f.ratio.value());
            } else if constexpr (std::is_same_v<F, Moebius>) {
                const T den = T(f.c.value()) * z + T(f.d.value());
                if (abs(den) == 0) throw domain_error("moebius map evaluated at its pole");
                const BigReal det = f.a.value() * f.d.value() - f.b.value() * f.c.value();
                return T(det) / (den * den);
            } else {
                return T(BigReal(f.amplitude.value() * quarter_pi())) * cos(z * T(quarter_pi()));
            }
        },
        m.form);
}

}  // namespace detail

inline BigReal eval_map(const MapSpec& m, const BigReal& x) { return detail::map_value(m, x); }
inline BigComplex eval_map(const MapSpec& m, const BigComplex& z) { return detail::map_value(m, z); }
inline BigReal eval_map_derivative(const MapSpec& m, const BigReal& x) { return detail::map_derivative(m, x); }
inline BigComplex eval_map_derivative(const MapSpec& m, const BigComplex& z) {
    return detail::map_derivative(m, z);
}

/// (phi(x), phi'(x)) in one pass; sine maps share one sin/cos evaluation.
inline std::pair<BigReal, BigReal> eval_map_with_derivative(const MapSpec& m, const BigReal& x) {
    if (const auto* f = std::get_if<SineAffine>(&m.form)) {
        const BigReal arg = x * quarter_pi();
        BigReal s, c;
        mpfr_sin_cos(s.backend().data(), c.backend().data(), arg.backend().data(), MPFR_RNDN);
        return {BigReal(f->amplitude.value() * s + f->offset.value()),
                BigReal(f->amplitude.value() * quarter_pi() * c)};
    }
    return {eval_map(m, x), eval_map_derivative(m, x)};
}

/// phi''/phi' in closed form on the real line.
inline BigReal log_derivative_slope(const MapSpec& m, const BigReal& x) {
    return std::visit(
        [&](const auto& f) -> BigReal {
            using F = std::decay_t<decltype(f)>;
            if constexpr (std::is_same_v<F, Affine>) {
                return BigReal(0);
            } else if constexpr (std::is_same_v<F, Moebius>) {
                return BigReal(-2 * f.c.value() / (f.c.value() * x + f.d.value()));
            } else {
                return BigReal(-quarter_pi() * tan(quarter_pi() * x));
            }
        },
        m.form);
}

/// sup |phi'| over [0,1] from the closed form.
inline BigReal derivative_bound(const MapSpec& m) {
    return std::visit(
        [&](const auto& f) -> BigReal {
            using F = std::decay_t<decltype(f)>;
            if constexpr (std::is_same_v<F, Affine>) {
                return abs(f.ratio.value());
            } else if constexpr (std::is_same_v<F, Moebius>) {
                // |cx+d| is affine in x, so its minimum on [0,1] is at an
                // endpoint unless it crosses zero.
                const BigReal at0 = abs(f.d.value());
                const BigReal at1 = abs(f.c.value() + f.d.value());
                const BigReal lo = at0 < at1 ? at0 : at1;
                if (lo == 0 || (f.d.value() > 0) != (f.c.value() + f.d.value() > 0))
                    throw domain_error("moebius pole on [0,1]");
                const BigReal det = abs(f.a.value() * f.d.value() - f.b.value() * f.c.value());
                return BigReal(det / (lo * lo));
            } else {
                return BigReal(abs(f.amplitude.value()) * pi_value() / 4);
            }
        },
        m.form);
}

/// sup |phi''/phi'| over [0,1].
inline BigReal log_derivative_slope_bound(const MapSpec& m) {
    return std::visit(
        [&](const auto& f) -> BigReal {
            using F = std::decay_t<decltype(f)>;
            if constexpr (std::is_same_v<F, Affine>) {
                return BigReal(0);
            } else if constexpr (std::is_same_v<F, Moebius>) {
                const BigReal at0 = abs(f.d.value());
                const BigReal at1 = abs(f.c.value() + f.d.value());
                const BigReal lo = at0 < at1 ? at0 : at1;
                return BigReal(2 * abs(f.c.value()) / lo);
            } else {
                // tan is increasing on [0, pi/4]; tan(pi/4) = 1.
                return BigReal(pi_value() / 4);
            }
        },
        m.form);
}

/// Probability weights: a constant vector or polynomial weight functions.
struct WeightSpec {
    std::variant<std::vector<Scalar>, std::vector<Polynomial>> form;

    static WeightSpec constant(std::vector<Scalar> p) { return {std::move(p)}; }
    static WeightSpec functions(std::vector<Polynomial> p) { return {std::move(p)}; }

    bool is_constant() const noexcept { return form.index() == 0; }
    std::size_t size() const {
        return std::visit([](const auto& v) { return v.size(); }, form);
    }
    const std::vector<Scalar>& constants() const { return std::get<0>(form); }
    const std::vector<Polynomial>& polynomials() const { return std::get<1>(form); }

    /// p_i evaluated at x (x is ignored for constant weights).
    BigReal at(std::size_t i, const BigReal& x) const {
        if (is_constant()) return constants()[i].value();
        return polynomials()[i](x);
    }
};

struct IFSConfig {
    std::vector<MapSpec> maps;
    WeightSpec weights;
    std::optional<WeightSpec> second_weights;
    Scalar epsilon{1, 10};

    std::size_t size() const noexcept { return maps.size(); }
};

struct ValidationReport {
    BigReal contraction_sup{0};
    bool is_contracting = false;
    bool maps_in_unit_interval = true;
    std::optional<int> nonoverlap_level_checked;
    bool nonoverlapping = false;
    bool weight_ok = false;
    /// Largest epsilon in the tested ladder eps, eps/2, eps/4, ... that passed.
    std::optional<BigReal> largest_passing_epsilon;
    std::vector<std::string> messages;

    bool ok() const noexcept { return is_contracting && maps_in_unit_interval && weight_ok; }
};

/// Result of a pass/fail check with the reason for a failure.
struct CheckResult {
    bool ok = true;
    std::string detail;

    explicit operator bool() const noexcept { return ok; }
};

namespace detail {

inline BigReal sampled_derivative_sup(const std::vector<MapSpec>& maps, const BigReal& eps, int samples,
                                      std::vector<std::string>& messages) {
    // Boundary of [-eps, 1+eps] x [-eps, eps], `samples` points per edge.
    const BigReal lo_x = -eps;
    const BigReal hi_x = 1 + eps;
    BigReal sup = 0;
    for (std::size_t i = 0; i < maps.size(); ++i) {
        for (int j = 0; j <= samples; ++j) {
            const BigReal s = BigReal(j) / samples;
            const BigReal x = lo_x + (hi_x - lo_x) * s;
            const BigReal y = -eps + 2 * eps * s;
            const BigComplex pts[4] = {{x, BigReal(-eps)}, {x, eps}, {lo_x, y}, {hi_x, y}};
            for (const auto& z : pts) {
                try {
                    const BigReal v = abs(eval_map_derivative(maps[i], z));
                    if (v > sup) sup = v;
                } catch (const domain_error&) {
                    messages.push_back("map " + std::to_string(i + 1) + " has a pole on the neighbourhood boundary");
                    return BigReal(std::numeric_limits<double>::infinity());
                }
            }
        }
        // A Moebius pole strictly inside the rectangle is invisible on the
        // boundary through the maximum principle, so look for it directly.
        if (const auto* mob = std::get_if<Moebius>(&maps[i].form); mob && mob->c.value() != 0) {
            const BigReal pole = -mob->d.value() / mob->c.value();
            if (pole >= lo_x && pole <= hi_x) {
                messages.push_back("map " + std::to_string(i + 1) + " has a pole inside the neighbourhood");
                return BigReal(std::numeric_limits<double>::infinity());
            }
        }
    }
    return sup;
}

}  // namespace detail

/// Numerical screen for complex contraction: samples |phi_i'| on the boundary
/// of the rectangle [-eps, 1+eps] x [-eps, eps] and checks that every map
/// sends [0,1] into [0,1]. Not a proof.
inline ValidationReport check_contraction(const IFSConfig& ifs, int boundary_samples) {
    if (boundary_samples < 64) throw std::invalid_argument("check_contraction: need at least 64 boundary samples");
    ValidationReport report;
    report.messages.push_back("contraction is screened numerically on the neighbourhood boundary; this is not a proof");

    const BigReal tol = pow(BigReal(10), -static_cast<long>(BigReal::default_precision()) + 5);
    for (std::size_t i = 0; i < ifs.maps.size(); ++i) {
        for (int j = 0; j <= boundary_samples; ++j) {
            const BigReal x = BigReal(j) / boundary_samples;
            BigReal y;
            try {
                y = eval_map(ifs.maps[i], x);
            } catch (const domain_error&) {
                report.maps_in_unit_interval = false;
                report.messages.push_back("map " + std::to_string(i + 1) + " has a pole on [0,1]");
                break;
            }
            if (y < -tol || y > 1 + tol) {
                report.maps_in_unit_interval = false;
                report.messages.push_back("map " + std::to_string(i + 1) + " leaves [0,1] at x = " +
                                          render_digits(x, 6));
                break;
            }
        }
    }

    const BigReal& eps = ifs.epsilon.value();
    report.contraction_sup = detail::sampled_derivative_sup(ifs.maps, eps, boundary_samples, report.messages);
    report.is_contracting = report.contraction_sup < 1;
    if (!report.is_contracting) report.messages.push_back("contraction check failed");

    BigReal trial = eps;
    for (int halvings = 0; halvings < 8; ++halvings, trial /= 2) {
        std::vector<std::string> scratch;
        if (detail::sampled_derivative_sup(ifs.maps, trial, boundary_samples, scratch) < 1) {
            report.largest_passing_epsilon = trial;
            break;
        }
    }
    return report;
}

namespace detail {

inline bool derivative_sign_constant(const MapSpec& m, int samples, int& sign) {
    sign = 0;
    for (int j = 0; j <= samples; ++j) {
        const BigReal d = eval_map_derivative(m, BigReal(BigReal(j) / samples));
        const int s = d > 0 ? 1 : (d < 0 ? -1 : 0);
        if (s == 0) return false;
        if (sign == 0) sign = s;
        if (s != sign) return false;
    }
    return true;
}

}  // namespace detail

/// Sign of phi' on [0,1] (+1 or -1) from sampling, or 0 if it vanishes or
/// changes sign at a sample.
inline int derivative_sign(const MapSpec& m, int samples = 64) {
    int sign = 0;
    return detail::derivative_sign_constant(m, samples, sign) ? sign : 0;
}

/// True iff the level-`level` cylinder intervals phi_w([0,1]) have pairwise
/// disjoint interiors. Touching endpoints are allowed.
inline CheckResult check_nonoverlap(const IFSConfig& ifs, int level) {
    if (level < 1) throw std::invalid_argument("check_nonoverlap: level must be positive");
    for (std::size_t i = 0; i < ifs.maps.size(); ++i)
        if (derivative_sign(ifs.maps[i]) == 0)
            throw unsupported_error("check_nonoverlap: map " + std::to_string(i + 1) + " is not monotone on [0,1]");

    const std::size_t n = ifs.maps.size();
    double count = std::pow(static_cast<double>(n), level);
    if (count > 4e6) throw unsupported_error("check_nonoverlap: too many cylinders at level " + std::to_string(level));

    // Images of both endpoints under every word, built innermost-first.
    std::vector<std::pair<BigReal, BigReal>> ends{{BigReal(0), BigReal(1)}};
    for (int l = 0; l < level; ++l) {
        std::vector<std::pair<BigReal, BigReal>> next;
        next.reserve(ends.size() * n);
        for (const auto& m : ifs.maps)
            for (const auto& [a, b] : ends) next.emplace_back(eval_map(m, a), eval_map(m, b));
        ends = std::move(next);
    }
    std::vector<std::pair<BigReal, BigReal>> intervals;
    intervals.reserve(ends.size());
    for (auto& [a, b] : ends) intervals.emplace_back(a < b ? a : b, a < b ? b : a);
    std::sort(intervals.begin(), intervals.end(), [](const auto& l, const auto& r) { return l.first < r.first; });

    const int digits = static_cast<int>(BigReal::default_precision());
    const BigReal tol = pow(BigReal(10), -digits / 2);
    for (std::size_t j = 1; j < intervals.size(); ++j) {
        if (intervals[j].first < intervals[j - 1].second - tol) {
            return {false, "cylinders overlap near x = " + render_digits(intervals[j].first, 10)};
        }
    }
    return {true, {}};
}

/// Weight validity: constant weights in (0,1) summing to one, or polynomial
/// weight functions summing to one with values in (0,1) at `samples`
/// equispaced points of [0,1].
inline CheckResult check_weights(const WeightSpec& weights, std::size_t map_count, int samples) {
    if (weights.size() != map_count)
        return {false, "expected " + std::to_string(map_count) + " weights, got " + std::to_string(weights.size())};
    const int digits = static_cast<int>(BigReal::default_precision());
    const BigReal tol = pow(BigReal(10), -(digits - 5));
    if (weights.is_constant()) {
        const auto& p = weights.constants();
        bool all_exact = true;
        Rational exact_sum = 0;
        BigReal sum = 0;
        for (std::size_t i = 0; i < p.size(); ++i) {
            if (!(p[i].value() > 0 && p[i].value() < 1))
                return {false, "weight " + std::to_string(i + 1) + " is not in (0,1)"};
            if (p[i].exact())
                exact_sum += *p[i].exact();
            else
                all_exact = false;
            sum += p[i].value();
        }
        if (all_exact ? exact_sum != 1 : abs(sum - 1) > tol)
            return {false, "weights sum to " + (all_exact ? Scalar::rational_text(exact_sum) : render_digits(sum, 20)) +
                               ", not 1"};
        return {true, {}};
    }
    const auto& p = weights.polynomials();
    const int steps = samples < 2 ? 2 : samples;
    for (int j = 0; j < steps; ++j) {
        const BigReal x = BigReal(j) / (steps - 1);
        BigReal sum = 0;
        for (std::size_t i = 0; i < p.size(); ++i) {
            const BigReal v = p[i](x);
            if (!(v > 0 && v < 1))
                return {false, "weight function " + std::to_string(i + 1) + " leaves (0,1) at sample " +
                                   std::to_string(j) + " (x = " + render_digits(x, 6) + ")"};
            sum += v;
        }
        if (abs(sum - 1) > tol)
            return {false, "weight functions do not sum to 1 at sample " + std::to_string(j) + " (x = " +
                               render_digits(x, 6) + ")"};
    }
    return {true, {}};
}

inline CheckResult check_weights(const IFSConfig& ifs, int samples) {
    return check_weights(ifs.weights, ifs.maps.size(), samples);
}

struct ValidationOptions {
    int boundary_samples = 64;
    int weight_samples = 101;
    std::optional<int> nonoverlap_level;
};

/// Full screen: contraction, unit-interval invariance, weights (both weight
/// vectors if a second one is present) and optionally non-overlap.
inline ValidationReport validate(const IFSConfig& ifs, const ValidationOptions& opts = {}) {
    if (ifs.maps.size() < 2) {
        ValidationReport r;
        r.messages.push_back("an iterated function system needs at least two maps");
        return r;
    }
    ValidationReport report = check_contraction(ifs, opts.boundary_samples);
    auto w = check_weights(ifs, opts.weight_samples);
    report.weight_ok = w.ok;
    if (!w.ok) report.messages.push_back("weights: " + w.detail);
    if (ifs.second_weights) {
        auto q = check_weights(*ifs.second_weights, ifs.maps.size(), opts.weight_samples);
        if (!q.ok) {
            report.weight_ok = false;
            report.messages.push_back("second weights: " + q.detail);
        }
    }
    if (opts.nonoverlap_level) {
        report.nonoverlap_level_checked = *opts.nonoverlap_level;
        try {
            auto r = check_nonoverlap(ifs, *opts.nonoverlap_level);
            report.nonoverlapping = r.ok;
            if (!r.ok) report.messages.push_back("non-overlap: " + r.detail);
        } catch (const unsupported_error& e) {
            report.nonoverlapping = false;
            report.messages.push_back(e.what());
        }
    }
    return report;
}

/// An IFS that passed validation, bundled with the precision it was
/// validated at. Downstream computations only accept this type.
class ValidatedSystem {
public:
    ValidatedSystem(IFSConfig config, PrecisionContext ctx, const ValidationOptions& opts = {})
        : config_(std::move(config)), ctx_(ctx) {
        report_ = validate(config_, opts);
        if (!report_.ok()) {
            std::string msg = "system failed validation";
            for (const auto& m : report_.messages)
                if (m.find("not a proof") == std::string::npos) msg += "; " + m;
            throw validation_error(msg);
        }
        for (const auto& m : config_.maps) {
            const BigReal b = derivative_bound(m);
            if (b > contraction_on_interval_) contraction_on_interval_ = b;
        }
    }

    const IFSConfig& config() const noexcept { return config_; }
    const PrecisionContext& context() const noexcept { return ctx_; }
    const ValidationReport& report() const noexcept { return report_; }
    const std::vector<MapSpec>& maps() const noexcept { return config_.maps; }
    const WeightSpec& weights() const noexcept { return config_.weights; }
    std::size_t size() const noexcept { return config_.maps.size(); }

    /// Sampled sup |phi_i'| over the complex neighbourhood.
    const BigReal& contraction() const noexcept { return report_.contraction_sup; }
    /// sup |phi_i'| over [0,1] from closed forms.
    const BigReal& contraction_on_interval() const noexcept { return contraction_on_interval_; }

    /// Same maps with a different weight specification (revalidated).
    ValidatedSystem with_weights(WeightSpec w) const {
        IFSConfig c = config_;
        c.weights = std::move(w);
        c.second_weights.reset();
        return ValidatedSystem(std::move(c), ctx_);
    }

private:
    IFSConfig config_;
    PrecisionContext ctx_;
    ValidationReport report_;
    BigReal contraction_on_interval_{0};
};

}  // namespace ifsmeasure
