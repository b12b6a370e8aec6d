#pragma once

#include "ifs.hpp"
#include "parallel.hpp"
#include "words.hpp"

#include <cmath>
#include <utility>
#include <vector>

namespace ifsmeasure {

/// Periodic-point data of one word w = i_1 ... i_m.
struct PeriodicOrbit {
    Word word;
    /// Fixed point z_w of phi_w = phi_{i_1} o ... o phi_{i_m}.
    BigReal z;
    /// orbit[k] = fixed point of the rotation sigma^k w; orbit[0] = z.
    std::vector<BigReal> orbit;
    /// phi_w'(z_w).
    BigReal deriv;
    /// p_w (constant weights) or p_w(z_w) (weight functions).
    BigReal weight;
};

/// phi_w(x) = phi_{i_1}(...phi_{i_m}(x)).
inline BigReal compose(const std::vector<MapSpec>& maps, const Word& w, BigReal x) {
    for (std::size_t j = w.size(); j-- > 0;) x = eval_map(maps[w[j]], x);
    return x;
}

namespace detail {

/// phi_w(x) in double precision.
inline double compose_double(const std::vector<MapSpec>& maps, const Word& w, double x) {
    for (std::size_t j = w.size(); j-- > 0;) {
        x = std::visit(
            [&](const auto& f) -> double {
                using F = std::decay_t<decltype(f)>;
                if constexpr (std::is_same_v<F, Affine>) {
                    return f.ratio.value().template convert_to<double>() * x +
                           f.offset.value().template convert_to<double>();
                } else if constexpr (std::is_same_v<F, Moebius>) {
                    return (f.a.value().template convert_to<double>() * x + f.b.value().template convert_to<double>()) /
                           (f.c.value().template convert_to<double>() * x + f.d.value().template convert_to<double>());
                } else {
                    return f.amplitude.value().template convert_to<double>() * std::sin(0.7853981633974483 * x) +
                           f.offset.value().template convert_to<double>();
                }
            },
            maps[w[j]].form);
    }
    return x;
}

/// phi_w(x) and phi_w'(x) by the chain rule.
inline std::pair<BigReal, BigReal> compose_with_derivative(const std::vector<MapSpec>& maps, const Word& w,
                                                           BigReal x) {
    BigReal deriv = 1;
    for (std::size_t j = w.size(); j-- > 0;) {
        auto [value, d] = eval_map_with_derivative(maps[w[j]], x);
        deriv *= d;
        x = std::move(value);
    }
    return {std::move(x), std::move(deriv)};
}

inline BigReal clamp_unit(BigReal z) {
    if (z < 0) z = 0;
    if (z > 1) z = 1;
    return z;
}

}  // namespace detail

/// Unique fixed point of phi_w in [0,1]. Picard iteration from 1/2 runs in
/// double precision, then Newton steps on phi_w(z) - z at working precision
/// until the step drops below 10^-(digits + guard/2). If the Newton phase
/// does not reach that, a full-precision Picard iteration from 1/2 followed by
/// one Newton step is used instead.
inline BigReal fixed_point(const ValidatedSystem& sys, const Word& w) {
    if (!w.fits(sys.size())) throw std::invalid_argument("fixed_point: word uses symbols beyond the map count");
    const auto& ctx = sys.context();
    const auto& maps = sys.maps();

    const double rate = std::fabs(std::log10(sys.contraction().convert_to<double>()));
    const long cap = static_cast<long>(std::ceil(ctx.working_digits() / (rate > 0 ? rate : 1e-3))) + 50;
    const BigReal tol = ctx.pow10_neg(ctx.digits() + ctx.guard() / 2);
    const BigReal residual_tol = ctx.pow10_neg(ctx.digits());

    double coarse = 0.5;
    for (long it = 0; it < cap; ++it) {
        const double next = detail::compose_double(maps, w, coarse);
        const bool done = std::fabs(next - coarse) < 1e-15;
        coarse = next;
        if (done) break;
    }

    BigReal z = coarse;
    for (int it = 0; it < 64; ++it) {
        auto [value, deriv] = detail::compose_with_derivative(maps, w, z);
        const BigReal step = (value - z) / (deriv - 1);
        z -= step;
        if (abs(step) < tol) {
            z = detail::clamp_unit(std::move(z));
            if (abs(compose(maps, w, z) - z) <= residual_tol) return z;
            break;
        }
    }

    z = BigReal(1) / 2;
    bool converged = false;
    for (long it = 0; it < cap; ++it) {
        BigReal next = compose(maps, w, z);
        const bool done = abs(next - z) < tol;
        z = std::move(next);
        if (done) {
            converged = true;
            break;
        }
    }
    if (!converged)
        throw numeric_error("fixed_point: no convergence for word " + w.str() + " within " + std::to_string(cap) +
                            " steps");
    auto [value, deriv] = detail::compose_with_derivative(maps, w, z);
    z -= (value - z) / (deriv - 1);
    return detail::clamp_unit(std::move(z));
}

/// p_w evaluated along a computed orbit: prod_{k=1..m} p_{i_k}(u_k) with
/// u_k = orbit[k mod m]. Constant weights reduce to prod p_{i_k}.
inline BigReal orbit_weight(const WeightSpec& weights, const Word& w, const std::vector<BigReal>& orbit) {
    const std::size_t m = w.size();
    BigReal product = weights.at(w[0], orbit[1 % m]);
    for (std::size_t k = 2; k <= m; ++k) product *= weights.at(w[k - 1], orbit[k % m]);
    return product;
}

/// Fixed point, shifted fixed points, composite derivative and weight of w.
/// The shifted points are suffix images u_k = phi_{i_{k+1} ... i_m}(z).
inline PeriodicOrbit orbit_data(const ValidatedSystem& sys, const Word& w) {
    const auto& maps = sys.maps();
    const std::size_t m = w.size();
    PeriodicOrbit out;
    out.word = w;
    out.z = fixed_point(sys, w);
    out.orbit.resize(m);
    out.orbit[0] = out.z;

    // u_m = z; u_k = phi_{i_{k+1}}(u_{k+1}); phi_w'(z) = prod phi_{i_k}'(u_k).
    BigReal u = out.z;
    out.deriv = 1;
    for (std::size_t k = m; k-- > 0;) {
        auto [value, d] = eval_map_with_derivative(maps[w[k]], u);
        out.deriv *= d;
        if (k == 0) break;
        u = std::move(value);
        out.orbit[k] = u;
    }
    out.weight = orbit_weight(sys.weights(), w, out.orbit);
    return out;
}

/// Orbits of one word length, either one per rotation class (weighted by class
/// size) or one per word.
struct OrbitLevel {
    std::size_t length = 0;
    std::vector<PeriodicOrbit> orbits;
    /// Multiplicity of each orbit in the full sum over all N^m words.
    std::vector<std::size_t> multiplicity;
};

enum class Enumeration { classes, full };

inline OrbitLevel compute_orbit_level(const ValidatedSystem& sys, std::size_t m, Enumeration mode = Enumeration::classes,
                                      unsigned workers = 1) {
    OrbitLevel level;
    level.length = m;
    std::vector<Word> words;
    if (mode == Enumeration::classes) {
        for (auto& c : cyclic_classes(sys.size(), m)) {
            words.push_back(std::move(c.representative));
            level.multiplicity.push_back(c.class_size);
        }
    } else {
        words = all_words(sys.size(), m);
        level.multiplicity.assign(words.size(), 1);
    }
    level.orbits.resize(words.size());
    parallel_for(words.size(), workers, [&](std::size_t i) { level.orbits[i] = orbit_data(sys, words[i]); });
    return level;
}

/// Orbit levels 1..k.
inline std::vector<OrbitLevel> compute_orbits(const ValidatedSystem& sys, std::size_t k,
                                              Enumeration mode = Enumeration::classes, unsigned workers = 1) {
    std::vector<OrbitLevel> levels;
    levels.reserve(k);
    for (std::size_t m = 1; m <= k; ++m) levels.push_back(compute_orbit_level(sys, m, mode, workers));
    return levels;
}

}  // namespace ifsmeasure
