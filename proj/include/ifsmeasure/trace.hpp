#pragma once

#include "observable.hpp"
#include "orbit.hpp"
#include "parallel.hpp"

#include <span>
#include <vector>

namespace ifsmeasure {

/// t_1..t_k and tau_1..tau_k (index 0 holds level 1).
struct TraceTable {
    std::size_t k = 0;
    std::vector<BigReal> t;
    std::vector<BigReal> tau;
};

struct TraceOptions {
    Enumeration mode = Enumeration::classes;
    unsigned workers = 1;
};

namespace detail {

/// Per-orbit factors multiplicity * p_w / (1 - phi_w'(z_w)).
inline std::vector<BigReal> orbit_factors(const OrbitLevel& level, const WeightSpec& weights, unsigned workers) {
    std::vector<BigReal> factors(level.orbits.size());
    parallel_for(level.orbits.size(), workers, [&](std::size_t i) {
        const auto& o = level.orbits[i];
        factors[i] = orbit_weight(weights, o.word, o.orbit) / (1 - o.deriv) * BigReal(level.multiplicity[i]);
    });
    return factors;
}

/// Cyclic Birkhoff sum g(z_w) + g(z_{sigma w}) + ... + g(z_{sigma^{m-1} w}).
inline BigReal birkhoff_sum(const Observable& g, const PeriodicOrbit& o) {
    BigReal acc = g(o.orbit[0]);
    for (std::size_t k = 1; k < o.orbit.size(); ++k) acc += g(o.orbit[k]);
    return acc;
}

}  // namespace detail

/// Trace tables for several observables over precomputed orbits. The orbit
/// geometry does not depend on the weights, so one orbit set serves any
/// weight specification on the same maps.
inline std::vector<TraceTable> trace_tables(const std::vector<OrbitLevel>& levels, const WeightSpec& weights,
                                            std::span<const Observable> observables, unsigned workers = 1) {
    std::vector<TraceTable> out(observables.size());
    for (auto& table : out) {
        table.k = levels.size();
        table.t.reserve(levels.size());
        table.tau.reserve(levels.size());
    }
    for (const auto& level : levels) {
        const auto factors = detail::orbit_factors(level, weights, workers);
        const BigReal t = pairwise_sum(factors);
        for (std::size_t g = 0; g < observables.size(); ++g) {
            std::vector<BigReal> terms(factors.size());
            parallel_for(factors.size(), workers, [&](std::size_t i) {
                terms[i] = factors[i] * detail::birkhoff_sum(observables[g], level.orbits[i]);
            });
            out[g].t.push_back(t);
            out[g].tau.push_back(pairwise_sum(terms));
        }
    }
    return out;
}

inline std::vector<TraceTable> trace_tables(const ValidatedSystem& sys, std::span<const Observable> observables,
                                            std::size_t k, const TraceOptions& opts = {}) {
    const auto levels = compute_orbits(sys, k, opts.mode, opts.workers);
    return trace_tables(levels, sys.weights(), observables, opts.workers);
}

inline TraceTable trace_table(const ValidatedSystem& sys, const Observable& g, std::size_t k,
                              const TraceOptions& opts = {}) {
    return trace_tables(sys, std::span<const Observable>(&g, 1), k, opts).front();
}

/// t_m = sum over words of length m of p_w / (1 - phi_w'(z_w)).
inline BigReal trace_t(const ValidatedSystem& sys, std::size_t m, const TraceOptions& opts = {}) {
    if (m < 1) throw std::invalid_argument("trace_t: level must be positive");
    const auto level = compute_orbit_level(sys, m, opts.mode, opts.workers);
    return pairwise_sum(detail::orbit_factors(level, sys.weights(), opts.workers));
}

/// tau_m = sum over words of length m of p_w (cyclic sum of g) / (1 - phi_w'(z_w)).
inline BigReal trace_tau(const ValidatedSystem& sys, const Observable& g, std::size_t m,
                         const TraceOptions& opts = {}) {
    if (m < 1) throw std::invalid_argument("trace_tau: level must be positive");
    std::vector<OrbitLevel> levels;
    levels.push_back(compute_orbit_level(sys, m, opts.mode, opts.workers));
    return trace_tables(levels, sys.weights(), std::span<const Observable>(&g, 1), opts.workers).front().tau.front();
}

}  // namespace ifsmeasure
