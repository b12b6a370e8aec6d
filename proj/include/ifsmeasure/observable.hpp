#pragma once

#include "ifs.hpp"
#include "orbit.hpp"
#include "words.hpp"

#include <memory>
#include <string>
#include <variant>
#include <vector>

namespace ifsmeasure {

class Observable;

/// g(x) = -sum_i p_i log|phi_i'(x)|
struct LyapunovIntegrand {
    std::vector<MapSpec> maps;
    std::vector<Scalar> weights;
};

/// g = inner o phi_w
struct CylinderComposed {
    std::shared_ptr<const Observable> inner;
    Word word;
    std::vector<MapSpec> maps;
};

/// Integrand catalog: polynomials, the Lyapunov integrand of a system, and
/// compositions with cylinder maps.
class Observable {
public:
    using Form = std::variant<Polynomial, LyapunovIntegrand, CylinderComposed>;

    explicit Observable(Form form, std::string label = {}) : form_(std::move(form)), label_(std::move(label)) {}

    static Observable polynomial(std::vector<Scalar> coeffs) {
        if (coeffs.empty()) coeffs.emplace_back(0);
        std::string label = "poly";
        for (const auto& c : coeffs) label += " " + c.text();
        return Observable(Polynomial{std::move(coeffs)}, std::move(label));
    }
    static Observable constant(Scalar c) { return polynomial({std::move(c)}); }
    /// g(x) = x^n
    static Observable monomial(std::size_t n) {
        std::vector<Scalar> c(n + 1, Scalar(0));
        c[n] = Scalar(1);
        return Observable(Polynomial{std::move(c)}, "x^" + std::to_string(n));
    }

    /// Requires constant weights and phi_i' of constant sign on [0,1].
    static Observable lyapunov(const ValidatedSystem& sys) {
        if (!sys.weights().is_constant())
            throw unsupported_error("lyapunov integrand needs constant weights");
        for (std::size_t i = 0; i < sys.size(); ++i)
            if (derivative_sign(sys.maps()[i], 256) == 0)
                throw validation_error("map " + std::to_string(i + 1) +
                                       " has a vanishing derivative on [0,1]; -log|phi'| is unbounded");
        return Observable(LyapunovIntegrand{sys.maps(), sys.weights().constants()}, "lyapunov");
    }

    static Observable cylinder(Observable inner, Word w, const std::vector<MapSpec>& maps) {
        if (!w.fits(maps.size())) throw std::invalid_argument("cylinder word uses symbols beyond the map count");
        std::string label = "(" + inner.label() + ") o phi_" + w.str();
        return Observable(CylinderComposed{std::make_shared<const Observable>(std::move(inner)), std::move(w), maps},
                          std::move(label));
    }

    const Form& form() const noexcept { return form_; }
    const std::string& label() const noexcept { return label_; }

    BigReal operator()(const BigReal& x) const {
        return std::visit(
            [&](const auto& f) -> BigReal {
                using F = std::decay_t<decltype(f)>;
                if constexpr (std::is_same_v<F, Polynomial>) {
                    return f(x);
                } else if constexpr (std::is_same_v<F, LyapunovIntegrand>) {
                    BigReal acc = 0;
                    for (std::size_t i = 0; i < f.maps.size(); ++i) {
                        const BigReal d = abs(eval_map_derivative(f.maps[i], x));
                        if (d == 0) throw domain_error("lyapunov integrand: vanishing derivative");
                        acc -= f.weights[i].value() * log(d);
                    }
                    return acc;
                } else {
                    return (*f.inner)(compose(f.maps, f.word, x));
                }
            },
            form_);
    }

    /// Lipschitz constant bound on [0,1] from closed-form derivative bounds.
    BigReal lipschitz_bound() const {
        return std::visit(
            [&](const auto& f) -> BigReal {
                using F = std::decay_t<decltype(f)>;
                if constexpr (std::is_same_v<F, Polynomial>) {
                    return f.lipschitz_bound();
                } else if constexpr (std::is_same_v<F, LyapunovIntegrand>) {
                    BigReal acc = 0;
                    for (std::size_t i = 0; i < f.maps.size(); ++i)
                        acc += abs(f.weights[i].value()) * log_derivative_slope_bound(f.maps[i]);
                    return acc;
                } else {
                    BigReal acc = f.inner->lipschitz_bound();
                    for (std::size_t j = 0; j < f.word.size(); ++j) acc *= derivative_bound(f.maps[f.word[j]]);
                    return acc;
                }
            },
            form_);
    }

private:
    Form form_;
    std::string label_;
};

inline BigReal eval_observable(const Observable& g, const BigReal& x) { return g(x); }

}  // namespace ifsmeasure
