#pragma once

// Arbitrary-precision arithmetic used throughout ifsmeasure.
//
// Reals are MPFR-backed with a process-wide working precision. A run fixes
// one PrecisionContext, applies it, and only then builds any numbers:
// values created before apply() keep whatever precision was active.

#include <boost/multiprecision/gmp.hpp>
#include <boost/multiprecision/mpfr.hpp>

#include <mpfr.h>

#include <cmath>
#include <cstdlib>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace ifsmeasure {

using BigReal = boost::multiprecision::mpfr_float;
using Rational = boost::multiprecision::mpq_rational;
using BigInt = boost::multiprecision::mpz_int;

// Error taxonomy. The CLI maps these onto exit codes.
struct config_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct validation_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct numeric_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct domain_error : numeric_error {
    using numeric_error::numeric_error;
};
struct unsupported_error : validation_error {
    using validation_error::validation_error;
};

inline constexpr int kMinDigits = 30;
inline constexpr int kDefaultGuard = 15;

/// Working precision in decimal digits. `digits` is what results are trusted
/// to; `guard` extra digits are carried internally on top of it.
class PrecisionContext {
public:
    explicit PrecisionContext(int digits, int guard = kDefaultGuard)
        : digits_(digits), guard_(guard) {
        if (digits < kMinDigits)
            throw std::invalid_argument("precision too low: need at least " +
                                        std::to_string(kMinDigits) + " digits, got " +
                                        std::to_string(digits));
        if (guard < 0) throw std::invalid_argument("guard digits must be non-negative");
    }

    int digits() const noexcept { return digits_; }
    int guard() const noexcept { return guard_; }
    int working_digits() const noexcept { return digits_ + guard_; }

    /// Makes this context the active precision for newly created reals.
    void apply() const { BigReal::default_precision(static_cast<unsigned>(working_digits())); }

    /// 10^(-e) at working precision.
    BigReal pow10_neg(int e) const {
        BigReal r = 10;
        return pow(r, -e);
    }

    friend bool operator==(const PrecisionContext&, const PrecisionContext&) = default;

private:
    int digits_;
    int guard_;
};

/// Builds and applies a context.
inline PrecisionContext make_context(int digits) {
    PrecisionContext ctx(digits);
    ctx.apply();
    return ctx;
}

inline BigReal pi_value() {
    BigReal r;
    mpfr_const_pi(r.backend().data(), MPFR_RNDN);
    return r;
}

/// pi/4 at the active precision, cached per thread.
inline const BigReal& quarter_pi() {
    thread_local unsigned cached_digits = 0;
    thread_local BigReal value;
    const unsigned d = BigReal::default_precision();
    if (cached_digits != d) {
        value = BigReal();
        value = pi_value() / 4;
        cached_digits = d;
    }
    return value;
}

inline BigReal to_real(const Rational& q) {
    BigReal r;
    mpfr_set_q(r.backend().data(), q.backend().data(), MPFR_RNDN);
    return r;
}

/// Round-to-nearest decimal with `sig` significant digits in positional
/// notation, e.g. 2/3 -> "0.6666666667" for sig = 10.
inline std::string render_digits(const BigReal& x, int sig) {
    if (sig < 1) throw std::invalid_argument("render: need at least one digit");
    if (x == 0) {
        if (sig == 1) return "0";
        return "0." + std::string(static_cast<std::size_t>(sig - 1), '0');
    }
    mpfr_exp_t exp = 0;
    char* raw = mpfr_get_str(nullptr, &exp, 10, static_cast<std::size_t>(sig),
                             x.backend().data(), MPFR_RNDN);
    if (raw == nullptr) throw numeric_error("render: conversion failed");
    std::unique_ptr<char, void (*)(char*)> guard(raw, mpfr_free_str);
    std::string_view s(raw);
    std::string out;
    if (!s.empty() && s.front() == '-') {
        out.push_back('-');
        s.remove_prefix(1);
    }
    const auto n = static_cast<long>(s.size());
    if (exp <= 0) {
        out += "0.";
        out.append(static_cast<std::size_t>(-exp), '0');
        out += s;
    } else if (exp >= n) {
        out += s;
        out.append(static_cast<std::size_t>(exp - n), '0');
    } else {
        out += s.substr(0, static_cast<std::size_t>(exp));
        out.push_back('.');
        out += s.substr(static_cast<std::size_t>(exp));
    }
    return out;
}

inline std::string render(const BigReal& x, int digits, const PrecisionContext& ctx) {
    if (digits > ctx.digits())
        throw std::invalid_argument("render: requested " + std::to_string(digits) +
                                    " digits but the context carries " +
                                    std::to_string(ctx.digits()));
    return render_digits(x, digits);
}

/// Number of leading significant decimal digits two values share, measured as
/// -log10 of their relative difference and capped at `cap`.
inline int agreeing_digits(const BigReal& a, const BigReal& b, int cap) {
    const BigReal diff = abs(a - b);
    if (diff == 0) return cap;
    BigReal scale = abs(a) > abs(b) ? abs(a) : abs(b);
    if (scale == 0) return 0;
    const BigReal rel = diff / scale;
    const double d = -log10(rel).convert_to<double>();
    if (d <= 0) return 0;
    return d > cap ? cap : static_cast<int>(std::floor(d));
}

/// Parses "a/b", an integer, or a finite decimal literal ("0.25", "-1.5e-3")
/// into an exact rational. Throws config_error on malformed input.
inline Rational parse_rational(std::string_view text) {
    auto fail = [&]() -> config_error {
        return config_error("malformed number '" + std::string(text) + "'");
    };
    if (text.empty()) throw fail();
    if (auto slash = text.find('/'); slash != std::string_view::npos) {
        const auto num = text.substr(0, slash);
        const auto den = text.substr(slash + 1);
        auto is_int = [](std::string_view s) {
            if (!s.empty() && (s.front() == '-' || s.front() == '+')) s.remove_prefix(1);
            if (s.empty()) return false;
            for (char c : s)
                if (c < '0' || c > '9') return false;
            return true;
        };
        if (!is_int(num) || !is_int(den)) throw fail();
        // BigInt reads a leading 0 as an octal prefix
        auto to_int = [](std::string_view s) {
            const bool neg = s.front() == '-';
            if (s.front() == '-' || s.front() == '+') s.remove_prefix(1);
            const auto nz = s.find_first_not_of('0');
            BigInt v(nz == std::string_view::npos ? std::string("0") : std::string(s.substr(nz)));
            return neg ? BigInt(-v) : v;
        };
        const BigInt n = to_int(num);
        const BigInt d = to_int(den);
        if (d == 0) throw config_error("zero denominator in '" + std::string(text) + "'");
        return Rational(n, d);
    }

    std::string_view s = text;
    bool negative = false;
    if (s.front() == '-' || s.front() == '+') {
        negative = s.front() == '-';
        s.remove_prefix(1);
    }
    std::string digits;
    long scale = 0;
    bool seen_point = false;
    bool any_digit = false;
    std::size_t i = 0;
    for (; i < s.size(); ++i) {
        const char c = s[i];
        if (c >= '0' && c <= '9') {
            digits.push_back(c);
            any_digit = true;
            if (seen_point) ++scale;
        } else if (c == '.' && !seen_point) {
            seen_point = true;
        } else {
            break;
        }
    }
    if (!any_digit) throw fail();
    long exponent = 0;
    if (i < s.size()) {
        if (s[i] != 'e' && s[i] != 'E') throw fail();
        auto rest = s.substr(i + 1);
        if (rest.empty()) throw fail();
        std::string e(rest);
        char* end = nullptr;
        exponent = std::strtol(e.c_str(), &end, 10);
        if (end == e.c_str() || *end != '\0') throw fail();
    }
    const auto nz = digits.find_first_not_of('0');
    BigInt mant(nz == std::string::npos ? std::string("0") : digits.substr(nz));
    const long p10 = exponent - scale;
    Rational value(mant);
    BigInt ten = 10;
    BigInt factor = boost::multiprecision::pow(ten, static_cast<unsigned>(p10 < 0 ? -p10 : p10));
    if (p10 < 0)
        value /= Rational(factor);
    else
        value *= Rational(factor);
    return negative ? Rational(-value) : value;
}

/// A numeric parameter. Literal inputs keep their exact rational value and
/// source text next to the working-precision real.
class Scalar {
public:
    Scalar() : value_(0), exact_(Rational(0)), text_("0") {}
    Scalar(long num, long den = 1) : Scalar(Rational(BigInt(num), BigInt(den))) {}
    explicit Scalar(const Rational& q) : value_(to_real(q)), exact_(q), text_(rational_text(q)) {}
    explicit Scalar(BigReal v) : value_(std::move(v)), text_(render_digits(value_, 40)) {}

    static Scalar parse(std::string_view text) {
        Scalar s(parse_rational(text));
        s.text_ = std::string(text);
        return s;
    }

    const BigReal& value() const noexcept { return value_; }
    const std::optional<Rational>& exact() const noexcept { return exact_; }
    const std::string& text() const noexcept { return text_; }

    static std::string rational_text(const Rational& q) {
        const auto n = numerator(q);
        const auto d = denominator(q);
        if (d == 1) return n.str();
        return n.str() + "/" + d.str();
    }

private:
    BigReal value_;
    std::optional<Rational> exact_;
    std::string text_;
};

/// Minimal complex arithmetic over BigReal, enough for holomorphic map and
/// derivative evaluation on a complex neighbourhood of [0,1].
template <class R>
struct Complex {
    R re{0};
    R im{0};

    Complex() = default;
    Complex(R r) : re(std::move(r)), im(0) {}
    Complex(R r, R i) : re(std::move(r)), im(std::move(i)) {}

    friend Complex operator+(const Complex& a, const Complex& b) { return {R(a.re + b.re), R(a.im + b.im)}; }
    friend Complex operator-(const Complex& a, const Complex& b) { return {R(a.re - b.re), R(a.im - b.im)}; }
    friend Complex operator*(const Complex& a, const Complex& b) {
        return {R(a.re * b.re - a.im * b.im), R(a.re * b.im + a.im * b.re)};
    }
    friend Complex operator/(const Complex& a, const Complex& b) {
        const R den = b.re * b.re + b.im * b.im;
        if (den == 0) throw domain_error("complex division by zero");
        return {R((a.re * b.re + a.im * b.im) / den), R((a.im * b.re - a.re * b.im) / den)};
    }
    friend Complex operator-(const Complex& a) { return {R(-a.re), R(-a.im)}; }

    friend R abs(const Complex& z) { return R(sqrt(z.re * z.re + z.im * z.im)); }
    friend Complex sin(const Complex& z) {
        return {R(sin(z.re) * cosh(z.im)), R(cos(z.re) * sinh(z.im))};
    }
    friend Complex cos(const Complex& z) {
        return {R(cos(z.re) * cosh(z.im)), R(-(sin(z.re) * sinh(z.im)))};
    }
};

using BigComplex = Complex<BigReal>;

/// Deterministic pairwise summation; the reduction tree depends only on the
/// number of terms.
inline BigReal pairwise_sum(const std::vector<BigReal>& terms, std::size_t lo, std::size_t hi) {
    if (hi - lo == 0) return BigReal(0);
    if (hi - lo == 1) return terms[lo];
    if (hi - lo <= 8) {
        BigReal acc = terms[lo];
        for (std::size_t i = lo + 1; i < hi; ++i) acc += terms[i];
        return acc;
    }
    const std::size_t mid = lo + (hi - lo) / 2;
    return BigReal(pairwise_sum(terms, lo, mid) + pairwise_sum(terms, mid, hi));
}

inline BigReal pairwise_sum(const std::vector<BigReal>& terms) {
    return pairwise_sum(terms, 0, terms.size());
}

}  // namespace ifsmeasure
