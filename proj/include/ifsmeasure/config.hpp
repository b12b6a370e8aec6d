#pragma once

// Line-oriented run configuration:
//
//   # comment
//   digits  = 64
//   map     = affine 1/3 0
//   map     = moebius 0 1 1 2
//   map     = sineaffine 1/6 1/4
//   p       = 1/3 2/3
//   q       = 3/4 1/4
//   pfun    = 1/4 1/2          (one per map: polynomial weight p_i(x) = 1/4 + x/2)
//   epsilon = 1/4
//   observable = poly 0 1      (or: monomial 3, const 1/2, lyapunov)
//   piece   = 12 : poly 0 0 1  (cylinder word : observable)
//
// Rational literals a/b and decimal literals are both held exactly.

#include "ifs.hpp"
#include "observable.hpp"
#include "words.hpp"

#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace ifsmeasure {

struct ConfigEntry {
    std::string key;
    std::string value;
    int line = 0;
};

/// Key/value entries in file order, before any numbers are built.
struct RawConfig {
    std::vector<ConfigEntry> entries;

    std::vector<const ConfigEntry*> all(const std::string& key) const {
        std::vector<const ConfigEntry*> out;
        for (const auto& e : entries)
            if (e.key == key) out.push_back(&e);
        return out;
    }
    const ConfigEntry* find(const std::string& key) const {
        const ConfigEntry* hit = nullptr;
        for (const auto& e : entries)
            if (e.key == key) hit = &e;
        return hit;
    }
};

namespace detail {

inline std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

inline std::vector<std::string> split_ws(const std::string& s) {
    std::istringstream in(s);
    std::vector<std::string> out;
    for (std::string t; in >> t;) out.push_back(t);
    return out;
}

inline const std::vector<std::string>& known_keys() {
    static const std::vector<std::string> keys = {
        "digits", "guard", "k", "print_digits", "workers", "format", "map", "p", "q", "pfun", "epsilon",
        "observable", "M", "K", "piece", "n", "x0", "boundary_samples", "budget", "enumerate"};
    return keys;
}

inline config_error key_error(const ConfigEntry& e, const std::string& what) {
    return config_error("config key '" + e.key + "' (line " + std::to_string(e.line) + "): " + what);
}

}  // namespace detail

inline RawConfig parse_config_text(const std::string& text) {
    RawConfig raw;
    std::istringstream in(text);
    std::string line;
    int number = 0;
    while (std::getline(in, line)) {
        ++number;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = detail::trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw config_error("line " + std::to_string(number) + ": expected 'key = value'");
        ConfigEntry e{detail::trim(line.substr(0, eq)), detail::trim(line.substr(eq + 1)), number};
        const auto& keys = detail::known_keys();
        if (std::find(keys.begin(), keys.end(), e.key) == keys.end())
            throw config_error("config key '" + e.key + "' (line " + std::to_string(number) + "): unknown key");
        if (e.value.empty()) throw detail::key_error(e, "missing value");
        raw.entries.push_back(std::move(e));
    }
    return raw;
}

inline RawConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw config_error("cannot open config file '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str());
}

/// Everything a CLI run needs. Numbers are built at the context precision.
struct RunConfig {
    int digits = 64;
    int guard = kDefaultGuard;
    int k = 12;
    int print_digits = 40;
    unsigned workers = 1;
    std::string format = "plain";
    Enumeration enumerate = Enumeration::classes;
    int boundary_samples = 64;
    double budget = 1 << 26;

    IFSConfig system;
    std::optional<std::string> observable_text;
    int M = 4;
    int K = 1;
    std::vector<std::pair<Word, std::string>> pieces;
    int n = 12;
    Scalar x0{1, 2};

    PrecisionContext context() const { return PrecisionContext(digits, guard); }
};

/// Command-line values that take precedence over the file.
struct ConfigOverrides {
    std::optional<int> digits;
    std::optional<int> k;
    std::optional<int> print_digits;
    std::optional<unsigned> workers;
    std::optional<std::string> format;
};

namespace detail {

inline int parse_int(const ConfigEntry& e, int min) {
    try {
        std::size_t used = 0;
        const int v = std::stoi(e.value, &used);
        if (used != e.value.size()) throw std::invalid_argument("trailing");
        if (v < min) throw key_error(e, "must be at least " + std::to_string(min));
        return v;
    } catch (const config_error&) {
        throw;
    } catch (const std::exception&) {
        throw key_error(e, "expected an integer, got '" + e.value + "'");
    }
}

inline Scalar parse_scalar(const ConfigEntry& e, const std::string& token) {
    try {
        return Scalar::parse(token);
    } catch (const config_error& err) {
        throw key_error(e, err.what());
    }
}

inline std::vector<Scalar> parse_scalars(const ConfigEntry& e, const std::vector<std::string>& tokens,
                                         std::size_t from = 0) {
    std::vector<Scalar> out;
    for (std::size_t i = from; i < tokens.size(); ++i) out.push_back(parse_scalar(e, tokens[i]));
    return out;
}

inline MapSpec parse_map(const ConfigEntry& e) {
    const auto t = split_ws(e.value);
    const std::string kind = t.empty() ? "" : t[0];
    auto need = [&](std::size_t n) {
        if (t.size() != n + 1)
            throw key_error(e, kind + " needs " + std::to_string(n) + " parameters, got " + std::to_string(t.size() - 1));
    };
    try {
        if (kind == "affine") {
            need(2);
            return MapSpec::affine(parse_scalar(e, t[1]), parse_scalar(e, t[2]));
        }
        if (kind == "moebius") {
            need(4);
            return MapSpec::moebius(parse_scalar(e, t[1]), parse_scalar(e, t[2]), parse_scalar(e, t[3]),
                                    parse_scalar(e, t[4]));
        }
        if (kind == "sineaffine") {
            need(2);
            return MapSpec::sine_affine(parse_scalar(e, t[1]), parse_scalar(e, t[2]));
        }
    } catch (const config_error& err) {
        if (std::string(err.what()).rfind("config key", 0) == 0) throw;
        throw key_error(e, err.what());
    }
    throw key_error(e, "unknown map kind '" + kind + "' (expected affine, moebius or sineaffine)");
}

}  // namespace detail

/// Builds the run configuration. Applies the resulting precision context
/// before any number is constructed.
inline RunConfig build_run_config(const RawConfig& raw, const ConfigOverrides& over = {}) {
    RunConfig rc;
    if (auto* e = raw.find("digits")) rc.digits = detail::parse_int(*e, kMinDigits);
    if (over.digits) rc.digits = *over.digits;
    if (rc.digits < kMinDigits) throw config_error("digits: precision too low (minimum " + std::to_string(kMinDigits) + ")");
    if (auto* e = raw.find("guard")) rc.guard = detail::parse_int(*e, 0);
    rc.context().apply();

    if (auto* e = raw.find("k")) rc.k = detail::parse_int(*e, 1);
    if (over.k) rc.k = *over.k;
    if (auto* e = raw.find("print_digits")) rc.print_digits = detail::parse_int(*e, 1);
    if (over.print_digits) rc.print_digits = *over.print_digits;
    if (rc.print_digits > rc.digits)
        throw config_error("print_digits: " + std::to_string(rc.print_digits) + " exceeds digits " +
                           std::to_string(rc.digits));
    if (auto* e = raw.find("workers")) rc.workers = static_cast<unsigned>(detail::parse_int(*e, 1));
    if (over.workers) rc.workers = *over.workers;
    if (auto* e = raw.find("format")) rc.format = e->value;
    if (over.format) rc.format = *over.format;
    if (rc.format != "plain" && rc.format != "csv") throw config_error("format: expected plain or csv");
    if (auto* e = raw.find("enumerate")) {
        if (e->value == "classes")
            rc.enumerate = Enumeration::classes;
        else if (e->value == "full")
            rc.enumerate = Enumeration::full;
        else
            throw detail::key_error(*e, "expected classes or full");
    }
    if (auto* e = raw.find("boundary_samples")) rc.boundary_samples = detail::parse_int(*e, 64);
    if (auto* e = raw.find("budget")) rc.budget = detail::parse_int(*e, 1);

    for (auto* e : raw.all("map")) rc.system.maps.push_back(detail::parse_map(*e));
    if (rc.system.maps.size() < 2) throw config_error("config key 'map': at least two maps are required");
    const std::size_t N = rc.system.maps.size();

    const auto p = raw.find("p");
    const auto pfun = raw.all("pfun");
    if (p && !pfun.empty()) throw config_error("config key 'pfun': cannot be combined with 'p'");
    if (p) {
        auto w = detail::parse_scalars(*p, detail::split_ws(p->value));
        if (w.size() != N)
            throw detail::key_error(*p, "expected " + std::to_string(N) + " weights, got " + std::to_string(w.size()));
        rc.system.weights = WeightSpec::constant(std::move(w));
    } else if (!pfun.empty()) {
        if (pfun.size() != N)
            throw config_error("config key 'pfun': expected one weight function per map (" + std::to_string(N) + ")");
        std::vector<Polynomial> polys;
        for (auto* e : pfun) polys.push_back(Polynomial{detail::parse_scalars(*e, detail::split_ws(e->value))});
        rc.system.weights = WeightSpec::functions(std::move(polys));
    } else {
        throw config_error("config key 'p': missing weights (give 'p' or one 'pfun' per map)");
    }
    if (auto* e = raw.find("q")) {
        auto w = detail::parse_scalars(*e, detail::split_ws(e->value));
        if (w.size() != N)
            throw detail::key_error(*e, "expected " + std::to_string(N) + " weights, got " + std::to_string(w.size()));
        rc.system.second_weights = WeightSpec::constant(std::move(w));
    }
    if (auto* e = raw.find("epsilon")) {
        rc.system.epsilon = detail::parse_scalar(*e, e->value);
        if (!(rc.system.epsilon.value() > 0)) throw detail::key_error(*e, "must be positive");
    }

    if (auto* e = raw.find("observable")) rc.observable_text = e->value;
    if (auto* e = raw.find("M")) rc.M = detail::parse_int(*e, 0);
    if (auto* e = raw.find("K")) rc.K = detail::parse_int(*e, 1);
    if (auto* e = raw.find("n")) rc.n = detail::parse_int(*e, 1);
    if (auto* e = raw.find("x0")) rc.x0 = detail::parse_scalar(*e, e->value);
    for (auto* e : raw.all("piece")) {
        const auto colon = e->value.find(':');
        if (colon == std::string::npos) throw detail::key_error(*e, "expected 'word : observable'");
        try {
            rc.pieces.emplace_back(Word::parse(detail::trim(e->value.substr(0, colon)), N),
                                   detail::trim(e->value.substr(colon + 1)));
        } catch (const std::invalid_argument& err) {
            throw detail::key_error(*e, err.what());
        }
    }
    return rc;
}

/// Observable from its config text. Lyapunov needs the validated system.
inline Observable parse_observable(const std::string& text, const ValidatedSystem& sys) {
    const auto t = detail::split_ws(text);
    if (t.empty()) throw config_error("observable: empty specification");
    try {
        if (t[0] == "poly") {
            std::vector<Scalar> c;
            for (std::size_t i = 1; i < t.size(); ++i) c.push_back(Scalar::parse(t[i]));
            if (c.empty()) throw config_error("observable: poly needs coefficients");
            return Observable::polynomial(std::move(c));
        }
        if (t[0] == "monomial" && t.size() == 2) return Observable::monomial(std::stoul(t[1]));
        if (t[0] == "const" && t.size() == 2) return Observable::constant(Scalar::parse(t[1]));
        if (t[0] == "lyapunov" && t.size() == 1) return Observable::lyapunov(sys);
    } catch (const std::invalid_argument&) {
        throw config_error("observable: malformed '" + text + "'");
    }
    throw config_error("observable: unknown specification '" + text + "' (expected poly, monomial, const or lyapunov)");
}

namespace detail {

inline std::string join_texts(const std::vector<Scalar>& v) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) out += (i ? " " : "") + v[i].text();
    return out;
}

}  // namespace detail

/// Canonical text form; parse_config_text(emit_config(rc)) rebuilds the same
/// system.
inline std::string emit_config(const RunConfig& rc) {
    std::ostringstream out;
    out << "digits = " << rc.digits << "\n";
    if (rc.guard != kDefaultGuard) out << "guard = " << rc.guard << "\n";
    out << "k = " << rc.k << "\n";
    out << "print_digits = " << rc.print_digits << "\n";
    for (const auto& m : rc.system.maps) {
        std::visit(
            [&](const auto& f) {
                using F = std::decay_t<decltype(f)>;
                if constexpr (std::is_same_v<F, Affine>)
                    out << "map = affine " << f.ratio.text() << " " << f.offset.text() << "\n";
                else if constexpr (std::is_same_v<F, Moebius>)
                    out << "map = moebius " << f.a.text() << " " << f.b.text() << " " << f.c.text() << " "
                        << f.d.text() << "\n";
                else
                    out << "map = sineaffine " << f.amplitude.text() << " " << f.offset.text() << "\n";
            },
            m.form);
    }
    if (rc.system.weights.is_constant()) {
        out << "p = " << detail::join_texts(rc.system.weights.constants()) << "\n";
    } else {
        for (const auto& poly : rc.system.weights.polynomials()) out << "pfun = " << detail::join_texts(poly.coeffs) << "\n";
    }
    if (rc.system.second_weights) out << "q = " << detail::join_texts(rc.system.second_weights->constants()) << "\n";
    out << "epsilon = " << rc.system.epsilon.text() << "\n";
    if (rc.observable_text) out << "observable = " << *rc.observable_text << "\n";
    out << "M = " << rc.M << "\n";
    out << "K = " << rc.K << "\n";
    for (const auto& [w, obs] : rc.pieces) out << "piece = " << w.str() << " : " << obs << "\n";
    out << "n = " << rc.n << "\n";
    out << "x0 = " << rc.x0.text() << "\n";
    return out.str();
}

}  // namespace ifsmeasure
