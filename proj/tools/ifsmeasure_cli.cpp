// Batch front-end for ifsmeasure.
//
//   ifsmeasure <command> <config> [--digits D] [--print-digits P] [--k K]
//                                 [--workers W] [--format plain|csv]
//
// Exit codes: 0 success, 1 config/parse error, 2 validation failure,
// 3 numeric failure.

#include "ifsmeasure/ifsmeasure.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace {

using namespace ifsmeasure;

enum ExitCode { kOk = 0, kConfigError = 1, kValidationError = 2, kNumericError = 3 };

struct Row {
    std::string index;
    std::string value;
    std::string stable;
};

void print_table(std::ostream& out, const std::string& format, const std::string& index_name,
                 const std::vector<Row>& rows) {
    if (format == "csv") {
        out << index_name << ",value,stable_digits\n";
        for (const auto& r : rows) out << r.index << "," << r.value << "," << r.stable << "\n";
        return;
    }
    for (const auto& r : rows) out << index_name << "=" << r.index << "  " << r.value << "  " << r.stable << "\n";
}

std::string show(const std::optional<BigReal>& v, const RunConfig& rc) {
    return v ? render(*v, rc.print_digits, rc.context()) : std::string("unavailable");
}

std::vector<Row> series_rows(const EstimateSeries& s, const RunConfig& rc) {
    std::vector<Row> rows;
    for (std::size_t j = 0; j < s.values.size(); ++j)
        rows.push_back({std::to_string(j + 1), show(s.values[j], rc), std::to_string(s.stable_digits[j])});
    return rows;
}

void require_last(const EstimateSeries& s) {
    if (s.values.empty() || !s.values.back())
        throw numeric_error("denominator vanished at the final level for " + s.label);
}

IntegrateOptions integrate_options(const RunConfig& rc) { return {rc.enumerate, rc.workers}; }

ValidationOptions validation_options(const RunConfig& rc) {
    ValidationOptions v;
    v.boundary_samples = rc.boundary_samples;
    return v;
}

void print_report(std::ostream& out, const ValidationReport& r) {
    out << "contraction_sup        " << render_digits(r.contraction_sup, 12) << "\n";
    out << "is_contracting         " << (r.is_contracting ? "yes" : "no") << "\n";
    out << "maps_in_unit_interval  " << (r.maps_in_unit_interval ? "yes" : "no") << "\n";
    out << "largest_passing_eps    "
        << (r.largest_passing_epsilon ? render_digits(*r.largest_passing_epsilon, 12) : std::string("none")) << "\n";
    out << "weight_ok              " << (r.weight_ok ? "yes" : "no") << "\n";
    if (r.nonoverlap_level_checked)
        out << "nonoverlapping (level " << *r.nonoverlap_level_checked << ") " << (r.nonoverlapping ? "yes" : "no")
            << "\n";
    for (const auto& m : r.messages) out << "note: " << m << "\n";
}

int run_validate(const RunConfig& rc, bool echo) {
    ValidationOptions opts = validation_options(rc);
    bool monotone = true;
    for (const auto& m : rc.system.maps) monotone = monotone && derivative_sign(m) != 0;
    if (monotone) opts.nonoverlap_level = 1;
    const auto report = validate(rc.system, opts);
    if (echo) {
        print_report(std::cerr, report);
        std::cout << emit_config(rc);
    } else {
        print_report(std::cout, report);
    }
    if (!report.ok()) {
        std::cerr << "validation failed";
        for (const auto& m : report.messages)
            if (m.find("not a proof") == std::string::npos) std::cerr << "; " << m;
        std::cerr << "\n";
        return kValidationError;
    }
    return kOk;
}

int run_command(const std::string& command, const RunConfig& rc, bool echo) {
    if (command == "validate") return run_validate(rc, echo);

    const ValidatedSystem sys(rc.system, rc.context(), validation_options(rc));
    const auto k = static_cast<std::size_t>(rc.k);
    auto& out = std::cout;

    if (command == "integrate") {
        const Observable g = parse_observable(rc.observable_text.value_or("poly 0 1"), sys);
        const auto s = integrate(sys, g, k, integrate_options(rc));
        if (rc.format == "plain") out << "# integrate " << s.label << "  digits=" << rc.digits << "\n";
        print_table(out, rc.format, "k", series_rows(s, rc));
        require_last(s);
    } else if (command == "lyapunov") {
        const auto s = lyapunov(sys, k, integrate_options(rc));
        if (rc.format == "plain") out << "# lyapunov exponent  digits=" << rc.digits << "\n";
        print_table(out, rc.format, "k", series_rows(s, rc));
        require_last(s);
    } else if (command == "moments") {
        const auto m = moments(sys, static_cast<std::size_t>(rc.M), k, integrate_options(rc));
        std::vector<Row> rows{{"0", render(BigReal(1), rc.print_digits, rc.context()), std::to_string(rc.digits)}};
        for (std::size_t n = 1; n <= m.order; ++n) {
            const auto& s = m.series[n - 1];
            require_last(s);
            rows.push_back({std::to_string(n), show(s.values.back(), rc), std::to_string(s.stable_digits.back())});
        }
        if (rc.format == "plain") out << "# moments at k=" << rc.k << "  digits=" << rc.digits << "\n";
        print_table(out, rc.format, "n", rows);
    } else if (command == "wasserstein") {
        const auto w = wasserstein(sys, k, integrate_options(rc));
        std::vector<Row> rows;
        std::optional<BigReal> previous;
        for (std::size_t j = 0; j < w.per_k.size(); ++j) {
            int stable = 0;
            if (w.per_k[j] && previous) stable = agreeing_digits(*w.per_k[j], *previous, rc.digits);
            rows.push_back({std::to_string(j + 1), show(w.per_k[j], rc), std::to_string(stable)});
            if (w.per_k[j]) previous = *w.per_k[j];
        }
        if (rc.format == "plain") out << "# wasserstein W1, sign condition satisfied  digits=" << rc.digits << "\n";
        print_table(out, rc.format, "k", rows);
        if (!w.per_k.back()) throw numeric_error("denominator vanished at the final level");
    } else if (command == "piecewise") {
        std::map<Word, Observable> pieces;
        for (const auto& [word, text] : rc.pieces) {
            if (word.size() != static_cast<std::size_t>(rc.K))
                throw config_error("config key 'piece': word " + word.str() + " does not have length K=" +
                                   std::to_string(rc.K));
            pieces.emplace(word, parse_observable(text, sys));
        }
        const auto v = integrate_piecewise(sys, static_cast<std::size_t>(rc.K), pieces, k, integrate_options(rc));
        if (rc.format == "plain") out << "# piecewise integral, K=" << rc.K << "  k=" << rc.k << "\n";
        print_table(out, rc.format, "k", {{std::to_string(rc.k), render(v, rc.print_digits, rc.context()), "-"}});
    } else if (command == "oracle") {
        const Observable g = parse_observable(rc.observable_text.value_or("poly 0 1"), sys);
        const auto v = iterate_oracle(sys, g, static_cast<std::size_t>(rc.n), rc.x0.value(), rc.budget);
        if (rc.format == "plain")
            out << "# push-forward of x0=" << rc.x0.text() << " after n=" << rc.n << " steps, " << g.label() << "\n";
        print_table(out, rc.format, "n", {{std::to_string(rc.n), render(v, rc.print_digits, rc.context()), "-"}});
    } else if (command == "traces") {
        const Observable g = parse_observable(rc.observable_text.value_or("poly 0 1"), sys);
        const auto table = trace_table(sys, g, k, {rc.enumerate, rc.workers});
        const auto c = coeffs_recursive(table);
        auto r = [&](const BigReal& x) { return render(x, rc.print_digits, rc.context()); };
        if (rc.format == "csv")
            out << "m,t,tau,a,alpha\n";
        else
            out << "# traces and determinant coefficients for " << g.label() << "\n";
        const std::string sep = rc.format == "csv" ? "," : "  ";
        out << 0 << sep << "-" << sep << "-" << sep << r(c.a[0]) << sep << r(c.alpha[0]) << "\n";
        for (std::size_t m = 1; m <= k; ++m)
            out << m << sep << r(table.t[m - 1]) << sep << r(table.tau[m - 1]) << sep << r(c.a[m]) << sep
                << r(c.alpha[m]) << "\n";
    } else {
        throw config_error("unknown command '" + command + "'");
    }
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Integrals against stationary measures of iterated function systems"};
    app.require_subcommand(1);

    std::string config_path;
    std::optional<int> digits, k, print_digits;
    std::optional<unsigned> workers;
    std::optional<std::string> format;
    bool echo = false;

    const std::vector<std::pair<std::string, std::string>> commands = {
        {"validate", "screen the system's hypotheses"},
        {"integrate", "approximants mu_k(g) for the configured observable"},
        {"moments", "Hausdorff moments gamma_0..gamma_M"},
        {"wasserstein", "W1 distance between the p- and q-stationary measures"},
        {"lyapunov", "Lyapunov exponent"},
        {"piecewise", "integral of a piecewise observable over level-K cylinders"},
        {"oracle", "push-forward sum over all words of length n"},
        {"traces", "dump t_m, tau_m, a_n, alpha_n"}};
    for (const auto& [name, help] : commands) {
        auto* sub = app.add_subcommand(name, help);
        sub->add_option("config", config_path, "configuration file")->required();
        sub->add_option("--digits", digits, "working precision in decimal digits");
        sub->add_option("--print-digits", print_digits, "significant digits printed");
        sub->add_option("--k", k, "maximum level");
        sub->add_option("--workers", workers, "worker threads (does not change results)");
        sub->add_option("--format", format, "plain or csv")->check(CLI::IsMember({"plain", "csv"}));
        if (name == "validate") sub->add_flag("--echo", echo, "print the canonical configuration");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kConfigError;
    }
    const std::string command = app.get_subcommands().front()->get_name();

    try {
        const auto raw = parse_config_file(config_path);
        const auto rc = build_run_config(raw, {digits, k, print_digits, workers, format});
        return run_command(command, rc, echo);
    } catch (const config_error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kConfigError;
    } catch (const validation_error& e) {
        std::cerr << "validation failed: " << e.what() << "\n";
        return kValidationError;
    } catch (const numeric_error& e) {
        std::cerr << "numeric failure: " << e.what() << "\n";
        return kNumericError;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kConfigError;
    }
}
