#pragma once

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cstdint>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <regex>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "egyptfrac/absorption.hpp"
#include "egyptfrac/counting.hpp"
#include "egyptfrac/entropy.hpp"
#include "egyptfrac/errors.hpp"
#include "egyptfrac/exactmath.hpp"
#include "egyptfrac/modelsim.hpp"
#include "egyptfrac/modular.hpp"
#include "egyptfrac/rational.hpp"

namespace egyptfrac {

inline constexpr const char* kVersion = "0.1.0";

/// Environment variable naming the directory for relative --out / --trace paths.
inline constexpr const char* kOutputDirEnv = "EGYPTFRAC_OUTPUT_DIR";

/// Parses "[+-]digits" or "[+-]digits/digits" exactly.
inline Rational parse_rational(const std::string& text) {
    static const std::regex pattern(R"(^([+-]?[0-9]+)(?:/([0-9]+))?$)");
    std::smatch m;
    if (!std::regex_match(text, m, pattern)) {
        throw usage_error("malformed rational '" + text + "' (expected p or p/q)");
    }
    const BigInt num(m[1].str().front() == '+' ? m[1].str().substr(1) : m[1].str());
    BigInt den = 1;
    if (m[2].matched) den = BigInt(m[2].str());
    if (den.is_zero()) throw usage_error("rational '" + text + "' has zero denominator");
    return Rational(num, den);
}

/// Comma-separated positive integers, e.g. "2,3,6".
inline std::vector<std::uint64_t> parse_int_list(const std::string& text) {
    std::vector<std::uint64_t> out;
    if (text.empty()) return out;
    std::stringstream ss(text);
    std::string item;
    static const std::regex digits(R"(^[0-9]+$)");
    while (std::getline(ss, item, ',')) {
        if (!std::regex_match(item, digits)) throw usage_error("malformed integer list entry '" + item + "'");
        out.push_back(std::stoull(item));
    }
    return out;
}

namespace cli {

using nlohmann::json;

inline std::string iso_time(std::chrono::system_clock::time_point t) {
    const std::time_t tt = std::chrono::system_clock::to_time_t(t);
    std::tm tm{};
    gmtime_r(&tt, &tm);
    const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(t.time_since_epoch()).count() % 1000;
    std::ostringstream os;
    os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%S") << '.' << std::setw(3) << std::setfill('0') << ms << 'Z';
    return os.str();
}

inline std::filesystem::path resolve_output(const std::string& path) {
    std::filesystem::path p(path);
    if (p.is_relative()) {
        if (const char* dir = std::getenv(kOutputDirEnv); dir != nullptr && *dir != '\0') {
            return std::filesystem::path(dir) / p;
        }
    }
    return p;
}


/// Trace document for one construction:
/// {"n","x","base_set","steps":[{"q","B","x_after"}],"x_f","D","A","verified"}.
inline json trace_to_json(const AbsorptionTrace& t) {
    json steps = json::array();
    for (const auto& st : t.steps) {
        steps.push_back({{"q", st.q}, {"B", st.B}, {"x_after", st.x_after.str()}});
    }
    return {{"n", t.n},           {"x", t.x.str()},   {"base_set", t.base_set},
            {"steps", steps},     {"x_f", t.x_f.str()}, {"D", t.D},
            {"A", t.final_set},   {"verified", t.success}};
}

/// Re-checks a trace document from its own fields: every step subtracts
/// s(q B) exactly, and A is a valid representation of x.
inline bool verify_trace_json(const json& doc) {
    const auto n = doc.at("n").get<std::uint64_t>();
    const Rational x = parse_rational(doc.at("x").get<std::string>());
    const auto base = doc.at("base_set").get<std::vector<std::uint64_t>>();
    Rational cur = x - reciprocal_sum(base);
    for (const auto& st : doc.at("steps")) {
        const auto q = st.at("q").get<std::uint64_t>();
        std::vector<std::uint64_t> elems;
        for (auto b : st.at("B").get<std::vector<std::uint64_t>>()) elems.push_back(q * b);
        cur -= reciprocal_sum(elems);
        if (cur != parse_rational(st.at("x_after").get<std::string>())) return false;
    }
    if (cur != parse_rational(doc.at("x_f").get<std::string>())) return false;
    return verify_representation(doc.at("A").get<std::vector<std::uint64_t>>(), n, x);
}

/// Required result keys per subcommand.
inline const std::map<std::string, std::vector<std::string>>& result_schema() {
    static const std::map<std::string, std::vector<std::string>> schema{
        {"count", {"n", "x", "mode", "method", "count"}},
        {"entropy", {"n", "x", "c", "H", "H_per_n", "saturated"}},
        {"lambda", {"x", "lambda", "residual"}},
        {"cx", {"x", "lambda", "c_x"}},
        {"simulate", {"mean", "variance", "estimate", "stderr", "trials", "seed"}},
        {"modcover", {"q", "interval", "smax", "reachable", "total", "max_min_size", "histogram"}},
        {"construct", {"n", "x", "witnesses", "successes", "distinct"}},
        {"sieve", {"n", "t", "powersmooth_count"}},
        {"verify", {"verified"}},
    };
    return schema;
}

/// Structural check of a RunRecord document.
inline bool validate_run_record(const json& rec) {
    for (const char* key : {"command", "parameters", "result", "started", "finished", "version"}) {
        if (!rec.contains(key)) return false;
    }
    if (!rec["command"].is_string() || !rec["parameters"].is_object() || !rec["result"].is_object()) return false;
    if (rec["started"].get<std::string>() > rec["finished"].get<std::string>()) return false;
    const auto it = result_schema().find(rec["command"].get<std::string>());
    if (it == result_schema().end()) return false;
    for (const auto& key : it->second) {
        if (!rec["result"].contains(key)) return false;
    }
    return true;
}

struct Outcome {
    json result = json::object();
    json parameters = json::object();
    /// rows for --format csv; empty header means CSV is unsupported
    std::vector<std::string> csv_header;
    std::vector<std::vector<std::string>> csv_rows;
    bool truncated = false;
    int exit_code = 0;
};

}  // namespace cli

/// Runs one subcommand. Exit codes: 0 success, 1 domain or numeric failure,
/// 2 usage error, 3 wall-clock budget exceeded.
inline int run(const std::vector<std::string>& argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
    using cli::json;
    CLI::App app{"Egyptian fraction counting, entropy constants and constructive representations", "egyptfrac"};
    app.require_subcommand(1);
    app.fallthrough();
    std::string format = "json";
    std::string out_path;
    double budget = 0.0;
    app.add_option("--format", format, "json (default) or csv")->check(CLI::IsMember({"json", "csv"}));
    app.add_option("--out", out_path, "write output to this path instead of stdout");
    app.add_option("--budget", budget, "wall-clock budget in seconds (0 = unlimited)")->check(CLI::NonNegativeNumber);
    app.set_version_flag("--version", kVersion);

    std::uint64_t n = 0;
    std::string x_text;
    std::string mode_text = "exact";
    std::string method_text = "auto";
    auto* count_cmd = app.add_subcommand("count", "count subsets of [n] with reciprocal sum = x or <= x");
    count_cmd->add_option("--n", n)->required()->check(CLI::PositiveNumber);
    count_cmd->add_option("--x", x_text)->required();
    count_cmd->add_option("--mode", mode_text)->check(CLI::IsMember({"exact", "at_most", "atmost"}));
    count_cmd->add_option("--method", method_text)->check(CLI::IsMember({"auto", "brute", "mitm"}));

    auto* entropy_cmd = app.add_subcommand("entropy", "discrete maximum-entropy profile on [n]");
    entropy_cmd->add_option("--n", n)->required()->check(CLI::PositiveNumber);
    entropy_cmd->add_option("--x", x_text)->required();

    auto* lambda_cmd = app.add_subcommand("lambda", "continuous Lagrange parameter lambda(x)");
    lambda_cmd->add_option("--x", x_text)->required();

    auto* cx_cmd = app.add_subcommand("cx", "growth constant c_x");
    cx_cmd->add_option("--x", x_text)->required();

    std::uint64_t trials = 100000;
    std::uint64_t seed = 1;
    std::string threshold_text;
    auto* sim_cmd = app.add_subcommand("simulate", "Monte Carlo estimate of Pr[Z <= x] under the entropy profile");
    sim_cmd->add_option("--n", n)->required()->check(CLI::PositiveNumber);
    sim_cmd->add_option("--x", x_text)->required();
    sim_cmd->add_option("--trials", trials)->check(CLI::PositiveNumber);
    sim_cmd->add_option("--seed", seed);
    sim_cmd->add_option("--threshold", threshold_text, "compare Z against this value instead of x");

    std::uint64_t q = 0;
    std::string interval_text;
    unsigned smax = 0;
    auto* mod_cmd = app.add_subcommand("modcover", "residues mod q reachable as sums of inverses of an interval");
    mod_cmd->add_option("--q", q)->required()->check(CLI::PositiveNumber);
    mod_cmd->add_option("--interval", interval_text, "lo:hi")->required();
    mod_cmd->add_option("--smax", smax)->required();

    unsigned witnesses = 1;
    std::string trace_path;
    std::uint64_t L = 4;
    double eta = 0.25;
    auto* con_cmd = app.add_subcommand("construct", "build representations of x by absorption");
    con_cmd->add_option("--n", n)->required()->check(CLI::PositiveNumber);
    con_cmd->add_option("--x", x_text)->required();
    con_cmd->add_option("--seed", seed);
    con_cmd->add_option("--count", witnesses)->check(CLI::PositiveNumber);
    con_cmd->add_option("--trace", trace_path, "write the trace document(s) to this path");
    con_cmd->add_option("--L", L);
    con_cmd->add_option("--eta", eta);

    std::uint64_t t_bound = 0;
    auto* sieve_cmd = app.add_subcommand("sieve", "count t-powersmooth integers up to n");
    sieve_cmd->add_option("--n", n)->required()->check(CLI::PositiveNumber);
    sieve_cmd->add_option("--t", t_bound)->required()->check(CLI::PositiveNumber);

    std::string set_text;
    std::string verify_trace;
    auto* verify_cmd = app.add_subcommand("verify", "check that a set represents x, or re-check a trace file");
    verify_cmd->add_option("--x", x_text);
    verify_cmd->add_option("--set", set_text, "comma-separated elements");
    verify_cmd->add_option("--n", n);
    verify_cmd->add_option("--trace", verify_trace, "trace document written by construct");

    std::vector<std::string> args(argv.rbegin(), argv.rend());
    try {
        app.parse(args);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForVersion&) {
        out << kVersion << '\n';
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n\n" << app.help();
        return 2;
    }

    CLI::App* sub = app.get_subcommands().front();
    const std::string command = sub->get_name();
    const auto wall_start = std::chrono::system_clock::now();
    const auto start = std::chrono::steady_clock::now();
    std::optional<std::chrono::steady_clock::time_point> deadline;
    if (budget > 0) {
        deadline = start + std::chrono::duration_cast<std::chrono::steady_clock::duration>(std::chrono::duration<double>(budget));
    }

    cli::Outcome oc;
    try {
        if (command == "count") {
            const Rational x = parse_rational(x_text);
            CountQuery query{n, x, mode_text == "exact" ? CountMode::Exact : CountMode::AtMost};
            CountResult res = [&] {
                if (method_text == "brute") return count_brute(query);
                if (method_text == "mitm") return count_mitm(query);
                return n <= 16 ? count_brute(query) : count_mitm(query);
            }();
            oc.parameters = {{"n", n}, {"x", x.str()}, {"mode", std::string(to_string(query.mode))}, {"method", method_text}};
            oc.result = {{"n", n},
                         {"x", x.str()},
                         {"mode", std::string(to_string(query.mode))},
                         {"method", std::string(to_string(res.method))},
                         {"count", res.count.str()}};
        } else if (command == "entropy") {
            const Rational x = parse_rational(x_text);
            const auto prof = discrete_profile(n, x.to_double());
            double mass = 0.0;
            for (std::uint64_t m = 1; m <= n; ++m) mass += prof.p[m - 1] / static_cast<double>(m);
            oc.parameters = {{"n", n}, {"x", x.str()}};
            oc.result = {{"n", n},
                         {"x", x.str()},
                         {"c", prof.c},
                         {"H", prof.H},
                         {"H_per_n", prof.H / static_cast<double>(n)},
                         {"saturated", prof.saturated},
                         {"reciprocal_mass", mass},
                         {"upper_bound_bits", entropy_upper_bound(n, x)}};
            oc.csv_header = {"m", "p_m"};
            for (std::uint64_t m = 1; m <= n; ++m) {
                std::ostringstream pm;
                pm << std::setprecision(17) << prof.p[m - 1];
                oc.csv_rows.push_back({std::to_string(m), pm.str()});
            }
        } else if (command == "lambda") {
            const Rational x = parse_rational(x_text);
            const double lam = continuous_lambda(x.to_double());
            oc.parameters = {{"x", x.str()}};
            oc.result = {{"x", x.str()},
                         {"lambda", lam},
                         {"residual", std::abs(reciprocal_mass_integral(lam) - x.to_double())}};
        } else if (command == "cx") {
            const Rational x = parse_rational(x_text);
            const auto cc = cx_constant(x.to_double());
            oc.parameters = {{"x", x.str()}};
            oc.result = {{"x", x.str()}, {"lambda", cc.lambda}, {"c_x", cc.c_x}, {"residual", cc.residual}};
        } else if (command == "simulate") {
            const Rational x = parse_rational(x_text);
            const Rational threshold = threshold_text.empty() ? x : parse_rational(threshold_text);
            const auto prof = discrete_profile(n, x.to_double());
            const auto mom = model_moments(prof);
            const auto est = estimate_prob_at_most(prof, threshold, trials, seed, deadline);
            oc.parameters = {{"n", n}, {"x", x.str()}, {"threshold", threshold.str()}, {"trials", trials}, {"seed", seed}};
            oc.result = {{"mean", est.mean},
                         {"variance", est.variance},
                         {"estimate", est.estimate},
                         {"stderr", est.std_error},
                         {"trials", est.trials},
                         {"seed", seed},
                         {"model_mean", mom.mean},
                         {"model_variance", mom.variance},
                         {"third_abs_sum", mom.third_abs_sum},
                         {"c", prof.c},
                         {"exact_comparisons", est.exact_comparisons}};
            oc.truncated = est.truncated;
        } else if (command == "modcover") {
            static const std::regex interval_re(R"(^([0-9]+):([0-9]+)$)");
            std::smatch m;
            if (!std::regex_match(interval_text, m, interval_re)) throw usage_error("--interval must look like lo:hi");
            const std::uint64_t lo = std::stoull(m[1].str());
            const std::uint64_t hi = std::stoull(m[2].str());
            if (lo > hi) throw usage_error("--interval needs lo <= hi");
            const auto inst = interval_instance(q, lo, hi, smax);
            const auto cov = residue_coverage(inst);
            oc.parameters = {{"q", q}, {"interval", interval_text}, {"smax", smax}};
            oc.result = {{"q", q},
                         {"interval", interval_text},
                         {"smax", smax},
                         {"elements", inst.elements.size()},
                         {"reachable", cov.reachable()},
                         {"total", cov.total()},
                         {"max_min_size", cov.max_min_size()},
                         {"histogram", cov.histogram()}};
            oc.csv_header = {"residue", "min_size"};
            for (std::uint64_t r = 0; r < q; ++r) oc.csv_rows.push_back({std::to_string(r), std::to_string(cov.min_size[r])});
        } else if (command == "construct") {
            const Rational x = parse_rational(x_text);
            oc.parameters = {{"n", n}, {"x", x.str()}, {"seed", seed}, {"count", witnesses}, {"L", L}, {"eta", eta}};
            json list = json::array();
            json traces = json::array();
            std::set<std::vector<std::uint64_t>> distinct;
            unsigned successes = 0;
            for (unsigned w = 0; w < witnesses; ++w) {
                if (deadline && std::chrono::steady_clock::now() > *deadline) {
                    oc.truncated = true;
                    break;
                }
                AbsorptionParams params;
                params.L = L;
                params.eta = eta;
                params.seed = seed + w;
                const auto tr = construct_representation(n, x, params);
                successes += tr.success ? 1 : 0;
                if (tr.success) distinct.insert(tr.final_set);
                json item = {{"seed", params.seed},
                             {"success", tr.success},
                             {"attempts", tr.attempts},
                             {"size", tr.final_set.size()},
                             {"steps", tr.steps.size()},
                             {"x_f", tr.x_f.str()}};
                if (!tr.success) item["failure"] = tr.failure;
                list.push_back(item);
                traces.push_back(cli::trace_to_json(tr));
            }
            oc.result = {{"n", n},
                         {"x", x.str()},
                         {"witnesses", list},
                         {"successes", successes},
                         {"distinct", distinct.size()}};
            if (!trace_path.empty()) {
                const auto path = cli::resolve_output(trace_path);
                std::ofstream f(path);
                if (!f) throw usage_error("cannot open trace file " + path.string());
                f << (witnesses == 1 && traces.size() == 1 ? traces[0] : traces).dump(2) << '\n';
            }
            if (successes < list.size()) oc.exit_code = 1;
        } else if (command == "sieve") {
            const std::uint64_t count = powersmooth_count(n, t_bound);
            oc.parameters = {{"n", n}, {"t", t_bound}};
            oc.result = {{"n", n},
                         {"t", t_bound},
                         {"powersmooth_count", count},
                         {"fraction", static_cast<double>(count) / static_cast<double>(n)}};
            if (n >= 2 && t_bound >= 2 && t_bound <= n) {
                const double u = std::log(static_cast<double>(t_bound)) / std::log(static_cast<double>(n));
                if (u > 0.5 && u <= 1.0) oc.result["smooth_density_linear"] = smooth_density_linear(u);
            }
        } else if (command == "verify") {
            if (!verify_trace.empty()) {
                std::ifstream f(verify_trace);
                if (!f) throw usage_error("cannot open trace file " + verify_trace);
                const json doc = json::parse(f);
                bool ok = true;
                if (doc.is_array()) {
                    for (const auto& d : doc) ok = ok && cli::verify_trace_json(d);
                } else {
                    ok = cli::verify_trace_json(doc);
                }
                oc.parameters = {{"trace", verify_trace}};
                oc.result = {{"verified", ok}};
            } else {
                if (x_text.empty() || set_text.empty() || n == 0) {
                    throw usage_error("verify needs --x, --set and --n (or --trace)");
                }
                const Rational x = parse_rational(x_text);
                const auto set = parse_int_list(set_text);
                oc.parameters = {{"x", x.str()}, {"set", set}, {"n", n}};
                oc.result = {{"verified", verify_representation(set, n, x)}, {"sum", reciprocal_sum(set).str()}};
            }
        }
    } catch (const usage_error& e) {
        err << "usage error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }

    const auto elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (budget > 0 && elapsed > budget) oc.truncated = true;
    if (oc.truncated) oc.result["truncated"] = true;

    std::ostringstream body;
    if (format == "csv") {
        if (oc.csv_header.empty()) {
            err << "usage error: --format csv is available for entropy and modcover only\n";
            return 2;
        }
        for (std::size_t i = 0; i < oc.csv_header.size(); ++i) body << (i ? "," : "") << oc.csv_header[i];
        body << '\n';
        for (const auto& row : oc.csv_rows) {
            for (std::size_t i = 0; i < row.size(); ++i) body << (i ? "," : "") << row[i];
            body << '\n';
        }
    } else {
        json rec = {{"command", command},
                    {"version", kVersion},
                    {"parameters", oc.parameters},
                    {"result", oc.result},
                    {"started", cli::iso_time(wall_start)},
                    {"finished", cli::iso_time(std::chrono::system_clock::now())},
                    {"elapsed_seconds", elapsed}};
        body << rec.dump() << '\n';
    }
    if (!out_path.empty()) {
        const auto path = cli::resolve_output(out_path);
        std::ofstream f(path);
        if (!f) {
            err << "error: cannot open " << path << '\n';
            return 1;
        }
        f << body.str();
    } else {
        out << body.str();
    }
    if (oc.truncated) return 3;
    return oc.exit_code;
}

inline int run(int argc, char** argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
    return run(args, out, err);
}

}  // namespace egyptfrac
