// kflat: command-line front end. Every subcommand reads JSON documents
// (a path or "-" for stdin) and writes JSON or CSV to stdout.
//
// Exit codes: 0 success, 1 verification failed, 2 budget or cap exhausted,
// 3 invalid input.

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <iterator>
#include <sstream>
#include <string>

#include <unistd.h>

#include <CLI11.hpp>

#include "kflat/kflat.hpp"

namespace {

using kflat::io::json;

constexpr int kOk = 0;
constexpr int kVerifyFailed = 1;
constexpr int kBudget = 2;
constexpr int kInvalid = 3;

bool use_color() { return std::getenv("NO_COLOR") == nullptr && ::isatty(STDERR_FILENO); }

void diag(const char* tag, const char* color, const std::string& msg) {
    if (use_color()) std::cerr << "\033[" << color << "m" << tag << ":\033[0m " << msg << "\n";
    else std::cerr << tag << ": " << msg << "\n";
}
void error(const std::string& msg) { diag("error", "1;31", msg); }
void warn(const std::string& msg) { diag("warning", "1;33", msg); }
void note(const std::string& msg) { diag("note", "1;36", msg); }

std::string slurp(const std::string& path) {
    if (path == "-") return {std::istreambuf_iterator<char>(std::cin), {}};
    std::ifstream in(path);
    if (!in) throw kflat::io::InputError("cannot read " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct Options {
    std::string input;
    std::string family_path;
    int k = -1;
    std::size_t t = 0;
    std::size_t budget = kflat::SolverLimits{}.node_budget;
    std::size_t cap = kflat::SolverLimits{}.cap;
    std::size_t hyperplane_cap = kflat::SolverLimits{}.hyperplane_cap;
    std::string mode;
    std::string format = "json";
    std::uint64_t seed = 1;
    int approx = -1;
    std::size_t depth = 20;
    bool no_evidence = false;
    std::size_t limit = 0;
    // generators
    std::size_t d = 1;
    std::uint64_t n = 1, m = 1, n_max = 0;
    bool sequence = false;
    std::string kind = "staircase";
    std::size_t steps = 100;
    std::size_t tau_star = 1;
    std::string accumulation_point = "1";
    std::size_t box_index = 1;
    std::uint64_t enum_budget = 1'000'000;

    [[nodiscard]] kflat::SolverLimits limits() const { return {budget, cap, hyperplane_cap}; }
};

int resolve_k(const Options& o, std::size_t d) {
    if (o.k < 0) return static_cast<int>(d) - 1;
    return o.k;
}

void emit(const json& j) {
    std::cout << j.dump(2) << "\n";
}

json approx_point(const kflat::Point& p, int places) {
    json out = json::array();
    for (const auto& q : p) out.push_back(q.to_decimal(places));
    return out;
}

// ---------------------------------------------------------------------------

int cmd_solve(const Options& o) {
    auto family = kflat::io::parse_family(slurp(o.input));
    const int k = resolve_k(o, family.dim());
    json out;
    int code = kOk;
    if (o.mode == "greedy") {
        out = kflat::io::to_json(kflat::greedy_transversal(family, k));
        note("greedy transversal of size " + std::to_string(out["flats"].size()));
    } else {
        auto res = kflat::min_transversal(family, k, o.limits());
        out = kflat::io::to_json(res.cert);
        std::string msg = std::string(kflat::to_string(res.status)) + ", " + std::to_string(res.cert.size()) +
                          " flats, lower bound " + std::to_string(res.lower_bound) + ", " +
                          std::to_string(res.nodes) + " nodes";
        if (res.exact()) note(msg);
        else {
            warn(msg);
            code = kBudget;
        }
    }
    if (o.approx >= 0) {
        json flats = json::array();
        for (const auto& f : out["flats"]) {
            json fixed = json::object();
            for (auto it = f["fixed"].begin(); it != f["fixed"].end(); ++it)
                fixed[it.key()] = kflat::Rational::parse(it.value().get<std::string>()).to_decimal(o.approx);
            flats.push_back(fixed);
        }
        out["approx"] = json{{"flats", flats}};
    }
    emit(out);
    return code;
}

int cmd_scatter(const Options& o) {
    auto family = kflat::io::parse_family(slurp(o.input));
    const int k = resolve_k(o, family.dim());
    kflat::ScatteredCert cert;
    if (o.mode == "greedy") cert = o.limit ? kflat::greedy_scattered(family, k, o.limit) : kflat::greedy_scattered(family, k);
    else if (o.mode == "slicing") cert = kflat::scattered_by_slicing(family, k, o.t, o.limits());
    else cert = kflat::max_scattered(family, k, o.limits());
    if (o.no_evidence) cert.evidence.clear();
    else if (cert.evidence.empty()) kflat::attach_evidence(cert, family);
    emit(kflat::io::to_json(cert));
    if (!cert.complete) {
        warn("computation cut short; certificate is valid but not proven maximum");
        return kBudget;
    }
    return kOk;
}

int cmd_rainbow(const Options& o) {
    auto seq = kflat::io::parse_family_sequence(slurp(o.input));
    const int k = resolve_k(o, seq.dim());
    auto cert = o.limit ? kflat::rainbow_scattered(seq, k, o.limit) : kflat::rainbow_scattered(seq, k);
    emit(kflat::io::to_json(cert));
    note(std::to_string(cert.picks.size()) + " picks");
    return kOk;
}

int cmd_refine(const Options& o) {
    auto family = kflat::io::parse_family(slurp(o.input));
    const int k = resolve_k(o, family.dim());
    auto r = kflat::strip_refine(family, k, o.t, o.depth, o.limits());
    auto out = kflat::io::to_json(r);
    if (o.approx >= 0) {
        json est = json::object();
        for (const auto& [axis, v] : r.estimates) est[std::to_string(axis)] = v.to_decimal(o.approx);
        out["approx"] = json{{"estimates", est}};
    }
    emit(out);
    if (r.trace.empty()) note("family is not " + std::to_string(o.t) + "-heavy; nothing to refine");
    if (!r.complete) {
        warn("a heaviness test was undecided within the budget");
        return kBudget;
    }
    return kOk;
}

int cmd_gen_cex(const Options& o) {
    if (o.d == 0) throw std::invalid_argument("--d must be >= 1");
    if (o.sequence) {
        emit(kflat::io::to_json(kflat::counterexample_sequence(o.n_max ? o.n_max : o.n, o.d, o.m)));
    } else if (o.n_max) {
        emit(kflat::io::to_json(kflat::counterexample_union(o.n_max, o.d, o.m)));
    } else {
        emit(kflat::io::to_json(kflat::counterexample_family(o.n, o.d, o.m)));
    }
    return kOk;
}

int cmd_witness(const Options& o) {
    auto family = kflat::io::parse_family(slurp(o.input));
    if (o.box_index == 0 || o.box_index > family.size())
        throw kflat::io::InputError("--box " + std::to_string(o.box_index) + " is out of range (family has " +
                                    std::to_string(family.size()) + " boxes)");
    auto res = kflat::nesting_witness(family[o.box_index - 1], o.enum_budget);
    if (!res.witness) {
        warn("no rational point found within " + std::to_string(res.steps) + " enumeration steps");
        return kBudget;
    }
    auto out = kflat::io::to_json(*res.witness);
    if (o.approx >= 0)
        out["approx"] = json{{"epsilon", res.witness->epsilon.to_decimal(o.approx)},
                             {"point", approx_point(res.witness->point, o.approx)}};
    emit(out);
    note("r = " + std::to_string(res.witness->r) + " after " + std::to_string(res.steps) + " steps");
    return kOk;
}

int cmd_dichotomy(const Options& o) {
    kflat::GeneratorSpec spec;
    spec.kind = kflat::parse_generator_kind(o.kind);
    spec.d = o.d;
    spec.k = resolve_k(o, o.d);
    spec.seed = o.seed;
    spec.tau_star = o.tau_star;
    spec.accumulation_point = kflat::Rational::parse(o.accumulation_point);
    spec.n_max = o.n_max ? o.n_max : o.n;
    spec.m_max = o.m;
    if (spec.kind == kflat::GeneratorKind::custom) {
        if (o.family_path.empty()) throw kflat::io::InputError("--gen custom needs --family FILE");
        spec.custom_family = kflat::io::parse_family(slurp(o.family_path));
        spec.d = spec.custom_family->dim();
        spec.k = resolve_k(o, spec.d);
    }
    auto report = kflat::dichotomy_run(spec, spec.k, o.steps, o.t, o.limits());
    if (o.format == "csv") std::cout << kflat::to_csv(report);
    else emit(kflat::io::to_json(report));
    return kOk;
}

int cmd_verify(const Options& o) {
    auto cert = kflat::io::detail::parse_text(slurp(o.input));
    auto type = kflat::io::certificate_type(cert);
    auto report = [](bool ok, const std::string& msg) {
        if (ok) {
            std::cout << "ok\n";
            return kOk;
        }
        std::cout << "FAILED: " << msg << "\n";
        return kVerifyFailed;
    };
    auto need_family = [&] {
        if (o.family_path.empty()) throw kflat::io::InputError("verify " + type + " needs --family FILE");
        return slurp(o.family_path);
    };
    if (type == "transversal") {
        auto family = kflat::io::parse_family(need_family());
        auto v = kflat::verify_transversal(family, kflat::io::transversal_from_json(cert));
        return report(v.ok, v.message);
    }
    if (type == "scattered") {
        auto family = kflat::io::parse_family(need_family());
        auto v = kflat::verify_scattered(family, kflat::io::scattered_from_json(cert));
        return report(v.ok, v.message);
    }
    if (type == "rainbow") {
        auto seq = kflat::io::parse_family_sequence(need_family());
        auto v = kflat::verify_rainbow(seq, kflat::io::rainbow_from_json(cert));
        return report(v.ok, v.message);
    }
    if (type == "nesting") {
        auto v = kflat::verify_nesting(kflat::io::nesting_from_json(cert));
        return report(v.ok, v.message);
    }
    throw kflat::io::InputError("field /type: unknown certificate type \"" + type + "\"");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Axis-parallel boxes and k-flats: transversals, scattered sets and counterexample certificates"};
    app.require_subcommand(1);
    app.set_version_flag("--version", "kflat 0.1.0");
    Options o;

    auto common = [&](CLI::App* sub, bool with_input = true) {
        if (with_input) sub->add_option("input", o.input, "JSON document, or - for stdin")->required();
        sub->add_option("--k", o.k, "flat dimension (default d-1)")->check(CLI::NonNegativeNumber);
        sub->add_option("--budget", o.budget, "search node budget")->check(CLI::PositiveNumber);
        sub->add_option("--cap", o.cap, "largest family solved exactly for k < d-1");
        sub->add_option("--hyperplane-cap", o.hyperplane_cap, "largest family solved exactly for k = d-1");
    };

    auto* solve = app.add_subcommand("solve", "minimum (or greedy) k-flat transversal");
    common(solve);
    solve->add_option("--mode", o.mode, "exact or greedy")->check(CLI::IsMember({"exact", "greedy"}));
    solve->add_option("--approx-decimals", o.approx, "add display-only decimal values")->check(CLI::NonNegativeNumber);

    auto* scatter = app.add_subcommand("scatter", "scattered subfamily (pairwise not co-stabbable)");
    common(scatter);
    scatter->add_option("--mode", o.mode, "max, greedy or slicing")->check(CLI::IsMember({"max", "greedy", "slicing"}));
    scatter->add_option("--t", o.t, "heaviness threshold for slicing");
    scatter->add_option("--limit", o.limit, "greedy: scan only the first N boxes");
    scatter->add_flag("--no-evidence", o.no_evidence, "omit per-pair evidence");

    auto* rainbow = app.add_subcommand("rainbow", "one box per family, pairwise scattered");
    common(rainbow);
    rainbow->add_option("--limit", o.limit, "scan only the first N families");

    auto* refine = app.add_subcommand("refine", "nested strip refinement around an accumulation point");
    common(refine);
    refine->add_option("--t", o.t, "heaviness threshold")->required();
    refine->add_option("--depth", o.depth, "maximum number of halvings");
    refine->add_option("--approx-decimals", o.approx, "add display-only decimal estimates")->check(CLI::NonNegativeNumber);

    auto* gen = app.add_subcommand("gen-cex", "counterexample boxes B_{n,m}");
    gen->add_option("--d", o.d, "dimension")->required();
    gen->add_option("--n", o.n, "family index n (1-based)")->check(CLI::PositiveNumber);
    gen->add_option("--m", o.m, "boxes per family")->check(CLI::PositiveNumber);
    gen->add_option("--n-max", o.n_max, "emit the union of families 1..N");
    gen->add_flag("--sequence", o.sequence, "emit families 1..n-max as a family sequence");

    auto* witness = app.add_subcommand("witness", "nesting witness for one box of a family");
    witness->add_option("input", o.input, "family document, or - for stdin")->required();
    witness->add_option("--box", o.box_index, "1-based box index")->check(CLI::PositiveNumber);
    witness->add_option("--budget", o.enum_budget, "enumeration budget")->check(CLI::PositiveNumber);
    witness->add_option("--approx-decimals", o.approx, "add display-only decimal values")->check(CLI::NonNegativeNumber);

    auto* dich = app.add_subcommand("dichotomy", "growth of scattered sets against transversal size");
    common(dich, false);
    dich->add_option("--gen", o.kind, "staircase, bounded_tau, accumulation, counterexample_union or custom");
    dich->add_option("--family", o.family_path, "family document for --gen custom");
    dich->add_option("--d", o.d, "dimension");
    dich->add_option("--t", o.t, "heaviness threshold");
    dich->add_option("--steps", o.steps, "stream length")->check(CLI::PositiveNumber);
    dich->add_option("--seed", o.seed, "generator seed");
    dich->add_option("--tau-star", o.tau_star, "bounded_tau: number of planted flats");
    dich->add_option("--accumulation-point", o.accumulation_point, "accumulation: limit coordinate");
    dich->add_option("--n-max", o.n_max, "counterexample_union: families 1..N");
    dich->add_option("--m", o.m, "counterexample_union: boxes per family");
    dich->add_option("--format", o.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));

    auto* verify = app.add_subcommand("verify", "check a certificate");
    verify->add_option("input", o.input, "certificate document, or - for stdin")->required();
    verify->add_option("--family", o.family_path, "family (or family sequence for rainbow) the certificate refers to");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        error(e.what());
        return kInvalid;
    }

    try {
        if (*solve) return cmd_solve(o);
        if (*scatter) return cmd_scatter(o);
        if (*rainbow) return cmd_rainbow(o);
        if (*refine) return cmd_refine(o);
        if (*gen) return cmd_gen_cex(o);
        if (*witness) return cmd_witness(o);
        if (*dich) return cmd_dichotomy(o);
        if (*verify) return cmd_verify(o);
    } catch (const std::invalid_argument& e) {  // InputError, ParseError, DimensionMismatch
        error(e.what());
        return kInvalid;
    } catch (const std::out_of_range& e) {
        error(e.what());
        return kInvalid;
    } catch (const std::exception& e) {
        error(std::string("internal: ") + e.what());
        return 4;
    }
    return kOk;
}
