#pragma once

// Box-stream generators and the dichotomy harness: grow prefixes of a stream
// and track scattered-set size against transversal size. For every prefix
// either tau stays bounded or the scattered set keeps growing.

#include <cstdint>
#include <optional>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "kflat/construction.hpp"
#include "kflat/core.hpp"
#include "kflat/scattered.hpp"
#include "kflat/transversal.hpp"

namespace kflat {

enum class GeneratorKind { staircase, bounded_tau, accumulation, counterexample_union, custom };

inline const char* to_string(GeneratorKind k) {
    switch (k) {
        case GeneratorKind::staircase: return "staircase";
        case GeneratorKind::bounded_tau: return "bounded_tau";
        case GeneratorKind::accumulation: return "accumulation";
        case GeneratorKind::counterexample_union: return "counterexample_union";
        case GeneratorKind::custom: return "custom";
    }
    return "?";
}

inline GeneratorKind parse_generator_kind(const std::string& s) {
    if (s == "staircase") return GeneratorKind::staircase;
    if (s == "bounded_tau") return GeneratorKind::bounded_tau;
    if (s == "accumulation") return GeneratorKind::accumulation;
    if (s == "counterexample_union") return GeneratorKind::counterexample_union;
    if (s == "custom" || s == "custom-file") return GeneratorKind::custom;
    throw std::invalid_argument("unknown generator kind \"" + s + "\"");
}

/// Parameters per kind:
///  - staircase: S_i = [2i, 2i+1]^d.
///  - bounded_tau: box i contains a point of flat (i mod tau_star); flat j pins
///    axes 1..d-k at 10*j. Remaining sides are pseudo-random quarter-grid
///    intervals drawn from `seed`.
///  - accumulation: axis 1 side [c - 2^-i, c - 2^-(i+1)], other sides [i, i+1].
///  - counterexample_union: B_{n,m} for n = 1..n_max, m = 1..m_max (n outer).
///  - custom: the boxes of `custom_family`, in order.
struct GeneratorSpec {
    GeneratorKind kind = GeneratorKind::staircase;
    std::size_t d = 2;
    int k = 0;
    std::uint64_t seed = 1;
    std::size_t tau_star = 1;
    Rational accumulation_point = Rational(1);
    std::uint64_t n_max = 1;
    std::uint64_t m_max = 1;
    std::optional<Family> custom_family;
};

namespace detail {

/// Uniform integer in [lo, hi] from raw engine output (portable across
/// standard libraries, unlike std::uniform_int_distribution).
inline std::int64_t draw(std::mt19937_64& rng, std::int64_t lo, std::int64_t hi) {
    auto span = static_cast<std::uint64_t>(hi - lo + 1);
    return lo + static_cast<std::int64_t>(rng() % span);
}

}  // namespace detail

inline std::vector<Box> generate(const GeneratorSpec& spec, std::size_t count) {
    if (spec.d == 0) throw std::invalid_argument("generate: d must be >= 1");
    std::vector<Box> out;
    out.reserve(count);
    const std::size_t d = spec.d;

    switch (spec.kind) {
        case GeneratorKind::staircase:
            for (std::size_t i = 1; i <= count; ++i)
                out.emplace_back(std::vector<Interval>(d, Interval(Rational(2 * i), Rational(2 * i + 1))));
            break;

        case GeneratorKind::bounded_tau: {
            detail::require_k(spec.k, d, "generate(bounded_tau)");
            if (spec.tau_star == 0) throw std::invalid_argument("generate(bounded_tau): tau_star must be >= 1");
            std::mt19937_64 rng(spec.seed);
            const std::size_t pinned = d - static_cast<std::size_t>(spec.k);
            for (std::size_t i = 0; i < count; ++i) {
                const Rational centre(static_cast<std::int64_t>(10 * (i % spec.tau_star)));
                std::vector<Interval> sides;
                for (std::size_t a = 0; a < d; ++a) {
                    if (a < pinned) {
                        Rational below(mpz_class(detail::draw(rng, 0, 2)), mpz_class(4));
                        Rational above(mpz_class(detail::draw(rng, 0, 2)), mpz_class(4));
                        sides.emplace_back(centre - below, centre + above);
                    } else {
                        Rational lo(mpz_class(detail::draw(rng, -20, 20)), mpz_class(4));
                        Rational w(mpz_class(detail::draw(rng, 0, 8)), mpz_class(4));
                        sides.emplace_back(lo, lo + w);
                    }
                }
                out.emplace_back(std::move(sides));
            }
            break;
        }

        case GeneratorKind::accumulation:
            for (std::size_t i = 1; i <= count; ++i) {
                std::vector<Interval> sides;
                const auto e = static_cast<std::int64_t>(i);
                sides.emplace_back(spec.accumulation_point - Rational::pow2(-e),
                                   spec.accumulation_point - Rational::pow2(-e - 1));
                for (std::size_t a = 1; a < d; ++a) sides.emplace_back(Rational(i), Rational(i + 1));
                out.emplace_back(std::move(sides));
            }
            break;

        case GeneratorKind::counterexample_union:
            for (std::uint64_t n = 1; n <= spec.n_max && out.size() < count; ++n)
                for (std::uint64_t m = 1; m <= spec.m_max && out.size() < count; ++m)
                    out.push_back(counterexample_box(n, m, d));
            break;

        case GeneratorKind::custom:
            if (!spec.custom_family) throw std::invalid_argument("generate(custom): no family supplied");
            if (spec.custom_family->dim() != d) throw DimensionMismatch("generate(custom): dimension mismatch");
            for (std::size_t i = 0; i < count && i < spec.custom_family->size(); ++i)
                out.push_back((*spec.custom_family)[i]);
            break;
    }
    return out;
}

// ---------------------------------------------------------------------------

struct DichotomyRow {
    std::size_t prefix = 0;
    std::size_t greedy_scattered = 0;
    std::optional<std::size_t> exact_tau;  ///< empty past the cap or on budget exhaustion
    std::size_t greedy_tau = 0;
    std::optional<bool> heavy;             ///< tau_k > t, empty if undecided

    friend bool operator==(const DichotomyRow&, const DichotomyRow&) = default;
};

struct DichotomyReport {
    GeneratorKind kind = GeneratorKind::staircase;
    std::size_t d = 0;
    int k = 0;
    std::size_t t = 0;
    std::uint64_t seed = 0;
    std::vector<DichotomyRow> rows;

    friend bool operator==(const DichotomyReport&, const DichotomyReport&) = default;
};

/// Every prefix size up to 50, then roughly 1.25x geometric spacing, always
/// ending at `steps`.
inline std::vector<std::size_t> checkpoints(std::size_t steps) {
    std::vector<std::size_t> out;
    for (std::size_t p = 1; p <= steps && p <= 50; ++p) out.push_back(p);
    std::size_t p = 50;
    while (p < steps) {
        p = std::min(steps, std::max(p + 1, p + p / 4));
        out.push_back(p);
    }
    return out;
}

inline DichotomyReport dichotomy_run(const GeneratorSpec& spec, int k, std::size_t steps, std::size_t t,
                                     const SolverLimits& limits = {}) {
    if (steps == 0) throw std::invalid_argument("dichotomy_run: steps must be >= 1");
    detail::require_k(k, spec.d, "dichotomy_run");
    const auto boxes = generate(spec, steps);
    const Family all(spec.d, boxes);
    DichotomyReport report{spec.kind, spec.d, k, t, spec.seed, {}};

    for (auto p : checkpoints(boxes.size())) {
        const Family prefix = all.prefix(p);
        DichotomyRow row;
        row.prefix = p;
        row.greedy_scattered = greedy_scattered(prefix, k).size();
        row.greedy_tau = greedy_transversal(prefix, k).size();
        auto exact = min_transversal(prefix, k, limits);
        if (exact.exact()) row.exact_tau = exact.cert.size();
        if (row.exact_tau) row.heavy = *row.exact_tau > t;
        else if (row.greedy_tau <= t) row.heavy = false;
        else if (row.greedy_scattered > t) row.heavy = true;

        if (row.greedy_scattered > row.greedy_tau || (row.exact_tau && row.greedy_scattered > *row.exact_tau))
            throw std::logic_error("dichotomy_run: weak duality violated at prefix " + std::to_string(p));
        report.rows.push_back(row);
    }
    return report;
}

namespace detail {
inline std::string cell(const std::optional<std::size_t>& v) { return v ? std::to_string(*v) : "unknown"; }
inline std::string cell(const std::optional<bool>& v) { return v ? (*v ? "true" : "false") : "unknown"; }
}  // namespace detail

inline std::string to_csv(const DichotomyReport& r) {
    std::ostringstream os;
    os << "prefix,greedy_scattered,exact_tau,greedy_tau,heavy\n";
    for (const auto& row : r.rows)
        os << row.prefix << ',' << row.greedy_scattered << ',' << detail::cell(row.exact_tau) << ','
           << row.greedy_tau << ',' << detail::cell(row.heavy) << '\n';
    return os.str();
}

}  // namespace kflat
