#pragma once

// Scattered subfamilies: boxes no two of which meet a common axis-parallel
// k-flat. Exact extraction for small families plus the constructive
// procedures from the hyperplane and k-flat extraction arguments: online
// greedy acceptance, strip halving towards accumulation coordinates,
// hyperplane slicing with lifting, and rainbow selection across families.

#include <algorithm>
#include <bit>
#include <concepts>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <ranges>
#include <string>
#include <utility>
#include <vector>

#include <boost/dynamic_bitset.hpp>

#include "kflat/core.hpp"
#include "kflat/transversal.hpp"

namespace kflat {

/// Co-stabbability graph at level k.
struct StabGraph {
    std::size_t n = 0;
    int k = 0;
    std::vector<std::pair<std::size_t, std::size_t>> edges;  ///< i < j, 0-based, sorted
    std::vector<boost::dynamic_bitset<>> adjacency;

    [[nodiscard]] bool adjacent(std::size_t i, std::size_t j) const { return adjacency.at(i).test(j); }
};

/// Per-pair evidence: number of axes on which the two projections overlap
/// (always < d-k for a scattered pair).
struct PairEvidence {
    std::size_t first = 0;
    std::size_t second = 0;
    std::size_t overlapping_axes = 0;
    friend bool operator==(const PairEvidence&, const PairEvidence&) = default;
};

struct ScatteredCert {
    int k = 0;
    std::vector<std::size_t> indices;  ///< 0-based box indices
    std::vector<PairEvidence> evidence;  ///< optional; see attach_evidence
    bool optimal = false;   ///< proven maximum (max_scattered only)
    bool complete = true;   ///< false when a budget or cap cut the computation short

    [[nodiscard]] std::size_t size() const { return indices.size(); }
    friend bool operator==(const ScatteredCert&, const ScatteredCert&) = default;
};

struct RainbowCert {
    int k = 0;
    /// (family index, box index within family), both 0-based.
    std::vector<std::pair<std::size_t, std::size_t>> picks;

    [[nodiscard]] std::size_t size() const { return picks.size(); }
    friend bool operator==(const RainbowCert&, const RainbowCert&) = default;
};

struct StripStep {
    Strip strip;
    std::size_t heavy_size = 0;  ///< boxes of the kept subfamily inside `strip`
};

struct StripRefinement {
    std::vector<StripStep> trace;
    std::vector<std::size_t> bounded_axes;  ///< 1-based
    std::map<std::size_t, Rational> estimates;  ///< axis -> midpoint of the last strip
    std::size_t depth = 0;  ///< halvings performed
    bool complete = true;   ///< false if some heaviness test was undecided
};

/// Outcome of a scattered-set verification; on failure names the offending pair.
struct ScatterVerifyResult {
    bool ok = true;
    std::string message;
    std::optional<std::pair<std::size_t, std::size_t>> pair;
    std::optional<AxisFlat> witness;

    explicit operator bool() const { return ok; }
};

// ---------------------------------------------------------------------------

inline StabGraph stab_graph(const Family& family, int k) {
    detail::require_k(k, family.dim(), "stab_graph");
    StabGraph g;
    g.n = family.size();
    g.k = k;
    g.adjacency.assign(g.n, boost::dynamic_bitset<>(g.n));
    for (std::size_t i = 0; i < g.n; ++i)
        for (std::size_t j = i + 1; j < g.n; ++j)
            if (are_co_stabbable(family[i], family[j], k)) {
                g.edges.emplace_back(i, j);
                g.adjacency[i].set(j);
                g.adjacency[j].set(i);
            }
    return g;
}

/// Fills in per-pair overlap counts for the certificate's boxes.
inline void attach_evidence(ScatteredCert& cert, const Family& family) {
    cert.evidence.clear();
    for (std::size_t a = 0; a < cert.indices.size(); ++a)
        for (std::size_t b = a + 1; b < cert.indices.size(); ++b)
            cert.evidence.push_back({cert.indices[a], cert.indices[b],
                                     overlap_axes(family[cert.indices[a]], family[cert.indices[b]]).size()});
}

namespace detail {

/// Exact maximum independent set on <= 64 vertices. Vertices are branched in
/// index order, include-branch first, so the first maximum found is the
/// lexicographically smallest one.
class IndependentSetSearch {
public:
    IndependentSetSearch(std::vector<std::uint64_t> adjacency, std::size_t budget)
        : adj_(std::move(adjacency)), budget_(budget) {}

    void run(std::vector<std::size_t> incumbent) {
        best_ = std::move(incumbent);
        threshold_ = best_.empty() ? 0 : best_.size() - 1;
        const std::size_t n = adj_.size();
        std::uint64_t all = n == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << n) - 1;
        std::vector<std::size_t> cur;
        dfs(all, cur);
        complete_ = !aborted_;
    }

    [[nodiscard]] const std::vector<std::size_t>& best() const { return best_; }
    [[nodiscard]] bool complete() const { return complete_; }

private:
    // Greedy clique cover of the candidate set bounds any independent subset.
    [[nodiscard]] std::size_t clique_cover(std::uint64_t cand) const {
        std::size_t cliques = 0;
        while (cand) {
            ++cliques;
            auto v = static_cast<std::size_t>(std::countr_zero(cand));
            std::uint64_t clique_common = adj_[v];
            cand &= ~(std::uint64_t{1} << v);
            std::uint64_t options = cand & clique_common;
            while (options) {
                auto u = static_cast<std::size_t>(std::countr_zero(options));
                cand &= ~(std::uint64_t{1} << u);
                clique_common &= adj_[u];
                options = cand & clique_common;
            }
        }
        return cliques;
    }

    void dfs(std::uint64_t cand, std::vector<std::size_t>& cur) {
        if (aborted_) return;
        if (++nodes_ > budget_) {
            aborted_ = true;
            return;
        }
        if (cand == 0) {
            if (cur.size() > threshold_) {
                threshold_ = cur.size();
                best_ = cur;
            }
            return;
        }
        if (cur.size() + clique_cover(cand) <= threshold_) return;
        auto v = static_cast<std::size_t>(std::countr_zero(cand));
        std::uint64_t bit = std::uint64_t{1} << v;
        cur.push_back(v);
        dfs(cand & ~bit & ~adj_[v], cur);
        cur.pop_back();
        dfs(cand & ~bit, cur);
    }

    std::vector<std::uint64_t> adj_;
    std::size_t budget_;
    std::vector<std::size_t> best_;
    std::size_t threshold_ = 0;
    std::size_t nodes_ = 0;
    bool aborted_ = false;
    bool complete_ = false;
};

}  // namespace detail

/// Online scattered selection: each box is accepted iff it shares no k-flat
/// with any previously accepted box. At the hyperplane level this is exactly
/// "avoid every strip R^{j-1} x pi_j(B_i) x R^{d-j} of the accepted boxes".
/// Processes at most `limit` boxes of the range.
template <std::ranges::input_range Boxes>
    requires std::same_as<std::remove_cvref_t<std::ranges::range_reference_t<Boxes>>, Box>
ScatteredCert greedy_scattered(Boxes&& boxes, int k, std::size_t limit = std::numeric_limits<std::size_t>::max()) {
    ScatteredCert cert;
    cert.k = k;
    std::vector<Box> accepted;
    std::size_t index = 0;
    std::optional<std::size_t> dim;
    for (auto&& box : boxes) {
        if (index >= limit) break;
        if (!dim) {
            dim = box.dim();
            detail::require_k(k, *dim, "greedy_scattered");
        }
        detail::require_same_dim(*dim, box.dim(), "greedy_scattered");
        bool compatible = true;
        for (const auto& a : accepted)
            if (are_co_stabbable(a, box, k)) {
                compatible = false;
                break;
            }
        if (compatible) {
            accepted.push_back(box);
            cert.indices.push_back(index);
        }
        ++index;
    }
    return cert;
}

inline ScatteredCert greedy_scattered(const Family& family, int k,
                                      std::size_t limit = std::numeric_limits<std::size_t>::max()) {
    detail::require_k(k, family.dim(), "greedy_scattered");
    return greedy_scattered(family.boxes(), k, limit);
}

/// Maximum scattered subfamily (maximum independent set of the stab graph),
/// lexicographically smallest among maxima. Families above `limits.hyperplane_cap`
/// or runs over `limits.node_budget` return the best set found, flagged.
inline ScatteredCert max_scattered(const Family& family, int k, const SolverLimits& limits = {}) {
    detail::require_k(k, family.dim(), "max_scattered");
    auto greedy = greedy_scattered(family, k);
    if (family.size() > std::min<std::size_t>(limits.hyperplane_cap, 64)) {
        greedy.complete = false;
        return greedy;
    }
    std::vector<std::uint64_t> adj(family.size(), 0);
    for (std::size_t i = 0; i < family.size(); ++i)
        for (std::size_t j = i + 1; j < family.size(); ++j)
            if (are_co_stabbable(family[i], family[j], k)) {
                adj[i] |= std::uint64_t{1} << j;
                adj[j] |= std::uint64_t{1} << i;
            }
    detail::IndependentSetSearch search(std::move(adj), limits.node_budget);
    search.run(greedy.indices);
    ScatteredCert cert;
    cert.k = k;
    cert.indices = search.best();
    cert.optimal = search.complete();
    cert.complete = search.complete();
    return cert;
}

namespace detail {

inline ScatterVerifyResult scatter_fail(std::string msg, std::size_t a, std::size_t b,
                                        std::optional<AxisFlat> witness = std::nullopt) {
    return {false, std::move(msg), std::make_pair(a, b), std::move(witness)};
}

inline ScatterVerifyResult check_pairwise(const std::vector<const Box*>& boxes,
                                          const std::vector<std::size_t>& labels, int k) {
    for (std::size_t a = 0; a < boxes.size(); ++a)
        for (std::size_t b = a + 1; b < boxes.size(); ++b)
            if (are_co_stabbable(*boxes[a], *boxes[b], k)) {
                auto w = co_stabbable(*boxes[a], *boxes[b], k);
                return scatter_fail("boxes " + std::to_string(labels[a] + 1) + " and " +
                                        std::to_string(labels[b] + 1) + " share a " + std::to_string(k) + "-flat",
                                    labels[a], labels[b], std::move(w));
            }
    return {};
}

}  // namespace detail

inline ScatterVerifyResult verify_scattered(const Family& family, const ScatteredCert& cert) {
    if (cert.k < 0 || static_cast<std::size_t>(cert.k) >= family.dim())
        return {false, "invalid k=" + std::to_string(cert.k), std::nullopt, std::nullopt};
    std::vector<const Box*> boxes;
    std::vector<std::size_t> seen;
    for (auto i : cert.indices) {
        if (i >= family.size())
            return {false, "index " + std::to_string(i + 1) + " out of range", std::nullopt, std::nullopt};
        if (std::find(seen.begin(), seen.end(), i) != seen.end())
            return detail::scatter_fail("duplicated index " + std::to_string(i + 1), i, i,
                                        co_stabbable(family[i], family[i], cert.k));
        seen.push_back(i);
        boxes.push_back(&family[i]);
    }
    if (auto r = detail::check_pairwise(boxes, cert.indices, cert.k); !r) return r;
    const std::size_t need = family.dim() - static_cast<std::size_t>(cert.k);
    for (const auto& e : cert.evidence) {
        if (e.first >= family.size() || e.second >= family.size())
            return {false, "evidence refers to a box out of range", std::nullopt, std::nullopt};
        auto actual = overlap_axes(family[e.first], family[e.second]).size();
        if (actual != e.overlapping_axes || actual >= need)
            return detail::scatter_fail("evidence for pair (" + std::to_string(e.first + 1) + ", " +
                                            std::to_string(e.second + 1) + ") is wrong",
                                        e.first, e.second);
    }
    return {};
}

inline ScatterVerifyResult verify_rainbow(const FamilySequence& seq, const RainbowCert& cert) {
    if (cert.k < 0 || static_cast<std::size_t>(cert.k) >= seq.dim())
        return {false, "invalid k=" + std::to_string(cert.k), std::nullopt, std::nullopt};
    std::vector<const Box*> boxes;
    std::vector<std::size_t> labels;
    for (std::size_t p = 0; p < cert.picks.size(); ++p) {
        auto [fam, box] = cert.picks[p];
        if (fam >= seq.size() || box >= seq[fam].size())
            return {false, "pick " + std::to_string(p + 1) + " out of range", std::nullopt, std::nullopt};
        if (p > 0 && fam <= cert.picks[p - 1].first)
            return {false, "family indices not strictly increasing at pick " + std::to_string(p + 1),
                    std::make_pair(p - 1, p), std::nullopt};
        boxes.push_back(&seq[fam][box]);
        labels.push_back(p);
    }
    auto r = detail::check_pairwise(boxes, labels, cert.k);
    if (!r) r.message = "picks" + r.message.substr(5);
    return r;
}

/// Greedy rainbow selection: families in order, first compatible box of each,
/// at most `limit` picks.
inline RainbowCert rainbow_scattered(const FamilySequence& seq, int k,
                                     std::size_t limit = std::numeric_limits<std::size_t>::max()) {
    detail::require_k(k, seq.dim(), "rainbow_scattered");
    RainbowCert cert;
    cert.k = k;
    std::vector<const Box*> accepted;
    for (std::size_t n = 0; n < seq.size() && cert.size() < limit; ++n) {
        const auto& fam = seq[n];
        for (std::size_t b = 0; b < fam.size(); ++b) {
            bool ok = std::none_of(accepted.begin(), accepted.end(),
                                   [&](const Box* a) { return are_co_stabbable(*a, fam[b], k); });
            if (ok) {
                accepted.push_back(&fam[b]);
                cert.picks.emplace_back(n, b);
                break;
            }
        }
    }
    return cert;
}

// ---------------------------------------------------------------------------
// Strip refinement
// ---------------------------------------------------------------------------

namespace detail {

struct RefineRun {
    std::vector<StripStep> trace;
    bool complete = true;
};

inline std::vector<std::size_t> boxes_in(const Family& family, const std::vector<std::size_t>& pool, const Strip& s) {
    std::vector<std::size_t> out;
    for (auto i : pool)
        if (s.contains(family[i])) out.push_back(i);
    return out;
}

/// Halves the bounded sides of the strip up to `max_depth` times. Boxes
/// meeting a midpoint hyperplane are discarded, then the first child (in
/// lower/upper order, axis by axis) whose boxes stay t-heavy is kept.
inline RefineRun refine_on(const Family& family, const std::vector<std::size_t>& bounded, int k, std::size_t t,
                           std::size_t max_depth, const SolverLimits& limits) {
    RefineRun run;
    const std::size_t d = family.dim();
    const Box bbox = bounding_box(family);
    std::vector<std::optional<Interval>> sides(d);
    for (auto a : bounded) sides[a - 1] = bbox.proj(a);
    Strip strip(std::move(sides));

    std::vector<std::size_t> pool(family.size());
    for (std::size_t i = 0; i < pool.size(); ++i) pool[i] = i;

    auto heavy = [&](const std::vector<std::size_t>& idx) {
        auto rep = is_t_heavy(family.subset(idx), k, t, limits);
        if (!rep.heavy) run.complete = false;
        return rep.heavy.value_or(false);
    };
    if (!heavy(pool)) return run;
    run.trace.push_back({strip, pool.size()});
    if (bounded.empty()) return run;

    for (std::size_t depth = 0; depth < max_depth; ++depth) {
        // Drop boxes hit by a midpoint hyperplane.
        std::vector<std::size_t> remaining;
        for (auto i : pool) {
            bool hit = false;
            for (auto a : bounded)
                if (family[i].proj(a).contains(strip.side(a)->midpoint())) hit = true;
            if (!hit) remaining.push_back(i);
        }
        bool advanced = false;
        for (std::uint64_t choice = 0; choice < (std::uint64_t{1} << bounded.size()) && !advanced; ++choice) {
            std::vector<std::optional<Interval>> child = strip.sides();
            for (std::size_t j = 0; j < bounded.size(); ++j) {
                const auto& side = *child[bounded[j] - 1];
                // Bit of the first axis is most significant so lower halves come first.
                bool upper = choice >> (bounded.size() - 1 - j) & 1;
                child[bounded[j] - 1] = upper ? Interval(side.midpoint(), side.hi()) : Interval(side.lo(), side.midpoint());
            }
            Strip child_strip(std::move(child));
            auto inside = boxes_in(family, remaining, child_strip);
            if (inside.size() > t && heavy(inside)) {
                strip = std::move(child_strip);
                pool = std::move(inside);
                run.trace.push_back({strip, pool.size()});
                advanced = true;
            }
        }
        if (!advanced) break;
    }
    return run;
}

}  // namespace detail

/// Locates the largest set of axes along which a t-heavy subfamily can be
/// confined to strips that halve `max_depth` times, and reports the nested
/// strips and the midpoint estimates of the accumulation coordinates.
///
/// The empty axis set (whole space) qualifies whenever the family is t-heavy;
/// larger axis sets qualify only if their halving survives all `max_depth`
/// steps. Ties go to the lexicographically first axis set.
inline StripRefinement strip_refine(const Family& family, int k, std::size_t t, std::size_t max_depth,
                                    const SolverLimits& limits = {}) {
    detail::require_k(k, family.dim(), "strip_refine");
    StripRefinement out;
    if (family.empty()) return out;
    const std::size_t d = family.dim();

    for (std::size_t bounded_count = d + 1; bounded_count-- > 0;) {
        for (const auto& axes : detail::axis_subsets(d, bounded_count)) {
            auto run = detail::refine_on(family, axes, k, t, max_depth, limits);
            if (!run.complete) out.complete = false;
            if (run.trace.empty()) {
                if (bounded_count == 0) return out;
                continue;
            }
            const std::size_t depth = run.trace.size() - 1;
            if (!axes.empty() && depth < max_depth) continue;
            out.trace = std::move(run.trace);
            out.bounded_axes = axes;
            out.depth = depth;
            for (auto a : axes) out.estimates.emplace(a, out.trace.back().strip.side(a)->midpoint());
            return out;
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Slicing extraction
// ---------------------------------------------------------------------------

/// Scattered set at level k obtained by the k-flat induction: when some
/// canonical hyperplane {x_a = v} stabs a t-heavy subfamily, slice those boxes
/// by it, recurse one dimension down at the same k and lift the result back;
/// otherwise fall back to hyperplane-level greedy extraction, whose output is
/// scattered for every k.
inline ScatteredCert scattered_by_slicing(const Family& family, int k, std::size_t t,
                                          const SolverLimits& limits = {}) {
    detail::require_k(k, family.dim(), "scattered_by_slicing");
    const std::size_t d = family.dim();
    if (d == 1 || static_cast<std::size_t>(k) + 1 == d || family.empty()) {
        auto cert = greedy_scattered(family, static_cast<int>(d) - 1);
        cert.k = k;
        return cert;
    }

    bool complete = true;
    for (std::size_t axis = 1; axis <= d; ++axis) {
        std::vector<Rational> values;
        for (const auto& b : family.boxes()) values.push_back(b.proj(axis).hi());
        std::sort(values.begin(), values.end());
        values.erase(std::unique(values.begin(), values.end()), values.end());
        for (const auto& v : values) {
            std::vector<std::size_t> stabbed;
            for (std::size_t i = 0; i < family.size(); ++i)
                if (family[i].proj(axis).contains(v)) stabbed.push_back(i);
            if (stabbed.size() <= t) continue;
            auto report = is_t_heavy(family.subset(stabbed), k, t, limits);
            if (!report.heavy) complete = false;
            if (!report.heavy.value_or(false)) continue;

            std::vector<Box> sliced;
            for (auto i : stabbed) sliced.push_back(*slice(family[i], axis, v));
            auto sub = scattered_by_slicing(Family(d - 1, std::move(sliced)), k, t, limits);
            ScatteredCert cert;
            cert.k = k;
            cert.complete = complete && sub.complete;
            for (auto j : sub.indices) cert.indices.push_back(stabbed[j]);
            std::sort(cert.indices.begin(), cert.indices.end());
            return cert;
        }
    }
    auto cert = greedy_scattered(family, static_cast<int>(d) - 1);
    cert.k = k;
    cert.complete = complete;
    return cert;
}

}  // namespace kflat
