#pragma once

// Minimum axis-parallel k-flat transversals of finite families.
//
// Candidate flats are canonical: every pinned coordinate is the right
// endpoint of some box projection. Any flat can slide each pinned coordinate
// rightwards to the smallest right endpoint among the boxes it stabs without
// losing one, so optimizing over canonical flats is exact.

#include <algorithm>
#include <bit>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include <boost/dynamic_bitset.hpp>

#include "kflat/core.hpp"

namespace kflat {

struct TransversalCert {
    std::size_t dim = 0;
    int k = 0;
    std::vector<AxisFlat> flats;
    /// assignment[box] = index into `flats` (0-based).
    std::vector<std::size_t> assignment;

    [[nodiscard]] std::size_t size() const { return flats.size(); }
    friend bool operator==(const TransversalCert&, const TransversalCert&) = default;
};

enum class SolveStatus {
    optimal,           ///< exact answer
    heuristic,         ///< greedy answer, no optimality claim
    budget_exhausted,  ///< node budget ran out; certificate is best-so-far
    over_cap,          ///< family larger than the exact-solver cap; certificate is greedy
};

inline const char* to_string(SolveStatus s) {
    switch (s) {
        case SolveStatus::optimal: return "optimal";
        case SolveStatus::heuristic: return "heuristic";
        case SolveStatus::budget_exhausted: return "budget_exhausted";
        case SolveStatus::over_cap: return "over_cap";
    }
    return "?";
}

struct TransversalResult {
    SolveStatus status = SolveStatus::optimal;
    TransversalCert cert;
    std::size_t lower_bound = 0;
    std::size_t nodes = 0;

    [[nodiscard]] bool exact() const { return status == SolveStatus::optimal; }
};

struct SolverLimits {
    std::size_t node_budget = 2'000'000;
    std::size_t cap = 25;             ///< max family size for k < d-1
    std::size_t hyperplane_cap = 40;  ///< max family size for k = d-1

    [[nodiscard]] std::size_t cap_for(std::size_t dim, int k) const {
        return static_cast<std::size_t>(k) + 1 == dim ? hyperplane_cap : cap;
    }
};

/// Result of a heaviness test: heavy <=> tau_k > t. `heavy` is empty when
/// the solver could not decide within its limits.
struct HeavinessReport {
    int k = 0;
    std::size_t t = 0;
    std::optional<bool> heavy;
    std::optional<std::size_t> tau;
};

// ---------------------------------------------------------------------------

namespace detail {

/// All size-r subsets of {1..n} in lexicographic order.
inline std::vector<std::vector<std::size_t>> axis_subsets(std::size_t n, std::size_t r) {
    std::vector<std::vector<std::size_t>> out;
    std::vector<std::size_t> cur(r);
    for (std::size_t i = 0; i < r; ++i) cur[i] = i + 1;
    if (r > n) return out;
    while (true) {
        out.push_back(cur);
        std::size_t i = r;
        while (i > 0 && cur[i - 1] == n - r + i) --i;
        if (i == 0) break;
        ++cur[i - 1];
        for (std::size_t j = i; j < r; ++j) cur[j] = cur[j - 1] + 1;
    }
    return out;
}

/// Canonical candidate flats together with the set of boxes each one stabs.
struct Candidates {
    std::vector<AxisFlat> flats;
    std::vector<boost::dynamic_bitset<>> cover;
};

inline Candidates canonical_candidates(const Family& family, int k) {
    require_k(k, family.dim(), "canonical_flats");
    if (family.empty()) throw std::invalid_argument("canonical_flats: empty family");
    const std::size_t d = family.dim();
    const std::size_t n = family.size();

    // Per axis: sorted distinct right endpoints and the boxes containing each.
    std::vector<std::vector<Rational>> values(d);
    std::vector<std::vector<boost::dynamic_bitset<>>> hit(d);
    for (std::size_t a = 0; a < d; ++a) {
        for (const auto& b : family.boxes()) values[a].push_back(b.sides()[a].hi());
        std::sort(values[a].begin(), values[a].end());
        values[a].erase(std::unique(values[a].begin(), values[a].end()), values[a].end());
        for (const auto& v : values[a]) {
            boost::dynamic_bitset<> bits(n);
            for (std::size_t i = 0; i < n; ++i)
                if (family[i].sides()[a].contains(v)) bits.set(i);
            hit[a].push_back(std::move(bits));
        }
    }

    Candidates out;
    const std::size_t fixed_count = d - static_cast<std::size_t>(k);
    for (const auto& axes : axis_subsets(d, fixed_count)) {
        std::vector<std::size_t> pos(axes.size(), 0);
        while (true) {
            std::map<std::size_t, Rational> fixed;
            boost::dynamic_bitset<> bits(n);
            bits.set();
            for (std::size_t j = 0; j < axes.size(); ++j) {
                fixed.emplace(axes[j], values[axes[j] - 1][pos[j]]);
                bits &= hit[axes[j] - 1][pos[j]];
            }
            out.flats.emplace_back(d, std::move(fixed));
            out.cover.push_back(std::move(bits));
            std::size_t j = axes.size();
            while (j > 0 && ++pos[j - 1] == values[axes[j - 1] - 1].size()) pos[--j] = 0;
            if (j == 0) break;
        }
    }
    return out;
}

inline std::vector<std::size_t> assign_boxes(const Family& family, const std::vector<AxisFlat>& flats) {
    std::vector<std::size_t> assignment(family.size(), flats.size());
    for (std::size_t i = 0; i < family.size(); ++i)
        for (std::size_t f = 0; f < flats.size(); ++f)
            if (stabs(flats[f], family[i])) {
                assignment[i] = f;
                break;
            }
    return assignment;
}

inline TransversalCert make_cert(const Family& family, int k, std::vector<AxisFlat> flats) {
    std::sort(flats.begin(), flats.end());
    TransversalCert cert{family.dim(), k, std::move(flats), {}};
    cert.assignment = assign_boxes(family, cert.flats);
    return cert;
}

/// Max-coverage greedy over candidate covers; returns chosen candidate indices.
inline std::vector<std::size_t> greedy_cover(const std::vector<boost::dynamic_bitset<>>& cover, std::size_t n) {
    boost::dynamic_bitset<> uncovered(n);
    uncovered.set();
    std::vector<std::size_t> chosen;
    while (uncovered.any()) {
        std::size_t best = cover.size(), best_gain = 0;
        for (std::size_t c = 0; c < cover.size(); ++c) {
            std::size_t gain = (cover[c] & uncovered).count();
            if (gain > best_gain) best = c, best_gain = gain;
        }
        if (best == cover.size()) break;  // unreachable: every box has a canonical flat
        chosen.push_back(best);
        uncovered -= cover[best];
    }
    return chosen;
}

/// Exact branch-and-bound set cover on <= 64 boxes.
class CoverSearch {
public:
    CoverSearch(const Candidates& cands, std::size_t n, std::size_t node_budget)
        : n_(n), budget_(node_budget) {
        // Dedupe identical covers and drop dominated ones, keeping the
        // lowest-order flat of each class.
        std::unordered_map<std::uint64_t, std::size_t> first;
        std::vector<std::pair<std::uint64_t, std::size_t>> uniq;
        for (std::size_t c = 0; c < cands.cover.size(); ++c) {
            std::uint64_t m = 0;
            for (std::size_t i = 0; i < n; ++i)
                if (cands.cover[c][i]) m |= std::uint64_t{1} << i;
            if (m == 0 || first.count(m)) continue;
            first.emplace(m, c);
            uniq.emplace_back(m, c);
        }
        for (std::size_t a = 0; a < uniq.size(); ++a) {
            bool dominated = false;
            for (std::size_t b = 0; b < uniq.size() && !dominated; ++b)
                dominated = b != a && (uniq[a].first & ~uniq[b].first) == 0 && uniq[a].first != uniq[b].first;
            if (!dominated) {
                masks_.push_back(uniq[a].first);
                origin_.push_back(uniq[a].second);
            }
        }
        by_box_.assign(n, {});
        co_.assign(n, 0);
        for (std::size_t c = 0; c < masks_.size(); ++c)
            for (std::size_t i = 0; i < n; ++i)
                if (masks_[c] >> i & 1) {
                    by_box_[i].push_back(c);
                    co_[i] |= masks_[c];
                }
    }

    /// Boxes that share a candidate with box i (including i).
    [[nodiscard]] const std::vector<std::uint64_t>& co_coverable() const { return co_; }

    /// Searches for a cover no larger than `target` (or a minimum one when
    /// target is 0). `incumbent` is a known cover used as the starting bound.
    void run(std::vector<std::size_t> incumbent, std::size_t target) {
        best_ = std::move(incumbent);
        target_ = target;
        std::vector<std::size_t> chosen;
        std::uint64_t all = n_ == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << n_) - 1;
        root_lb_ = lower_bound(all);
        if (best_.size() > root_lb_ && !reached_target()) dfs(all, chosen);
        complete_ = !aborted_;
    }

    /// Scattered-set lower bound: boxes pairwise not sharing any candidate.
    [[nodiscard]] std::size_t lower_bound(std::uint64_t uncovered) const {
        std::size_t count = 0;
        while (uncovered) {
            int i = std::countr_zero(uncovered);
            ++count;
            uncovered &= ~co_[static_cast<std::size_t>(i)];
        }
        return count;
    }

    [[nodiscard]] const std::vector<std::size_t>& best() const { return best_; }
    [[nodiscard]] bool complete() const { return complete_; }
    [[nodiscard]] std::size_t nodes() const { return nodes_; }
    [[nodiscard]] std::size_t root_lower_bound() const { return root_lb_; }
    /// Maps a search-local candidate index back to the original candidate list.
    [[nodiscard]] std::size_t origin(std::size_t c) const { return origin_[c]; }
    [[nodiscard]] std::uint64_t mask(std::size_t c) const { return masks_[c]; }

    /// Converts an original-index cover into search-local indices.
    [[nodiscard]] std::vector<std::size_t> localize(const std::vector<std::uint64_t>& cover_masks) const {
        std::vector<std::size_t> out;
        for (auto m : cover_masks) {
            for (std::size_t c = 0; c < masks_.size(); ++c)
                if ((m & ~masks_[c]) == 0) {
                    out.push_back(c);
                    break;
                }
        }
        return out;
    }

private:
    [[nodiscard]] bool reached_target() const { return target_ > 0 && best_.size() <= target_; }

    void dfs(std::uint64_t uncovered, std::vector<std::size_t>& chosen) {
        if (aborted_ || reached_target()) return;
        if (++nodes_ > budget_) {
            aborted_ = true;
            return;
        }
        if (uncovered == 0) {
            if (chosen.size() < best_.size()) best_ = chosen;
            return;
        }
        if (chosen.size() + lower_bound(uncovered) >= best_.size()) return;

        // Branch on the uncovered box with the fewest candidates.
        std::size_t pick = n_;
        std::size_t fewest = std::numeric_limits<std::size_t>::max();
        for (std::uint64_t u = uncovered; u; u &= u - 1) {
            auto i = static_cast<std::size_t>(std::countr_zero(u));
            if (by_box_[i].size() < fewest) fewest = by_box_[i].size(), pick = i;
        }
        std::vector<std::size_t> order = by_box_[pick];
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            return std::popcount(masks_[a] & uncovered) > std::popcount(masks_[b] & uncovered);
        });
        for (auto c : order) {
            chosen.push_back(c);
            dfs(uncovered & ~masks_[c], chosen);
            chosen.pop_back();
            if (aborted_ || reached_target()) return;
        }
    }

    std::size_t n_;
    std::size_t budget_;
    std::vector<std::uint64_t> masks_;
    std::vector<std::size_t> origin_;
    std::vector<std::vector<std::size_t>> by_box_;
    std::vector<std::uint64_t> co_;
    std::vector<std::size_t> best_;
    std::size_t target_ = 0;
    std::size_t nodes_ = 0;
    std::size_t root_lb_ = 0;
    bool aborted_ = false;
    bool complete_ = false;
};

}  // namespace detail

// ---------------------------------------------------------------------------

/// Canonical candidate flats in deterministic order: axis subsets of size d-k
/// lexicographically, then pinned values lexicographically.
inline std::vector<AxisFlat> canonical_flats(const Family& family, int k) {
    return detail::canonical_candidates(family, k).flats;
}

inline TransversalCert greedy_transversal(const Family& family, int k) {
    if (family.empty()) {
        detail::require_k(k, family.dim(), "greedy_transversal");
        return TransversalCert{family.dim(), k, {}, {}};
    }
    auto cands = detail::canonical_candidates(family, k);
    std::vector<AxisFlat> flats;
    for (auto c : detail::greedy_cover(cands.cover, family.size())) flats.push_back(cands.flats[c]);
    return detail::make_cert(family, k, std::move(flats));
}

namespace detail {

/// Size of a first-fit set of pairwise non-co-stabbable boxes, a lower bound
/// on tau_k.
inline std::size_t greedy_packing_size(const Family& family, int k) {
    std::vector<std::size_t> picked;
    for (std::size_t i = 0; i < family.size(); ++i) {
        bool ok = true;
        for (auto j : picked)
            if (are_co_stabbable(family[i], family[j], k)) {
                ok = false;
                break;
            }
        if (ok) picked.push_back(i);
    }
    return picked.size();
}

inline TransversalResult solve_transversal(const Family& family, int k, const SolverLimits& limits,
                                           std::size_t target) {
    require_k(k, family.dim(), "min_transversal");
    TransversalResult result;
    if (family.empty()) {
        result.cert = TransversalCert{family.dim(), k, {}, {}};
        return result;
    }
    if (limits.cap_for(family.dim(), k) > 64 || limits.cap > 64)
        throw std::invalid_argument("min_transversal: exact-solver caps above 64 boxes are not supported");

    auto cands = canonical_candidates(family, k);
    auto greedy = greedy_cover(cands.cover, family.size());
    auto greedy_flats = [&] {
        std::vector<AxisFlat> flats;
        for (auto c : greedy) flats.push_back(cands.flats[c]);
        return flats;
    };

    if (family.size() > limits.cap_for(family.dim(), k)) {
        // Greedy is still provably optimal when it meets the packing bound.
        result.lower_bound = greedy_packing_size(family, k);
        result.status = greedy.size() <= result.lower_bound ? SolveStatus::optimal : SolveStatus::over_cap;
        result.cert = make_cert(family, k, greedy_flats());
        return result;
    }

    CoverSearch search(cands, family.size(), limits.node_budget);
    std::vector<std::uint64_t> greedy_masks;
    for (auto c : greedy) {
        std::uint64_t m = 0;
        for (std::size_t i = 0; i < family.size(); ++i)
            if (cands.cover[c][i]) m |= std::uint64_t{1} << i;
        greedy_masks.push_back(m);
    }
    search.run(search.localize(greedy_masks), target);

    std::vector<AxisFlat> flats;
    for (auto c : search.best()) flats.push_back(cands.flats[search.origin(c)]);
    result.cert = make_cert(family, k, std::move(flats));
    result.nodes = search.nodes();
    result.lower_bound = search.root_lower_bound();
    if (!search.complete()) {
        result.status = SolveStatus::budget_exhausted;
    } else if (target > 0 && result.cert.size() <= target) {
        // Stopped early at the target; optimality is not established.
        result.status = result.cert.size() <= result.lower_bound ? SolveStatus::optimal
                                                                 : SolveStatus::heuristic;
    } else {
        result.status = SolveStatus::optimal;
        result.lower_bound = result.cert.size();
    }
    return result;
}

}  // namespace detail

/// Exact minimum transversal by branch and bound over canonical flats.
///
/// The greedy cover seeds the upper bound; a greedy scattered set of the
/// still-uncovered boxes gives the lower bound at every node. Exceeding the
/// size cap or the node budget yields a best-so-far certificate with a
/// non-optimal status rather than an error.
inline TransversalResult min_transversal(const Family& family, int k, const SolverLimits& limits = {}) {
    return detail::solve_transversal(family, k, limits, 0);
}

struct VerifyResult {
    bool ok = true;
    std::string message;

    explicit operator bool() const { return ok; }
    static VerifyResult fail(std::string msg) { return {false, std::move(msg)}; }
};

inline VerifyResult verify_transversal(const Family& family, const TransversalCert& cert) {
    if (cert.dim != family.dim())
        return VerifyResult::fail("certificate dimension " + std::to_string(cert.dim) +
                                  " does not match family dimension " + std::to_string(family.dim()));
    if (cert.k < 0 || static_cast<std::size_t>(cert.k) >= family.dim())
        return VerifyResult::fail("invalid k=" + std::to_string(cert.k));
    const std::size_t want = family.dim() - static_cast<std::size_t>(cert.k);
    for (std::size_t f = 0; f < cert.flats.size(); ++f) {
        if (cert.flats[f].dim() != family.dim())
            return VerifyResult::fail("flat " + std::to_string(f + 1) + " has wrong dimension");
        if (cert.flats[f].fixed().size() != want)
            return VerifyResult::fail("flat " + std::to_string(f + 1) + " pins " +
                                      std::to_string(cert.flats[f].fixed().size()) + " axes, expected " +
                                      std::to_string(want));
    }
    if (cert.assignment.size() != family.size())
        return VerifyResult::fail("assignment covers " + std::to_string(cert.assignment.size()) + " of " +
                                  std::to_string(family.size()) + " boxes; first unassigned box " +
                                  std::to_string(std::min(cert.assignment.size(), family.size()) + 1));
    for (std::size_t i = 0; i < family.size(); ++i) {
        auto f = cert.assignment[i];
        if (f >= cert.flats.size())
            return VerifyResult::fail("box " + std::to_string(i + 1) + " assigned to missing flat");
        if (!stabs(cert.flats[f], family[i]))
            return VerifyResult::fail("box " + std::to_string(i + 1) + " is not stabbed by its flat " +
                                      std::to_string(f + 1));
    }
    return {};
}

/// Decides whether tau_k(family) > t, stopping as soon as a transversal of
/// size <= t is found or ruled out.
inline HeavinessReport is_t_heavy(const Family& family, int k, std::size_t t, const SolverLimits& limits = {}) {
    detail::require_k(k, family.dim(), "is_t_heavy");
    HeavinessReport report{k, t, std::nullopt, std::nullopt};
    if (family.empty()) {
        report.heavy = false;
        report.tau = 0;
        return report;
    }
    if (family.size() <= t) {
        report.heavy = false;
        return report;
    }

    auto cands = detail::canonical_candidates(family, k);
    auto greedy = detail::greedy_cover(cands.cover, family.size());
    if (greedy.size() <= t) {
        report.heavy = false;
        return report;
    }
    // Cheap lower bound: greedy scattered set over all boxes.
    if (auto packed = detail::greedy_packing_size(family, k); packed > t) {
        report.heavy = true;
        if (packed == greedy.size()) report.tau = greedy.size();
        return report;
    }
    if (family.size() > limits.cap_for(family.dim(), k)) return report;

    auto res = detail::solve_transversal(family, k, limits, std::max<std::size_t>(t, 1));
    if (res.status == SolveStatus::budget_exhausted) return report;
    if (res.cert.size() <= t) {
        report.heavy = false;
        if (res.status == SolveStatus::optimal) report.tau = res.cert.size();
    } else {
        report.heavy = true;
        report.tau = res.cert.size();
    }
    return report;
}

}  // namespace kflat
