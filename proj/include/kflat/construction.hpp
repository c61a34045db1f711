#pragma once

// Explicit families with no finite k-transversal whose every rainbow
// selection contains a co-stabbable pair, built over a fixed enumeration of
// Q^d, and the nesting witnesses certifying that a whole family F_r sits
// inside a given box.
//
// Enumeration of Q (1-based):
//   s(1) = 0, s(2j) = cw(j), s(2j+1) = -cw(j)
// where cw is the Calkin-Wilf sequence cw(j) = fusc(j) / fusc(j+1)
// (1, 1/2, 2, 1/3, 3/2, 2/3, 3, ...).
//
// Enumeration of Q^d: index z splits as z = pair(a, z') with the 1-based
// Cantor pairing pair(a, b) = C(a-1, b-1) + 1, C(x, y) = (x+y)(x+y+1)/2 + y;
// the first coordinate is s(a) and the remaining d-1 coordinates come from
// z' recursively. For d = 1 the point is s(z).

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <gmpxx.h>

#include "kflat/core.hpp"
#include "kflat/transversal.hpp"

namespace kflat {

using Point = std::vector<Rational>;

/// Stern's diatomic sequence.
inline std::uint64_t fusc(std::uint64_t n) {
    std::uint64_t a = 1, b = 0;
    while (n > 0) {
        if (n & 1) b += a;
        else a += b;
        n >>= 1;
    }
    return b;
}

/// j-th term (1-based) of the Calkin-Wilf sequence.
inline Rational calkin_wilf(std::uint64_t j) {
    if (j == 0) throw std::invalid_argument("calkin_wilf: index must be >= 1");
    return Rational(mpz_class(static_cast<unsigned long>(fusc(j))),
                    mpz_class(static_cast<unsigned long>(fusc(j + 1))));
}

inline Rational rational_at(std::uint64_t index) {
    if (index == 0) throw std::invalid_argument("rational_at: index must be >= 1");
    if (index == 1) return Rational(0);
    Rational q = calkin_wilf(index / 2);
    return index % 2 == 0 ? q : -q;
}

/// Position of a positive rational in the Calkin-Wilf sequence.
inline mpz_class calkin_wilf_index(const Rational& q) {
    if (q.sign() <= 0) throw std::invalid_argument("calkin_wilf_index: positive rational required");
    mpz_class p = q.numerator(), r = q.denominator();
    // Walking towards the root, p < q means "left child" (bit 0) and p > q
    // "right child" (bit 1); bits come out least-significant first.
    mpz_class low = 0;
    unsigned long len = 0;
    while (!(p == 1 && r == 1)) {
        if (p < r) {
            mpz_class steps = (p == 1) ? mpz_class(r - 1) : mpz_class(r / p);
            r -= steps * p;
            len += steps.get_ui();
        } else {
            mpz_class steps = (r == 1) ? mpz_class(p - 1) : mpz_class(p / r);
            p -= steps * r;
            mpz_class ones = (mpz_class(1) << steps.get_ui()) - 1;
            low |= ones << len;
            len += steps.get_ui();
        }
    }
    return (mpz_class(1) << len) | low;
}

/// Inverse of rational_at.
inline mpz_class index_of(const Rational& q) {
    if (q.sign() == 0) return 1;
    if (q.sign() > 0) return 2 * calkin_wilf_index(q);
    return 2 * calkin_wilf_index(-q) + 1;
}

/// 1-based Cantor pairing and its inverse.
inline mpz_class cantor_pair(const mpz_class& a, const mpz_class& b) {
    mpz_class x = a - 1, y = b - 1;
    mpz_class s = x + y;
    return s * (s + 1) / 2 + y + 1;
}

inline std::pair<mpz_class, mpz_class> cantor_unpair(const mpz_class& z) {
    mpz_class zz = z - 1;
    mpz_class w;
    mpz_class disc = 8 * zz + 1;
    mpz_sqrt(w.get_mpz_t(), disc.get_mpz_t());
    w = (w - 1) / 2;
    mpz_class t = w * (w + 1) / 2;
    mpz_class y = zz - t;
    mpz_class x = w - y;
    return {x + 1, y + 1};
}

inline Point rational_point_at(std::uint64_t index, std::size_t d) {
    if (index == 0) throw std::invalid_argument("rational_point_at: index must be >= 1");
    if (d == 0) throw std::invalid_argument("rational_point_at: d must be >= 1");
    Point out;
    out.reserve(d);
    mpz_class z = static_cast<unsigned long>(index);
    for (std::size_t i = 0; i + 1 < d; ++i) {
        auto [a, rest] = cantor_unpair(z);
        out.push_back(rational_at(a.get_ui()));
        z = rest;
    }
    out.push_back(rational_at(z.get_ui()));
    return out;
}

/// Inverse of rational_point_at.
inline mpz_class index_of(const Point& point) {
    if (point.empty()) throw std::invalid_argument("index_of: empty point");
    mpz_class z = index_of(point.back());
    for (std::size_t i = point.size() - 1; i-- > 0;) z = cantor_pair(index_of(point[i]), z);
    return z;
}

inline bool box_contains_point(const Box& box, const Point& p) {
    detail::require_same_dim(box.dim(), p.size(), "box_contains_point");
    for (std::size_t i = 0; i < p.size(); ++i)
        if (!box.sides()[i].contains(p[i])) return false;
    return true;
}

/// B_{n,m} = prod_i [q_{n,i} - 2^-(n+2m), q_{n,i} - 2^-(n+2m+1)] with Q_n = rational_point_at(n, d).
inline Box counterexample_box(std::uint64_t n, std::uint64_t m, std::size_t d) {
    if (n == 0 || m == 0) throw std::invalid_argument("counterexample_box: n and m must be >= 1");
    const auto q = rational_point_at(n, d);
    const auto e = static_cast<std::int64_t>(n + 2 * m);
    const Rational outer = Rational::pow2(-e);
    const Rational inner = Rational::pow2(-(e + 1));
    std::vector<Interval> sides;
    sides.reserve(d);
    for (const auto& qi : q) sides.emplace_back(qi - outer, qi - inner);
    return Box(std::move(sides));
}

/// F_n truncated to m = 1..m_max.
inline Family counterexample_family(std::uint64_t n, std::size_t d, std::uint64_t m_max) {
    if (m_max == 0) throw std::invalid_argument("counterexample_family: m_max must be >= 1");
    std::vector<Box> boxes;
    for (std::uint64_t m = 1; m <= m_max; ++m) boxes.push_back(counterexample_box(n, m, d));
    return Family(d, std::move(boxes));
}

/// F_1, ..., F_{n_max}, each truncated to m_max boxes.
inline FamilySequence counterexample_sequence(std::uint64_t n_max, std::size_t d, std::uint64_t m_max) {
    std::vector<Family> fams;
    for (std::uint64_t n = 1; n <= n_max; ++n) fams.push_back(counterexample_family(n, d, m_max));
    return FamilySequence(std::move(fams));
}

/// Union prefix G_{n_max} = F_1 u ... u F_{n_max}, ordered by n then m.
inline Family counterexample_union(std::uint64_t n_max, std::size_t d, std::uint64_t m_max) {
    Family out(d);
    for (std::uint64_t n = 1; n <= n_max; ++n)
        for (std::uint64_t m = 1; m <= m_max; ++m) out.push_back(counterexample_box(n, m, d));
    return out;
}

// ---------------------------------------------------------------------------

struct EnumerationHit {
    std::optional<std::uint64_t> index;  ///< empty when the budget ran out
    Point point;
    std::uint64_t steps = 0;

    [[nodiscard]] bool budget_exhausted() const { return !index.has_value(); }
};

/// Smallest enumeration index r >= min_index whose point lies in the box,
/// scanning at most `budget` indices.
inline EnumerationHit first_rational_in_box(const Box& box, std::uint64_t min_index, std::uint64_t budget) {
    for (const auto& s : box.sides())
        if (s.width().sign() <= 0)
            throw std::invalid_argument("first_rational_in_box: box must be nondegenerate on every axis");
    if (min_index == 0) min_index = 1;
    EnumerationHit hit;
    for (std::uint64_t r = min_index; hit.steps < budget; ++r) {
        ++hit.steps;
        auto p = rational_point_at(r, box.dim());
        if (box_contains_point(box, p)) {
            hit.index = r;
            hit.point = std::move(p);
            return hit;
        }
    }
    return hit;
}

struct NestingWitness {
    Box input_box;
    Rational epsilon;
    std::uint64_t n_prime = 0;
    std::uint64_t r = 0;
    Point point;
    Box bounding;

    friend bool operator==(const NestingWitness&, const NestingWitness&) = default;
};

/// Center box prod [c_i - eps/4, c_i + eps/4] around the midpoint of `box`.
inline Box center_box(const Box& box, const Rational& epsilon) {
    std::vector<Interval> sides;
    const Rational quarter = epsilon / Rational(4);
    for (const auto& s : box.sides()) sides.emplace_back(s.midpoint() - quarter, s.midpoint() + quarter);
    return Box(std::move(sides));
}

/// prod [q_i - 2^-r, q_i], which contains B_{r,m} for every m.
inline Box dyadic_bounding_box(const Point& q, std::uint64_t r) {
    const Rational step = Rational::pow2(-static_cast<std::int64_t>(r));
    std::vector<Interval> sides;
    for (const auto& qi : q) sides.emplace_back(qi - step, qi);
    return Box(std::move(sides));
}

/// Smallest n' >= 0 such that 2^-l < eps/8 for every l > n'.
inline std::uint64_t nesting_threshold(const Rational& epsilon) {
    const Rational target = epsilon / Rational(8);
    std::uint64_t l = 1;
    while (!(Rational::pow2(-static_cast<std::int64_t>(l)) < target)) ++l;
    return l - 1;
}

struct WitnessResult {
    std::optional<NestingWitness> witness;
    std::uint64_t steps = 0;

    [[nodiscard]] bool budget_exhausted() const { return !witness.has_value(); }
};

/// Builds the nesting witness for `box`: eps = shortest side, n' from eps,
/// then the first enumerated point Q_r with r > n' inside the center box.
inline WitnessResult nesting_witness(const Box& box, std::uint64_t budget = 1'000'000) {
    Rational eps = box.min_side();
    if (eps.sign() <= 0) throw std::invalid_argument("nesting_witness: box must be nondegenerate on every axis");
    const auto n_prime = nesting_threshold(eps);
    auto hit = first_rational_in_box(center_box(box, eps), n_prime + 1, budget);
    WitnessResult out;
    out.steps = hit.steps;
    if (hit.budget_exhausted()) return out;
    Box bounding = dyadic_bounding_box(hit.point, *hit.index);
    if (!contains(box, bounding))
        throw std::logic_error("nesting_witness: bounding box escapes the input box");
    out.witness = NestingWitness{box, eps, n_prime, *hit.index, std::move(hit.point), std::move(bounding)};
    return out;
}

/// Rechecks every witness invariant exactly, then spot-checks that
/// B_{r,m} lies in the input box for m = 1..sample_m.
inline VerifyResult verify_nesting(const NestingWitness& w, std::uint64_t sample_m = 20) {
    const std::size_t d = w.input_box.dim();
    if (w.point.size() != d || w.bounding.dim() != d)
        return VerifyResult::fail("dimension mismatch between input box, point and bounding box");
    if (w.epsilon.sign() <= 0) return VerifyResult::fail("epsilon must be positive");
    if (w.input_box.min_side() < w.epsilon)
        return VerifyResult::fail("epsilon exceeds the shortest side of the input box");
    if (!(Rational::pow2(-static_cast<std::int64_t>(w.n_prime + 1)) < w.epsilon / Rational(8)))
        return VerifyResult::fail("2^-(n'+1) < eps/8 fails");
    if (w.r <= w.n_prime) return VerifyResult::fail("r must exceed n'");
    if (rational_point_at(w.r, d) != w.point) return VerifyResult::fail("point is not Q_r");
    if (!box_contains_point(center_box(w.input_box, w.epsilon), w.point))
        return VerifyResult::fail("Q_r is outside the center box");
    if (dyadic_bounding_box(w.point, w.r) != w.bounding)
        return VerifyResult::fail("bounding box is not prod [q_i - 2^-r, q_i]");
    if (!contains(w.input_box, w.bounding)) return VerifyResult::fail("bounding box not contained in input box");
    for (std::uint64_t m = 1; m <= sample_m; ++m)
        if (!contains(w.input_box, counterexample_box(w.r, m, d)))
            return VerifyResult::fail("B_{r," + std::to_string(m) + "} not contained in input box");
    return {};
}

}  // namespace kflat
