#pragma once

// Brute-force reference computations used only by tests. These deliberately
// avoid the library's solver paths: they enumerate the full endpoint grid
// (left and right endpoints), compare interval bounds directly and search
// exhaustively.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "kflat/core.hpp"

namespace kflat::oracle {

inline bool in(const Rational& x, const Interval& s) { return !(x < s.lo()) && !(s.hi() < x); }

inline std::vector<std::vector<std::size_t>> subsets(std::size_t n, std::size_t r) {
    std::vector<std::vector<std::size_t>> out;
    for (std::uint32_t m = 0; m < (1u << n); ++m) {
        if (static_cast<std::size_t>(__builtin_popcount(m)) != r) continue;
        std::vector<std::size_t> s;
        for (std::size_t i = 0; i < n; ++i)
            if (m >> i & 1) s.push_back(i);
        out.push_back(s);
    }
    return out;
}

/// Coverage masks of every flat on the full endpoint grid.
inline std::vector<std::uint32_t> grid_masks(const Family& f, int k) {
    const std::size_t d = f.dim(), n = f.size();
    std::vector<std::vector<Rational>> coords(d);
    for (std::size_t a = 0; a < d; ++a)
        for (const auto& b : f.boxes()) {
            coords[a].push_back(b.sides()[a].lo());
            coords[a].push_back(b.sides()[a].hi());
        }
    std::vector<std::uint32_t> masks;
    for (const auto& axes : subsets(d, d - static_cast<std::size_t>(k))) {
        std::vector<std::size_t> pos(axes.size(), 0);
        while (true) {
            std::uint32_t m = 0;
            for (std::size_t i = 0; i < n; ++i) {
                bool hit = true;
                for (std::size_t j = 0; j < axes.size(); ++j)
                    hit = hit && in(coords[axes[j]][pos[j]], f[i].sides()[axes[j]]);
                if (hit) m |= 1u << i;
            }
            masks.push_back(m);
            std::size_t j = axes.size();
            while (j > 0 && ++pos[j - 1] == coords[axes[j - 1]].size()) pos[--j] = 0;
            if (j == 0) break;
        }
    }
    return masks;
}

/// Minimum number of grid flats covering every box (exhaustive over subsets
/// of distinct coverage masks, by increasing size).
inline std::size_t tau(const Family& f, int k) {
    const std::size_t n = f.size();
    if (n == 0) return 0;
    auto masks = grid_masks(f, k);
    std::sort(masks.begin(), masks.end());
    masks.erase(std::unique(masks.begin(), masks.end()), masks.end());
    const std::uint32_t all = (1u << n) - 1;
    // Breadth-first over reachable unions; each layer adds one flat.
    std::vector<int> dist(all + 1, -1);
    dist[0] = 0;
    std::vector<std::uint32_t> frontier{0};
    for (int layer = 0; !frontier.empty(); ++layer) {
        std::vector<std::uint32_t> next;
        for (auto u : frontier) {
            if (u == all) return static_cast<std::size_t>(layer);
            for (auto m : masks) {
                auto v = u | m;
                if (dist[v] < 0) {
                    dist[v] = layer + 1;
                    next.push_back(v);
                }
            }
        }
        frontier = std::move(next);
    }
    return n + 1;  // unreachable
}

/// Two boxes share a k-flat iff some grid flat stabs both.
inline bool share_flat(const Box& a, const Box& b, int k) {
    Family f(a.dim(), {a, b});
    for (auto m : grid_masks(f, k))
        if (m == 3u) return true;
    return false;
}

/// Maximum scattered set by enumerating every subset; returns the
/// lexicographically smallest index list among the maxima.
inline std::vector<std::size_t> max_scattered(const Family& f, int k) {
    const std::size_t n = f.size();
    const std::size_t need = f.dim() - static_cast<std::size_t>(k);
    std::vector<std::uint32_t> adj(n, 0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            if (i == j) continue;
            std::size_t overlaps = 0;
            for (std::size_t a = 0; a < f.dim(); ++a) {
                const auto& s = f[i].sides()[a];
                const auto& t = f[j].sides()[a];
                if (!(s.hi() < t.lo()) && !(t.hi() < s.lo())) ++overlaps;
            }
            if (overlaps >= need) adj[i] |= 1u << j;
        }
    std::vector<std::size_t> best;
    for (std::uint32_t m = 0; m < (1u << n); ++m) {
        bool ok = true;
        for (std::size_t i = 0; i < n && ok; ++i)
            if ((m >> i & 1) && (adj[i] & m)) ok = false;
        if (!ok) continue;
        std::vector<std::size_t> s;
        for (std::size_t i = 0; i < n; ++i)
            if (m >> i & 1) s.push_back(i);
        if (s.size() > best.size() || (s.size() == best.size() && s < best)) best = s;
    }
    return best;
}

/// Calkin-Wilf terms via q -> 1 / (2 floor(q) - q + 1).
inline std::vector<Rational> calkin_wilf_prefix(std::size_t count) {
    std::vector<Rational> out;
    Rational q(1);
    for (std::size_t i = 0; i < count; ++i) {
        out.push_back(q);
        mpz_class fl = q.numerator() / q.denominator();
        q = Rational(1) / (Rational(2) * Rational(mpq_class(fl)) - q + Rational(1));
    }
    return out;
}

/// Random family with coordinates on a small quarter grid.
inline Family random_family(std::mt19937_64& rng, std::size_t d, std::size_t n, int span = 12) {
    std::vector<Box> boxes;
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<Interval> sides;
        for (std::size_t a = 0; a < d; ++a) {
            auto lo = static_cast<long>(rng() % static_cast<std::uint64_t>(span));
            auto w = static_cast<long>(rng() % 5);
            sides.emplace_back(Rational(mpz_class(lo), mpz_class(2)), Rational(mpz_class(lo + w), mpz_class(2)));
        }
        boxes.emplace_back(std::move(sides));
    }
    return Family(d, std::move(boxes));
}

}  // namespace kflat::oracle
