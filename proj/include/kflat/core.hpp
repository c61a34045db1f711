#pragma once

// Exact geometric primitives: closed intervals, axis-parallel boxes, strips and
// axis-parallel k-flats, plus the stabbing predicates everything else uses.
//
// Axis indices are 1-based in every public interface (flat keys, slice axes,
// overlap sets). Box indices inside a Family are 0-based; certificates are
// converted to 1-based only at serialization time.

#include <algorithm>
#include <cstddef>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "kflat/rational.hpp"

namespace kflat {

class DimensionMismatch : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

namespace detail {

inline void require_same_dim(std::size_t a, std::size_t b, const char* what) {
    if (a != b)
        throw DimensionMismatch(std::string(what) + ": dimension mismatch (" + std::to_string(a) +
                                " vs " + std::to_string(b) + ")");
}

inline void require_axis(std::size_t axis, std::size_t dim, const char* what) {
    if (axis < 1 || axis > dim)
        throw std::out_of_range(std::string(what) + ": axis " + std::to_string(axis) +
                                " outside 1.." + std::to_string(dim));
}

inline void require_k(int k, std::size_t dim, const char* what) {
    if (k < 0 || static_cast<std::size_t>(k) + 1 > dim)
        throw std::invalid_argument(std::string(what) + ": k=" + std::to_string(k) +
                                    " must satisfy 0 <= k <= d-1 with d=" + std::to_string(dim));
}

}  // namespace detail

/// Closed interval [lo, hi]; degenerate intervals (lo == hi) are allowed.
class Interval {
public:
    Interval(Rational lo, Rational hi) : lo_(std::move(lo)), hi_(std::move(hi)) {
        if (hi_ < lo_)
            throw std::invalid_argument("interval with lo > hi: [" + lo_.to_string() + ", " +
                                        hi_.to_string() + "]");
    }

    [[nodiscard]] const Rational& lo() const { return lo_; }
    [[nodiscard]] const Rational& hi() const { return hi_; }
    [[nodiscard]] Rational width() const { return hi_ - lo_; }
    [[nodiscard]] Rational midpoint() const { return (lo_ + hi_) / Rational(2); }

    [[nodiscard]] bool contains(const Rational& x) const { return lo_ <= x && x <= hi_; }
    [[nodiscard]] bool contains(const Interval& o) const { return lo_ <= o.lo_ && o.hi_ <= hi_; }
    [[nodiscard]] bool intersects(const Interval& o) const { return lo_ <= o.hi_ && o.lo_ <= hi_; }

    /// Intersection of two intervals, if nonempty.
    [[nodiscard]] std::optional<Interval> intersect(const Interval& o) const {
        if (!intersects(o)) return std::nullopt;
        return Interval(max(lo_, o.lo_), min(hi_, o.hi_));
    }

    friend bool operator==(const Interval&, const Interval&) = default;

private:
    Rational lo_;
    Rational hi_;
};

/// Axis-parallel box: a product of `dim` closed intervals.
class Box {
public:
    explicit Box(std::vector<Interval> sides) : sides_(std::move(sides)) {
        if (sides_.empty()) throw std::invalid_argument("box must have dimension >= 1");
    }

    [[nodiscard]] std::size_t dim() const { return sides_.size(); }
    [[nodiscard]] const std::vector<Interval>& sides() const { return sides_; }

    /// Projection onto the given axis (1-based).
    [[nodiscard]] const Interval& proj(std::size_t axis) const {
        detail::require_axis(axis, dim(), "Box::proj");
        return sides_[axis - 1];
    }

    [[nodiscard]] Rational min_side() const {
        Rational m = sides_.front().width();
        for (const auto& s : sides_) m = min(m, s.width());
        return m;
    }

    friend bool operator==(const Box&, const Box&) = default;

private:
    std::vector<Interval> sides_;
};

/// Axis-parallel flat: the coordinates on `fixed` axes are pinned, the rest are free.
/// A flat with |fixed| = d - k is a k-flat; k = d (nothing fixed) is the whole space.
class AxisFlat {
public:
    explicit AxisFlat(std::size_t dim, std::map<std::size_t, Rational> fixed = {})
        : dim_(dim), fixed_(std::move(fixed)) {
        if (dim_ == 0) throw std::invalid_argument("flat must have dimension >= 1");
        for (const auto& [axis, value] : fixed_) detail::require_axis(axis, dim_, "AxisFlat");
    }

    [[nodiscard]] std::size_t dim() const { return dim_; }
    [[nodiscard]] const std::map<std::size_t, Rational>& fixed() const { return fixed_; }
    [[nodiscard]] std::size_t flat_dim() const { return dim_ - fixed_.size(); }

    friend bool operator==(const AxisFlat&, const AxisFlat&) = default;

    /// Order used for deterministic tie-breaking: axis set first, then values.
    friend bool operator<(const AxisFlat& a, const AxisFlat& b) {
        if (a.dim_ != b.dim_) return a.dim_ < b.dim_;
        std::vector<std::size_t> axes_a, axes_b;
        for (const auto& kv : a.fixed_) axes_a.push_back(kv.first);
        for (const auto& kv : b.fixed_) axes_b.push_back(kv.first);
        if (axes_a != axes_b) return axes_a < axes_b;
        return std::lexicographical_compare(
            a.fixed_.begin(), a.fixed_.end(), b.fixed_.begin(), b.fixed_.end(),
            [](const auto& x, const auto& y) { return x.second < y.second; });
    }

private:
    std::size_t dim_;
    std::map<std::size_t, Rational> fixed_;
};

/// Product set with some sides unbounded (R). An i-strip has exactly i
/// unbounded sides; a 0-strip is a box. `Strip::empty(d)` is the (-1)-strip.
class Strip {
public:
    explicit Strip(std::vector<std::optional<Interval>> sides) : sides_(std::move(sides)) {
        if (sides_.empty()) throw std::invalid_argument("strip must have dimension >= 1");
    }

    static Strip whole_space(std::size_t dim) { return Strip(std::vector<std::optional<Interval>>(dim)); }
    static Strip empty(std::size_t dim) {
        Strip s = whole_space(dim);
        s.empty_ = true;
        return s;
    }
    static Strip from_box(const Box& b) {
        return Strip(std::vector<std::optional<Interval>>(b.sides().begin(), b.sides().end()));
    }

    [[nodiscard]] std::size_t dim() const { return sides_.size(); }
    [[nodiscard]] bool is_empty() const { return empty_; }
    [[nodiscard]] const std::vector<std::optional<Interval>>& sides() const { return sides_; }
    [[nodiscard]] const std::optional<Interval>& side(std::size_t axis) const {
        detail::require_axis(axis, dim(), "Strip::side");
        return sides_[axis - 1];
    }

    /// Number of unbounded sides, or -1 for the empty strip.
    [[nodiscard]] int order() const {
        if (empty_) return -1;
        return static_cast<int>(std::count_if(sides_.begin(), sides_.end(),
                                              [](const auto& s) { return !s.has_value(); }));
    }

    [[nodiscard]] bool contains(const Box& b) const {
        detail::require_same_dim(dim(), b.dim(), "Strip::contains");
        if (empty_) return false;
        for (std::size_t i = 0; i < sides_.size(); ++i)
            if (sides_[i] && !sides_[i]->contains(b.sides()[i])) return false;
        return true;
    }

    [[nodiscard]] bool contains(const Strip& o) const {
        detail::require_same_dim(dim(), o.dim(), "Strip::contains");
        if (o.empty_) return true;
        if (empty_) return false;
        for (std::size_t i = 0; i < sides_.size(); ++i) {
            if (!sides_[i]) continue;
            if (!o.sides_[i] || !sides_[i]->contains(*o.sides_[i])) return false;
        }
        return true;
    }

    friend bool operator==(const Strip&, const Strip&) = default;

private:
    std::vector<std::optional<Interval>> sides_;
    bool empty_ = false;
};

/// Finite ordered family of boxes sharing one dimension.
class Family {
public:
    explicit Family(std::size_t dim, std::vector<Box> boxes = {}, std::vector<std::string> labels = {})
        : dim_(dim), boxes_(std::move(boxes)), labels_(std::move(labels)) {
        if (dim_ == 0) throw std::invalid_argument("family must have dimension >= 1");
        for (const auto& b : boxes_) detail::require_same_dim(dim_, b.dim(), "Family");
        if (!labels_.empty() && labels_.size() != boxes_.size())
            throw std::invalid_argument("family labels must match box count");
    }

    [[nodiscard]] std::size_t dim() const { return dim_; }
    [[nodiscard]] std::size_t size() const { return boxes_.size(); }
    [[nodiscard]] bool empty() const { return boxes_.empty(); }
    [[nodiscard]] const std::vector<Box>& boxes() const { return boxes_; }
    [[nodiscard]] const Box& operator[](std::size_t i) const { return boxes_.at(i); }
    [[nodiscard]] const std::vector<std::string>& labels() const { return labels_; }

    void push_back(Box b) {
        detail::require_same_dim(dim_, b.dim(), "Family::push_back");
        if (!labels_.empty()) labels_.emplace_back();
        boxes_.push_back(std::move(b));
    }

    /// Subfamily of the given (0-based) indices, in the given order.
    [[nodiscard]] Family subset(const std::vector<std::size_t>& indices) const {
        std::vector<Box> out;
        out.reserve(indices.size());
        for (auto i : indices) out.push_back(boxes_.at(i));
        return Family(dim_, std::move(out));
    }

    /// First `n` boxes.
    [[nodiscard]] Family prefix(std::size_t n) const {
        n = std::min(n, boxes_.size());
        return Family(dim_, std::vector<Box>(boxes_.begin(), boxes_.begin() + static_cast<std::ptrdiff_t>(n)));
    }

    friend bool operator==(const Family&, const Family&) = default;

private:
    std::size_t dim_;
    std::vector<Box> boxes_;
    std::vector<std::string> labels_;
};

/// Ordered sequence of families F_1, F_2, ... (stored 0-based).
class FamilySequence {
public:
    explicit FamilySequence(std::vector<Family> families) : families_(std::move(families)) {
        if (families_.empty()) throw std::invalid_argument("family sequence must be nonempty");
        for (const auto& f : families_) detail::require_same_dim(families_.front().dim(), f.dim(), "FamilySequence");
    }

    [[nodiscard]] std::size_t dim() const { return families_.front().dim(); }
    [[nodiscard]] std::size_t size() const { return families_.size(); }
    [[nodiscard]] const std::vector<Family>& families() const { return families_; }
    [[nodiscard]] const Family& operator[](std::size_t n) const { return families_.at(n); }

    friend bool operator==(const FamilySequence&, const FamilySequence&) = default;

private:
    std::vector<Family> families_;
};

// ---------------------------------------------------------------------------
// Predicates
// ---------------------------------------------------------------------------

/// True iff every pinned coordinate of the flat lies in the box's projection.
inline bool stabs(const AxisFlat& flat, const Box& box) {
    detail::require_same_dim(flat.dim(), box.dim(), "stabs");
    for (const auto& [axis, value] : flat.fixed())
        if (!box.sides()[axis - 1].contains(value)) return false;
    return true;
}

/// Axes (1-based, ascending) on which the two projections intersect.
inline std::vector<std::size_t> overlap_axes(const Box& b1, const Box& b2) {
    detail::require_same_dim(b1.dim(), b2.dim(), "overlap_axes");
    std::vector<std::size_t> axes;
    for (std::size_t i = 0; i < b1.dim(); ++i)
        if (b1.sides()[i].intersects(b2.sides()[i])) axes.push_back(i + 1);
    return axes;
}

/// Number of overlapping axes; gives up counting once `stop_at` is reached.
inline std::size_t overlap_count(const Box& b1, const Box& b2, std::size_t stop_at) {
    std::size_t count = 0;
    for (std::size_t i = 0; i < b1.dim() && count < stop_at; ++i)
        if (b1.sides()[i].intersects(b2.sides()[i])) ++count;
    return count;
}

/// Two boxes share an axis-parallel k-flat iff their projections overlap on
/// at least d-k axes. The witness pins the d-k smallest overlapping axes at
/// the right endpoint of the per-axis intersection.
inline std::optional<AxisFlat> co_stabbable(const Box& b1, const Box& b2, int k) {
    detail::require_same_dim(b1.dim(), b2.dim(), "co_stabbable");
    detail::require_k(k, b1.dim(), "co_stabbable");
    const std::size_t need = b1.dim() - static_cast<std::size_t>(k);
    std::map<std::size_t, Rational> fixed;
    for (std::size_t i = 0; i < b1.dim() && fixed.size() < need; ++i) {
        const auto& s1 = b1.sides()[i];
        const auto& s2 = b2.sides()[i];
        if (s1.intersects(s2)) fixed.emplace(i + 1, min(s1.hi(), s2.hi()));
    }
    if (fixed.size() < need) return std::nullopt;
    return AxisFlat(b1.dim(), std::move(fixed));
}

/// Cheap form of `co_stabbable(...).has_value()` for hot loops.
inline bool are_co_stabbable(const Box& b1, const Box& b2, int k) {
    const std::size_t need = b1.dim() - static_cast<std::size_t>(k);
    return overlap_count(b1, b2, need) >= need;
}

inline bool contains(const Box& outer, const Box& inner) {
    detail::require_same_dim(outer.dim(), inner.dim(), "contains");
    for (std::size_t i = 0; i < outer.dim(); ++i)
        if (!outer.sides()[i].contains(inner.sides()[i])) return false;
    return true;
}

/// Intersection with the hyperplane {x_axis = value}, in that hyperplane's
/// own (d-1)-dimensional coordinates.
inline std::optional<Box> slice(const Box& box, std::size_t axis, const Rational& value) {
    detail::require_axis(axis, box.dim(), "slice");
    if (box.dim() < 2) throw std::invalid_argument("slice: requires d >= 2");
    if (!box.proj(axis).contains(value)) return std::nullopt;
    std::vector<Interval> sides;
    sides.reserve(box.dim() - 1);
    for (std::size_t i = 1; i <= box.dim(); ++i)
        if (i != axis) sides.push_back(box.proj(i));
    return Box(std::move(sides));
}

/// Embeds a flat living in {x_axis = value} back into d dimensions.
inline AxisFlat lift_flat(const AxisFlat& flat, std::size_t axis, const Rational& value) {
    const std::size_t d = flat.dim() + 1;
    detail::require_axis(axis, d, "lift_flat");
    std::map<std::size_t, Rational> fixed;
    for (const auto& [a, v] : flat.fixed()) fixed.emplace(a < axis ? a : a + 1, v);
    fixed.emplace(axis, value);
    return AxisFlat(d, std::move(fixed));
}

/// Smallest box containing every member.
inline Box bounding_box(const Family& family) {
    if (family.empty()) throw std::invalid_argument("bounding_box of empty family");
    std::vector<Interval> sides = family[0].sides();
    for (const auto& b : family.boxes())
        for (std::size_t i = 0; i < sides.size(); ++i)
            sides[i] = Interval(min(sides[i].lo(), b.sides()[i].lo()), max(sides[i].hi(), b.sides()[i].hi()));
    return Box(std::move(sides));
}

}  // namespace kflat
