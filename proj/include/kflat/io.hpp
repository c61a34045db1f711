#pragma once

// JSON documents: families, family sequences, certificates, witnesses and
// dichotomy reports. Rationals travel as "p/q" (or integer) strings so every
// value round-trips exactly. Box and flat indices are 1-based on the wire.

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "kflat/construction.hpp"
#include "kflat/core.hpp"
#include "kflat/experiments.hpp"
#include "kflat/scattered.hpp"
#include "kflat/transversal.hpp"

namespace kflat::io {

using nlohmann::json;

/// Malformed input document; the message names the line or field at fault.
class InputError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

namespace detail {

[[noreturn]] inline void field_error(const std::string& path, const std::string& what) {
    throw InputError("field " + (path.empty() ? std::string("/") : path) + ": " + what);
}

inline json parse_text(std::string_view text) {
    try {
        return json::parse(text.begin(), text.end());
    } catch (const json::parse_error& e) {
        // Translate the byte offset into line/column.
        std::size_t line = 1, col = 1;
        for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
            if (text[i] == '\n') ++line, col = 1;
            else ++col;
        }
        throw InputError("line " + std::to_string(line) + ", column " + std::to_string(col) +
                         ": malformed JSON (" + e.what() + ")");
    }
}

inline const json& member(const json& obj, const char* key, const std::string& path) {
    if (!obj.is_object()) field_error(path, "expected an object");
    auto it = obj.find(key);
    if (it == obj.end()) field_error(path + "/" + key, "missing");
    return *it;
}

inline std::uint64_t unsigned_field(const json& j, const std::string& path) {
    if (!j.is_number_unsigned()) field_error(path, "expected a non-negative integer");
    return j.get<std::uint64_t>();
}

inline std::size_t index_field(const json& j, const std::string& path) {
    auto v = unsigned_field(j, path);
    if (v == 0) field_error(path, "indices are 1-based");
    return static_cast<std::size_t>(v - 1);
}

inline int k_field(const json& j, const std::string& path) {
    if (!j.is_number_integer()) field_error(path, "expected an integer");
    return j.get<int>();
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Scalars and boxes

inline json to_json(const Rational& r) { return r.to_string(); }

inline Rational rational_from_json(const json& j, const std::string& path) {
    if (j.is_string()) {
        try {
            return Rational::parse(j.get<std::string>());
        } catch (const ParseError& e) {
            detail::field_error(path, e.what());
        }
    }
    if (j.is_number_integer()) {
        return j.is_number_unsigned() ? Rational(j.get<std::uint64_t>()) : Rational(j.get<std::int64_t>());
    }
    if (j.is_number_float())
        detail::field_error(path, "binary floating-point number is not exact; write it as a string such as \"0.1\" or \"1/10\"");
    detail::field_error(path, "expected a rational string");
}

inline json to_json(const Box& b) {
    json mins = json::array(), maxs = json::array();
    for (const auto& s : b.sides()) {
        mins.push_back(to_json(s.lo()));
        maxs.push_back(to_json(s.hi()));
    }
    return json{{"min", mins}, {"max", maxs}};
}

inline Box box_from_json(const json& j, std::size_t d, const std::string& path) {
    const auto& mins = detail::member(j, "min", path);
    const auto& maxs = detail::member(j, "max", path);
    if (!mins.is_array() || mins.size() != d)
        detail::field_error(path + "/min", "expected an array of " + std::to_string(d) + " rationals");
    if (!maxs.is_array() || maxs.size() != d)
        detail::field_error(path + "/max", "expected an array of " + std::to_string(d) + " rationals");
    std::vector<Interval> sides;
    for (std::size_t i = 0; i < d; ++i) {
        auto lo = rational_from_json(mins[i], path + "/min/" + std::to_string(i));
        auto hi = rational_from_json(maxs[i], path + "/max/" + std::to_string(i));
        if (hi < lo)
            detail::field_error(path, "min[" + std::to_string(i) + "] = " + lo.to_string() + " exceeds max[" +
                                          std::to_string(i) + "] = " + hi.to_string());
        sides.emplace_back(std::move(lo), std::move(hi));
    }
    return Box(std::move(sides));
}

inline json to_json(const AxisFlat& f) {
    json fixed = json::object();
    for (const auto& [axis, v] : f.fixed()) fixed[std::to_string(axis)] = to_json(v);
    return json{{"fixed", fixed}};
}

inline AxisFlat flat_from_json(const json& j, std::size_t d, const std::string& path) {
    const auto& fixed = detail::member(j, "fixed", path);
    if (!fixed.is_object()) detail::field_error(path + "/fixed", "expected an object");
    std::map<std::size_t, Rational> out;
    for (auto it = fixed.begin(); it != fixed.end(); ++it) {
        std::size_t axis = 0;
        try {
            std::size_t used = 0;
            axis = std::stoul(it.key(), &used);
            if (used != it.key().size()) throw std::invalid_argument("trailing");
        } catch (const std::exception&) {
            detail::field_error(path + "/fixed", "axis key \"" + it.key() + "\" is not an integer");
        }
        if (axis < 1 || axis > d) detail::field_error(path + "/fixed/" + it.key(), "axis out of range");
        out.emplace(axis, rational_from_json(it.value(), path + "/fixed/" + it.key()));
    }
    return AxisFlat(d, std::move(out));
}

// ---------------------------------------------------------------------------
// Families

inline json to_json(const Family& f) {
    json boxes = json::array();
    for (const auto& b : f.boxes()) boxes.push_back(to_json(b));
    json out{{"d", f.dim()}, {"boxes", boxes}};
    if (!f.labels().empty()) out["labels"] = f.labels();
    return out;
}

inline Family family_from_json(const json& j, const std::string& path = "") {
    const auto& dj = detail::member(j, "d", path);
    if (!dj.is_number_unsigned() || dj.get<std::uint64_t>() == 0)
        detail::field_error(path + "/d", "expected a positive integer");
    const auto d = static_cast<std::size_t>(dj.get<std::uint64_t>());
    const auto& boxes = detail::member(j, "boxes", path);
    if (!boxes.is_array()) detail::field_error(path + "/boxes", "expected an array");
    std::vector<Box> out;
    for (std::size_t i = 0; i < boxes.size(); ++i)
        out.push_back(box_from_json(boxes[i], d, path + "/boxes/" + std::to_string(i)));
    std::vector<std::string> labels;
    if (auto it = j.find("labels"); it != j.end()) {
        if (!it->is_array() || it->size() != out.size())
            detail::field_error(path + "/labels", "expected one string per box");
        for (std::size_t i = 0; i < it->size(); ++i) {
            if (!(*it)[i].is_string()) detail::field_error(path + "/labels/" + std::to_string(i), "expected a string");
            labels.push_back((*it)[i].get<std::string>());
        }
    }
    return Family(d, std::move(out), std::move(labels));
}

/// Parses a FamilyDocument: {"d": 2, "boxes": [{"min": [...], "max": [...]}, ...]}.
inline Family parse_family(std::string_view text) { return family_from_json(detail::parse_text(text)); }

inline json to_json(const FamilySequence& s) {
    json fams = json::array();
    for (const auto& f : s.families()) {
        json boxes = json::array();
        for (const auto& b : f.boxes()) boxes.push_back(to_json(b));
        fams.push_back(json{{"boxes", boxes}});
    }
    return json{{"d", s.dim()}, {"families", fams}};
}

/// {"d": 2, "families": [{"boxes": [...]}, ...]}
inline FamilySequence parse_family_sequence(std::string_view text) {
    auto j = detail::parse_text(text);
    const auto& dj = detail::member(j, "d", "");
    if (!dj.is_number_unsigned() || dj.get<std::uint64_t>() == 0)
        detail::field_error("/d", "expected a positive integer");
    const auto& fams = detail::member(j, "families", "");
    if (!fams.is_array() || fams.empty()) detail::field_error("/families", "expected a nonempty array");
    std::vector<Family> out;
    for (std::size_t n = 0; n < fams.size(); ++n) {
        json doc{{"d", dj}, {"boxes", detail::member(fams[n], "boxes", "/families/" + std::to_string(n))}};
        out.push_back(family_from_json(doc, "/families/" + std::to_string(n)));
    }
    return FamilySequence(std::move(out));
}

// ---------------------------------------------------------------------------
// Certificates

inline json to_json(const TransversalCert& c) {
    json flats = json::array();
    for (const auto& f : c.flats) flats.push_back(to_json(f));
    json assignment = json::array();
    for (auto a : c.assignment) assignment.push_back(a + 1);
    return json{{"type", "transversal"}, {"d", c.dim}, {"k", c.k}, {"flats", flats}, {"assignment", assignment}};
}

inline json to_json(const ScatteredCert& c) {
    std::vector<std::size_t> idx = c.indices;
    std::sort(idx.begin(), idx.end());
    json indices = json::array();
    for (auto i : idx) indices.push_back(i + 1);
    json evidence = json::array();
    for (const auto& e : c.evidence)
        evidence.push_back(json{{"pair", {e.first + 1, e.second + 1}}, {"overlapping_axes", e.overlapping_axes}});
    return json{{"type", "scattered"}, {"k", c.k},          {"indices", indices},
                {"evidence", evidence}, {"optimal", c.optimal}, {"complete", c.complete}};
}

inline json to_json(const RainbowCert& c) {
    json picks = json::array();
    for (auto [n, b] : c.picks) picks.push_back({n + 1, b + 1});
    return json{{"type", "rainbow"}, {"k", c.k}, {"picks", picks}};
}

inline json to_json(const NestingWitness& w) {
    json point = json::array();
    for (const auto& q : w.point) point.push_back(to_json(q));
    return json{{"type", "nesting"},          {"input_box", to_json(w.input_box)}, {"epsilon", to_json(w.epsilon)},
                {"n_prime", w.n_prime},        {"r", w.r},                          {"point", point},
                {"bounding", to_json(w.bounding)}};
}

/// Canonical text: sorted keys, two-space indent, trailing newline.
template <typename Cert>
std::string emit_certificate(const Cert& cert) {
    return to_json(cert).dump(2) + "\n";
}

inline std::string certificate_type(const json& j) {
    const auto& t = detail::member(j, "type", "");
    if (!t.is_string()) detail::field_error("/type", "expected a string");
    return t.get<std::string>();
}

inline TransversalCert transversal_from_json(const json& j) {
    TransversalCert c;
    c.dim = static_cast<std::size_t>(detail::unsigned_field(detail::member(j, "d", ""), "/d"));
    if (c.dim == 0) detail::field_error("/d", "expected a positive integer");
    c.k = detail::k_field(detail::member(j, "k", ""), "/k");
    const auto& flats = detail::member(j, "flats", "");
    if (!flats.is_array()) detail::field_error("/flats", "expected an array");
    for (std::size_t i = 0; i < flats.size(); ++i)
        c.flats.push_back(flat_from_json(flats[i], c.dim, "/flats/" + std::to_string(i)));
    const auto& assignment = detail::member(j, "assignment", "");
    if (!assignment.is_array()) detail::field_error("/assignment", "expected an array");
    for (std::size_t i = 0; i < assignment.size(); ++i)
        c.assignment.push_back(detail::index_field(assignment[i], "/assignment/" + std::to_string(i)));
    return c;
}

inline ScatteredCert scattered_from_json(const json& j) {
    ScatteredCert c;
    c.k = detail::k_field(detail::member(j, "k", ""), "/k");
    const auto& indices = detail::member(j, "indices", "");
    if (!indices.is_array()) detail::field_error("/indices", "expected an array");
    for (std::size_t i = 0; i < indices.size(); ++i)
        c.indices.push_back(detail::index_field(indices[i], "/indices/" + std::to_string(i)));
    if (auto it = j.find("evidence"); it != j.end()) {
        if (!it->is_array()) detail::field_error("/evidence", "expected an array");
        for (std::size_t i = 0; i < it->size(); ++i) {
            const std::string p = "/evidence/" + std::to_string(i);
            const auto& pair = detail::member((*it)[i], "pair", p);
            if (!pair.is_array() || pair.size() != 2) detail::field_error(p + "/pair", "expected two indices");
            c.evidence.push_back({detail::index_field(pair[0], p + "/pair/0"), detail::index_field(pair[1], p + "/pair/1"),
                                  static_cast<std::size_t>(detail::unsigned_field(
                                      detail::member((*it)[i], "overlapping_axes", p), p + "/overlapping_axes"))});
        }
    }
    if (auto it = j.find("optimal"); it != j.end() && it->is_boolean()) c.optimal = it->get<bool>();
    if (auto it = j.find("complete"); it != j.end() && it->is_boolean()) c.complete = it->get<bool>();
    return c;
}

inline RainbowCert rainbow_from_json(const json& j) {
    RainbowCert c;
    c.k = detail::k_field(detail::member(j, "k", ""), "/k");
    const auto& picks = detail::member(j, "picks", "");
    if (!picks.is_array()) detail::field_error("/picks", "expected an array");
    for (std::size_t i = 0; i < picks.size(); ++i) {
        const std::string p = "/picks/" + std::to_string(i);
        if (!picks[i].is_array() || picks[i].size() != 2) detail::field_error(p, "expected [family, box]");
        c.picks.emplace_back(detail::index_field(picks[i][0], p + "/0"), detail::index_field(picks[i][1], p + "/1"));
    }
    return c;
}

inline NestingWitness nesting_from_json(const json& j) {
    const auto& input = detail::member(j, "input_box", "");
    const auto& mins = detail::member(input, "min", "/input_box");
    if (!mins.is_array() || mins.empty()) detail::field_error("/input_box/min", "expected a nonempty array");
    const std::size_t d = mins.size();
    Box input_box = box_from_json(input, d, "/input_box");
    const auto& point = detail::member(j, "point", "");
    if (!point.is_array() || point.size() != d) detail::field_error("/point", "expected " + std::to_string(d) + " rationals");
    Point q;
    for (std::size_t i = 0; i < d; ++i) q.push_back(rational_from_json(point[i], "/point/" + std::to_string(i)));
    return NestingWitness{std::move(input_box),
                          rational_from_json(detail::member(j, "epsilon", ""), "/epsilon"),
                          detail::unsigned_field(detail::member(j, "n_prime", ""), "/n_prime"),
                          detail::unsigned_field(detail::member(j, "r", ""), "/r"),
                          std::move(q),
                          box_from_json(detail::member(j, "bounding", ""), d, "/bounding")};
}

inline TransversalCert parse_transversal(std::string_view text) { return transversal_from_json(detail::parse_text(text)); }
inline ScatteredCert parse_scattered(std::string_view text) { return scattered_from_json(detail::parse_text(text)); }
inline RainbowCert parse_rainbow(std::string_view text) { return rainbow_from_json(detail::parse_text(text)); }
inline NestingWitness parse_nesting(std::string_view text) { return nesting_from_json(detail::parse_text(text)); }

// ---------------------------------------------------------------------------
// Reports

inline json to_json(const DichotomyReport& r) {
    json rows = json::array();
    auto opt = [](const auto& v) -> json { return v ? json(*v) : json("unknown"); };
    for (const auto& row : r.rows)
        rows.push_back(json{{"prefix", row.prefix},
                            {"greedy_scattered", row.greedy_scattered},
                            {"exact_tau", opt(row.exact_tau)},
                            {"greedy_tau", row.greedy_tau},
                            {"heavy", opt(row.heavy)}});
    return json{{"kind", to_string(r.kind)}, {"d", r.d}, {"k", r.k}, {"t", r.t}, {"seed", r.seed}, {"rows", rows}};
}

inline json to_json(const StripRefinement& s) {
    json trace = json::array();
    for (const auto& step : s.trace) {
        json sides = json::array();
        for (const auto& side : step.strip.sides())
            sides.push_back(side ? json::array({to_json(side->lo()), to_json(side->hi())}) : json("R"));
        trace.push_back(json{{"strip", sides}, {"heavy_size", step.heavy_size}});
    }
    json estimates = json::object();
    for (const auto& [axis, v] : s.estimates) estimates[std::to_string(axis)] = to_json(v);
    return json{{"type", "strip_refinement"}, {"trace", trace},       {"bounded_axes", s.bounded_axes},
                {"estimates", estimates},     {"depth", s.depth},     {"complete", s.complete}};
}

}  // namespace kflat::io
