#pragma once

#include <cctype>
#include <compare>
#include <concepts>
#include <cstdint>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>

#include <gmpxx.h>

namespace kflat {

/// Thrown when text cannot be read as an exact rational.
class ParseError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Exact rational number in lowest terms with a positive denominator.
///
/// Thin value wrapper over GMP's mpq_class. Every result is canonicalized,
/// so equality is structural and `to_string` is a canonical form
/// ("p" for integers, "p/q" otherwise).
class Rational {
public:
    Rational() = default;

    template <std::integral I>
    Rational(I value) {  // NOLINT(google-explicit-constructor)
        if constexpr (std::is_signed_v<I>)
            value_ = mpq_class(mpz_class(static_cast<signed long>(value)));
        else
            value_ = mpq_class(mpz_class(static_cast<unsigned long>(value)));
    }

    Rational(const mpz_class& num, const mpz_class& den) {
        if (den == 0) throw std::domain_error("rational with zero denominator");
        value_ = mpq_class(num, den);
        value_.canonicalize();
    }

    explicit Rational(mpq_class value) : value_(std::move(value)) { value_.canonicalize(); }

    /// Parses "p", "p/q" or an exact decimal such as "-0.125".
    static Rational parse(std::string_view text) {
        auto fail = [&](const char* why) {
            throw ParseError("invalid rational \"" + std::string(text) + "\": " + why);
        };
        if (text.empty()) fail("empty string");

        auto is_integer = [](std::string_view s) {
            std::size_t i = (!s.empty() && (s[0] == '-' || s[0] == '+')) ? 1 : 0;
            if (i == s.size()) return false;
            for (; i < s.size(); ++i)
                if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
            return true;
        };
        auto to_mpz = [](std::string_view s) {
            if (!s.empty() && s[0] == '+') s.remove_prefix(1);
            return mpz_class(std::string(s), 10);
        };

        if (auto slash = text.find('/'); slash != std::string_view::npos) {
            auto num = text.substr(0, slash);
            auto den = text.substr(slash + 1);
            if (!is_integer(num) || !is_integer(den) || den[0] == '-' || den[0] == '+')
                fail("expected p/q with integer p and positive integer q");
            mpz_class d = to_mpz(den);
            if (d == 0) fail("zero denominator");
            return Rational(to_mpz(num), d);
        }
        if (auto dot = text.find('.'); dot != std::string_view::npos) {
            auto whole = text.substr(0, dot);
            auto frac = text.substr(dot + 1);
            bool negative = !whole.empty() && whole[0] == '-';
            if (!whole.empty() && (whole[0] == '-' || whole[0] == '+')) whole.remove_prefix(1);
            if (whole.empty() && frac.empty()) fail("no digits");
            for (char c : whole)
                if (!std::isdigit(static_cast<unsigned char>(c))) fail("bad decimal digits");
            for (char c : frac)
                if (!std::isdigit(static_cast<unsigned char>(c))) fail("bad decimal digits");
            std::string digits = std::string(whole) + std::string(frac);
            if (digits.empty()) fail("no digits");
            mpz_class num(digits, 10);
            mpz_class den;
            mpz_ui_pow_ui(den.get_mpz_t(), 10, frac.size());
            return Rational(negative ? mpz_class(-num) : num, den);
        }
        if (!is_integer(text)) fail("not an integer, fraction or decimal");
        return Rational(to_mpz(text), mpz_class(1));
    }

    /// 2^exponent, exactly; negative exponents give dyadic fractions.
    static Rational pow2(std::int64_t exponent) {
        mpz_class p;
        auto magnitude = static_cast<unsigned long>(exponent < 0 ? -exponent : exponent);
        mpz_ui_pow_ui(p.get_mpz_t(), 2, magnitude);
        return exponent >= 0 ? Rational(p, mpz_class(1)) : Rational(mpz_class(1), p);
    }

    [[nodiscard]] std::string to_string() const { return value_.get_str(10); }
    [[nodiscard]] double to_double() const { return value_.get_d(); }
    [[nodiscard]] mpz_class numerator() const { return value_.get_num(); }
    [[nodiscard]] mpz_class denominator() const { return value_.get_den(); }
    [[nodiscard]] const mpq_class& raw() const { return value_; }
    [[nodiscard]] int sign() const { return sgn(value_); }

    /// Fixed-point decimal rendering, for display only.
    [[nodiscard]] std::string to_decimal(unsigned places) const {
        mpz_class scale;
        mpz_ui_pow_ui(scale.get_mpz_t(), 10, places);
        mpq_class scaled = value_ * scale;
        mpz_class q = scaled.get_num() / scaled.get_den();  // truncates toward zero
        mpz_class mag = abs(q);
        std::string digits = mag.get_str();
        if (digits.size() <= places) digits.insert(0, places + 1 - digits.size(), '0');
        std::string out = sgn(value_) < 0 ? "-" : "";
        out += digits.substr(0, digits.size() - places);
        if (places > 0) out += "." + digits.substr(digits.size() - places);
        return out;
    }

    Rational& operator+=(const Rational& o) { value_ += o.value_; return *this; }
    Rational& operator-=(const Rational& o) { value_ -= o.value_; return *this; }
    Rational& operator*=(const Rational& o) { value_ *= o.value_; return *this; }
    Rational& operator/=(const Rational& o) {
        if (o.value_ == 0) throw std::domain_error("division by zero");
        value_ /= o.value_;
        return *this;
    }

    friend Rational operator+(Rational a, const Rational& b) { return a += b; }
    friend Rational operator-(Rational a, const Rational& b) { return a -= b; }
    friend Rational operator*(Rational a, const Rational& b) { return a *= b; }
    friend Rational operator/(Rational a, const Rational& b) { return a /= b; }
    friend Rational operator-(const Rational& a) { return Rational(mpq_class(-a.value_)); }

    friend bool operator==(const Rational& a, const Rational& b) { return cmp(a.value_, b.value_) == 0; }
    friend std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
        int c = cmp(a.value_, b.value_);
        return c < 0 ? std::strong_ordering::less
             : c > 0 ? std::strong_ordering::greater
                     : std::strong_ordering::equal;
    }

    friend std::ostream& operator<<(std::ostream& os, const Rational& r) { return os << r.to_string(); }

private:
    mpq_class value_;
};

inline Rational abs(const Rational& r) { return r.sign() < 0 ? -r : r; }
inline Rational min(const Rational& a, const Rational& b) { return b < a ? b : a; }
inline Rational max(const Rational& a, const Rational& b) { return a < b ? b : a; }

}  // namespace kflat
