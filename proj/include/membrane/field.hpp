#ifndef MEMBRANE_FIELD_HPP
#define MEMBRANE_FIELD_HPP

#include <cmath>
#include <cstdint>
#include <string>
#include <type_traits>

#include <boost/multiprecision/gmp.hpp>

namespace membrane {

// Expression templates are off so that `auto x = a * b` stays a value.
using Rational = boost::multiprecision::number<boost::multiprecision::gmp_rational,
                                               boost::multiprecision::et_off>;
using BigInt = boost::multiprecision::number<boost::multiprecision::gmp_int,
                                             boost::multiprecision::et_off>;

enum class FieldTag { exact, floating };

template <typename T>
concept Field = std::is_same_v<T, double> || std::is_same_v<T, Rational>;

template <Field T>
constexpr FieldTag field_tag_of() {
    return std::is_same_v<T, double> ? FieldTag::floating : FieldTag::exact;
}

inline const char* to_string(FieldTag tag) {
    return tag == FieldTag::exact ? "exact" : "float";
}

template <Field T>
T from_int(std::int64_t v) {
    if constexpr (std::is_same_v<T, double>) {
        return static_cast<double>(v);
    } else {
        return Rational(v);
    }
}

template <Field T>
T from_ratio(std::int64_t num, std::int64_t den) {
    if constexpr (std::is_same_v<T, double>) {
        return static_cast<double>(num) / static_cast<double>(den);
    } else {
        return Rational(num, den);
    }
}

inline double to_double(double v) { return v; }
inline double to_double(const Rational& v) { return v.convert_to<double>(); }

inline double abs_value(double v) { return std::fabs(v); }
inline double abs_value(const Rational& v) { return std::fabs(to_double(v)); }

inline bool is_zero(double v) { return v == 0.0; }
inline bool is_zero(const Rational& v) { return v.is_zero(); }

// Exact `num/den` for rationals, 17 significant digits for doubles.
std::string format_value(double v);
std::string format_value(const Rational& v);

template <Field T>
T power(const T& base, std::int64_t exponent) {
    T result = from_int<T>(1);
    T b = base;
    bool invert = exponent < 0;
    std::uint64_t e = invert ? static_cast<std::uint64_t>(-exponent) : static_cast<std::uint64_t>(exponent);
    while (e) {
        if (e & 1U) result *= b;
        b *= b;
        e >>= 1U;
    }
    return invert ? from_int<T>(1) / result : result;
}

// binom(n, k) with the convention binom(n, k) = 0 unless 0 <= k <= n.
BigInt binomial(std::int64_t n, std::int64_t k);

template <Field T>
T binomial_as(std::int64_t n, std::int64_t k) {
    if constexpr (std::is_same_v<T, double>) {
        return binomial(n, k).convert_to<double>();
    } else {
        return Rational(binomial(n, k));
    }
}

// Parses "num/den" into a rational, or returns false.
bool parse_rational(const std::string& text, Rational& out);

}  // namespace membrane

#endif  // MEMBRANE_FIELD_HPP
