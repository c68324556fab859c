#include "membrane/field.hpp"

#include <cstdio>
#include <regex>

namespace membrane {

std::string format_value(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string format_value(const Rational& v) {
    return numerator(v).str() + "/" + denominator(v).str();
}

BigInt binomial(std::int64_t n, std::int64_t k) {
    if (n < 0 || k < 0 || k > n) return BigInt(0);
    if (k > n - k) k = n - k;
    BigInt result(1);
    for (std::int64_t i = 1; i <= k; ++i) {
        result *= n - k + i;
        result /= i;
    }
    return result;
}

bool parse_rational(const std::string& text, Rational& out) {
    static const std::regex pattern(R"(^\s*([+-]?)(\d+)\s*/\s*(\d+)\s*$)");
    std::smatch m;
    if (!std::regex_match(text, m, pattern)) return false;
    BigInt num(m[2].str());
    if (m[1] == "-") num = -num;
    BigInt den(m[3].str());
    if (den == 0) return false;
    out = Rational(num, den);
    return true;
}

}  // namespace membrane
