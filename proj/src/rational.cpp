#include "forcekit/rational.hpp"

#include "forcekit/error.hpp"

#include <cctype>

namespace forcekit {

namespace {

BigInt parse_integer(std::string_view s, std::string_view whole) {
    if (s.empty()) throw InputError("empty integer in rational '" + std::string(whole) + "'");
    std::size_t i = 0;
    bool negative = false;
    if (s[0] == '+' || s[0] == '-') {
        negative = s[0] == '-';
        i = 1;
    }
    if (i == s.size()) throw InputError("malformed rational '" + std::string(whole) + "'");
    BigInt value = 0;
    for (; i < s.size(); ++i) {
        if (!std::isdigit(static_cast<unsigned char>(s[i])))
            throw InputError("malformed rational '" + std::string(whole) + "'");
        value = value * 10 + (s[i] - '0');
    }
    return negative ? BigInt(-value) : value;
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

}  // namespace

Rational parse_rational(std::string_view text) {
    const std::string_view s = trim(text);
    if (const auto slash = s.find('/'); slash != std::string_view::npos) {
        const BigInt num = parse_integer(trim(s.substr(0, slash)), text);
        const BigInt den = parse_integer(trim(s.substr(slash + 1)), text);
        if (den == 0) throw InputError("zero denominator in rational '" + std::string(text) + "'");
        return Rational(num, den);
    }
    if (const auto dot = s.find('.'); dot != std::string_view::npos) {
        std::string_view ipart = s.substr(0, dot);
        std::string_view fpart = s.substr(dot + 1);
        bool negative = !ipart.empty() && ipart[0] == '-';
        if (!ipart.empty() && (ipart[0] == '-' || ipart[0] == '+')) ipart.remove_prefix(1);
        if (ipart.empty()) ipart = "0";
        if (fpart.empty()) fpart = "0";
        BigInt scale = 1;
        for (std::size_t i = 0; i < fpart.size(); ++i) scale *= 10;
        Rational r(parse_integer(ipart, text) * scale + parse_integer(fpart, text), scale);
        return negative ? Rational(-r) : r;
    }
    return Rational(parse_integer(s, text));
}

std::string to_string(const Rational& r) { return r.str(); }

double to_double(const Rational& r) { return r.convert_to<double>(); }

}  // namespace forcekit
