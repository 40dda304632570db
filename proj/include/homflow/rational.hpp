#pragma once

#include <cstdint>
#include <numeric>
#include <ostream>
#include <stdexcept>
#include <string>

namespace homflow {

// Exact rational arithmetic on int64. Weight vectors in the simple-root basis
// are rationals with tiny denominators (1 or 2 in practice); this keeps cone
// dominance tests exact instead of epsilon-laden.
struct Rat {
    std::int64_t num = 0;
    std::int64_t den = 1;

    Rat() = default;
    Rat(std::int64_t n) : num(n), den(1) {}
    Rat(std::int64_t n, std::int64_t d) : num(n), den(d) { normalize(); }

    void normalize() {
        if (den == 0) throw std::invalid_argument("Rat: zero denominator");
        if (den < 0) { num = -num; den = -den; }
        std::int64_t g = std::gcd(num < 0 ? -num : num, den);
        if (g > 1) { num /= g; den /= g; }
    }

    friend Rat operator+(Rat a, Rat b) { return Rat(a.num * b.den + b.num * a.den, a.den * b.den); }
    friend Rat operator-(Rat a, Rat b) { return Rat(a.num * b.den - b.num * a.den, a.den * b.den); }
    friend Rat operator*(Rat a, Rat b) { return Rat(a.num * b.num, a.den * b.den); }
    friend Rat operator/(Rat a, Rat b) {
        if (b.num == 0) throw std::domain_error("Rat: division by zero");
        return Rat(a.num * b.den, a.den * b.num);
    }
    Rat operator-() const { return Rat(-num, den); }
    Rat& operator+=(Rat b) { *this = *this + b; return *this; }
    Rat& operator-=(Rat b) { *this = *this - b; return *this; }

    friend bool operator==(Rat a, Rat b) { return a.num == b.num && a.den == b.den; }
    friend bool operator!=(Rat a, Rat b) { return !(a == b); }
    friend bool operator<(Rat a, Rat b) { return a.num * b.den < b.num * a.den; }
    friend bool operator<=(Rat a, Rat b) { return a.num * b.den <= b.num * a.den; }
    friend bool operator>(Rat a, Rat b) { return b < a; }
    friend bool operator>=(Rat a, Rat b) { return b <= a; }

    double to_double() const { return static_cast<double>(num) / static_cast<double>(den); }

    std::string str() const {
        if (den == 1) return std::to_string(num);
        return std::to_string(num) + "/" + std::to_string(den);
    }

    friend std::ostream& operator<<(std::ostream& os, Rat r) { return os << r.str(); }
};

// Parses "n" or "n/d" with optional sign and surrounding whitespace.
inline Rat parse_rat(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t");
    std::size_t b = s.find_last_not_of(" \t");
    if (a == std::string::npos) throw std::invalid_argument("Rat: empty string");
    const std::string t = s.substr(a, b - a + 1);
    const std::size_t slash = t.find('/');
    try {
        std::size_t used = 0;
        if (slash == std::string::npos) {
            const std::int64_t n = std::stoll(t, &used);
            if (used != t.size()) throw std::invalid_argument("");
            return Rat(n);
        }
        const std::int64_t n = std::stoll(t.substr(0, slash), &used);
        if (used != slash) throw std::invalid_argument("");
        const std::int64_t d = std::stoll(t.substr(slash + 1), &used);
        if (used != t.size() - slash - 1) throw std::invalid_argument("");
        return Rat(n, d);
    } catch (const std::invalid_argument&) {
        throw std::invalid_argument("Rat: cannot parse '" + s + "'");
    } catch (const std::out_of_range&) {
        throw std::invalid_argument("Rat: out of range '" + s + "'");
    }
}

}  // namespace homflow
