#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <optional>
#include <stdexcept>
#include <string>

namespace ccs {

// Exact rational arithmetic everywhere. Equilibrium checks hinge on exact
// strict/weak comparisons, so floating point is banned end to end.
using Rational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

// Input data problems (bad ids, malformed numbers, inconsistent networks).
struct InputError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Violated operation preconditions (infeasible game, profile out of domain).
struct DomainError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Configured enumeration budget exceeded.
struct ResourceError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline std::string to_string(const Rational& r) {
    if (denominator(r) == 1) return numerator(r).str();
    return numerator(r).str() + "/" + denominator(r).str();
}

// Accepts "p", "-p", or "p/q" with q > 0 after sign normalization.
// Decimal literals are rejected: "0.7" has no place in an exact pipeline.
inline Rational parse_rational(const std::string& text) {
    if (text.empty()) throw InputError("empty rational literal");
    if (text.find('.') != std::string::npos)
        throw InputError("decimal literal '" + text + "' rejected; write an exact fraction like 7/10");
    auto is_int = [](const std::string& s) {
        if (s.empty()) return false;
        std::size_t i = (s[0] == '-' || s[0] == '+') ? 1 : 0;
        if (i == s.size()) return false;
        for (; i < s.size(); ++i)
            if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
        return true;
    };
    auto slash = text.find('/');
    if (slash == std::string::npos) {
        if (!is_int(text)) throw InputError("bad rational literal '" + text + "'");
        return Rational(BigInt(text));
    }
    std::string num = text.substr(0, slash);
    std::string den = text.substr(slash + 1);
    if (!is_int(num) || !is_int(den)) throw InputError("bad rational literal '" + text + "'");
    BigInt d(den);
    if (d == 0) throw InputError("zero denominator in '" + text + "'");
    return Rational(BigInt(num), d);
}

// H_k = 1 + 1/2 + ... + 1/k, with H_0 = 0.
inline Rational harmonic(int k) {
    if (k < 0) throw DomainError("harmonic number of negative index");
    Rational h = 0;
    for (int j = 1; j <= k; ++j) h += Rational(1, j);
    return h;
}

// A cost that may be infinite (the cost of an infeasible profile).
// Infinity compares greater than every finite value and equal to itself.
class ExtCost {
public:
    ExtCost() : finite_(true), value_(0) {}
    ExtCost(Rational v) : finite_(true), value_(std::move(v)) {}  // NOLINT: implicit by design of call sites
    static ExtCost infinity() {
        ExtCost c;
        c.finite_ = false;
        return c;
    }

    bool is_infinite() const { return !finite_; }
    const Rational& value() const {
        if (!finite_) throw DomainError("infinite cost has no rational value");
        return value_;
    }

    friend bool operator==(const ExtCost& a, const ExtCost& b) {
        if (a.finite_ != b.finite_) return false;
        return !a.finite_ || a.value_ == b.value_;
    }
    friend bool operator!=(const ExtCost& a, const ExtCost& b) { return !(a == b); }
    friend bool operator<(const ExtCost& a, const ExtCost& b) {
        if (!a.finite_) return false;           // inf < x never
        if (!b.finite_) return true;            // finite < inf
        return a.value_ < b.value_;
    }
    friend bool operator<=(const ExtCost& a, const ExtCost& b) { return a < b || a == b; }
    friend bool operator>(const ExtCost& a, const ExtCost& b) { return b < a; }
    friend bool operator>=(const ExtCost& a, const ExtCost& b) { return b <= a; }

    ExtCost& operator+=(const ExtCost& o) {
        if (!finite_ || !o.finite_) {
            finite_ = false;
        } else {
            value_ += o.value_;
        }
        return *this;
    }
    friend ExtCost operator+(ExtCost a, const ExtCost& b) {
        a += b;
        return a;
    }

    std::string str() const { return finite_ ? ccs::to_string(value_) : "infinity"; }

private:
    bool finite_;
    Rational value_;
};

}  // namespace ccs
