// extended_real.hpp — nonnegative reals extended with +inf.
//
// gamma(0) = +inf and gamma_e of a finite-corank operator is +inf, and those
// values participate in comparisons, so infinity is a first-class value here
// rather than a float sentinel.

#pragma once

#include <cmath>
#include <string>

#include "rcc/errors.hpp"

namespace rcc {

class ExtendedReal {
  public:
    ExtendedReal() : value_(0.0), infinite_(false) {}

    // finite nonnegative value
    explicit ExtendedReal(double v) : value_(v), infinite_(false) {
        if (!(v >= 0.0) || std::isinf(v) || std::isnan(v))
            throw Error("ExtendedReal: finite value must be a nonnegative real");
    }

    static ExtendedReal infinity() {
        ExtendedReal r;
        r.infinite_ = true;
        return r;
    }

    bool is_infinite() const { return infinite_; }
    bool is_finite() const { return !infinite_; }

    // finite value; throws on +inf
    double value() const {
        if (infinite_) throw Error("ExtendedReal: value() on +inf");
        return value_;
    }

    // finite value, or `cap` when infinite
    double value_or(double cap) const { return infinite_ ? cap : value_; }

    friend bool operator==(const ExtendedReal& a, const ExtendedReal& b) {
        if (a.infinite_ || b.infinite_) return a.infinite_ == b.infinite_;
        return a.value_ == b.value_;
    }
    friend bool operator<(const ExtendedReal& a, const ExtendedReal& b) {
        if (a.infinite_) return false;
        if (b.infinite_) return true;
        return a.value_ < b.value_;
    }
    friend bool operator<=(const ExtendedReal& a, const ExtendedReal& b) {
        return a == b || a < b;
    }
    friend bool operator>(const ExtendedReal& a, const ExtendedReal& b) { return b < a; }
    friend bool operator>=(const ExtendedReal& a, const ExtendedReal& b) { return b <= a; }

    bool operator>(double v) const { return infinite_ || value_ > v; }

    std::string str() const { return infinite_ ? "inf" : std::to_string(value_); }

  private:
    double value_;
    bool infinite_;
};

inline ExtendedReal min(const ExtendedReal& a, const ExtendedReal& b) { return a < b ? a : b; }

}  // namespace rcc
