#pragma once

#include <cmath>
#include <limits>
#include <string>

#include "dht/errors.hpp"

namespace dht {

/// Extended real in nats: a finite double, +inf or -inf.
///
/// Infinities are explicit states rather than IEEE sentinels. Addition
/// absorbs into the infinity; +inf plus -inf throws IndeterminateError.
/// NaN never enters: constructing from a non-finite double is an error.
class ExtReal {
  public:
    ExtReal() : v_(0.0), k_(Kind::Finite) {}

    ExtReal(double v) : v_(v), k_(Kind::Finite) {
        if (!std::isfinite(v))
            throw InputError("ExtReal: finite constructor given non-finite value");
    }

    static ExtReal infinity() { return ExtReal(Kind::PosInf); }
    static ExtReal neg_infinity() { return ExtReal(Kind::NegInf); }

    bool finite() const { return k_ == Kind::Finite; }
    bool pos_inf() const { return k_ == Kind::PosInf; }
    bool neg_inf() const { return k_ == Kind::NegInf; }

    /// Finite value; throws if infinite.
    double value() const {
        if (!finite())
            throw EvaluationError("ExtReal: value() on infinite quantity");
        return v_;
    }

    /// Lossy view for printing/comparison: infinities map to +-HUGE_VAL.
    double as_double() const {
        if (pos_inf()) return std::numeric_limits<double>::infinity();
        if (neg_inf()) return -std::numeric_limits<double>::infinity();
        return v_;
    }

    friend ExtReal operator+(const ExtReal& a, const ExtReal& b) {
        if (a.finite() && b.finite()) return ExtReal(a.v_ + b.v_);
        if (a.pos_inf() && b.neg_inf()) throw IndeterminateError("ExtReal: +inf + -inf");
        if (a.neg_inf() && b.pos_inf()) throw IndeterminateError("ExtReal: -inf + +inf");
        if (a.pos_inf() || b.pos_inf()) return infinity();
        return neg_infinity();
    }

    friend ExtReal operator-(const ExtReal& a, const ExtReal& b) { return a + b.negated(); }

    ExtReal& operator+=(const ExtReal& o) { return *this = *this + o; }

    ExtReal negated() const {
        if (pos_inf()) return neg_infinity();
        if (neg_inf()) return infinity();
        return ExtReal(-v_);
    }

    /// Weighted scaling with the convention 0 * inf = 0 (zero-mass rows
    /// carry no divergence). Negative weights are rejected.
    friend ExtReal weighted(double w, const ExtReal& x) {
        if (w < 0.0) throw InputError("ExtReal: negative weight");
        if (w == 0.0) return ExtReal(0.0);
        if (x.finite()) return ExtReal(w * x.v_);
        return x;
    }

    friend bool operator<(const ExtReal& a, const ExtReal& b) {
        return a.as_double() < b.as_double();
    }
    friend bool operator<=(const ExtReal& a, const ExtReal& b) { return !(b < a); }
    friend bool operator>(const ExtReal& a, const ExtReal& b) { return b < a; }
    friend bool operator>=(const ExtReal& a, const ExtReal& b) { return !(a < b); }

    std::string str() const {
        if (pos_inf()) return "inf";
        if (neg_inf()) return "-inf";
        return std::to_string(v_);
    }

  private:
    enum class Kind { Finite, PosInf, NegInf };
    explicit ExtReal(Kind k) : v_(0.0), k_(k) {}

    double v_;
    Kind k_;
};

} // namespace dht
