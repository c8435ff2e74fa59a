#include "prociter/rational.hpp"

#include <stdexcept>

namespace prociter {

Rational::Rational(int64_t v)
    : neg_(v < 0), num_(v < 0 ? uint64_t(-(v + 1)) + 1 : uint64_t(v)), den_(1) {}

Rational::Rational(int64_t num, int64_t den) {
    if (den == 0) throw std::domain_error("Rational: zero denominator");
    neg_ = (num < 0) != (den < 0);
    num_ = BigUint(num < 0 ? uint64_t(-(num + 1)) + 1 : uint64_t(num));
    den_ = BigUint(den < 0 ? uint64_t(-(den + 1)) + 1 : uint64_t(den));
    normalize();
}

Rational::Rational(bool neg, BigUint num, BigUint den)
    : neg_(neg), num_(std::move(num)), den_(std::move(den)) {
    if (den_.is_zero()) throw std::domain_error("Rational: zero denominator");
    normalize();
}

void Rational::normalize() {
    if (num_.is_zero()) {
        neg_ = false;
        den_ = BigUint(1);
        return;
    }
    BigUint g = BigUint::gcd(num_, den_);
    if (!g.is_one()) {
        num_ = num_ / g;
        den_ = den_ / g;
    }
}

Rational Rational::parse(const std::string& text) {
    size_t slash = text.find('/');
    if (slash == std::string::npos)
        return Rational(false, BigUint::from_decimal(text), BigUint(1));
    return Rational(false, BigUint::from_decimal(text.substr(0, slash)),
                    BigUint::from_decimal(text.substr(slash + 1)));
}

Rational operator+(const Rational& a, const Rational& b) {
    BigUint left = a.num_ * b.den_;
    BigUint right = b.num_ * a.den_;
    BigUint den = a.den_ * b.den_;
    if (a.neg_ == b.neg_) return Rational(a.neg_, left + right, std::move(den));
    if (BigUint::cmp(left, right) >= 0) return Rational(a.neg_, left - right, std::move(den));
    return Rational(b.neg_, right - left, std::move(den));
}

Rational operator-(const Rational& a, const Rational& b) {
    Rational nb = b;
    if (!nb.is_zero()) nb.neg_ = !nb.neg_;
    return a + nb;
}

Rational operator*(const Rational& a, const Rational& b) {
    return Rational(a.neg_ != b.neg_, a.num_ * b.num_, a.den_ * b.den_);
}

int Rational::cmp(const Rational& a, const Rational& b) {
    if (a.neg_ != b.neg_) return a.neg_ ? -1 : 1;
    int c = BigUint::cmp(a.num_ * b.den_, b.num_ * a.den_);
    return a.neg_ ? -c : c;
}

std::string Rational::to_string() const {
    std::string out = neg_ ? "-" : "";
    out += num_.to_string();
    if (!den_.is_one()) out += "/" + den_.to_string();
    return out;
}

size_t Rational::hash() const {
    size_t h = num_.hash() * 31 + den_.hash();
    return neg_ ? ~h : h;
}

}  // namespace prociter
