/* rational.hpp -- exact rationals over BigUint; always normalized.
 *
 * Weights, subdistribution masses and the Banach metric checks all live
 * here: law checks compare these values for exact equality, never within
 * a floating-point tolerance.
 */

#ifndef PROCITER_RATIONAL_HPP_
#define PROCITER_RATIONAL_HPP_

#include <string>

#include "prociter/bigint.hpp"

namespace prociter {

class Rational {
public:
    Rational() : num_(0), den_(1) {}
    Rational(int64_t v);
    Rational(int64_t num, int64_t den);
    Rational(bool neg, BigUint num, BigUint den);

    static Rational parse(const std::string& text);  // "p/q" or "p"
    static Rational pow2_inverse(unsigned k) { return Rational(false, BigUint(1), BigUint::pow2(k)); }

    bool is_zero() const { return num_.is_zero(); }
    bool is_one() const { return !neg_ && num_.is_one() && den_.is_one(); }
    bool negative() const { return neg_; }

    friend Rational operator+(const Rational& a, const Rational& b);
    friend Rational operator-(const Rational& a, const Rational& b);
    friend Rational operator*(const Rational& a, const Rational& b);

    static int cmp(const Rational& a, const Rational& b);
    friend bool operator==(const Rational& a, const Rational& b) { return cmp(a, b) == 0; }
    friend bool operator!=(const Rational& a, const Rational& b) { return cmp(a, b) != 0; }
    friend bool operator<(const Rational& a, const Rational& b) { return cmp(a, b) < 0; }
    friend bool operator<=(const Rational& a, const Rational& b) { return cmp(a, b) <= 0; }
    friend bool operator>(const Rational& a, const Rational& b) { return cmp(a, b) > 0; }

    std::string to_string() const;  // "p/q", or "p" when the denominator is 1
    size_t hash() const;

private:
    bool neg_ = false;
    BigUint num_;
    BigUint den_;
    void normalize();
};

inline Rational max(const Rational& a, const Rational& b) { return a < b ? b : a; }

}  // namespace prociter

#endif
