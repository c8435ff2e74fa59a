/* bigint.hpp -- unsigned arbitrary-precision integers (base 2^32 limbs).
 */

#ifndef PROCITER_BIGINT_HPP_
#define PROCITER_BIGINT_HPP_

#include <cstdint>
#include <string>
#include <vector>

namespace prociter {

// Little-endian limbs, no trailing zero limbs; empty vector means 0.
class BigUint {
public:
    BigUint() = default;
    BigUint(uint64_t v);

    static BigUint from_decimal(const std::string& s);
    static BigUint pow2(unsigned k);

    bool is_zero() const { return limbs_.empty(); }
    bool is_one() const { return limbs_.size() == 1 && limbs_[0] == 1; }
    bool fits_u64() const { return limbs_.size() <= 2; }
    uint64_t to_u64() const;  // valid only when fits_u64()

    static int cmp(const BigUint& a, const BigUint& b);
    friend bool operator==(const BigUint& a, const BigUint& b) { return cmp(a, b) == 0; }
    friend bool operator<(const BigUint& a, const BigUint& b) { return cmp(a, b) < 0; }
    friend bool operator<=(const BigUint& a, const BigUint& b) { return cmp(a, b) <= 0; }

    friend BigUint operator+(const BigUint& a, const BigUint& b);
    friend BigUint operator-(const BigUint& a, const BigUint& b);  // requires a >= b
    friend BigUint operator*(const BigUint& a, const BigUint& b);

    // Quotient and remainder; b must be nonzero.
    static void divmod(const BigUint& a, const BigUint& b, BigUint& q, BigUint& r);
    friend BigUint operator/(const BigUint& a, const BigUint& b);
    friend BigUint operator%(const BigUint& a, const BigUint& b);

    static BigUint gcd(BigUint a, BigUint b);

    std::string to_string() const;
    size_t hash() const;

private:
    std::vector<uint32_t> limbs_;
    void trim();
    void shift_left_bits(unsigned s);
    void shift_right_bits(unsigned s);
    uint32_t divmod_small(uint32_t d);  // in-place quotient, returns remainder
};

}  // namespace prociter

#endif
