#include "prociter/bigint.hpp"

#include <algorithm>
#include <cassert>
#include <stdexcept>

namespace prociter {

namespace {
constexpr uint64_t kBase = uint64_t(1) << 32;
}

BigUint::BigUint(uint64_t v) {
    if (v) limbs_.push_back(uint32_t(v));
    if (v >> 32) limbs_.push_back(uint32_t(v >> 32));
}

void BigUint::trim() {
    while (!limbs_.empty() && limbs_.back() == 0) limbs_.pop_back();
}

uint64_t BigUint::to_u64() const {
    uint64_t v = 0;
    if (limbs_.size() > 1) v = uint64_t(limbs_[1]) << 32;
    if (!limbs_.empty()) v |= limbs_[0];
    return v;
}

int BigUint::cmp(const BigUint& a, const BigUint& b) {
    if (a.limbs_.size() != b.limbs_.size())
        return a.limbs_.size() < b.limbs_.size() ? -1 : 1;
    for (size_t i = a.limbs_.size(); i-- > 0;)
        if (a.limbs_[i] != b.limbs_[i]) return a.limbs_[i] < b.limbs_[i] ? -1 : 1;
    return 0;
}

BigUint operator+(const BigUint& a, const BigUint& b) {
    BigUint out;
    const size_t n = std::max(a.limbs_.size(), b.limbs_.size());
    out.limbs_.resize(n);
    uint64_t carry = 0;
    for (size_t i = 0; i < n; ++i) {
        uint64_t s = carry;
        if (i < a.limbs_.size()) s += a.limbs_[i];
        if (i < b.limbs_.size()) s += b.limbs_[i];
        out.limbs_[i] = uint32_t(s);
        carry = s >> 32;
    }
    if (carry) out.limbs_.push_back(uint32_t(carry));
    return out;
}

BigUint operator-(const BigUint& a, const BigUint& b) {
    assert(BigUint::cmp(a, b) >= 0);
    BigUint out;
    out.limbs_.resize(a.limbs_.size());
    int64_t borrow = 0;
    for (size_t i = 0; i < a.limbs_.size(); ++i) {
        int64_t t = int64_t(a.limbs_[i]) - borrow - (i < b.limbs_.size() ? int64_t(b.limbs_[i]) : 0);
        borrow = t < 0 ? 1 : 0;
        if (t < 0) t += int64_t(kBase);
        out.limbs_[i] = uint32_t(t);
    }
    out.trim();
    return out;
}

BigUint operator*(const BigUint& a, const BigUint& b) {
    if (a.is_zero() || b.is_zero()) return BigUint();
    BigUint out;
    out.limbs_.assign(a.limbs_.size() + b.limbs_.size(), 0);
    for (size_t i = 0; i < a.limbs_.size(); ++i) {
        uint64_t carry = 0;
        for (size_t j = 0; j < b.limbs_.size(); ++j) {
            uint64_t cur = out.limbs_[i + j] + uint64_t(a.limbs_[i]) * b.limbs_[j] + carry;
            out.limbs_[i + j] = uint32_t(cur);
            carry = cur >> 32;
        }
        out.limbs_[i + b.limbs_.size()] += uint32_t(carry);
    }
    out.trim();
    return out;
}

void BigUint::shift_left_bits(unsigned s) {
    if (s == 0 || is_zero()) return;
    assert(s < 32);
    uint32_t carry = 0;
    for (auto& limb : limbs_) {
        uint64_t cur = (uint64_t(limb) << s) | carry;
        limb = uint32_t(cur);
        carry = uint32_t(cur >> 32);
    }
    if (carry) limbs_.push_back(carry);
}

void BigUint::shift_right_bits(unsigned s) {
    if (s == 0 || is_zero()) return;
    assert(s < 32);
    for (size_t i = 0; i + 1 < limbs_.size(); ++i)
        limbs_[i] = uint32_t((limbs_[i] >> s) | (uint64_t(limbs_[i + 1]) << (32 - s)));
    limbs_.back() >>= s;
    trim();
}

uint32_t BigUint::divmod_small(uint32_t d) {
    uint64_t rem = 0;
    for (size_t i = limbs_.size(); i-- > 0;) {
        uint64_t cur = (rem << 32) | limbs_[i];
        limbs_[i] = uint32_t(cur / d);
        rem = cur % d;
    }
    trim();
    return uint32_t(rem);
}

// Knuth algorithm D.
void BigUint::divmod(const BigUint& a, const BigUint& b, BigUint& q, BigUint& r) {
    if (b.is_zero()) throw std::domain_error("BigUint: division by zero");
    if (cmp(a, b) < 0) {
        q = BigUint();
        r = a;
        return;
    }
    if (b.limbs_.size() == 1) {
        q = a;
        uint32_t rem = q.divmod_small(b.limbs_[0]);
        r = BigUint(rem);
        return;
    }

    unsigned s = 0;
    for (uint32_t top = b.limbs_.back(); !(top & 0x80000000u); top <<= 1) ++s;
    BigUint bs = b, as = a;
    bs.shift_left_bits(s);
    as.shift_left_bits(s);
    as.limbs_.push_back(0);

    const size_t n = bs.limbs_.size();
    const size_t m = as.limbs_.size() - n - 1;
    q.limbs_.assign(m + 1, 0);

    for (size_t j = m + 1; j-- > 0;) {
        uint64_t num = (uint64_t(as.limbs_[j + n]) << 32) | as.limbs_[j + n - 1];
        uint64_t qhat = num / bs.limbs_[n - 1];
        uint64_t rhat = num % bs.limbs_[n - 1];
        while (qhat >= kBase ||
               qhat * bs.limbs_[n - 2] > ((rhat << 32) | as.limbs_[j + n - 2])) {
            --qhat;
            rhat += bs.limbs_[n - 1];
            if (rhat >= kBase) break;
        }

        // Multiply-subtract qhat*bs from as[j .. j+n].
        int64_t borrow = 0;
        uint64_t carry = 0;
        for (size_t i = 0; i < n; ++i) {
            uint64_t p = qhat * bs.limbs_[i] + carry;
            carry = p >> 32;
            int64_t t = int64_t(as.limbs_[j + i]) - int64_t(uint32_t(p)) - borrow;
            borrow = t < 0 ? 1 : 0;
            if (t < 0) t += int64_t(kBase);
            as.limbs_[j + i] = uint32_t(t);
        }
        int64_t t = int64_t(as.limbs_[j + n]) - int64_t(carry) - borrow;
        bool negative = t < 0;
        if (t < 0) t += int64_t(kBase);
        as.limbs_[j + n] = uint32_t(t);

        if (negative) {
            --qhat;
            uint64_t add_carry = 0;
            for (size_t i = 0; i < n; ++i) {
                uint64_t sum = uint64_t(as.limbs_[j + i]) + bs.limbs_[i] + add_carry;
                as.limbs_[j + i] = uint32_t(sum);
                add_carry = sum >> 32;
            }
            as.limbs_[j + n] += uint32_t(add_carry);
        }
        q.limbs_[j] = uint32_t(qhat);
    }

    q.trim();
    as.limbs_.resize(n);
    as.trim();
    as.shift_right_bits(s);
    r = as;
}

BigUint operator/(const BigUint& a, const BigUint& b) {
    BigUint q, r;
    BigUint::divmod(a, b, q, r);
    return q;
}

BigUint operator%(const BigUint& a, const BigUint& b) {
    BigUint q, r;
    BigUint::divmod(a, b, q, r);
    return r;
}

BigUint BigUint::gcd(BigUint a, BigUint b) {
    while (!b.is_zero()) {
        BigUint q, r;
        divmod(a, b, q, r);
        a = b;
        b = r;
    }
    return a;
}

BigUint BigUint::pow2(unsigned k) {
    BigUint out;
    out.limbs_.assign(k / 32 + 1, 0);
    out.limbs_.back() = uint32_t(1) << (k % 32);
    return out;
}

BigUint BigUint::from_decimal(const std::string& s) {
    if (s.empty()) throw std::invalid_argument("BigUint: empty numeral");
    BigUint out;
    for (char c : s) {
        if (c < '0' || c > '9') throw std::invalid_argument("BigUint: bad digit in numeral");
        out = out * BigUint(10) + BigUint(uint64_t(c - '0'));
    }
    return out;
}

std::string BigUint::to_string() const {
    if (is_zero()) return "0";
    BigUint tmp = *this;
    std::string out;
    while (!tmp.is_zero()) {
        uint32_t chunk = tmp.divmod_small(1000000000u);
        std::string part = std::to_string(chunk);
        if (!tmp.is_zero()) part.insert(0, 9 - part.size(), '0');
        out.insert(0, part);
    }
    return out;
}

size_t BigUint::hash() const {
    size_t h = 0x9e3779b97f4a7c15ull;
    for (uint32_t limb : limbs_) h = (h ^ limb) * 0x100000001b3ull;
    return h;
}

}  // namespace prociter
