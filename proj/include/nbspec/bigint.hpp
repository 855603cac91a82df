#pragma once

// Unsigned arbitrary-precision integer, just big enough for exact walk
// counting: addition, small-factor multiplication, decimal output.

#include <cmath>
#include <compare>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace nbspec {

class BigUInt {
public:
    BigUInt() = default;
    BigUInt(std::uint64_t v) {
        if (v != 0) limbs_.push_back(v);
    }

    bool is_zero() const { return limbs_.empty(); }

    BigUInt& operator+=(const BigUInt& rhs) {
        const std::size_t n = std::max(limbs_.size(), rhs.limbs_.size());
        limbs_.resize(n, 0);
        unsigned __int128 carry = 0;
        for (std::size_t i = 0; i < n; ++i) {
            unsigned __int128 s = carry + limbs_[i];
            if (i < rhs.limbs_.size()) s += rhs.limbs_[i];
            limbs_[i] = static_cast<std::uint64_t>(s);
            carry = s >> 64;
        }
        if (carry != 0) limbs_.push_back(static_cast<std::uint64_t>(carry));
        return *this;
    }

    BigUInt& operator+=(std::uint64_t v) {
        std::size_t i = 0;
        while (v != 0) {
            if (i == limbs_.size()) {
                limbs_.push_back(v);
                return *this;
            }
            unsigned __int128 s = static_cast<unsigned __int128>(limbs_[i]) + v;
            limbs_[i] = static_cast<std::uint64_t>(s);
            v = static_cast<std::uint64_t>(s >> 64);
            ++i;
        }
        return *this;
    }

    BigUInt& operator*=(std::uint64_t v) {
        if (v == 0) {
            limbs_.clear();
            return *this;
        }
        unsigned __int128 carry = 0;
        for (auto& limb : limbs_) {
            unsigned __int128 p = static_cast<unsigned __int128>(limb) * v + carry;
            limb = static_cast<std::uint64_t>(p);
            carry = p >> 64;
        }
        if (carry != 0) limbs_.push_back(static_cast<std::uint64_t>(carry));
        return *this;
    }

    friend BigUInt operator+(BigUInt a, const BigUInt& b) { return a += b; }
    friend BigUInt operator*(BigUInt a, std::uint64_t b) { return a *= b; }

    friend bool operator==(const BigUInt& a, const BigUInt& b) { return a.limbs_ == b.limbs_; }

    friend std::strong_ordering operator<=>(const BigUInt& a, const BigUInt& b) {
        if (a.limbs_.size() != b.limbs_.size())
            return a.limbs_.size() <=> b.limbs_.size();
        for (std::size_t i = a.limbs_.size(); i-- > 0;) {
            if (a.limbs_[i] != b.limbs_[i]) return a.limbs_[i] <=> b.limbs_[i];
        }
        return std::strong_ordering::equal;
    }

    // Exact iff the value fits in 53 bits; otherwise correctly rounded up to
    // the usual double-rounding in the limb accumulation.
    double to_double() const {
        double x = 0.0;
        for (std::size_t i = limbs_.size(); i-- > 0;)
            x = x * 18446744073709551616.0 + static_cast<double>(limbs_[i]);
        return x;
    }

    bool fits_u64() const { return limbs_.size() <= 1; }
    std::uint64_t to_u64() const {
        if (!fits_u64()) throw std::overflow_error("BigUInt: value exceeds 64 bits");
        return limbs_.empty() ? 0 : limbs_[0];
    }

    std::string to_string() const {
        if (limbs_.empty()) return "0";
        std::vector<std::uint64_t> work(limbs_);
        std::string out;
        static constexpr std::uint64_t chunk = 10000000000000000000ull;  // 10^19
        while (!work.empty()) {
            unsigned __int128 rem = 0;
            for (std::size_t i = work.size(); i-- > 0;) {
                unsigned __int128 cur = (rem << 64) | work[i];
                work[i] = static_cast<std::uint64_t>(cur / chunk);
                rem = cur % chunk;
            }
            while (!work.empty() && work.back() == 0) work.pop_back();
            std::string digits = std::to_string(static_cast<std::uint64_t>(rem));
            if (!work.empty()) digits.insert(0, 19 - digits.size(), '0');
            out.insert(0, digits);
        }
        return out;
    }

private:
    std::vector<std::uint64_t> limbs_;  // little-endian base 2^64, no leading zeros
};

}  // namespace nbspec
