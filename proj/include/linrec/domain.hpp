#ifndef LINREC_DOMAIN_HPP
#define LINREC_DOMAIN_HPP

#include <gmpxx.h>

#include <atomic>
#include <cstdint>
#include <memory>
#include <string>

#include "linrec/errors.hpp"
#include "linrec/kernels.hpp"

// Coefficient domains.  Each domain is a cheap handle: value-type elements
// plus a shared operation counter, so copies of a domain accumulate into
// the same tally.  Elements are always kept canonical (prime-field
// residues in [0, p), rationals in lowest terms with positive
// denominator).

namespace linrec {

using u32 = std::uint32_t;
using u64 = std::uint64_t;
using i64 = std::int64_t;

struct OpCountReport {
    u64 adds = 0;
    u64 muls = 0;
    u64 invs = 0;
};

class OpCounter {
  public:
    void tally(u64 adds, u64 muls, u64 invs) {
        if (adds) adds_.fetch_add(adds, std::memory_order_relaxed);
        if (muls) muls_.fetch_add(muls, std::memory_order_relaxed);
        if (invs) invs_.fetch_add(invs, std::memory_order_relaxed);
    }
    void bump_add() { adds_.fetch_add(1, std::memory_order_relaxed); }
    void bump_mul() { muls_.fetch_add(1, std::memory_order_relaxed); }
    void bump_inv() { invs_.fetch_add(1, std::memory_order_relaxed); }
    OpCountReport snapshot() const {
        return {adds_.load(std::memory_order_relaxed), muls_.load(std::memory_order_relaxed),
                invs_.load(std::memory_order_relaxed)};
    }

  private:
    std::atomic<u64> adds_{0};
    std::atomic<u64> muls_{0};
    std::atomic<u64> invs_{0};
};

enum class DomainKind { PrimeField, Rational, Float64 };

namespace detail {

inline u64 mulmod_u64(u64 a, u64 b, u64 p) { return u64(kern::u128(a) * b % p); }

inline u64 powmod_u64(u64 b, u64 e, u64 p) {
    u64 r = 1 % p;
    b %= p;
    while (e) {
        if (e & 1) r = mulmod_u64(r, b, p);
        b = mulmod_u64(b, b, p);
        e >>= 1;
    }
    return r;
}

// deterministic Miller-Rabin for 64-bit inputs
inline bool is_prime_u64(u64 n) {
    if (n < 2) return false;
    for (u64 q : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
        if (n == q) return true;
        if (n % q == 0) return false;
    }
    u64 d = n - 1;
    int s = 0;
    while ((d & 1) == 0) d >>= 1, ++s;
    for (u64 a : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
        u64 x = powmod_u64(a, d, n);
        if (x == 1 || x == n - 1) continue;
        bool witness = true;
        for (int r = 1; r < s; ++r) {
            x = mulmod_u64(x, x, n);
            if (x == n - 1) {
                witness = false;
                break;
            }
        }
        if (witness) return false;
    }
    return true;
}

}  // namespace detail

// Z/p for an odd prime p < 2^63.  Elements are residues in [0, p).
class Fp {
  public:
    using Elem = u64;
    static constexpr bool exact = true;
    static constexpr DomainKind kind = DomainKind::PrimeField;

    explicit Fp(u64 p) : p_(p), m64_(p), ctr_(std::make_shared<OpCounter>()) {
        if (p < 3 || (p & 1) == 0 || p >= (u64(1) << 63))
            throw Error("prime-field modulus must be an odd prime below 2^63");
        if (!detail::is_prime_u64(p)) throw Error("prime-field modulus " + std::to_string(p) + " is not prime");
        if (p < (u64(1) << 31)) m32_ = kern::Mont32(u32(p));
    }

    u64 modulus() const { return p_; }
    const kern::Mont64& mont64() const { return m64_; }
    const kern::Mont32& mont32() const { return m32_; }
    bool fits_u32() const { return p_ < (u64(1) << 31); }

    Elem zero() const { return 0; }
    Elem one() const { return 1; }
    bool is_zero(Elem a) const { return a == 0; }
    bool eq(Elem a, Elem b) const { return a == b; }

    Elem add(Elem a, Elem b) const {
        ctr_->bump_add();
        u64 t = a + b;
        return t >= p_ ? t - p_ : t;
    }
    Elem sub(Elem a, Elem b) const {
        ctr_->bump_add();
        return a >= b ? a - b : a + p_ - b;
    }
    Elem neg(Elem a) const { return a == 0 ? 0 : p_ - a; }
    Elem mul(Elem a, Elem b) const {
        ctr_->bump_mul();
        return m64_.mul_std(a, b);
    }
    Elem inv(Elem a) const {
        ctr_->bump_inv();
        if (a == 0) throw Error("division by zero in prime field");
        return inv_nocount(a);  // extended Euclid; p prime so gcd is 1
    }
    Elem div(Elem a, Elem b) const { return mul(a, inv(b)); }

    Elem from_int(i64 v) const {
        i64 m = v % i64(p_);
        return m < 0 ? u64(m + i64(p_)) : u64(m);
    }
    Elem from_uint(u64 v) const { return v % p_; }
    Elem parse(const std::string& s) const {
        auto slash = s.find('/');
        if (slash != std::string::npos) {
            auto num = parse(s.substr(0, slash));
            auto den = parse(s.substr(slash + 1));
            if (den == 0) throw Error("prime-field literal with denominator divisible by the modulus");
            return mul_nocount(num, inv_nocount(den));
        }
        mpz_class z;
        if (z.set_str(s, 10) != 0) throw ParseError("bad prime-field literal: " + s);
        mpz_class mod;
        mpz_import(mod.get_mpz_t(), 1, 1, sizeof(p_), 0, 0, &p_);
        mpz_class r = z % mod;
        if (r < 0) r += mod;
        return mpz_get_ui(r.get_mpz_t());
    }
    std::string to_string(Elem a) const { return std::to_string(a); }

    OpCounter& counter() const { return *ctr_; }
    std::shared_ptr<OpCounter> counter_handle() const { return ctr_; }

    u64 mul_nocount(u64 a, u64 b) const { return m64_.mul_std(a, b); }
    u64 inv_nocount(u64 a) const {
        i64 t = 0, newt = 1;
        u64 r = p_, newr = a;
        while (newr != 0) {
            u64 q = r / newr;
            i64 tmp = t - i64(q) * newt;
            t = newt;
            newt = tmp;
            u64 tmpr = r - q * newr;
            r = newr;
            newr = tmpr;
        }
        return t < 0 ? u64(t + i64(p_)) : u64(t);
    }

    bool same(const Fp& o) const { return p_ == o.p_; }
    // characteristic is p
    bool char_at_least(u64 bound) const { return p_ >= bound; }

  private:
    u64 p_;
    kern::Mont64 m64_;
    kern::Mont32 m32_;
    std::shared_ptr<OpCounter> ctr_;
};

// Exact rationals backed by GMP; always lowest terms, positive denominator.
class Rational {
  public:
    using Elem = mpq_class;
    static constexpr bool exact = true;
    static constexpr DomainKind kind = DomainKind::Rational;

    Rational() : ctr_(std::make_shared<OpCounter>()) {}

    Elem zero() const { return mpq_class(0); }
    Elem one() const { return mpq_class(1); }
    bool is_zero(const Elem& a) const { return sgn(a) == 0; }
    bool eq(const Elem& a, const Elem& b) const { return cmp(a, b) == 0; }

    Elem add(const Elem& a, const Elem& b) const {
        ctr_->bump_add();
        return a + b;
    }
    Elem sub(const Elem& a, const Elem& b) const {
        ctr_->bump_add();
        return a - b;
    }
    Elem neg(const Elem& a) const { return -a; }
    Elem mul(const Elem& a, const Elem& b) const {
        ctr_->bump_mul();
        return a * b;
    }
    Elem inv(const Elem& a) const {
        ctr_->bump_inv();
        if (sgn(a) == 0) throw Error("division by zero in rational domain");
        return 1 / a;
    }
    Elem div(const Elem& a, const Elem& b) const { return mul(a, inv(b)); }

    Elem from_int(i64 v) const { return mpq_class(static_cast<long>(v)); }
    Elem from_uint(u64 v) const {
        mpz_class z;
        mpz_import(z.get_mpz_t(), 1, 1, sizeof(v), 0, 0, &v);
        return mpq_class(z);
    }
    Elem parse(const std::string& s) const {
        mpq_class q;
        if (q.set_str(s, 10) != 0) throw ParseError("bad rational literal: " + s);
        q.canonicalize();
        return q;
    }
    std::string to_string(const Elem& a) const { return a.get_str(); }

    OpCounter& counter() const { return *ctr_; }
    std::shared_ptr<OpCounter> counter_handle() const { return ctr_; }

    bool same(const Rational&) const { return true; }
    bool char_at_least(u64) const { return true; }

  private:
    std::shared_ptr<OpCounter> ctr_;
};

// Binary doubles; permitted only where the build needs approximation.
class Float64 {
  public:
    using Elem = double;
    static constexpr bool exact = false;
    static constexpr DomainKind kind = DomainKind::Float64;

    Float64() : ctr_(std::make_shared<OpCounter>()) {}

    Elem zero() const { return 0.0; }
    Elem one() const { return 1.0; }
    bool is_zero(Elem a) const { return a == 0.0; }
    bool eq(Elem a, Elem b) const { return a == b; }

    Elem add(Elem a, Elem b) const {
        ctr_->bump_add();
        return a + b;
    }
    Elem sub(Elem a, Elem b) const {
        ctr_->bump_add();
        return a - b;
    }
    Elem neg(Elem a) const { return -a; }
    Elem mul(Elem a, Elem b) const {
        ctr_->bump_mul();
        return a * b;
    }
    Elem inv(Elem a) const {
        ctr_->bump_inv();
        if (a == 0.0) throw Error("division by zero in float domain");
        return 1.0 / a;
    }
    Elem div(Elem a, Elem b) const { return mul(a, inv(b)); }

    Elem from_int(i64 v) const { return double(v); }
    Elem from_uint(u64 v) const { return double(v); }
    Elem parse(const std::string& s) const {
        std::size_t pos = 0;
        double v = 0;
        try {
            v = std::stod(s, &pos);
        } catch (const std::exception&) {
            throw ParseError("bad float literal: " + s);
        }
        if (pos != s.size()) {
            // allow "a/b" rationals as a convenience
            if (s[pos] == '/') {
                double den = std::stod(s.substr(pos + 1));
                if (den == 0.0) throw ParseError("bad float literal: " + s);
                return v / den;
            }
            throw ParseError("bad float literal: " + s);
        }
        return v;
    }
    std::string to_string(Elem a) const {
        char buf[40];
        std::snprintf(buf, sizeof buf, "%.17g", a);
        return buf;
    }

    OpCounter& counter() const { return *ctr_; }
    std::shared_ptr<OpCounter> counter_handle() const { return ctr_; }

    bool same(const Float64&) const { return true; }
    bool char_at_least(u64) const { return true; }

  private:
    std::shared_ptr<OpCounter> ctr_;
};

template <class D>
bool char_at_least(const D& dom, u64 bound) {
    return dom.char_at_least(bound);
}

template <class D>
void require_same_domain(const D& a, const D& b) {
    if (!a.same(b)) throw DomainMismatch();
}

}  // namespace linrec

#endif
