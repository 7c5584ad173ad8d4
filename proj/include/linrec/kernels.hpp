#ifndef LINREC_KERNELS_HPP
#define LINREC_KERNELS_HPP

#include <cstddef>
#include <cstdint>
#include <vector>

// Data-parallel inner loops for the prime-field domain.  Every operation
// has a scalar reference implementation and (on x86) an AVX2 variant; the
// active lane is chosen once at runtime.  All kernels take and return
// values in standard residue form [0, p); Montgomery form is transient.

namespace linrec::kern {

using u32 = std::uint32_t;
using u64 = std::uint64_t;
using u128 = unsigned __int128;

// Montgomery context for odd p < 2^31 (R = 2^32).
struct Mont32 {
    u32 mod = 0;
    u32 n_inv = 0;  // n_inv * mod == -1 (mod 2^32)
    u32 r = 0;      // 2^32 mod p
    u32 r2 = 0;     // (2^32)^2 mod p

    Mont32() = default;
    explicit Mont32(u32 p) : mod(p) {
        n_inv = p;  // Newton: x *= 2 - p*x, doubling correct bits
        for (int i = 0; i < 4; ++i) n_inv *= 2u - p * n_inv;
        n_inv = ~n_inv + 1u;  // want -p^-1
        r = u32((u64(1) << 32) % p);
        r2 = u32(u64(r) * r % p);
    }

    // val < 2^32 * p  ->  val * R^-1 mod p, in [0, p)
    u32 reduce(u64 val) const {
        u32 q = u32(val) * n_inv;
        u32 res = u32((val + u64(q) * mod) >> 32);
        return res < mod ? res : res - mod;
    }
    // one operand in Montgomery form -> plain product mod p
    u32 mul(u32 a, u32 b) const { return reduce(u64(a) * b); }
    u32 to_mont(u32 a) const { return mul(a, r2); }
};

// Montgomery context for odd p < 2^63 (R = 2^64).
struct Mont64 {
    u64 mod = 0;
    u64 n_inv = 0;
    u64 r2 = 0;

    Mont64() = default;
    explicit Mont64(u64 p) : mod(p) {
        n_inv = p;
        for (int i = 0; i < 5; ++i) n_inv *= 2u - p * n_inv;
        n_inv = ~n_inv + 1u;
        u128 r = (u128(1) << 64) % p;
        r2 = u64(r * r % p);
    }

    u64 reduce(u128 val) const {
        u64 q = u64(val) * n_inv;
        u64 res = u64((val + u128(q) * mod) >> 64);
        return res < mod ? res : res - mod;
    }
    u64 mul(u64 a, u64 b) const { return reduce(u128(a) * b); }
    u64 to_mont(u64 a) const { return mul(a, r2); }
    // plain a*b mod p for standard-form operands
    u64 mul_std(u64 a, u64 b) const { return mul(mul(a, r2), b); }
};

// Twiddle tables for a radix-2 transform of size 2^lg over p (< 2^31).
// w_fwd/w_inv hold per-level arrays back to back: level with half-length
// `len` contributes `len` entries w^j (Montgomery form), len = n/2, n/4,
// ..., 1 in that order.
struct NttTables {
    Mont32 mg;
    int lg = 0;
    std::vector<u32> w_fwd;
    std::vector<u32> w_inv;
};

// One lane of kernel implementations.
struct Ops {
    const char* name;

    // z[i] = (x[i] + y[i]) mod p, operands in [0, p), p < 2^63
    void (*add_mod_u64)(u64* z, const u64* x, const u64* y, std::size_t n, u64 p);
    void (*sub_mod_u64)(u64* z, const u64* x, const u64* y, std::size_t n, u64 p);

    // p < 2^31 variants on u32 data
    void (*add_mod_u32)(u32* z, const u32* x, const u32* y, std::size_t n, u32 p);
    void (*sub_mod_u32)(u32* z, const u32* x, const u32* y, std::size_t n, u32 p);
    // z[i] = x[i] * y[i] mod p
    void (*mul_mod_u32)(u32* z, const u32* x, const u32* y, std::size_t n, const Mont32& mg);
    // acc[i] = (acc[i] + c * x[i]) mod p, c in standard form
    void (*axpy_mod_u32)(u32* acc, u32 c, const u32* x, std::size_t n, const Mont32& mg);
    // z[i] = c * x[i] mod p
    void (*scale_mod_u32)(u32* z, u32 c, const u32* x, std::size_t n, const Mont32& mg);
    // in-place transform; forward maps natural order to bit-reversed,
    // inverse undoes it (final 1/n scaling is the caller's job)
    void (*ntt_u32)(u32* a, int lg, bool inverse, const NttTables& t);
};

const Ops& scalar_ops();
#if defined(__x86_64__) || defined(_M_X64)
const Ops& avx2_ops();
#endif
bool avx2_available();

// Lane selected from CPU features and the LINREC_SIMD environment
// variable (scalar|avx2|auto).
const Ops& active_ops();

}  // namespace linrec::kern

#endif
