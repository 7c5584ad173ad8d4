#if defined(__x86_64__) || defined(_M_X64)

#include <immintrin.h>

#include "linrec/kernels.hpp"

// AVX2 lane.  This translation unit is compiled with -mavx2 and reached
// only after a runtime CPU check.  Arithmetic matches the scalar lane
// step for step (strict [0, p) after every butterfly), so outputs are
// bit-identical across lanes.

namespace linrec::kern {
namespace {

using i256 = __m256i;

inline i256 load(const void* p) { return _mm256_loadu_si256(static_cast<const i256*>(p)); }
inline void store(void* p, i256 v) { _mm256_storeu_si256(static_cast<i256*>(p), v); }

// t in [0, 2p), p < 2^31: min(t, t - p) picks the reduced value
inline i256 shrink_u32(i256 t, i256 p) {
    return _mm256_min_epu32(t, _mm256_sub_epi32(t, p));
}

inline i256 add_mod_u32_vec(i256 a, i256 b, i256 p) {
    return shrink_u32(_mm256_add_epi32(a, b), p);
}

inline i256 sub_mod_u32_vec(i256 a, i256 b, i256 p) {
    i256 t = _mm256_sub_epi32(a, b);
    return _mm256_min_epu32(t, _mm256_add_epi32(t, p));
}

// Montgomery product of 8 lanes; b_mont in Montgomery form, result [0, p).
inline i256 mont_mul_u32_vec(i256 a, i256 b_mont, i256 p, i256 ninv) {
    i256 t_even = _mm256_mul_epu32(a, b_mont);
    i256 t_odd = _mm256_mul_epu32(_mm256_srli_epi64(a, 32), _mm256_srli_epi64(b_mont, 32));
    i256 q_even = _mm256_mul_epu32(t_even, ninv);
    i256 q_odd = _mm256_mul_epu32(t_odd, ninv);
    i256 r_even = _mm256_srli_epi64(_mm256_add_epi64(t_even, _mm256_mul_epu32(q_even, p)), 32);
    i256 r_odd = _mm256_srli_epi64(_mm256_add_epi64(t_odd, _mm256_mul_epu32(q_odd, p)), 32);
    i256 r = _mm256_blend_epi32(r_even, _mm256_slli_epi64(r_odd, 32), 0xAA);
    return shrink_u32(r, p);
}

void add_mod_u32_avx2(u32* z, const u32* x, const u32* y, std::size_t n, u32 p) {
    i256 vp = _mm256_set1_epi32(int(p));
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) store(z + i, add_mod_u32_vec(load(x + i), load(y + i), vp));
    for (; i < n; ++i) {
        u32 t = x[i] + y[i];
        z[i] = t >= p ? t - p : t;
    }
}

void sub_mod_u32_avx2(u32* z, const u32* x, const u32* y, std::size_t n, u32 p) {
    i256 vp = _mm256_set1_epi32(int(p));
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) store(z + i, sub_mod_u32_vec(load(x + i), load(y + i), vp));
    for (; i < n; ++i) {
        u32 t = x[i] - y[i];
        z[i] = x[i] < y[i] ? t + p : t;
    }
}

void mul_mod_u32_avx2(u32* z, const u32* x, const u32* y, std::size_t n, const Mont32& mg) {
    i256 vp = _mm256_set1_epi32(int(mg.mod));
    i256 vninv = _mm256_set1_epi32(int(mg.n_inv));
    i256 vr2 = _mm256_set1_epi32(int(mg.r2));
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        i256 xm = mont_mul_u32_vec(load(x + i), vr2, vp, vninv);
        store(z + i, mont_mul_u32_vec(xm, load(y + i), vp, vninv));
    }
    for (; i < n; ++i) z[i] = mg.mul(mg.to_mont(x[i]), y[i]);
}

void axpy_mod_u32_avx2(u32* acc, u32 c, const u32* x, std::size_t n, const Mont32& mg) {
    u32 cm = mg.to_mont(c);
    i256 vp = _mm256_set1_epi32(int(mg.mod));
    i256 vninv = _mm256_set1_epi32(int(mg.n_inv));
    i256 vcm = _mm256_set1_epi32(int(cm));
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        i256 prod = mont_mul_u32_vec(load(x + i), vcm, vp, vninv);
        store(acc + i, add_mod_u32_vec(load(acc + i), prod, vp));
    }
    for (; i < n; ++i) {
        u32 t = acc[i] + mg.mul(cm, x[i]);
        acc[i] = t >= mg.mod ? t - mg.mod : t;
    }
}

void scale_mod_u32_avx2(u32* z, u32 c, const u32* x, std::size_t n, const Mont32& mg) {
    u32 cm = mg.to_mont(c);
    i256 vp = _mm256_set1_epi32(int(mg.mod));
    i256 vninv = _mm256_set1_epi32(int(mg.n_inv));
    i256 vcm = _mm256_set1_epi32(int(cm));
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) store(z + i, mont_mul_u32_vec(load(x + i), vcm, vp, vninv));
    for (; i < n; ++i) z[i] = mg.mul(cm, x[i]);
}

void ntt_u32_avx2(u32* a, int lg, bool inverse, const NttTables& t) {
    const Mont32& mg = t.mg;
    const u32 p = mg.mod;
    const std::size_t n = std::size_t(1) << lg;
    i256 vp = _mm256_set1_epi32(int(p));
    i256 vninv = _mm256_set1_epi32(int(mg.n_inv));
    if (!inverse) {
        const u32* w = t.w_fwd.data();
        for (std::size_t len = n >> 1; len >= 1; len >>= 1) {
            for (std::size_t s = 0; s < n; s += 2 * len) {
                u32* lo = a + s;
                u32* hi = a + s + len;
                std::size_t j = 0;
                for (; j + 8 <= len; j += 8) {
                    i256 u = load(lo + j), v = load(hi + j);
                    store(lo + j, add_mod_u32_vec(u, v, vp));
                    i256 dif = sub_mod_u32_vec(u, v, vp);
                    store(hi + j, mont_mul_u32_vec(dif, load(w + j), vp, vninv));
                }
                for (; j < len; ++j) {
                    u32 u = lo[j], v = hi[j];
                    u32 sum = u + v;
                    lo[j] = sum >= p ? sum - p : sum;
                    u32 dif = u >= v ? u - v : u - v + p;
                    hi[j] = mg.mul(w[j], dif);
                }
            }
            w += len;
        }
    } else {
        const u32* w = t.w_inv.data() + (n - 1);
        for (std::size_t len = 1; len <= n >> 1; len <<= 1) {
            w -= len;
            for (std::size_t s = 0; s < n; s += 2 * len) {
                u32* lo = a + s;
                u32* hi = a + s + len;
                std::size_t j = 0;
                for (; j + 8 <= len; j += 8) {
                    i256 u = load(lo + j);
                    i256 v = mont_mul_u32_vec(load(hi + j), load(w + j), vp, vninv);
                    store(lo + j, add_mod_u32_vec(u, v, vp));
                    store(hi + j, sub_mod_u32_vec(u, v, vp));
                }
                for (; j < len; ++j) {
                    u32 u = lo[j];
                    u32 v = mg.mul(w[j], hi[j]);
                    u32 sum = u + v;
                    lo[j] = sum >= p ? sum - p : sum;
                    hi[j] = u >= v ? u - v : u - v + p;
                }
            }
        }
    }
}

void add_mod_u64_avx2(u64* z, const u64* x, const u64* y, std::size_t n, u64 p) {
    i256 vp = _mm256_set1_epi64x(static_cast<long long>(p));
    i256 bias = _mm256_set1_epi64x(0x8000000000000000ll);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        i256 t = _mm256_add_epi64(load(x + i), load(y + i));
        // unsigned t >= p via signed compare on biased values
        i256 ge = _mm256_cmpgt_epi64(_mm256_xor_si256(vp, bias), _mm256_xor_si256(t, bias));
        // ge == (p > t); subtract p where !(p > t)
        i256 sub = _mm256_andnot_si256(ge, vp);
        store(z + i, _mm256_sub_epi64(t, sub));
    }
    for (; i < n; ++i) {
        u64 t = x[i] + y[i];
        z[i] = t >= p ? t - p : t;
    }
}

void sub_mod_u64_avx2(u64* z, const u64* x, const u64* y, std::size_t n, u64 p) {
    i256 vp = _mm256_set1_epi64x(static_cast<long long>(p));
    i256 bias = _mm256_set1_epi64x(0x8000000000000000ll);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        i256 vx = load(x + i), vy = load(y + i);
        i256 t = _mm256_sub_epi64(vx, vy);
        i256 lt = _mm256_cmpgt_epi64(_mm256_xor_si256(vy, bias), _mm256_xor_si256(vx, bias));
        store(z + i, _mm256_add_epi64(t, _mm256_and_si256(lt, vp)));
    }
    for (; i < n; ++i) {
        u64 t = x[i] - y[i];
        z[i] = x[i] < y[i] ? t + p : t;
    }
}

}  // namespace

const Ops& avx2_ops() {
    static const Ops table = {
        "avx2",
        add_mod_u64_avx2, sub_mod_u64_avx2,
        add_mod_u32_avx2, sub_mod_u32_avx2,
        mul_mod_u32_avx2, axpy_mod_u32_avx2, scale_mod_u32_avx2,
        ntt_u32_avx2,
    };
    return table;
}

}  // namespace linrec::kern

#endif
