#include "linrec/kernels.hpp"

namespace linrec::kern {
namespace {

void add_mod_u64_scalar(u64* z, const u64* x, const u64* y, std::size_t n, u64 p) {
    for (std::size_t i = 0; i < n; ++i) {
        u64 t = x[i] + y[i];
        z[i] = t >= p ? t - p : t;
    }
}

void sub_mod_u64_scalar(u64* z, const u64* x, const u64* y, std::size_t n, u64 p) {
    for (std::size_t i = 0; i < n; ++i) {
        u64 t = x[i] - y[i];
        z[i] = x[i] < y[i] ? t + p : t;
    }
}

void add_mod_u32_scalar(u32* z, const u32* x, const u32* y, std::size_t n, u32 p) {
    for (std::size_t i = 0; i < n; ++i) {
        u32 t = x[i] + y[i];
        z[i] = t >= p ? t - p : t;
    }
}

void sub_mod_u32_scalar(u32* z, const u32* x, const u32* y, std::size_t n, u32 p) {
    for (std::size_t i = 0; i < n; ++i) {
        u32 t = x[i] - y[i];
        z[i] = x[i] < y[i] ? t + p : t;
    }
}

void mul_mod_u32_scalar(u32* z, const u32* x, const u32* y, std::size_t n, const Mont32& mg) {
    for (std::size_t i = 0; i < n; ++i) z[i] = mg.mul(mg.to_mont(x[i]), y[i]);
}

void axpy_mod_u32_scalar(u32* acc, u32 c, const u32* x, std::size_t n, const Mont32& mg) {
    u32 cm = mg.to_mont(c);
    for (std::size_t i = 0; i < n; ++i) {
        u32 t = acc[i] + mg.mul(cm, x[i]);
        acc[i] = t >= mg.mod ? t - mg.mod : t;
    }
}

void scale_mod_u32_scalar(u32* z, u32 c, const u32* x, std::size_t n, const Mont32& mg) {
    u32 cm = mg.to_mont(c);
    for (std::size_t i = 0; i < n; ++i) z[i] = mg.mul(cm, x[i]);
}

void ntt_u32_scalar(u32* a, int lg, bool inverse, const NttTables& t) {
    const Mont32& mg = t.mg;
    const u32 p = mg.mod;
    const std::size_t n = std::size_t(1) << lg;
    if (!inverse) {
        // Gentleman-Sande: (a, b) -> (a + b, (a - b) * w)
        const u32* w = t.w_fwd.data();
        for (std::size_t len = n >> 1; len >= 1; len >>= 1) {
            for (std::size_t s = 0; s < n; s += 2 * len) {
                u32* lo = a + s;
                u32* hi = a + s + len;
                for (std::size_t j = 0; j < len; ++j) {
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
        // Cooley-Tukey: (a, b) -> (a + w*b, a - w*b)
        const u32* w = t.w_inv.data() + (n - 1);
        for (std::size_t len = 1; len <= n >> 1; len <<= 1) {
            w -= len;
            for (std::size_t s = 0; s < n; s += 2 * len) {
                u32* lo = a + s;
                u32* hi = a + s + len;
                for (std::size_t j = 0; j < len; ++j) {
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

}  // namespace

const Ops& scalar_ops() {
    static const Ops table = {
        "scalar",
        add_mod_u64_scalar, sub_mod_u64_scalar,
        add_mod_u32_scalar, sub_mod_u32_scalar,
        mul_mod_u32_scalar, axpy_mod_u32_scalar, scale_mod_u32_scalar,
        ntt_u32_scalar,
    };
    return table;
}

}  // namespace linrec::kern
