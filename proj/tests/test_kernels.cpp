#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>
#include <vector>

#include "linrec/kernels.hpp"

using namespace linrec::kern;

namespace {

std::mt19937_64 rng(0x5eed5eedULL);

std::vector<u32> random_residues_u32(std::size_t n, u32 p) {
    std::vector<u32> v(n);
    for (auto& x : v) x = u32(rng() % p);
    return v;
}

std::vector<u64> random_residues_u64(std::size_t n, u64 p) {
    std::vector<u64> v(n);
    for (auto& x : v) x = rng() % p;
    return v;
}

const u32 kPrimes32[] = {3, 5, 97, 998244353, 1000000007, 2147483647};  // incl. 2^31-1
const u64 kPrimes64[] = {3, 1000000007, 998244353, 0x7fffffffffffffe7ull};

u32 ref_mul(u32 a, u32 b, u32 p) { return u32(u64(a) * b % p); }

NttTables build_tables(u32 p, int lg) {
    // search for an element of order 2^lg directly
    NttTables t;
    t.mg = Mont32(p);
    t.lg = lg;
    u32 n = u32(1) << lg;
    if (lg == 0) return t;  // size-1 transform needs no twiddles
    u32 pow = u32((p - 1) >> lg);
    u32 w = 0;
    for (u32 x = 2;; ++x) {
        u64 acc = 1, base = x, e = pow;
        while (e) {
            if (e & 1) acc = acc * base % p;
            base = base * base % p;
            e >>= 1;
        }
        u64 c = acc;
        for (int i = 0; i < lg - 1; ++i) c = c * c % p;
        if (c == p - 1) {  // order exactly 2^lg
            w = u32(acc);
            break;
        }
    }
    u64 winv = 1, base = w, e = p - 2;
    while (e) {
        if (e & 1) winv = winv * base % p;
        base = base * base % p;
        e >>= 1;
    }
    for (int dir = 0; dir < 2; ++dir) {
        u32 root = dir == 0 ? w : u32(winv);
        auto& dst = dir == 0 ? t.w_fwd : t.w_inv;
        dst.clear();
        for (u32 len = n >> 1; len >= 1; len >>= 1) {
            // per-level root of order 2*len
            u64 wl = root;
            for (u32 m = n; m > 2 * len; m >>= 1) wl = wl * wl % p;
            u64 cur = 1;
            for (u32 j = 0; j < len; ++j) {
                dst.push_back(t.mg.to_mont(u32(cur)));
                cur = cur * wl % p;
            }
        }
    }
    return t;
}

}  // namespace

TEST_CASE("montgomery contexts agree with plain modular arithmetic") {
    for (u32 p : kPrimes32) {
        Mont32 mg(p);
        for (int i = 0; i < 2000; ++i) {
            u32 a = u32(rng() % p), b = u32(rng() % p);
            CHECK(mg.mul(mg.to_mont(a), b) == ref_mul(a, b, p));
        }
    }
    for (u64 p : kPrimes64) {
        Mont64 mg(p);
        for (int i = 0; i < 2000; ++i) {
            u64 a = rng() % p, b = rng() % p;
            CHECK(mg.mul_std(a, b) == u64(u128(a) * b % p));
        }
    }
}

TEST_CASE("scalar and avx2 lanes are bit-identical on vector ops") {
    if (!avx2_available()) {
        MESSAGE("AVX2 unavailable; lane equivalence skipped");
        return;
    }
    const Ops& sc = scalar_ops();
    const Ops& vx = avx2_ops();
    for (u32 p : kPrimes32) {
        Mont32 mg(p);
        for (std::size_t n : {0, 1, 5, 8, 13, 64, 257}) {
            auto x = random_residues_u32(n, p), y = random_residues_u32(n, p);
            std::vector<u32> za(n), zb(n);
            sc.add_mod_u32(za.data(), x.data(), y.data(), n, p);
            vx.add_mod_u32(zb.data(), x.data(), y.data(), n, p);
            CHECK(za == zb);
            sc.sub_mod_u32(za.data(), x.data(), y.data(), n, p);
            vx.sub_mod_u32(zb.data(), x.data(), y.data(), n, p);
            CHECK(za == zb);
            sc.mul_mod_u32(za.data(), x.data(), y.data(), n, mg);
            vx.mul_mod_u32(zb.data(), x.data(), y.data(), n, mg);
            CHECK(za == zb);
            for (std::size_t i = 0; i < n; ++i) CHECK(za[i] == ref_mul(x[i], y[i], p));
            u32 c = u32(rng() % p);
            std::vector<u32> aa = y, ab = y;
            sc.axpy_mod_u32(aa.data(), c, x.data(), n, mg);
            vx.axpy_mod_u32(ab.data(), c, x.data(), n, mg);
            CHECK(aa == ab);
            sc.scale_mod_u32(za.data(), c, x.data(), n, mg);
            vx.scale_mod_u32(zb.data(), c, x.data(), n, mg);
            CHECK(za == zb);
        }
    }
    for (u64 p : kPrimes64) {
        for (std::size_t n : {1, 4, 7, 100}) {
            auto x = random_residues_u64(n, p), y = random_residues_u64(n, p);
            std::vector<u64> za(n), zb(n);
            sc.add_mod_u64(za.data(), x.data(), y.data(), n, p);
            vx.add_mod_u64(zb.data(), x.data(), y.data(), n, p);
            CHECK(za == zb);
            sc.sub_mod_u64(za.data(), x.data(), y.data(), n, p);
            vx.sub_mod_u64(zb.data(), x.data(), y.data(), n, p);
            CHECK(za == zb);
        }
    }
}

TEST_CASE("ntt lanes agree and invert") {
    const u32 p = 998244353;
    for (int lg : {0, 1, 2, 3, 5, 10}) {
        NttTables t = build_tables(p, lg);
        std::size_t n = std::size_t(1) << lg;
        auto data = random_residues_u32(n, p);
        auto a = data, b = data;
        scalar_ops().ntt_u32(a.data(), lg, false, t);
        if (avx2_available()) {
            avx2_ops().ntt_u32(b.data(), lg, false, t);
            CHECK(a == b);
        }
        // inverse round trip: result is n * data
        scalar_ops().ntt_u32(a.data(), lg, true, t);
        Mont32 mg(p);
        u32 nm = u32(n % p);
        for (std::size_t i = 0; i < n; ++i) CHECK(a[i] == ref_mul(nm, data[i], p));
        if (avx2_available()) {
            avx2_ops().ntt_u32(b.data(), lg, true, t);
            CHECK(a == b);
        }
    }
}

TEST_CASE("ntt is the evaluation map it claims to be") {
    // size-4 transform of (a0..a3) must list p(w^k) in bit-reversed order
    const u32 p = 17;  // 17 = 1 + 16
    NttTables t = build_tables(p, 2);
    std::vector<u32> a = {1, 2, 3, 4};
    auto coeffs = a;
    scalar_ops().ntt_u32(a.data(), 2, false, t);
    // recover w from tables: level len=2 block holds [1, w] in Montgomery form
    Mont32 mg(p);
    u32 w = mg.reduce(t.w_fwd[1]);
    auto horner = [&](u32 x) {
        u64 acc = 0;
        for (int i = 3; i >= 0; --i) acc = (acc * x + coeffs[i]) % p;
        return u32(acc);
    };
    u32 w2 = ref_mul(w, w, p), w3 = ref_mul(w2, w, p);
    CHECK(a[0] == horner(1));
    CHECK(a[1] == horner(w2));       // bit-reversed: 0,2,1,3
    CHECK(a[2] == horner(w));
    CHECK(a[3] == horner(w3));
}
