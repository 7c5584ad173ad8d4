#ifndef LINREC_POLY_HPP
#define LINREC_POLY_HPP

#include <gmpxx.h>

#include <algorithm>
#include <bit>
#include <cstdint>
#include <utility>
#include <vector>

#include "linrec/domain.hpp"
#include "linrec/errors.hpp"
#include "linrec/kernels.hpp"

// Dense univariate polynomial arithmetic over a coefficient domain.
// Polynomials carry their basis: monomial, or the falling-factorial
// (Newton) basis on an arithmetic progression, where basis element i is
// prod_{j<i} (X - (start + j*step)).  Multiplication is schoolbook below
// length 32, Karatsuba above, and NTT whenever the modulus supports the
// result length.

namespace linrec {

enum class BasisKind { Monomial, Newton };

template <class D>
struct BasisSpec {
    using Elem = typename D::Elem;
    BasisKind kind = BasisKind::Monomial;
    Elem start{};
    Elem step{};

    static BasisSpec monomial() { return {}; }
    static BasisSpec newton(Elem s, Elem st) { return {BasisKind::Newton, std::move(s), std::move(st)}; }
};

template <class D>
struct DensePoly {
    using Elem = typename D::Elem;

    D dom;
    BasisSpec<D> basis;
    std::vector<Elem> c;  // coefficient of basis element i; trailing entry nonzero

    explicit DensePoly(D d) : dom(std::move(d)) {}
    DensePoly(D d, std::vector<Elem> coeffs, BasisSpec<D> b = BasisSpec<D>::monomial())
        : dom(std::move(d)), basis(std::move(b)), c(std::move(coeffs)) {
        normalize();
    }

    static DensePoly zero(const D& d) { return DensePoly(d); }
    static DensePoly constant(const D& d, Elem v) { return DensePoly(d, {std::move(v)}); }
    static DensePoly identity_x(const D& d) { return DensePoly(d, {d.zero(), d.one()}); }

    bool is_zero() const { return c.empty(); }
    // deg(0) is -1 here; the zero polynomial is the empty list
    std::int64_t deg() const { return std::int64_t(c.size()) - 1; }
    Elem coeff(std::size_t i) const { return i < c.size() ? c[i] : dom.zero(); }

    void normalize() {
        while (!c.empty() && dom.is_zero(c.back())) c.pop_back();
    }
};

namespace polydetail {

template <class D>
bool same_basis(const BasisSpec<D>& a, const BasisSpec<D>& b, const D& dom) {
    if (a.kind != b.kind) return false;
    if (a.kind == BasisKind::Monomial) return true;
    return dom.eq(a.start, b.start) && dom.eq(a.step, b.step);
}

template <class D>
void require_monomial(const DensePoly<D>& p, const char* who) {
    if (p.basis.kind != BasisKind::Monomial) throw Error(std::string(who) + ": monomial basis required");
}

// ---- convolution cores ------------------------------------------------

template <class D>
using EVec = std::vector<typename D::Elem>;

template <class D>
EVec<D> conv_schoolbook(const D& dom, const EVec<D>& a, const EVec<D>& b) {
    EVec<D> out(a.size() + b.size() - 1, dom.zero());
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j) out[i + j] = dom.add(out[i + j], dom.mul(a[i], b[j]));
    return out;
}

// prime-field schoolbook on u32 data through the kernel lane
inline std::vector<u64> conv_schoolbook_fp32(const Fp& dom, const std::vector<u64>& a, const std::vector<u64>& b) {
    const auto& ops = kern::active_ops();
    const kern::Mont32& mg = dom.mont32();
    std::vector<u32> bb(b.size());
    for (std::size_t j = 0; j < b.size(); ++j) bb[j] = u32(b[j]);
    std::vector<u32> out(a.size() + b.size() - 1, 0);
    for (std::size_t i = 0; i < a.size(); ++i) ops.axpy_mod_u32(out.data() + i, u32(a[i]), bb.data(), bb.size(), mg);
    dom.counter().tally(a.size() * b.size(), a.size() * b.size(), 0);
    std::vector<u64> res(out.size());
    for (std::size_t i = 0; i < out.size(); ++i) res[i] = out[i];
    return res;
}

template <class D>
EVec<D> conv_full(const D& dom, const EVec<D>& a, const EVec<D>& b);

template <class D>
EVec<D> conv_karatsuba(const D& dom, const EVec<D>& a, const EVec<D>& b) {
    const std::size_t h = (std::max(a.size(), b.size()) + 1) / 2;
    auto split = [&](const EVec<D>& v) {
        EVec<D> lo(v.begin(), v.begin() + std::min(h, v.size()));
        EVec<D> hi(v.begin() + std::min(h, v.size()), v.end());
        return std::pair{lo, hi};
    };
    auto [a0, a1] = split(a);
    auto [b0, b1] = split(b);
    auto add_vec = [&](const EVec<D>& x, const EVec<D>& y) {
        EVec<D> z(std::max(x.size(), y.size()), dom.zero());
        for (std::size_t i = 0; i < x.size(); ++i) z[i] = x[i];
        for (std::size_t i = 0; i < y.size(); ++i) z[i] = dom.add(z[i], y[i]);
        return z;
    };
    EVec<D> z0 = a0.empty() || b0.empty() ? EVec<D>{} : conv_full(dom, a0, b0);
    EVec<D> z2 = a1.empty() || b1.empty() ? EVec<D>{} : conv_full(dom, a1, b1);
    EVec<D> s1 = add_vec(a0, a1);
    EVec<D> s2 = add_vec(b0, b1);
    EVec<D> z1 = s1.empty() || s2.empty() ? EVec<D>{} : conv_full(dom, s1, s2);
    EVec<D> out(a.size() + b.size() - 1, dom.zero());
    auto acc = [&](const EVec<D>& v, std::size_t off, bool negate2) {
        for (std::size_t i = 0; i < v.size(); ++i) {
            if (off + i >= out.size()) break;  // zero-value tails may overhang
            out[off + i] = negate2 ? dom.sub(out[off + i], v[i]) : dom.add(out[off + i], v[i]);
        }
    };
    acc(z0, 0, false);
    acc(z2, 2 * h, false);
    acc(z1, h, false);
    acc(z0, h, true);
    acc(z2, h, true);
    return out;
}

// ---- number-theoretic transform glue (prime fields) -------------------

inline int ntt_capable_lg(u64 p, std::size_t need) {
    if (need <= 1) return 0;
    int lg = std::bit_width(need - 1);
    int s = std::countr_zero(p - 1);
    return lg <= s ? lg : -1;
}

// order-2^lg root; counts the executed multiplications into ctr
inline u64 find_root_2pow(const Fp& dom, int lg) {
    const u64 p = dom.modulus();
    const auto& m = dom.mont64();
    u64 muls = 0;
    auto powm = [&](u64 b, u64 e) {
        u64 r = 1;
        while (e) {
            if (e & 1) r = m.mul_std(r, b), ++muls;
            b = m.mul_std(b, b), ++muls;
            e >>= 1;
        }
        return r;
    };
    u64 root = 0;
    for (u64 x = 2;; ++x) {
        u64 cand = powm(x % p, (p - 1) >> lg);
        u64 ord = cand;
        bool full = lg == 0;
        for (int i = 0; i < lg - 1; ++i) ord = m.mul_std(ord, ord), ++muls;
        if (lg > 0) full = (ord == p - 1);
        if (full || lg == 0) {
            root = cand;
            break;
        }
    }
    dom.counter().tally(0, muls, 0);
    return root;
}

struct NttTables64 {
    int lg = 0;
    std::vector<u64> w_fwd;  // Montgomery form
    std::vector<u64> w_inv;
};

// builds per-level twiddles w^j for len = n/2 .. 1 (forward and inverse)
inline void build_twiddles(const Fp& dom, int lg, kern::NttTables* t32, NttTables64* t64) {
    const auto& m = dom.mont64();
    const u64 n = u64(1) << lg;
    u64 root = find_root_2pow(dom, lg);
    u64 root_inv = dom.inv(root);
    u64 muls = 0;
    for (int dir = 0; dir < 2; ++dir) {
        u64 base = dir == 0 ? root : root_inv;
        std::vector<u64> flat;
        flat.reserve(n - 1);
        u64 wl = base;  // order 2*len for len = n/2
        for (u64 len = n >> 1; len >= 1; len >>= 1) {
            u64 cur = 1;
            for (u64 j = 0; j < len; ++j) {
                flat.push_back(cur);
                if (j + 1 < len) cur = m.mul_std(cur, wl), ++muls;
            }
            if (len > 1) wl = m.mul_std(wl, wl), ++muls;
        }
        if (t32 != nullptr) {
            auto& dst = dir == 0 ? t32->w_fwd : t32->w_inv;
            dst.resize(flat.size());
            for (std::size_t i = 0; i < flat.size(); ++i) dst[i] = t32->mg.to_mont(u32(flat[i]));
        } else {
            auto& dst = dir == 0 ? t64->w_fwd : t64->w_inv;
            dst.resize(flat.size());
            for (std::size_t i = 0; i < flat.size(); ++i) dst[i] = m.to_mont(flat[i]);
        }
    }
    dom.counter().tally(0, muls, 0);
}

// scalar u64 transform for moduli >= 2^31 (rare path, no SIMD lane)
inline void ntt_u64(u64* a, int lg, bool inverse, const kern::Mont64& m, const NttTables64& t, u64 p) {
    const std::size_t n = std::size_t(1) << lg;
    if (!inverse) {
        const u64* w = t.w_fwd.data();
        for (std::size_t len = n >> 1; len >= 1; len >>= 1) {
            for (std::size_t s = 0; s < n; s += 2 * len) {
                u64* lo = a + s;
                u64* hi = a + s + len;
                for (std::size_t j = 0; j < len; ++j) {
                    u64 u = lo[j], v = hi[j];
                    u64 sum = u + v;
                    lo[j] = sum >= p ? sum - p : sum;
                    u64 dif = u >= v ? u - v : u - v + p;
                    hi[j] = m.mul(w[j], dif);
                }
            }
            w += len;
        }
    } else {
        const u64* w = t.w_inv.data() + (n - 1);
        for (std::size_t len = 1; len <= n >> 1; len <<= 1) {
            w -= len;
            for (std::size_t s = 0; s < n; s += 2 * len) {
                u64* lo = a + s;
                u64* hi = a + s + len;
                for (std::size_t j = 0; j < len; ++j) {
                    u64 u = lo[j];
                    u64 v = m.mul(w[j], hi[j]);
                    u64 sum = u + v;
                    lo[j] = sum >= p ? sum - p : sum;
                    hi[j] = u >= v ? u - v : u - v + p;
                }
            }
        }
    }
}

inline std::vector<u64> conv_ntt(const Fp& dom, const std::vector<u64>& a, const std::vector<u64>& b, int lg) {
    const u64 p = dom.modulus();
    const std::size_t n = std::size_t(1) << lg;
    const std::size_t out_len = a.size() + b.size() - 1;
    const bool square = &a == &b;
    u64 transforms = square ? 2 : 3;
    // counted work: butterflies, pointwise, final scaling
    dom.counter().tally(transforms * (n >> 1) * u64(lg) * 2, transforms * (n >> 1) * u64(lg) + n + n, 0);
    std::vector<u64> res(out_len);
    if (dom.fits_u32()) {
        kern::NttTables t;
        t.mg = dom.mont32();
        t.lg = lg;
        build_twiddles(dom, lg, &t, nullptr);
        const auto& ops = kern::active_ops();
        std::vector<u32> fa(n, 0), fb;
        for (std::size_t i = 0; i < a.size(); ++i) fa[i] = u32(a[i]);
        ops.ntt_u32(fa.data(), lg, false, t);
        if (square) {
            ops.mul_mod_u32(fa.data(), fa.data(), fa.data(), n, t.mg);
        } else {
            fb.assign(n, 0);
            for (std::size_t i = 0; i < b.size(); ++i) fb[i] = u32(b[i]);
            ops.ntt_u32(fb.data(), lg, false, t);
            ops.mul_mod_u32(fa.data(), fa.data(), fb.data(), n, t.mg);
        }
        ops.ntt_u32(fa.data(), lg, true, t);
        u64 ninv = dom.inv(dom.from_uint(n));
        ops.scale_mod_u32(fa.data(), u32(ninv), fa.data(), n, t.mg);
        for (std::size_t i = 0; i < out_len; ++i) res[i] = fa[i];
    } else {
        NttTables64 t;
        build_twiddles(dom, lg, nullptr, &t);
        const auto& m = dom.mont64();
        std::vector<u64> fa(n, 0), fb;
        std::copy(a.begin(), a.end(), fa.begin());
        ntt_u64(fa.data(), lg, false, m, t, p);
        if (square) {
            for (std::size_t i = 0; i < n; ++i) fa[i] = m.mul_std(fa[i], fa[i]);
        } else {
            fb.assign(n, 0);
            std::copy(b.begin(), b.end(), fb.begin());
            ntt_u64(fb.data(), lg, false, m, t, p);
            for (std::size_t i = 0; i < n; ++i) fa[i] = m.mul_std(fa[i], fb[i]);
        }
        ntt_u64(fa.data(), lg, true, m, t, p);
        u64 ninv = dom.inv(dom.from_uint(n));
        u64 ninv_m = m.to_mont(ninv);
        for (std::size_t i = 0; i < n; ++i) fa[i] = m.mul(ninv_m, fa[i]);
        std::copy(fa.begin(), fa.begin() + std::ptrdiff_t(out_len), res.begin());
    }
    return res;
}

// Cyclic convolution against a fixed kernel over a prime field, with the
// kernel's transform cached across calls.  Used by the BSGS grid doubling
// where the same Lagrange kernel is convolved once per halving round.
class CyclicConvFp {
  public:
    CyclicConvFp(const Fp& dom, std::size_t length_pow2, const std::vector<u64>& kernel)
        : dom_(dom), len_(length_pow2) {
        lg_ = std::countr_zero(len_);
        if (ntt_capable_lg(dom.modulus(), len_) < 0 || (std::size_t(1) << lg_) != len_)
            throw Error("CyclicConvFp: modulus does not support this transform length");
        std::vector<u64> g(len_, 0);
        for (std::size_t i = 0; i < kernel.size(); ++i) {
            std::size_t r = i & (len_ - 1);
            g[r] = dom.add(g[r], kernel[i]);
        }
        // absorb the inverse-transform 1/len scaling into the kernel
        u64 inv_len = dom.inv(dom.from_uint(len_));
        for (auto& x : g) x = dom.mul(x, inv_len);
        if (dom.fits_u32()) {
            t32_.mg = dom.mont32();
            t32_.lg = lg_;
            build_twiddles(dom, lg_, &t32_, nullptr);
            ghat32_.resize(len_);
            for (std::size_t i = 0; i < len_; ++i) ghat32_[i] = u32(g[i]);
            kern::active_ops().ntt_u32(ghat32_.data(), lg_, false, t32_);
        } else {
            build_twiddles(dom, lg_, nullptr, &t64_);
            ghat64_ = g;
            ntt_u64(ghat64_.data(), lg_, false, dom.mont64(), t64_, dom.modulus());
        }
        dom.counter().tally((len_)*u64(lg_), (len_ >> 1) * u64(lg_), 0);
    }

    std::size_t length() const { return len_; }

    // cyclic convolution of `u` (|u| <= len) with the cached kernel
    std::vector<u64> apply(const std::vector<u64>& u) const {
        dom_.counter().tally(2 * len_ * u64(lg_), (len_)*u64(lg_) + len_, 0);
        if (dom_.fits_u32()) {
            const auto& ops = kern::active_ops();
            std::vector<u32> f(len_, 0);
            for (std::size_t i = 0; i < u.size(); ++i) f[i] = u32(u[i]);
            ops.ntt_u32(f.data(), lg_, false, t32_);
            ops.mul_mod_u32(f.data(), f.data(), ghat32_.data(), len_, t32_.mg);
            ops.ntt_u32(f.data(), lg_, true, t32_);
            std::vector<u64> out(len_);
            for (std::size_t i = 0; i < len_; ++i) out[i] = f[i];
            return out;
        }
        const auto& m = dom_.mont64();
        std::vector<u64> f(len_, 0);
        std::copy(u.begin(), u.end(), f.begin());
        ntt_u64(f.data(), lg_, false, m, t64_, dom_.modulus());
        for (std::size_t i = 0; i < len_; ++i) f[i] = m.mul_std(f[i], ghat64_[i]);
        ntt_u64(f.data(), lg_, true, m, t64_, dom_.modulus());
        return f;
    }

  private:
    Fp dom_;
    std::size_t len_;
    int lg_ = 0;
    kern::NttTables t32_;
    NttTables64 t64_;
    std::vector<u32> ghat32_;
    std::vector<u64> ghat64_;
};

constexpr std::size_t kSchoolbookThreshold = 32;

template <class D>
EVec<D> conv_full(const D& dom, const EVec<D>& a, const EVec<D>& b) {
    if (a.empty() || b.empty()) return {};
    const std::size_t mn = std::min(a.size(), b.size());
    if constexpr (std::is_same_v<D, Fp>) {
        if (mn < kSchoolbookThreshold) {
            if (dom.fits_u32()) return conv_schoolbook_fp32(dom, a, b);
            return conv_schoolbook(dom, a, b);
        }
        int lg = ntt_capable_lg(dom.modulus(), a.size() + b.size() - 1);
        if (lg >= 0) return conv_ntt(dom, a, b, lg);
        return conv_karatsuba(dom, a, b);
    } else {
        if (mn < kSchoolbookThreshold) return conv_schoolbook(dom, a, b);
        return conv_karatsuba(dom, a, b);
    }
}

// low-count prefix of a*b: blocked so the cost is (count/|short|+1)*M(|short|)
template <class D>
EVec<D> conv_prefix(const D& dom, const EVec<D>& a, const EVec<D>& b, std::size_t count) {
    if (a.empty() || b.empty() || count == 0) return EVec<D>(count, dom.zero());
    const EVec<D>& s = a.size() <= b.size() ? a : b;
    const EVec<D>& l = a.size() <= b.size() ? b : a;
    EVec<D> out(count, dom.zero());
    const std::size_t block = s.size();
    for (std::size_t off = 0; off < l.size() && off < count; off += block) {
        std::size_t take = std::min(block, l.size() - off);
        EVec<D> chunk(l.begin() + off, l.begin() + off + take);
        EVec<D> part = conv_full(dom, s, chunk);
        for (std::size_t i = 0; i < part.size() && off + i < count; ++i)
            out[off + i] = dom.add(out[off + i], part[i]);
    }
    return out;
}

}  // namespace polydetail

// ---- basic arithmetic ---------------------------------------------------

template <class D>
DensePoly<D> poly_add(const DensePoly<D>& p, const DensePoly<D>& q) {
    require_same_domain(p.dom, q.dom);
    if (!polydetail::same_basis(p.basis, q.basis, p.dom)) throw Error("poly_add: basis mismatch");
    std::vector<typename D::Elem> c(std::max(p.c.size(), q.c.size()), p.dom.zero());
    for (std::size_t i = 0; i < p.c.size(); ++i) c[i] = p.c[i];
    for (std::size_t i = 0; i < q.c.size(); ++i) c[i] = p.dom.add(c[i], q.c[i]);
    return DensePoly<D>(p.dom, std::move(c), p.basis);
}

template <class D>
DensePoly<D> poly_sub(const DensePoly<D>& p, const DensePoly<D>& q) {
    require_same_domain(p.dom, q.dom);
    if (!polydetail::same_basis(p.basis, q.basis, p.dom)) throw Error("poly_sub: basis mismatch");
    std::vector<typename D::Elem> c(std::max(p.c.size(), q.c.size()), p.dom.zero());
    for (std::size_t i = 0; i < p.c.size(); ++i) c[i] = p.c[i];
    for (std::size_t i = 0; i < q.c.size(); ++i) c[i] = p.dom.sub(c[i], q.c[i]);
    return DensePoly<D>(p.dom, std::move(c), p.basis);
}

template <class D>
DensePoly<D> poly_neg(const DensePoly<D>& p) {
    auto c = p.c;
    for (auto& v : c) v = p.dom.neg(v);
    return DensePoly<D>(p.dom, std::move(c), p.basis);
}

template <class D>
DensePoly<D> poly_scale(const DensePoly<D>& p, const typename D::Elem& s) {
    std::vector<typename D::Elem> c(p.c.size(), p.dom.zero());
    for (std::size_t i = 0; i < p.c.size(); ++i) c[i] = p.dom.mul(p.c[i], s);
    return DensePoly<D>(p.dom, std::move(c), p.basis);
}

template <class D>
DensePoly<D> poly_mul(const DensePoly<D>& p, const DensePoly<D>& q) {
    require_same_domain(p.dom, q.dom);
    polydetail::require_monomial(p, "poly_mul");
    polydetail::require_monomial(q, "poly_mul");
    if (p.is_zero() || q.is_zero()) return DensePoly<D>::zero(p.dom);
    return DensePoly<D>(p.dom, polydetail::conv_full(p.dom, p.c, q.c));
}

template <class D>
bool poly_eq(const DensePoly<D>& p, const DensePoly<D>& q) {
    if (p.c.size() != q.c.size()) return false;
    if (!polydetail::same_basis(p.basis, q.basis, p.dom)) return false;
    for (std::size_t i = 0; i < p.c.size(); ++i)
        if (!p.dom.eq(p.c[i], q.c[i])) return false;
    return true;
}

// Horner in the polynomial's own basis
template <class D>
typename D::Elem poly_eval(const DensePoly<D>& p, const typename D::Elem& x) {
    const D& dom = p.dom;
    if (p.is_zero()) return dom.zero();
    if (p.basis.kind == BasisKind::Monomial) {
        auto acc = p.c.back();
        for (std::size_t i = p.c.size() - 1; i-- > 0;) acc = dom.add(dom.mul(acc, x), p.c[i]);
        return acc;
    }
    // falling-factorial Horner: node for basis index i is start + i*step
    auto acc = p.c.back();
    for (std::size_t i = p.c.size() - 1; i-- > 0;) {
        auto node = dom.add(p.basis.start, dom.mul(p.basis.step, dom.from_uint(i)));
        acc = dom.add(dom.mul(acc, dom.sub(x, node)), p.c[i]);
    }
    return acc;
}

// ---- structural operations ----------------------------------------------

// rev(N, p): X^n coefficient becomes X^{N-n}
template <class D>
DensePoly<D> rev(const DensePoly<D>& p, std::size_t n_bound) {
    polydetail::require_monomial(p, "rev");
    if (std::int64_t(n_bound) < p.deg()) throw Error("rev: bound below degree");
    std::vector<typename D::Elem> c(n_bound + 1, p.dom.zero());
    for (std::size_t i = 0; i < p.c.size(); ++i) c[n_bound - i] = p.c[i];
    return DensePoly<D>(p.dom, std::move(c));
}

// keep coefficients of index < count (the paper's ceil-bracket)
template <class D>
DensePoly<D> trunc_high(const DensePoly<D>& p, std::size_t count) {
    std::vector<typename D::Elem> c(p.c.begin(), p.c.begin() + std::min<std::size_t>(count, p.c.size()));
    return DensePoly<D>(p.dom, std::move(c), p.basis);
}

// drop `count` low coefficients (the paper's floor-bracket)
template <class D>
DensePoly<D> shift_low(const DensePoly<D>& p, std::size_t count) {
    if (count >= p.c.size()) return DensePoly<D>::zero(p.dom);
    std::vector<typename D::Elem> c(p.c.begin() + count, p.c.end());
    return DensePoly<D>(p.dom, std::move(c), p.basis);
}

// multiply by X^count
template <class D>
DensePoly<D> shift_up(const DensePoly<D>& p, std::size_t count) {
    polydetail::require_monomial(p, "shift_up");
    if (p.is_zero()) return p;
    std::vector<typename D::Elem> c(p.c.size() + count, p.dom.zero());
    std::copy(p.c.begin(), p.c.end(), c.begin() + count);
    return DensePoly<D>(p.dom, std::move(c));
}

template <class D>
DensePoly<D> derivative(const DensePoly<D>& p) {
    polydetail::require_monomial(p, "derivative");
    if (p.c.size() <= 1) return DensePoly<D>::zero(p.dom);
    std::vector<typename D::Elem> c(p.c.size() - 1, p.dom.zero());
    for (std::size_t i = 1; i < p.c.size(); ++i) c[i - 1] = p.dom.mul(p.c[i], p.dom.from_uint(i));
    return DensePoly<D>(p.dom, std::move(c));
}

// p(X + t), Horner-style shift
template <class D>
DensePoly<D> shift_var(const DensePoly<D>& p, const typename D::Elem& t) {
    polydetail::require_monomial(p, "shift_var");
    const D& dom = p.dom;
    if (p.is_zero()) return p;
    std::vector<typename D::Elem> acc;  // result coefficients, low to high
    for (std::size_t i = p.c.size(); i-- > 0;) {
        // acc = acc*(X+t) + c_i
        acc.insert(acc.begin(), dom.zero());
        for (std::size_t j = 0; j + 1 < acc.size(); ++j) acc[j] = dom.add(acc[j], dom.mul(acc[j + 1], t));
        acc[0] = dom.add(acc[0], p.c[i]);
    }
    return DensePoly<D>(p.dom, std::move(acc));
}

// ---- division, modular powering, series inversion ------------------------

template <class D>
std::pair<DensePoly<D>, DensePoly<D>> poly_divrem(const DensePoly<D>& p, const DensePoly<D>& f) {
    polydetail::require_monomial(p, "poly_divrem");
    polydetail::require_monomial(f, "poly_divrem");
    if (f.is_zero()) throw Error("poly_divrem: division by zero polynomial");
    const D& dom = p.dom;
    if (p.deg() < f.deg()) return {DensePoly<D>::zero(dom), p};
    const bool monic = dom.eq(f.c.back(), dom.one());
    auto lead_inv = monic ? dom.one() : dom.inv(f.c.back());
    std::vector<typename D::Elem> r = p.c;
    std::size_t df = f.c.size() - 1;
    std::vector<typename D::Elem> q(r.size() - df, dom.zero());
    for (std::size_t i = r.size(); i-- > df;) {
        if (dom.is_zero(r[i])) continue;
        auto coef = monic ? r[i] : dom.mul(r[i], lead_inv);
        q[i - df] = coef;
        for (std::size_t j = 0; j <= df; ++j) r[i - df + j] = dom.sub(r[i - df + j], dom.mul(coef, f.c[j]));
    }
    return {DensePoly<D>(dom, std::move(q)), DensePoly<D>(dom, std::move(r))};
}

template <class D>
DensePoly<D> poly_mod(const DensePoly<D>& p, const DensePoly<D>& f) {
    return poly_divrem(p, f).second;
}

// q with p*q == 1 mod X^n, by the doubling Newton iteration
template <class D>
DensePoly<D> newton_inverse(const DensePoly<D>& p, std::size_t n) {
    polydetail::require_monomial(p, "newton_inverse");
    const D& dom = p.dom;
    if (p.is_zero() || dom.is_zero(p.c[0])) throw ConstantTermNotInvertible();
    if (n == 0) return DensePoly<D>::zero(dom);
    DensePoly<D> q = DensePoly<D>::constant(dom, dom.inv(p.c[0]));
    std::size_t t = 1;
    while (t < n) {
        t = std::min(2 * t, n);
        DensePoly<D> pt = trunc_high(p, t);
        DensePoly<D> q2 = trunc_high(poly_mul(q, q), t);
        DensePoly<D> q2p = trunc_high(poly_mul(q2, pt), t);
        q = trunc_high(poly_sub(poly_add(q, q), q2p), t);
    }
    return q;
}

// base^n mod f, repeated squaring with reduction after each product
template <class D>
DensePoly<D> powmod(const DensePoly<D>& base, const mpz_class& n, const DensePoly<D>& f) {
    polydetail::require_monomial(base, "powmod");
    polydetail::require_monomial(f, "powmod");
    const D& dom = base.dom;
    if (f.deg() < 1 || !dom.eq(f.c.back(), dom.one())) throw Error("powmod: modulus must be monic of degree >= 1");
    if (n < 0) throw Error("powmod: negative exponent");
    DensePoly<D> r = poly_mod(DensePoly<D>::constant(dom, dom.one()), f);
    DensePoly<D> b = poly_mod(base, f);
    std::size_t bits = mpz_sizeinbase(n.get_mpz_t(), 2);
    if (n == 0) return r;
    for (std::size_t i = bits; i-- > 0;) {
        r = poly_mod(poly_mul(r, r), f);
        if (mpz_tstbit(n.get_mpz_t(), i)) r = poly_mod(poly_mul(r, b), f);
    }
    return r;
}

// ---- factorial and inversion helpers -------------------------------------

// single inversion plus O(n) multiplications
template <class D>
std::vector<typename D::Elem> batch_inverse(const D& dom, const std::vector<typename D::Elem>& v) {
    std::vector<typename D::Elem> pre(v.size() + 1, dom.one());
    for (std::size_t i = 0; i < v.size(); ++i) pre[i + 1] = dom.mul(pre[i], v[i]);
    if (dom.is_zero(pre.back()))
        throw CharacteristicTooSmall("batch_inverse: a required element is zero in this domain");
    auto inv_all = dom.inv(pre.back());
    std::vector<typename D::Elem> out(v.size(), dom.zero());
    for (std::size_t i = v.size(); i-- > 0;) {
        out[i] = dom.mul(inv_all, pre[i]);
        inv_all = dom.mul(inv_all, v[i]);
    }
    return out;
}

template <class D>
std::vector<typename D::Elem> factorial_table(const D& dom, std::size_t count) {
    std::vector<typename D::Elem> f(count, dom.one());
    for (std::size_t i = 1; i < count; ++i) f[i] = dom.mul(f[i - 1], dom.from_uint(i));
    return f;
}

// 1/t! for t < count; throws CharacteristicTooSmall if some t is a zero divisor
template <class D>
std::vector<typename D::Elem> inv_factorial_table(const D& dom, std::size_t count) {
    if (count == 0) return {};
    if (!char_at_least(dom, count))
        throw CharacteristicTooSmall("factorial inverses need characteristic >= " + std::to_string(count));
    if (!D::exact && count > 170) throw Error("factorial table overflows binary floats");
    auto f = factorial_table(dom, count);
    std::vector<typename D::Elem> inv(count, dom.zero());
    inv[count - 1] = dom.inv(f[count - 1]);
    for (std::size_t i = count - 1; i-- > 0;) inv[i] = dom.mul(inv[i + 1], dom.from_uint(i + 1));
    return inv;
}

// ---- Newton (falling factorial) basis -------------------------------------

namespace polydetail {

// prod over t in [t0, t0+count) of (X - (start + t*step)), monomial basis
template <class D>
DensePoly<D> node_product(const D& dom, const BasisSpec<D>& b, std::size_t t0, std::size_t count) {
    if (count == 1) {
        auto node = dom.add(b.start, dom.mul(b.step, dom.from_uint(t0)));
        return DensePoly<D>(dom, {dom.neg(node), dom.one()});
    }
    std::size_t h = count / 2;
    return poly_mul(node_product(dom, b, t0, h), node_product(dom, b, t0 + h, count - h));
}

template <class D>
void to_newton_rec(const DensePoly<D>& p, const BasisSpec<D>& b, std::size_t t0, std::size_t len,
                   std::vector<typename D::Elem>& out, std::size_t out_off) {
    const D& dom = p.dom;
    if (len == 1) {
        out[out_off] = p.is_zero() ? dom.zero() : p.c[0];
        return;
    }
    std::size_t h = len / 2;
    DensePoly<D> ff = node_product(dom, b, t0, h);
    auto [q, r] = poly_divrem(p, ff);
    to_newton_rec(r, b, t0, h, out, out_off);
    to_newton_rec(q, b, t0 + h, len - h, out, out_off + h);
}

template <class D>
DensePoly<D> from_newton_rec(const D& dom, const BasisSpec<D>& b, const std::vector<typename D::Elem>& c,
                             std::size_t c0, std::size_t len, std::size_t t0) {
    if (len == 1) return DensePoly<D>(dom, {c[c0]});
    std::size_t h = len / 2;
    DensePoly<D> lo = from_newton_rec(dom, b, c, c0, h, t0);
    DensePoly<D> hi = from_newton_rec(dom, b, c, c0 + h, len - h, t0 + h);
    return poly_add(lo, poly_mul(node_product(dom, b, t0, h), hi));
}

}  // namespace polydetail

// monomial -> Newton basis on (start, step)
template <class D>
DensePoly<D> to_newton(const DensePoly<D>& p, const typename D::Elem& start, const typename D::Elem& step) {
    polydetail::require_monomial(p, "to_newton");
    const D& dom = p.dom;
    if (dom.is_zero(step)) throw Error("to_newton: step must be invertible");
    auto basis = BasisSpec<D>::newton(start, step);
    if (p.is_zero()) {
        DensePoly<D> z(dom);
        z.basis = basis;
        return z;
    }
    // the basis change is unitriangular, so no divisions arise
    std::size_t len = p.c.size();
    std::vector<typename D::Elem> out(len, dom.zero());
    polydetail::to_newton_rec(p, basis, 0, len, out, 0);
    DensePoly<D> res(dom, std::move(out), basis);
    return res;
}

template <class D>
DensePoly<D> from_newton(const DensePoly<D>& p) {
    if (p.basis.kind != BasisKind::Newton) throw Error("from_newton: newton basis required");
    const D& dom = p.dom;
    if (p.is_zero()) return DensePoly<D>::zero(dom);
    return polydetail::from_newton_rec(dom, p.basis, p.c, 0, p.c.size(), 0);
}

// ---- arithmetic-progression evaluation and interpolation ------------------

// p(start), p(start+step), ..., p(start+(count-1)*step)
template <class D>
std::vector<typename D::Elem> eval_progression(const DensePoly<D>& p, const typename D::Elem& start,
                                               const typename D::Elem& step, std::size_t count) {
    const D& dom = p.dom;
    if (count == 0) return {};
    if (dom.is_zero(step)) throw Error("eval_progression: step must be invertible");
    if (p.is_zero()) return std::vector<typename D::Elem>(count, dom.zero());
    if (p.deg() == 0) return std::vector<typename D::Elem>(count, p.c[0]);
    auto want = BasisSpec<D>::newton(start, step);
    DensePoly<D> pn(dom);
    if (p.basis.kind == BasisKind::Monomial) {
        pn = to_newton(p, start, step);
    } else if (polydetail::same_basis(p.basis, want, dom)) {
        pn = p;
    } else {
        pn = to_newton(from_newton(p), start, step);
    }
    if (!char_at_least(dom, count))
        throw CharacteristicTooSmall("eval_progression: characteristic below node count");
    // v_i = i! * sum_j (c_j step^j) / (i-j)!
    std::vector<typename D::Elem> u(pn.c.size(), dom.zero());
    auto sp = dom.one();
    for (std::size_t j = 0; j < pn.c.size(); ++j) {
        u[j] = dom.mul(pn.c[j], sp);
        if (j + 1 < pn.c.size()) sp = dom.mul(sp, step);
    }
    auto fact = factorial_table(dom, count);
    std::vector<typename D::Elem> invf(count, dom.zero());
    invf[count - 1] = dom.inv(fact[count - 1]);
    for (std::size_t i = count - 1; i-- > 0;) invf[i] = dom.mul(invf[i + 1], dom.from_uint(i + 1));
    auto e = polydetail::conv_prefix(dom, u, invf, count);
    for (std::size_t i = 0; i < count; ++i) e[i] = dom.mul(e[i], fact[i]);
    return e;
}

// unique polynomial of degree < |values| through (start + i*step, values[i]),
// returned in the Newton basis on (start, step)
template <class D>
DensePoly<D> interp_progression(const D& dom, const std::vector<typename D::Elem>& values,
                                const typename D::Elem& start, const typename D::Elem& step) {
    std::size_t count = values.size();
    if (count == 0) return DensePoly<D>::zero(dom);
    if (dom.is_zero(step)) throw Error("interp_progression: step must be invertible");
    if (!char_at_least(dom, count))
        throw CharacteristicTooSmall("interp_progression: characteristic below node count");
    auto invf = inv_factorial_table(dom, count);
    std::vector<typename D::Elem> e(count, dom.zero());
    for (std::size_t i = 0; i < count; ++i) e[i] = dom.mul(values[i], invf[i]);
    // alternating series 1/t! with sign, the formal inverse of sum X^t/t!
    std::vector<typename D::Elem> alt(count, dom.zero());
    for (std::size_t t = 0; t < count; ++t) alt[t] = (t & 1) ? dom.neg(invf[t]) : invf[t];
    auto u = polydetail::conv_prefix(dom, e, alt, count);
    auto step_inv = dom.inv(step);
    auto sp = dom.one();
    std::vector<typename D::Elem> c(count, dom.zero());
    for (std::size_t j = 0; j < count; ++j) {
        c[j] = dom.mul(u[j], sp);
        if (j + 1 < count) sp = dom.mul(sp, step_inv);
    }
    return DensePoly<D>(dom, std::move(c), BasisSpec<D>::newton(start, step));
}

// ---- gcd over field coefficients ------------------------------------------

template <class D>
DensePoly<D> poly_make_monic(const DensePoly<D>& p) {
    if (p.is_zero()) return p;
    if (p.dom.eq(p.c.back(), p.dom.one())) return p;
    return poly_scale(p, p.dom.inv(p.c.back()));
}

template <class D>
DensePoly<D> poly_gcd(DensePoly<D> a, DensePoly<D> b) {
    while (!b.is_zero()) {
        auto r = poly_mod(a, b);
        a = std::move(b);
        b = std::move(r);
    }
    return poly_make_monic(a);
}

// Rational coefficients: primitive pseudo-remainder sequence over the
// integers, so coefficient sizes stay bounded by integer-content gcds
// instead of exploding along the Euclidean remainders.
inline DensePoly<Rational> poly_gcd(DensePoly<Rational> a, DensePoly<Rational> b) {
    const Rational& dom = a.dom;
    if (a.is_zero()) return poly_make_monic(b);
    if (b.is_zero()) return poly_make_monic(a);
    auto to_primitive_int = [](const DensePoly<Rational>& p) {
        mpz_class den_lcm = 1;
        for (const auto& c : p.c) {
            mpz_class d = c.get_den();
            mpz_class g;
            mpz_gcd(g.get_mpz_t(), den_lcm.get_mpz_t(), d.get_mpz_t());
            den_lcm = den_lcm / g * d;
        }
        std::vector<mpz_class> z;
        z.reserve(p.c.size());
        for (const auto& c : p.c) z.push_back(mpq_class(c * den_lcm).get_num());
        mpz_class content = 0;
        for (const auto& v : z) mpz_gcd(content.get_mpz_t(), content.get_mpz_t(), v.get_mpz_t());
        if (content != 0)
            for (auto& v : z) v /= content;
        return z;
    };
    auto g = to_primitive_int(a);
    auto h = to_primitive_int(b);
    if (g.size() < h.size()) std::swap(g, h);
    auto strip = [](std::vector<mpz_class>& v) {
        while (!v.empty() && v.back() == 0) v.pop_back();
    };
    strip(g);
    strip(h);
    while (!h.empty()) {
        if (g.size() < h.size()) {
            std::swap(g, h);
            continue;
        }
        // pseudo-remainder: repeatedly r <- lead(h)*r - top(r)*X^off*h
        std::vector<mpz_class> r = g;
        const mpz_class lead = h.back();
        while (r.size() >= h.size()) {
            mpz_class coef = r.back();
            if (coef != 0) {
                std::size_t off = r.size() - h.size();
                for (auto& v : r) v *= lead;
                for (std::size_t j = 0; j < h.size(); ++j) r[off + j] -= coef * h[j];
            }
            r.pop_back();
            strip(r);
            if (r.empty()) break;
        }
        mpz_class content = 0;
        for (const auto& v : r) mpz_gcd(content.get_mpz_t(), content.get_mpz_t(), v.get_mpz_t());
        if (content != 0)
            for (auto& v : r) v /= content;
        g = std::move(h);
        h = std::move(r);
    }
    std::vector<mpq_class> out;
    out.reserve(g.size());
    for (auto& v : g) out.emplace_back(v);
    return poly_make_monic(DensePoly<Rational>(dom, std::move(out)));
}

}  // namespace linrec

#endif
