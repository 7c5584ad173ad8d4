#ifndef LINREC_COMPANION_HPP
#define LINREC_COMPANION_HPP

#include <cstdint>
#include <optional>
#include <vector>

#include "linrec/matrix.hpp"
#include "linrec/poly.hpp"

// Companion matrices: f_1..f_k across the first row, ones on the
// subdiagonal, zeros elsewhere.  Products of companion factors admit
// O(k^2)-per-factor updates, which is what every routine here exploits.

namespace linrec {

template <class D>
struct CompanionMatrix {
    using Elem = typename D::Elem;
    D dom;
    std::vector<Elem> top;  // f_1..f_k

    CompanionMatrix(D d, std::vector<Elem> f) : dom(std::move(d)), top(std::move(f)) {}

    std::size_t k() const { return top.size(); }
    bool invertible() const { return !dom.is_zero(top.back()); }

    Mat<D> dense() const {
        Mat<D> m(dom, k());
        for (std::size_t j = 0; j < k(); ++j) m.at(0, j) = top[j];
        for (std::size_t i = 1; i < k(); ++i) m.at(i, i - 1) = dom.one();
        return m;
    }

    // closed-form inverse: shifted identity on top, last row from f
    Mat<D> inverse_dense() const {
        if (!invertible()) throw NonInvertibleFactor(0);
        Mat<D> m(dom, k());
        for (std::size_t i = 0; i + 1 < k(); ++i) m.at(i, i + 1) = dom.one();
        auto fk_inv = dom.inv(top.back());
        m.at(k() - 1, 0) = fk_inv;
        for (std::size_t j = 1; j < k(); ++j) m.at(k() - 1, j) = dom.neg(dom.mul(top[j - 1], fk_inv));
        return m;
    }
};

// A * F for dense A: column update, O(k^2)
template <class D>
Mat<D> mul_dense_companion(const Mat<D>& a, const CompanionMatrix<D>& f) {
    if (a.k != f.k()) throw DimensionMismatch();
    const D& dom = a.dom;
    const std::size_t k = a.k;
    Mat<D> z(dom, k);
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = 0; j < k; ++j) {
            auto v = dom.mul(f.top[j], a.at(i, 0));
            if (j + 1 < k) v = dom.add(v, a.at(i, j + 1));
            z.at(i, j) = v;
        }
    return z;
}

// F * A for dense A: row shift plus one combined row, O(k^2)
template <class D>
Mat<D> mul_companion_dense(const CompanionMatrix<D>& f, const Mat<D>& a) {
    if (a.k != f.k()) throw DimensionMismatch();
    const D& dom = a.dom;
    const std::size_t k = a.k;
    Mat<D> z(dom, k);
    for (std::size_t j = 0; j < k; ++j) {
        auto v = dom.zero();
        for (std::size_t t = 0; t < k; ++t) v = dom.add(v, dom.mul(f.top[t], a.at(t, j)));
        z.at(0, j) = v;
    }
    for (std::size_t i = 1; i < k; ++i)
        for (std::size_t j = 0; j < k; ++j) z.at(i, j) = a.at(i - 1, j);
    return z;
}

// F^{-1} * A, O(k^2); throws when f_k is no unit
template <class D>
Mat<D> mul_companion_inv_dense(const CompanionMatrix<D>& f, const Mat<D>& a, std::uint64_t which = 0) {
    if (a.k != f.k()) throw DimensionMismatch();
    if (!f.invertible()) throw NonInvertibleFactor(which);
    const D& dom = a.dom;
    const std::size_t k = a.k;
    Mat<D> z(dom, k);
    for (std::size_t i = 0; i + 1 < k; ++i)
        for (std::size_t j = 0; j < k; ++j) z.at(i, j) = a.at(i + 1, j);
    auto fk_inv = dom.inv(f.top.back());
    for (std::size_t j = 0; j < k; ++j) {
        auto v = a.at(0, j);
        for (std::size_t t = 0; t + 1 < k; ++t) v = dom.sub(v, dom.mul(f.top[t], a.at(t + 1, j)));
        z.at(k - 1, j) = dom.mul(v, fk_inv);
    }
    return z;
}

// A * F^{-1}, O(k^2); throws when f_k is no unit
template <class D>
Mat<D> mul_dense_companion_inv(const Mat<D>& a, const CompanionMatrix<D>& f, std::uint64_t which = 0) {
    if (a.k != f.k()) throw DimensionMismatch();
    if (!f.invertible()) throw NonInvertibleFactor(which);
    const D& dom = a.dom;
    const std::size_t k = a.k;
    auto fk_inv = dom.inv(f.top.back());
    Mat<D> z(dom, k);
    for (std::size_t i = 0; i < k; ++i) {
        auto w = dom.mul(a.at(i, k - 1), fk_inv);
        z.at(i, 0) = w;
        for (std::size_t j = 1; j < k; ++j) z.at(i, j) = dom.sub(a.at(i, j - 1), dom.mul(w, f.top[j - 1]));
    }
    return z;
}

// F * v, O(k)
template <class D>
Vec<D> mul_companion_vec(const CompanionMatrix<D>& f, const Vec<D>& v) {
    if (v.size() != f.k()) throw DimensionMismatch();
    const D& dom = f.dom;
    Vec<D> out(f.k(), dom.zero());
    auto top = dom.zero();
    for (std::size_t t = 0; t < f.k(); ++t) top = dom.add(top, dom.mul(f.top[t], v[t]));
    out[0] = top;
    for (std::size_t i = 1; i < f.k(); ++i) out[i] = v[i - 1];
    return out;
}

// F_1 * F_2 * ... * F_m by iterated O(k^2) column updates
template <class D>
Mat<D> chain_product(const std::vector<CompanionMatrix<D>>& fs) {
    if (fs.empty()) throw Error("chain_product: empty factor list");
    for (const auto& f : fs)
        if (f.k() != fs[0].k()) throw DimensionMismatch();
    Mat<D> acc = fs[0].dense();
    for (std::size_t i = 1; i < fs.size(); ++i) acc = mul_dense_companion(acc, fs[i]);
    return acc;
}

namespace compdetail {

// product of exactly k companion factors via the (I-L)^{-1} R identity:
// with s_t the scalar emitted by the t-th application (rightmost factor
// first), (I-L) s = R v is strictly triangular and solved by forward
// substitution; the product maps v to (s_k, ..., s_1).
template <class D>
Mat<D> block_product(const std::vector<CompanionMatrix<D>>& fs, std::size_t lo) {
    const D& dom = fs[lo].dom;
    const std::size_t k = fs[lo].k();
    // L(t,u) = f^{(k+1-t)}_{t-u} for u < t;  R(t,i) = f^{(k+1-t)}_{i+t-1}
    Mat<D> l(dom, k), r(dom, k);
    for (std::size_t t = 1; t <= k; ++t) {
        const auto& f = fs[lo + k - t].top;  // factor applied at step t
        for (std::size_t u = 1; u < t; ++u) l.at(t - 1, u - 1) = f[t - u - 1];
        for (std::size_t i = 1; i + t - 1 <= k; ++i) r.at(t - 1, i - 1) = f[i + t - 2];
    }
    // forward substitution, one column of R at a time
    Mat<D> s(dom, k);
    for (std::size_t col = 0; col < k; ++col)
        for (std::size_t t = 0; t < k; ++t) {
            auto v = r.at(t, col);
            for (std::size_t u = 0; u < t; ++u) v = dom.add(v, dom.mul(l.at(t, u), s.at(u, col)));
            s.at(t, col) = v;
        }
    Mat<D> out(dom, k);
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = 0; j < k; ++j) out.at(i, j) = s.at(k - 1 - i, j);
    return out;
}

}  // namespace compdetail

// same product as chain_product, in blocks of k factors
template <class D>
Mat<D> chain_product_blocked(const std::vector<CompanionMatrix<D>>& fs) {
    if (fs.empty()) throw Error("chain_product_blocked: empty factor list");
    const std::size_t k = fs[0].k();
    for (const auto& f : fs)
        if (f.k() != k) throw DimensionMismatch();
    const std::size_t m = fs.size();
    std::optional<Mat<D>> acc;
    std::size_t lo = 0;
    for (; lo + k <= m; lo += k) {
        Mat<D> b = compdetail::block_product(fs, lo);
        acc = acc ? mat_mul(*acc, b) : b;
    }
    if (lo < m) {
        Mat<D> tail = fs[lo].dense();
        for (std::size_t j = lo + 1; j < m; ++j) tail = mul_dense_companion(tail, fs[j]);
        acc = acc ? mat_mul(*acc, tail) : tail;
    }
    return *acc;
}

// all windows F_j ... F_{j+n-1} for j = 1..m-n+1 in O(m k^2); every factor
// must be invertible
template <class D>
std::vector<Mat<D>> sliding_window_products(const std::vector<CompanionMatrix<D>>& fs, std::size_t window) {
    if (fs.empty() || window == 0 || window > fs.size())
        throw Error("sliding_window_products: bad window");
    const std::size_t k = fs[0].k();
    for (const auto& f : fs)
        if (f.k() != k) throw DimensionMismatch();
    for (std::size_t j = 0; j < fs.size(); ++j)
        if (!fs[j].invertible()) throw NonInvertibleFactor(j);
    std::vector<Mat<D>> out;
    out.reserve(fs.size() - window + 1);
    Mat<D> cur = fs[0].dense();
    for (std::size_t j = 1; j < window; ++j) cur = mul_dense_companion(cur, fs[j]);
    out.push_back(cur);
    for (std::size_t j = 0; j + window < fs.size(); ++j) {
        cur = mul_companion_inv_dense(fs[j], cur, j);
        cur = mul_dense_companion(cur, fs[j + window]);
        out.push_back(cur);
    }
    return out;
}

// ---- polynomial matrices ---------------------------------------------------

template <class D>
struct PolyMatrix {
    D dom;
    std::size_t k = 0;
    std::vector<DensePoly<D>> e;  // row major

    PolyMatrix(D d, std::size_t dim) : dom(std::move(d)), k(dim), e(dim * dim, DensePoly<D>::zero(dom)) {}

    DensePoly<D>& at(std::size_t i, std::size_t j) { return e[i * k + j]; }
    const DensePoly<D>& at(std::size_t i, std::size_t j) const { return e[i * k + j]; }

    std::int64_t max_entry_deg() const {
        std::int64_t d = -1;
        for (const auto& p : e) d = std::max(d, p.deg());
        return d;
    }

    Mat<D> eval(const typename D::Elem& x) const {
        Mat<D> m(dom, k);
        for (std::size_t i = 0; i < k; ++i)
            for (std::size_t j = 0; j < k; ++j) m.at(i, j) = poly_eval(at(i, j), x);
        return m;
    }
};

// companion matrix whose top row holds polynomials in N
template <class D>
struct PolyCompanion {
    D dom;
    std::vector<DensePoly<D>> top;

    PolyCompanion(D d, std::vector<DensePoly<D>> f) : dom(std::move(d)), top(std::move(f)) {}
    std::size_t k() const { return top.size(); }

    PolyMatrix<D> matrix() const {
        PolyMatrix<D> m(dom, k());
        for (std::size_t j = 0; j < k(); ++j) m.at(0, j) = top[j];
        for (std::size_t i = 1; i < k(); ++i) m.at(i, i - 1) = DensePoly<D>::constant(dom, dom.one());
        return m;
    }
};

// recognizes a strict companion shape (monomial-basis entries)
template <class D>
std::optional<PolyCompanion<D>> detect_companion(const PolyMatrix<D>& a) {
    const D& dom = a.dom;
    for (std::size_t i = 1; i < a.k; ++i)
        for (std::size_t j = 0; j < a.k; ++j) {
            const auto& p = a.at(i, j);
            if (j + 1 == i) {
                if (p.deg() != 0 || !dom.eq(p.c[0], dom.one())) return std::nullopt;
            } else if (!p.is_zero()) {
                return std::nullopt;
            }
        }
    std::vector<DensePoly<D>> top;
    for (std::size_t j = 0; j < a.k; ++j) top.push_back(a.at(0, j));
    return PolyCompanion<D>(dom, std::move(top));
}

template <class D>
PolyMatrix<D> poly_mat_mul(const PolyMatrix<D>& x, const PolyMatrix<D>& y) {
    if (x.k != y.k) throw DimensionMismatch();
    PolyMatrix<D> z(x.dom, x.k);
    for (std::size_t i = 0; i < x.k; ++i)
        for (std::size_t j = 0; j < x.k; ++j) {
            auto acc = DensePoly<D>::zero(x.dom);
            for (std::size_t t = 0; t < x.k; ++t) acc = poly_add(acc, poly_mul(x.at(i, t), y.at(t, j)));
            z.at(i, j) = acc;
        }
    return z;
}

// Observation: a product of m valid companion factors (deg f_ij <= j) has
// deg(b_ij) <= m + j - i; true when every entry obeys the bound.
template <class D>
bool degree_pattern_check(const PolyMatrix<D>& b, std::uint64_t m) {
    for (std::size_t i = 0; i < b.k; ++i)
        for (std::size_t j = 0; j < b.k; ++j) {
            std::int64_t bound = std::int64_t(m) + std::int64_t(j) - std::int64_t(i);
            if (b.at(i, j).deg() > bound) return false;  // deg(0) = -1 always passes
        }
    return true;
}

}  // namespace linrec

#endif
