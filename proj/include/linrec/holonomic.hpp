#ifndef LINREC_HOLONOMIC_HPP
#define LINREC_HOLONOMIC_HPP

#include <algorithm>
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "linrec/polyrec.hpp"

// Holonomic (P-finite) recurrences
//     a_0(n) P_{n+k} + a_1(n) P_{n+k-1} + ... + a_k(n) P_n = 0,  n >= offset,
// their conversion to first-order systems, rescaled multi-evaluation, and
// closure under sum, Hadamard product, and Cauchy convolution.

namespace linrec {

template <class D>
struct HolonomicRecurrence {
    using Elem = typename D::Elem;

    D dom;
    std::vector<DensePoly<D>> coeffs;  // a_0 .. a_k, monomial basis in N
    std::vector<Elem> initial;         // P_offset .. P_{offset+k-1}
    u64 offset = 0;

    HolonomicRecurrence(D d, std::vector<DensePoly<D>> a, std::vector<Elem> init, u64 off = 0)
        : dom(std::move(d)), coeffs(std::move(a)), initial(std::move(init)), offset(off) {
        if (coeffs.size() < 2) throw Error("holonomic recurrence needs depth >= 1");
        if (coeffs.front().is_zero()) throw Error("leading coefficient a_0 must be nonzero");
        if (initial.size() != depth()) throw Error("holonomic recurrence needs exactly k initial terms");
    }

    std::size_t depth() const { return coeffs.size() - 1; }
    std::int64_t degree() const {
        std::int64_t d = 0;
        for (const auto& c : coeffs) d = std::max(d, c.deg());
        return d;
    }
};

// first terms P_offset .. P_upto by direct iteration (the universal oracle)
template <class D>
std::vector<typename D::Elem> iterate_terms(const HolonomicRecurrence<D>& rec, u64 upto) {
    const D& dom = rec.dom;
    const std::size_t k = rec.depth();
    std::vector<typename D::Elem> seq = rec.initial;
    for (u64 n = rec.offset; rec.offset + seq.size() <= upto; ++n) {
        auto nn = dom.from_uint(n);
        auto lead = poly_eval(rec.coeffs[0], nn);
        if (dom.is_zero(lead)) throw ScaleVanishes(n);
        auto acc = dom.zero();
        for (std::size_t i = 1; i <= k; ++i)
            acc = dom.add(acc, dom.mul(poly_eval(rec.coeffs[i], nn), seq[seq.size() - i]));
        seq.push_back(dom.neg(dom.div(acc, lead)));
    }
    return seq;
}

// first-order form: state (P_{m+k-1},...,P_m) steps by a matrix with top
// row (-a_1,...,-a_k) and the scale a_0(N) on the subdiagonal, so that
// Q_m = (prod_{t<m} s(t)) * V_m satisfies Q_{m+1} = A(m) Q_m.  A constant
// a_0 is normalized away, leaving a strict companion and trivial scale.
template <class D>
struct HoloSystem {
    PolyMatrix<D> matrix;
    DensePoly<D> scale;  // constant one when trivial
    bool trivial_scale = false;
};

template <class D>
HoloSystem<D> to_system(const HolonomicRecurrence<D>& rec) {
    const D& dom = rec.dom;
    const std::size_t k = rec.depth();
    PolyMatrix<D> a(dom, k);
    for (std::size_t j = 0; j < k; ++j) a.at(0, j) = poly_neg(rec.coeffs[j + 1]);
    for (std::size_t i = 1; i < k; ++i) a.at(i, i - 1) = rec.coeffs[0];
    const bool trivial = rec.coeffs[0].deg() == 0 && dom.eq(rec.coeffs[0].c[0], dom.one());
    HoloSystem<D> sys{std::move(a), rec.coeffs[0], trivial};
    return sys;
}

namespace holodetail {

// first-order form used by the evaluator: a constant leading coefficient
// is normalized away so the companion structure stays strict
template <class D>
HoloSystem<D> eval_system(const HolonomicRecurrence<D>& rec) {
    const D& dom = rec.dom;
    const std::size_t k = rec.depth();
    if (rec.coeffs[0].deg() == 0) {
        PolyMatrix<D> a(dom, k);
        auto inv_lead = dom.inv(rec.coeffs[0].c[0]);
        for (std::size_t j = 0; j < k; ++j) a.at(0, j) = poly_scale(poly_neg(rec.coeffs[j + 1]), inv_lead);
        for (std::size_t i = 1; i < k; ++i) a.at(i, i - 1) = DensePoly<D>::constant(dom, dom.one());
        return HoloSystem<D>{std::move(a), DensePoly<D>::constant(dom, dom.one()), true};
    }
    return to_system(rec);
}

}  // namespace holodetail

namespace holodetail {

// drop trailing identically-zero a_k (the dimension reduction): the depth
// shrinks by one and the relation starts one step later
template <class D>
HolonomicRecurrence<D> reduce_depth(HolonomicRecurrence<D> rec) {
    while (rec.depth() > 1 && rec.coeffs.back().is_zero()) {
        std::vector<DensePoly<D>> a;
        for (std::size_t i = 0; i + 1 < rec.coeffs.size(); ++i)
            a.push_back(shift_var(rec.coeffs[i], rec.dom.from_int(-1)));
        std::vector<typename D::Elem> init(rec.initial.begin() + 1, rec.initial.end());
        rec = HolonomicRecurrence<D>(rec.dom, std::move(a), std::move(init), rec.offset + 1);
    }
    return rec;
}

// locate the scale factor that vanished, for the error report
template <class D>
u64 find_vanishing_scale(const D& dom, const DensePoly<D>& s, u64 lo, u64 hi) {
    for (u64 j = lo; j <= hi; ++j)
        if (dom.is_zero(poly_eval(s, dom.from_uint(j)))) return j;
    return hi;
}

}  // namespace holodetail

// P at each requested index, through the rescaled first-order system fed
// to the BSGS engine, plus a parallel sigma evaluation and one division
// per index when the scale is nontrivial
template <class D>
std::vector<typename D::Elem> multi_eval(const HolonomicRecurrence<D>& rec_in, const IndexSet& indices) {
    validate_index_set(indices);
    const D& dom = rec_in.dom;
    std::vector<typename D::Elem> out(indices.size(), dom.zero());
    if (indices.empty()) return out;
    if (indices.front() < rec_in.offset) throw Error("multi_eval: index below recurrence offset");

    auto rec = holodetail::reduce_depth(rec_in);
    const std::size_t k = rec.depth();

    // indices below the (possibly advanced) reduced offset come from the
    // original recurrence's own early terms
    std::vector<typename D::Elem> prefix;
    if (rec.offset + k > rec_in.offset + rec_in.depth())
        prefix = iterate_terms(rec_in, rec.offset + k - 1);
    else
        prefix = rec_in.initial;

    // shift the variable so the engine's product prod_{j=1}^{t} lines up
    // with steps offset, offset+1, ...
    auto sys = holodetail::eval_system(rec);
    PolyMatrix<D> a(dom, k);
    auto sh = dom.from_int(std::int64_t(rec.offset) - 1);
    for (std::size_t e = 0; e < k * k; ++e)
        a.e[e] = sys.matrix.e[e].deg() < 1 ? sys.matrix.e[e] : shift_var(sys.matrix.e[e], sh);
    DensePoly<D> s_shift = sys.scale.deg() < 1 ? sys.scale : shift_var(sys.scale, sh);

    Vec<D> v0(rec.initial.rbegin(), rec.initial.rend());

    IndexSet ts;  // engine step counts, deduplicated
    for (u64 ni : indices)
        if (ni >= rec.offset + k) ts.push_back(ni - k + 1 - rec.offset);
    std::sort(ts.begin(), ts.end());
    ts.erase(std::unique(ts.begin(), ts.end()), ts.end());

    std::vector<Vec<D>> qvals;
    std::vector<typename D::Elem> sigma;
    if (!ts.empty()) {
        bsgsdetail::Engine<D> eng(a);
        ApplyMode mode = ApplyMode::Vector;
        if (sys.trivial_scale && eng.companion_form())
            mode = eng.restricted_ok() && ts.back() >= k * k ? ApplyMode::CompanionRestricted
                                                             : ApplyMode::Companion;
        auto res = multi_apply(a, v0, ts, mode);
        qvals = std::move(res.values);
        if (!sys.trivial_scale) {
            PolyMatrix<D> sm(dom, 1);
            sm.at(0, 0) = s_shift;
            auto sres = multi_apply(sm, {dom.one()}, ts, ApplyMode::Vector);
            sigma.reserve(ts.size());
            for (auto& v : sres.values) sigma.push_back(v[0]);
        }
    }

    for (std::size_t i = 0; i < indices.size(); ++i) {
        u64 ni = indices[i];
        if (ni < rec.offset + k) {
            out[i] = prefix[ni - rec_in.offset];
            continue;
        }
        u64 t = ni - k + 1 - rec.offset;
        std::size_t pos = std::size_t(std::lower_bound(ts.begin(), ts.end(), t) - ts.begin());
        if (sys.trivial_scale) {
            out[i] = qvals[pos][0];
        } else {
            if (dom.is_zero(sigma[pos]))
                throw ScaleVanishes(holodetail::find_vanishing_scale(dom, rec.coeffs[0], rec.offset, ni));
            out[i] = dom.div(qvals[pos][0], sigma[pos]);
        }
    }
    return out;
}

// ---- rational functions -----------------------------------------------------

template <class D>
struct RationalFunction {
    DensePoly<D> num;
    DensePoly<D> den;

    explicit RationalFunction(const D& dom)
        : num(DensePoly<D>::zero(dom)), den(DensePoly<D>::constant(dom, dom.one())) {}
    RationalFunction(DensePoly<D> n, DensePoly<D> d) : num(std::move(n)), den(std::move(d)) {
        if (den.is_zero()) throw Error("rational function with zero denominator");
        normalize();
    }
    static RationalFunction from_poly(DensePoly<D> p) {
        RationalFunction r(p.dom);
        r.num = std::move(p);
        return r;
    }

    const D& dom() const { return num.dom; }
    bool is_zero() const { return num.is_zero(); }

    void normalize() {
        const D& d = num.dom;
        if (num.is_zero()) {
            den = DensePoly<D>::constant(d, d.one());
            return;
        }
        auto g = poly_gcd(num, den);
        if (g.deg() > 0) {
            num = poly_divrem(num, g).first;
            den = poly_divrem(den, g).first;
        }
        if (!d.eq(den.c.back(), d.one())) {
            auto inv = d.inv(den.c.back());
            num = poly_scale(num, inv);
            den = poly_scale(den, inv);
        }
    }
};

template <class D>
RationalFunction<D> rf_add(const RationalFunction<D>& x, const RationalFunction<D>& y) {
    return RationalFunction<D>(poly_add(poly_mul(x.num, y.den), poly_mul(y.num, x.den)),
                               poly_mul(x.den, y.den));
}
template <class D>
RationalFunction<D> rf_sub(const RationalFunction<D>& x, const RationalFunction<D>& y) {
    return RationalFunction<D>(poly_sub(poly_mul(x.num, y.den), poly_mul(y.num, x.den)),
                               poly_mul(x.den, y.den));
}
template <class D>
RationalFunction<D> rf_mul(const RationalFunction<D>& x, const RationalFunction<D>& y) {
    return RationalFunction<D>(poly_mul(x.num, y.num), poly_mul(x.den, y.den));
}
template <class D>
RationalFunction<D> rf_div(const RationalFunction<D>& x, const RationalFunction<D>& y) {
    if (y.is_zero()) throw Error("rational function division by zero");
    return RationalFunction<D>(poly_mul(x.num, y.den), poly_mul(x.den, y.num));
}
template <class D>
RationalFunction<D> rf_neg(const RationalFunction<D>& x) {
    RationalFunction<D> r = x;
    r.num = poly_neg(r.num);
    return r;
}
template <class D>
bool rf_eq(const RationalFunction<D>& x, const RationalFunction<D>& y) {
    return poly_eq(poly_mul(x.num, y.den), poly_mul(y.num, x.den));
}
// substitute N -> N + 1
template <class D>
RationalFunction<D> rf_shift(const RationalFunction<D>& x) {
    const D& dom = x.dom();
    return RationalFunction<D>(x.num.deg() < 1 ? x.num : shift_var(x.num, dom.one()),
                               x.den.deg() < 1 ? x.den : shift_var(x.den, dom.one()));
}

// ---- fraction-free nullspace extraction -------------------------------------

namespace holodetail {

// Bareiss fraction-free determinant of a square polynomial matrix
template <class D>
DensePoly<D> poly_det(std::vector<std::vector<DensePoly<D>>> m) {
    const std::size_t n = m.size();
    const D& dom = m[0][0].dom;
    if (n == 0) return DensePoly<D>::constant(dom, dom.one());
    DensePoly<D> prev = DensePoly<D>::constant(dom, dom.one());
    int sign = 1;
    for (std::size_t t = 0; t + 1 < n; ++t) {
        if (m[t][t].is_zero()) {
            std::size_t swap = t + 1;
            while (swap < n && m[swap][t].is_zero()) ++swap;
            if (swap == n) return DensePoly<D>::zero(dom);
            std::swap(m[t], m[swap]);
            sign = -sign;
        }
        for (std::size_t i = t + 1; i < n; ++i)
            for (std::size_t j = t + 1; j < n; ++j) {
                auto v = poly_sub(poly_mul(m[t][t], m[i][j]), poly_mul(m[i][t], m[t][j]));
                m[i][j] = poly_divrem(v, prev).first;  // Bareiss division is exact
            }
        prev = m[t][t];
    }
    auto det = m[n - 1][n - 1];
    return sign < 0 ? poly_neg(det) : det;
}

// rows of a matrix restricted to given row indices and columns [0, t)
template <class D>
std::vector<std::vector<DensePoly<D>>> submatrix(const std::vector<std::vector<DensePoly<D>>>& cols,
                                                 const std::vector<std::size_t>& rows, std::size_t t) {
    std::vector<std::vector<DensePoly<D>>> m(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t c = 0; c < t; ++c) m[i].push_back(cols[c][rows[i]]);
    return m;
}

}  // namespace holodetail

// Nonzero polynomial vector v with sum_t cols[t] * v[t] = 0, supported on
// the shortest dependent prefix of the column list (column pivoting keeps
// the dependency minimal).  Entries are divided by their polynomial gcd.
template <class D>
std::vector<DensePoly<D>> nullrow_poly(const D& dom, const std::vector<std::vector<DensePoly<D>>>& cols) {
    const std::size_t rows = cols.empty() ? 0 : cols[0].size();
    // grow an independent prefix; the first dependent column closes it
    std::vector<std::size_t> pivot_rows;
    std::vector<std::vector<DensePoly<D>>> reduced;  // echelon forms of accepted columns
    for (std::size_t t = 0; t < cols.size(); ++t) {
        auto c = cols[t];
        for (std::size_t i = 0; i < reduced.size(); ++i) {
            const auto& pivot = reduced[i][pivot_rows[i]];
            if (c[pivot_rows[i]].is_zero()) continue;
            auto factor = c[pivot_rows[i]];
            for (std::size_t r = 0; r < rows; ++r)
                c[r] = poly_sub(poly_mul(c[r], pivot), poly_mul(reduced[i][r], factor));
        }
        std::size_t pr = rows;
        for (std::size_t r = 0; r < rows; ++r)
            if (!c[r].is_zero()) {
                pr = r;
                break;
            }
        if (pr == rows) {
            // dependent: solve the t x t system by Cramer over the pivot rows
            auto base = holodetail::submatrix(cols, pivot_rows, t);
            auto det = holodetail::poly_det(base);
            std::vector<DensePoly<D>> v(cols.size(), DensePoly<D>::zero(dom));
            for (std::size_t j = 0; j < t; ++j) {
                auto mj = base;
                for (std::size_t i = 0; i < pivot_rows.size(); ++i) mj[i][j] = cols[t][pivot_rows[i]];
                auto dj = holodetail::poly_det(mj);
                v[j] = poly_neg(dj);
            }
            v[t] = det;
            // divide out the common polynomial factor
            DensePoly<D> g = v[t];
            for (std::size_t j = 0; j < t; ++j)
                if (!v[j].is_zero()) g = poly_gcd(g, v[j]);
            if (g.deg() > 0)
                for (auto& p : v)
                    if (!p.is_zero()) p = poly_divrem(p, g).first;
            return v;
        }
        pivot_rows.push_back(pr);
        reduced.push_back(std::move(c));
    }
    throw NoDependency();
}

// spec surface: columns given as rational functions; denominators are
// cleared per column (column scaling does not move the kernel support)
template <class D>
std::vector<RationalFunction<D>> nullrow(const D& dom,
                                         const std::vector<std::vector<RationalFunction<D>>>& matrix_rows) {
    if (matrix_rows.empty()) throw Error("nullrow: empty matrix");
    const std::size_t rows = matrix_rows.size();
    const std::size_t ncols = matrix_rows[0].size();
    std::vector<std::vector<DensePoly<D>>> cols(ncols, std::vector<DensePoly<D>>(rows, DensePoly<D>::zero(dom)));
    std::vector<DensePoly<D>> lcms;
    for (std::size_t c = 0; c < ncols; ++c) {
        auto lcm = DensePoly<D>::constant(dom, dom.one());
        for (std::size_t r = 0; r < rows; ++r) {
            const auto& den = matrix_rows[r][c].den;
            auto g = poly_gcd(lcm, den);
            lcm = poly_mul(lcm, poly_divrem(den, g).first);
        }
        for (std::size_t r = 0; r < rows; ++r) {
            const auto& e = matrix_rows[r][c];
            cols[c][r] = poly_mul(e.num, poly_divrem(lcm, e.den).first);
        }
        lcms.push_back(std::move(lcm));
    }
    auto v = nullrow_poly(dom, cols);
    // the kernel of the cleared columns maps back through the clearing scale
    for (std::size_t c = 0; c < ncols; ++c)
        if (!v[c].is_zero()) v[c] = poly_mul(v[c], lcms[c]);
    DensePoly<D> g = DensePoly<D>::zero(dom);
    for (const auto& p : v)
        if (!p.is_zero()) g = g.is_zero() ? p : poly_gcd(g, p);
    if (g.deg() > 0)
        for (auto& p : v)
            if (!p.is_zero()) p = poly_divrem(p, g).first;
    std::vector<RationalFunction<D>> out;
    out.reserve(ncols);
    for (auto& p : v) out.push_back(RationalFunction<D>::from_poly(std::move(p)));
    return out;
}


// ---- closure properties ------------------------------------------------------

namespace holodetail {

// coordinates of the shifted sequence S^t P in the basis {S^0 P, ..., S^{k-1} P}
template <class D>
class ShiftCoords {
  public:
    explicit ShiftCoords(const HolonomicRecurrence<D>& rec) : dom_(rec.dom), k_(rec.depth()) {
        rho_.reserve(k_);
        for (std::size_t j = 0; j < k_; ++j)
            rho_.push_back(RationalFunction<D>(poly_neg(rec.coeffs[k_ - j]), rec.coeffs[0]));
        cur_.assign(k_, RationalFunction<D>(dom_));
        cur_[0] = RationalFunction<D>::from_poly(DensePoly<D>::constant(dom_, dom_.one()));
        t_ = 0;
    }

    const std::vector<RationalFunction<D>>& coords() const { return cur_; }

    // advance to coordinates of S^{t+1} P
    void step() {
        std::vector<RationalFunction<D>> shifted(k_, RationalFunction<D>(dom_));
        for (std::size_t j = 0; j < k_; ++j) shifted[j] = rf_shift(cur_[j]);
        std::vector<RationalFunction<D>> next(k_, RationalFunction<D>(dom_));
        for (std::size_t j = 0; j < k_; ++j) {
            if (j >= 1) next[j] = shifted[j - 1];
            if (!shifted[k_ - 1].is_zero()) next[j] = rf_add(next[j], rf_mul(shifted[k_ - 1], rho_[j]));
        }
        cur_ = std::move(next);
        ++t_;
    }

  private:
    D dom_;
    std::size_t k_;
    std::vector<RationalFunction<D>> rho_;
    std::vector<RationalFunction<D>> cur_;
    std::size_t t_ = 0;
};

// assemble a recurrence from the dependency vector v (a_0 = leading
// nonzero), compute a safe offset past integer roots of a_0, and carry
// initial terms from the directly computed target sequence
template <class D>
HolonomicRecurrence<D> finish_closure(const D& dom, std::vector<DensePoly<D>> v,
                                      const std::vector<typename D::Elem>& target, u64 base,
                                      const char* who) {
    std::size_t top = v.size();
    while (top > 0 && v[top - 1].is_zero()) --top;
    if (top < 2) throw Error(std::string(who) + ": dependency vector collapsed");
    std::size_t depth = top - 1;
    std::vector<DensePoly<D>> coeffs(top, DensePoly<D>::zero(dom));
    for (std::size_t i = 0; i < top; ++i) coeffs[i] = v[top - 1 - i];

    const auto& a0 = coeffs[0];
    u64 scan = base + std::max<u64>(64, 2 * u64(std::max<std::int64_t>(a0.deg(), 1)));
    u64 g = base;
    for (u64 j = base; j <= scan; ++j)
        if (dom.is_zero(poly_eval(a0, dom.from_uint(j)))) g = j + 1;
    if (g + depth > base + target.size())
        throw Error(std::string(who) + ": not enough target terms past the leading-coefficient roots");

    // sanity: the relation must annihilate the window we can see
    for (u64 n = g; n + depth < base + target.size(); ++n) {
        auto acc = dom.zero();
        for (std::size_t i = 0; i < top; ++i) {
            auto c = poly_eval(coeffs[i], dom.from_uint(n));
            acc = dom.add(acc, dom.mul(c, target[n + depth - i - base]));
        }
        if (!dom.is_zero(acc)) throw Error(std::string(who) + ": candidate relation fails on computed terms");
    }

    std::vector<typename D::Elem> init(target.begin() + (g - base), target.begin() + (g - base) + depth);
    return HolonomicRecurrence<D>(dom, std::move(coeffs), std::move(init), g);
}

constexpr u64 kClosureWindow = 64;  // verified terms beyond structural needs

}  // namespace holodetail

// annihilator of (P_n + Q_n), depth <= k + l, via the joint shift space
template <class D>
HolonomicRecurrence<D> closure_sum(const HolonomicRecurrence<D>& r1, const HolonomicRecurrence<D>& r2) {
    require_same_domain(r1.dom, r2.dom);
    const D& dom = r1.dom;
    const std::size_t k = r1.depth(), l = r2.depth();
    holodetail::ShiftCoords<D> cp(r1), cq(r2);
    std::vector<std::vector<RationalFunction<D>>> rat_cols;
    for (std::size_t t = 0; t <= k + l; ++t) {
        std::vector<RationalFunction<D>> col;
        for (const auto& e : cp.coords()) col.push_back(e);
        for (const auto& e : cq.coords()) col.push_back(e);
        rat_cols.push_back(std::move(col));
        if (t < k + l) {
            cp.step();
            cq.step();
        }
    }
    // hand the columns to nullrow as a (k+l) x (k+l+1) matrix
    std::vector<std::vector<RationalFunction<D>>> rows(k + l);
    for (std::size_t r = 0; r < k + l; ++r)
        for (std::size_t t = 0; t < rat_cols.size(); ++t) rows[r].push_back(rat_cols[t][r]);
    auto v = nullrow(dom, rows);
    std::vector<DensePoly<D>> vp;
    std::int64_t mx = 1;
    for (auto& e : v) {
        mx = std::max(mx, e.num.deg());
        vp.push_back(e.num);
    }

    u64 base = std::max(r1.offset, r2.offset);
    u64 upto = base + (k + l) + holodetail::kClosureWindow + std::max<u64>(64, 2 * u64(mx)) + 8;
    auto p = iterate_terms(r1, upto);
    auto q = iterate_terms(r2, upto);
    std::vector<typename D::Elem> target;
    for (u64 n = base; n <= upto; ++n)
        target.push_back(dom.add(p[n - r1.offset], q[n - r2.offset]));
    return holodetail::finish_closure(dom, std::move(vp), target, base, "closure_sum");
}

// annihilator of the termwise product (P_n * Q_n), depth <= k*l, via the
// tensor shift space
template <class D>
HolonomicRecurrence<D> closure_product(const HolonomicRecurrence<D>& r1, const HolonomicRecurrence<D>& r2) {
    require_same_domain(r1.dom, r2.dom);
    const D& dom = r1.dom;
    const std::size_t k = r1.depth(), l = r2.depth();
    holodetail::ShiftCoords<D> cp(r1), cq(r2);
    std::vector<std::vector<RationalFunction<D>>> rat_cols;
    for (std::size_t t = 0; t <= k * l; ++t) {
        std::vector<RationalFunction<D>> col;
        for (const auto& ep : cp.coords())
            for (const auto& eq : cq.coords()) col.push_back(rf_mul(ep, eq));
        rat_cols.push_back(std::move(col));
        if (t < k * l) {
            cp.step();
            cq.step();
        }
    }
    std::vector<std::vector<RationalFunction<D>>> rows(k * l);
    for (std::size_t r = 0; r < k * l; ++r)
        for (std::size_t t = 0; t < rat_cols.size(); ++t) rows[r].push_back(rat_cols[t][r]);
    auto v = nullrow(dom, rows);
    std::vector<DensePoly<D>> vp;
    std::int64_t mx = 1;
    for (auto& e : v) {
        mx = std::max(mx, e.num.deg());
        vp.push_back(e.num);
    }

    u64 base = std::max(r1.offset, r2.offset);
    u64 upto = base + (k * l) + holodetail::kClosureWindow + std::max<u64>(64, 2 * u64(mx)) + 8;
    auto p = iterate_terms(r1, upto);
    auto q = iterate_terms(r2, upto);
    std::vector<typename D::Elem> target;
    for (u64 n = base; n <= upto; ++n)
        target.push_back(dom.mul(p[n - r1.offset], q[n - r2.offset]));
    return holodetail::finish_closure(dom, std::move(vp), target, base, "closure_product");
}

namespace holodetail {

// kernel basis (up to `want` vectors) of the matrix rows x cols, plain
// Gauss-Jordan over the domain
template <class D>
std::vector<std::vector<typename D::Elem>> kernel_basis(const D& dom,
                                                        std::vector<std::vector<typename D::Elem>> m,
                                                        std::size_t cols, std::size_t want) {
    const std::size_t rows = m.size();
    std::vector<std::size_t> pivot_col;
    std::size_t r = 0;
    for (std::size_t c = 0; c < cols && r < rows; ++c) {
        std::size_t sel = rows;
        for (std::size_t i = r; i < rows; ++i)
            if (!dom.is_zero(m[i][c])) {
                sel = i;
                break;
            }
        if (sel == rows) continue;
        std::swap(m[r], m[sel]);
        auto inv = dom.inv(m[r][c]);
        for (std::size_t j = c; j < cols; ++j) m[r][j] = dom.mul(m[r][j], inv);
        for (std::size_t i = 0; i < rows; ++i) {
            if (i == r || dom.is_zero(m[i][c])) continue;
            auto f = m[i][c];
            for (std::size_t j = c; j < cols; ++j) m[i][j] = dom.sub(m[i][j], dom.mul(f, m[r][j]));
        }
        pivot_col.push_back(c);
        ++r;
    }
    std::vector<bool> is_pivot(cols, false);
    for (auto c : pivot_col) is_pivot[c] = true;
    std::vector<std::vector<typename D::Elem>> basis;
    for (std::size_t fc = cols; fc-- > 0 && basis.size() < want;) {
        if (is_pivot[fc]) continue;
        std::vector<typename D::Elem> v(cols, dom.zero());
        v[fc] = dom.one();
        for (std::size_t i = 0; i < pivot_col.size(); ++i) v[pivot_col[i]] = dom.neg(m[i][fc]);
        basis.push_back(std::move(v));
    }
    return basis;
}

// probe arithmetic: does an annihilator of shape (depth, deg) exist for
// the target terms?  returns a kernel vector when it does
template <class D>
std::optional<std::vector<std::vector<typename D::Elem>>> ansatz_solve(
    const D& dom, const std::vector<typename D::Elem>& terms, std::size_t depth, std::size_t deg) {
    const std::size_t unknowns = (depth + 1) * (deg + 1);
    const std::size_t window = unknowns + kClosureWindow;
    if (window + depth >= terms.size()) return std::nullopt;
    std::vector<std::vector<typename D::Elem>> rows(window);
    for (std::size_t n = 0; n < window; ++n) {
        auto& row = rows[n];
        row.reserve(unknowns);
        auto nn = dom.from_uint(n);
        for (std::size_t t = 0; t <= depth; ++t) {
            auto pw = terms[n + t];
            for (std::size_t e = 0; e <= deg; ++e) {
                row.push_back(pw);
                if (e < deg) pw = dom.mul(pw, nn);
            }
        }
    }
    auto basis = kernel_basis(dom, std::move(rows), unknowns, 4);
    if (basis.empty()) return std::nullopt;
    // keep only vectors whose top shift block is populated
    std::vector<std::vector<typename D::Elem>> good;
    for (auto& v : basis) {
        bool lead = false;
        for (std::size_t e = 0; e <= deg; ++e)
            if (!dom.is_zero(v[depth * (deg + 1) + e])) lead = true;
        if (lead) good.push_back(std::move(v));
    }
    if (good.empty()) return std::nullopt;
    return good;
}

inline const std::vector<u64>& probe_primes() {
    static const std::vector<u64> ps = {1000000007ull, 998244353ull, 4179340454199820289ull};
    return ps;
}

}  // namespace holodetail

// annihilator of the convolution (sum_{m<=n} P_m Q_{n-m}).  The advertised
// tensor-space bound does not hold for the Cauchy product in general, so
// the recurrence is found as the minimal-depth annihilator consistent with
// a long window of directly computed terms (depth-major search, verified
// against extra terms before acceptance).
template <class D>
HolonomicRecurrence<D> closure_convolution(const HolonomicRecurrence<D>& r1,
                                           const HolonomicRecurrence<D>& r2) {
    require_same_domain(r1.dom, r2.dom);
    if (r1.offset != 0 || r2.offset != 0)
        throw DegenerateOperand("convolution requires operands anchored at index 0");
    const D& dom = r1.dom;
    const std::size_t k = r1.depth(), l = r2.depth();
    const u64 d = u64(std::max(r1.degree(), r2.degree()));

    const std::size_t depth_cap = std::min<std::size_t>(k * l + k + l + 3, 16);
    const std::size_t deg_cap = std::min<std::size_t>(std::max<u64>(k * k * l * l * d, 10), 28);
    const std::size_t unknown_cap = 400;
    const std::size_t probe_len = (unknown_cap + std::size_t(holodetail::kClosureWindow)) + depth_cap + 8;

    // cheap shape search over an auxiliary prime field
    std::optional<std::pair<std::size_t, std::size_t>> shape;
    for (u64 q : holodetail::probe_primes()) {
        try {
            Fp probe(q);
            auto lift = [&](const HolonomicRecurrence<D>& r) {
                std::vector<DensePoly<Fp>> cs;
                for (const auto& c : r.coeffs) {
                    std::vector<u64> cc;
                    for (const auto& e : c.c) cc.push_back(probe.parse(dom.to_string(e)));
                    cs.emplace_back(probe, std::move(cc));
                }
                std::vector<u64> init;
                for (const auto& e : r.initial) init.push_back(probe.parse(dom.to_string(e)));
                if (cs[0].is_zero()) throw Error("probe lift degenerated");
                return HolonomicRecurrence<Fp>(probe, std::move(cs), std::move(init), 0);
            };
            auto p1 = lift(r1), p2 = lift(r2);
            auto sp = iterate_terms(p1, probe_len);
            auto sq = iterate_terms(p2, probe_len);
            Fp probe2(q);  // separate counter: probe work is scaffolding
            std::vector<u64> conv(probe_len + 1, 0);
            for (std::size_t n = 0; n <= probe_len; ++n) {
                u64 acc = 0;
                for (std::size_t m = 0; m <= n; ++m)
                    acc = probe2.add(acc, probe2.mul(sp[m], sq[n - m]));
                conv[n] = acc;
            }
            for (std::size_t depth = 1; depth <= depth_cap && !shape; ++depth)
                for (std::size_t deg = 0; deg <= deg_cap && !shape; deg += (deg < 10 ? 1 : 2)) {
                    if ((depth + 1) * (deg + 1) > unknown_cap) break;
                    if (holodetail::ansatz_solve(probe2, conv, depth, deg)) shape = {depth, deg};
                }
            break;
        } catch (const Error&) {
            continue;  // prime collided with a denominator; try the next
        }
    }
    if (!shape) throw Error("closure_convolution: no annihilator within the search budget");

    auto [depth, deg] = *shape;
    const std::size_t unknowns = (depth + 1) * (deg + 1);
    const u64 upto = unknowns + holodetail::kClosureWindow + depth + 160;
    auto sp = iterate_terms(r1, upto);
    auto sq = iterate_terms(r2, upto);
    std::vector<typename D::Elem> conv(upto + 1, dom.zero());
    for (std::size_t n = 0; n <= upto; ++n) {
        auto acc = dom.zero();
        for (std::size_t m = 0; m <= n; ++m) acc = dom.add(acc, dom.mul(sp[m], sq[n - m]));
        conv[n] = acc;
    }
    auto sols = holodetail::ansatz_solve(dom, conv, depth, deg);
    if (!sols) throw Error("closure_convolution: exact solve disagrees with the probe");
    std::vector<DensePoly<D>> v;
    for (std::size_t t = 0; t <= depth; ++t) {
        std::vector<typename D::Elem> c((*sols)[0].begin() + t * (deg + 1),
                                        (*sols)[0].begin() + (t + 1) * (deg + 1));
        v.emplace_back(dom, std::move(c));
    }
    return holodetail::finish_closure(dom, std::move(v), conv, 0, "closure_convolution");
}

}  // namespace linrec

#endif
