#ifndef LINREC_APPS_HPP
#define LINREC_APPS_HPP

#include <cmath>
#include <string>
#include <vector>

#include "linrec/holonomic.hpp"

// Application layer: multi-factorials, orthogonal polynomial evaluation,
// truncated holonomic series, and output-sensitive coefficient extraction
// for p^m and 1/p.

namespace linrec {

// (n_1!, ..., n_l!) through the k = d = 1 matrix factorial
template <class D>
std::vector<typename D::Elem> multi_factorial(const D& dom, const IndexSet& indices) {
    validate_index_set(indices);
    PolyMatrix<D> a(dom, 1);
    a.at(0, 0) = DensePoly<D>(dom, {dom.zero(), dom.one()});  // entry N
    auto res = multi_apply(a, {dom.one()}, indices, ApplyMode::Companion);
    std::vector<typename D::Elem> out;
    out.reserve(indices.size());
    for (auto& v : res.values) out.push_back(v[0]);
    return out;
}

// ---- orthogonal polynomials -------------------------------------------------

enum class OrthoName { ChebyshevT, ChebyshevU, Legendre, Hermite, Laguerre };
enum class OrthoNorm { Classical, Monic };

inline const char* ortho_name_str(OrthoName n) {
    switch (n) {
        case OrthoName::ChebyshevT: return "chebyshev-t";
        case OrthoName::ChebyshevU: return "chebyshev-u";
        case OrthoName::Legendre: return "legendre";
        case OrthoName::Hermite: return "hermite";
        case OrthoName::Laguerre: return "laguerre";
    }
    return "?";
}

// three-term data: P_{n+1} = (A_n x + B_n) P_n - C_n P_{n-1} for n >= 1,
// with P_0 constant and P_1 = p1_lin * x + p1_const
template <class D>
struct OrthogonalFamily {
    OrthoName name;
    OrthoNorm norm;
    RationalFunction<D> a, b, c;
    typename D::Elem p0;
    typename D::Elem p1_lin;
    typename D::Elem p1_const;
};

namespace appsdetail {

template <class D>
DensePoly<D> ipoly(const D& dom, std::initializer_list<i64> c) {
    std::vector<typename D::Elem> v;
    for (i64 x : c) v.push_back(dom.from_int(x));
    return DensePoly<D>(dom, std::move(v));
}

template <class D>
RationalFunction<D> irat(const D& dom, std::initializer_list<i64> num, std::initializer_list<i64> den) {
    return RationalFunction<D>(ipoly(dom, num), ipoly(dom, den));
}

// substitute N -> N + t
template <class D>
RationalFunction<D> rf_shift_by(const RationalFunction<D>& x, i64 t) {
    const D& dom = x.dom();
    auto s = dom.from_int(t);
    return RationalFunction<D>(x.num.deg() < 1 ? x.num : shift_var(x.num, s),
                               x.den.deg() < 1 ? x.den : shift_var(x.den, s));
}

}  // namespace appsdetail

template <class D>
OrthogonalFamily<D> ortho_family(const D& dom, OrthoName name, OrthoNorm norm) {
    using appsdetail::irat;
    OrthogonalFamily<D> f{name, norm, RationalFunction<D>(dom), RationalFunction<D>(dom),
                          RationalFunction<D>(dom), dom.one(), dom.one(), dom.zero()};
    switch (name) {
        case OrthoName::ChebyshevT:
            f.a = irat(dom, {2}, {1});
            f.b = irat(dom, {0}, {1});
            f.c = irat(dom, {1}, {1});
            f.p1_lin = dom.one();
            break;
        case OrthoName::ChebyshevU:
            f.a = irat(dom, {2}, {1});
            f.b = irat(dom, {0}, {1});
            f.c = irat(dom, {1}, {1});
            f.p1_lin = dom.from_int(2);
            break;
        case OrthoName::Legendre:
            f.a = irat(dom, {1, 2}, {1, 1});  // (2N+1)/(N+1)
            f.b = irat(dom, {0}, {1});
            f.c = irat(dom, {0, 1}, {1, 1});  // N/(N+1)
            f.p1_lin = dom.one();
            break;
        case OrthoName::Hermite:
            f.a = irat(dom, {2}, {1});
            f.b = irat(dom, {0}, {1});
            f.c = irat(dom, {0, 2}, {1});  // 2N
            f.p1_lin = dom.from_int(2);
            break;
        case OrthoName::Laguerre:
            f.a = irat(dom, {-1}, {1, 1});    // -1/(N+1)
            f.b = irat(dom, {1, 2}, {1, 1});  // (2N+1)/(N+1)
            f.c = irat(dom, {0, 1}, {1, 1});  // N/(N+1)
            f.p1_lin = dom.from_int(-1);
            f.p1_const = dom.one();
            break;
    }
    if (norm == OrthoNorm::Monic) {
        // M_{n+1} = (x + B_n/A_n) M_n - (C_n/(A_n A_{n-1})) M_{n-1}
        auto bn = rf_div(f.b, f.a);
        auto cn = rf_div(f.c, rf_mul(f.a, appsdetail::rf_shift_by(f.a, -1)));
        f.b = bn;
        f.c = cn;
        f.a = appsdetail::irat(dom, {1}, {1});
        auto lin_inv = dom.inv(f.p1_lin);
        f.p1_const = dom.mul(f.p1_const, lin_inv);
        f.p1_lin = dom.one();
    }
    return f;
}

// P_{n_i}(x) for all indices, through one holonomic rewrite shared by
// every family (only the coefficient table differs)
template <class D>
std::vector<typename D::Elem> ortho_eval(const OrthogonalFamily<D>& fam, const typename D::Elem& x,
                                         const IndexSet& indices) {
    const D& dom = fam.a.dom();
    // clear the three rational coefficients over their denominator lcm
    auto lcm = fam.a.den;
    for (const auto* r : {&fam.b, &fam.c}) {
        auto g = poly_gcd(lcm, r->den);
        lcm = poly_mul(lcm, poly_divrem(r->den, g).first);
    }
    auto amul = poly_mul(fam.a.num, poly_divrem(lcm, fam.a.den).first);
    auto bmul = poly_mul(fam.b.num, poly_divrem(lcm, fam.b.den).first);
    auto cmul = poly_mul(fam.c.num, poly_divrem(lcm, fam.c.den).first);
    // lcm(n) P_{n+1} = (amul(n) x + bmul(n)) P_n - cmul(n) P_{n-1}, n >= 1;
    // as a depth-2 relation at shift mu = n-1
    auto at1 = [&](const DensePoly<D>& p) { return p.deg() < 1 ? p : shift_var(p, dom.one()); };
    auto a0 = at1(lcm);
    auto a1 = poly_neg(poly_add(poly_scale(at1(amul), x), at1(bmul)));
    auto a2 = at1(cmul);
    auto p1 = dom.add(dom.mul(fam.p1_lin, x), fam.p1_const);
    HolonomicRecurrence<D> rec(dom, {a0, a1, a2}, {fam.p0, p1});
    return multi_eval(rec, indices);
}

// ---- holonomic series approximation -----------------------------------------

template <class D>
struct SeriesSpec {
    HolonomicRecurrence<D> coeff_rec;  // recurrence of the series coefficients
    double growth_m = 1.0;             // |c_n| <= M rho^{-n}
    double growth_rho = 1.0;
};

template <class D>
struct SeriesResult {
    typename D::Elem value;
    u64 terms_used = 0;
};

// partial sum s_N = sum_{n<N} c_n x^n via the augmented first-order system
// (partial-sum row on top of the x-weighted coefficient window)
template <class D>
SeriesResult<D> series_eval_terms(const SeriesSpec<D>& spec, const typename D::Elem& x, u64 nterms) {
    const D& dom = spec.coeff_rec.dom;
    const auto& rec = spec.coeff_rec;
    if (rec.offset != 0) throw Error("series evaluation needs a coefficient recurrence anchored at 0");
    const std::size_t k = rec.depth();
    if (nterms == 0) return {dom.zero(), 0};

    // w_n = c_n x^n obeys the recurrence with a_i scaled by x^i
    std::vector<DensePoly<D>> wc;
    auto xp = dom.one();
    for (std::size_t i = 0; i <= k; ++i) {
        wc.push_back(poly_scale(rec.coeffs[i], xp));
        if (i < k) xp = dom.mul(xp, x);
    }
    // state (s_n, w_{n+k-1}, ..., w_n); the scale a_0 rides every non-top row
    auto back1 = dom.from_int(-1);
    auto sh = [&](const DensePoly<D>& p) { return p.deg() < 1 ? p : shift_var(p, back1); };
    const auto a0 = sh(wc[0]);  // engine steps are 1-based
    PolyMatrix<D> m(dom, k + 1);
    m.at(0, 0) = a0;
    m.at(0, k) = a0;
    for (std::size_t j = 0; j < k; ++j) m.at(1, 1 + j) = poly_neg(sh(wc[j + 1]));
    for (std::size_t i = 2; i <= k; ++i) m.at(i, i - 1) = a0;

    Vec<D> v0(k + 1, dom.zero());
    xp = dom.one();
    std::vector<typename D::Elem> w0;
    for (std::size_t i = 0; i < k; ++i) {
        w0.push_back(dom.mul(rec.initial[i], xp));
        xp = dom.mul(xp, x);
    }
    for (std::size_t i = 0; i < k; ++i) v0[1 + i] = w0[k - 1 - i];

    u64 steps = nterms;  // V_t holds s_t = sum_{n<t} w_n
    auto res = multi_apply(m, v0, {steps}, ApplyMode::Vector);
    auto s = res.values[0][0];
    if (a0.deg() >= 1 || !dom.eq(a0.coeff(0), dom.one())) {
        PolyMatrix<D> sm(dom, 1);
        sm.at(0, 0) = a0;
        auto sg = multi_apply(sm, {dom.one()}, {steps}, ApplyMode::Vector);
        if (dom.is_zero(sg.values[0][0]))
            throw ScaleVanishes(holodetail::find_vanishing_scale(dom, wc[0], 0, steps));
        s = dom.div(s, sg.values[0][0]);
    }
    return {s, nterms};
}

// N picked from the Cauchy-estimate tail bound M (|x|/rho)^N / (1 - |x|/rho)
template <class D>
SeriesResult<D> series_eval_eps(const SeriesSpec<D>& spec, const typename D::Elem& x, double x_abs,
                                double eps) {
    if (spec.growth_rho <= 0 || spec.growth_m <= 0) throw Error("series bounds must be positive");
    double q = x_abs / spec.growth_rho;
    if (q >= 1.0) throw RadiusViolated();
    u64 n = 1;
    double tail = spec.growth_m * q / (1.0 - q);
    while (tail > eps && n < (u64(1) << 40)) {
        tail *= q;
        ++n;
    }
    return series_eval_terms(spec, x, n);
}

// ---- partial polynomial arithmetic -------------------------------------------

namespace appsdetail {

// p^e mod X^cap by repeated squaring
template <class D>
DensePoly<D> pow_trunc(const DensePoly<D>& p, u64 e, std::size_t cap) {
    const D& dom = p.dom;
    DensePoly<D> r = DensePoly<D>::constant(dom, dom.one());
    DensePoly<D> b = trunc_high(p, cap);
    while (e) {
        if (e & 1) r = trunc_high(poly_mul(r, b), cap);
        b = trunc_high(poly_mul(b, b), cap);
        e >>= 1;
    }
    return r;
}

// full p^e by repeated squaring
template <class D>
DensePoly<D> pow_full(const DensePoly<D>& p, u64 e) {
    const D& dom = p.dom;
    DensePoly<D> r = DensePoly<D>::constant(dom, dom.one());
    DensePoly<D> b = p;
    while (e) {
        if (e & 1) r = poly_mul(r, b);
        b = poly_mul(b, b);
        e >>= 1;
    }
    return r;
}

template <class D>
std::size_t valuation(const DensePoly<D>& p) {
    for (std::size_t i = 0; i < p.c.size(); ++i)
        if (!p.dom.is_zero(p.c[i])) return i;
    return p.c.size();
}

// coefficient recurrence of p^m (p(0) a unit):
//     n p_0 c_n = sum_{i=1..d} p_i (i(m+1) - n) c_{n-i},
// depth d, coefficient degree 1, anchored at 0 with c_0..c_{d-1} seeded
template <class D>
HolonomicRecurrence<D> power_coeff_rec(const DensePoly<D>& p, u64 m) {
    const D& dom = p.dom;
    const std::size_t d = std::size_t(p.deg());
    if (d == 0) {
        // constant: the delta-like sequence (p_0^m, 0, 0, ...)
        std::vector<DensePoly<D>> cs = {DensePoly<D>::constant(dom, dom.one()), DensePoly<D>::zero(dom)};
        return HolonomicRecurrence<D>(dom, std::move(cs),
                                      {pow_full(DensePoly<D>::constant(dom, p.c[0]), m).c[0]});
    }
    auto mp1 = dom.from_uint(m + 1);
    std::vector<DensePoly<D>> cs;
    // a_0(mu) = (mu + d) p_0
    cs.push_back(DensePoly<D>(dom, {dom.mul(dom.from_uint(d), p.c[0]), p.c[0]}));
    // a_i(mu) = p_i ((mu + d) - i(m+1))
    for (std::size_t i = 1; i <= d; ++i) {
        auto shift = dom.sub(dom.from_uint(d), dom.mul(dom.from_uint(i), mp1));
        cs.push_back(DensePoly<D>(dom, {dom.mul(p.c[i], shift), p.c[i]}));
    }
    auto seed = pow_trunc(p, m, d);
    std::vector<typename D::Elem> init(d, dom.zero());
    for (std::size_t i = 0; i < d && i < seed.c.size(); ++i) init[i] = seed.c[i];
    return HolonomicRecurrence<D>(dom, std::move(cs), std::move(init));
}

// coefficient recurrence of 1/p (constant coefficients, depth d)
template <class D>
ConstRecurrence<D> inverse_coeff_rec(const DensePoly<D>& p) {
    const D& dom = p.dom;
    const std::size_t d = std::size_t(p.deg());
    auto inv0 = dom.inv(p.c[0]);
    std::vector<typename D::Elem> a(d, dom.zero());
    for (std::size_t i = 1; i <= d; ++i) a[i - 1] = dom.neg(dom.mul(p.c[i], inv0));
    auto init_poly = newton_inverse(p, d);
    std::vector<typename D::Elem> init(d, dom.zero());
    for (std::size_t i = 0; i < d && i < init_poly.c.size(); ++i) init[i] = init_poly.c[i];
    return ConstRecurrence<D>(dom, std::move(a), std::move(init));
}

}  // namespace appsdetail

// the l most significant coefficients of p^n, highest first
template <class D>
std::vector<typename D::Elem> power_top_coeffs(const DensePoly<D>& p, u64 n, std::size_t l) {
    const D& dom = p.dom;
    if (p.is_zero()) throw Error("power_top_coeffs: zero polynomial");
    const std::size_t d = std::size_t(p.deg());
    if (l < std::max<std::size_t>(d, 1)) throw Error("power_top_coeffs: need l >= deg(p)");
    std::vector<typename D::Elem> out(l, dom.zero());
    if (n == 0) {
        out[0] = dom.one();
        return out;
    }
    if (d == 0) {
        out[0] = appsdetail::pow_full(p, n).c[0];
        return out;
    }
    // q = p^ceil(l/d), then rev-truncated powering at precision l
    u64 s = (l + d - 1) / d;
    auto q = appsdetail::pow_full(p, std::min<u64>(s, n));
    u64 t = n / std::min<u64>(s, n), r = n % std::min<u64>(s, n);
    auto rq = rev(q, std::size_t(q.deg()));
    auto rp = rev(p, d);
    auto top = poly_mul(appsdetail::pow_trunc(rq, t, l), appsdetail::pow_trunc(rp, r, l));
    top = trunc_high(top, l);
    for (std::size_t j = 0; j < l; ++j) out[j] = top.coeff(j);
    return out;
}

// the l most significant coefficients of 1/p mod X^n, highest first:
// full Newton up to n/2^I, then I reverse-analyzed truncated stages that
// keep only the top slice (thickness grows by deg+1 per level down)
template <class D>
std::vector<typename D::Elem> inverse_top_coeffs(const DensePoly<D>& p, u64 n, std::size_t l) {
    const D& dom = p.dom;
    if (p.is_zero() || dom.is_zero(p.c[0])) throw ConstantTermNotInvertible();
    const std::size_t d = std::size_t(p.deg());
    if (l < std::max<std::size_t>(d, 1) || l > n) throw Error("inverse_top_coeffs: need deg(p) <= l <= n");

    // stage sizes by ceil-halving: s_0 = n, s_{i+1} = ceil(s_i / 2)
    double ratio = double(n) / double(l);
    int want = 0;
    if (ratio > 2.0) {
        double lg = std::log2(ratio);
        want = int(std::ceil(lg - std::log2(std::max(1.0, std::log2(ratio)))));
    }
    std::vector<u64> sizes = {n};
    while (int(sizes.size()) - 1 < want) {
        u64 nxt = (sizes.back() + 1) / 2;
        if (l + (d + 1) * sizes.size() > nxt) break;  // slice must fit the stage
        sizes.push_back(nxt);
    }
    const std::size_t stages = sizes.size() - 1;

    // base: full inverse at the smallest stage, reversed top slice
    u64 base_len = sizes.back();
    auto qbase = newton_inverse(p, std::size_t(base_len));
    std::size_t thick = l + (d + 1) * stages;
    std::vector<typename D::Elem> u(thick, dom.zero());
    for (std::size_t j = 0; j < thick && j < base_len; ++j) u[j] = qbase.coeff(std::size_t(base_len) - 1 - j);

    auto rp = rev(p, d);
    for (std::size_t i = stages; i-- > 0;) {
        u64 m = sizes[i + 1], nn = sizes[i];
        u64 delta = 2 * m - nn;  // 0 or 1 by construction
        std::size_t t = l + (d + 1) * i;
        std::size_t wlen = t + d + std::size_t(delta);
        DensePoly<D> up(dom, std::vector<typename D::Elem>(u.begin(), u.end()));
        auto w = trunc_high(poly_mul(trunc_high(poly_mul(up, up), wlen), rp), wlen);
        std::vector<typename D::Elem> nxt(t, dom.zero());
        for (std::size_t j = 0; j < t; ++j) {
            auto val = dom.neg(w.coeff(std::size_t(d - 1 + delta) + j));
            if (j >= std::size_t(nn - m)) {
                std::size_t back = j - std::size_t(nn - m);
                if (back < u.size()) val = dom.add(val, dom.add(u[back], u[back]));
            }
            nxt[j] = val;
        }
        u = std::move(nxt);
    }
    u.resize(l, dom.zero());
    return u;
}

// coefficients of p^m at the requested exponents, through the depth-d
// recurrence in restricted-degree form: the strict companion carries
// a_0-product weights so deg(f_j) <= j, and the final division removes
// the accumulated scale
template <class D>
std::vector<typename D::Elem> power_coeffs_at(const DensePoly<D>& p, u64 m, const IndexSet& indices) {
    validate_index_set(indices);
    const D& dom = p.dom;
    if (p.is_zero()) {
        if (m == 0) throw Error("power_coeffs_at: 0^0");
        return std::vector<typename D::Elem>(indices.size(), dom.zero());
    }
    std::vector<typename D::Elem> out(indices.size(), dom.zero());
    if (indices.empty()) return out;

    const std::size_t v = appsdetail::valuation(p);
    DensePoly<D> ph = shift_low(p, v);
    const std::size_t d = std::size_t(ph.deg());
    const u64 shift = u64(v) * m;
    u64 maxdeg = u64(d) * m;

    if (!char_at_least(dom, indices.back() + d + 2))
        throw CharacteristicTooSmall("power_coeffs_at: characteristic below the index range");

    if (d == 0 || m == 0) {
        auto c0 = appsdetail::pow_full(DensePoly<D>::constant(dom, ph.coeff(0)), m).coeff(0);
        for (std::size_t i = 0; i < indices.size(); ++i)
            if (indices[i] == shift) out[i] = c0;
        return out;
    }

    // Strict companion for Q_n = sigma_n c_n with sigma_n = prod_{t<=n-d} a_0(t):
    // top row f_j(mu) = -a_j(mu) * prod_{t=1}^{j-1} a_0(mu-t), deg f_j <= j.
    // The sigma-ratio identity needs mu >= j, so the run starts at mu = d
    // with 2d directly seeded coefficients.
    auto rec = appsdetail::power_coeff_rec(ph, m);
    auto seed = appsdetail::pow_trunc(ph, m, 2 * d);
    PolyMatrix<D> a(dom, d);
    auto fwd = dom.from_int(i64(d) - 1);  // engine step j acts at mu = d - 1 + j
    for (std::size_t j = 1; j <= d; ++j) {
        auto f = poly_neg(rec.coeffs[j]);
        for (std::size_t t = 1; t < j; ++t)
            f = poly_mul(f, shift_var(rec.coeffs[0], dom.from_int(-i64(t))));
        a.at(0, j - 1) = f.deg() < 1 ? f : shift_var(f, fwd);
    }
    for (std::size_t i = 1; i < d; ++i) a.at(i, i - 1) = DensePoly<D>::constant(dom, dom.one());

    // V^Q at m0 = d holds Q_{2d-1}, ..., Q_d
    Vec<D> q0(d, dom.zero());
    {
        auto sigma = dom.one();
        std::vector<typename D::Elem> qm(2 * d, dom.zero());
        for (std::size_t mm = 0; mm < 2 * d; ++mm) {
            if (mm >= d) sigma = dom.mul(sigma, poly_eval(rec.coeffs[0], dom.from_uint(mm - d)));
            qm[mm] = mm >= d ? dom.mul(sigma, seed.coeff(mm)) : seed.coeff(mm);
        }
        for (std::size_t i = 0; i < d; ++i) q0[i] = qm[2 * d - 1 - i];
    }

    IndexSet ts;
    std::vector<std::size_t> which(indices.size(), SIZE_MAX);
    for (std::size_t i = 0; i < indices.size(); ++i) {
        u64 ni = indices[i];
        if (ni < shift || ni > shift + maxdeg) continue;  // structurally zero
        u64 e = ni - shift;
        if (e < 2 * d) {
            out[i] = seed.coeff(std::size_t(e));
            continue;
        }
        which[i] = ts.size();
        ts.push_back(e - 2 * d + 1);
    }
    std::sort(ts.begin(), ts.end());
    ts.erase(std::unique(ts.begin(), ts.end()), ts.end());
    if (ts.empty()) return out;

    ApplyMode mode = ts.back() >= u64(d) * u64(d) ? ApplyMode::CompanionRestricted : ApplyMode::Companion;
    auto qres = multi_apply(a, q0, ts, mode);

    // sigma via the k = 1 product of a_0(j - 1), run out to e - d + 1 steps
    IndexSet ss;
    for (u64 t : ts) ss.push_back(t + d);  // e - d + 1 for e = t + 2d - 1
    PolyMatrix<D> sm(dom, 1);
    sm.at(0, 0) = shift_var(rec.coeffs[0], dom.from_int(-1));
    auto sres = multi_apply(sm, {dom.one()}, ss, ApplyMode::Companion);

    for (std::size_t i = 0; i < indices.size(); ++i) {
        if (which[i] == SIZE_MAX) continue;
        u64 e = indices[i] - shift;
        u64 t = e - 2 * d + 1;
        std::size_t pos = std::size_t(std::lower_bound(ts.begin(), ts.end(), t) - ts.begin());
        auto sigma = sres.values[pos][0];
        if (dom.is_zero(sigma)) throw CharacteristicTooSmall("power_coeffs_at: scale product vanished");
        out[i] = dom.div(qres.values[pos][0], sigma);
    }
    return out;
}

// coefficients n .. n+l-1 of 1/p, through the constant-coefficient
// recurrence and one consecutive run
template <class D>
std::vector<typename D::Elem> inverse_coeff_range(const DensePoly<D>& p, u64 n, std::size_t l) {
    const D& dom = p.dom;
    if (p.is_zero() || dom.is_zero(p.c[0])) throw ConstantTermNotInvertible();
    const std::size_t d = std::size_t(p.deg());
    if (l == 0) return {};
    if (d == 0) {
        std::vector<typename D::Elem> out(l, dom.zero());
        if (n == 0) out[0] = dom.inv(p.c[0]);
        return out;
    }
    auto rec = appsdetail::inverse_coeff_rec(p);
    return consecutive_terms(rec, mpz_class(static_cast<unsigned long>(n)), l);
}

// coefficients of p^m1 * (1/q) at the requested exponents
template <class D>
std::vector<typename D::Elem> mixed_coeffs_inverse(const DensePoly<D>& p, u64 m1, const DensePoly<D>& q,
                                                   const IndexSet& indices) {
    validate_index_set(indices);
    const D& dom = p.dom;
    if (q.is_zero() || dom.is_zero(q.c[0])) throw ConstantTermNotInvertible();
    if (!indices.empty() && !char_at_least(dom, 2 * (indices.back() + 4)))
        throw CharacteristicTooSmall("mixed_coeffs: characteristic too small for the index range");
    std::vector<typename D::Elem> out(indices.size(), dom.zero());
    if (indices.empty()) return out;

    const std::size_t v = appsdetail::valuation(p);
    DensePoly<D> ph = shift_low(p, v);
    const u64 shift = u64(v) * m1;

    auto ra = appsdetail::power_coeff_rec(ph, m1);
    HolonomicRecurrence<D> rb = [&] {
        const std::size_t dq = std::size_t(q.deg());
        if (dq == 0)
            return HolonomicRecurrence<D>(
                dom, {appsdetail::ipoly(dom, {1}), DensePoly<D>::zero(dom)}, {dom.inv(q.c[0])});
        auto crec = appsdetail::inverse_coeff_rec(q);
        std::vector<DensePoly<D>> cs = {appsdetail::ipoly(dom, {1})};
        for (std::size_t i = 0; i < dq; ++i) cs.push_back(DensePoly<D>::constant(dom, dom.neg(crec.a[i])));
        return HolonomicRecurrence<D>(dom, std::move(cs), crec.initial);
    }();

    auto conv_rec = closure_convolution(ra, rb);
    // small indices straight from truncated series arithmetic
    u64 seed_top = conv_rec.offset + conv_rec.depth();
    std::size_t cap = std::size_t(std::max<u64>(seed_top, indices.back() >= shift ? 1 : 0)) + 1;
    auto series = trunc_high(
        poly_mul(appsdetail::pow_trunc(ph, m1, cap), newton_inverse(q, cap)), cap);

    IndexSet big;
    for (std::size_t i = 0; i < indices.size(); ++i) {
        if (indices[i] < shift) continue;
        u64 e = indices[i] - shift;
        if (e < seed_top)
            out[i] = series.coeff(std::size_t(e));
        else
            big.push_back(e);
    }
    std::sort(big.begin(), big.end());
    big.erase(std::unique(big.begin(), big.end()), big.end());
    if (!big.empty()) {
        auto vals = multi_eval(conv_rec, big);
        for (std::size_t i = 0; i < indices.size(); ++i) {
            if (indices[i] < shift) continue;
            u64 e = indices[i] - shift;
            if (e >= seed_top) {
                std::size_t pos = std::size_t(std::lower_bound(big.begin(), big.end(), e) - big.begin());
                out[i] = vals[pos];
            }
        }
    }
    return out;
}

// coefficients of p1^m1 * p2^m2 at the requested exponents
template <class D>
std::vector<typename D::Elem> mixed_coeffs_powers(const DensePoly<D>& p1, u64 m1, const DensePoly<D>& p2,
                                                  u64 m2, const IndexSet& indices) {
    validate_index_set(indices);
    const D& dom = p1.dom;
    if (p1.is_zero() || p2.is_zero())
        return std::vector<typename D::Elem>(indices.size(), dom.zero());
    if (!indices.empty() && !char_at_least(dom, 2 * (indices.back() + 4)))
        throw CharacteristicTooSmall("mixed_coeffs: characteristic too small for the index range");
    std::vector<typename D::Elem> out(indices.size(), dom.zero());
    if (indices.empty()) return out;

    const std::size_t v1 = appsdetail::valuation(p1), v2 = appsdetail::valuation(p2);
    DensePoly<D> h1 = shift_low(p1, v1), h2 = shift_low(p2, v2);
    const u64 shift = u64(v1) * m1 + u64(v2) * m2;
    const u64 maxdeg = u64(h1.deg()) * m1 + u64(h2.deg()) * m2;

    auto ra = appsdetail::power_coeff_rec(h1, m1);
    auto rb = appsdetail::power_coeff_rec(h2, m2);
    auto conv_rec = closure_convolution(ra, rb);

    u64 seed_top = conv_rec.offset + conv_rec.depth();
    std::size_t cap = std::size_t(seed_top) + 1;
    auto series =
        trunc_high(poly_mul(appsdetail::pow_trunc(h1, m1, cap), appsdetail::pow_trunc(h2, m2, cap)), cap);

    IndexSet big;
    for (std::size_t i = 0; i < indices.size(); ++i) {
        if (indices[i] < shift || indices[i] > shift + maxdeg) continue;
        u64 e = indices[i] - shift;
        if (e < seed_top)
            out[i] = series.coeff(std::size_t(e));
        else
            big.push_back(e);
    }
    std::sort(big.begin(), big.end());
    big.erase(std::unique(big.begin(), big.end()), big.end());
    if (!big.empty()) {
        auto vals = multi_eval(conv_rec, big);
        for (std::size_t i = 0; i < indices.size(); ++i) {
            u64 e = indices[i] >= shift ? indices[i] - shift : 0;
            if (indices[i] >= shift && indices[i] <= shift + maxdeg && e >= seed_top) {
                std::size_t pos = std::size_t(std::lower_bound(big.begin(), big.end(), e) - big.begin());
                out[i] = vals[pos];
            }
        }
    }
    return out;
}

}  // namespace linrec

#endif
