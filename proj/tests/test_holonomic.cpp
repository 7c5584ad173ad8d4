#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "linrec/holonomic.hpp"

using namespace linrec;

namespace {

std::mt19937_64 rng(0x8010ULL);

template <class D>
DensePoly<D> poly_of(const D& dom, std::initializer_list<i64> c) {
    std::vector<typename D::Elem> v;
    for (i64 x : c) v.push_back(dom.from_int(x));
    return DensePoly<D>(dom, std::move(v));
}

// Fibonacci: P_{n+2} - P_{n+1} - P_n = 0
template <class D>
HolonomicRecurrence<D> fib_rec(const D& dom) {
    return HolonomicRecurrence<D>(dom, {poly_of(dom, {1}), poly_of(dom, {-1}), poly_of(dom, {-1})},
                                  {dom.zero(), dom.one()});
}

// factorial: P_{n+1} - (n+1) P_n = 0
template <class D>
HolonomicRecurrence<D> factorial_rec(const D& dom) {
    return HolonomicRecurrence<D>(dom, {poly_of(dom, {1}), poly_of(dom, {-1, -1})}, {dom.one()});
}

// geometric: P_{n+1} - c P_n = 0
template <class D>
HolonomicRecurrence<D> geometric_rec(const D& dom, i64 c) {
    return HolonomicRecurrence<D>(dom, {poly_of(dom, {1}), poly_of(dom, {-c})}, {dom.one()});
}

template <class D>
HolonomicRecurrence<D> random_rec(const D& dom, std::size_t k, std::size_t d, u64 guard = 80) {
    while (true) {
        std::vector<DensePoly<D>> coeffs;
        for (std::size_t i = 0; i <= k; ++i) {
            std::vector<typename D::Elem> c(1 + rng() % (d + 1), dom.zero());
            for (auto& v : c) v = dom.from_int(i64(rng() % 11) - 5);
            coeffs.emplace_back(dom, std::move(c));
        }
        if (coeffs[0].is_zero()) continue;
        if (coeffs[k].is_zero()) coeffs[k] = poly_of(dom, {1});
        bool lead_ok = true;
        for (u64 n = 0; n <= guard; ++n)
            if (dom.is_zero(poly_eval(coeffs[0], dom.from_uint(n)))) lead_ok = false;
        if (!lead_ok) continue;
        std::vector<typename D::Elem> init(k, dom.zero());
        for (auto& v : init) v = dom.from_int(i64(rng() % 9) - 4);
        return HolonomicRecurrence<D>(dom, std::move(coeffs), std::move(init));
    }
}

// independent annihilation oracle
template <class D>
bool annihilates(const HolonomicRecurrence<D>& rec, const std::vector<typename D::Elem>& target, u64 base,
                 std::size_t terms) {
    const D& dom = rec.dom;
    const std::size_t kk = rec.depth();
    // target[i] is the sequence value at base + i
    u64 start = std::max(rec.offset, base);
    for (u64 n = start; n - base + kk < std::min<std::size_t>(target.size(), start - base + terms + kk); ++n) {
        auto acc = dom.zero();
        for (std::size_t i = 0; i <= kk; ++i) {
            auto c = poly_eval(rec.coeffs[i], dom.from_uint(n));
            acc = dom.add(acc, dom.mul(c, target[n + kk - i - base]));
        }
        if (!dom.is_zero(acc)) return false;
    }
    // the recurrence must also reproduce the target from its own initials
    auto own = iterate_terms(rec, rec.offset + terms);
    for (std::size_t i = 0; i < own.size(); ++i) {
        if (rec.offset + i < base) continue;
        if (!dom.eq(own[i], target[rec.offset + i - base])) return false;
    }
    return true;
}

}  // namespace

TEST_CASE("to_system") {
    Rational qq;
    auto fib = fib_rec(qq);
    auto sys = to_system(fib);
    CHECK(sys.trivial_scale);
    CHECK(poly_eq(sys.matrix.at(0, 0), poly_of(qq, {1})));
    CHECK(poly_eq(sys.matrix.at(0, 1), poly_of(qq, {1})));
    CHECK(poly_eq(sys.matrix.at(1, 0), poly_of(qq, {1})));
    CHECK(sys.matrix.at(1, 1).is_zero());

    auto fact = factorial_rec(qq);
    auto fsys = to_system(fact);
    CHECK(fsys.trivial_scale);
    CHECK(poly_eq(fsys.matrix.at(0, 0), poly_of(qq, {1, 1})));  // N + 1

    // nonconstant leading coefficient: scale is a_0 and rides the subdiagonal
    HolonomicRecurrence<Rational> r(qq, {poly_of(qq, {2, 1}), poly_of(qq, {-1}), poly_of(qq, {-3})},
                                    {qq.one(), qq.one()});
    auto rsys = to_system(r);
    CHECK(!rsys.trivial_scale);
    CHECK(poly_eq(rsys.scale, poly_of(qq, {2, 1})));
    CHECK(poly_eq(rsys.matrix.at(1, 0), poly_of(qq, {2, 1})));
    // rescaled evaluation matches direct rational iteration
    auto direct = iterate_terms(r, 40);
    auto got = multi_eval(r, {7, 23, 40});
    CHECK(qq.eq(got[0], direct[7]));
    CHECK(qq.eq(got[1], direct[23]));
    CHECK(qq.eq(got[2], direct[40]));
}

TEST_CASE("multi_eval") {
    Rational qq;
    auto fib = fib_rec(qq);
    auto v = multi_eval(fib, {10, 20});
    CHECK(qq.eq(v[0], qq.from_int(55)));
    CHECK(qq.eq(v[1], qq.from_int(6765)));

    auto below = multi_eval(fib, {0, 1});
    CHECK(qq.eq(below[0], qq.zero()));
    CHECK(qq.eq(below[1], qq.one()));

    auto fact = factorial_rec(qq);
    auto fv = multi_eval(fact, {5, 8});
    CHECK(qq.eq(fv[0], qq.from_int(120)));
    CHECK(qq.eq(fv[1], qq.from_int(40320)));

    Fp fp(1000000007);
    for (int t = 0; t < 10; ++t) {
        auto r = random_rec(fp, 1 + rng() % 3, rng() % 3, 2100);
        u64 top = 300 + rng() % 1800;
        auto direct = iterate_terms(r, top);
        IndexSet idx = {0, 1 + rng() % 50, top / 2, top};
        std::sort(idx.begin(), idx.end());
        idx.erase(std::unique(idx.begin(), idx.end()), idx.end());
        auto got = multi_eval(r, idx);
        for (std::size_t i = 0; i < idx.size(); ++i) CHECK(fp.eq(got[i], direct[idx[i]]));
    }

    // vanishing scale factor is reported with its index
    HolonomicRecurrence<Rational> bad(qq, {poly_of(qq, {-600, 1}), poly_of(qq, {-1})}, {qq.one()});
    CHECK_THROWS_AS(multi_eval(bad, {1200}), ScaleVanishes);
    try {
        multi_eval(bad, {1200});
    } catch (const ScaleVanishes& e) {
        CHECK(e.index == 600);
    }
}

TEST_CASE("dimension reduction drops trailing zero coefficients") {
    Rational qq;
    // a_2 == 0: really a depth-1 recurrence in disguise
    HolonomicRecurrence<Rational> r(qq, {poly_of(qq, {1}), poly_of(qq, {-2}), DensePoly<Rational>::zero(qq)},
                                    {qq.one(), qq.from_int(2)});
    auto direct = iterate_terms(r, 400);
    auto got = multi_eval(r, {0, 1, 17, 400});
    CHECK(qq.eq(got[0], direct[0]));
    CHECK(qq.eq(got[1], direct[1]));
    CHECK(qq.eq(got[2], direct[17]));
    CHECK(qq.eq(got[3], direct[400]));
}

TEST_CASE("closure_sum") {
    Rational qq;
    auto fib = fib_rec(qq);
    auto s = closure_sum(fib, fib);
    CHECK(s.depth() <= 4);
    auto fterms = iterate_terms(fib, 60);
    std::vector<mpq_class> doubled;
    for (auto& x : fterms) doubled.push_back(qq.add(x, x));
    CHECK(annihilates(s, doubled, 0, 50));

    auto fact = factorial_rec(qq);
    auto geo = geometric_rec(qq, 2);
    auto s2 = closure_sum(fact, geo);
    CHECK(s2.depth() <= 2);
    auto a = iterate_terms(fact, 80);
    auto b = iterate_terms(geo, 80);
    std::vector<mpq_class> tgt;
    for (std::size_t i = 0; i < a.size(); ++i) tgt.push_back(qq.add(a[i], b[i]));
    CHECK(annihilates(s2, tgt, 0, 50));

    // zero-sequence operand: output annihilates the other operand
    HolonomicRecurrence<Rational> zero(qq, {poly_of(qq, {1}), poly_of(qq, {-1})}, {qq.zero()});
    auto s3 = closure_sum(fib, zero);
    CHECK(annihilates(s3, fterms, 0, 50));
}

TEST_CASE("closure_product") {
    Rational qq;
    auto fact = factorial_rec(qq);
    auto geo = geometric_rec(qq, 2);
    auto p = closure_product(fact, geo);
    CHECK(p.depth() <= 1);
    auto a = iterate_terms(fact, 80);
    auto b = iterate_terms(geo, 80);
    std::vector<mpq_class> tgt;
    for (std::size_t i = 0; i < a.size(); ++i) tgt.push_back(qq.mul(a[i], b[i]));
    CHECK(annihilates(p, tgt, 0, 50));

    auto fib = fib_rec(qq);
    auto ones = geometric_rec(qq, 1);
    auto p2 = closure_product(fib, ones);
    auto fterms = iterate_terms(fib, 80);
    CHECK(annihilates(p2, fterms, 0, 50));

    auto p3 = closure_product(fib, fib);
    CHECK(p3.depth() <= 4);
    std::vector<mpq_class> sq;
    for (auto& x : fterms) sq.push_back(qq.mul(x, x));
    CHECK(annihilates(p3, sq, 0, 50));
}

TEST_CASE("closure_convolution") {
    Rational qq;
    auto ones = geometric_rec(qq, 1);
    auto c = closure_convolution(ones, ones);  // conv is n+1
    std::vector<mpq_class> tgt;
    for (i64 n = 0; n <= 80; ++n) tgt.push_back(qq.from_int(n + 1));
    CHECK(annihilates(c, tgt, 0, 50));

    // delta-like operand: convolution with (1,0,0,...) gives P back
    auto fib = fib_rec(qq);
    HolonomicRecurrence<Rational> delta(qq, {poly_of(qq, {1}), DensePoly<Rational>::zero(qq)}, {qq.one()});
    auto c2 = closure_convolution(fib, delta);
    auto fterms = iterate_terms(fib, 200);
    CHECK(annihilates(c2, fterms, 0, 50));

    // Fibonacci * geometric: annihilation of the directly computed convolution
    auto geo = geometric_rec(qq, 2);
    auto c3 = closure_convolution(fib, geo);
    auto g = iterate_terms(geo, 300);
    std::vector<mpq_class> conv;
    for (std::size_t n = 0; n < 300; ++n) {
        auto acc = qq.zero();
        for (std::size_t m = 0; m <= n; ++m) acc = qq.add(acc, qq.mul(fterms.size() > m ? fterms[m] : iterate_terms(fib, n)[m], g[n - m]));
        conv.push_back(acc);
    }
    CHECK(annihilates(c3, conv, 0, 50));
}

TEST_CASE("closure bounds on random pairs (sum and product)") {
    Fp fp(1000000007);
    for (int t = 0; t < 8; ++t) {
        std::size_t k = 1 + rng() % 3, l = 1 + rng() % 3;
        std::size_t d = rng() % 3;
        auto r1 = random_rec(fp, k, d, 600);
        auto r2 = random_rec(fp, l, d, 600);
        auto a = iterate_terms(r1, 420);
        auto b = iterate_terms(r2, 420);

        auto s = closure_sum(r1, r2);
        CHECK(s.depth() <= k + l);
        CHECK(s.degree() <= i64((k + l) * (k + l) * std::max<std::size_t>(d, 1)));
        std::vector<u64> tgt;
        for (std::size_t i = 0; i < a.size(); ++i) tgt.push_back(fp.add(a[i], b[i]));
        CHECK(annihilates(s, tgt, 0, 50));

        auto p = closure_product(r1, r2);
        CHECK(p.depth() <= k * l);
        // tensor coordinates multiply, so coefficient degrees reach twice
        // the per-operand bound
        CHECK(p.degree() <= i64(2 * k * k * l * l * std::max<std::size_t>(d, 1)));
        std::vector<u64> tgt2;
        for (std::size_t i = 0; i < a.size(); ++i) tgt2.push_back(fp.mul(a[i], b[i]));
        CHECK(annihilates(p, tgt2, 0, 50));
    }
}

TEST_CASE("nullrow") {
    Rational qq;
    // single row [1 1]: kernel (1, -1)
    std::vector<std::vector<RationalFunction<Rational>>> m(1);
    m[0].push_back(RationalFunction<Rational>::from_poly(poly_of(qq, {1})));
    m[0].push_back(RationalFunction<Rational>::from_poly(poly_of(qq, {1})));
    auto v = nullrow(qq, m);
    REQUIRE(v.size() == 2);
    CHECK(rf_eq(v[0], rf_neg(v[1])));
    CHECK(!v[0].is_zero());

    // random 2x3 rational matrix: symbolic residual is zero
    for (int t = 0; t < 10; ++t) {
        std::vector<std::vector<RationalFunction<Rational>>> rm(2);
        for (int r = 0; r < 2; ++r)
            for (int c = 0; c < 3; ++c) {
                auto num = poly_of(qq, {i64(rng() % 7) - 3, i64(rng() % 7) - 3});
                auto den = poly_of(qq, {i64(rng() % 5) + 1, i64(rng() % 3)});
                rm[r].emplace_back(num, den);
            }
        auto w = nullrow(qq, rm);
        bool nonzero = false;
        for (auto& e : w) nonzero = nonzero || !e.is_zero();
        CHECK(nonzero);
        for (int r = 0; r < 2; ++r) {
            auto acc = RationalFunction<Rational>(qq);
            for (int c = 0; c < 3; ++c) acc = rf_add(acc, rf_mul(rm[r][c], w[c]));
            CHECK(acc.is_zero());
        }
    }

    // full-rank input has no dependency
    std::vector<std::vector<RationalFunction<Rational>>> fr(2);
    fr[0] = {RationalFunction<Rational>::from_poly(poly_of(qq, {1})),
             RationalFunction<Rational>::from_poly(poly_of(qq, {0}))};
    fr[1] = {RationalFunction<Rational>::from_poly(poly_of(qq, {0})),
             RationalFunction<Rational>::from_poly(poly_of(qq, {1}))};
    CHECK_THROWS_AS(nullrow(qq, fr), NoDependency);
}

TEST_CASE("symbolic inverse degrees with column-wise denominators") {
    // entries a_ij = p_ij / q_j, deg <= d: the inverse entries have degree
    // at most d*k and one common denominator
    Rational qq;
    for (int t = 0; t < 6; ++t) {
        std::size_t k = 2 + rng() % 2;
        std::size_t d = 1 + rng() % 2;
        std::vector<DensePoly<Rational>> qcol;
        for (std::size_t j = 0; j < k; ++j) {
            std::vector<mpq_class> c(d + 1, qq.zero());
            for (auto& x : c) x = qq.from_int(i64(rng() % 7) - 3);
            if (qq.is_zero(c.back())) c.back() = qq.one();
            qcol.emplace_back(qq, std::move(c));
        }
        std::vector<std::vector<RationalFunction<Rational>>> a(k);
        for (std::size_t i = 0; i < k; ++i)
            for (std::size_t j = 0; j < k; ++j) {
                std::vector<mpq_class> c(d + 1, qq.zero());
                for (auto& x : c) x = qq.from_int(i64(rng() % 7) - 3);
                a[i].emplace_back(DensePoly<Rational>(qq, std::move(c)), qcol[j]);
            }
        // determinant and adjugate over the rational function field
        auto det = [&](std::vector<std::vector<RationalFunction<Rational>>> mm,
                       auto&& self) -> RationalFunction<Rational> {
            std::size_t n = mm.size();
            if (n == 1) return mm[0][0];
            auto acc = RationalFunction<Rational>(qq);
            for (std::size_t c = 0; c < n; ++c) {
                std::vector<std::vector<RationalFunction<Rational>>> sub(n - 1);
                for (std::size_t i = 1; i < n; ++i)
                    for (std::size_t j = 0; j < n; ++j)
                        if (j != c) sub[i - 1].push_back(mm[i][j]);
                auto term = rf_mul(mm[0][c], self(sub, self));
                acc = (c & 1) ? rf_sub(acc, term) : rf_add(acc, term);
            }
            return acc;
        };
        auto dd = det(a, det);
        if (dd.is_zero()) continue;  // singular sample, skip
        DensePoly<Rational> common_den = DensePoly<Rational>::constant(qq, qq.one());
        bool deg_ok = true;
        for (std::size_t i = 0; i < k && deg_ok; ++i)
            for (std::size_t j = 0; j < k && deg_ok; ++j) {
                // cofactor C_ji / det
                std::vector<std::vector<RationalFunction<Rational>>> sub(k - 1);
                std::size_t ri = 0;
                for (std::size_t r = 0; r < k; ++r) {
                    if (r == j) continue;
                    for (std::size_t c = 0; c < k; ++c)
                        if (c != i) sub[ri].push_back(a[r][c]);
                    ++ri;
                }
                auto cof = k == 1 ? RationalFunction<Rational>::from_poly(poly_of(qq, {1})) : det(sub, det);
                if ((i + j) & 1) cof = rf_neg(cof);
                auto entry = rf_div(cof, dd);
                deg_ok = entry.num.deg() <= i64(d * k) && entry.den.deg() <= i64(d * k);
                auto g = poly_gcd(common_den, entry.den);
                common_den = poly_mul(common_den, poly_divrem(entry.den, g).first);
            }
        CHECK(deg_ok);
        CHECK(common_den.deg() <= i64(d * k));
    }
}
