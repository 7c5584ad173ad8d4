#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "linrec/apps.hpp"

using namespace linrec;

namespace {

std::mt19937_64 rng(0xa995ULL);

template <class D>
DensePoly<D> ipoly(const D& dom, std::initializer_list<i64> c) {
    std::vector<typename D::Elem> v;
    for (i64 x : c) v.push_back(dom.from_int(x));
    return DensePoly<D>(dom, std::move(v));
}

template <class D>
DensePoly<D> random_poly_unit(const D& dom, std::size_t deg) {
    std::vector<typename D::Elem> c(deg + 1, dom.zero());
    for (auto& v : c) v = dom.from_int(i64(rng() % 9) - 4);
    c[0] = dom.from_int(1 + i64(rng() % 4));
    if (dom.is_zero(c.back())) c.back() = dom.one();
    return DensePoly<D>(dom, std::move(c));
}

}  // namespace

TEST_CASE("multi_factorial") {
    Rational qq;
    auto v = multi_factorial(qq, {0, 1});
    CHECK(qq.eq(v[0], qq.one()));
    CHECK(qq.eq(v[1], qq.one()));
    auto w = multi_factorial(qq, {3, 5});
    CHECK(qq.eq(w[0], qq.from_int(6)));
    CHECK(qq.eq(w[1], qq.from_int(120)));
    Fp f7(7);
    auto x = multi_factorial(f7, {6});
    CHECK(x[0] == 6);  // Wilson: (p-1)! = -1 mod p
    // larger factorial against direct iteration
    Fp fp(998244353);
    auto big = multi_factorial(fp, {777, 5000});
    u64 acc = 1;
    for (u64 j = 1; j <= 5000; ++j) {
        acc = fp.mul_nocount(acc, j);
        if (j == 777) CHECK(big[0] == acc);
    }
    CHECK(big[1] == acc);
}

TEST_CASE("ortho_eval basics") {
    Rational qq;
    auto t = ortho_family(qq, OrthoName::ChebyshevT, OrthoNorm::Classical);
    auto v0 = ortho_eval(t, qq.from_int(9), {0});
    CHECK(qq.eq(v0[0], qq.one()));
    auto v2 = ortho_eval(t, qq.from_int(3), {2});
    CHECK(qq.eq(v2[0], qq.from_int(17)));  // 2*9 - 1

    auto leg = ortho_family(qq, OrthoName::Legendre, OrthoNorm::Classical);
    IndexSet upto10;
    for (u64 i = 1; i <= 10; ++i) upto10.push_back(i);
    auto ones = ortho_eval(leg, qq.one(), upto10);
    for (auto& e : ones) CHECK(qq.eq(e, qq.one()));

    // every family against its own naive three-term iteration
    for (OrthoName name : {OrthoName::ChebyshevT, OrthoName::ChebyshevU, OrthoName::Legendre,
                           OrthoName::Hermite, OrthoName::Laguerre}) {
        for (OrthoNorm norm : {OrthoNorm::Classical, OrthoNorm::Monic}) {
            auto fam = ortho_family(qq, name, norm);
            mpq_class x(3, 7);
            std::vector<mpq_class> seq = {fam.p0, qq.add(qq.mul(fam.p1_lin, x), fam.p1_const)};
            for (u64 n = 1; n + 1 <= 40; ++n) {
                auto nn = qq.from_uint(n);
                auto an = qq.div(poly_eval(fam.a.num, nn), poly_eval(fam.a.den, nn));
                auto bn = qq.div(poly_eval(fam.b.num, nn), poly_eval(fam.b.den, nn));
                auto cn = qq.div(poly_eval(fam.c.num, nn), poly_eval(fam.c.den, nn));
                auto next = qq.sub(qq.mul(qq.add(qq.mul(an, x), bn), seq[n]), qq.mul(cn, seq[n - 1]));
                seq.push_back(next);
            }
            auto got = ortho_eval(fam, x, {0, 1, 7, 25, 40});
            CHECK(qq.eq(got[0], seq[0]));
            CHECK(qq.eq(got[1], seq[1]));
            CHECK(qq.eq(got[2], seq[7]));
            CHECK(qq.eq(got[3], seq[25]));
            CHECK(qq.eq(got[4], seq[40]));
        }
    }
}

TEST_CASE("family tables respect the rational-coefficient shape") {
    // numerator/denominator degrees stay at most 4 and C_n has no zeros
    // for n >= 1 in any family or normalization
    Rational qq;
    for (OrthoName name : {OrthoName::ChebyshevT, OrthoName::ChebyshevU, OrthoName::Legendre,
                           OrthoName::Hermite, OrthoName::Laguerre}) {
        for (OrthoNorm norm : {OrthoNorm::Classical, OrthoNorm::Monic}) {
            auto fam = ortho_family(qq, name, norm);
            for (const auto* r : {&fam.a, &fam.b, &fam.c}) {
                CHECK(r->num.deg() <= 4);
                CHECK(r->den.deg() <= 4);
            }
            for (u64 n = 1; n <= 64; ++n)
                CHECK(!qq.is_zero(poly_eval(fam.c.num, qq.from_uint(n))));
        }
    }
}

TEST_CASE("chebyshev identity over floats") {
    Float64 fl;
    auto fam = ortho_family(fl, OrthoName::ChebyshevT, OrthoNorm::Classical);
    std::mt19937_64 r2(17);
    for (int t = 0; t < 20; ++t) {
        double theta = double(r2() % 100000) / 100000.0 * 3.14159265358979;
        u64 n = 1 + r2() % 10000;
        auto got = ortho_eval(fam, std::cos(theta), {n});
        CHECK(std::abs(got[0] - std::cos(double(n) * theta)) <= 1e-9);
    }
}

TEST_CASE("series_eval") {
    // exp series: (n+1) c_{n+1} = c_n
    Float64 fl;
    HolonomicRecurrence<Float64> exprec(fl, {ipoly(fl, {1, 1}), ipoly(fl, {-1})}, {1.0});
    SeriesSpec<Float64> spec{exprec, 1.0, 2.0};
    auto r = series_eval_terms(spec, 1.0, 10);
    CHECK(std::abs(r.value - 2.7182815255731922) < 1e-12);  // sum_{n<=9} 1/n!

    auto z = series_eval_terms(spec, 0.0, 7);
    CHECK(z.value == 1.0);

    // geometric c_n = 1 at x = 1/2, 20 terms: 2 - 2^-19
    HolonomicRecurrence<Float64> geo(fl, {ipoly(fl, {1}), ipoly(fl, {-1})}, {1.0});
    SeriesSpec<Float64> gspec{geo, 1.0, 1.0};
    auto g = series_eval_terms(gspec, 0.5, 20);
    CHECK(std::abs(g.value - (2.0 - std::pow(2.0, -19))) < 1e-15);

    // eps-driven exp at 1/2
    auto e = series_eval_eps(spec, 0.5, 0.5, 1e-12);
    CHECK(e.terms_used <= 60);
    double ref = 0, fterm = 1;
    for (u64 n = 0; n < 2 * e.terms_used; ++n) {
        ref += fterm;
        fterm *= 0.5 / double(n + 1);
    }
    CHECK(std::abs(e.value - ref) <= 1e-12);

    CHECK_THROWS_AS(series_eval_eps(gspec, 1.5, 1.5, 1e-6), RadiusViolated);

    // exact domain run through the same path
    Rational qq;
    HolonomicRecurrence<Rational> exq(qq, {ipoly(qq, {1, 1}), ipoly(qq, {-1})}, {qq.one()});
    SeriesSpec<Rational> qspec{exq, 1.0, 2.0};
    auto rq = series_eval_terms(qspec, qq.one(), 10);
    mpq_class expect(0);
    mpq_class term(1);
    for (int n = 0; n < 10; ++n) {
        expect += term;
        term /= (n + 1);
    }
    CHECK(qq.eq(rq.value, expect));
}

TEST_CASE("power_top_coeffs") {
    Rational qq;
    auto p = ipoly(qq, {1, 1});
    auto top = power_top_coeffs(p, 4, 2);
    CHECK(qq.eq(top[0], qq.one()));
    CHECK(qq.eq(top[1], qq.from_int(4)));

    auto xo = power_top_coeffs(ipoly(qq, {0, 1}), 9, 3);
    CHECK(qq.eq(xo[0], qq.one()));
    CHECK(qq.eq(xo[1], qq.zero()));
    CHECK(qq.eq(xo[2], qq.zero()));

    for (int t = 0; t < 10; ++t) {
        auto q = random_poly_unit(qq, 3);
        u64 n = 2 + rng() % 50;
        std::size_t l = 3 + rng() % 6;
        auto got = power_top_coeffs(q, n, l);
        auto full = appsdetail::pow_full(q, n);
        for (std::size_t j = 0; j < l; ++j) {
            auto want = full.coeff(std::size_t(full.deg()) - j);
            CHECK(qq.eq(got[j], want));
        }
    }
    CHECK_THROWS(power_top_coeffs(ipoly(qq, {1, 2, 3}), 5, 1));
}

TEST_CASE("inverse_top_coeffs") {
    Rational qq;
    auto g = inverse_top_coeffs(ipoly(qq, {1, -1}), 16, 4);
    for (auto& e : g) CHECK(qq.eq(e, qq.one()));

    auto fibs = inverse_top_coeffs(ipoly(qq, {1, -1, -1}), 16, 3);
    CHECK(qq.eq(fibs[0], qq.from_int(987)));
    CHECK(qq.eq(fibs[1], qq.from_int(610)));
    CHECK(qq.eq(fibs[2], qq.from_int(377)));

    Fp fp(998244353);
    for (int t = 0; t < 12; ++t) {
        auto p = random_poly_unit(fp, 1 + rng() % 4);
        u64 n = 16 + rng() % 497;
        std::size_t l = std::size_t(p.deg()) + rng() % 12;
        if (l > n) l = std::size_t(n);
        auto got = inverse_top_coeffs(p, n, l);
        auto full = newton_inverse(p, std::size_t(n));
        for (std::size_t j = 0; j < l; ++j) CHECK(fp.eq(got[j], full.coeff(std::size_t(n) - 1 - j)));
    }
    CHECK_THROWS_AS(inverse_top_coeffs(ipoly(qq, {0, 1}), 8, 2), ConstantTermNotInvertible);
}

TEST_CASE("power_coeffs_at") {
    Rational qq;
    auto b = power_coeffs_at(ipoly(qq, {1, 1}), 10, {3});
    CHECK(qq.eq(b[0], qq.from_int(120)));  // C(10,3)

    auto c = power_coeffs_at(ipoly(qq, {5}), 3, {0, 1, 4});
    CHECK(qq.eq(c[0], qq.from_int(125)));
    CHECK(qq.eq(c[1], qq.zero()));
    CHECK(qq.eq(c[2], qq.zero()));

    for (int t = 0; t < 8; ++t) {
        auto p = random_poly_unit(qq, 3);
        u64 m = 2 + rng() % 8;
        auto full = appsdetail::pow_full(p, m);
        IndexSet idx;
        for (u64 i = 0; i <= u64(full.deg()) + 2; ++i) idx.push_back(i);
        auto got = power_coeffs_at(p, m, idx);
        for (std::size_t i = 0; i < idx.size(); ++i) CHECK(qq.eq(got[i], full.coeff(idx[i])));
    }

    // valuation handling: p(0) == 0 factors out the power of X
    auto shifted = power_coeffs_at(ipoly(qq, {0, 1, 1}), 5, {4, 5, 7, 10});  // (X+X^2)^5
    auto full = appsdetail::pow_full(ipoly(qq, {0, 1, 1}), 5);
    CHECK(qq.eq(shifted[0], full.coeff(4)));
    CHECK(qq.eq(shifted[1], full.coeff(5)));
    CHECK(qq.eq(shifted[2], full.coeff(7)));
    CHECK(qq.eq(shifted[3], full.coeff(10)));

    // binomial row at scale, against exact binomials
    auto row = power_coeffs_at(ipoly(qq, {1, 1}), 60, {0, 17, 31, 59, 60});
    mpz_class bin;
    mpz_bin_uiui(bin.get_mpz_t(), 60, 17);
    CHECK(qq.eq(row[1], mpq_class(bin)));
    mpz_bin_uiui(bin.get_mpz_t(), 60, 31);
    CHECK(qq.eq(row[2], mpq_class(bin)));
    CHECK(qq.eq(row[4], qq.one()));
}

TEST_CASE("inverse_coeff_range") {
    Rational qq;
    auto g = inverse_coeff_range(ipoly(qq, {1, -1}), 100, 3);
    for (auto& e : g) CHECK(qq.eq(e, qq.one()));

    auto f = inverse_coeff_range(ipoly(qq, {1, -1, -1}), 10, 1);
    CHECK(qq.eq(f[0], qq.from_int(89)));

    Fp fp(1000000007);
    for (int t = 0; t < 8; ++t) {
        auto p = random_poly_unit(fp, 4);
        u64 n = 100 + rng() % 500;
        std::size_t l = 1 + rng() % 6;
        auto got = inverse_coeff_range(p, n, l);
        auto full = newton_inverse(p, std::size_t(n) + l);
        for (std::size_t j = 0; j < l; ++j) CHECK(fp.eq(got[j], full.coeff(std::size_t(n) + j)));
    }
}

TEST_CASE("mixed_coeffs") {
    Rational qq;
    // (1+X)^2 / (1-X) at 0..3 -> 1, 3, 4, 4
    auto got = mixed_coeffs_inverse(ipoly(qq, {1, 1}), 2, ipoly(qq, {1, -1}), {0, 1, 2, 3});
    CHECK(qq.eq(got[0], qq.from_int(1)));
    CHECK(qq.eq(got[1], qq.from_int(3)));
    CHECK(qq.eq(got[2], qq.from_int(4)));
    CHECK(qq.eq(got[3], qq.from_int(4)));

    auto two = mixed_coeffs_powers(ipoly(qq, {1, 1}), 1, ipoly(qq, {1, 1}), 1, {1});
    CHECK(qq.eq(two[0], qq.from_int(2)));

    // random small instance against truncated series arithmetic
    for (int t = 0; t < 3; ++t) {
        auto p = random_poly_unit(qq, 2);
        auto q = random_poly_unit(qq, 2);
        u64 m1 = 1 + rng() % 5;
        IndexSet idx;
        for (u64 i = 0; i <= 30; ++i) idx.push_back(i);
        auto vals = mixed_coeffs_inverse(p, m1, q, idx);
        auto series = trunc_high(poly_mul(appsdetail::pow_trunc(p, m1, 31), newton_inverse(q, 31)), 31);
        for (std::size_t i = 0; i < idx.size(); ++i) CHECK(qq.eq(vals[i], series.coeff(idx[i])));
    }
    for (int t = 0; t < 2; ++t) {
        auto p1 = random_poly_unit(qq, 2);
        auto p2 = random_poly_unit(qq, 2);
        u64 m1 = 1 + rng() % 4, m2 = 1 + rng() % 4;
        IndexSet idx = {0, 3, 7, 11, 19, 24};
        auto vals = mixed_coeffs_powers(p1, m1, p2, m2, idx);
        auto prod = poly_mul(appsdetail::pow_full(p1, m1), appsdetail::pow_full(p2, m2));
        for (std::size_t i = 0; i < idx.size(); ++i) CHECK(qq.eq(vals[i], prod.coeff(idx[i])));
    }
}

TEST_CASE("power_coeffs_at reconstructs the whole power") {
    Fp fp(998244353);
    auto p = random_poly_unit(fp, 4);
    u64 m = 12;
    auto full = appsdetail::pow_full(p, m);
    IndexSet idx;
    for (u64 i = 0; i <= u64(full.deg()); ++i) idx.push_back(i);
    auto got = power_coeffs_at(p, m, idx);
    for (std::size_t i = 0; i < idx.size(); ++i) CHECK(fp.eq(got[i], full.coeff(idx[i])));
}
