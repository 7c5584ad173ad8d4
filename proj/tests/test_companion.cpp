#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "linrec/companion.hpp"

using namespace linrec;

namespace {

std::mt19937_64 rng(0xc0137ULL);

template <class D>
CompanionMatrix<D> random_companion(const D& dom, std::size_t k, bool invertible) {
    std::vector<typename D::Elem> top(k, dom.zero());
    for (auto& v : top) v = dom.from_int(i64(rng() % 41) - 20);
    if (invertible && dom.is_zero(top.back())) top.back() = dom.one();
    return CompanionMatrix<D>(dom, std::move(top));
}

// independent oracle: naive dense matrix chain
template <class D>
Mat<D> dense_chain_oracle(const std::vector<CompanionMatrix<D>>& fs) {
    Mat<D> acc = fs[0].dense();
    for (std::size_t i = 1; i < fs.size(); ++i) {
        Mat<D> b = fs[i].dense();
        Mat<D> z(acc.dom, acc.k);
        for (std::size_t r = 0; r < acc.k; ++r)
            for (std::size_t c = 0; c < acc.k; ++c)
                for (std::size_t t = 0; t < acc.k; ++t)
                    z.at(r, c) = acc.dom.add(z.at(r, c), acc.dom.mul(acc.at(r, t), b.at(t, c)));
        acc = z;
    }
    return acc;
}

}  // namespace

TEST_CASE("chain_product examples") {
    Rational qq;
    auto f = random_companion(qq, 3, false);
    CHECK(mat_eq(chain_product<Rational>({f}), f.dense()));

    std::vector<CompanionMatrix<Rational>> facs;
    for (i64 j = 1; j <= 4; ++j) facs.emplace_back(qq, std::vector<mpq_class>{qq.from_int(j)});
    auto m = chain_product(facs);
    CHECK(qq.eq(m.at(0, 0), qq.from_int(24)));

    Fp fp(1000000007);
    std::vector<CompanionMatrix<Fp>> rnd;
    for (int i = 0; i < 5; ++i) rnd.push_back(random_companion(fp, 3, false));
    CHECK(mat_eq(chain_product(rnd), dense_chain_oracle(rnd)));
}

TEST_CASE("chain_product equals blocked equals dense oracle on the grid") {
    Fp fp(998244353);
    Rational qq;
    for (std::size_t k = 1; k <= 4; ++k)
        for (std::size_t m = 1; m <= 10; ++m)
            for (int inst = 0; inst < 5; ++inst) {
                std::vector<CompanionMatrix<Fp>> fs;
                for (std::size_t j = 0; j < m; ++j) fs.push_back(random_companion(fp, k, false));
                auto oracle = dense_chain_oracle(fs);
                CHECK(mat_eq(chain_product(fs), oracle));
                CHECK(mat_eq(chain_product_blocked(fs), oracle));
            }
    // a rational spot check including the non-multiple tail
    std::vector<CompanionMatrix<Rational>> fq;
    for (int j = 0; j < 7; ++j) fq.push_back(random_companion(qq, 3, false));
    CHECK(mat_eq(chain_product_blocked(fq), dense_chain_oracle(fq)));
    std::vector<CompanionMatrix<Rational>> f2;
    for (int j = 0; j < 2; ++j) f2.push_back(random_companion(qq, 2, false));
    CHECK(mat_eq(chain_product_blocked(f2), chain_product(f2)));
}

TEST_CASE("sliding_window_products") {
    Rational qq;
    std::vector<CompanionMatrix<Rational>> facs;
    for (i64 j = 1; j <= 4; ++j) facs.emplace_back(qq, std::vector<mpq_class>{qq.from_int(j)});
    auto wins = sliding_window_products(facs, 2);
    REQUIRE(wins.size() == 3);
    CHECK(qq.eq(wins[0].at(0, 0), qq.from_int(2)));
    CHECK(qq.eq(wins[1].at(0, 0), qq.from_int(6)));
    CHECK(qq.eq(wins[2].at(0, 0), qq.from_int(12)));

    Fp fp(1000000007);
    std::vector<CompanionMatrix<Fp>> fs;
    for (int i = 0; i < 8; ++i) fs.push_back(random_companion(fp, 3, true));
    auto full = sliding_window_products(fs, fs.size());
    REQUIRE(full.size() == 1);
    CHECK(mat_eq(full[0], chain_product(fs)));

    auto w3 = sliding_window_products(fs, 3);
    REQUIRE(w3.size() == 6);
    for (std::size_t i = 0; i < w3.size(); ++i) {
        std::vector<CompanionMatrix<Fp>> seg(fs.begin() + i, fs.begin() + i + 3);
        CHECK(mat_eq(w3[i], dense_chain_oracle(seg)));
    }

    auto bad = fs;
    bad[4].top.back() = fp.zero();
    CHECK_THROWS_AS(sliding_window_products(bad, 3), NonInvertibleFactor);
    try {
        sliding_window_products(bad, 3);
    } catch (const NonInvertibleFactor& e) {
        CHECK(e.index == 4);
    }
}

TEST_CASE("companion inverse closed form") {
    Fp fp(998244353);
    for (int t = 0; t < 40; ++t) {
        std::size_t k = 1 + rng() % 4;
        auto f = random_companion(fp, k, true);
        auto prod = mat_mul(f.dense(), f.inverse_dense());
        CHECK(mat_eq(prod, Mat<Fp>::identity(fp, k)));
        auto prod2 = mat_mul(f.inverse_dense(), f.dense());
        CHECK(mat_eq(prod2, Mat<Fp>::identity(fp, k)));
    }
}

namespace {

// random polynomial companion with deg(f_j) <= j (1-indexed)
PolyCompanion<Rational> random_valid_poly_companion(const Rational& qq, std::size_t k) {
    std::vector<DensePoly<Rational>> top;
    for (std::size_t j = 1; j <= k; ++j) {
        std::vector<mpq_class> c(j + 1, qq.zero());
        for (auto& v : c) v = qq.from_int(i64(rng() % 9) - 4);
        if (qq.is_zero(c.back())) c.back() = qq.one();
        top.emplace_back(qq, std::move(c));
    }
    return PolyCompanion<Rational>(qq, std::move(top));
}

}  // namespace

TEST_CASE("degree pattern of companion products") {
    Rational qq;
    auto f1 = random_valid_poly_companion(qq, 3);
    CHECK(degree_pattern_check(f1.matrix(), 1));

    auto b = f1.matrix();
    for (int i = 0; i < 2; ++i) b = poly_mat_mul(b, random_valid_poly_companion(qq, 3).matrix());
    CHECK(degree_pattern_check(b, 3));

    PolyMatrix<Rational> bad(qq, 2);
    std::vector<mpq_class> deg5(6, qq.one());
    bad.at(1, 0) = DensePoly<Rational>(qq, std::move(deg5));
    CHECK(!degree_pattern_check(bad, 2));  // deg 5 > 2 + 0 - 1
}

TEST_CASE("vector degree propagation through a valid companion") {
    // deg(b_j) <= m - j and valid F imply deg((F b)_j) <= m + 1 - j
    Rational qq;
    const std::size_t k = 4;
    const i64 m = 9;
    auto f = random_valid_poly_companion(qq, k).matrix();
    std::vector<DensePoly<Rational>> bvec;
    for (std::size_t j = 1; j <= k; ++j) {
        std::vector<mpq_class> c(std::size_t(m - i64(j)) + 1, qq.zero());
        for (auto& v : c) v = qq.from_int(i64(rng() % 9) - 4);
        if (qq.is_zero(c.back())) c.back() = qq.one();
        bvec.emplace_back(qq, std::move(c));
    }
    for (std::size_t i = 1; i <= k; ++i) {
        auto acc = DensePoly<Rational>::zero(qq);
        for (std::size_t j = 0; j < k; ++j) acc = poly_add(acc, poly_mul(f.at(i - 1, j), bvec[j]));
        CHECK(acc.deg() <= m + 1 - i64(i));
    }
}
