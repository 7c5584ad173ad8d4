#ifndef LINREC_MATRIX_HPP
#define LINREC_MATRIX_HPP

#include <cstddef>
#include <vector>

#include "linrec/domain.hpp"
#include "linrec/errors.hpp"

namespace linrec {

// small dense k x k matrix, row major
template <class D>
struct Mat {
    using Elem = typename D::Elem;
    D dom;
    std::size_t k = 0;
    std::vector<Elem> a;

    Mat(D d, std::size_t dim) : dom(std::move(d)), k(dim), a(dim * dim, dom.zero()) {}

    static Mat identity(const D& d, std::size_t dim) {
        Mat m(d, dim);
        for (std::size_t i = 0; i < dim; ++i) m.at(i, i) = d.one();
        return m;
    }

    Elem& at(std::size_t i, std::size_t j) { return a[i * k + j]; }
    const Elem& at(std::size_t i, std::size_t j) const { return a[i * k + j]; }
};

template <class D>
using Vec = std::vector<typename D::Elem>;

template <class D>
Mat<D> mat_mul(const Mat<D>& x, const Mat<D>& y) {
    if (x.k != y.k) throw DimensionMismatch();
    const D& dom = x.dom;
    Mat<D> z(dom, x.k);
    for (std::size_t i = 0; i < x.k; ++i)
        for (std::size_t t = 0; t < x.k; ++t) {
            const auto& xv = x.at(i, t);
            if (dom.is_zero(xv)) continue;
            for (std::size_t j = 0; j < x.k; ++j)
                z.at(i, j) = dom.add(z.at(i, j), dom.mul(xv, y.at(t, j)));
        }
    return z;
}

template <class D>
Vec<D> mat_vec(const Mat<D>& x, const Vec<D>& v) {
    if (x.k != v.size()) throw DimensionMismatch();
    const D& dom = x.dom;
    Vec<D> out(x.k, dom.zero());
    for (std::size_t i = 0; i < x.k; ++i)
        for (std::size_t j = 0; j < x.k; ++j) out[i] = dom.add(out[i], dom.mul(x.at(i, j), v[j]));
    return out;
}

template <class D>
bool mat_eq(const Mat<D>& x, const Mat<D>& y) {
    if (x.k != y.k) return false;
    for (std::size_t i = 0; i < x.a.size(); ++i)
        if (!x.dom.eq(x.a[i], y.a[i])) return false;
    return true;
}

}  // namespace linrec

#endif
