#ifndef LINREC_CONSTREC_HPP
#define LINREC_CONSTREC_HPP

#include <gmpxx.h>

#include <cstdint>
#include <vector>

#include "linrec/companion.hpp"
#include "linrec/poly.hpp"

// Constant-coefficient linear recurrences
//     P_n = a_1 P_{n-1} + a_2 P_{n-2} + ... + a_k P_{n-k}.
// The n-th term comes from the coefficients of X^n mod f with
// f = X^k - (a_1 X^{k-1} + ... + a_k), runs advance that residue one
// multiply-by-X at a time, and batched multi-index evaluation shares
// partial binary-power products across indices.

namespace linrec {

template <class D>
struct ConstRecurrence {
    using Elem = typename D::Elem;
    D dom;
    std::vector<Elem> a;        // a_1..a_k
    std::vector<Elem> initial;  // P_0..P_{k-1}

    ConstRecurrence(D d, std::vector<Elem> coeffs, std::vector<Elem> init)
        : dom(std::move(d)), a(std::move(coeffs)), initial(std::move(init)) {
        if (a.empty() || a.size() != initial.size())
            throw Error("recurrence needs k >= 1 coefficients and exactly k initial terms");
    }

    std::size_t depth() const { return a.size(); }

    // X^k - (a_1 X^{k-1} + ... + a_k), monic of degree k
    DensePoly<D> char_poly() const {
        std::vector<Elem> c(depth() + 1, dom.zero());
        for (std::size_t i = 1; i <= depth(); ++i) c[depth() - i] = dom.neg(a[i - 1]);
        c[depth()] = dom.one();
        return DensePoly<D>(dom, std::move(c));
    }

    CompanionMatrix<D> companion() const { return CompanionMatrix<D>(dom, a); }
};

namespace constdetail {

// scalar product of the residue coefficients with P_0..P_{k-1}
template <class D>
typename D::Elem combine(const ConstRecurrence<D>& rec, const DensePoly<D>& residue) {
    auto acc = rec.dom.zero();
    for (std::size_t i = 0; i < residue.c.size(); ++i)
        acc = rec.dom.add(acc, rec.dom.mul(residue.c[i], rec.initial[i]));
    return acc;
}

// residue -> residue * X mod f in O(k)
template <class D>
void step_residue(const ConstRecurrence<D>& rec, std::vector<typename D::Elem>& g) {
    const D& dom = rec.dom;
    const std::size_t k = rec.depth();
    auto lead = g[k - 1];
    for (std::size_t j = k; j-- > 1;) {
        g[j] = g[j - 1];
        if (!dom.is_zero(lead)) g[j] = dom.add(g[j], dom.mul(lead, rec.a[k - 1 - j]));
    }
    g[0] = dom.is_zero(lead) ? dom.zero() : dom.mul(lead, rec.a[k - 1]);
}

}  // namespace constdetail

template <class D>
typename D::Elem nth_term(const ConstRecurrence<D>& rec, const mpz_class& n) {
    if (n < 0) throw Error("nth_term: negative index");
    if (n < i64(rec.depth())) return rec.initial[n.get_ui()];
    auto residue = powmod(DensePoly<D>::identity_x(rec.dom), n, rec.char_poly());
    return constdetail::combine(rec, residue);
}

// P_n .. P_{n+count-1}: one modular power, then O(k) per further term
template <class D>
std::vector<typename D::Elem> consecutive_terms(const ConstRecurrence<D>& rec, const mpz_class& n,
                                                std::size_t count) {
    if (n < 0) throw Error("consecutive_terms: negative start");
    if (count == 0) return {};
    const D& dom = rec.dom;
    const std::size_t k = rec.depth();
    auto residue = powmod(DensePoly<D>::identity_x(dom), n, rec.char_poly());
    std::vector<typename D::Elem> g(k, dom.zero());
    for (std::size_t i = 0; i < residue.c.size(); ++i) g[i] = residue.c[i];
    std::vector<typename D::Elem> out;
    out.reserve(count);
    for (std::size_t t = 0; t < count; ++t) {
        auto acc = dom.zero();
        for (std::size_t i = 0; i < k; ++i) acc = dom.add(acc, dom.mul(g[i], rec.initial[i]));
        out.push_back(acc);
        if (t + 1 < count) constdetail::step_residue(rec, g);
    }
    return out;
}

// sorted distinct indices
using IndexSet = std::vector<u64>;

inline void validate_index_set(const IndexSet& idx) {
    for (std::size_t i = 1; i < idx.size(); ++i)
        if (idx[i - 1] >= idx[i]) throw Error("index set must be strictly increasing");
}

// Batched multi-index evaluation.  Sweeping bit positions from least
// significant, indices sharing the processed low bits share one partial
// vector; per phase all vectors whose bit is set form the columns of one
// k x batch product against the precomputed binary power.
template <class D>
std::vector<typename D::Elem> multi_terms(const ConstRecurrence<D>& rec, const IndexSet& indices) {
    validate_index_set(indices);
    const D& dom = rec.dom;
    const std::size_t k = rec.depth();
    if (indices.empty()) return {};

    u64 maxn = indices.back();
    int bits = maxn == 0 ? 0 : 64 - std::countl_zero(maxn);

    std::vector<Mat<D>> pow2;  // A^(2^j)
    pow2.push_back(rec.companion().dense());
    for (int j = 1; j < bits; ++j) pow2.push_back(mat_mul(pow2.back(), pow2.back()));

    Vec<D> v0(rec.initial.rbegin(), rec.initial.rend());  // (P_{k-1},...,P_0)

    struct State {
        Vec<D> vec;
        std::vector<std::size_t> members;  // positions into `indices`
    };
    std::vector<State> states;
    {
        State all;
        all.vec = v0;
        all.members.resize(indices.size());
        for (std::size_t i = 0; i < indices.size(); ++i) all.members[i] = i;
        states.push_back(std::move(all));
    }

    for (int j = 0; j < bits; ++j) {
        std::vector<State> next;
        std::vector<std::size_t> pending;  // states in `next` awaiting the batched product
        for (auto& st : states) {
            State zero_child, one_child;
            for (std::size_t pos : st.members)
                ((indices[pos] >> j) & 1 ? one_child : zero_child).members.push_back(pos);
            if (!zero_child.members.empty()) {
                zero_child.vec = st.vec;
                next.push_back(std::move(zero_child));
            }
            if (!one_child.members.empty()) {
                one_child.vec = st.vec;
                next.push_back(std::move(one_child));
                pending.push_back(next.size() - 1);
            }
        }
        if (!pending.empty()) {
            // columns of a k x batch matrix, multiplied once by A^(2^j)
            const Mat<D>& m = pow2[std::size_t(j)];
            std::vector<Vec<D>> cols(pending.size(), Vec<D>(k, dom.zero()));
            for (std::size_t c = 0; c < pending.size(); ++c) {
                const Vec<D>& src = next[pending[c]].vec;
                for (std::size_t r = 0; r < k; ++r)
                    for (std::size_t t = 0; t < k; ++t)
                        cols[c][r] = dom.add(cols[c][r], dom.mul(m.at(r, t), src[t]));
            }
            for (std::size_t c = 0; c < pending.size(); ++c) next[pending[c]].vec = std::move(cols[c]);
        }
        states = std::move(next);
    }

    std::vector<typename D::Elem> out(indices.size(), dom.zero());
    for (const auto& st : states)
        for (std::size_t pos : st.members) out[pos] = st.vec[k - 1];  // bottom entry is P_n
    return out;
}

}  // namespace linrec

#endif
