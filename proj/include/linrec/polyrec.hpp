#ifndef LINREC_POLYREC_HPP
#define LINREC_POLYREC_HPP

#include <algorithm>
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "linrec/companion.hpp"
#include "linrec/constrec.hpp"
#include "linrec/matrix.hpp"
#include "linrec/poly.hpp"

// Baby-step/giant-step evaluation of matrix factorials
//     prod_{j=1}^{n} A(j)   (A(n) leftmost)
// for a k x k matrix A(N) with polynomial entries.  The giant-step
// polynomial C(N) = A(N+nu)...A(N+1) is represented by its values at
// nu*d+1 consecutive integers, produced by multipoint evaluation of A
// (step alpha) and prefix/suffix window products (step beta).  Its values
// on the nu-grid 0, nu, 2nu, ... come from step-doubling Lagrange shifts
// of that value vector, one convolution per halving, which keeps the
// whole pipeline output-sensitive.  Endpoints that do not land on the
// grid are resolved by the halving cascade C_{nu/2}, C_{nu/4}, ..., C_1,
// interpolated once and then Horner-evaluated per request.

namespace linrec {

enum class ApplyMode { General, Vector, Companion, CompanionRestricted };

struct BsgsPlan {
    u64 nu = 1;   // giant-step size, always a power of 2
    u64 n = 0;    // largest index served
    u64 d = 1;    // effective coefficient degree (>= 1)
    u64 ell = 1;  // request count
    ApplyMode mode = ApplyMode::General;
};

// largest power of 2 whose square times d stays within n; switches to a
// power of 2 near n/ell once the request count passes sqrt(n*d)
inline BsgsPlan choose_nu(u64 n, u64 d, u64 ell, ApplyMode mode = ApplyMode::General) {
    if (n < 1 || d < 1 || ell < 1) throw Error("choose_nu: parameters must be positive");
    BsgsPlan plan;
    plan.n = n;
    plan.d = d;
    plan.ell = ell;
    plan.mode = mode;
    const u64 deff = mode == ApplyMode::CompanionRestricted ? 1 : d;
    u64 cap = 1;
    while (kern::u128(cap) * cap * 4 * deff <= n) cap *= 2;
    if (mpz_class(ell) * ell <= mpz_class(n) * d) {
        plan.nu = cap;
    } else {
        u64 target = std::max<u64>(n / ell, 1);
        u64 nu = 1;
        while (nu * 2 <= target) nu *= 2;
        plan.nu = std::min(nu, cap);
    }
    return plan;
}

using Interval = std::pair<u64, u64>;
using IntervalSet = std::vector<Interval>;

inline void validate_intervals(const IntervalSet& iv) {
    for (std::size_t i = 0; i < iv.size(); ++i) {
        if (iv[i].first > iv[i].second) throw Error("interval with m > n");
        if (i > 0 && iv[i - 1].first > iv[i].first)
            throw Error("intervals must be sorted by lower endpoint");
    }
}

template <class D>
struct ApplyOutcome {
    std::vector<Vec<D>> values;
    bool fell_back = false;  // companion mode hit a non-invertible factor
};

// below this index everything iterates; BSGS constants dominate tiny n
constexpr u64 kIterationThreshold = 256;

namespace bsgsdetail {

// Values of a degree-<=D polynomial at integer-normalized nodes 0..D ->
// its values at nodes s..s+D, by one Lagrange-weight convolution against
// the kernel 1/(s-D+r).  All node-independent pieces (weights, kernel
// inverses, node prefactors, and over prime fields the kernel transform)
// are built once and reused per application.
template <class D>
class ShiftPlan {
  public:
    using Elem = typename D::Elem;

    ShiftPlan(const D& dom, std::size_t dd, u64 s) : dom_(dom), dd_(dd), s_(s) {
        if (!char_at_least(dom, s + dd + 1))
            throw CharacteristicTooSmall("shift plan: characteristic below shifted node range");
        auto invf = inv_factorial_table(dom, dd + 1);
        w_.resize(dd + 1);
        for (std::size_t i = 0; i <= dd; ++i) {
            w_[i] = dom.mul(invf[i], invf[dd - i]);
            if ((dd - i) & 1) w_[i] = dom.neg(w_[i]);
        }
        std::vector<Elem> nodes(2 * dd + 1, dom.zero());
        for (std::size_t r = 0; r <= 2 * dd; ++r) nodes[r] = dom.from_uint(s - dd + r);
        g_ = batch_inverse(dom, nodes);
        pref_.resize(dd + 1);
        auto pref = dom.one();
        for (std::size_t t = 0; t <= dd; ++t) pref = dom.mul(pref, dom.from_uint(s - t));
        pref_[0] = pref;
        for (std::size_t j = 1; j <= dd; ++j)
            pref_[j] = dom.mul(dom.mul(pref_[j - 1], dom.from_uint(s + j)), g_[j - 1]);
        if constexpr (std::is_same_v<D, Fp>) {
            // cyclic length: 2dd when that is a power of two (two wrap
            // fixups at the window edges), else the next power of two
            // above 2dd+1 (no wraps)
            std::size_t want = std::has_single_bit(dd) ? 2 * dd : std::bit_ceil(2 * dd + 1);
            if (dd >= polydetail::kSchoolbookThreshold &&
                polydetail::ntt_capable_lg(dom.modulus(), want) >= 0 &&
                (std::size_t(1) << std::countr_zero(want)) == want) {
                cyc_.emplace(dom, want, g_);
            }
        }
    }

    // v -> values at s..s+D
    std::vector<Elem> apply(const std::vector<Elem>& v) const {
        std::vector<Elem> u(dd_ + 1, dom_.zero());
        for (std::size_t i = 0; i <= dd_; ++i) u[i] = dom_.mul(v[i], w_[i]);
        std::vector<Elem> out(dd_ + 1, dom_.zero());
        if constexpr (std::is_same_v<D, Fp>) {
            if (cyc_) {
                const std::size_t L = cyc_->length();
                auto wrap = cyc_->apply(u);
                const bool fix = L == 2 * dd_;  // window edges wrapped
                for (std::size_t j = 0; j <= dd_; ++j) out[j] = wrap[(dd_ + j) & (L - 1)];
                if (fix) {
                    out[0] = dom_.sub(out[0], dom_.mul(u[dd_], g_[2 * dd_]));
                    out[dd_] = dom_.sub(out[dd_], dom_.mul(u[0], g_[0]));
                }
                for (std::size_t j = 0; j <= dd_; ++j) out[j] = dom_.mul(out[j], pref_[j]);
                return out;
            }
        }
        auto conv = polydetail::conv_full(dom_, u, g_);
        for (std::size_t j = 0; j <= dd_; ++j) out[j] = dom_.mul(conv[dd_ + j], pref_[j]);
        return out;
    }

  private:
    D dom_;
    std::size_t dd_;
    u64 s_;
    std::vector<Elem> w_;
    std::vector<Elem> g_;
    std::vector<Elem> pref_;
    std::optional<polydetail::CyclicConvFp> cyc_;
};

template <class D>
std::vector<typename D::Elem> shift_eval(const D& dom, const std::vector<typename D::Elem>& v, u64 s) {
    if (v.size() <= 1) return v;
    return ShiftPlan<D>(dom, v.size() - 1, s).apply(v);
}

// scalar values C(0..D) on unit nodes -> C(0), C(nu), ..., C((count-1)*nu):
// halve the sampling rate log2(nu) times (shift + subsample), then extend
// along the grid in blocks of D+1 while more values are needed
template <class D>
class GridPlan {
  public:
    using Elem = typename D::Elem;

    GridPlan(const D& dom, std::size_t dd, u64 nu, std::size_t count) : dom_(dom), dd_(dd), nu_(nu), count_(count) {
        if (dd > 0 && nu > 1) halver_.emplace(dom, dd, dd + 1);
        if (dd > 0) {
            for (u64 s = dd + 1; s < count; s += dd + 1) extenders_.emplace_back(dom, dd, s);
        }
    }

    std::vector<Elem> run(std::vector<Elem> cur) const {
        if (dd_ > 0) {
            for (u64 sigma = 1; sigma < nu_; sigma *= 2) {
                auto ext = halver_->apply(cur);  // nodes D+1 .. 2D+1
                for (std::size_t i = 1; i <= dd_; ++i) cur[i] = 2 * i <= dd_ ? cur[2 * i] : ext[2 * i - dd_ - 1];
            }
        }
        std::size_t which = 0;
        std::vector<Elem> head(cur.begin(), cur.begin() + std::ptrdiff_t(dd_ + 1));
        while (cur.size() < count_) {
            auto ext = dd_ == 0 ? std::vector<Elem>(1, cur[0]) : extenders_[which++].apply(head);
            cur.insert(cur.end(), ext.begin(), ext.end());
        }
        cur.resize(count_, dom_.zero());
        return cur;
    }

  private:
    D dom_;
    std::size_t dd_;
    u64 nu_;
    std::size_t count_;
    std::optional<ShiftPlan<D>> halver_;
    std::vector<ShiftPlan<D>> extenders_;
};

template <class D>
std::vector<typename D::Elem> grid_from_unit_values(const D& dom, std::vector<typename D::Elem> cur, u64 nu,
                                                    std::size_t count) {
    return GridPlan<D>(dom, cur.size() - 1, nu, count).run(std::move(cur));
}

template <class D>
class Engine {
  public:
    using Elem = typename D::Elem;

    explicit Engine(const PolyMatrix<D>& a) : dom_(a.dom), k_(a.k), mono_(a), newton_(a.dom, a.k) {
        deg_ = std::max<std::int64_t>(a.max_entry_deg(), 0);
        for (std::size_t i = 0; i < k_ * k_; ++i) {
            const auto& p = a.e[i];
            newton_.e[i] = p.deg() < 1 ? p : to_newton(p, dom_.one(), dom_.one());
        }
        comp_ = detect_companion(a);
        restricted_ok_ = false;
        if (comp_) {
            restricted_ok_ = true;
            for (std::size_t j = 0; j < k_; ++j)
                if (comp_->top[j].deg() > std::int64_t(j) + 1) restricted_ok_ = false;
        }
    }

    const D& dom() const { return dom_; }
    std::size_t k() const { return k_; }
    u64 entry_deg() const { return u64(deg_); }
    bool companion_form() const { return comp_.has_value(); }
    bool restricted_ok() const { return restricted_ok_; }

    Mat<D> value_at(std::int64_t j) const {
        Mat<D> m(dom_, k_);
        auto x = dom_.from_int(j);
        for (std::size_t i = 0; i < k_ * k_; ++i) m.a[i] = poly_eval(newton_.e[i], x);
        return m;
    }

    // prod_{j=lo}^{hi} A(j), inclusive, by iteration
    Mat<D> iterate_range(std::int64_t lo, std::int64_t hi) const {
        Mat<D> acc = Mat<D>::identity(dom_, k_);
        for (std::int64_t j = lo; j <= hi; ++j) acc = mat_mul(value_at(j), acc);
        return acc;
    }

    // ---- pipeline pieces -------------------------------------------------

    // step alpha: values A(base+1) .. A(base+count)
    std::vector<Mat<D>> alpha_values(u64 base, std::size_t count) const {
        std::vector<Mat<D>> vals(count, Mat<D>(dom_, k_));
        auto start = dom_.from_uint(base + 1);
        for (std::size_t i = 0; i < k_ * k_; ++i) {
            const auto& p = base == 0 ? newton_.e[i] : mono_.e[i];
            if (p.is_zero()) continue;
            auto col = eval_progression(p, start, dom_.one(), count);
            for (std::size_t j = 0; j < count; ++j) vals[j].a[i] = std::move(col[j]);
        }
        return vals;
    }

    // step beta: windows W[i] = V[i+nu]*...*V[i+1] (1-based local indexing
    // into vals), from per-block suffix and prefix products
    std::vector<Mat<D>> beta_general(const std::vector<Mat<D>>& vals, u64 nu, std::size_t wins) const {
        std::vector<Mat<D>> out;
        out.reserve(wins);
        auto val = [&](u64 j) -> const Mat<D>& { return vals[j - 1]; };
        const std::size_t blocks = std::size_t((wins - 1) / nu) + 2;
        std::vector<std::vector<Mat<D>>> suffix(blocks), prefix(blocks);
        for (std::size_t b = 0; b < blocks; ++b) {
            u64 lo = u64(b) * nu;
            if (lo + nu <= vals.size()) {
                suffix[b].push_back(val(lo + nu));
                for (u64 t = 2; t <= nu; ++t) suffix[b].push_back(mat_mul(suffix[b].back(), val(lo + nu - t + 1)));
            }
            for (u64 o = 1; o <= nu && lo + o <= vals.size(); ++o)
                prefix[b].push_back(o == 1 ? val(lo + 1) : mat_mul(val(lo + o), prefix[b].back()));
        }
        for (std::size_t i = 0; i < wins; ++i) {
            u64 b = u64(i) / nu, o = u64(i) % nu;
            if (o == 0)
                out.push_back(suffix[b][nu - 1]);
            else
                out.push_back(mat_mul(prefix[b + 1][o - 1], suffix[b][nu - o - 1]));
        }
        return out;
    }

    // step beta in companion form: one slide per window, O(k^2) each
    std::vector<Mat<D>> beta_companion(const std::vector<Mat<D>>& vals, u64 nu, std::size_t wins) const {
        std::vector<CompanionMatrix<D>> facs;
        facs.reserve(vals.size());
        for (const auto& v : vals) {
            std::vector<Elem> top(k_, dom_.zero());
            for (std::size_t j = 0; j < k_; ++j) top[j] = v.at(0, j);
            facs.emplace_back(dom_, std::move(top));
        }
        for (std::size_t j = 0; j + 1 < wins; ++j)
            if (!facs[j].invertible()) throw NonInvertibleFactor(j + 1);
        std::vector<Mat<D>> out;
        out.reserve(wins);
        Mat<D> cur = facs[nu - 1].dense();
        for (u64 j = nu - 1; j >= 1; --j) cur = mul_dense_companion(cur, facs[j - 1]);
        out.push_back(cur);
        for (std::size_t i = 0; i + 1 < wins; ++i) {
            cur = mul_companion_dense(facs[i + nu], mul_dense_companion_inv(cur, facs[i], u64(i + 1)));
            out.push_back(cur);
        }
        return out;
    }

    u64 window_deg(u64 span, ApplyMode mode) const {
        u64 plain = span * u64(deg_);
        if (mode == ApplyMode::CompanionRestricted) return std::min(plain, span + k_ - 1);
        return plain;
    }

    // giant-grid values C(0), C(nu), ..., C((count-1)*nu), entry-wise;
    // one shift plan shared by all k^2 entry sequences
    std::vector<Mat<D>> grid_values(const std::vector<Mat<D>>& windows, u64 nu, std::size_t count) const {
        std::vector<Mat<D>> grid(count, Mat<D>(dom_, k_));
        GridPlan<D> plan(dom_, windows.size() - 1, nu, count);
        std::vector<Elem> seq(windows.size(), dom_.zero());
        for (std::size_t e = 0; e < k_ * k_; ++e) {
            for (std::size_t t = 0; t < windows.size(); ++t) seq[t] = windows[t].a[e];
            auto g = plan.run(seq);
            for (std::size_t s = 0; s < count; ++s) grid[s].a[e] = std::move(g[s]);
        }
        return grid;
    }

    // interpolated window polynomial of span s (Newton basis on (0,1))
    PolyMatrix<D> window_poly(const std::vector<Mat<D>>& windows, std::size_t need) const {
        PolyMatrix<D> c(dom_, k_);
        std::vector<Elem> seq(need, dom_.zero());
        for (std::size_t e = 0; e < k_ * k_; ++e) {
            for (std::size_t t = 0; t < need; ++t) seq[t] = windows[t].a[e];
            c.e[e] = interp_progression(dom_, seq, dom_.zero(), dom_.one());
        }
        return c;
    }

    // halving cascade C_s for s = nu/2, nu/4, ..., 1 (optionally also nu),
    // all from the same alpha values
    std::vector<std::pair<u64, PolyMatrix<D>>> cascade(const std::vector<Mat<D>>& vals, u64 nu, ApplyMode mode,
                                                       bool include_top,
                                                       const std::vector<Mat<D>>* top_windows) const {
        std::vector<std::pair<u64, PolyMatrix<D>>> levels;
        if (include_top && top_windows != nullptr)
            levels.emplace_back(nu, window_poly(*top_windows, std::size_t(window_deg(nu, mode)) + 1));
        for (u64 s = nu / 2; s >= 1; s /= 2) {
            std::size_t wins = std::size_t(window_deg(s, mode)) + 1;
            auto w = mode == ApplyMode::Companion || mode == ApplyMode::CompanionRestricted
                         ? beta_companion(vals, s, wins)
                         : beta_general(vals, s, wins);
            levels.emplace_back(s, window_poly(w, wins));
        }
        return levels;
    }

    Mat<D> eval_window_poly(const PolyMatrix<D>& c, std::int64_t x) const {
        return c.eval(dom_.from_int(x));
    }

  private:
    D dom_;
    std::size_t k_;
    PolyMatrix<D> mono_;
    PolyMatrix<D> newton_;
    std::optional<PolyCompanion<D>> comp_;
    std::int64_t deg_ = 0;
    bool restricted_ok_ = false;
};

// engines fall back to iteration below the threshold, when the window
// polynomial would be constant-free of structure, or over inexact domains
// where the Lagrange-shift weights are not representable
template <class D>
bool must_iterate(const Engine<D>& eng, u64 n) {
    if (n < kIterationThreshold) return true;
    u64 d = std::max<u64>(eng.entry_deg(), 1);
    if (!D::exact && eng.entry_deg() >= 1) return true;
    u64 lg = std::bit_width(d) - 1;
    return n < d * lg * lg;
}

}  // namespace bsgsdetail

// ---- public operations -----------------------------------------------------

// C(N) = A(N+nu)*...*A(N+1), exact, monomial basis; the stated degree
// bound is nu * (strict entry degree bound)
template <class D>
PolyMatrix<D> giant_step_poly(const PolyMatrix<D>& a, u64 nu, u64 base = 0) {
    if (nu == 0) throw Error("giant_step_poly: nu must be positive");
    bsgsdetail::Engine<D> eng(a);
    const D& dom = a.dom;
    u64 dd = eng.entry_deg() * nu;  // deg C <= nu * entry_deg
    std::size_t wins = std::size_t(dd) + 1;
    std::size_t cnt = wins + nu - 1;
    if (!char_at_least(dom, base + 2 * cnt + 2))
        throw CharacteristicTooSmall("giant_step_poly: characteristic too small for the node range");
    auto vals = eng.alpha_values(base, cnt);
    auto wmats = eng.beta_general(vals, nu, wins);
    PolyMatrix<D> out(dom, a.k);
    std::vector<typename D::Elem> seq(wins, dom.zero());
    for (std::size_t e = 0; e < a.k * a.k; ++e) {
        for (std::size_t t = 0; t < wins; ++t) seq[t] = wmats[t].a[e];
        auto nb = interp_progression(dom, seq, dom.from_uint(base), dom.one());
        out.e[e] = from_newton(nb);
    }
    return out;
}

// prod_{j=1}^{n} A(j); identity for n = 0
template <class D>
Mat<D> matrix_factorial(const PolyMatrix<D>& a, u64 n) {
    bsgsdetail::Engine<D> eng(a);
    if (n == 0) return Mat<D>::identity(a.dom, a.k);
    if (bsgsdetail::must_iterate(eng, n)) return eng.iterate_range(1, std::int64_t(n));
    const D& dom = a.dom;
    u64 d = std::max<u64>(eng.entry_deg(), 1);
    BsgsPlan plan = choose_nu(n, d, 1);
    const u64 nu = plan.nu;
    u64 dd = eng.window_deg(nu, ApplyMode::General);
    std::size_t wins = std::size_t(dd) + 1;
    std::size_t big_steps = std::size_t(n / nu);
    if (!char_at_least(dom, 2 * (wins + nu) + 2))
        throw CharacteristicTooSmall("matrix_factorial: characteristic too small for the node range");
    std::vector<Mat<D>> grid;
    if (nu == 1) {
        grid = eng.alpha_values(0, big_steps);  // C_1(s) = A(s+1)
    } else {
        auto vals = eng.alpha_values(0, wins + nu - 1);
        auto windows = eng.beta_general(vals, nu, wins);
        grid = eng.grid_values(windows, nu, big_steps);
    }
    Mat<D> acc = Mat<D>::identity(dom, a.k);
    for (std::size_t s = 0; s < big_steps; ++s) acc = mat_mul(grid[s], acc);
    for (u64 j = u64(big_steps) * nu + 1; j <= n; ++j) acc = mat_mul(eng.value_at(std::int64_t(j)), acc);
    return acc;
}

namespace bsgsdetail {

// ordered product tree over the leaf segments between sorted endpoints;
// query(ra, sa) returns C~_{sa-1} * ... * C~_{ra}
template <class D>
class RangeTree {
  public:
    RangeTree(const D& dom, std::size_t k, const std::vector<u64>& endpoints, const std::vector<Mat<D>>& grid)
        : dom_(dom), k_(k), ends_(endpoints) {
        std::size_t leaves = ends_.size() > 1 ? ends_.size() - 1 : 0;
        size_ = 1;
        while (size_ < std::max<std::size_t>(leaves, 1)) size_ *= 2;
        nodes_.assign(2 * size_, Mat<D>::identity(dom_, k_));
        for (std::size_t j = 0; j < leaves; ++j) {
            Mat<D> acc = Mat<D>::identity(dom_, k_);
            for (u64 t = ends_[j]; t < ends_[j + 1]; ++t) acc = mat_mul(grid[t], acc);
            nodes_[size_ + j] = std::move(acc);
        }
        for (std::size_t i = size_; i-- > 1;) nodes_[i] = mat_mul(nodes_[2 * i + 1], nodes_[2 * i]);
    }

    Mat<D> query(u64 ra, u64 sa) const {
        std::size_t lo = leaf_of(ra), hi = leaf_of(sa);  // leaf range [lo, hi)
        Mat<D> left = Mat<D>::identity(dom_, k_);
        Mat<D> right = Mat<D>::identity(dom_, k_);
        std::size_t l = lo + size_, r = hi + size_;
        while (l < r) {
            // low-side pieces ascend in position, so each lands left of `left`;
            // high-side pieces descend, landing right of `right`
            if (l & 1) left = mat_mul(nodes_[l++], left);
            if (r & 1) right = mat_mul(right, nodes_[--r]);
            l >>= 1;
            r >>= 1;
        }
        return mat_mul(right, left);
    }

  private:
    std::size_t leaf_of(u64 e) const {
        return std::size_t(std::lower_bound(ends_.begin(), ends_.end(), e) - ends_.begin());
    }
    D dom_;
    std::size_t k_;
    std::vector<u64> ends_;
    std::size_t size_ = 1;
    std::vector<Mat<D>> nodes_;
};

// apply the halving cascade on the right: extend cover (.., cur] upward by gap
template <class D>
void cascade_right(const Engine<D>& eng, const std::vector<std::pair<u64, PolyMatrix<D>>>& levels, Mat<D>& acc,
                   std::int64_t cur, u64 gap) {
    for (const auto& [s, poly] : levels) {
        while (gap >= s) {  // multiple hits only possible at the top level
            acc = mat_mul(eng.eval_window_poly(poly, cur), acc);
            cur += std::int64_t(s);
            gap -= s;
        }
    }
}

template <class D>
void cascade_right_vec(const Engine<D>& eng, const std::vector<std::pair<u64, PolyMatrix<D>>>& levels,
                       Vec<D>& vec, std::int64_t cur, u64 gap) {
    for (const auto& [s, poly] : levels) {
        while (gap >= s) {
            vec = mat_vec(eng.eval_window_poly(poly, cur), vec);
            cur += std::int64_t(s);
            gap -= s;
        }
    }
}

// extend cover [hi+1, ..) downward by gap factors, multiplying on the right
template <class D>
void cascade_left(const Engine<D>& eng, const std::vector<std::pair<u64, PolyMatrix<D>>>& levels, Mat<D>& acc,
                  std::int64_t hi, u64 gap) {
    for (const auto& [s, poly] : levels) {
        while (gap >= s) {
            acc = mat_mul(acc, eng.eval_window_poly(poly, hi - std::int64_t(s)));
            hi -= std::int64_t(s);
            gap -= s;
        }
    }
}

}  // namespace bsgsdetail

// B_i = prod_{j=m_i}^{n_i} A(j) for every interval, inclusive on both ends
template <class D>
std::vector<Mat<D>> multi_products(const PolyMatrix<D>& a, const IntervalSet& intervals) {
    validate_intervals(intervals);
    bsgsdetail::Engine<D> eng(a);
    const D& dom = a.dom;
    std::vector<Mat<D>> out;
    out.reserve(intervals.size());
    if (intervals.empty()) return out;
    u64 n = 0;
    for (const auto& iv : intervals) n = std::max(n, iv.second);
    if (bsgsdetail::must_iterate(eng, n)) {
        for (const auto& iv : intervals)
            out.push_back(eng.iterate_range(std::int64_t(iv.first), std::int64_t(iv.second)));
        return out;
    }
    u64 d = std::max<u64>(eng.entry_deg(), 1);
    BsgsPlan plan = choose_nu(n, d, intervals.size());
    const u64 nu = plan.nu;
    u64 dd = eng.window_deg(nu, ApplyMode::General);
    std::size_t wins = std::size_t(dd) + 1;
    std::size_t big = std::size_t(n / nu);
    if (!char_at_least(dom, 2 * (wins + nu) + 2))
        throw CharacteristicTooSmall("multi_products: characteristic too small for the node range");
    std::vector<Mat<D>> grid;
    std::vector<std::pair<u64, PolyMatrix<D>>> levels;
    if (nu == 1) {
        grid = eng.alpha_values(0, big);
        auto vals = eng.alpha_values(0, wins);
        auto windows = eng.beta_general(vals, 1, wins);
        levels.emplace_back(1, eng.window_poly(windows, wins));
    } else {
        auto vals = eng.alpha_values(0, wins + nu - 1);
        auto windows = eng.beta_general(vals, nu, wins);
        grid = eng.grid_values(windows, nu, big);
        levels = eng.cascade(vals, nu, ApplyMode::General, /*include_top=*/true, &windows);
    }

    std::vector<u64> ends;
    for (const auto& iv : intervals) {
        u64 mt = (iv.first + nu - 1) / nu;  // ceil(m/nu) in grid strides
        u64 st = iv.second / nu;
        if (mt <= st) {
            ends.push_back(mt);
            ends.push_back(st);
        }
    }
    std::sort(ends.begin(), ends.end());
    ends.erase(std::unique(ends.begin(), ends.end()), ends.end());
    bsgsdetail::RangeTree<D> tree(dom, a.k, ends, grid);

    for (const auto& iv : intervals) {
        u64 m = iv.first, nn = iv.second;
        u64 mt = (m + nu - 1) / nu, st = nn / nu;
        if (mt > st) {
            // interval inside one stride: pure right-cascade from m-1
            Mat<D> acc = Mat<D>::identity(dom, a.k);
            bsgsdetail::cascade_right(eng, levels, acc, std::int64_t(m) - 1, nn - m + 1);
            out.push_back(std::move(acc));
            continue;
        }
        Mat<D> acc = tree.query(mt, st);  // product over (mt*nu, st*nu]
        bsgsdetail::cascade_right(eng, levels, acc, std::int64_t(st * nu), nn - st * nu);
        bsgsdetail::cascade_left(eng, levels, acc, std::int64_t(mt * nu), mt * nu - m + 1);
        out.push_back(std::move(acc));
    }
    return out;
}

// P_i = (prod_{j=1}^{n_i} A(j)) * P0 for every index
template <class D>
ApplyOutcome<D> multi_apply(const PolyMatrix<D>& a, const Vec<D>& p0, const IndexSet& indices,
                            ApplyMode mode = ApplyMode::Vector) {
    validate_index_set(indices);
    if (p0.size() != a.k) throw DimensionMismatch();
    bsgsdetail::Engine<D> eng(a);
    const D& dom = a.dom;
    ApplyOutcome<D> res;
    if (indices.empty()) return res;
    if ((mode == ApplyMode::Companion || mode == ApplyMode::CompanionRestricted) && !eng.companion_form())
        throw Error("multi_apply: companion mode requires a companion-form matrix");
    if (mode == ApplyMode::CompanionRestricted && !eng.restricted_ok())
        throw Error("multi_apply: restricted mode requires deg(f_j) <= j");
    const u64 n = indices.back();

    if (bsgsdetail::must_iterate(eng, n)) {
        Vec<D> v = p0;
        std::size_t next = 0;
        for (u64 j = 0; j <= n && next < indices.size(); ++j) {
            if (j > 0) v = mat_vec(eng.value_at(std::int64_t(j)), v);
            while (next < indices.size() && indices[next] == j) res.values.push_back(v), ++next;
        }
        return res;
    }

    u64 d = std::max<u64>(eng.entry_deg(), 1);
    BsgsPlan plan = choose_nu(n, d, indices.size(), mode);
    const u64 nu = plan.nu;
    u64 dd = eng.window_deg(nu, mode);
    std::size_t wins = std::size_t(dd) + 1;
    std::size_t big = std::size_t(n / nu);
    if (!char_at_least(dom, 2 * (wins + nu) + 2))
        throw CharacteristicTooSmall("multi_apply: characteristic too small for the node range");

    ApplyMode eff = mode;
    std::vector<Mat<D>> grid;
    if (nu == 1) {
        grid = eng.alpha_values(0, big);  // C_1(s) = A(s+1)
    } else {
        auto vals = eng.alpha_values(0, wins + nu - 1);
        std::vector<Mat<D>> windows;
        if (mode == ApplyMode::Companion || mode == ApplyMode::CompanionRestricted) {
            try {
                windows = eng.beta_companion(vals, nu, wins);
            } catch (const NonInvertibleFactor&) {
                // fall back to the general scheme, flagged in the result
                res.fell_back = true;
                eff = ApplyMode::Vector;
                if (mode == ApplyMode::CompanionRestricted) {
                    // the nu choice differs in restricted mode; restart cleanly
                    auto again = multi_apply(a, p0, indices, ApplyMode::Vector);
                    again.fell_back = true;
                    return again;
                }
                windows = eng.beta_general(vals, nu, wins);
            }
        } else {
            windows = eng.beta_general(vals, nu, wins);
        }
        grid = eng.grid_values(windows, nu, big);
    }

    // residues: direct baby steps for few indices, halving cascade otherwise
    const bool use_cascade = indices.size() > 16 && nu > 1;
    std::vector<std::pair<u64, PolyMatrix<D>>> levels;
    if (use_cascade) {
        auto vals = eng.alpha_values(0, wins + nu - 1);
        levels = eng.cascade(vals, nu, eff, false, nullptr);
    }

    res.values.reserve(indices.size());
    if (eff == ApplyMode::General) {
        std::vector<Mat<D>> pre(big + 1, Mat<D>::identity(dom, a.k));
        for (std::size_t s = 0; s < big; ++s) pre[s + 1] = mat_mul(grid[s], pre[s]);
        for (u64 ni : indices) {
            u64 t = ni / nu;
            Mat<D> acc = pre[t];
            if (use_cascade)
                bsgsdetail::cascade_right(eng, levels, acc, std::int64_t(t * nu), ni - t * nu);
            else
                for (u64 j = t * nu + 1; j <= ni; ++j) acc = mat_mul(eng.value_at(std::int64_t(j)), acc);
            res.values.push_back(mat_vec(acc, p0));
        }
        return res;
    }

    std::vector<Vec<D>> pre(big + 1, p0);
    for (std::size_t s = 0; s < big; ++s) pre[s + 1] = mat_vec(grid[s], pre[s]);
    for (u64 ni : indices) {
        u64 t = ni / nu;
        Vec<D> v = pre[t];
        if (use_cascade)
            bsgsdetail::cascade_right_vec(eng, levels, v, std::int64_t(t * nu), ni - t * nu);
        else
            for (u64 j = t * nu + 1; j <= ni; ++j) v = mat_vec(eng.value_at(std::int64_t(j)), v);
        res.values.push_back(std::move(v));
    }
    return res;
}

}  // namespace linrec

#endif
