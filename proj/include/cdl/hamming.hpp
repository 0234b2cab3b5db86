#pragma once

#include <bit>
#include <cmath>
#include <cstdint>
#include <stdexcept>

#include "cdl/errors.hpp"
#include "cdl/gf2.hpp"
#include "cdl/lagrangian.hpp"

// Weight-preservation probabilities. The tight cases (13/16, 7/8, 3/4) must
// be testable as equalities, so counts are kept as exact dyadic rationals
// (numerator over 2^k) and only converted to double at the boundary.

namespace cdl::hamming {

using lagrangian::StochasticLagrangian;
using lagrangian::StochasticOrthogonal;

inline constexpr int max_brute_t = 20;

inline uint64_t binomial(int n, int k) {
    if (k < 0 || k > n) return 0;
    uint64_t r = 1;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

/// Probability that flipping r fixed coordinates of a uniform vector changes
/// the weight by exactly +-1: 2^{-r} C(r+1, (r+1)/2) for odd r, 0 for even.
inline double weight_flip_term(int r) {
    return (r % 2 == 1) ? std::ldexp(static_cast<double>(binomial(r + 1, (r + 1) / 2)), -r) : 0.0;
}

/// 1/2 + 2^{-(r+1)} C(r+1, (r+1)/2) for odd r, 1/2 for even r; monotone
/// decreasing over odd r, and trivially 1 at r = 1.
inline double weight_preservation_bound(int r) { return 0.5 + 0.5 * weight_flip_term(r); }

struct WeightReport {
    uint64_t count = 0;        // numerator
    int log2_denominator = 0;  // denominator 2^k
    double bound = 1.0;
    double flip_term = 0.0;  // the probability term alone (0.625 at r = 5)
    int min_column_weight = 0;
    bool saturated = false;

    double probability() const {
        return std::ldexp(static_cast<double>(count), -log2_denominator);
    }
};

namespace detail {

inline bool invertible_columns(const std::vector<uint64_t>& cols) {
    std::vector<uint64_t> ech;
    for (uint64_t c : cols) {
        for (uint64_t e : ech)
            if ((c >> std::countr_zero(e)) & 1u) c ^= e;
        if (c == 0) return false;
        ech.push_back(c);
    }
    return true;
}

/// Exact dyadic equality count/2^k == num/2^d.
inline bool dyadic_equal(uint64_t count, int k, uint64_t num, int d) {
    using u128 = unsigned __int128;
    return (u128(count) << d) == (u128(num) << k);
}

}  // namespace detail

/// Exact |{y : h(Oy) = h(y)}| / 2^t for any invertible bit matrix, with the
/// bound instantiated at r = the minimum column weight.
inline WeightReport preserve_prob(const StochasticOrthogonal& o) {
    const int t = o.t;
    if (t > max_brute_t) throw resource_error("preserve_prob: brute force limited to t <= 20");
    if (!detail::invertible_columns(o.cols))
        throw std::invalid_argument("preserve_prob: matrix is singular");
    WeightReport rep;
    rep.log2_denominator = t;
    for (uint64_t y = 0; y < (uint64_t{1} << t); ++y)
        if (std::popcount(o.apply(y)) == std::popcount(y)) ++rep.count;
    int r = t + 1;
    for (uint64_t c : o.cols) r = std::min(r, std::popcount(c));
    rep.min_column_weight = r;
    rep.flip_term = weight_flip_term(r);
    rep.bound = weight_preservation_bound(r);
    if (r % 2 == 1) {
        const uint64_t bound_num = (uint64_t{1} << r) + binomial(r + 1, (r + 1) / 2);
        rep.saturated = detail::dyadic_equal(rep.count, t, bound_num, r + 1);
    } else {
        rep.saturated = detail::dyadic_equal(rep.count, t, 1, 1);
    }
    return rep;
}

/// Exact |{(x,y) in T : h(x) = h(y)}| / 2^t; 1 exactly on permutations and
/// at most 7/8 otherwise.
inline WeightReport pair_prob(const StochasticLagrangian& T) {
    const int t = T.t;
    if (t > max_brute_t) throw resource_error("pair_prob: limited to t <= 20");
    WeightReport rep;
    rep.log2_denominator = t;
    for (uint64_t w : T.space.elements())
        if (std::popcount(lagrangian::x_part(w, t)) == std::popcount(lagrangian::y_part(w, t)))
            ++rep.count;
    rep.bound = T.is_permutation ? 1.0 : 0.875;
    rep.saturated = T.is_permutation ? detail::dyadic_equal(rep.count, t, 1, 0)
                                     : detail::dyadic_equal(rep.count, t, 7, 3);
    return rep;
}

/// Pr_{x in N_perp}[h(x) = h(x + n)], exact over the 2^{t - dim N} elements.
/// N only needs to be self-orthogonal here, not a full defect subspace.
inline double defect_shift_prob(const gf2::F2Subspace& n_space, uint64_t n_vec) {
    const int t = n_space.ambient_dim();
    if (t > max_brute_t) throw resource_error("defect_shift_prob: limited to t <= 20");
    if (!n_space.member(n_vec)) throw std::invalid_argument("defect_shift_prob: n_vec not in N");
    const auto nperp = gf2::perp(n_space);
    uint64_t count = 0;
    const auto elems = nperp.elements();
    for (uint64_t x : elems)
        if (std::popcount(x) == std::popcount(x ^ n_vec)) ++count;
    return static_cast<double>(count) / static_cast<double>(elems.size());
}

}  // namespace cdl::hamming
