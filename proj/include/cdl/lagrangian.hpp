#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <numeric>
#include <utility>
#include <vector>

#include "cdl/errors.hpp"
#include "cdl/gf2.hpp"

// Stochastic Lagrangian subspaces of F_2^{2t}: t-dimensional subspaces that
// contain the all-ones vector and on which h(x) - h(y) vanishes mod 4. A
// vector (x, y) is packed into one word as x | (y << t). Zero-defect
// subspaces are graphs {(Ox, x)} of stochastic orthogonal matrices O; the
// permutation matrices among them index the symmetric group block that the
// ordering below puts first.

namespace cdl::lagrangian {

inline uint64_t pack(uint64_t x, uint64_t y, int t) { return x | (y << t); }
inline uint64_t x_part(uint64_t w, int t) { return w & ((uint64_t{1} << t) - 1); }
inline uint64_t y_part(uint64_t w, int t) { return w >> t; }

/// h(x) - h(y) mod 4 of a packed pair.
inline int qq_of_pair(uint64_t w, int t) {
    return (std::popcount(x_part(w, t)) - std::popcount(y_part(w, t))) & 3;
}

/// Polar form of qq: qq(u+v) = qq(u) + qq(v) + 2*beta(u,v) mod 4.
inline int qq_polar(uint64_t u, uint64_t v, int t) {
    return (gf2::dot2(x_part(u, t), x_part(v, t)) + gf2::dot2(y_part(u, t), y_part(v, t))) & 1;
}

struct StochasticOrthogonal {
    int t = 0;
    std::vector<uint64_t> cols;  // column j as a t-bit word

    uint64_t apply(uint64_t x) const {
        uint64_t out = 0;
        uint64_t v = x;
        while (v) {
            const int j = std::countr_zero(v);
            out ^= cols[j];
            v &= v - 1;
        }
        return out;
    }

    bool is_permutation_matrix() const {
        for (uint64_t c : cols)
            if (std::popcount(c) != 1) return false;
        return true;
    }
};

struct StochasticLagrangian {
    int t = 0;
    gf2::F2Subspace space;  // ambient 2t, dim t
    gf2::F2Subspace left_defect, right_defect;
    int left_defect_dim = 0, right_defect_dim = 0;
    bool is_permutation = false;
    std::vector<int> perm;  // images pi(0..t-1); only when is_permutation

    /// Basis rows in RREF order; canonical, used for ordering and equality.
    const std::vector<uint64_t>& encoding() const { return space.basis(); }
};

/// True iff S is t-dimensional, contains the all-ones vector and qq vanishes
/// on the whole space. The quadratic form is certified on the basis plus all
/// pairwise basis sums, which determines it on the span.
inline bool is_stochastic_lagrangian(const gf2::F2Subspace& s) {
    const int amb = s.ambient_dim();
    if (amb % 2 != 0) throw std::invalid_argument("ambient dimension must be even (2t)");
    const int t = amb / 2;
    if (s.dim() != t) return false;
    const uint64_t ones = (amb == 64) ? ~uint64_t{0} : (uint64_t{1} << amb) - 1;
    if (!s.member(ones)) return false;
    const auto& rows = s.basis();
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (qq_of_pair(rows[i], t) != 0) return false;
        for (std::size_t j = i + 1; j < rows.size(); ++j)
            if (qq_of_pair(rows[i] ^ rows[j], t) != 0) return false;
    }
    return true;
}

namespace detail {

/// Kernel of the map c -> sum_i c_i v_i for the given t vectors; returns
/// coefficient vectors c (t-bit words).
inline std::vector<uint64_t> combination_kernel(const std::vector<uint64_t>& vecs, int t) {
    // augmented rows (v_i | e_i), echelon on the v part (lowest-bit pivots)
    std::vector<std::pair<uint64_t, uint64_t>> ech;  // (v, coeff)
    std::vector<uint64_t> kernel;
    for (int i = 0; i < t; ++i) {
        uint64_t v = vecs[i], c = uint64_t{1} << i;
        for (const auto& [ev, ec] : ech) {
            if (ev && ((v >> std::countr_zero(ev)) & 1u)) {
                v ^= ev;
                c ^= ec;
            }
        }
        if (v == 0)
            kernel.push_back(c);
        else
            ech.emplace_back(v, c);
    }
    return kernel;
}

}  // namespace detail

/// (N_left, N_right) with N_left = {x : (x,0) in T}, N_right = {y : (0,y) in T}.
inline std::pair<gf2::F2Subspace, gf2::F2Subspace> defects(const gf2::F2Subspace& space, int t) {
    std::vector<uint64_t> xs, ys;
    for (uint64_t r : space.basis()) {
        xs.push_back(x_part(r, t));
        ys.push_back(y_part(r, t));
    }
    gf2::F2Subspace left(t), right(t);
    for (uint64_t c : detail::combination_kernel(ys, t)) {
        uint64_t x = 0;
        uint64_t m = c;
        while (m) {
            x ^= xs[std::countr_zero(m)];
            m &= m - 1;
        }
        left.insert(x);
    }
    for (uint64_t c : detail::combination_kernel(xs, t)) {
        uint64_t y = 0;
        uint64_t m = c;
        while (m) {
            y ^= ys[std::countr_zero(m)];
            m &= m - 1;
        }
        right.insert(y);
    }
    return {left, right};
}

/// For a zero-defect subspace, the unique O with T = {(Ox, x)}.
inline StochasticOrthogonal graph_matrix(const gf2::F2Subspace& space, int t) {
    // echelonize pairs (y | x) fully on the y part; y-pivots end up at all t
    // positions, so the reduced y parts are the unit vectors
    std::vector<std::pair<uint64_t, uint64_t>> rows;  // (y, x)
    for (uint64_t r : space.basis()) rows.emplace_back(y_part(r, t), x_part(r, t));
    std::vector<std::pair<uint64_t, uint64_t>> ech;
    for (auto [y, x] : rows) {
        for (auto& [ey, ex] : ech)
            if ((y >> std::countr_zero(ey)) & 1u) {
                y ^= ey;
                x ^= ex;
            }
        if (y == 0) throw std::invalid_argument("graph_matrix: right defect is non-trivial");
        for (auto& [ey, ex] : ech)
            if ((ey >> std::countr_zero(y)) & 1u) {
                ey ^= y;
                ex ^= x;
            }
        ech.emplace_back(y, x);
    }
    StochasticOrthogonal o;
    o.t = t;
    o.cols.assign(t, 0);
    for (auto& [y, x] : ech) o.cols[std::countr_zero(y)] = x;
    return o;
}

inline StochasticLagrangian classify(const gf2::F2Subspace& space, int t) {
    StochasticLagrangian out;
    out.t = t;
    out.space = space;
    auto [l, r] = defects(space, t);
    out.left_defect = l;
    out.right_defect = r;
    out.left_defect_dim = l.dim();
    out.right_defect_dim = r.dim();
    out.is_permutation = false;
    if (out.left_defect_dim == 0 && out.right_defect_dim == 0) {
        StochasticOrthogonal o = graph_matrix(space, t);
        if (o.is_permutation_matrix()) {
            out.is_permutation = true;
            out.perm.resize(t);
            for (int j = 0; j < t; ++j) out.perm[j] = std::countr_zero(o.cols[j]);
        }
    }
    return out;
}

/// Graph subspace T_O = {(Ox, x)}.
inline gf2::F2Subspace graph_subspace(const StochasticOrthogonal& o) {
    gf2::F2Subspace s(2 * o.t);
    for (int j = 0; j < o.t; ++j) s.insert(pack(o.cols[j], uint64_t{1} << j, o.t));
    return s;
}

/// T_pi for a permutation given by images.
inline gf2::F2Subspace permutation_subspace(const std::vector<int>& pi) {
    const int t = static_cast<int>(pi.size());
    gf2::F2Subspace s(2 * t);
    for (int j = 0; j < t; ++j) s.insert(pack(uint64_t{1} << pi[j], uint64_t{1} << j, t));
    return s;
}

namespace detail {

inline void enumerate_rec(int t, int depth, int last_pivot, uint64_t pivot_mask, uint64_t row_or,
                          uint64_t xi, std::vector<uint64_t>& rows,
                          const std::vector<uint64_t>& cands,
                          std::vector<gf2::F2Subspace>& out) {
    if (depth == t) {
        if (xi == 0) out.push_back(gf2::F2Subspace::from_rows(rows, 2 * t));
        return;
    }
    std::vector<uint64_t> next;
    for (std::size_t ci = 0; ci < cands.size(); ++ci) {
        const uint64_t w = cands[ci];
        const int p = std::countr_zero(w);
        if (p <= last_pivot) continue;
        if (w & pivot_mask) continue;         // must be reduced against chosen pivots
        if ((row_or >> p) & 1u) continue;     // chosen rows must be clear at the new pivot
        if (2 * t - 1 - p < t - depth - 1) continue;  // not enough pivot room left
        uint64_t xi2 = xi;
        if ((xi2 >> p) & 1u) xi2 ^= w;
        // bits of the all-ones residue at or below p can never be cleared later
        const uint64_t low = (p == 63) ? ~uint64_t{0} : ((uint64_t{1} << (p + 1)) - 1);
        if (xi2 & low) continue;
        next.clear();
        for (uint64_t v : cands)
            if (std::countr_zero(v) > p && qq_polar(v, w, t) == 0) next.push_back(v);
        rows.push_back(w);
        enumerate_rec(t, depth + 1, p, pivot_mask | (uint64_t{1} << p), row_or | w, xi2, rows,
                      next, out);
        rows.pop_back();
    }
}

}  // namespace detail

/// All of Sigma_{t,t} in the canonical order: the t! permutations first in
/// lexicographic order of their image tuples, then the rest sorted by
/// (left defect dimension, basis encoding). The count is
/// prod_{k=0}^{t-2} (2^k + 1).
inline std::vector<StochasticLagrangian> enumerate_sigma(int t) {
    if (t < 1) throw std::invalid_argument("enumerate_sigma: t must be >= 1");
    if (t > 5) throw resource_error("enumerate_sigma: full enumeration supported for t <= 5");
    const uint64_t ones = (uint64_t{1} << (2 * t)) - 1;
    std::vector<uint64_t> pool;
    for (uint64_t v = 1; v <= ones; ++v)
        if (qq_of_pair(v, t) == 0) pool.push_back(v);
    std::vector<gf2::F2Subspace> found;
    std::vector<uint64_t> rows;
    detail::enumerate_rec(t, 0, -1, 0, 0, ones, rows, pool, found);

    std::vector<StochasticLagrangian> perms, rest;
    for (const auto& s : found) {
        StochasticLagrangian e = classify(s, t);
        (e.is_permutation ? perms : rest).push_back(std::move(e));
    }
    std::sort(perms.begin(), perms.end(),
              [](const auto& a, const auto& b) { return a.perm < b.perm; });
    std::sort(rest.begin(), rest.end(), [](const auto& a, const auto& b) {
        if (a.left_defect_dim != b.left_defect_dim) return a.left_defect_dim < b.left_defect_dim;
        return a.encoding() < b.encoding();
    });
    std::vector<StochasticLagrangian> out;
    out.reserve(perms.size() + rest.size());
    for (auto& e : perms) out.push_back(std::move(e));
    for (auto& e : rest) out.push_back(std::move(e));
    return out;
}

/// |Sigma_{t,t}| = prod_{k=0}^{t-2} (2^k + 1).
inline uint64_t sigma_count(int t) {
    uint64_t n = 1;
    for (int k = 0; k <= t - 2; ++k) n *= (uint64_t{1} << k) + 1;
    return n;
}

namespace detail {

inline void enumerate_ot_rec(int t, int j, const std::vector<uint64_t>& pool,
                             std::vector<uint64_t>& cols, std::vector<uint64_t>& ech,
                             uint64_t partial_sum, std::vector<StochasticOrthogonal>& out) {
    const uint64_t ones = (uint64_t{1} << t) - 1;
    if (j == t) {
        if (partial_sum == ones) {
            StochasticOrthogonal o;
            o.t = t;
            o.cols = cols;
            out.push_back(std::move(o));
        }
        return;
    }
    for (uint64_t c : pool) {
        bool ok = true;
        for (int i = 0; i < j && ok; ++i)
            if (gf2::dot2(c, cols[i]) != 0) ok = false;
        if (!ok) continue;
        uint64_t red = c;
        for (uint64_t e : ech)
            if ((red >> std::countr_zero(e)) & 1u) red ^= e;
        if (red == 0) continue;  // dependent column
        cols.push_back(c);
        ech.push_back(red);
        enumerate_ot_rec(t, j + 1, pool, cols, ech, partial_sum ^ c, out);
        ech.pop_back();
        cols.pop_back();
    }
}

}  // namespace detail

/// The stochastic orthogonal group O_t: invertible matrices with every
/// column of weight 1 mod 4, pairwise even column overlaps, and column sum
/// equal to all-ones. For t < 6 these are exactly the permutation matrices.
inline std::vector<StochasticOrthogonal> enumerate_Ot(int t) {
    if (t < 1) throw std::invalid_argument("enumerate_Ot: t must be >= 1");
    if (t > 6) throw resource_error("enumerate_Ot: supported for t <= 6");
    std::vector<uint64_t> pool;
    for (uint64_t c = 1; c < (uint64_t{1} << t); ++c)
        if ((std::popcount(c) & 3) == 1) pool.push_back(c);
    std::vector<StochasticOrthogonal> out;
    std::vector<uint64_t> cols, ech;
    detail::enumerate_ot_rec(t, 0, pool, cols, ech, 0, out);
    return out;
}

/// Zero diagonal, ones elsewhere; lies in O_t exactly when t = 2 mod 4
/// (columns then have weight t-1 = 1 mod 4).
inline StochasticOrthogonal anti_identity(int t) {
    if (t < 2 || ((t - 1) & 3) != 1)
        throw std::invalid_argument("anti_identity: requires t = 2 mod 4");
    const uint64_t ones = (uint64_t{1} << t) - 1;
    StochasticOrthogonal o;
    o.t = t;
    for (int j = 0; j < t; ++j) o.cols.push_back(ones ^ (uint64_t{1} << j));
    return o;
}

}  // namespace cdl::lagrangian
