#pragma once

#include <Eigen/Dense>
#include <Eigen/SVD>
#include <algorithm>
#include <bit>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numeric>
#include <vector>

#include "cdl/errors.hpp"
#include "cdl/gf2.hpp"
#include "cdl/lagrangian.hpp"

// Dense operators on t copies of a single qubit. Basis state |x> for
// x in F_2^t sits at matrix index x (tensor factor i = bit i), so
// r(T) = sum_{(x,y) in T} |x><y| is a 0/1 matrix indexed directly by the
// packed vectors of the lagrangian module.

namespace cdl::ops {

using DenseOperator = Eigen::MatrixXcd;
using lagrangian::StochasticLagrangian;

inline constexpr int max_dense_t = 12;

inline void check_dense_t(int t) {
    if (t < 1) throw std::invalid_argument("t must be >= 1");
    if (t > max_dense_t) throw resource_error("dense operators limited to t <= 12");
}

inline DenseOperator r_of(const gf2::F2Subspace& space, int t) {
    check_dense_t(t);
    const Eigen::Index dim = Eigen::Index{1} << t;
    DenseOperator m = DenseOperator::Zero(dim, dim);
    for (uint64_t w : space.elements())
        m(static_cast<Eigen::Index>(lagrangian::x_part(w, t)),
          static_cast<Eigen::Index>(lagrangian::y_part(w, t))) += 1.0;
    return m;
}

inline DenseOperator r_of(const StochasticLagrangian& T) { return r_of(T.space, T.t); }

/// Q_T = 2^{-t/2} r(T), normalized to Frobenius norm 1.
inline DenseOperator q_of(const gf2::F2Subspace& space, int t) {
    return std::pow(2.0, -0.5 * t) * r_of(space, t);
}
inline DenseOperator q_of(const StochasticLagrangian& T) { return q_of(T.space, T.t); }

/// Permutation of tensor factors: W_pi |y> = |pi y>, (pi y)_{pi(i)} = y_i.
inline DenseOperator permutation_operator(const std::vector<int>& pi) {
    const int t = static_cast<int>(pi.size());
    check_dense_t(t);
    const Eigen::Index dim = Eigen::Index{1} << t;
    DenseOperator m = DenseOperator::Zero(dim, dim);
    for (uint64_t y = 0; y < static_cast<uint64_t>(dim); ++y) {
        uint64_t x = 0;
        for (int i = 0; i < t; ++i)
            if ((y >> i) & 1u) x |= uint64_t{1} << pi[i];
        m(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(y)) = 1.0;
    }
    return m;
}

/// CSS projector (1/|N|^2) sum_{q,p in N} Z(p) X(q); N = {0} gives the identity.
inline DenseOperator css_projector(const gf2::F2Subspace& n_space, int t) {
    check_dense_t(t);
    if (n_space.ambient_dim() != t) throw std::invalid_argument("css_projector: N must live in F_2^t");
    const Eigen::Index dim = Eigen::Index{1} << t;
    DenseOperator m = DenseOperator::Zero(dim, dim);
    const auto elems = n_space.elements();
    for (uint64_t q : elems)
        for (uint64_t p : elems)
            for (uint64_t x = 0; x < static_cast<uint64_t>(dim); ++x) {
                const uint64_t row = x ^ q;
                const double sign = gf2::dot2(p, row) ? -1.0 : 1.0;
                m(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(x)) += sign;
            }
    return m / static_cast<double>(elems.size() * elems.size());
}

/// Schatten p-norms (p = 1, 2, inf) from singular values.
struct SchattenNorms {
    double trace_norm;
    double frobenius;
    double spectral;
};

inline SchattenNorms schatten_norms(const DenseOperator& a) {
    Eigen::JacobiSVD<DenseOperator> svd(a);
    const auto& s = svd.singularValues();
    return {s.sum(), std::sqrt(s.squaredNorm()), s.size() > 0 ? s(0) : 0.0};
}

/// U^{x t} for a single-qubit gate.
inline DenseOperator tensor_power_1q(const Eigen::Matrix2cd& u, int t) {
    check_dense_t(t);
    DenseOperator m = DenseOperator::Ones(1, 1);
    for (int i = 0; i < t; ++i) {
        DenseOperator next(m.rows() * 2, m.cols() * 2);
        for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b)
                next.block(a * m.rows(), b * m.cols(), m.rows(), m.cols()) = u(a, b) * m;
        m = std::move(next);
    }
    return m;
}

/// Keeps |x><y| components with h(x) = h(y); realizes averaging over the
/// diagonal unitary subgroup.
inline DenseOperator diag_apply(const DenseOperator& a) {
    DenseOperator out = a;
    for (Eigen::Index r = 0; r < a.rows(); ++r)
        for (Eigen::Index c = 0; c < a.cols(); ++c)
            if (std::popcount(static_cast<uint64_t>(r)) != std::popcount(static_cast<uint64_t>(c)))
                out(r, c) = 0.0;
    return out;
}

namespace detail {

inline int cycle_count(const std::vector<int>& pi) {
    const int t = static_cast<int>(pi.size());
    std::vector<bool> seen(t, false);
    int cycles = 0;
    for (int i = 0; i < t; ++i) {
        if (seen[i]) continue;
        ++cycles;
        int j = i;
        while (!seen[j]) {
            seen[j] = true;
            j = pi[j];
        }
    }
    return cycles;
}

inline std::vector<std::vector<int>> all_permutations(int t) {
    std::vector<int> p(t);
    std::iota(p.begin(), p.end(), 0);
    std::vector<std::vector<int>> out;
    do {
        out.push_back(p);
    } while (std::next_permutation(p.begin(), p.end()));
    return out;
}

}  // namespace detail

// Orthogonal projection onto the span of the t! permutation operators (the
// commutant of U(2)^{x t}). Rather than an SVD of the vectorized family, the
// projection is run through the exact permutation Gram matrix
// <W_pi, W_sigma> = 2^{cycles(pi^{-1} sigma)}, pseudo-inverted once; the
// family is rank deficient for t > 2 since the qubit dimension is 2.
class HaarSymmetrizer {
  public:
    explicit HaarSymmetrizer(int t) : t_(t), perms_(detail::all_permutations(t)) {
        if (t > 6) throw resource_error("HaarSymmetrizer: supported for t <= 6");
        const int m = static_cast<int>(perms_.size());
        Eigen::MatrixXd gram(m, m);
        std::vector<int> inv(t), comp(t);
        for (int i = 0; i < m; ++i) {
            for (int k = 0; k < t; ++k) inv[perms_[i][k]] = k;
            for (int j = 0; j < m; ++j) {
                for (int k = 0; k < t; ++k) comp[k] = inv[perms_[j][k]];
                gram(i, j) = std::ldexp(1.0, detail::cycle_count(comp));
            }
        }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gram);
        const double cutoff = 1e-9 * es.eigenvalues().maxCoeff();
        Eigen::VectorXd inv_eigs = es.eigenvalues();
        for (int i = 0; i < m; ++i) inv_eigs(i) = inv_eigs(i) > cutoff ? 1.0 / inv_eigs(i) : 0.0;
        pinv_ = es.eigenvectors() * inv_eigs.asDiagonal() * es.eigenvectors().transpose();
    }

    int t() const { return t_; }
    const std::vector<std::vector<int>>& permutations() const { return perms_; }

    /// P_H[A]: orthogonal projection of A onto the permutation span.
    DenseOperator apply(const DenseOperator& a) const {
        const int m = static_cast<int>(perms_.size());
        Eigen::VectorXcd b(m);
        for (int i = 0; i < m; ++i) b(i) = trace_against(perms_[i], a);
        const Eigen::VectorXcd c = pinv_ * b;
        DenseOperator out = DenseOperator::Zero(a.rows(), a.cols());
        for (int i = 0; i < m; ++i) scatter_add(perms_[i], c(i), out);
        return out;
    }

    /// <Q_T | P_H | Q_T'> through exact subspace intersections:
    /// <W_pi, r(T)> = 2^{dim(T cap T_pi)}.
    double pair_overlap(const StochasticLagrangian& a, const StochasticLagrangian& b) const {
        return std::ldexp(overlap_vector(a).dot(pinv_ * overlap_vector(b)), -t_);
    }

    double overlap(const StochasticLagrangian& T) const { return pair_overlap(T, T); }

  private:
    Eigen::VectorXd overlap_vector(const StochasticLagrangian& T) const {
        const int m = static_cast<int>(perms_.size());
        Eigen::VectorXd b(m);
        for (int i = 0; i < m; ++i) {
            const auto cap = gf2::intersect(T.space, lagrangian::permutation_subspace(perms_[i]));
            b(i) = std::ldexp(1.0, cap.dim());
        }
        return b;
    }

    std::complex<double> trace_against(const std::vector<int>& pi, const DenseOperator& a) const {
        // tr(W_pi^dag A) = sum_y A(pi y, y)
        std::complex<double> s = 0.0;
        for (uint64_t y = 0; y < (uint64_t{1} << t_); ++y) {
            uint64_t x = 0;
            for (int i = 0; i < t_; ++i)
                if ((y >> i) & 1u) x |= uint64_t{1} << pi[i];
            s += a(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(y));
        }
        return s;
    }

    void scatter_add(const std::vector<int>& pi, std::complex<double> coeff,
                     DenseOperator& out) const {
        for (uint64_t y = 0; y < (uint64_t{1} << t_); ++y) {
            uint64_t x = 0;
            for (int i = 0; i < t_; ++i)
                if ((y >> i) & 1u) x |= uint64_t{1} << pi[i];
            out(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(y)) += coeff;
        }
    }

    int t_;
    std::vector<std::vector<int>> perms_;
    Eigen::MatrixXd pinv_;
};

inline DenseOperator haar_apply(int t, const DenseOperator& a) {
    return HaarSymmetrizer(t).apply(a);
}

/// <Q_T|P_H|Q_T> = 2^{-t} ||P_H[r(T)]||_2^2; equals 1 exactly on permutations.
inline double haar_overlap(const StochasticLagrangian& T) {
    return HaarSymmetrizer(T.t).overlap(T);
}

/// Checks r(T) = 2^{dim N} r(O) P_CSS(N) for some O in O_t, with N the right
/// defect space of T. Returns false only if no candidate matches.
inline bool verify_decomposition(const StochasticLagrangian& T, double tol = 1e-10) {
    const DenseOperator target = r_of(T);
    const DenseOperator p_n = css_projector(T.right_defect, T.t);
    const double scale = std::ldexp(1.0, T.right_defect_dim);
    for (const auto& o : lagrangian::enumerate_Ot(T.t)) {
        const DenseOperator cand =
            scale * (r_of(lagrangian::graph_subspace(o), T.t) * p_n);
        if ((cand - target).cwiseAbs().maxCoeff() <= tol) return true;
    }
    return false;
}

}  // namespace cdl::ops
