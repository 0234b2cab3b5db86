#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <vector>

#include "cdl/errors.hpp"
#include "cdl/gf2.hpp"
#include "cdl/lagrangian.hpp"

// Gram algebra of the basis {Q_T^{x n}}. Overlaps are exact powers of two:
// <Q_T^{x n} | Q_T'^{x n}> = 2^{n (dim(T cap T') - t)}, so the model keeps
// the integer exponents alongside the floating Gram matrix and evaluates
// products in the exponent domain where cancellation would otherwise bite.

namespace cdl::commutant {

using lagrangian::StochasticLagrangian;

/// dim(T1 cap T2) - t; the single-copy overlap is 2^{this}, always <= 0.
inline int overlap_exact(const StochasticLagrangian& a, const StochasticLagrangian& b) {
    if (a.t != b.t) throw std::invalid_argument("overlap_exact: mismatched t");
    return gf2::intersect(a.space, b.space).dim() - a.t;
}

/// (-2^{-n}; 2)_{t-1} = prod_{r=0}^{t-2} (1 + 2^{r-n}).
inline double pochhammer_s(int t, int n) {
    if (n < 0) throw std::invalid_argument("pochhammer_s: n must be >= 0");
    double p = 1.0;
    for (int r = 0; r <= t - 2; ++r) p *= 1.0 + std::ldexp(1.0, r - n);
    return p;
}

struct CommutantModel {
    int t = 0;
    int n = 0;
    std::vector<StochasticLagrangian> sigma;
    int perm_count = 0;           // t!, the leading block
    Eigen::MatrixXi gram_log2;    // g(T,T') = dim(T cap T') - t
    Eigen::MatrixXd gram;         // 2^{n g}

    int size() const { return static_cast<int>(sigma.size()); }
};

inline CommutantModel gram(int t, int n) {
    if (n < 1) throw std::invalid_argument("gram: n must be >= 1");
    CommutantModel m;
    m.t = t;
    m.n = n;
    m.sigma = lagrangian::enumerate_sigma(t);
    const int sz = m.size();
    m.perm_count = 0;
    for (const auto& e : m.sigma) m.perm_count += e.is_permutation ? 1 : 0;
    m.gram_log2.resize(sz, sz);
    m.gram.resize(sz, sz);
    for (int i = 0; i < sz; ++i)
        for (int j = i; j < sz; ++j) {
            const int g = overlap_exact(m.sigma[i], m.sigma[j]);
            m.gram_log2(i, j) = m.gram_log2(j, i) = g;
            m.gram(i, j) = m.gram(j, i) = std::ldexp(1.0, n * g);
        }
    return m;
}

/// Largest relative row-sum error against prod_{r=0}^{t-2}(1 + 2^{r-n}).
inline double row_sum_error(const CommutantModel& m) {
    const double target = pochhammer_s(m.t, m.n);
    double worst = 0.0;
    for (int i = 0; i < m.size(); ++i)
        worst = std::max(worst, std::abs(m.gram.row(i).sum() - target) / target);
    return worst;
}

/// Exact integer form of the row-sum identity: multiplying through by
/// 2^{n(t-1)} turns every row sum into sum_T' 2^{n(dim cap - 1)} and the
/// closed form into prod_{r=0}^{t-2}(2^n + 2^r); both sides are compared in
/// 128-bit arithmetic, so a pass is exact, not a tolerance.
inline bool row_sums_exact(const CommutantModel& m) {
    const int t = m.t, n = m.n;
    if (n * (t - 1) + (t - 1) > 126)
        throw resource_error("row_sums_exact: exponents exceed 128-bit range");
    using u128 = unsigned __int128;
    u128 rhs = 1;
    for (int r = 0; r <= t - 2; ++r) rhs *= (u128(1) << n) + (u128(1) << r);
    for (int i = 0; i < m.size(); ++i) {
        u128 lhs = 0;
        for (int j = 0; j < m.size(); ++j) {
            const int e = n * (m.gram_log2(i, j) + t - 1);
            lhs += u128(1) << e;
        }
        if (lhs != rhs) return false;
    }
    return true;
}

/// ||Gamma - 1||_inf (spectral norm; Gamma is symmetric PSD).
inline double frame_operator_deviation(const CommutantModel& m) {
    Eigen::MatrixXd d = m.gram - Eigen::MatrixXd::Identity(m.size(), m.size());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(d, Eigen::EigenvaluesOnly);
    return std::max(std::abs(es.eigenvalues().minCoeff()), std::abs(es.eigenvalues().maxCoeff()));
}

inline double frame_operator_deviation(int t, int n) { return frame_operator_deviation(gram(t, n)); }

inline int gram_rank(const CommutantModel& m, double rel_tol = 1e-12) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m.gram, Eigen::EigenvaluesOnly);
    const double cutoff = rel_tol * es.eigenvalues().maxCoeff();
    int rank = 0;
    for (int i = 0; i < m.size(); ++i)
        if (es.eigenvalues()(i) > cutoff) ++rank;
    return rank;
}

namespace detail {

inline void require_invertible(const CommutantModel& m) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m.gram, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < 1e-12 * es.eigenvalues().maxCoeff())
        throw conditioning_error(
            "Gram matrix is numerically singular (the family is dependent for n < t-1)");
}

}  // namespace detail

/// Dual-basis coefficient matrix Gamma^{-1}: maps Hilbert-Schmidt overlaps
/// b_T = <Q_T^{x n}|A> of a commutant element to its Q-basis coefficients.
inline Eigen::MatrixXd clifford_projector_coeffs(const CommutantModel& m) {
    detail::require_invertible(m);
    return m.gram.llt().solve(Eigen::MatrixXd::Identity(m.size(), m.size()));
}

/// P_H restricted to the commutant, in Q-basis coordinates: the
/// Gram-metric-orthogonal projection onto the leading permutation block.
/// P_Cl in these coordinates is the identity, so P_Cl - P_H is I minus this.
inline Eigen::MatrixXd haar_block_projector(const CommutantModel& m) {
    const int p = m.perm_count, sz = m.size();
    const Eigen::MatrixXd gpp = m.gram.topLeftCorner(p, p);
    Eigen::LLT<Eigen::MatrixXd> llt(gpp);
    if (llt.info() != Eigen::Success)
        throw conditioning_error("permutation block of the Gram matrix is singular");
    Eigen::MatrixXd proj = Eigen::MatrixXd::Zero(sz, sz);
    proj.topRows(p) = llt.solve(m.gram.topRows(p));
    return proj;
}

struct GramSchmidtBasis {
    // A(i,j) for i <= j: E_j = sum_i A(i,j) Q_{T_i}^{x n}
    Eigen::MatrixXd coefficients;
    Eigen::VectorXd squared_norms;  // <E_j|E_j>
};

/// Gram-Schmidt in determinant form. A_{i,j} is the signed cofactor of the
/// leading j x j Gram block (drop row j, column i), computed as
/// det(G_{j-1}) * [i == j ? 1 : -(G_{j-1}^{-1} g_j)_i]; this equals the
/// factorial permutation sum by cofactor expansion and costs O(j^3) per
/// column instead of O(j!).
inline GramSchmidtBasis gram_schmidt_cofactors(const CommutantModel& m) {
    detail::require_invertible(m);
    const int sz = m.size();
    GramSchmidtBasis out;
    out.coefficients = Eigen::MatrixXd::Zero(sz, sz);
    out.squared_norms.resize(sz);
    double prev_det = 1.0;  // det of the empty block
    for (int j = 0; j < sz; ++j) {
        out.coefficients(j, j) = prev_det;
        if (j > 0) {
            const Eigen::MatrixXd block = m.gram.topLeftCorner(j, j);
            const Eigen::VectorXd g = m.gram.col(j).head(j);
            out.coefficients.col(j).head(j) = -prev_det * block.llt().solve(g);
        }
        const double det_j = m.gram.topLeftCorner(j + 1, j + 1).llt().matrixL().determinant();
        const double det_now = det_j * det_j;  // det(G_{j+1 leading block})
        out.squared_norms(j) = prev_det * det_now;
        prev_det = det_now;
    }
    return out;
}

}  // namespace cdl::commutant
