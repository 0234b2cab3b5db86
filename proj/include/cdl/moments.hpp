#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <string>
#include <vector>

#include "cdl/commutant.hpp"
#include "cdl/errors.hpp"
#include "cdl/operators.hpp"

// Convergence of K-interleaved circuits, computed entirely in the
// |Sigma_{t,t}|-dimensional coordinates of the basis {Q_T^{x n}}. The only
// dense work is 2^t x 2^t trace algebra on a single site; the system size n
// enters through exact powers of the overlap matrix, so n in the hundreds
// costs nothing.

namespace cdl::moments {

using commutant::CommutantModel;
using lagrangian::StochasticLagrangian;

struct GateK {
    Eigen::Matrix2cd u;
    std::string label;
    bool is_clifford = false;
};

namespace detail {

inline bool proportional_to_pauli(const Eigen::Matrix2cd& a, double tol = 1e-9) {
    using cplx = std::complex<double>;
    Eigen::Matrix2cd paulis[3];
    paulis[0] << 0, 1, 1, 0;
    paulis[1] << 0, cplx(0, -1), cplx(0, 1), 0;
    paulis[2] << 1, 0, 0, -1;
    for (const auto& p : paulis)
        for (double sign : {1.0, -1.0})
            if ((a - sign * p).cwiseAbs().maxCoeff() < tol) return true;
    return false;
}

}  // namespace detail

inline GateK make_gate(const Eigen::Matrix2cd& u, std::string label) {
    if ((u.adjoint() * u - Eigen::Matrix2cd::Identity()).cwiseAbs().maxCoeff() > 1e-12)
        throw std::invalid_argument("make_gate: matrix is not unitary to 1e-12");
    GateK g;
    g.u = u;
    g.label = std::move(label);
    Eigen::Matrix2cd x, z;
    x << 0, 1, 1, 0;
    z << 1, 0, 0, -1;
    g.is_clifford = detail::proportional_to_pauli(u * x * u.adjoint()) &&
                    detail::proportional_to_pauli(u * z * u.adjoint());
    return g;
}

inline GateK t_gate() {
    Eigen::Matrix2cd u = Eigen::Matrix2cd::Identity();
    u(1, 1) = std::polar(1.0, std::numbers::pi / 4);
    return make_gate(u, "T");
}

inline GateK sqrt_t_gate() {
    Eigen::Matrix2cd u = Eigen::Matrix2cd::Identity();
    u(1, 1) = std::polar(1.0, std::numbers::pi / 8);
    return make_gate(u, "sqrtT");
}

inline GateK s_gate() {
    Eigen::Matrix2cd u = Eigen::Matrix2cd::Identity();
    u(1, 1) = {0.0, 1.0};
    return make_gate(u, "S");
}

inline GateK hadamard_gate() {
    Eigen::Matrix2cd u;
    u << 1, 1, 1, -1;
    return make_gate(u / std::numbers::sqrt2, "H");
}

inline GateK identity_gate() { return make_gate(Eigen::Matrix2cd::Identity(), "I"); }

/// Matrix of 2^{-t} tr(r(T)^dag U^{xt} r(T') (U^{xt})^dag) over an ordered
/// Sigma list: the single-site elements <Q_T| Ad_{U^{xt}} |Q_T'>.
inline Eigen::MatrixXcd conjugation_matrix(const std::vector<StochasticLagrangian>& sigma,
                                           const Eigen::Matrix2cd& u) {
    const int t = sigma.front().t;
    const Eigen::Index dim = Eigen::Index{1} << t;
    const int sz = static_cast<int>(sigma.size());
    const ops::DenseOperator ut = ops::tensor_power_1q(u, t);
    Eigen::MatrixXcd lhs(sz, dim * dim), rhs(dim * dim, sz);
    for (int i = 0; i < sz; ++i) {
        const ops::DenseOperator r = ops::r_of(sigma[i]);
        const ops::DenseOperator c = ut * r * ut.adjoint();
        lhs.row(i) = Eigen::Map<const Eigen::VectorXcd>(r.data(), dim * dim).transpose();
        rhs.col(i) = Eigen::Map<const Eigen::VectorXcd>(c.data(), dim * dim);
    }
    // r(T) is real, so tr(r^dag c) is the plain bilinear pairing
    return std::ldexp(1.0, -t) * (lhs * rhs);
}

/// Single-copy overlap matrix 2^{dim(T cap T') - t}.
inline Eigen::MatrixXd overlap_matrix(const std::vector<StochasticLagrangian>& sigma) {
    const int sz = static_cast<int>(sigma.size());
    Eigen::MatrixXd g(sz, sz);
    for (int i = 0; i < sz; ++i)
        for (int j = i; j < sz; ++j)
            g(i, j) = g(j, i) = std::ldexp(1.0, commutant::overlap_exact(sigma[i], sigma[j]));
    return g;
}

/// Site matrices of R_1 and R_1 R_1^dag for the interleaving measure.
/// include_identity selects xi = uniform{K, K^dag, 1} over uniform{K, K^dag}.
struct SiteMatrices {
    Eigen::MatrixXcd r;   // <Q_T|R_1|Q_T'>
    Eigen::MatrixXcd rr;  // <Q_T|R_1 R_1^dag|Q_T'>
};

inline SiteMatrices site_matrices(const std::vector<StochasticLagrangian>& sigma,
                                  const GateK& gate, bool include_identity = true) {
    const Eigen::MatrixXd g1 = overlap_matrix(sigma);
    const Eigen::MatrixXcd ck = conjugation_matrix(sigma, gate.u);
    const Eigen::MatrixXcd ckd = conjugation_matrix(sigma, gate.u.adjoint());
    const Eigen::MatrixXcd ck2 = conjugation_matrix(sigma, (gate.u * gate.u).eval());
    const Eigen::MatrixXcd ckd2 =
        conjugation_matrix(sigma, (gate.u.adjoint() * gate.u.adjoint()).eval());
    SiteMatrices out;
    if (include_identity) {
        out.r = (ck + ckd + g1) / 3.0;
        // (A + A^{-1} + 1)^2 = A^2 + A^{-2} + 2A + 2A^{-1} + 3
        out.rr = (ck2 + ckd2 + 2.0 * ck + 2.0 * ckd + 3.0 * g1) / 9.0;
    } else {
        out.r = (ck + ckd) / 2.0;
        out.rr = (ck2 + ckd2 + 2.0 * g1) / 4.0;
    }
    return out;
}

/// R_1 replaced by the single-site Haar symmetrizer (a projector, so both
/// site matrices coincide).
inline SiteMatrices haar_site_matrices(const std::vector<StochasticLagrangian>& sigma) {
    const int t = sigma.front().t;
    ops::HaarSymmetrizer ph(t);
    const int sz = static_cast<int>(sigma.size());
    Eigen::MatrixXcd h(sz, sz);
    for (int i = 0; i < sz; ++i)
        for (int j = i; j < sz; ++j) h(i, j) = h(j, i) = ph.pair_overlap(sigma[i], sigma[j]);
    return {h, h};
}

/// (1/3) <Q_T | Ad_K^{xt} + Ad_{K^dag}^{xt} + id | Q_T'> (or the
/// identity-free variant), computed matrix-free from single-site traces.
inline std::complex<double> r_matrix_element(const std::vector<StochasticLagrangian>& sigma,
                                             const GateK& gate, int i, int j,
                                             bool include_identity = true) {
    return site_matrices(sigma, gate, include_identity).r(i, j);
}

/// eta_{K,t}: max |<Q_T|R_1|Q_T'>| over non-permutation T and all T'.
/// Equals 1 when K is Clifford; strictly below 1 otherwise.
inline double eta(int t, const GateK& gate, bool include_identity = true) {
    const auto sigma = lagrangian::enumerate_sigma(t);
    const Eigen::MatrixXcd r = site_matrices(sigma, gate, include_identity).r;
    double m = 0.0;
    for (int i = 0; i < static_cast<int>(sigma.size()); ++i) {
        if (sigma[i].is_permutation) continue;
        for (int j = 0; j < static_cast<int>(sigma.size()); ++j)
            m = std::max(m, std::abs(r(i, j)));
    }
    return m;
}

struct InterleavedModel {
    int t = 0;
    int n = 0;
    std::string gate_label;
    bool haar_site = false;
    bool include_identity = true;
    CommutantModel comm;
    Eigen::MatrixXcd site_r, site_rr;  // single-site matrices
    Eigen::MatrixXcd full_r, full_rr;  // n-copy matrices (site x overlap^{n-1})
    Eigen::MatrixXd w;                 // Q-coordinates of an orthonormal basis of range(P_Cl - P_H)
    Eigen::MatrixXcd m;                // <w_a|R|w_b>
    Eigen::MatrixXcd g;                // <w_a|R R^dag|w_b>
    Eigen::MatrixXcd g_design;         // <w_a|R P_Cl R^dag|w_b>
    Eigen::VectorXd m_eigs;            // eigenvalues of the Hermitian compression m
    Eigen::VectorXd g_diag;            // diag of g in the eigenbasis of m
    Eigen::VectorXd g_design_diag;     // diag of g_design in the eigenbasis of m

    int reduced_dim() const { return static_cast<int>(w.cols()); }
};

namespace detail {

inline Eigen::MatrixXd orthonormal_complement(const CommutantModel& comm, double metric_tol) {
    const int sz = comm.size(), p = comm.perm_count;
    const int m = sz - p;
    if (m == 0) return Eigen::MatrixXd::Zero(sz, 0);
    const Eigen::MatrixXd gpp = comm.gram.topLeftCorner(p, p);
    const Eigen::MatrixXd gpr = comm.gram.topRightCorner(p, m);
    const Eigen::MatrixXd grr = comm.gram.bottomRightCorner(m, m);
    Eigen::LLT<Eigen::MatrixXd> llt(gpp);
    if (llt.info() != Eigen::Success)
        throw conditioning_error("permutation Gram block is singular");
    const Eigen::MatrixXd cross = llt.solve(gpr);            // gpp^{-1} gpr
    const Eigen::MatrixXd schur = grr - gpr.transpose() * cross;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(schur);
    const double cutoff = metric_tol * es.eigenvalues().maxCoeff();
    if (es.eigenvalues().minCoeff() < cutoff)
        throw conditioning_error("commutant metric is singular on the complement (n < t-1?)");
    Eigen::MatrixXd scaled = es.eigenvectors();
    for (int a = 0; a < m; ++a) scaled.col(a) /= std::sqrt(es.eigenvalues()(a));
    Eigen::MatrixXd w(sz, m);
    w.topRows(p) = -cross * scaled;
    w.bottomRows(m) = scaled;
    return w;
}

inline Eigen::MatrixXd elementwise_pow(const Eigen::MatrixXi& log2s, int power) {
    Eigen::MatrixXd out(log2s.rows(), log2s.cols());
    for (Eigen::Index i = 0; i < log2s.rows(); ++i)
        for (Eigen::Index j = 0; j < log2s.cols(); ++j)
            out(i, j) = std::ldexp(1.0, power * log2s(i, j));
    return out;
}

inline void finish_model(InterleavedModel& model, const SiteMatrices& site) {
    model.site_r = site.r;
    model.site_rr = site.rr;
    const Eigen::MatrixXd gn1 = elementwise_pow(model.comm.gram_log2, model.n - 1);
    model.full_r = site.r.cwiseProduct(gn1);
    model.full_rr = site.rr.cwiseProduct(gn1);
    model.w = orthonormal_complement(model.comm, 1e-12);
    const Eigen::MatrixXcd wc = model.w.cast<std::complex<double>>();
    model.m = wc.transpose() * model.full_r * wc;
    model.g = wc.transpose() * model.full_rr * wc;
    if (model.reduced_dim() > 0) {
        const double scale = std::max(1.0, model.m.cwiseAbs().maxCoeff());
        if ((model.m - model.m.adjoint()).cwiseAbs().maxCoeff() > 1e-10 * scale)
            throw conditioning_error("compressed moment operator is not Hermitian");
        // <w_a|R P_Cl R^dag|w_b> through the dual basis: P_Cl = sum Gamma^{-1} |Q><Q|
        const Eigen::MatrixXd gram_inv = model.comm.gram.llt().solve(
            Eigen::MatrixXd::Identity(model.comm.size(), model.comm.size()));
        const Eigen::MatrixXcd rp =
            model.full_r * gram_inv.cast<std::complex<double>>() * model.full_r.adjoint();
        model.g_design = wc.transpose() * rp * wc;
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(model.m);
        model.m_eigs = es.eigenvalues();
        model.g_diag =
            (es.eigenvectors().adjoint() * model.g * es.eigenvectors()).diagonal().real();
        model.g_design_diag =
            (es.eigenvectors().adjoint() * model.g_design * es.eigenvectors()).diagonal().real();
    }
}

}  // namespace detail

inline InterleavedModel build_interleaved_model(int t, int n, const GateK& gate,
                                                bool include_identity = true) {
    if (n < t - 1) throw std::invalid_argument("build_interleaved_model: requires n >= t-1");
    InterleavedModel model;
    model.t = t;
    model.n = n;
    model.gate_label = gate.label;
    model.include_identity = include_identity;
    model.comm = commutant::gram(t, n);
    detail::finish_model(model, site_matrices(model.comm.sigma, gate, include_identity));
    return model;
}

inline InterleavedModel build_haar_interleaved_model(int t, int n) {
    if (n < t - 1) throw std::invalid_argument("build_haar_interleaved_model: requires n >= t-1");
    InterleavedModel model;
    model.t = t;
    model.n = n;
    model.gate_label = "haar";
    model.haar_site = true;
    model.comm = commutant::gram(t, n);
    detail::finish_model(model, haar_site_matrices(model.comm.sigma));
    return model;
}

/// ||[(P_Cl - P_H) R]^k||_2 = sqrt(tr(M^{k-1} G (M^dag)^{k-1})) in the
/// reduced coordinates; exactly 0 for t <= 3 where the complement is empty.
inline double convergence_norm(const InterleavedModel& model, int k) {
    if (k < 1) throw std::invalid_argument("convergence_norm: k >= 1");
    if (model.reduced_dim() == 0) return 0.0;
    double total = 0.0;
    for (int a = 0; a < model.reduced_dim(); ++a)
        total += std::pow(model.m_eigs(a) * model.m_eigs(a), k - 1) * model.g_diag(a);
    return std::sqrt(std::max(0.0, total));
}

/// Largest singular value of the compressed operator M.
inline double spectral_contraction(const InterleavedModel& model) {
    if (model.reduced_dim() == 0) return 0.0;
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(model.m);
    return svd.singularValues()(0);
}

/// ||Delta_t(sigma'_k) - P_H||_2 for the sampled circuit convention
/// sigma'_k = mu_Cl * (xi_K * mu_Cl)^{* k} (one leading Clifford layer and k
/// gate injections). The frame potential satisfies
/// FP(sigma'_k) = t! + (this value)^2, which is what the Monte Carlo sweep
/// estimates. k = 0 gives ||P_Cl - P_H||_2 = sqrt(dim of the complement).
inline double design_error_norm(const InterleavedModel& model, int k) {
    if (k < 0) throw std::invalid_argument("design_error_norm: k >= 0");
    if (model.reduced_dim() == 0) return 0.0;
    if (k == 0) return std::sqrt(static_cast<double>(model.reduced_dim()));
    double total = 0.0;
    for (int a = 0; a < model.reduced_dim(); ++a)
        total += std::pow(model.m_eigs(a) * model.m_eigs(a), k - 1) * model.g_design_diag(a);
    return std::sqrt(std::max(0.0, total));
}

inline double haar_interleaved_norm(int t, int n, int k) {
    return convergence_norm(build_haar_interleaved_model(t, n), k);
}

/// log2 of 2^{33 t^4 + t log2 k} (1 + 2^{32 t^2 - n})^{5k} eta_bar^{k-1},
/// evaluated in the log domain so nothing overflows.
inline double paper_depth_bound_log2(double t, double n, double k, double eta_bar) {
    if (t < 1 || n < 1 || k < 1 || eta_bar <= 0)
        throw std::invalid_argument("paper_depth_bound_log2: all arguments must be positive");
    const double e = 32.0 * t * t - n;
    const double log2_1p = e > 50.0 ? e : std::log2(1.0 + std::exp2(e));
    return 33.0 * t * t * t * t + t * std::log2(k) + 5.0 * k * log2_1p +
           (k - 1.0) * std::log2(eta_bar);
}

/// Choi matrix of a superoperator given in the row-major |i><j| basis:
/// C_{(a,i),(b,j)} = S_{(a,b),(i,j)}.
inline Eigen::MatrixXcd choi_of_superop(const Eigen::MatrixXcd& s, Eigen::Index d) {
    if (s.rows() != d * d || s.cols() != d * d)
        throw std::invalid_argument("choi_of_superop: dimension mismatch");
    Eigen::MatrixXcd c(d * d, d * d);
    for (Eigen::Index a = 0; a < d; ++a)
        for (Eigen::Index b = 0; b < d; ++b)
            for (Eigen::Index i = 0; i < d; ++i)
                for (Eigen::Index j = 0; j < d; ++j)
                    c(a * d + i, b * d + j) = s(a * d + b, i * d + j);
    return c;
}

/// (1 - eps) B <= A <= (1 + eps) B in the completely-positive order, decided
/// by the minimum Choi eigenvalues of (1+eps)B - A and A - (1-eps)B.
inline bool relative_design_check(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b,
                                  double eps, double tol = 1e-9) {
    const auto d_sq = a.rows();
    const Eigen::Index d = static_cast<Eigen::Index>(std::llround(std::sqrt(double(d_sq))));
    if (d * d != d_sq || b.rows() != d_sq || a.cols() != d_sq || b.cols() != d_sq)
        throw std::invalid_argument("relative_design_check: superoperators must be d^2 x d^2");
    if (d_sq > 4096) throw resource_error("relative_design_check: dimension too large");
    for (const Eigen::MatrixXcd& diff :
         {((1.0 + eps) * b - a).eval(), (a - (1.0 - eps) * b).eval()}) {
        const Eigen::MatrixXcd choi = choi_of_superop(diff, d);
        if ((choi - choi.adjoint()).cwiseAbs().maxCoeff() > 1e-9)
            throw std::invalid_argument("relative_design_check: Choi operator is not Hermitian");
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(choi, Eigen::EigenvaluesOnly);
        if (es.eigenvalues().minCoeff() < -tol) return false;
    }
    return true;
}

}  // namespace cdl::moments
