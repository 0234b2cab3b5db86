#include <catch2/catch_amalgamated.hpp>

#include <complex>

#include "cdl/operators.hpp"
#include "cdl/rng.hpp"

using namespace cdl;
using namespace cdl::lagrangian;
using namespace cdl::ops;

namespace {

DenseOperator random_operator(PhiloxRng& rng, Eigen::Index dim) {
    DenseOperator a(dim, dim);
    for (Eigen::Index i = 0; i < dim; ++i)
        for (Eigen::Index j = 0; j < dim; ++j) a(i, j) = {rng.normal(), rng.normal()};
    return a;
}

const StochasticLagrangian& defect_element_t4() {
    // the canonical t=4 element with both defect spaces span{1111} and
    // r(T) = 2 P_N (the CSS-symmetric representative)
    static std::vector<StochasticLagrangian> sigma = enumerate_sigma(4);
    static const StochasticLagrangian* found = [] {
        const DenseOperator p = css_projector(gf2::F2Subspace::from_rows({uint64_t{0b1111}}, 4), 4);
        for (const auto& e : sigma) {
            if (e.is_permutation) continue;
            if ((r_of(e) - 2.0 * p).cwiseAbs().maxCoeff() < 1e-12) return &e;
        }
        throw std::logic_error("CSS-symmetric defect element not found");
    }();
    return *found;
}

}  // namespace

TEST_CASE("r(T) basics") {
    auto sigma3 = enumerate_sigma(3);
    // identity space -> identity matrix
    CHECK((r_of(sigma3[0]) - DenseOperator::Identity(8, 8)).norm() == 0.0);

    // permutation subspaces -> permutation operators
    for (const auto& e : sigma3) {
        REQUIRE(e.is_permutation);
        CHECK((r_of(e) - permutation_operator(e.perm)).norm() == 0.0);
    }

    // 0/1 entries with exactly 2^t ones
    for (const auto& e : enumerate_sigma(4)) {
        const DenseOperator m = r_of(e);
        double ones = 0;
        for (Eigen::Index i = 0; i < m.rows(); ++i)
            for (Eigen::Index j = 0; j < m.cols(); ++j) {
                const double v = m(i, j).real();
                CHECK((v == 0.0 || v == 1.0));
                ones += v;
            }
        CHECK(ones == 16.0);
    }

    // t=4 defect element has rank 4 = 2^{t - 2 dim N}
    Eigen::JacobiSVD<DenseOperator> svd(r_of(defect_element_t4()));
    int rank = 0;
    for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i)
        if (svd.singularValues()(i) > 1e-9) ++rank;
    CHECK(rank == 4);
}

TEST_CASE("Schatten norms of r(T)") {
    for (int t = 2; t <= 4; ++t) {
        for (const auto& e : enumerate_sigma(t)) {
            const auto n = schatten_norms(r_of(e));
            const int d = e.left_defect_dim;
            CHECK_THAT(n.trace_norm, Catch::Matchers::WithinRel(std::ldexp(1.0, t - d), 1e-10));
            CHECK_THAT(n.frobenius, Catch::Matchers::WithinRel(std::pow(2.0, 0.5 * t), 1e-10));
            CHECK_THAT(n.spectral, Catch::Matchers::WithinRel(std::ldexp(1.0, d), 1e-10));
        }
    }
}

TEST_CASE("Q_T normalization") {
    auto sigma2 = enumerate_sigma(2);
    CHECK((q_of(sigma2[0]) - 0.5 * DenseOperator::Identity(4, 4)).norm() < 1e-15);
    for (const auto& e : enumerate_sigma(3)) {
        CHECK_THAT(schatten_norms(q_of(e)).frobenius, Catch::Matchers::WithinAbs(1.0, 1e-12));
        const DenseOperator q = q_of(e);
        CHECK_THAT((q.adjoint() * q).trace().real(), Catch::Matchers::WithinAbs(1.0, 1e-12));
    }
}

TEST_CASE("exact overlap identity <Q1|Q2> = 2^{dim cap - t}") {
    // dense-trace oracle, checked before anything else relies on it
    for (int t = 2; t <= 4; ++t) {
        auto sigma = enumerate_sigma(t);
        for (const auto& a : sigma)
            for (const auto& b : sigma) {
                const std::complex<double> dense =
                    std::ldexp(1.0, -t) * (r_of(a).adjoint() * r_of(b)).trace();
                const int cap = gf2::intersect(a.space, b.space).dim();
                CHECK_THAT(dense.real(),
                           Catch::Matchers::WithinAbs(std::ldexp(1.0, cap - t), 1e-12));
                CHECK_THAT(dense.imag(), Catch::Matchers::WithinAbs(0.0, 1e-15));
            }
    }
}

TEST_CASE("CSS projector") {
    // N = {0} -> identity
    CHECK((css_projector(gf2::F2Subspace(3), 3) - DenseOperator::Identity(8, 8)).norm() == 0.0);

    const gf2::F2Subspace n1111 = gf2::F2Subspace::from_rows({uint64_t{0b1111}}, 4);
    const DenseOperator p = css_projector(n1111, 4);
    CHECK_THAT(p.trace().real(), Catch::Matchers::WithinAbs(4.0, 1e-12));  // 2^{4-2}
    CHECK((p * p - p).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((p - p.adjoint()).cwiseAbs().maxCoeff() < 1e-12);

    // Pauli double-sum against the closed form [x + x' in N][x' in N_perp]/|N|
    const auto nperp = gf2::perp(n1111);
    for (uint64_t r = 0; r < 16; ++r)
        for (uint64_t c = 0; c < 16; ++c) {
            const double expect = (n1111.member(r ^ c) && nperp.member(r)) ? 0.5 : 0.0;
            CHECK_THAT(p(r, c).real(), Catch::Matchers::WithinAbs(expect, 1e-12));
        }
}

TEST_CASE("r decomposition r(T) = 2^{dim N} r(O) P_N") {
    for (int t = 2; t <= 4; ++t)
        for (const auto& e : enumerate_sigma(t)) CHECK(verify_decomposition(e));

    // t=6 anti-identity: constructed directly, O is the anti-identity, N = {0}
    const auto anti = classify(graph_subspace(anti_identity(6)), 6);
    CHECK(verify_decomposition(anti));
}

TEST_CASE("Haar symmetrizer is a projector onto the permutation span") {
    PhiloxRng rng(23, 5);
    for (int t = 2; t <= 4; ++t) {
        HaarSymmetrizer ph(t);
        const Eigen::Index dim = Eigen::Index{1} << t;

        // permutation operators are fixed points
        for (const auto& pi : ph.permutations()) {
            const DenseOperator w = permutation_operator(pi);
            CHECK((ph.apply(w) - w).cwiseAbs().maxCoeff() < 1e-10);
        }

        for (int trial = 0; trial < 5; ++trial) {
            const DenseOperator a = random_operator(rng, dim);
            const DenseOperator pa = ph.apply(a);
            // idempotent and trace preserving
            CHECK((ph.apply(pa) - pa).cwiseAbs().maxCoeff() < 1e-10);
            CHECK(std::abs(pa.trace() - a.trace()) < 1e-10);
            // contraction in Frobenius norm
            CHECK(pa.norm() <= a.norm() + 1e-12);
        }
    }
}

TEST_CASE("diagonal averaging") {
    PhiloxRng rng(29, 6);
    const DenseOperator a = random_operator(rng, 16);

    // diagonal matrices unchanged
    DenseOperator d = DenseOperator::Zero(16, 16);
    d.diagonal() = a.diagonal();
    CHECK((diag_apply(d) - d).norm() == 0.0);

    // P_D o P_H = P_H
    HaarSymmetrizer ph(4);
    const DenseOperator pha = ph.apply(a);
    CHECK((diag_apply(pha) - pha).cwiseAbs().maxCoeff() < 1e-10);

    // 2^{-t} ||P_D[r(T)]||^2 equals the equal-weight pair fraction
    for (const auto& e : enumerate_sigma(4)) {
        const DenseOperator pd = diag_apply(r_of(e));
        double count = 0;
        for (uint64_t w : e.space.elements())
            if (std::popcount(x_part(w, 4)) == std::popcount(y_part(w, 4))) count += 1;
        CHECK_THAT(std::ldexp(1.0, -4) * pd.squaredNorm(),
                   Catch::Matchers::WithinAbs(count / 16.0, 1e-12));
    }
}

TEST_CASE("Haar overlaps") {
    HaarSymmetrizer ph4(4);
    auto sigma4 = enumerate_sigma(4);
    for (const auto& e : sigma4) {
        const double v = ph4.overlap(e);
        if (e.is_permutation) {
            CHECK_THAT(v, Catch::Matchers::WithinAbs(1.0, 1e-10));
        } else {
            CHECK(v <= 0.875 + 1e-12);
        }
        // algebraic route agrees with the dense route
        const DenseOperator pr = ph4.apply(r_of(e));
        CHECK_THAT(std::ldexp(pr.squaredNorm(), -4), Catch::Matchers::WithinAbs(v, 1e-10));
        // monotone chain through the diagonal subgroup
        CHECK(std::ldexp(pr.squaredNorm(), -4) <=
              std::ldexp(diag_apply(r_of(e)).squaredNorm(), -4) + 1e-12);
    }

    // the CSS-symmetric defect element attains 7/10
    CHECK_THAT(ph4.overlap(defect_element_t4()), Catch::Matchers::WithinAbs(0.7, 1e-10));

    // t=6 anti-identity: 1/4 (1 + 9/(t+1)) = 4/7
    const auto anti = classify(graph_subspace(anti_identity(6)), 6);
    CHECK_THAT(HaarSymmetrizer(6).overlap(anti), Catch::Matchers::WithinAbs(4.0 / 7.0, 1e-10));

    // t=2: the anti-identity is the swap, a permutation, and the same
    // formula gives 1/4 (1 + 9/3) = 1
    const auto swap2 = classify(graph_subspace(anti_identity(2)), 2);
    CHECK_THAT(HaarSymmetrizer(2).overlap(swap2), Catch::Matchers::WithinAbs(1.0, 1e-10));
}
