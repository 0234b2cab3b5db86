#include <catch2/catch_amalgamated.hpp>

#include "cdl/moments.hpp"
#include "cdl/stabilizer.hpp"

using namespace cdl;
using namespace cdl::moments;
using cdl::lagrangian::enumerate_sigma;

TEST_CASE("gate classification") {
    CHECK_FALSE(t_gate().is_clifford);
    CHECK_FALSE(sqrt_t_gate().is_clifford);
    CHECK(s_gate().is_clifford);
    CHECK(hadamard_gate().is_clifford);
    CHECK(identity_gate().is_clifford);

    Eigen::Matrix2cd bad = Eigen::Matrix2cd::Identity() * 1.5;
    CHECK_THROWS_AS(make_gate(bad, "bad"), std::invalid_argument);
}

TEST_CASE("single-site matrix elements") {
    const auto sigma = enumerate_sigma(4);
    const Eigen::MatrixXd overlaps = overlap_matrix(sigma);

    // K = identity reduces to the overlap matrix
    const Eigen::MatrixXcd rid = site_matrices(sigma, identity_gate()).r;
    CHECK((rid - overlaps.cast<std::complex<double>>()).cwiseAbs().maxCoeff() < 1e-12);

    // any Clifford K leaves the commutant fixed: diagonal exactly 1
    const Eigen::MatrixXcd rs = site_matrices(sigma, s_gate()).r;
    for (int i = 0; i < 30; ++i) CHECK_THAT(std::abs(rs(i, i)), Catch::Matchers::WithinAbs(1.0, 1e-12));

    // K = T on a defect element: strictly below 1
    const Eigen::MatrixXcd rt = site_matrices(sigma, t_gate()).r;
    for (int i = 24; i < 30; ++i) CHECK(std::abs(rt(i, i)) < 1.0 - 1e-3);

    // Hermiticity of both site matrices
    const auto site = site_matrices(sigma, t_gate());
    CHECK((site.r - site.r.adjoint()).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((site.rr - site.rr.adjoint()).cwiseAbs().maxCoeff() < 1e-12);
    // and of the no-identity variant
    const auto site2 = site_matrices(sigma, t_gate(), false);
    CHECK((site2.r - site2.r.adjoint()).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("eta contraction factor") {
    CHECK_THAT(eta(4, s_gate()), Catch::Matchers::WithinAbs(1.0, 1e-12));
    CHECK_THAT(eta(4, hadamard_gate()), Catch::Matchers::WithinAbs(1.0, 1e-12));

    const double e4 = eta(4, t_gate());
    CHECK(e4 > 0.0);
    CHECK(e4 < 1.0);

    // invariant under K -> K^dag
    const GateK tdag = make_gate(t_gate().u.adjoint(), "Tdag");
    CHECK_THAT(eta(4, tdag), Catch::Matchers::WithinAbs(e4, 1e-12));

    // the identity-free variant is still a contraction for T
    CHECK(eta(4, t_gate(), false) <= 1.0 + 1e-12);
}

TEST_CASE("model invariants and hermiticity") {
    const auto model = build_interleaved_model(4, 3, t_gate());
    CHECK(model.reduced_dim() == 6);
    CHECK((model.m - model.m.adjoint()).cwiseAbs().maxCoeff() <= 1e-10);
    // W columns are Gram-orthonormal and Gram-orthogonal to the permutation block
    const Eigen::MatrixXd wtgw = model.w.transpose() * model.comm.gram * model.w;
    CHECK((wtgw - Eigen::MatrixXd::Identity(6, 6)).cwiseAbs().maxCoeff() < 1e-10);
    const Eigen::MatrixXd cross = model.comm.gram.topRows(24) * model.w;
    CHECK(cross.cwiseAbs().maxCoeff() < 1e-10);

    CHECK_THROWS_AS(build_interleaved_model(4, 2, t_gate()), std::invalid_argument);
}

TEST_CASE("single-site factorization matches the dense computation") {
    // t=3, n=2: <Q_T^{x2}|R|Q_T'^{x2}> via site formula vs dense 64-dim algebra
    const int t = 3, n = 2;
    const auto model = build_interleaved_model(t, n, t_gate());
    const auto& sigma = model.comm.sigma;
    const ops::DenseOperator big = stabilizer::gate_on_qubit0(t_gate().u, n, t);
    const ops::DenseOperator big_dag = big.adjoint();
    for (std::size_t a = 0; a < sigma.size(); ++a) {
        const ops::DenseOperator qa = stabilizer::site_tensor_power(ops::q_of(sigma[a]), n, t);
        for (std::size_t b = 0; b < sigma.size(); ++b) {
            const ops::DenseOperator qb = stabilizer::site_tensor_power(ops::q_of(sigma[b]), n, t);
            const ops::DenseOperator rqb =
                (big * qb * big_dag + big_dag * qb * big + qb) / 3.0;
            const std::complex<double> dense = (qa.adjoint() * rqb).trace();
            CHECK_THAT(std::abs(dense - model.full_r(a, b)), Catch::Matchers::WithinAbs(0.0, 1e-10));
        }
    }
}

TEST_CASE("convergence norms") {
    // t <= 3: the complement is empty, everything is already converged
    for (int t : {2, 3}) {
        const auto model = build_interleaved_model(t, 4, t_gate());
        CHECK(model.reduced_dim() == 0);
        for (int k = 1; k <= 5; ++k) CHECK(convergence_norm(model, k) == 0.0);
        CHECK(spectral_contraction(model) == 0.0);
    }

    // t=4: strictly decreasing, ratio approaches the top singular value
    const auto model = build_interleaved_model(4, 3, t_gate());
    const double contraction = spectral_contraction(model);
    CHECK(contraction < 1.0);
    double prev = convergence_norm(model, 1);
    CHECK(prev > 0.0);
    for (int k = 2; k <= 60; ++k) {
        const double cur = convergence_norm(model, k);
        CHECK(cur < prev);
        if (k == 60) CHECK_THAT(cur / prev, Catch::Matchers::WithinAbs(contraction, 1e-4));
        prev = cur;
    }

    // Clifford K: no progress, ratio exactly 1
    const auto scl = build_interleaved_model(4, 3, s_gate());
    CHECK_THAT(spectral_contraction(scl), Catch::Matchers::WithinAbs(1.0, 1e-10));
    const double c1 = convergence_norm(scl, 1);
    const double c5 = convergence_norm(scl, 5);
    CHECK_THAT(c5, Catch::Matchers::WithinRel(c1, 1e-10));

    // k=1 equals ||G||^{1/2} route and the direct product route
    const Eigen::MatrixXcd mk = model.m;
    const Eigen::MatrixXcd gk = model.g;
    const double direct2 = std::sqrt((mk * gk * mk.adjoint()).trace().real());
    CHECK_THAT(convergence_norm(model, 2), Catch::Matchers::WithinRel(direct2, 1e-10));
}

TEST_CASE("design error norm") {
    const auto model = build_interleaved_model(4, 3, t_gate());
    CHECK_THAT(design_error_norm(model, 0), Catch::Matchers::WithinAbs(std::sqrt(6.0), 1e-12));
    for (int k = 0; k <= 10; ++k) {
        CHECK(design_error_norm(model, k + 1) < design_error_norm(model, k));
        if (k >= 1) CHECK(design_error_norm(model, k) <= convergence_norm(model, k) + 1e-12);
    }
}

TEST_CASE("haar-interleaved pipeline") {
    for (int t : {2, 3}) CHECK(haar_interleaved_norm(t, 4, 3) == 0.0);

    const auto model = build_haar_interleaved_model(4, 8);
    CHECK((model.m - model.m.adjoint()).cwiseAbs().maxCoeff() <= 1e-10);
    const double contraction = spectral_contraction(model);
    CHECK(contraction < 1.0);
    double prev = convergence_norm(model, 1);
    for (int k = 2; k <= 10; ++k) {
        const double cur = convergence_norm(model, k);
        CHECK(cur < prev);
        prev = cur;
    }
}

TEST_CASE("paper depth bound in the log domain") {
    // eta_bar = 1: no decay, never below 2^{33 t^4}
    for (int t : {2, 4})
        for (double k : {1.0, 10.0, 1e5})
            CHECK(paper_depth_bound_log2(t, 100, k, 1.0) >= 33.0 * t * t * t * t);

    // large k with eta_bar = 1/4 drives the bound far below 1 once the
    // (1 + 2^{32 t^2 - n}) factor is tame, i.e. n > 32 t^2 = 512 at t = 4
    CHECK(paper_depth_bound_log2(4, 600, 1e5, 0.25) < 0.0);
    // n below 32 t^2 blows the middle factor up instead
    CHECK(paper_depth_bound_log2(4, 300, 1e5, 0.25) > 0.0);

    // monotone decreasing in k past the crossover for eta_bar < 1
    double prev = paper_depth_bound_log2(4, 600, 1e4, 0.25);
    for (double k : {2e4, 5e4, 1e5}) {
        const double cur = paper_depth_bound_log2(4, 600, k, 0.25);
        CHECK(cur < prev);
        prev = cur;
    }

    // Haar-interleaved closed form: k >= 36 (33 t^4 + 3 t log2(1/eps)) brings
    // the bound below eps (with n = 32 t^2 + 7, ratio 7/8, log2(7/8) < -0.19)
    for (int t : {2, 3, 4})
        for (double log2_inv_eps : {1.0, 10.0, 40.0}) {
            const double k = std::ceil(36.0 * (33.0 * std::pow(t, 4) + 3.0 * t * log2_inv_eps));
            const double n = 32.0 * t * t + 7.0;
            CHECK(paper_depth_bound_log2(t, n, k, 7.0 / 8.0) <= -log2_inv_eps);
        }
}

TEST_CASE("relative design check") {
    const Eigen::Index d = 4;  // one qubit, t=2 copies
    const Eigen::MatrixXcd haar = stabilizer::haar_moment_superop(2);
    CHECK(relative_design_check(haar, haar, 0.0));

    // completely depolarizing vs identity channel on one qubit (d=2)
    Eigen::MatrixXcd id4 = Eigen::MatrixXcd::Identity(4, 4);
    Eigen::MatrixXcd depol = Eigen::MatrixXcd::Zero(4, 4);
    // vec(|i><j|) -> tr(|i><j|)/2 * vec(I): columns (0,0),(1,1) map to (I/2)
    depol(0, 0) = depol(3, 0) = 0.5;
    depol(0, 3) = depol(3, 3) = 0.5;
    CHECK_FALSE(relative_design_check(depol, id4, 0.0));

    // the exact 2-design: single-qubit Clifford moments vs Haar
    const Eigen::MatrixXcd cl1 = stabilizer::dense_moment_cl1(2);
    CHECK(relative_design_check(cl1, haar, 1e-9));
    CHECK((cl1 - haar).cwiseAbs().maxCoeff() < 1e-12);
    (void)d;
}
