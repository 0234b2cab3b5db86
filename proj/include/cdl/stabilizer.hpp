#pragma once

#include <Eigen/Dense>
#include <array>
#include <bit>
#include <cmath>
#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "cdl/commutant.hpp"
#include "cdl/errors.hpp"
#include "cdl/gf2.hpp"
#include "cdl/operators.hpp"
#include "cdl/parallel.hpp"
#include "cdl/rng.hpp"

// Stabilizer machinery and the dense oracles that everything else is checked
// against: tableaux with uniform sampling, synthesis to dense unitaries,
// exact single-qubit moment operators, the local-walk Hamiltonian in the
// Pauli basis, and Monte Carlo frame potentials with counter-based streams.
//
// Dense multi-copy operators use copy-major global bits: bit (c*n + j) is
// qubit j of copy c, so single-site operators of the commutant factor over
// j and copy permutations act blockwise over c.

namespace cdl::stabilizer {

using ops::DenseOperator;

// ---------------------------------------------------------------------------
// Pauli strings (Hermitian convention: (-1)^sign prod_i sigma_{x_i, z_i})

struct PauliString {
    uint64_t x = 0;
    uint64_t z = 0;
    uint8_t sign = 0;  // (-1)^sign

    friend bool operator==(const PauliString&, const PauliString&) = default;
};

namespace detail {

// i-exponent of sigma_a sigma_b = i^phi sigma_{a xor b} per qubit, indexed
// [2 x1 + z1][2 x2 + z2] with I=0, Z=1, X=2, Y=3.
inline constexpr int pauli_phase_table[4][4] = {
    {0, 0, 0, 0},  // I .
    {0, 0, 1, 3},  // Z: ZZ=I, ZX=iY, ZY=-iX
    {0, 3, 0, 1},  // X: XZ=-iY, XX=I, XY=iZ
    {0, 1, 3, 0},  // Y: YZ=iX, YX=-iZ, YY=I
};

struct PhasedPauli {
    uint64_t x = 0, z = 0;
    int iexp = 0;  // global i^iexp, mod 4
};

inline PhasedPauli mul(const PhasedPauli& a, const PhasedPauli& b, int nq) {
    PhasedPauli out;
    out.iexp = a.iexp + b.iexp;
    for (int q = 0; q < nq; ++q) {
        const int ia = ((a.x >> q) & 1) * 2 + ((a.z >> q) & 1);
        const int ib = ((b.x >> q) & 1) * 2 + ((b.z >> q) & 1);
        out.iexp += pauli_phase_table[ia][ib];
    }
    out.iexp &= 3;
    out.x = a.x ^ b.x;
    out.z = a.z ^ b.z;
    return out;
}

inline PhasedPauli promote(const PauliString& p) { return {p.x, p.z, p.sign ? 2 : 0}; }

}  // namespace detail

/// Conjugation updates P -> g P g^dag for the primitive gates.
inline void conj_h(PauliString& p, int a) {
    const uint64_t xa = (p.x >> a) & 1, za = (p.z >> a) & 1;
    p.sign ^= static_cast<uint8_t>(xa & za);
    p.x ^= (xa ^ za) << a;
    p.z ^= (xa ^ za) << a;
}

inline void conj_s(PauliString& p, int a) {
    const uint64_t xa = (p.x >> a) & 1, za = (p.z >> a) & 1;
    p.sign ^= static_cast<uint8_t>(xa & za);
    p.z ^= xa << a;
}

inline void conj_cx(PauliString& p, int a, int b) {
    const uint64_t xa = (p.x >> a) & 1, zb = (p.z >> b) & 1;
    const uint64_t xb = (p.x >> b) & 1, za = (p.z >> a) & 1;
    p.sign ^= static_cast<uint8_t>(xa & zb & (xb ^ za ^ 1));
    p.x ^= xa << b;
    p.z ^= zb << a;
}

inline Eigen::MatrixXcd dense_pauli(const PauliString& p, int nq) {
    using cplx = std::complex<double>;
    const Eigen::Index dim = Eigen::Index{1} << nq;
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(dim, dim);
    for (uint64_t c = 0; c < static_cast<uint64_t>(dim); ++c) {
        const uint64_t r = c ^ p.x;
        cplx v = p.sign ? -1.0 : 1.0;
        for (int q = 0; q < nq; ++q) {
            const uint64_t xq = (p.x >> q) & 1, zq = (p.z >> q) & 1, cq = (c >> q) & 1;
            if (xq && zq)
                v *= cq ? cplx(0, -1) : cplx(0, 1);  // Y column entries
            else if (zq && cq)
                v = -v;
        }
        m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = v;
    }
    return m;
}

// ---------------------------------------------------------------------------
// Tableau

struct Tableau {
    int n = 0;
    std::vector<PauliString> rows;  // rows[i] = image of X_i, rows[n+i] = image of Z_i

    static Tableau identity(int n) {
        Tableau t;
        t.n = n;
        t.rows.resize(2 * n);
        for (int i = 0; i < n; ++i) {
            t.rows[i].x = uint64_t{1} << i;
            t.rows[n + i].z = uint64_t{1} << i;
        }
        return t;
    }

    void apply_h(int a) {
        for (auto& r : rows) conj_h(r, a);
    }
    void apply_s(int a) {
        for (auto& r : rows) conj_s(r, a);
    }
    void apply_s3(int a) {
        for (int k = 0; k < 3; ++k) apply_s(a);
    }
    void apply_cx(int a, int b) {
        for (auto& r : rows) conj_cx(r, a, b);
    }

    friend bool operator==(const Tableau&, const Tableau&) = default;

    /// Hashable canonical key (the tableau is already canonical per class).
    std::vector<uint64_t> key() const {
        std::vector<uint64_t> k;
        uint64_t signs = 0;
        for (std::size_t i = 0; i < rows.size(); ++i) {
            k.push_back(rows[i].x);
            k.push_back(rows[i].z);
            signs |= uint64_t{rows[i].sign} << i;
        }
        k.push_back(signs);
        return k;
    }
};

/// Image of an arbitrary Pauli string under the tableau's Clifford.
inline PauliString tableau_image(const Tableau& g, const PauliString& p) {
    detail::PhasedPauli acc{0, 0, p.sign ? 2 : 0};
    for (int q = 0; q < g.n; ++q) {
        const uint64_t xq = (p.x >> q) & 1, zq = (p.z >> q) & 1;
        if (xq && zq) acc.iexp = (acc.iexp + 1) & 3;  // Y_q = i X_q Z_q
        if (xq) acc = detail::mul(acc, detail::promote(g.rows[q]), g.n);
        if (zq) acc = detail::mul(acc, detail::promote(g.rows[g.n + q]), g.n);
    }
    if (acc.iexp % 2 != 0) throw std::logic_error("tableau_image: non-Hermitian image");
    return {acc.x, acc.z, static_cast<uint8_t>(acc.iexp == 2)};
}

/// Tableau of g o h (apply h first).
inline Tableau compose(const Tableau& g, const Tableau& h) {
    if (g.n != h.n) throw std::invalid_argument("compose: size mismatch");
    Tableau out;
    out.n = g.n;
    out.rows.reserve(2 * g.n);
    for (const auto& r : h.rows) out.rows.push_back(tableau_image(g, r));
    return out;
}

// ---------------------------------------------------------------------------
// Uniform Clifford sampling (random symplectic map via transvections, plus
// uniform sign bits; every sign pattern is reachable by Pauli corrections)

namespace detail {

struct SpVec {
    uint64_t x = 0, z = 0;
    bool zero() const { return (x | z) == 0; }
    friend bool operator==(const SpVec&, const SpVec&) = default;
};

inline int sp_form(const SpVec& a, const SpVec& b) {
    return gf2::dot2(a.x, b.z) ^ gf2::dot2(a.z, b.x);
}

inline SpVec sp_xor(const SpVec& a, const SpVec& b) { return {a.x ^ b.x, a.z ^ b.z}; }

/// Symplectic transvection v -> v + <v,h> h.
inline SpVec transvect(const SpVec& h, const SpVec& v) {
    return sp_form(v, h) ? sp_xor(v, h) : v;
}

inline SpVec apply_all(const std::vector<SpVec>& hs, SpVec v) {
    for (const auto& h : hs) v = transvect(h, v);
    return v;
}

inline SpVec random_spvec(int n, PhiloxRng& rng) {
    const uint64_t mask = n == 64 ? ~uint64_t{0} : (uint64_t{1} << n) - 1;
    return {rng.next_u64() & mask, rng.next_u64() & mask};
}

/// Transvections taking x to y (0, 1 or 2 of them).
inline std::vector<SpVec> transvections_mapping(const SpVec& x, const SpVec& y, int n,
                                                PhiloxRng& rng) {
    if (x == y) return {};
    if (sp_form(x, y) == 1) return {sp_xor(x, y)};
    // need z with <x,z> = <z,y> = 1; a quarter of all vectors qualify
    for (;;) {
        const SpVec z = random_spvec(n, rng);
        if (sp_form(x, z) == 1 && sp_form(z, y) == 1) return {sp_xor(x, z), sp_xor(z, y)};
    }
}

/// Transvections taking u to f2 while fixing f1; requires
/// <f1,u> = <f1,f2> = 1.
inline std::vector<SpVec> fixing_transvections(const SpVec& f1, const SpVec& u, const SpVec& f2,
                                               int n, PhiloxRng& rng) {
    if (u == f2) return {};
    if (sp_form(u, f2) == 1) return {sp_xor(u, f2)};
    if (sp_xor(u, f2) == f1) return {f1};
    // z with <u,z> = <z,f2> = 1 and <f1,z> = 1 keeps f1 fixed across both
    // transvections; the three functionals are independent here
    for (;;) {
        const SpVec z = random_spvec(n, rng);
        if (sp_form(u, z) == 1 && sp_form(z, f2) == 1 && sp_form(f1, z) == 1)
            return {sp_xor(u, z), sp_xor(z, f2)};
    }
}

/// Images of [X_0..X_{n-1}, Z_0..Z_{n-1}] under a uniform symplectic map.
inline std::vector<SpVec> sample_symplectic(int n, PhiloxRng& rng) {
    if (n == 0) return {};
    SpVec f1;
    do {
        f1 = random_spvec(n, rng);
    } while (f1.zero());
    SpVec f2;
    do {
        f2 = random_spvec(n, rng);
    } while (sp_form(f1, f2) == 0);
    const SpVec e1{1, 0};
    const SpVec e2{0, 1};
    const std::vector<SpVec> t1 = transvections_mapping(e1, f1, n, rng);
    const std::vector<SpVec> t2 = fixing_transvections(f1, apply_all(t1, e2), f2, n, rng);
    const std::vector<SpVec> sub = sample_symplectic(n - 1, rng);
    std::vector<SpVec> rows(2 * n);
    rows[0] = f1;
    rows[n] = f2;
    for (int i = 1; i < n; ++i) {
        const SpVec xv{sub[i - 1].x << 1, sub[i - 1].z << 1};
        const SpVec zv{sub[n - 1 + i - 1].x << 1, sub[n - 1 + i - 1].z << 1};
        rows[i] = apply_all(t2, apply_all(t1, xv));
        rows[n + i] = apply_all(t2, apply_all(t1, zv));
    }
    return rows;
}

}  // namespace detail

/// Uniform over the Clifford group mod global phase.
inline Tableau sample_clifford(int n, PhiloxRng& rng) {
    if (n < 1 || n > 64) throw std::invalid_argument("sample_clifford: n must be in [1,64]");
    const auto rows = detail::sample_symplectic(n, rng);
    Tableau t;
    t.n = n;
    t.rows.resize(2 * n);
    for (int i = 0; i < 2 * n; ++i) {
        t.rows[i].x = rows[i].x;
        t.rows[i].z = rows[i].z;
        t.rows[i].sign = rng.bernoulli() ? 1 : 0;
    }
    return t;
}

// ---------------------------------------------------------------------------
// Tableau -> dense unitary (n <= 5)

/// Synthesizes the unitary with U X_i U^dag and U Z_i U^dag equal to the
/// tableau rows exactly (global phase canonicalized): the state U|0> is read
/// off the stabilizer projector, columns follow by applying destabilizer
/// images, and a final Z-type Pauli correction fixes the X-image signs.
inline DenseOperator tableau_to_unitary(const Tableau& tab) {
    const int n = tab.n;
    if (n > 5) throw resource_error("tableau_to_unitary: dense synthesis limited to n <= 5");
    const Eigen::Index dim = Eigen::Index{1} << n;

    DenseOperator proj = DenseOperator::Identity(dim, dim);
    for (int i = 0; i < n; ++i)
        proj = 0.5 * (proj + dense_pauli(tab.rows[n + i], n) * proj);
    Eigen::Index best = 0;
    proj.colwise().norm().maxCoeff(&best);
    Eigen::VectorXcd psi0 = proj.col(best);
    psi0.normalize();
    for (Eigen::Index i = 0; i < dim; ++i)
        if (std::abs(psi0(i)) > 1e-8) {
            psi0 *= std::abs(psi0(i)) / psi0(i);
            break;
        }

    std::vector<Eigen::MatrixXcd> ximg(n);
    for (int i = 0; i < n; ++i) ximg[i] = dense_pauli(tab.rows[i], n);
    DenseOperator u(dim, dim);
    for (uint64_t b = 0; b < static_cast<uint64_t>(dim); ++b) {
        Eigen::VectorXcd col = psi0;
        for (int i = n - 1; i >= 0; --i)
            if ((b >> i) & 1u) col = ximg[i] * col;
        u.col(static_cast<Eigen::Index>(b)) = col;
    }

    // fix the sign of each X-image with a right Z-correction (leaves Z-images alone)
    PauliString zfix;
    for (int i = 0; i < n; ++i) {
        PauliString xi;
        xi.x = uint64_t{1} << i;
        const Eigen::MatrixXcd got = u * dense_pauli(xi, n) * u.adjoint();
        const Eigen::MatrixXcd want = ximg[i];
        if ((got - want).cwiseAbs().maxCoeff() < 1e-8) continue;
        if ((got + want).cwiseAbs().maxCoeff() < 1e-8)
            zfix.z |= uint64_t{1} << i;
        else
            throw std::logic_error("tableau_to_unitary: X image is not a matching Pauli");
    }
    if (zfix.z != 0) u = u * dense_pauli(zfix, n);
    return u;
}

/// Reads a tableau off a dense Clifford unitary (exact up to global phase).
inline Tableau tableau_from_unitary(const DenseOperator& u, int n) {
    Tableau out;
    out.n = n;
    out.rows.resize(2 * n);
    for (int k = 0; k < 2 * n; ++k) {
        PauliString gen;
        if (k < n)
            gen.x = uint64_t{1} << k;
        else
            gen.z = uint64_t{1} << (k - n);
        const Eigen::MatrixXcd img = u * dense_pauli(gen, n) * u.adjoint();
        // column 0 locates the X part
        Eigen::Index r0 = 0;
        img.col(0).cwiseAbs().maxCoeff(&r0);
        PauliString p;
        p.x = static_cast<uint64_t>(r0);
        for (int j = 0; j < n; ++j) {
            const Eigen::Index c = Eigen::Index{1} << j;
            const std::complex<double> ratio = img(static_cast<Eigen::Index>(p.x ^ c), c) / img(r0, 0);
            if (std::abs(ratio + 1.0) < 1e-6) p.z |= uint64_t{1} << j;
        }
        std::complex<double> lead = img(r0, 0);
        const int ycount = std::popcount(p.x & p.z);
        for (int q = 0; q < ycount; ++q) lead /= std::complex<double>(0, 1);
        p.sign = std::abs(lead + 1.0) < 1e-6 ? 1 : 0;
        if ((dense_pauli(p, n) - img).cwiseAbs().maxCoeff() > 1e-6)
            throw std::invalid_argument("tableau_from_unitary: input is not Clifford");
        out.rows[k] = p;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Dense superoperator helpers (row-major vec: index of |a><b| is a*d + b)

/// Ad_U as a matrix on vectorized operators: U x conj(U).
inline Eigen::MatrixXcd ad_superop(const Eigen::MatrixXcd& u) {
    const Eigen::Index d = u.rows();
    Eigen::MatrixXcd s(d * d, d * d);
    for (Eigen::Index a = 0; a < d; ++a)
        for (Eigen::Index b = 0; b < d; ++b)
            for (Eigen::Index i = 0; i < d; ++i)
                for (Eigen::Index j = 0; j < d; ++j)
                    s(a * d + b, i * d + j) = u(a, i) * std::conj(u(b, j));
    return s;
}

/// A^{x n} in copy-major order: entry is the product of per-copy entries.
inline DenseOperator site_tensor_power(const DenseOperator& a, int n, int t) {
    const int m = n * t;
    if (m > 12) throw resource_error("site_tensor_power: dimension too large");
    const Eigen::Index dim = Eigen::Index{1} << m;
    const int tbits = static_cast<int>(std::countr_zero(static_cast<uint64_t>(a.rows())));
    auto gather = [&](uint64_t s, int j) {
        uint64_t v = 0;
        for (int c = 0; c < tbits; ++c) v |= ((s >> (c * n + j)) & 1u) << c;
        return v;
    };
    DenseOperator out(dim, dim);
    for (uint64_t r = 0; r < static_cast<uint64_t>(dim); ++r)
        for (uint64_t c = 0; c < static_cast<uint64_t>(dim); ++c) {
            std::complex<double> v = 1.0;
            for (int j = 0; j < n && v != 0.0; ++j)
                v *= a(static_cast<Eigen::Index>(gather(r, j)), static_cast<Eigen::Index>(gather(c, j)));
            out(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = v;
        }
    return out;
}

/// u^{x t} acting on qubit 0 of every copy (identity on the other qubits).
inline DenseOperator gate_on_qubit0(const Eigen::Matrix2cd& u, int n, int t) {
    const int m = n * t;
    if (m > 12) throw resource_error("gate_on_qubit0: dimension too large");
    const Eigen::Index dim = Eigen::Index{1} << m;
    const DenseOperator ut = ops::tensor_power_1q(u, t);
    uint64_t site_mask = 0;
    for (int c = 0; c < t; ++c) site_mask |= uint64_t{1} << (c * n);
    const uint64_t rest_mask = ~site_mask & ((uint64_t{1} << m) - 1);
    auto gather0 = [&](uint64_t s) {
        uint64_t v = 0;
        for (int c = 0; c < t; ++c) v |= ((s >> (c * n)) & 1u) << c;
        return v;
    };
    DenseOperator out = DenseOperator::Zero(dim, dim);
    for (uint64_t r = 0; r < static_cast<uint64_t>(dim); ++r)
        for (uint64_t c = 0; c < static_cast<uint64_t>(dim); ++c)
            if ((r & rest_mask) == (c & rest_mask))
                out(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
                    ut(static_cast<Eigen::Index>(gather0(r)), static_cast<Eigen::Index>(gather0(c)));
    return out;
}

/// Projection onto the span of a (possibly dependent) operator family, with
/// coefficients run through the pseudo-inverted Gram matrix.
class FrameProjector {
  public:
    explicit FrameProjector(std::vector<DenseOperator> ops) : ops_(std::move(ops)) {
        const int m = static_cast<int>(ops_.size());
        Eigen::MatrixXcd gram(m, m);
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j)
                gram(i, j) = (ops_[i].adjoint() * ops_[j]).trace();
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(gram);
        const double cutoff = 1e-9 * es.eigenvalues().maxCoeff();
        Eigen::VectorXd inv = es.eigenvalues();
        for (int i = 0; i < m; ++i) inv(i) = inv(i) > cutoff ? 1.0 / inv(i) : 0.0;
        pinv_ = es.eigenvectors() * inv.asDiagonal() * es.eigenvectors().adjoint();
    }

    DenseOperator apply(const DenseOperator& a) const {
        const int m = static_cast<int>(ops_.size());
        Eigen::VectorXcd b(m);
        for (int i = 0; i < m; ++i) b(i) = (ops_[i].adjoint() * a).trace();
        const Eigen::VectorXcd c = pinv_ * b;
        DenseOperator out = DenseOperator::Zero(a.rows(), a.cols());
        for (int i = 0; i < m; ++i) out += c(i) * ops_[i];
        return out;
    }

    /// Dense matrix of the projection on vectorized operators.
    Eigen::MatrixXcd superop() const {
        const Eigen::Index d = ops_.front().rows();
        const int m = static_cast<int>(ops_.size());
        Eigen::MatrixXcd v(d * d, m);
        for (int i = 0; i < m; ++i)
            v.col(i) = Eigen::Map<const Eigen::VectorXcd>(ops_[i].data(), d * d);
        return v * pinv_ * v.adjoint();
    }

  private:
    std::vector<DenseOperator> ops_;
    Eigen::MatrixXcd pinv_;
};

/// The 24 single-qubit Cliffords mod phase, by closure under H and S.
inline std::vector<Eigen::Matrix2cd> single_qubit_cliffords() {
    auto canonical = [](Eigen::Matrix2cd m) {
        for (Eigen::Index k = 0; k < 4; ++k) {
            const std::complex<double> e = m(k % 2, k / 2);
            if (std::abs(e) > 1e-8) {
                m *= std::abs(e) / e;
                break;
            }
        }
        return m;
    };
    auto key = [](const Eigen::Matrix2cd& m) {
        std::array<long long, 8> k{};
        int idx = 0;
        for (Eigen::Index i = 0; i < 2; ++i)
            for (Eigen::Index j = 0; j < 2; ++j) {
                k[idx++] = std::llround(m(i, j).real() * 1e6);
                k[idx++] = std::llround(m(i, j).imag() * 1e6);
            }
        return k;
    };
    Eigen::Matrix2cd h, s;
    h << 1, 1, 1, -1;
    h /= std::numbers::sqrt2;
    s << 1, 0, 0, std::complex<double>(0, 1);
    std::vector<Eigen::Matrix2cd> group{canonical(Eigen::Matrix2cd::Identity())};
    std::vector<std::array<long long, 8>> seen{key(group[0])};
    for (std::size_t head = 0; head < group.size(); ++head) {
        for (const auto& g : {h, s}) {
            const Eigen::Matrix2cd cand = canonical(g * group[head]);
            const auto ck = key(cand);
            bool found = false;
            for (const auto& k : seen)
                if (k == ck) {
                    found = true;
                    break;
                }
            if (!found) {
                group.push_back(cand);
                seen.push_back(ck);
            }
        }
    }
    if (group.size() != 24) throw std::logic_error("single-qubit Clifford closure != 24");
    return group;
}

/// Exact t-th moment superoperator of the uniform measure on Cl(1):
/// (1/24) sum_U Ad_{U^{x t}}.
inline Eigen::MatrixXcd dense_moment_cl1(int t) {
    if (t > 5) throw resource_error("dense_moment_cl1: limited to t <= 5");
    const Eigen::Index d = Eigen::Index{1} << t;
    Eigen::MatrixXcd acc = Eigen::MatrixXcd::Zero(d * d, d * d);
    for (const auto& u : single_qubit_cliffords())
        acc += ad_superop(ops::tensor_power_1q(u, t));
    return acc / 24.0;
}

/// Haar moment superoperator on t copies of one qubit: projection onto the
/// span of the vectorized permutation operators.
inline Eigen::MatrixXcd haar_moment_superop(int t) {
    if (t > 5) throw resource_error("haar_moment_superop: limited to t <= 5");
    std::vector<DenseOperator> perms;
    for (const auto& pi : ops::detail::all_permutations(t))
        perms.push_back(ops::permutation_operator(pi));
    return FrameProjector(std::move(perms)).superop();
}

/// P_Cl for n qubits, t copies, via projection onto span{Q_T^{x n}} instead
/// of a group sum.
inline FrameProjector clifford_frame_projector(int t, int n) {
    const auto sigma = lagrangian::enumerate_sigma(t);
    std::vector<DenseOperator> qops;
    qops.reserve(sigma.size());
    for (const auto& e : sigma) qops.push_back(site_tensor_power(ops::q_of(e), n, t));
    return FrameProjector(std::move(qops));
}

inline FrameProjector haar_frame_projector(int t, int n) {
    std::vector<DenseOperator> wops;
    for (const auto& pi : ops::detail::all_permutations(t))
        wops.push_back(site_tensor_power(ops::permutation_operator(pi), n, t));
    return FrameProjector(std::move(wops));
}

/// Dense oracle for ||[(P_Cl - P_H) R(K)]^k||_2, by sweeping the full
/// operator basis; independent of the small-basis route.
inline double dense_interleaved_norm(int t, int n, const Eigen::Matrix2cd& gate, int k) {
    const int m = n * t;
    if (m > 6) throw resource_error("dense_interleaved_norm: limited to nt <= 6");
    const Eigen::Index dim = Eigen::Index{1} << m;
    const FrameProjector pcl = clifford_frame_projector(t, n);
    const FrameProjector ph = haar_frame_projector(t, n);
    const DenseOperator big = gate_on_qubit0(gate, n, t);
    const DenseOperator big_dag = big.adjoint();

    auto apply_x = [&](DenseOperator a, int reps) {
        for (int i = 0; i < reps; ++i) {
            const DenseOperator ra = (big * a * big_dag + big_dag * a * big + a) / 3.0;
            a = pcl.apply(ra) - ph.apply(ra);
        }
        return a;
    };

    std::vector<double> partial(static_cast<std::size_t>(dim));
    parallel_for(static_cast<std::size_t>(dim), [&](std::size_t i) {
        double acc = 0.0;
        for (Eigen::Index j = 0; j < dim; ++j) {
            DenseOperator e = DenseOperator::Zero(dim, dim);
            e(static_cast<Eigen::Index>(i), j) = 1.0;
            acc += apply_x(std::move(e), k).squaredNorm();
        }
        partial[i] = acc;
    });
    double total = 0.0;
    for (double p : partial) total += p;
    return std::sqrt(total);
}

// ---------------------------------------------------------------------------
// Local random Clifford walk and its Hamiltonian

enum class WalkGate { h, s, s3, cx };

inline const std::vector<WalkGate>& canonical_gate_set() {
    static const std::vector<WalkGate> g{WalkGate::h, WalkGate::s, WalkGate::s3, WalkGate::cx};
    return g;
}

/// Gate sets must be closed under inverses: S and S^3 come in pairs, H and
/// CX are involutions.
inline void validate_gate_set(const std::vector<WalkGate>& gates) {
    if (gates.empty()) throw std::invalid_argument("gate set is empty");
    bool has_s = false, has_s3 = false;
    for (auto g : gates) {
        if (g == WalkGate::s) has_s = true;
        if (g == WalkGate::s3) has_s3 = true;
    }
    if (has_s != has_s3)
        throw std::invalid_argument("gate set not closed under inverses (S without S^3)");
}

/// One step of the local walk: uniform gate at a uniform site, periodic
/// boundary conditions.
inline void local_walk_step(Tableau& state, const std::vector<WalkGate>& gates, PhiloxRng& rng) {
    validate_gate_set(gates);
    const int n = state.n;
    const int site = static_cast<int>(rng.uniform_int(static_cast<uint64_t>(n)));
    switch (gates[rng.uniform_int(gates.size())]) {
        case WalkGate::h: state.apply_h(site); break;
        case WalkGate::s: state.apply_s(site); break;
        case WalkGate::s3: state.apply_s3(site); break;
        case WalkGate::cx:
            if (n < 2) throw std::invalid_argument("CX requires n >= 2");
            state.apply_cx(site, (site + 1) % n);
            break;
    }
}

namespace detail {

/// Conjugates an m-qubit Pauli string by gate g^{x t} applied at walk site i.
inline void conj_walk_gate(PauliString& p, WalkGate g, int site, int n, int t) {
    for (int c = 0; c < t; ++c) {
        const int a = c * n + site;
        const int b = c * n + (site + 1) % n;
        switch (g) {
            case WalkGate::h: conj_h(p, a); break;
            case WalkGate::s: conj_s(p, a); break;
            case WalkGate::s3:
                conj_s(p, a);
                conj_s(p, a);
                conj_s(p, a);
                break;
            case WalkGate::cx: conj_cx(p, a, b); break;
        }
    }
}

}  // namespace detail

/// Delta_t(sigma_G) in the Pauli-string basis (a real matrix: Cliffords act
/// as signed permutations of Pauli strings). Dimension 4^{nt}.
inline Eigen::MatrixXd walk_moment_matrix_pauli(int t, int n,
                                                const std::vector<WalkGate>& gates =
                                                    canonical_gate_set()) {
    validate_gate_set(gates);
    const int m = n * t;
    if (m > 6) throw resource_error("walk_moment_matrix_pauli: limited to nt <= 6");
    const std::size_t dim = std::size_t{1} << (2 * m);
    Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(dim, dim);
    const double weight = 1.0 / (static_cast<double>(gates.size()) * n);
    const uint64_t xmask = (uint64_t{1} << m) - 1;
    for (int site = 0; site < n; ++site)
        for (auto g : gates) {
            parallel_for(dim, [&](std::size_t idx) {
                PauliString p;
                p.x = idx & xmask;
                p.z = idx >> m;
                detail::conj_walk_gate(p, g, site, n, t);
                const std::size_t out = p.x | (p.z << m);
                // column idx sends weight to row out (sign included)
                acc(out, idx) += p.sign ? -weight : weight;
            });
        }
    return acc;
}

/// Independent dense route to the same matrix: conjugate each dense Pauli by
/// the dense gate unitary and read off the signed string.
inline Eigen::MatrixXd walk_moment_matrix_dense(int t, int n,
                                                const std::vector<WalkGate>& gates =
                                                    canonical_gate_set()) {
    validate_gate_set(gates);
    const int m = n * t;
    if (m > 6) throw resource_error("walk_moment_matrix_dense: limited to nt <= 6");
    const std::size_t dim = std::size_t{1} << (2 * m);
    const Eigen::Index hdim = Eigen::Index{1} << m;
    Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(dim, dim);
    const double weight = 1.0 / (static_cast<double>(gates.size()) * n);
    const uint64_t xmask = (uint64_t{1} << m) - 1;
    Eigen::Matrix2cd hm, sm;
    hm << 1, 1, 1, -1;
    hm /= std::numbers::sqrt2;
    sm << 1, 0, 0, std::complex<double>(0, 1);
    for (int site = 0; site < n; ++site)
        for (auto g : gates) {
            DenseOperator u1;  // the gate on its own 1- or 2-qubit space
            switch (g) {
                case WalkGate::h: u1 = ops::tensor_power_1q(hm, 1); break;
                case WalkGate::s: u1 = ops::tensor_power_1q(sm, 1); break;
                case WalkGate::s3: u1 = ops::tensor_power_1q((sm * sm * sm).eval(), 1); break;
                case WalkGate::cx: {
                    // control = bit 0 (qubit a), target = bit 1 (qubit b)
                    u1 = DenseOperator::Zero(4, 4);
                    u1(0, 0) = 1;
                    u1(1, 3) = 1;
                    u1(2, 2) = 1;
                    u1(3, 1) = 1;
                    break;
                }
            }
            DenseOperator full = DenseOperator::Identity(hdim, hdim);
            for (int c = 0; c < t; ++c) {
                const int a = c * n + site;
                const int b = c * n + (site + 1) % n;
                DenseOperator embedded(hdim, hdim);
                if (g == WalkGate::cx) {
                    for (Eigen::Index r = 0; r < hdim; ++r)
                        for (Eigen::Index col = 0; col < hdim; ++col) {
                            const uint64_t rr = static_cast<uint64_t>(r);
                            const uint64_t cc = static_cast<uint64_t>(col);
                            const uint64_t rest = ~((uint64_t{1} << a) | (uint64_t{1} << b));
                            if ((rr & rest) != (cc & rest)) {
                                embedded(r, col) = 0;
                                continue;
                            }
                            const Eigen::Index rs = ((rr >> a) & 1) | (((rr >> b) & 1) << 1);
                            const Eigen::Index cs = ((cc >> a) & 1) | (((cc >> b) & 1) << 1);
                            embedded(r, col) = u1(rs, cs);
                        }
                } else {
                    for (Eigen::Index r = 0; r < hdim; ++r)
                        for (Eigen::Index col = 0; col < hdim; ++col) {
                            const uint64_t rr = static_cast<uint64_t>(r);
                            const uint64_t cc = static_cast<uint64_t>(col);
                            const uint64_t rest = ~(uint64_t{1} << a);
                            if ((rr & rest) != (cc & rest)) {
                                embedded(r, col) = 0;
                                continue;
                            }
                            embedded(r, col) = u1((rr >> a) & 1, (cc >> a) & 1);
                        }
                }
                full = embedded * full;
            }
            for (std::size_t idx = 0; idx < dim; ++idx) {
                PauliString p;
                p.x = idx & xmask;
                p.z = idx >> m;
                const Eigen::MatrixXcd img = full * dense_pauli(p, m) * full.adjoint();
                // identify +-(Pauli string)
                Eigen::Index r0 = 0;
                img.col(0).cwiseAbs().maxCoeff(&r0);
                PauliString q;
                q.x = static_cast<uint64_t>(r0);
                for (int j = 0; j < m; ++j) {
                    const Eigen::Index cl = Eigen::Index{1} << j;
                    const std::complex<double> ratio =
                        img(static_cast<Eigen::Index>(q.x ^ static_cast<uint64_t>(cl)), cl) / img(r0, 0);
                    if (std::abs(ratio + 1.0) < 1e-6) q.z |= uint64_t{1} << j;
                }
                std::complex<double> lead = img(r0, 0);
                const int ycount = std::popcount(q.x & q.z);
                for (int y = 0; y < ycount; ++y) lead /= std::complex<double>(0, 1);
                q.sign = std::abs(lead + 1.0) < 1e-6 ? 1 : 0;
                const std::size_t out = q.x | (q.z << m);
                acc(out, idx) += q.sign ? -weight : weight;
            }
        }
    return acc;
}

/// Local Hamiltonian term h_{site,site+1} = (1/|G|) sum_g (id - Ad(g^{x t}))
/// in the Pauli basis (embedded in the full 4^{nt} space).
inline Eigen::MatrixXd local_walk_term_pauli(int t, int n, int site,
                                             const std::vector<WalkGate>& gates =
                                                 canonical_gate_set()) {
    validate_gate_set(gates);
    const int m = n * t;
    if (m > 6) throw resource_error("local_walk_term_pauli: limited to nt <= 6");
    const std::size_t dim = std::size_t{1} << (2 * m);
    Eigen::MatrixXd acc = Eigen::MatrixXd::Identity(dim, dim);
    const double weight = 1.0 / static_cast<double>(gates.size());
    const uint64_t xmask = (uint64_t{1} << m) - 1;
    for (auto g : gates)
        for (std::size_t idx = 0; idx < dim; ++idx) {
            PauliString p;
            p.x = idx & xmask;
            p.z = idx >> m;
            detail::conj_walk_gate(p, g, site, n, t);
            acc(p.x | (p.z << m), idx) -= p.sign ? -weight : weight;
        }
    return acc;
}

struct GapResult {
    double gap = 0.0;
    int ground_dim = 0;
    double ground_energy = 0.0;
    double lambda2 = 0.0;  // second largest eigenvalue of Delta_t(sigma_G)
};

/// Spectral gap of H_{n,t} = n (id - Delta_t(sigma_G)) by dense eigensolve
/// in the Pauli basis.
inline GapResult hamiltonian_gap(int t, int n,
                                 const std::vector<WalkGate>& gates = canonical_gate_set()) {
    const Eigen::MatrixXd delta = walk_moment_matrix_pauli(t, n, gates);
    const Eigen::Index dim = delta.rows();
    Eigen::MatrixXd ham = -delta * n;
    ham.diagonal().array() += n;
    ham = 0.5 * (ham + ham.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(ham, Eigen::EigenvaluesOnly);
    GapResult out;
    out.ground_energy = es.eigenvalues()(0);
    const double thresh = 1e-8 * n;
    int gd = 0;
    double gap = 0.0;
    for (Eigen::Index i = 0; i < dim; ++i) {
        if (es.eigenvalues()(i) < thresh)
            ++gd;
        else {
            gap = es.eigenvalues()(i);
            break;
        }
    }
    out.ground_dim = gd;
    out.gap = gap;
    out.lambda2 = 1.0 - gap / n;
    return out;
}

// ---------------------------------------------------------------------------
// Monte Carlo frame potentials

struct FramePotentialResult {
    double estimate = 0.0;
    double stderr_jackknife = 0.0;
    uint64_t samples = 0;
};

namespace detail {

inline FramePotentialResult summarize(const std::vector<double>& vals) {
    const std::size_t n = vals.size();
    double mean = 0.0;
    for (double v : vals) mean += v;
    mean /= static_cast<double>(n);
    // delete-one jackknife of the mean: reduces to sum (v - mean)^2 / (n(n-1))
    double ss = 0.0;
    for (double v : vals) ss += (v - mean) * (v - mean);
    FramePotentialResult out;
    out.estimate = mean;
    out.stderr_jackknife = std::sqrt(ss / (static_cast<double>(n) * (n - 1.0)));
    out.samples = n;
    return out;
}

inline Eigen::MatrixXcd haar_unitary(Eigen::Index d, PhiloxRng& rng) {
    Eigen::MatrixXcd g(d, d);
    for (Eigen::Index i = 0; i < d; ++i)
        for (Eigen::Index j = 0; j < d; ++j) g(i, j) = {rng.normal(), rng.normal()};
    Eigen::HouseholderQR<Eigen::MatrixXcd> qr(g);
    Eigen::MatrixXcd q = qr.householderQ();
    const Eigen::MatrixXcd r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (Eigen::Index i = 0; i < d; ++i) q.col(i) *= r(i, i) / std::abs(r(i, i));
    return q;
}

}  // namespace detail

enum class Family { haar, clifford };

/// Frame potential E |tr(U^dag V)|^{2t} over independent pairs; group
/// measures give the commutant dimension, so uniform Cliffords yield
/// |Sigma_{t,t}| once n >= t-1 and the Haar value is t!.
inline FramePotentialResult frame_potential_mc(int t, int n, Family family, uint64_t samples,
                                               uint64_t seed) {
    if (n > 5) throw resource_error("frame_potential_mc: dense traces limited to n <= 5");
    std::vector<double> vals(samples);
    parallel_for(samples, [&](std::size_t i) {
        PhiloxRng rng(seed, 2 * i);
        PhiloxRng rng2(seed, 2 * i + 1);
        Eigen::MatrixXcd u, v;
        if (family == Family::haar) {
            u = detail::haar_unitary(Eigen::Index{1} << n, rng);
            v = detail::haar_unitary(Eigen::Index{1} << n, rng2);
        } else {
            u = tableau_to_unitary(sample_clifford(n, rng));
            v = tableau_to_unitary(sample_clifford(n, rng2));
        }
        const double a = std::abs((u.adjoint() * v).trace());
        vals[i] = std::pow(a * a, t);
    });
    return detail::summarize(vals);
}

/// Frame potentials of the K-interleaved measure for every depth 0..k_max in
/// one pass: each sample grows a pair of circuits layer by layer (common
/// random numbers across depths, so the decreasing trend is not washed out
/// by independent noise).
inline std::vector<FramePotentialResult> interleaved_fp_sweep(int t, int n,
                                                              const Eigen::Matrix2cd& gate,
                                                              int k_max, uint64_t samples,
                                                              uint64_t seed) {
    if (n > 5) throw resource_error("interleaved_fp_sweep: dense traces limited to n <= 5");
    const Eigen::Index d = Eigen::Index{1} << n;
    // gate embedded on qubit 0
    Eigen::MatrixXcd kfull = Eigen::MatrixXcd::Zero(d, d);
    for (Eigen::Index r = 0; r < d; ++r)
        for (Eigen::Index c = 0; c < d; ++c)
            if ((r >> 1) == (c >> 1)) kfull(r, c) = gate(r & 1, c & 1);
    const Eigen::MatrixXcd kdag = kfull.adjoint();

    std::vector<std::vector<double>> vals(k_max + 1, std::vector<double>(samples));
    parallel_for(samples, [&](std::size_t i) {
        PhiloxRng rng(seed, 2 * i);
        PhiloxRng rng2(seed, 2 * i + 1);
        Eigen::MatrixXcd u = tableau_to_unitary(sample_clifford(n, rng));
        Eigen::MatrixXcd v = tableau_to_unitary(sample_clifford(n, rng2));
        for (int k = 0; k <= k_max; ++k) {
            const double a = std::abs((u.adjoint() * v).trace());
            vals[k][i] = std::pow(a * a, t);
            if (k == k_max) break;
            const auto grow = [&](Eigen::MatrixXcd& w, PhiloxRng& r) {
                const uint64_t pick = r.uniform_int(3);
                if (pick == 0)
                    w = (kfull * w).eval();
                else if (pick == 1)
                    w = (kdag * w).eval();
                w = (tableau_to_unitary(sample_clifford(n, r)) * w).eval();
            };
            grow(u, rng);
            grow(v, rng2);
        }
    });
    std::vector<FramePotentialResult> out;
    out.reserve(k_max + 1);
    for (int k = 0; k <= k_max; ++k) out.push_back(detail::summarize(vals[k]));
    return out;
}

/// Single-depth convenience wrapper.
inline FramePotentialResult interleaved_circuit_mc(int t, int n, const Eigen::Matrix2cd& gate,
                                                   int k, uint64_t samples, uint64_t seed) {
    return interleaved_fp_sweep(t, n, gate, k, samples, seed).back();
}

}  // namespace cdl::stabilizer
