#pragma once

#include <bit>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "cdl/errors.hpp"

// Exact linear algebra over F_2 on word-packed vectors, plus the mod-4
// weight forms q(x) = x.x mod 4 and qq(x,y) = x.x - y.y mod 4.
//
// Coordinate i of a vector is bit i of the word, so ambient dimensions are
// limited to 64. Subspaces are kept in reduced row echelon form with
// strictly increasing pivots; that makes the basis canonical, so subspace
// equality is basis equality and bases can be hashed for deduplication.

namespace cdl::gf2 {

struct BitVec {
    uint64_t bits = 0;
    int length = 0;

    BitVec() = default;
    BitVec(uint64_t b, int len) : bits(b), length(len) {
        if (len < 0 || len > 64) throw std::invalid_argument("BitVec length must be in [0,64]");
        if (len < 64) bits &= (uint64_t{1} << len) - 1;
    }

    bool get(int i) const { return (bits >> i) & 1u; }
    friend bool operator==(const BitVec& a, const BitVec& b) = default;

    std::string to_string() const {
        std::string s(length, '0');
        for (int i = 0; i < length; ++i)
            if (get(i)) s[i] = '1';
        return s;
    }

    /// Parses "1010" with coordinate 0 first.
    static BitVec parse(const std::string& s) {
        BitVec v(0, static_cast<int>(s.size()));
        for (std::size_t i = 0; i < s.size(); ++i)
            if (s[i] == '1') v.bits |= uint64_t{1} << i;
        return v;
    }
};

inline int hamming_weight(const BitVec& v) { return std::popcount(v.bits); }
inline int hamming_weight(uint64_t w) { return std::popcount(w); }

/// x.x mod 4 (= popcount mod 4).
inline int q_mod4(const BitVec& x) { return hamming_weight(x) & 3; }
inline int q_mod4(uint64_t x) { return std::popcount(x) & 3; }

/// x.x - y.y mod 4.
inline int qq_mod4(const BitVec& x, const BitVec& y) {
    if (x.length != y.length) throw std::invalid_argument("qq_mod4: length mismatch");
    return (hamming_weight(x) - hamming_weight(y)) & 3;
}

/// Mod-2 inner product.
inline int dot2(uint64_t a, uint64_t b) { return std::popcount(a & b) & 1; }

class F2Subspace {
  public:
    F2Subspace() = default;
    explicit F2Subspace(int ambient_dim) : ambient_(ambient_dim) {
        if (ambient_dim < 0 || ambient_dim > 64)
            throw std::invalid_argument("ambient dimension must be in [0,64]");
    }

    static F2Subspace from_rows(const std::vector<uint64_t>& rows, int ambient_dim) {
        F2Subspace s(ambient_dim);
        for (uint64_t r : rows) s.insert(r);
        return s;
    }

    static F2Subspace from_rows(const std::vector<BitVec>& rows) {
        if (rows.empty()) throw std::invalid_argument("from_rows: ambient dimension unknown for empty list");
        F2Subspace s(rows.front().length);
        for (const BitVec& r : rows) {
            if (r.length != s.ambient_) throw std::invalid_argument("from_rows: mixed vector lengths");
            s.insert(r.bits);
        }
        return s;
    }

    int ambient_dim() const { return ambient_; }
    int dim() const { return static_cast<int>(rows_.size()); }
    const std::vector<uint64_t>& basis() const { return rows_; }

    /// Inserts a vector and re-normalizes to RREF. Returns true if the
    /// dimension grew.
    bool insert(uint64_t v) {
        check_range(v);
        v = reduce(v);
        if (v == 0) return false;
        const int p = std::countr_zero(v);
        std::size_t pos = 0;
        while (pos < rows_.size() && std::countr_zero(rows_[pos]) < p) ++pos;
        rows_.insert(rows_.begin() + pos, v);
        // clear the new pivot column in the rows above
        for (std::size_t i = 0; i < pos; ++i)
            if ((rows_[i] >> p) & 1u) rows_[i] ^= v;
        return true;
    }

    /// Reduces v by the basis; the result is 0 iff v is a member.
    uint64_t reduce(uint64_t v) const {
        for (uint64_t row : rows_) {
            const int p = std::countr_zero(row);
            if ((v >> p) & 1u) v ^= row;
        }
        return v;
    }

    bool member(uint64_t v) const {
        check_range(v);
        return reduce(v) == 0;
    }
    bool member(const BitVec& v) const {
        if (v.length != ambient_) throw std::invalid_argument("member: dimension mismatch");
        return member(v.bits);
    }

    /// All 2^dim elements (Gray-code order; element 0 first).
    std::vector<uint64_t> elements() const {
        std::vector<uint64_t> out(std::size_t{1} << dim());
        out[0] = 0;
        for (std::size_t i = 1; i < out.size(); ++i)
            out[i] = out[i - 1] ^ rows_[std::countr_zero(i)];
        return out;
    }

    friend bool operator==(const F2Subspace& a, const F2Subspace& b) {
        return a.ambient_ == b.ambient_ && a.rows_ == b.rows_;
    }

  private:
    void check_range(uint64_t v) const {
        if (ambient_ < 64 && (v >> ambient_) != 0)
            throw std::invalid_argument("vector outside ambient space");
    }

    int ambient_ = 0;
    std::vector<uint64_t> rows_;  // RREF, pivots strictly increasing
};

inline std::pair<F2Subspace, int> rref(const std::vector<BitVec>& rows) {
    if (rows.empty()) return {F2Subspace(0), 0};
    F2Subspace s = F2Subspace::from_rows(rows);
    return {s, s.dim()};
}

inline F2Subspace sum(const F2Subspace& a, const F2Subspace& b) {
    if (a.ambient_dim() != b.ambient_dim()) throw std::invalid_argument("sum: dimension mismatch");
    F2Subspace s = a;
    for (uint64_t r : b.basis()) s.insert(r);
    return s;
}

/// Intersection via the Zassenhaus block construction: rows (r|r) for r in A
/// and (r|0) for r in B are brought to echelon form; rows whose left half is
/// zero carry an intersection basis in the right half.
inline F2Subspace intersect(const F2Subspace& a, const F2Subspace& b) {
    const int m = a.ambient_dim();
    if (m != b.ambient_dim()) throw std::invalid_argument("intersect: dimension mismatch");
    using u128 = unsigned __int128;
    std::vector<u128> slot(2 * m, 0);  // echelon rows keyed by highest set bit
    auto high_bit = [](u128 v) -> int {
        const uint64_t hi = static_cast<uint64_t>(v >> 64);
        if (hi != 0) return 127 - std::countl_zero(hi);
        return 63 - std::countl_zero(static_cast<uint64_t>(v));
    };
    auto eliminate = [&](u128 v) {
        while (v != 0) {
            const int h = high_bit(v);
            if (slot[h] == 0) {
                slot[h] = v;
                return;
            }
            v ^= slot[h];
        }
    };
    for (uint64_t r : a.basis()) eliminate((u128(r) << m) | r);
    for (uint64_t r : b.basis()) eliminate(u128(r) << m);
    F2Subspace out(m);
    for (int h = 0; h < m; ++h)  // highest bit in the right half: left half is zero
        if (slot[h] != 0) out.insert(static_cast<uint64_t>(slot[h]));
    return out;
}

/// Orthogonal complement w.r.t. the mod-2 inner product.
inline F2Subspace perp(const F2Subspace& s) {
    const int m = s.ambient_dim();
    F2Subspace out(m);
    // kernel of the basis-row map: free coordinates are the non-pivots
    uint64_t pivot_mask = 0;
    for (uint64_t r : s.basis()) pivot_mask |= uint64_t{1} << std::countr_zero(r);
    for (int f = 0; f < m; ++f) {
        if ((pivot_mask >> f) & 1u) continue;
        uint64_t v = uint64_t{1} << f;
        for (uint64_t r : s.basis())
            if ((r >> f) & 1u) v |= uint64_t{1} << std::countr_zero(r);
        out.insert(v);
    }
    return out;
}

}  // namespace cdl::gf2
