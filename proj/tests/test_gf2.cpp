#include <catch2/catch_amalgamated.hpp>

#include <set>

#include "cdl/gf2.hpp"
#include "cdl/rng.hpp"

using namespace cdl;
using gf2::BitVec;
using gf2::F2Subspace;

namespace {

// Oracle: all elements of the span by explicit closure, for small ambients.
std::set<uint64_t> span_closure(const std::vector<uint64_t>& gens, int ambient) {
    std::set<uint64_t> span{0};
    bool grew = true;
    while (grew) {
        grew = false;
        for (uint64_t g : gens)
            for (uint64_t s : std::set<uint64_t>(span))
                if (span.insert(s ^ g).second) grew = true;
    }
    (void)ambient;
    return span;
}

F2Subspace random_subspace(PhiloxRng& rng, int ambient, int target_rows) {
    F2Subspace s(ambient);
    for (int i = 0; i < target_rows; ++i)
        s.insert(rng.next_u64() & ((uint64_t{1} << ambient) - 1));
    return s;
}

}  // namespace

TEST_CASE("rref basics") {
    auto [s1, r1] = gf2::rref({BitVec::parse("110"), BitVec::parse("011")});
    CHECK(r1 == 2);
    CHECK(s1.dim() == 2);

    auto [s2, r2] = gf2::rref({BitVec::parse("111"), BitVec::parse("111")});
    CHECK(r2 == 1);

    auto [s3, r3] = gf2::rref(std::vector<BitVec>{});
    CHECK(r3 == 0);
    CHECK(s3.dim() == 0);

    CHECK_THROWS_AS(gf2::rref({BitVec::parse("10"), BitVec::parse("100")}),
                    std::invalid_argument);
}

TEST_CASE("rref is idempotent and membership matches exhaustive span") {
    PhiloxRng rng(7, 1);
    for (int trial = 0; trial < 50; ++trial) {
        const int ambient = 2 + static_cast<int>(rng.uniform_int(10));  // <= 12
        std::vector<uint64_t> gens;
        const int k = 1 + static_cast<int>(rng.uniform_int(4));
        for (int i = 0; i < k; ++i)
            gens.push_back(rng.next_u64() & ((uint64_t{1} << ambient) - 1));
        F2Subspace s = F2Subspace::from_rows(gens, ambient);
        F2Subspace again = F2Subspace::from_rows(s.basis(), ambient);
        CHECK(s == again);

        auto span = span_closure(gens, ambient);
        CHECK(span.size() == (std::size_t{1} << s.dim()));
        for (uint64_t v = 0; v < (uint64_t{1} << ambient); ++v)
            CHECK(s.member(v) == (span.count(v) > 0));
    }
}

TEST_CASE("weights and mod-4 forms") {
    CHECK(gf2::hamming_weight(BitVec::parse("0000")) == 0);
    CHECK(gf2::hamming_weight(BitVec::parse("1111")) == 4);
    CHECK(gf2::hamming_weight(BitVec::parse("1010")) == 2);

    CHECK(gf2::q_mod4(BitVec::parse("1111")) == 0);
    CHECK(gf2::q_mod4(BitVec::parse("10100")) == 2);
    CHECK(gf2::q_mod4(BitVec::parse("1")) == 1);

    CHECK(gf2::qq_mod4(BitVec::parse("1111"), BitVec::parse("0000")) == 0);
    CHECK(gf2::qq_mod4(BitVec::parse("1000"), BitVec::parse("0100")) == 0);
    CHECK(gf2::qq_mod4(BitVec::parse("1100"), BitVec::parse("1000")) == 1);
    CHECK_THROWS_AS(gf2::qq_mod4(BitVec::parse("11"), BitVec::parse("111")),
                    std::invalid_argument);
}

TEST_CASE("perp of the all-ones line is the even-weight subspace") {
    F2Subspace s = F2Subspace::from_rows({uint64_t{0b1111}}, 4);
    F2Subspace p = gf2::perp(s);
    CHECK(p.dim() == 3);
    for (uint64_t v = 0; v < 16; ++v)
        CHECK(p.member(v) == (std::popcount(v) % 2 == 0));
}

TEST_CASE("subspace algebra identities") {
    PhiloxRng rng(11, 2);
    for (int trial = 0; trial < 100; ++trial) {
        const int ambient = 2 + static_cast<int>(rng.uniform_int(11));
        F2Subspace a = random_subspace(rng, ambient, 1 + rng.uniform_int(4));
        F2Subspace b = random_subspace(rng, ambient, 1 + rng.uniform_int(4));

        // dim(A+B) + dim(A cap B) = dim A + dim B
        CHECK(gf2::sum(a, b).dim() + gf2::intersect(a, b).dim() == a.dim() + b.dim());

        // perp(perp(A)) = A,  dim A + dim perp(A) = ambient
        F2Subspace pp = gf2::perp(gf2::perp(a));
        CHECK(pp == a);
        CHECK(a.dim() + gf2::perp(a).dim() == ambient);

        CHECK(gf2::intersect(a, a) == a);

        // membership consistency of the intersection
        F2Subspace cap = gf2::intersect(a, b);
        for (uint64_t v : cap.elements()) {
            CHECK(a.member(v));
            CHECK(b.member(v));
        }
    }

    CHECK(gf2::sum(F2Subspace::from_rows({uint64_t{0b01}}, 2),
                   F2Subspace::from_rows({uint64_t{0b10}}, 2))
              .dim() == 2);
    CHECK_THROWS_AS(gf2::sum(F2Subspace(2), F2Subspace(3)), std::invalid_argument);
}
