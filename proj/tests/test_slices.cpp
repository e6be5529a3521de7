#include "doctest.h"

#include "ssc/slices.hpp"

using namespace ssc;
using OS = OperationSymbol;

TEST_CASE("theory names round-trip") {
    for (auto t : {Theory::KGL, Theory::KQ, Theory::KW}) CHECK(parse_theory(to_string(t)) == t);
    CHECK_THROWS_AS(parse_theory("KO"), std::invalid_argument);
}

TEST_CASE("slice summands follow the wedge decompositions") {
    auto one = slice_summands(Theory::KGL, 2, 3, -5, 8);
    REQUIRE(one.size() == 1);
    CHECK(one[0] == SummandSpec{3, 3, 2});
    CHECK(one[0].suspension() == std::pair(6, 3));

    auto kq_even = slice_summands(Theory::KQ, 2, 4, -3, 10);
    REQUIRE(kq_even.size() == 8);  // j = -3..4
    for (const auto& s : kq_even) {
        CHECK(s.j <= 4);
        CHECK(s.level == (s.j == 4 ? 2 : 1));
        CHECK(s.suspension() == std::pair(4 + s.j, 4));
    }

    auto kq_odd = slice_summands(Theory::KQ, 2, 5, 0, 9);
    REQUIRE(kq_odd.size() == 6);  // j = 0..5
    for (const auto& s : kq_odd) CHECK(s.level == 1);

    auto kq_mod2 = slice_summands(Theory::KQ, 1, 4, 0, 6);
    REQUIRE(kq_mod2.size() == 5);
    for (const auto& s : kq_mod2) CHECK(s.level == 1);

    auto kw = slice_summands(Theory::KW, 1, 0, -4, 4);
    REQUIRE(kw.size() == 9);
    for (const auto& s : kw) CHECK(s.level == 1);
    auto kw4 = slice_summands(Theory::KW, 4, 7, -2, 2);
    REQUIRE(kw4.size() == 5);
    for (const auto& s : kw4) CHECK(s.level == 1);

    CHECK(has_summand(Theory::KQ, 1, 2, 2));
    CHECK_FALSE(has_summand(Theory::KQ, 1, 2, 3));
    CHECK_FALSE(has_summand(Theory::KGL, 1, 2, 1));
    CHECK(summand_level(Theory::KGL, 3, -2, -2) == 3);
    CHECK(summand_level(Theory::KQ, 3, -2, -2) == 3);
    CHECK(summand_level(Theory::KQ, 3, -1, -1) == 1);
    CHECK_THROWS_AS(summand_level(Theory::KQ, 2, 3, 4), std::invalid_argument);
    CHECK_THROWS_AS(slice_summands(Theory::KW, 0, 0, 0, 1), std::invalid_argument);
}

TEST_CASE("differential components match the stated quintuples") {
    // Witt theory mod 2, by offset class
    auto w1 = d1_components(Theory::KW, 1, 6, 1);
    CHECK(w1.entries[4] == OS::sq3sq1());
    CHECK(w1.entries[3] == OS::sq2sq1() + OS::sq3());
    CHECK(w1.entries[2] == OS::sq2());
    CHECK(w1.entries[1] == OS::mul_rho() + OS::mul_tau() * OS::sq1());
    CHECK(w1.entries[0].is_zero());

    auto w0 = d1_components(Theory::KW, 1, 3, 0);
    CHECK(w0.entries[4] == OS::sq3sq1());
    CHECK(w0.entries[3].is_zero());
    CHECK(w0.entries[2] == OS::sq2());
    CHECK(w0.entries[1].is_zero());
    CHECK(w0.entries[0].is_zero());

    auto w2 = d1_components(Theory::KW, 1, 5, 2);
    CHECK(w2.entries[2] == OS::sq2() + OS::mul_rho() * OS::sq1());
    CHECK(w2.entries[0] == OS::mul_tau());
    auto w3 = d1_components(Theory::KW, 1, 5, 3);
    CHECK(w3.entries[3] == OS::sq2sq1() + OS::sq3());
    CHECK(w3.entries[1] == OS::mul_tau() * OS::sq1());
    CHECK(w3.entries[0] == OS::mul_tau());

    // hermitian theory mod 2 on the top summand
    auto h2 = d1_components(Theory::KQ, 1, 6, 6);
    CHECK(h2.entries[4].is_zero());
    CHECK(h2.entries[3] == OS::sq2sq1());
    CHECK(h2.entries[2] == OS::sq2() + OS::mul_rho() * OS::sq1());
    CHECK(h2.entries[1] == OS::mul_tau() * OS::sq1());
    CHECK(h2.entries[0] == OS::mul_tau());

    auto h0 = d1_components(Theory::KQ, 1, 8, 8);
    CHECK(h0.entries[3] == OS::sq2sq1());
    CHECK(h0.entries[2] == OS::sq2() + OS::mul_rho() * OS::sq1());
    CHECK(h0.entries[1].is_zero());
    CHECK(h0.entries[0].is_zero());

    // hermitian theory mod 2^n on the top summand
    auto t0 = d1_components(Theory::KQ, 2, 8, 8);
    CHECK(t0.entries[4].is_zero());
    CHECK(t0.entries[3] == OS::sq2() * OS::del_2n_to_2(2));
    CHECK(t0.entries[2] == OS::sq2() * OS::pr(2));
    CHECK(t0.entries[1].is_zero());
    CHECK(t0.entries[0].is_zero());

    auto t2 = d1_components(Theory::KQ, 3, 6, 6);
    CHECK(t2.entries[3] == OS::sq2() * OS::del_2n_to_2(3));
    CHECK(t2.entries[2] == OS::sq2() * OS::pr(3));
    CHECK(t2.entries[1] == OS::mul_tau() * OS::del_2n_to_2(3));
    CHECK(t2.entries[0] == OS::mul_tau() * OS::pr(3));

    auto t1 = d1_components(Theory::KQ, 2, 5, 5);
    CHECK(t1.entries[3] == OS::inc(2) * OS::sq2sq1());
    CHECK(t1.entries[2] == OS::sq2());
    auto t3 = d1_components(Theory::KQ, 2, 7, 7);
    CHECK(t3.entries[3] == OS::inc(2) * OS::sq2sq1());
    CHECK(t3.entries[2] == OS::sq2() + OS::mul_rho() * OS::sq1());
    CHECK(t3.entries[0] == OS::mul_tau());

    // hermitian theory mod 2^n just below the top
    auto s0 = d1_components(Theory::KQ, 2, 5, 4);
    CHECK(s0.entries[4] == OS::del_2_to_2n(2) * OS::sq2sq1());
    CHECK(s0.entries[2] == OS::sq2());
    auto s2 = d1_components(Theory::KQ, 2, 7, 6);
    CHECK(s2.entries[4] == OS::del_2_to_2n(2) * OS::sq2sq1());
    CHECK(s2.entries[2] == OS::sq2() + OS::mul_rho() * OS::sq1());
    CHECK(s2.entries[0] == OS::mul_tau());
    auto s1 = d1_components(Theory::KQ, 2, 6, 5);
    CHECK(s1.entries[4] == OS::sq3sq1());
    auto s3 = d1_components(Theory::KQ, 2, 8, 7);
    CHECK(s3.entries[4] == OS::sq3sq1());
    CHECK(s3.entries[0] == OS::mul_tau());

    // the complex-oriented theory carries the first Milnor operation at d = 3
    auto kgl = d1_components(Theory::KGL, 1, 4, 4);
    CHECK(kgl.entries[3] == OS::sq3() + OS::sq2sq1());
    for (int d : {0, 1, 2, 4}) CHECK(kgl.entries[d].is_zero());
    auto kgl2 = d1_components(Theory::KGL, 2, 4, 4);
    CHECK(kgl2.entries[3] == OS::del_2_to_2n(2) * OS::sq2() * OS::pr(2) +
                                 OS::inc(2) * OS::sq2() * OS::del_2n_to_2(2));
    CHECK_THROWS_AS(d1_components(Theory::KGL, 1, 4, 3), std::invalid_argument);
}

TEST_CASE("quintuples stay internally consistent across a window") {
    // construction validates bidegrees, target existence, and levels
    for (auto t : {Theory::KGL, Theory::KQ, Theory::KW})
        for (int n : {1, 2, 3})
            for (int q = -6; q <= 10; ++q)
                for (int j = q - 9; j <= q + 2; ++j) {
                    if (!has_summand(t, n, q, j)) continue;
                    auto spec = d1_components(t, n, q, j);
                    for (int d = 0; d <= 4; ++d) {
                        if (spec.entries[d].is_zero()) continue;
                        CHECK(spec.entries[d].bidegree() == std::pair(d, 1));
                        // suspension arithmetic pins the offset decoding: the
                        // component lands in the once-shifted next slice, so
                        // (q+j, q) + (d, 1) = (q+1+j', q+1) + (1, 0)
                        int jt = j + DifferentialSpec::target_offset(d);
                        auto src = SummandSpec{q, j, 1}.suspension();
                        auto dst = SummandSpec{q + 1, jt, 1}.suspension();
                        CHECK(src.first + d == dst.first + 1);
                        CHECK(src.second + 1 == dst.second);
                        // cell coordinates: piece i of column p maps to piece
                        // i + d of column p - 1
                        for (int p : {0, 3}) {
                            int i = q + j - p;
                            int it = (q + 1) + jt - (p - 1);
                            CHECK(it == i + d);
                        }
                    }
                }

    // the mod-2 hermitian components away from the top equal the Witt ones
    for (int q = -4; q <= 8; ++q)
        for (int j = q - 8; j < q; ++j)
            CHECK(d1_components(Theory::KQ, 1, q, j).entries ==
                  d1_components(Theory::KW, 1, q, j).entries);

    // mod 2^n, n >= 2, the odd-position Witt components vanish
    for (int n : {2, 3, 4})
        for (int q = -4; q <= 8; ++q)
            for (int j = q - 6; j <= q; ++j) {
                auto spec = d1_components(Theory::KW, n, q, j);
                CHECK(spec.entries[3].is_zero());
                CHECK(spec.entries[1].is_zero());
            }
}
