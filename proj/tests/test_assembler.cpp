#include "ssc/assembler.hpp"

#include <set>
#include <utility>
#include <vector>

#include "doctest.h"

using ssc::BaseModel;
using ssc::FiltrationTable;
using ssc::GroupBounds;
using ssc::GroupDescriptor;
using ssc::Theory;

namespace {

int order_exp(const FiltrationTable& t) {
    GroupBounds b = ssc::group_order_2rank(t);
    REQUIRE(b.order_exp.lo == b.order_exp.hi);
    REQUIRE(b.finite);
    return b.order_exp.lo;
}

// closed-form E-infinity dimension over a quadratically closed field, mod 2
int quad_kq_dim(int p, int q, int w) {
    if (2 * w <= p) {
        int a = 2 * q - p;
        int r = ((p % 8) + 8) % 8;
        bool on = (a == 0 && (r == 0 || r == 2)) || (a == 1 && (r == 1 || r == 3)) ||
                  (a == 2 && (r == 2 || r == 4));
        return on ? 1 : 0;
    }
    int d = ((p - w) % 4 + 4) % 4;
    return (q == w && (d == 0 || d == 1)) ? 1 : 0;
}

// mod-2 hermitian filtration quotients over a real closed field: (q - w - 4k, dim)
std::vector<std::pair<int, int>> real_kq_row(int w, int c) {
    switch (w * 8 + c) {
        case 0: return {{0, 1}, {1, 1}};
        case 1: return {{1, 1}, {2, 1}};
        case 2: return {{1, 1}, {2, 2}, {3, 1}};
        case 3: return {{2, 1}, {3, 1}};
        case 4: return {{3, 1}, {4, 1}};

        case 8: return {{1, 1}};
        case 9: return {{1, 1}, {2, 1}};
        case 10: return {{2, 1}};
        case 11: return {{3, 1}};
        case 15: return {{4, 1}};

        case 16: return {{1, 1}};
        case 18: return {{2, 1}};
        case 20: return {{3, 1}};
        case 22: return {{4, 1}};

        case 25: return {{1, 1}};
        case 26: return {{2, 1}};
        case 27: return {{2, 1}, {3, 1}};
        case 28: return {{3, 1}};
        case 29: return {{4, 1}};
        default: return {};
    }
}

const BaseModel kRingA = BaseModel::number_ring({1, 0, 1, 0, 0});  // two-integral rationals
const BaseModel kRingB = BaseModel::number_ring({2, 1, 3, 1, 2});
const BaseModel kRingC = BaseModel::number_ring({0, 2, 2, 1, 1});

}  // namespace

TEST_CASE("mod-2 k-groups of the real numbers repeat with period eight") {
    BaseModel real = BaseModel::real_closed();
    const int expected[8] = {1, 1, 2, 1, 1, 0, 0, 0};  // log2 orders 2,2,4,2,2,1,1,1
    for (int n = 0; n < 24; ++n) {
        FiltrationTable t = ssc::filtration(real, Theory::KGL, 1, n, 0);
        CHECK(order_exp(t) == expected[n % 8]);
    }
}

TEST_CASE("mod-2 k-groups of a quadratically closed field alternate") {
    BaseModel quad = BaseModel::quad_closed();
    for (int n = 0; n < 12; ++n) {
        FiltrationTable t = ssc::filtration(quad, Theory::KGL, 1, n, 0);
        CHECK(order_exp(t) == (n % 2 == 0 ? 1 : 0));
    }
}

TEST_CASE("hermitian filtrations over a quadratically closed field follow the two-column rule") {
    BaseModel quad = BaseModel::quad_closed();
    for (int p = 0; p <= 11; ++p) {
        for (int w = 0; w <= 3; ++w) {
            FiltrationTable t = ssc::filtration(quad, Theory::KQ, 1, p, w);
            std::set<std::pair<int, int>> got;
            for (const GroupDescriptor& g : t.quotients) {
                REQUIRE(g.orders.has_value());
                got.emplace(g.slice, static_cast<int>(g.orders->size()));
            }
            std::set<std::pair<int, int>> want;
            for (int q = w; q <= w + 14; ++q)
                if (int d = quad_kq_dim(p, q, w); d > 0) want.emplace(q, d);
            CHECK(got == want);
        }
    }
}

TEST_CASE("hermitian filtrations over a real closed field match the printed grid") {
    BaseModel real = BaseModel::real_closed();
    for (int k = 0; k <= 1; ++k) {
        for (int w = 0; w <= 3; ++w) {
            for (int c = 0; c <= 7; ++c) {
                int p = 8 * k + c + 2 * w;
                FiltrationTable t = ssc::filtration(real, Theory::KQ, 1, p, w);
                auto want = real_kq_row(w, c);
                REQUIRE(t.length() == static_cast<int>(want.size()));
                for (std::size_t i = 0; i < want.size(); ++i) {
                    CHECK(t.quotients[i].slice == w + 4 * k + want[i].first);
                    REQUIRE(t.quotients[i].orders.has_value());
                    CHECK(static_cast<int>(t.quotients[i].orders->size()) == want[i].second);
                }
            }
        }
    }
}

TEST_CASE("higher Witt-theory of the real numbers assembles rho-resolved towers") {
    BaseModel real = BaseModel::real_closed();
    for (int n = 2; n <= 4; ++n) {
        for (int w = 0; w <= 3; ++w) {
            for (int c = 0; c <= 3; ++c) {
                FiltrationTable t = ssc::filtration(real, Theory::KW, n, w + 4 + c, w);
                if (c == 0) {
                    REQUIRE(t.length() == n);
                    CHECK(order_exp(t) == n);
                    CHECK(t.extensions == ssc::ExtensionStatus::ResolvedByRho);
                    for (int i = 0; i < n; ++i) CHECK(t.quotients[i].slice == w + i);
                    GroupBounds b = ssc::group_order_2rank(t);
                    CHECK(b.two_rank.lo == 1);
                    CHECK(b.two_rank.hi == n);
                } else {
                    CHECK(t.length() == 0);
                    CHECK(order_exp(t) == 0);
                }
            }
        }
    }
}

TEST_CASE("mod-2 Witt-theory column sums count the classical Witt groups") {
    // (model, log2 |W/2|, log2 |2-torsion of W|)
    const std::vector<std::pair<const char*, std::pair<int, int>>> fixtures = {
        {"R", {1, 0}},    {"Qbar", {1, 1}}, {"Q2", {3, 3}},  {"Ql:1", {4, 4}},
        {"Ql:3", {2, 2}}, {"Fl:1", {2, 2}}, {"Fl:3", {1, 1}},
    };
    for (const auto& [name, sums] : fixtures) {
        CAPTURE(name);
        BaseModel model = BaseModel::parse(name);
        for (int p : {0, 4}) CHECK(order_exp(ssc::filtration(model, Theory::KW, 1, p, 0)) == sums.first);
        for (int p : {1, 5}) CHECK(order_exp(ssc::filtration(model, Theory::KW, 1, p, 0)) == sums.second);
        for (int p : {2, 3, 6, 7}) CHECK(order_exp(ssc::filtration(model, Theory::KW, 1, p, 0)) == 0);
    }
}

TEST_CASE("k-group table over the two-integral rationals reproduces the classical orders") {
    const int expected[8] = {1, 2, 2, 2, 1, 1, 0, 1};  // log2 |K_n(Z[1/2]; Z/2)|
    for (int n = 0; n < 16; ++n) {
        FiltrationTable t = ssc::filtration(kRingA, Theory::KGL, 1, n, 0);
        CHECK(order_exp(t) == expected[n % 8]);
    }
    // weight shifts the degree but not the group
    CHECK(order_exp(ssc::filtration(kRingA, Theory::KGL, 1, 5, 2)) == 2);  // K_1
}

TEST_CASE("k-group table lengths and determined ranks follow the remark formulas") {
    const int lengths[8] = {2, 1, 2, 2, 2, 2, 2, 1};
    for (const BaseModel& model : {kRingA, kRingB, kRingC}) {
        const auto& P = model.ring_params();
        for (int k = 0; k <= 1; ++k) {
            for (int c = 0; c <= 7; ++c) {
                FiltrationTable t = ssc::filtration(model, Theory::KGL, 1, 8 * k + c, 0);
                CHECK(t.length() == lengths[c]);
            }
        }
        // K_{8k+5}: kernel of the squared rho map in weight one, rank r2 + s + tplus
        FiltrationTable k5 = ssc::filtration(model, Theory::KGL, 1, 13, 0);
        REQUIRE(k5.quotients[0].dim.has_value());
        CHECK(*k5.quotients[0].dim == P.r2 + P.s + P.tplus);
        // K_{8k+6} leading term: kernel of rho in weight two, rank s + t - 1
        FiltrationTable k6 = ssc::filtration(model, Theory::KGL, 1, 14, 0);
        REQUIRE(k6.quotients[0].dim.has_value());
        CHECK(*k6.quotients[0].dim == P.s + P.t - 1);
        // K_{8k+3} and K_{8k+4} tails: the two cokernel ranks
        FiltrationTable k3 = ssc::filtration(model, Theory::KGL, 1, 11, 0);
        REQUIRE(k3.quotients[1].dim.has_value());
        CHECK(*k3.quotients[1].dim == std::max(P.r1 - 1, 0));
        FiltrationTable k4 = ssc::filtration(model, Theory::KGL, 1, 12, 0);
        REQUIRE(k4.quotients[1].dim.has_value());
        CHECK(*k4.quotients[1].dim == P.tplus - P.t);
        // K_0: the weight-one kernel of rho is the Picard part, rank t
        FiltrationTable k0 = ssc::filtration(model, Theory::KGL, 1, 0, 0);
        REQUIRE(k0.quotients[1].dim.has_value());
        CHECK(*k0.quotients[1].dim == P.t);
        CHECK(order_exp(k0) == 1 + P.t);
        // K_1 = units modulo squares
        FiltrationTable k1 = ssc::filtration(model, Theory::KGL, 1, 1, 0);
        CHECK(order_exp(k1) == P.r1 + P.r2 + P.s + P.t);
    }
}

TEST_CASE("hermitian table lengths match the printed column and row five vanishes") {
    const int lengths[4][8] = {
        {3, 2, 3, 2, 2, 0, 2, 2},
        {3, 2, 1, 1, 2, 3, 3, 3},
        {1, 0, 2, 3, 4, 3, 4, 2},
        {1, 2, 3, 3, 3, 3, 1, 0},
    };
    for (const BaseModel& model : {kRingA, kRingB, kRingC}) {
        for (int w = 0; w <= 3; ++w) {
            for (int k = 0; k <= 1; ++k) {
                for (int c = 0; c <= 7; ++c) {
                    FiltrationTable t =
                        ssc::filtration(model, Theory::KQ, 1, 8 * k + c + 2 * w, w);
                    CHECK(t.length() == lengths[w][c]);
                }
            }
        }
        // KQ_{8k+5, 0} = 0 exactly
        FiltrationTable g = ssc::filtration(model, Theory::KQ, 1, 5, 0);
        CHECK(g.length() == 0);
        CHECK(order_exp(g) == 0);
        CHECK(ssc::group_order_2rank(g).two_rank.hi == 0);
    }
}

TEST_CASE("hermitian group of symplectic degree two over the two-integral rationals") {
    FiltrationTable t = ssc::filtration(kRingA, Theory::KQ, 1, 2, 0);
    REQUIRE(t.length() == 3);
    REQUIRE(t.quotients[0].dim.has_value());
    REQUIRE(t.quotients[1].dim.has_value());
    REQUIRE(t.quotients[2].dim.has_value());
    CHECK(*t.quotients[0].dim == 1);  // h^{0,1}
    CHECK(*t.quotients[1].dim == 3);  // h^{1,2} + h^{0,2}
    CHECK(*t.quotients[2].dim == 1);  // h^{2,3}, the Brauer class survives
    CHECK(order_exp(t) == 5);
    GroupBounds b = ssc::group_order_2rank(t);
    CHECK(b.two_rank.lo == 3);
    CHECK(b.two_rank.hi == 5);
}

TEST_CASE("kernel entries that need a real place fall back to honest intervals") {
    // leading quotient of KQ_{8,2}: kernel of the squared rho map on h^{0,2}
    FiltrationTable with_real = ssc::filtration(kRingA, Theory::KQ, 1, 8, 2);
    REQUIRE(with_real.quotients[0].dim.has_value());
    CHECK(*with_real.quotients[0].dim == 0);
    FiltrationTable no_real = ssc::filtration(kRingC, Theory::KQ, 1, 8, 2);
    REQUIRE(no_real.quotients[0].dim_bounds.has_value());
    CHECK(*no_real.quotients[0].dim_bounds == ssc::DimInterval{0, 1});
    CHECK(!no_real.quotients[0].determined());
    GroupBounds b = ssc::group_order_2rank(no_real);
    CHECK(b.order_exp.lo < b.order_exp.hi);
}

TEST_CASE("hermitian table normalizes weights by the eight-four periodicity") {
    // KQ_{-2,-1} sits over the weight-three column at degree six
    FiltrationTable a = ssc::filtration(kRingB, Theory::KQ, 1, -2, -1);
    FiltrationTable b = ssc::filtration(kRingB, Theory::KQ, 1, 6, 3);
    REQUIRE(a.length() == b.length());
    for (int i = 0; i < a.length(); ++i) {
        CHECK(a.quotients[i].symbol == b.quotients[i].symbol);
        CHECK(a.quotients[i].rank_lo() == b.quotients[i].rank_lo());
        CHECK(a.quotients[i].rank_hi() == b.quotients[i].rank_hi());
    }
}

TEST_CASE("number-ring lookups outside the tables raise the documented errors") {
    CHECK_THROWS_AS(ssc::filtration(kRingA, Theory::KGL, 1, -1, 0), ssc::OutOfRange);
    CHECK_THROWS_AS(ssc::filtration(kRingA, Theory::KQ, 1, 1, 1), ssc::OutOfRange);
    CHECK_THROWS_AS(ssc::filtration(kRingA, Theory::KGL, 2, 4, 0), ssc::UnsupportedTier);
    CHECK_THROWS_AS(ssc::filtration(kRingA, Theory::KQ, 2, 4, 0), ssc::UnsupportedTier);
    CHECK_THROWS_AS(ssc::filtration(kRingA, Theory::KW, 1, 4, 0), ssc::UnsupportedTier);
}

TEST_CASE("collapse rules outside the recorded regimes propagate from the engine") {
    CHECK_THROWS_AS(ssc::filtration(BaseModel::local_q2(), Theory::KQ, 2, 4, 0),
                    ssc::NoCollapseRule);
    CHECK_THROWS_AS(ssc::filtration(BaseModel::real_closed(), Theory::KQ, 2, 4, 0),
                    ssc::NoCollapseRule);
}

TEST_CASE("graded Witt dimensions follow the diagonal") {
    BaseModel real = BaseModel::real_closed();
    for (int q = 0; q <= 6; ++q) CHECK(ssc::graded_witt(real, q) == 1);

    BaseModel quad = BaseModel::quad_closed();
    CHECK(ssc::graded_witt(quad, 0) == 1);
    for (int q = 1; q <= 4; ++q) CHECK(ssc::graded_witt(quad, q) == 0);

    BaseModel q2 = BaseModel::local_q2();
    ssc::WittGrading g2 = ssc::graded_witt_table(q2, 4);
    CHECK(g2.dims[0] == 1);
    CHECK(g2.dims[1] == 3);
    CHECK(g2.dims[2] == 1);
    CHECK(g2.dims[3] == 0);
    CHECK(g2.dims[4] == 0);

    // both local residue classes grade as 1, 2, 1 even though the ring structures differ
    for (int l : {1, 3}) {
        BaseModel ql = BaseModel::local_ql(l);
        CHECK(ssc::graded_witt(ql, 0) == 1);
        CHECK(ssc::graded_witt(ql, 1) == 2);
        CHECK(ssc::graded_witt(ql, 2) == 1);
        CHECK(ssc::graded_witt(ql, 3) == 0);
    }

    BaseModel fl1 = BaseModel::finite_field(1);
    CHECK(ssc::graded_witt(fl1, 1) == 1);
    CHECK(ssc::graded_witt(fl1, 2) == 0);
    BaseModel fl3 = BaseModel::finite_field(3);
    CHECK(ssc::graded_witt(fl3, 1) == 1);
    CHECK(ssc::graded_witt(fl3, 2) == 0);

    CHECK(ssc::graded_witt(kRingA, 0) == 1);
    CHECK(ssc::graded_witt(kRingA, 1) == 2);
    CHECK(ssc::graded_witt(kRingA, 2) == 1);  // tau absorbs the Picard part
    CHECK(ssc::graded_witt(kRingA, 3) == 1);
    CHECK(ssc::graded_witt(kRingB, 2) == kRingB.ring_params().r1 + kRingB.ring_params().s - 1);
    CHECK(ssc::graded_witt(kRingC, 5) == 0);
}

TEST_CASE("two-adic hermitian rows keep the printed lengths and towers") {
    const int lengths[4][8] = {
        {4, 2, 2, 2, 1, 0, 1, 2},
        {2, 4, 2, 2, 0, 1, 1, 2},
        {2, 2, 3, 2, 1, 0, 2, 2},
        {2, 3, 2, 3, 0, 0, 1, 3},
    };
    const bool tower[4][8] = {
        {true, false, false, false, true, false, false, false},
        {false, true, false, false, false, true, false, false},
        {false, false, true, false, false, false, true, false},
        {false, false, false, true, false, false, false, true},
    };
    for (const BaseModel& model : {kRingA, kRingB, kRingC}) {
        const auto& P = model.ring_params();
        for (int w = 0; w <= 3; ++w) {
            auto rows = ssc::two_adic_tables(model, w);
            REQUIRE(rows.size() == 8);
            for (int c = 0; c <= 7; ++c) {
                CAPTURE(w);
                CAPTURE(c);
                CHECK(rows[c].length() == lengths[w][c]);
                CHECK(rows[c].symbolic);
                CHECK((rows[c].extensions == ssc::ExtensionStatus::ResolvedByRho) == tower[w][c]);
                int free = 0;
                for (const GroupDescriptor& g : rows[c].quotients) free += g.free_rank;
                int want_free = tower[w][c] ? P.r1 : 0;
                if (w == 2 && c == 7) want_free += P.r2;         // H^{1,4k+2}
                if (w == 3 && c == 7) want_free += P.r1 + P.r2;  // H^{1,4k+1}
                CHECK(free == want_free);
            }
        }
        // the degree 8k+4 weight 4k row is the free tower alone
        auto w0 = ssc::two_adic_tables(model, 0);
        REQUIRE(w0[4].length() == 1);
        CHECK(w0[4].quotients[0].free_rank == P.r1);
        CHECK(w0[4].quotients[0].symbol == "Z_2^{r_1}");
        GroupBounds b4 = ssc::group_order_2rank(w0[4]);
        CHECK(b4.finite == (P.r1 == 0));
        CHECK(w0[5].length() == 0);
        // exact mod-2 kernels inside the 2-adic rows
        auto w1 = ssc::two_adic_tables(model, 1);
        REQUIRE(w1[0].length() == 2);
        REQUIRE(w1[0].quotients[0].dim.has_value());
        CHECK(*w1[0].quotients[0].dim == P.r2 + P.s + P.tplus);
        REQUIRE(w1[0].quotients[1].dim.has_value());
        CHECK(*w1[0].quotients[1].dim == P.s + P.t - 1);
        // the bare printed exponent keeps its note
        auto w3 = ssc::two_adic_tables(model, 3);
        REQUIRE(w3[7].length() == 3);
        CHECK(w3[7].quotients[2].symbol == "Z_2^{r}");
        CHECK(w3[7].quotients[2].free_rank == P.r1);
        CHECK(!w3[7].quotients[2].note.empty());
        // the vanishing-at-k-zero marker on the shifted kernel entry
        CHECK(w3[3].quotients[0].note.find("k = 0") != std::string::npos);
    }
    CHECK_THROWS_AS(ssc::two_adic_tables(kRingA, 4), ssc::OutOfRange);
    CHECK_THROWS_AS(ssc::two_adic_tables(BaseModel::real_closed(), 0), std::invalid_argument);
}

TEST_CASE("integral Witt groups alternate with the Picard group") {
    for (const BaseModel& model : {kRingA, kRingB, kRingC}) {
        const auto& P = model.ring_params();
        GroupDescriptor w0 = ssc::integral_witt(model, 4, 0);
        CHECK(w0.symbol.substr(0, 2) == "W(");
        CHECK(w0.free_rank == P.r1);
        CHECK(w0.torsion_symbolic);
        GroupDescriptor w3 = ssc::integral_witt(model, 3, 0);
        REQUIRE(w3.orders.has_value());
        CHECK(static_cast<int>(w3.orders->size()) == P.t);
        CHECK(ssc::integral_witt(model, 1, 0).trivial());
        CHECK(ssc::integral_witt(model, 2, 0).trivial());
        // p - w is what matters
        CHECK(ssc::integral_witt(model, 0, 1).symbol == w3.symbol);
    }
}

TEST_CASE("odd-primary hermitian groups follow the four-case rule") {
    GroupDescriptor c0 = ssc::odd_primary(kRingA, 3, 0, 0);
    CHECK(c0.symbol.find("H^{0,0}") == 0);
    CHECK(c0.free_rank == 1);
    GroupDescriptor c0t = ssc::odd_primary(kRingA, 3, 8, 0);
    CHECK(c0t.symbol.find("H^{0,4}") == 0);
    CHECK(c0t.torsion_symbolic);
    CHECK(ssc::odd_primary(kRingA, 5, 5, 0).trivial());
    GroupDescriptor c2 = ssc::odd_primary(kRingA, 3, 6, 0);
    CHECK(c2.symbol.find("H^{2,5}") == 0);
    GroupDescriptor c3 = ssc::odd_primary(kRingB, 7, 7, 0);
    CHECK(c3.symbol.find("H^{1,5}") == 0);
    CHECK(c3.free_rank == kRingB.ring_params().r1 + kRingB.ring_params().r2);
    CHECK(ssc::odd_primary(kRingB, 7, 9, 0).trivial());  // residue one vanishes
    CHECK_THROWS_AS(ssc::odd_primary(kRingA, 3, 0, 1), ssc::OutOfRange);
    CHECK_THROWS_AS(ssc::odd_primary(kRingA, 2, 4, 0), std::invalid_argument);
    CHECK_THROWS_AS(ssc::odd_primary(BaseModel::local_q2(), 3, 4, 0), std::invalid_argument);
}

TEST_CASE("empty filtrations assemble the trivial group") {
    FiltrationTable t;
    GroupBounds b = ssc::group_order_2rank(t);
    CHECK(b.finite);
    CHECK(b.order_bounded);
    CHECK(b.order_exp == ssc::DimInterval{0, 0});
    CHECK(b.two_rank == ssc::DimInterval{0, 0});
}

TEST_CASE("serializers are deterministic and mirror the table layout") {
    std::vector<FiltrationTable> tables;
    tables.push_back(ssc::filtration(kRingA, Theory::KQ, 1, 2, 0));
    tables.push_back(ssc::filtration(kRingA, Theory::KQ, 1, 5, 0));
    for (auto& row : ssc::two_adic_tables(kRingA, 0)) tables.push_back(std::move(row));

    std::string json = ssc::tables_to_json(tables);
    CHECK(json == ssc::tables_to_json(tables));
    CHECK(json.find("\"schema\": \"ssc.tables.v1\"") != std::string::npos);
    CHECK(json.find("\"abutment\": \"KQ_{2,0}(") != std::string::npos);
    CHECK(json.find("resolved-by-rho") != std::string::npos);

    std::string text = ssc::tables_to_text(tables);
    CHECK(text == ssc::tables_to_text(tables));
    CHECK(text.find(" | 3 | f0/f1 = ") != std::string::npos);
    CHECK(text.find(" | 0 | 0") != std::string::npos);

    std::string latex = ssc::tables_to_latex(tables);
    CHECK(latex.find("\\begin{tabular}") != std::string::npos);
    CHECK(latex.find("\\mathsf{f}_{0}/\\mathsf{f}_{1} = ") != std::string::npos);
    CHECK(latex.find("\\mathbb{Z}_2^{r_1}") != std::string::npos);
    CHECK(latex.find("\\tau\\mathsf{pr}") != std::string::npos);
    CHECK(latex.find("\\ker(") != std::string::npos);
    // plain-text operation names never leak into the latex body
    CHECK(latex.find("tau pr") == std::string::npos);
    CHECK(latex.find("ker(rho") == std::string::npos);
}
