#pragma once

#include <array>
#include <string>
#include <utility>
#include <vector>

#include "ssc/motivic.hpp"

namespace ssc {

enum class Theory { KGL, KQ, KW };

Theory parse_theory(const std::string& text);
std::string to_string(Theory t);

// one wedge summand of the q-th slice: a suspension of a mod-2^level motivic
// cohomology spectrum placed in bidegree (q + j, q)
struct SummandSpec {
    int q = 0;
    int j = 0;
    int level = 1;
    std::pair<int, int> suspension() const { return {q + j, q}; }
    friend bool operator==(const SummandSpec&, const SummandSpec&) = default;
};

// whether the q-th slice of the mod-2^n theory has a summand at offset j
bool has_summand(Theory t, int n, int q, int j);
// its coefficient level (1 or n); throws std::invalid_argument otherwise
int summand_level(Theory t, int n, int q, int j);

// all summands with j in [j_lo, j_hi], ordered by increasing j
std::vector<SummandSpec> slice_summands(Theory t, int n, int q, int j_lo, int j_hi);

// the slice differential restricted to summand j of s_q, split into its five
// components: entries[d] has bidegree (d, 1) and lands in summand j + d - 2
// of s_{q+1}
struct DifferentialSpec {
    int q = 0;
    int j = 0;
    std::array<OperationSymbol, 5> entries;
    static constexpr int target_offset(int d) { return d - 2; }
};

DifferentialSpec d1_components(Theory t, int n, int q, int j);

}  // namespace ssc
