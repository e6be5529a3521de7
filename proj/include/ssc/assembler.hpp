#pragma once

#include <climits>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "ssc/engine.hpp"

namespace ssc {

// degree lies outside the range the stored group tables cover
struct OutOfRange : std::runtime_error {
    explicit OutOfRange(const std::string& what) : std::runtime_error(what) {}
};

// standing of the extension problems between adjacent filtration quotients
enum class ExtensionStatus {
    SplitUnknown,   // no recorded rule; order is exact but the group structure is not
    ResolvedByRho,  // multiplication by the minus-one class glues adjacent quotients
};

std::string to_string(ExtensionStatus s);

// One filtration quotient, described as precisely as the base model allows.
// Exactly one of orders/dim/dim_bounds is set unless torsion_symbolic is on,
// in which case the torsion subgroup is not pinned down at all.
struct GroupDescriptor {
    std::string symbol;
    std::optional<std::vector<unsigned>> orders;  // cyclic exponents ascending; structure known
    std::optional<int> dim;                       // exact 2-rank of the torsion part
    std::optional<DimInterval> dim_bounds;        // 2-rank bracket when only bounds are known
    int free_rank = 0;       // rank of a free 2-adic part
    bool elementary = true;  // torsion is elementary abelian, so its order is 2^rank
    bool torsion_symbolic = false;
    int slice = INT_MIN;  // slice weight the quotient came from, when read off a page
    std::string note;

    bool determined() const { return orders.has_value() || dim.has_value(); }
    int rank_lo() const;
    int rank_hi() const;  // torsion_symbolic entries count the free part only
    bool trivial() const;
};

// descriptor with full cyclic structure; exponents need not be sorted
GroupDescriptor descriptor_from_orders(std::string symbol, std::vector<unsigned> orders);

// The slice filtration of one homotopy group: quotients f_i/f_{i+1} listed
// from i = 0 upward, so deeper filtration stages sit later in the list and
// are subgroups of the assembled group.
struct FiltrationTable {
    Theory theory = Theory::KGL;
    std::string coeff;     // "Z/2", "Z/2^n", "Z_2"
    std::string abutment;  // display label of the filtered group
    int p = 0;
    int w = 0;
    bool symbolic = false;  // degrees quoted as 8k + c with k generic
    std::vector<GroupDescriptor> quotients;
    ExtensionStatus extensions = ExtensionStatus::SplitUnknown;

    int length() const { return static_cast<int>(quotients.size()); }
};

// order and 2-rank of the assembled group, as intervals on log2 scale
struct GroupBounds {
    bool finite = true;         // no free 2-adic part in any quotient
    bool order_bounded = true;  // order_exp.hi is a valid upper bound
    DimInterval order_exp{0, 0};
    DimInterval two_rank{0, 0};
};

// dimensions of the graded pieces of the fundamental-ideal filtration
struct WittGrading {
    std::map<int, int> dims;  // q -> dim I^q / I^{q+1}
};

// Filtration of the degree-p weight-w homotopy group with Z/2^n coefficients.
// Explicit base models run the spectral sequence and read off the E-infinity
// column, so engine errors (NoCollapseRule, UnsupportedTier) propagate.
// Number rings use the transcribed mod-2 group tables: n must be 1, KW is not
// tabulated, and degrees below the tabulated range raise OutOfRange.
FiltrationTable filtration(const BaseModel& model, Theory theory, int n, int p, int w);

// order and 2-rank bounds of the group a filtration table assembles
GroupBounds group_order_2rank(const FiltrationTable& table);

// dim I^q / I^{q+1} of the Witt ring; the graded piece is the weight-(q,q)
// motivic group modulo the tau-multiples coming from weight q - 1
int graded_witt(const BaseModel& model, int q);
WittGrading graded_witt_table(const BaseModel& model, int q_max);

// the eight 2-adic hermitian rows of residue weight w_mod4, with k generic
std::vector<FiltrationTable> two_adic_tables(const BaseModel& model, int w_mod4);

// integral higher Witt-theory of a number ring: the Witt group for
// p - w = 0 mod 4, the Picard group mod 2 for p - w = 3 mod 4, zero otherwise
GroupDescriptor integral_witt(const BaseModel& model, int p, int w);

// ell-adic hermitian groups of a number ring for an odd prime ell; requires
// p - w >= 0 and follows the four-case rule in p - w mod 4
GroupDescriptor odd_primary(const BaseModel& model, int ell, int p, int w);

std::string tables_to_json(const std::vector<FiltrationTable>& tables);
std::string tables_to_text(const std::vector<FiltrationTable>& tables);
std::string tables_to_latex(const std::vector<FiltrationTable>& tables);

}  // namespace ssc
