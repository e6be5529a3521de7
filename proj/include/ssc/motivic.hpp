#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace ssc {

// tau-division requested against a model whose pieces carry only dimensions
struct NegativeTauOnNumberRing : std::runtime_error {
    explicit NegativeTauOnNumberRing(const std::string& what) : std::runtime_error(what) {}
};

// rho-multiplication rank not determined by the stored presentation data
struct UnknownKernel : std::runtime_error {
    explicit UnknownKernel(const std::string& what) : std::runtime_error(what) {}
};

enum class BaseKind { RealClosed, QuadClosed, FiniteField, LocalQ2, LocalQl, NumberRing };

// numerical invariants of a ring of S-integers in a number field
struct NumberRingParams {
    int r1 = 0;     // real embeddings
    int r2 = 0;     // conjugate pairs of complex embeddings
    int s = 1;      // finite primes in S
    int t = 0;      // 2-rank of the Picard group
    int tplus = 0;  // 2-rank of the narrow Picard group
    friend bool operator==(const NumberRingParams&, const NumberRingParams&) = default;
};

// base field or base ring with a known mod-2 motivic cohomology presentation
class BaseModel {
public:
    static BaseModel real_closed();
    static BaseModel quad_closed();
    static BaseModel finite_field(int l_mod4);
    static BaseModel local_q2();
    static BaseModel local_ql(int l_mod4);
    static BaseModel number_ring(const NumberRingParams& params);

    // accepts "R", "Qbar", "Q2", "Fl:1", "Ql:3",
    // "numberring:r1=1,r2=0,s=1,t=0,tplus=0"
    static BaseModel parse(const std::string& text);
    std::string name() const;

    BaseKind kind() const { return kind_; }
    int l_mod4() const;
    const NumberRingParams& ring_params() const;

    // virtual mod-2 cohomological dimension
    int vcd() const;
    // number-ring pieces carry ranks, never element bases
    bool dimension_only() const { return kind_ == BaseKind::NumberRing; }
    bool has_rho() const;  // the class of -1 is nonzero
    bool has_u() const;    // a second independent unit class
    bool has_pi() const;   // a uniformizer class

    friend bool operator==(const BaseModel& a, const BaseModel& b);

private:
    BaseModel(BaseKind k, int l, NumberRingParams p) : kind_(k), l_mod4_(l), nr_(p) {}
    BaseKind kind_;
    int l_mod4_ = 0;
    NumberRingParams nr_{};
};

// Monomial tau^k rho^a u^b pi^c in the mod-2 cohomology of an explicit model.
// Bidegree: p = a + b + c (generator degree), q = p + k.
struct Monomial {
    int tau = 0;
    int rho = 0;
    int u = 0;
    int pi = 0;
    bool normal = false;  // set once the model's rewrite rules have been applied

    int deg_p() const { return rho + u + pi; }
    int deg_q() const { return deg_p() + tau; }

    // identity ignores the normal-form flag
    friend bool operator==(const Monomial& a, const Monomial& b) {
        return a.tau == b.tau && a.rho == b.rho && a.u == b.u && a.pi == b.pi;
    }
    friend bool operator<(const Monomial& a, const Monomial& b) {
        return std::tuple(a.tau, a.rho, a.u, a.pi) < std::tuple(b.tau, b.rho, b.u, b.pi);
    }
};

std::string to_string(const Monomial& m);

// formal F2-linear combination, kept sorted and duplicate-free (xor semantics)
using F2Sum = std::vector<Monomial>;

void xor_insert(F2Sum& sum, const Monomial& m);
F2Sum f2_add(const F2Sum& a, const F2Sum& b);
std::string to_string(const F2Sum& sum);

// rewrites a raw exponent tuple into the model's normal form; nullopt = the zero class
std::optional<Monomial> normalize(const BaseModel& model, Monomial m);

F2Sum multiply(const BaseModel& model, const Monomial& a, const Monomial& b);
F2Sum multiply(const BaseModel& model, const F2Sum& a, const F2Sum& b);

enum class OpTag { Zero, Id, Sq1, Sq2, Sq3, Sq2Sq1, Sq3Sq1, Mul, Pr, Inc, Del2to2n, Del2nTo2 };

struct OpAtom {
    OpTag tag = OpTag::Id;
    int rho_pow = 0;  // Mul: multiply by rho^rho_pow tau^tau_pow
    int tau_pow = 0;  //      tau_pow < 0 divides out tau-powers
    int n = 0;        // Pr/Inc/Del*: the mod-2^n side of the map
    friend bool operator==(const OpAtom&, const OpAtom&) = default;
    friend bool operator<(const OpAtom& a, const OpAtom& b) {
        return std::tuple(a.tag, a.rho_pow, a.tau_pow, a.n) < std::tuple(b.tag, b.rho_pow, b.tau_pow, b.n);
    }
};

// Formal F2-sum of compositions of the atomic operations. Every symbol has a
// fixed bidegree shift and fixed source/target coefficient levels (0 = any).
class OperationSymbol {
public:
    using Term = std::vector<OpAtom>;  // atoms in application order

    OperationSymbol() = default;  // the zero symbol

    static OperationSymbol zero();
    static OperationSymbol id();
    static OperationSymbol sq1();
    static OperationSymbol sq2();
    static OperationSymbol sq3();
    static OperationSymbol sq2sq1();
    static OperationSymbol sq3sq1();
    static OperationSymbol mul_tau();
    static OperationSymbol mul_rho();
    static OperationSymbol mul(int rho_pow, int tau_pow);
    static OperationSymbol pr(int n);
    static OperationSymbol inc(int n);
    static OperationSymbol del_2_to_2n(int n);   // Bockstein  h -> H_n, degree (1,0)
    static OperationSymbol del_2n_to_2(int n);   // Bockstein  H_n -> h, degree (1,0)

    bool is_zero() const { return terms_.empty(); }
    const std::vector<Term>& terms() const { return terms_; }

    // composition: (f * g) applies g first
    friend OperationSymbol operator*(const OperationSymbol& f, const OperationSymbol& g);
    // formal F2-sum: equal terms cancel in pairs
    friend OperationSymbol operator+(const OperationSymbol& f, const OperationSymbol& g);
    friend bool operator==(const OperationSymbol&, const OperationSymbol&) = default;

    std::pair<int, int> bidegree() const;  // (0,0) for the zero symbol
    int source_level() const;              // 0 = level-polymorphic
    int target_level() const;

    std::string to_string() const;

private:
    explicit OperationSymbol(std::vector<Term> terms);
    void canon();
    void validate() const;
    std::vector<Term> terms_;
};

// one cyclic summand of the 2-complete integral cohomology at bidegree (a,b)
inline constexpr unsigned kInfiniteExp = 100;  // stands for a copy of the 2-adic integers

struct CyclicSummand {
    unsigned exp = 1;  // the group Z/2^exp, kInfiniteExp for infinite cyclic
    Monomial red;      // mod-2 reduction of a generator, bidegree (a,b)
    Monomial tor;      // label of the torsion coordinate at (a-1,b); finite exp only
};

std::vector<CyclicSummand> integral_summands(const BaseModel& model, int a, int b);

// one coordinate of a mod-2^n group presented by universal coefficients
struct UcCoord {
    bool tor = false;       // false: reduction of an integral generator
    unsigned order_exp = 1; // the coordinate group is Z/2^order_exp
    Monomial label;         // mod-2 class naming the coordinate
    Monomial red;           // red label of the owning integral summand
};

struct GradedPiece {
    int p = 0;
    int q = 0;
    int level = 1;                // data is Z/2^level-module data
    bool dimension_only = false;  // number-ring pieces: ranks only
    int dim = 0;                  // F2-dimension (level 1) or coordinate count
    std::vector<Monomial> basis;  // explicit models, level 1
    std::vector<UcCoord> coords;  // explicit models, level >= 2
    std::map<std::string, int> named_dims;  // number rings: determined subspace ranks
    bool empty() const { return dim == 0; }
};

// mod-2 piece; memoized, safe for concurrent readers
GradedPiece basis(const BaseModel& model, int p, int q);
// mod-2^n piece via universal coefficients; explicit models only
GradedPiece basis_mod2n(const BaseModel& model, int n, int p, int q);

// exponent of each coordinate group, in coordinate order
std::vector<unsigned> coord_moduli(const GradedPiece& piece);

// applies a level-1 symbol to a monomial written as tau^k s with s diagonal
F2Sum steenrod_apply(const BaseModel& model, const OperationSymbol& op, const Monomial& m);
F2Sum steenrod_apply(const BaseModel& model, const OperationSymbol& op, const F2Sum& sum);

enum class MapClass { Iso, Trivial, SurjectiveWithKernel, InjectiveWithCokernel };

std::string to_string(MapClass c);

// classification of pr/inc/Bockstein maps between coefficient levels over the
// real closed model at bidegree (p,q), by the parity of p-q and whether p = 0
MapClass coeff_map(const OperationSymbol& map, const BaseModel& model, int n, int p, int q);

// determined 2-ranks of rho-multiplication kernels over a number ring
int rho_kernel_dim(const BaseModel& model, int i, int p, int q);
// determined ranks of the named quotients h^{p,q}/rho^i
int rho_cokernel_dim(const BaseModel& model, int i, int p, int q);

struct DimInterval {
    int lo = 0;
    int hi = 0;
    friend bool operator==(const DimInterval&, const DimInterval&) = default;
};

// like rho_kernel_dim but returns the bracketing interval where only bounds are known
DimInterval rho_kernel_interval(const BaseModel& model, int i, int p, int q);

// integer-lift matrix of op between coordinate systems of two pieces;
// rows follow dst coordinates, columns follow src coordinates
std::vector<std::vector<std::uint32_t>> op_matrix(const BaseModel& model, const OperationSymbol& op,
                                                  const GradedPiece& src, const GradedPiece& dst);

}  // namespace ssc
