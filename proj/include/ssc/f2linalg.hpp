#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace ssc {

// composite of two consecutive differentials is nonzero
struct CompositeNonzero : std::runtime_error {
    explicit CompositeNonzero(const std::string& what) : std::runtime_error(what) {}
};

// Dense matrix over F2, bit-packed rows (64 entries per word).
// Value type: operations never mutate their inputs.
class BitMatrix {
public:
    BitMatrix() = default;
    BitMatrix(std::size_t rows, std::size_t cols);

    static BitMatrix identity(std::size_t n);
    static BitMatrix from_rows(const std::vector<std::vector<int>>& rows);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    bool get(std::size_t r, std::size_t c) const;
    void set(std::size_t r, std::size_t c, bool v);

    BitMatrix transposed() const;
    BitMatrix operator*(const BitMatrix& rhs) const;
    BitMatrix operator+(const BitMatrix& rhs) const;
    bool operator==(const BitMatrix& rhs) const;

    bool is_zero() const;

    // stacks rhs below this matrix; column counts must agree
    BitMatrix vstack(const BitMatrix& below) const;
    // places rhs to the right of this matrix; row counts must agree
    BitMatrix hstack(const BitMatrix& right) const;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::size_t words_per_row_ = 0;
    std::vector<std::uint64_t> bits_;

    friend std::size_t rank(const BitMatrix& m);
    friend std::vector<std::vector<int>> kernel_basis(const BitMatrix& m);
};

std::size_t rank(const BitMatrix& m);

// basis of the right kernel {v : m v = 0}; each vector has m.cols() entries in {0,1}
std::vector<std::vector<int>> kernel_basis(const BitMatrix& m);

// homology at B of  A --d_in--> B --d_out--> C:  dim ker(d_out) - rank(d_in)
std::size_t homology_dim(const BitMatrix& d_in, const BitMatrix& d_out);

// Integer matrix with entries reduced mod 2^n, used as an integer lift for maps
// between direct sums of cyclic 2-groups. Value type like BitMatrix.
class IntMatrix2n {
public:
    IntMatrix2n() = default;
    IntMatrix2n(std::size_t rows, std::size_t cols, unsigned n);

    static IntMatrix2n from_rows(unsigned n, const std::vector<std::vector<std::uint32_t>>& rows);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    unsigned modulus_exponent() const { return n_; }

    std::uint32_t get(std::size_t r, std::size_t c) const;
    void set(std::size_t r, std::size_t c, std::uint32_t v);

    IntMatrix2n operator*(const IntMatrix2n& rhs) const;
    bool operator==(const IntMatrix2n& rhs) const;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    unsigned n_ = 1;
    std::vector<std::uint32_t> e_;
};

// Smith normal form over Z/2^32. Input entries are arbitrary uint32 values;
// returns the diagonal 2-adic valuations sorted ascending, with 32 standing
// for a zero diagonal entry. Pivots are chosen by minimal 2-adic valuation,
// which keeps every pivot a unit times a power of 2.
std::vector<unsigned> smith_valuations(const std::vector<std::vector<std::uint32_t>>& m);

// Homology ker(d_out)/im(d_in) at B for a complex
//   A --d_in--> B --d_out--> C
// of finite direct sums of cyclic 2-groups. mod_a/mod_b/mod_c list the
// exponent of each coordinate (coordinate j of B is Z/2^mod_b[j]); matrix
// entries are integer lifts. Returns the exponents of the cyclic summands of
// the homology group, sorted ascending (empty list = trivial group).
// Throws CompositeNonzero unless d_out∘d_in vanishes and both maps are
// well-defined against the coordinate moduli.
std::vector<unsigned> homology_group_2n(const IntMatrix2n& d_in, const IntMatrix2n& d_out,
                                        const std::vector<unsigned>& mod_a,
                                        const std::vector<unsigned>& mod_b,
                                        const std::vector<unsigned>& mod_c);

// uniform-modulus convenience: every coordinate of A, B, C is Z/2^n
std::vector<unsigned> homology_group_2n(const IntMatrix2n& d_in, const IntMatrix2n& d_out);

}  // namespace ssc
