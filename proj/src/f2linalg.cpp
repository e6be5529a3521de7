#include "ssc/f2linalg.hpp"

#include <algorithm>
#include <bit>
#include <cassert>

namespace ssc {

namespace {

constexpr unsigned kWordBits = 64;
constexpr unsigned kRingBits = 32;  // working ring Z/2^32

unsigned v2(std::uint32_t x) {
    return x == 0 ? kRingBits : static_cast<unsigned>(std::countr_zero(x));
}

std::uint32_t inv_odd(std::uint32_t a) {
    assert(a & 1u);
    std::uint32_t x = a;  // correct mod 2^3
    for (int i = 0; i < 4; ++i) x *= 2u - a * x;
    return x;
}

}  // namespace

BitMatrix::BitMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), words_per_row_((cols + kWordBits - 1) / kWordBits),
      bits_(rows * ((cols + kWordBits - 1) / kWordBits), 0) {}

BitMatrix BitMatrix::identity(std::size_t n) {
    BitMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m.set(i, i, true);
    return m;
}

BitMatrix BitMatrix::from_rows(const std::vector<std::vector<int>>& rows) {
    std::size_t r = rows.size();
    std::size_t c = r == 0 ? 0 : rows[0].size();
    BitMatrix m(r, c);
    for (std::size_t i = 0; i < r; ++i) {
        if (rows[i].size() != c) throw std::invalid_argument("ragged row list");
        for (std::size_t j = 0; j < c; ++j) m.set(i, j, (rows[i][j] & 1) != 0);
    }
    return m;
}

bool BitMatrix::get(std::size_t r, std::size_t c) const {
    assert(r < rows_ && c < cols_);
    return (bits_[r * words_per_row_ + c / kWordBits] >> (c % kWordBits)) & 1u;
}

void BitMatrix::set(std::size_t r, std::size_t c, bool v) {
    assert(r < rows_ && c < cols_);
    std::uint64_t& w = bits_[r * words_per_row_ + c / kWordBits];
    std::uint64_t mask = std::uint64_t{1} << (c % kWordBits);
    w = v ? (w | mask) : (w & ~mask);
}

BitMatrix BitMatrix::transposed() const {
    BitMatrix t(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < cols_; ++j)
            if (get(i, j)) t.set(j, i, true);
    return t;
}

BitMatrix BitMatrix::operator*(const BitMatrix& rhs) const {
    if (cols_ != rhs.rows_) throw std::invalid_argument("dimension mismatch in product");
    BitMatrix out(rows_, rhs.cols_);
    for (std::size_t i = 0; i < rows_; ++i) {
        std::uint64_t* dst = &out.bits_[i * out.words_per_row_];
        for (std::size_t k = 0; k < cols_; ++k) {
            if (!get(i, k)) continue;
            const std::uint64_t* src = &rhs.bits_[k * rhs.words_per_row_];
            for (std::size_t w = 0; w < rhs.words_per_row_; ++w) dst[w] ^= src[w];
        }
    }
    return out;
}

BitMatrix BitMatrix::operator+(const BitMatrix& rhs) const {
    if (rows_ != rhs.rows_ || cols_ != rhs.cols_) throw std::invalid_argument("dimension mismatch in sum");
    BitMatrix out = *this;
    for (std::size_t i = 0; i < bits_.size(); ++i) out.bits_[i] ^= rhs.bits_[i];
    return out;
}

bool BitMatrix::operator==(const BitMatrix& rhs) const {
    return rows_ == rhs.rows_ && cols_ == rhs.cols_ && bits_ == rhs.bits_;
}

bool BitMatrix::is_zero() const {
    return std::all_of(bits_.begin(), bits_.end(), [](std::uint64_t w) { return w == 0; });
}

BitMatrix BitMatrix::vstack(const BitMatrix& below) const {
    if (cols_ != below.cols_) throw std::invalid_argument("vstack column mismatch");
    BitMatrix out(rows_ + below.rows_, cols_);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < cols_; ++j) out.set(i, j, get(i, j));
    for (std::size_t i = 0; i < below.rows_; ++i)
        for (std::size_t j = 0; j < cols_; ++j) out.set(rows_ + i, j, below.get(i, j));
    return out;
}

BitMatrix BitMatrix::hstack(const BitMatrix& right) const {
    if (rows_ != right.rows_) throw std::invalid_argument("hstack row mismatch");
    BitMatrix out(rows_, cols_ + right.cols_);
    for (std::size_t i = 0; i < rows_; ++i) {
        for (std::size_t j = 0; j < cols_; ++j) out.set(i, j, get(i, j));
        for (std::size_t j = 0; j < right.cols_; ++j) out.set(i, cols_ + j, right.get(i, j));
    }
    return out;
}

namespace {

// row echelon form in place; returns pivot columns (one per eliminated row)
std::vector<std::size_t> eliminate(std::vector<std::vector<std::uint64_t>>& w, std::size_t rows,
                                   std::size_t cols) {
    std::vector<std::size_t> pivots;
    std::size_t row = 0;
    for (std::size_t col = 0; col < cols && row < rows; ++col) {
        std::size_t word = col / kWordBits;
        std::uint64_t mask = std::uint64_t{1} << (col % kWordBits);
        std::size_t sel = rows;
        for (std::size_t i = row; i < rows; ++i)
            if (w[i][word] & mask) { sel = i; break; }
        if (sel == rows) continue;
        std::swap(w[row], w[sel]);
        for (std::size_t i = 0; i < rows; ++i) {
            if (i != row && (w[i][word] & mask)) {
                for (std::size_t k = word; k < w[i].size(); ++k) w[i][k] ^= w[row][k];
            }
        }
        pivots.push_back(col);
        ++row;
    }
    return pivots;
}

std::vector<std::vector<std::uint64_t>> row_words(const BitMatrix& m) {
    std::size_t wpr = (m.cols() + kWordBits - 1) / kWordBits;
    std::vector<std::vector<std::uint64_t>> w(m.rows(), std::vector<std::uint64_t>(wpr, 0));
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j)
            if (m.get(i, j)) w[i][j / kWordBits] |= std::uint64_t{1} << (j % kWordBits);
    return w;
}

}  // namespace

std::size_t rank(const BitMatrix& m) {
    auto w = row_words(m);
    return eliminate(w, m.rows(), m.cols()).size();
}

std::vector<std::vector<int>> kernel_basis(const BitMatrix& m) {
    auto w = row_words(m);
    auto pivots = eliminate(w, m.rows(), m.cols());
    std::vector<bool> is_pivot(m.cols(), false);
    for (std::size_t p : pivots) is_pivot[p] = true;

    std::vector<std::vector<int>> basis;
    for (std::size_t free = 0; free < m.cols(); ++free) {
        if (is_pivot[free]) continue;
        std::vector<int> v(m.cols(), 0);
        v[free] = 1;
        for (std::size_t i = 0; i < pivots.size(); ++i) {
            if (w[i][free / kWordBits] >> (free % kWordBits) & 1u) v[pivots[i]] = 1;
        }
        basis.push_back(std::move(v));
    }
    return basis;
}

std::size_t homology_dim(const BitMatrix& d_in, const BitMatrix& d_out) {
    if (d_out.cols() != d_in.rows())
        throw std::invalid_argument("homology_dim: middle dimensions disagree");
    if (d_in.cols() > 0 && d_out.rows() > 0) {
        if (!(d_out * d_in).is_zero()) throw CompositeNonzero("d_out * d_in != 0 over F2");
    }
    std::size_t mid = d_out.cols();
    std::size_t ker = mid - rank(d_out);
    std::size_t im = rank(d_in);
    assert(im <= ker);
    return ker - im;
}

IntMatrix2n::IntMatrix2n(std::size_t rows, std::size_t cols, unsigned n)
    : rows_(rows), cols_(cols), n_(n), e_(rows * cols, 0) {
    if (n == 0 || n > 30) throw std::invalid_argument("modulus exponent out of range");
}

IntMatrix2n IntMatrix2n::from_rows(unsigned n, const std::vector<std::vector<std::uint32_t>>& rows) {
    std::size_t r = rows.size();
    std::size_t c = r == 0 ? 0 : rows[0].size();
    IntMatrix2n m(r, c, n);
    for (std::size_t i = 0; i < r; ++i) {
        if (rows[i].size() != c) throw std::invalid_argument("ragged row list");
        for (std::size_t j = 0; j < c; ++j) m.set(i, j, rows[i][j]);
    }
    return m;
}

std::uint32_t IntMatrix2n::get(std::size_t r, std::size_t c) const {
    assert(r < rows_ && c < cols_);
    return e_[r * cols_ + c];
}

void IntMatrix2n::set(std::size_t r, std::size_t c, std::uint32_t v) {
    assert(r < rows_ && c < cols_);
    std::uint32_t mask = (n_ >= 32) ? ~0u : ((1u << n_) - 1u);
    e_[r * cols_ + c] = v & mask;
}

IntMatrix2n IntMatrix2n::operator*(const IntMatrix2n& rhs) const {
    if (cols_ != rhs.rows_) throw std::invalid_argument("dimension mismatch in product");
    IntMatrix2n out(rows_, rhs.cols_, n_);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < rhs.cols_; ++j) {
            std::uint32_t acc = 0;
            for (std::size_t k = 0; k < cols_; ++k) acc += get(i, k) * rhs.get(k, j);
            out.set(i, j, acc);
        }
    return out;
}

bool IntMatrix2n::operator==(const IntMatrix2n& rhs) const {
    return rows_ == rhs.rows_ && cols_ == rhs.cols_ && n_ == rhs.n_ && e_ == rhs.e_;
}

namespace {

using Ring = std::uint32_t;
using RingMatrix = std::vector<std::vector<Ring>>;

RingMatrix ring_identity(std::size_t n) {
    RingMatrix m(n, std::vector<Ring>(n, 0));
    for (std::size_t i = 0; i < n; ++i) m[i][i] = 1;
    return m;
}

RingMatrix ring_mul(const RingMatrix& a, const RingMatrix& b) {
    std::size_t r = a.size();
    std::size_t mid = r == 0 ? 0 : a[0].size();
    std::size_t c = b.empty() ? 0 : b[0].size();
    assert(b.size() == mid);
    RingMatrix out(r, std::vector<Ring>(c, 0));
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t k = 0; k < mid; ++k) {
            Ring aik = a[i][k];
            if (aik == 0) continue;
            for (std::size_t j = 0; j < c; ++j) out[i][j] += aik * b[k][j];
        }
    return out;
}

struct SmithResult {
    RingMatrix u;     // rows x rows, invertible
    RingMatrix d;     // diagonalized matrix, u * a * v
    RingMatrix v;     // cols x cols, invertible
};

// Smith normal form over Z/2^32. Divisibility is total in this ring, so a
// single minimal-valuation pivot per step suffices; odd factors are units.
SmithResult smith_2adic(RingMatrix a) {
    std::size_t r = a.size();
    std::size_t c = r == 0 ? 0 : a[0].size();
    SmithResult s{ring_identity(r), std::move(a), ring_identity(c)};
    std::size_t steps = std::min(r, c);
    for (std::size_t t = 0; t < steps; ++t) {
        unsigned best = kRingBits;
        std::size_t bi = t, bj = t;
        for (std::size_t i = t; i < r; ++i)
            for (std::size_t j = t; j < c; ++j) {
                unsigned v = v2(s.d[i][j]);
                if (v < best) { best = v; bi = i; bj = j; }
            }
        if (best == kRingBits) break;
        std::swap(s.d[t], s.d[bi]);
        std::swap(s.u[t], s.u[bi]);
        if (bj != t) {
            for (std::size_t i = 0; i < r; ++i) std::swap(s.d[i][t], s.d[i][bj]);
            for (std::size_t i = 0; i < c; ++i) std::swap(s.v[i][t], s.v[i][bj]);
        }
        Ring piv = s.d[t][t];
        Ring unit = inv_odd(piv >> best);
        for (std::size_t j = 0; j < c; ++j) s.d[t][j] *= unit;
        for (std::size_t j = 0; j < r; ++j) s.u[t][j] *= unit;
        assert(s.d[t][t] == (Ring{1} << best));
        for (std::size_t i = 0; i < r; ++i) {
            if (i == t || s.d[i][t] == 0) continue;
            assert(v2(s.d[i][t]) >= best);
            Ring f = s.d[i][t] >> best;
            for (std::size_t j = 0; j < c; ++j) s.d[i][j] -= f * s.d[t][j];
            for (std::size_t j = 0; j < r; ++j) s.u[i][j] -= f * s.u[t][j];
        }
        for (std::size_t j = 0; j < c; ++j) {
            if (j == t || s.d[t][j] == 0) continue;
            Ring f = s.d[t][j] >> best;
            for (std::size_t i = 0; i < r; ++i) s.d[i][j] -= f * s.d[i][t];
            for (std::size_t i = 0; i < c; ++i) s.v[i][j] -= f * s.v[i][t];
        }
    }
    return s;
}

}  // namespace

std::vector<unsigned> smith_valuations(const std::vector<std::vector<std::uint32_t>>& m) {
    SmithResult s = smith_2adic(m);
    std::size_t r = s.d.size();
    std::size_t c = r == 0 ? 0 : s.d[0].size();
    std::vector<unsigned> vals;
    for (std::size_t t = 0; t < std::min(r, c); ++t) vals.push_back(v2(s.d[t][t]));
    std::sort(vals.begin(), vals.end());
    return vals;
}

std::vector<unsigned> homology_group_2n(const IntMatrix2n& d_in, const IntMatrix2n& d_out,
                                        const std::vector<unsigned>& mod_a,
                                        const std::vector<unsigned>& mod_b,
                                        const std::vector<unsigned>& mod_c) {
    std::size_t na = mod_a.size(), nb = mod_b.size(), nc = mod_c.size();
    if (d_in.rows() != nb || d_in.cols() != na || d_out.rows() != nc || d_out.cols() != nb)
        throw std::invalid_argument("homology_group_2n: matrix shapes disagree with moduli");
    for (unsigned e : mod_a)
        if (e == 0 || e > 30) throw std::invalid_argument("coordinate modulus out of range");
    for (unsigned e : mod_b)
        if (e == 0 || e > 30) throw std::invalid_argument("coordinate modulus out of range");
    for (unsigned e : mod_c)
        if (e == 0 || e > 30) throw std::invalid_argument("coordinate modulus out of range");

    // maps must respect coordinate moduli and compose to zero
    for (std::size_t j = 0; j < nb; ++j)
        for (std::size_t k = 0; k < na; ++k)
            if (v2(d_in.get(j, k)) + mod_a[k] < mod_b[j])
                throw CompositeNonzero("d_in not well-defined against coordinate moduli");
    for (std::size_t i = 0; i < nc; ++i)
        for (std::size_t j = 0; j < nb; ++j)
            if (v2(d_out.get(i, j)) + mod_b[j] < mod_c[i])
                throw CompositeNonzero("d_out not well-defined against coordinate moduli");
    for (std::size_t i = 0; i < nc; ++i)
        for (std::size_t k = 0; k < na; ++k) {
            Ring acc = 0;
            for (std::size_t j = 0; j < nb; ++j) acc += d_out.get(i, j) * d_in.get(j, k);
            if (mod_c[i] < kRingBits && (acc & ((Ring{1} << mod_c[i]) - 1)) != 0)
                throw CompositeNonzero("d_out * d_in != 0 mod coordinate moduli");
        }

    if (nb == 0) return {};

    // kernel of B -> C as a subgroup of (Z/2^32)^nb: scale row i into Z/2^32
    RingMatrix ker;
    if (nc == 0) {
        ker = ring_identity(nb);
    } else {
        RingMatrix gstar(nc, std::vector<Ring>(nb, 0));
        for (std::size_t i = 0; i < nc; ++i)
            for (std::size_t j = 0; j < nb; ++j)
                gstar[i][j] = d_out.get(i, j) << (kRingBits - mod_c[i]);
        SmithResult gs = smith_2adic(std::move(gstar));

        std::vector<unsigned> svals(nb, kRingBits);
        for (std::size_t t = 0; t < std::min(nc, nb); ++t) svals[t] = v2(gs.d[t][t]);

        // kernel generators: columns of V scaled by 2^(32 - s_t)
        ker.assign(nb, std::vector<Ring>(nb, 0));
        for (std::size_t j = 0; j < nb; ++j) {
            Ring scale =
                svals[j] == 0 ? 0 : (svals[j] == kRingBits ? 1 : (Ring{1} << (kRingBits - svals[j])));
            for (std::size_t i = 0; i < nb; ++i) ker[i][j] = gs.v[i][j] * scale;
        }
    }

    // image generators together with the coordinate relations of B
    RingMatrix img(nb, std::vector<Ring>(na + nb, 0));
    for (std::size_t j = 0; j < nb; ++j) {
        for (std::size_t k = 0; k < na; ++k) img[j][k] = d_in.get(j, k);
        img[j][na + j] = Ring{1} << mod_b[j];
    }

    // diagonalize the kernel subgroup, transport the image into its coordinates
    SmithResult ks = smith_2adic(std::move(ker));
    std::vector<unsigned> lambda(nb);
    for (std::size_t t = 0; t < nb; ++t) {
        lambda[t] = v2(ks.d[t][t]);
        assert(lambda[t] < kRingBits);  // kernel contains the coordinate lattice of B
    }
    RingMatrix w = ring_mul(ks.u, img);

    // relations of the quotient: image columns in kernel coordinates, plus the
    // cyclic-order relation of each kernel coordinate
    RingMatrix rel(nb, std::vector<Ring>(na + nb + nb, 0));
    for (std::size_t t = 0; t < nb; ++t) {
        for (std::size_t c = 0; c < na + nb; ++c) {
            Ring val = w[t][c];
            assert(lambda[t] == 0 || (val & ((Ring{1} << lambda[t]) - 1)) == 0);
            rel[t][c] = val >> lambda[t];
        }
        rel[t][na + nb + t] = lambda[t] == 0 ? 0 : (Ring{1} << (kRingBits - lambda[t]));
    }
    SmithResult rs = smith_2adic(std::move(rel));

    std::vector<unsigned> out;
    for (std::size_t t = 0; t < nb; ++t) {
        unsigned h = v2(rs.d[t][t]);
        assert(h <= 30);  // quotient exponent is bounded by the coordinate moduli
        if (h > 0) out.push_back(h);
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<unsigned> homology_group_2n(const IntMatrix2n& d_in, const IntMatrix2n& d_out) {
    if (d_in.modulus_exponent() != d_out.modulus_exponent())
        throw std::invalid_argument("uniform homology requires equal modulus exponents");
    unsigned n = d_out.modulus_exponent();
    std::vector<unsigned> mod_a(d_in.cols(), n), mod_b(d_out.cols(), n), mod_c(d_out.rows(), n);
    return homology_group_2n(d_in, d_out, mod_a, mod_b, mod_c);
}

}  // namespace ssc
