#pragma once

#include <cstdint>
#include <limits>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "ssc/f2linalg.hpp"
#include "ssc/motivic.hpp"
#include "ssc/slices.hpp"

namespace ssc {

// page data needs element bases the chosen base model cannot provide
struct UnsupportedTier : std::runtime_error {
    explicit UnsupportedTier(const std::string& what) : std::runtime_error(what) {}
};

// no recorded rule determines the later pages in this regime
struct NoCollapseRule : std::runtime_error {
    explicit NoCollapseRule(const std::string& what) : std::runtime_error(what) {}
};

struct Window {
    int p_lo = 0;
    int p_hi = 0;
    int q_lo = 0;
    int q_hi = 0;
    bool contains(int p, int q) const { return p_lo <= p && p <= p_hi && q_lo <= q && q <= q_hi; }
    friend bool operator==(const Window&, const Window&) = default;
};

// one wedge summand's contribution to a first-page cell
struct CellPiece {
    SummandSpec summand;  // level-l summand Sigma^{q+j,q} of the q-th slice
    GradedPiece piece;    // H_l^{q+j-p, q-w} of the base model
};

struct Cell {
    int p = 0;
    int q = 0;
    // lies on the stored margin outside the requested window; kept so that the
    // differentials of interior cells have honest sources and targets, but the
    // cell's own homology would need data beyond the stored range
    bool boundary = false;
    std::vector<CellPiece> pieces;   // first page only, ascending j
    std::vector<unsigned> orders;    // cyclic exponents; page 1: coordinate order, later pages: ascending
    int dim() const { return static_cast<int>(orders.size()); }
    // sum of the exponents, so the group order is 2^total_exp()
    unsigned total_exp() const;
};

inline constexpr int kInfinityPage = std::numeric_limits<int>::max();

struct Page {
    Theory theory;
    int n;  // coefficients Z/2^n
    int w;  // motivic weight
    int r;  // page index, kInfinityPage once no further differentials act
    BaseModel model;
    Window window;                        // requested range; stored cells extend one step beyond on page 1
    std::map<std::pair<int, int>, Cell> cells;  // keyed (p,q); absent means the zero group

    const Cell* find(int p, int q) const;
    int dim(int p, int q) const;                    // 0 when absent
    std::vector<unsigned> orders(int p, int q) const;
};

// integer-lift block matrix of d^1 out of cell (p,q); rows follow the
// coordinates of cell (p-1,q+1), columns those of (p,q), both in stored order
struct DifferentialMatrix {
    int p = 0;
    int q = 0;
    int w = 0;
    std::vector<std::vector<std::uint32_t>> entries;
    std::vector<unsigned> src_moduli;  // exponent of each source coordinate group
    std::vector<unsigned> dst_moduli;
    std::vector<int> src_j;  // owning wedge summand of each coordinate
    std::vector<int> dst_j;
    bool zero() const;
    // restriction to the coordinates owned by one (source, target) summand pair
    std::vector<std::vector<std::uint32_t>> block(int j_src, int j_dst) const;
};

// rho-stabilized pieces  hat-h^{p,q} = (h^{p,q} + h^{p-4,q} + ...)/B  and the
// mod-2^n analogue replacing the leading summand by H_n^{p,q}; n = 1 gives hat-h
struct HatPiece {
    int p = 0;
    int q = 0;
    std::vector<unsigned> orders;  // cyclic exponents ascending
    int dim() const { return static_cast<int>(orders.size()); }
};

// First page of the weight-w slice spectral sequence on the given window.
// Cells are stored one row and column beyond the window so that interior
// homology is exact; those extra cells carry the boundary flag.
// Number rings provide dimension data for n = 1 only; n >= 2 over a number
// ring raises UnsupportedTier.
Page e1_page(const BaseModel& model, Theory theory, int n, int w, const Window& window);

// d^1 out of stored cell (p,q); an absent target cell gives zero rows
DifferentialMatrix d1_matrix(const Page& page, int p, int q);

// cellwise homology of the first page; only interior cells survive, since the
// margin cells' homology would need sources outside the stored range
Page e2_page(const Page& page);

// E-infinity from a second page by the documented collapse and
// higher-differential rules; raises NoCollapseRule outside them
Page higher_pages(const Page& page);

HatPiece hat_piece(const BaseModel& model, int n, int p, int q);

// {meta:{schema,theory,mod,base,weight,page},cells:[{p,q,dims,labels,boundary}]}
std::string page_to_json(const Page& page);
std::string page_to_csv(const Page& page);    // header p,q,dim; interior cells, sorted
std::string page_to_ascii(const Page& page);  // dim grid, q rows descending
std::string page_to_tikz(const Page& page);   // dot-and-label chart

}  // namespace ssc
