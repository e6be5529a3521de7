#include "ssc/assembler.hpp"

#include <algorithm>
#include <array>
#include <climits>
#include <sstream>

#include "json.hpp"

namespace ssc {

namespace {

std::string exp_group(unsigned e) {
    if (e == 1) return "Z/2";
    if (e <= 5) return "Z/" + std::to_string(1u << e);
    return "Z/2^" + std::to_string(e);
}

std::string orders_to_string(const std::vector<unsigned>& o) {
    if (o.empty()) return "0";
    std::string s;
    for (std::size_t i = 0; i < o.size(); ++i) {
        if (i) s += " + ";
        s += exp_group(o[i]);
    }
    return s;
}

std::string coeff_label(int n) {
    return n == 1 ? std::string("Z/2") : "Z/2^" + std::to_string(n);
}

void append_note(std::string& dst, const std::string& extra) {
    if (extra.empty()) return;
    if (!dst.empty()) dst += "; ";
    dst += extra;
}

}  // namespace

std::string to_string(ExtensionStatus s) {
    return s == ExtensionStatus::ResolvedByRho ? "resolved-by-rho" : "split-unknown";
}

int GroupDescriptor::rank_lo() const {
    int t = 0;
    if (orders) t = static_cast<int>(orders->size());
    else if (dim) t = *dim;
    else if (dim_bounds) t = dim_bounds->lo;
    return t + free_rank;
}

int GroupDescriptor::rank_hi() const {
    int t = 0;
    if (orders) t = static_cast<int>(orders->size());
    else if (dim) t = *dim;
    else if (dim_bounds) t = dim_bounds->hi;
    return t + free_rank;
}

bool GroupDescriptor::trivial() const {
    return !torsion_symbolic && free_rank == 0 && rank_hi() == 0;
}

GroupDescriptor descriptor_from_orders(std::string symbol, std::vector<unsigned> orders) {
    GroupDescriptor g;
    g.symbol = std::move(symbol);
    std::sort(orders.begin(), orders.end());
    g.elementary = std::all_of(orders.begin(), orders.end(), [](unsigned e) { return e == 1; });
    g.orders = std::move(orders);
    return g;
}

namespace {

// ---------------------------------------------------------------------------
// number-ring descriptor builders

int nr_h(const BaseModel& model, int m, int q) {
    if (m < 0 || q < 0) return 0;
    return basis(model, m, q).dim;
}

// 2-rank of H^{2,q} of the ring of S-integers
int rk2_h2_int(const NumberRingParams& P, int q) {
    return (q % 2 == 0) ? P.r1 + P.s + P.t - 1 : P.s + P.t - 1;
}

// free rank of H^{1,q}; valid for q >= 2
int free_rank_h1(const NumberRingParams& P, int q) {
    return (q % 2 == 0) ? P.r2 : P.r1 + P.r2;
}

// stable upper bound for the 2-rank of the level-n group H_n^{m,q}
int int_rank2_hi(const NumberRingParams& P, int m, int q) {
    switch (m) {
        case 0: return 1;
        case 1: return free_rank_h1(P, q) + 1 + rk2_h2_int(P, q);
        case 2: return rk2_h2_int(P, q) + (q % 2 != 0 ? P.r1 : 0);
        default: return P.r1;
    }
}

std::string braced(int m, const std::string& w) { return "{" + std::to_string(m) + "," + w + "}"; }

std::string rho_pow_str(int i) { return i == 1 ? "rho" : "rho^" + std::to_string(i); }

GroupDescriptor h_descriptor(const BaseModel& model, int m, int q, const std::string& w) {
    GroupDescriptor g;
    g.symbol = "h^" + braced(m, w);
    g.dim = nr_h(model, m, q);
    return g;
}

GroupDescriptor ker_rho_descriptor(const BaseModel& model, int i, int m, int q, const std::string& w) {
    GroupDescriptor g;
    g.symbol = "ker(" + rho_pow_str(i) + "_" + braced(m, w) + ")";
    if (q >= 1) {
        try {
            g.dim = rho_kernel_dim(model, i, m, q);
            return g;
        } catch (const UnknownKernel&) {
        }
    }
    const NumberRingParams& P = model.ring_params();
    if (m == 0) {
        if (P.r1 > 0) {
            g.dim = 0;  // rho-power classes stay nonzero at every real place
        } else if (i >= 3) {
            g.dim = nr_h(model, 0, q);  // rho cubed vanishes without real places
        } else {
            g.dim_bounds = DimInterval{0, nr_h(model, 0, q)};
            g.note = "depends on whether the minus-one class is a square";
        }
        return g;
    }
    if (m == 1 && i == 1) {
        g.dim_bounds = rho_kernel_interval(model, 1, 1, q);
        g.note = "contained in the kernel of the squared map, which has the upper-bound rank";
        return g;
    }
    int d = nr_h(model, m, q);
    g.dim_bounds = DimInterval{std::max(0, d - nr_h(model, m + i, q + i)), d};
    g.note = "kernel rank not determined by the ring parameters";
    return g;
}

GroupDescriptor coker_rho_descriptor(const BaseModel& model, int i, int m, int q, const std::string& w) {
    GroupDescriptor g;
    g.symbol = "h^" + braced(m, w) + "/" + rho_pow_str(i);
    if (q >= 1) {
        try {
            g.dim = rho_cokernel_dim(model, i, m, q);
            return g;
        } catch (const UnknownKernel&) {
        }
    }
    const NumberRingParams& P = model.ring_params();
    int d = nr_h(model, m, q);
    if (m - i == 1 && m >= 3 && q == m) {
        g.dim = 0;  // rho-powers out of the units fill the whole diagonal group
        return g;
    }
    if (m - i == 0) {
        if (P.r1 > 0) {
            g.dim = std::max(d - 1, 0);  // the rho-tau power survives at a real place
        } else if (i >= 3) {
            g.dim = d;
        } else {
            g.dim_bounds = DimInterval{std::max(d - 1, 0), d};
            g.note = "depends on whether the minus-one class is a square";
        }
        return g;
    }
    g.dim_bounds = DimInterval{std::max(0, d - nr_h(model, m - i, q - i)), d};
    g.note = "image rank not determined by the ring parameters";
    return g;
}

GroupDescriptor int_h_descriptor(const BaseModel& model, int m, int q, const std::string& w) {
    const NumberRingParams& P = model.ring_params();
    GroupDescriptor g;
    g.symbol = "H^" + braced(m, w);
    g.elementary = false;
    switch (m) {
        case 0:
            g.dim = 1;
            g.note = "cyclic of order the 2-part of w_" + w;
            break;
        case 1:
            g.free_rank = free_rank_h1(P, q);
            g.dim = 1;
            g.note = "torsion cyclic of order the 2-part of w_" + w;
            break;
        default:
            g.dim = rk2_h2_int(P, q);
            g.note = "finite with symbolic cyclic exponents";
            break;
    }
    return g;
}

GroupDescriptor ker_op_descriptor(const BaseModel& model, const std::string& op, int m, int q,
                                  const std::string& w) {
    const NumberRingParams& P = model.ring_params();
    GroupDescriptor g;
    g.symbol = op.find(',') == std::string::npos ? "ker(" + op + "_" + braced(m, w) + ")"
                                                 : "ker(" + op + ")_" + braced(m, w);
    g.elementary = false;
    g.dim_bounds = DimInterval{0, int_rank2_hi(P, m, std::max(q, 0))};
    g.note = "level-limit kernel left symbolic";
    return g;
}

GroupDescriptor coker_op_descriptor(const BaseModel& model, const std::string& op, int m, int q,
                                    const std::string& w) {
    const NumberRingParams& P = model.ring_params();
    GroupDescriptor g;
    g.symbol = "h^" + braced(m, w) + "/" + op;
    int d = nr_h(model, m, q);
    g.dim_bounds = DimInterval{std::max(0, d - int_rank2_hi(P, m, std::max(q - 1, 0))), d};
    g.note = "image of the level-limit map left symbolic";
    return g;
}

GroupDescriptor tower_descriptor(const BaseModel& model, bool bare_exponent) {
    GroupDescriptor g;
    g.symbol = bare_exponent ? "Z_2^{r}" : "Z_2^{r_1}";
    g.dim = 0;
    g.free_rank = model.ring_params().r1;
    if (bare_exponent) g.note = "printed exponent r; the rho-tower has rank r_1";
    return g;
}

// ---------------------------------------------------------------------------
// transcribed table rows

enum class EntKind { H, KerRho, CokerRho, IntH, FreeTower, FreeTowerBare, KerOp, CokerOp };

struct Ent {
    EntKind kind;
    int i = 0;    // rho power
    int m = 0;    // cohomological degree
    int off = 0;  // weight 4k + off
    const char* op = "";
};

Ent H(int m, int off) { return {EntKind::H, 0, m, off, ""}; }
Ent KR(int i, int m, int off) { return {EntKind::KerRho, i, m, off, ""}; }
Ent CR(int i, int m, int off) { return {EntKind::CokerRho, i, m, off, ""}; }
Ent IH(int m, int off) { return {EntKind::IntH, 0, m, off, ""}; }
Ent ZT() { return {EntKind::FreeTower, 0, 0, 0, ""}; }
Ent ZTr() { return {EntKind::FreeTowerBare, 0, 0, 0, ""}; }
Ent KOp(const char* op, int m, int off) { return {EntKind::KerOp, 0, m, off, op}; }
Ent COp(const char* op, int m, int off) { return {EntKind::CokerOp, 0, m, off, op}; }

using Quot = std::vector<Ent>;
using Row = std::vector<Quot>;

// mod-2 algebraic K-groups K_{8k+c} of a ring of S-integers
Row kgl_row(int c) {
    switch (c) {
        case 0: return {{H(0, 0)}, {KR(1, 2, 1)}};
        case 1: return {{H(1, 1)}};
        case 2: return {{H(0, 1)}, {H(2, 2)}};
        case 3: return {{H(1, 2)}, {CR(3, 3, 3)}};
        case 4: return {{H(2, 3)}, {CR(3, 4, 4)}};
        case 5: return {{KR(2, 1, 3)}, {CR(3, 3, 4)}};
        case 6: return {{KR(1, 2, 4)}, {CR(3, 4, 5)}};
        default: return {{KR(2, 1, 4)}};
    }
}

// mod-2 hermitian K-groups KQ_{8k+c+2w, w} of a ring of S-integers
Row kq_row(int w, int c) {
    switch (w * 8 + c) {
        case 0: return {{H(0, 0)}, {KR(1, 2, 1), H(1, 1)}, {CR(1, 2, 2)}};
        case 1: return {{KR(1, 1, 1), H(0, 1)}, {KR(1, 2, 2), H(1, 2)}};
        case 2: return {{H(0, 1)}, {H(1, 2), H(0, 2)}, {H(2, 3)}};
        case 3: return {{H(0, 2)}, {H(1, 3)}};
        case 4: return {{H(0, 3)}, {H(4, 4)}};
        case 5: return {};
        case 6: return {{KR(1, 2, 4)}, {CR(3, 4, 5)}};
        case 7: return {{KR(2, 1, 4)}, {KR(1, 2, 5)}};

        case 8: return {{KR(1, 0, 0)}, {KR(2, 1, 1), H(0, 1)}, {KR(1, 2, 2)}};
        case 9: return {{H(0, 1)}, {H(1, 2)}};
        case 10: return {{H(0, 2)}};
        case 11: return {{H(3, 3)}};
        case 12: return {{KR(1, 2, 3)}, {CR(2, 3, 4)}};
        case 13: return {{KR(2, 1, 3)}, {CR(3, 3, 4), KR(1, 2, 4)}, {CR(3, 4, 5)}};
        case 14: return {{KR(3, 0, 3)}, {KR(1, 2, 4), KR(2, 1, 4)}, {CR(2, 3, 5), KR(1, 2, 5)}};
        case 15: return {{KR(2, 1, 4), H(0, 4)}, {KR(1, 2, 5), CR(1, 1, 5)}, {CR(2, 3, 6)}};

        case 16: return {{H(0, 1)}};
        case 17: return {};
        case 18: return {{H(2, 2)}, {CR(2, 3, 3)}};
        case 19: return {{KR(2, 1, 2)}, {CR(2, 2, 3)}, {CR(2, 3, 4)}};
        case 20:
            return {{KR(2, 0, 2)}, {H(2, 3), KR(2, 1, 3)}, {CR(3, 3, 4), CR(1, 2, 4)}, {CR(3, 4, 5)}};
        case 21: return {{KR(1, 1, 3), KR(3, 0, 3)}, {CR(2, 2, 4), KR(2, 1, 4)}, {CR(2, 3, 5)}};
        case 22: return {{KR(2, 0, 3)}, {KR(2, 1, 4), H(0, 4)}, {CR(2, 2, 5)}, {CR(5, 6, 6)}};
        case 23: return {{KR(2, 0, 4)}, {KR(2, 1, 5)}};

        case 24: return {{KR(1, 2, 1)}};
        case 25: return {{H(1, 1)}, {CR(2, 2, 2)}};
        case 26: return {{KR(2, 0, 1)}, {KR(1, 2, 2), H(1, 2)}, {CR(2, 2, 3)}};
        case 27: return {{H(1, 2), KR(2, 0, 2)}, {H(2, 3), CR(1, 1, 3)}, {CR(3, 3, 4)}};
        case 28: return {{KR(1, 0, 2)}, {H(1, 3), KR(3, 0, 3)}, {CR(2, 2, 4)}};
        case 29: return {{KR(2, 0, 3)}, {H(1, 4)}, {CR(5, 5, 5)}};
        case 30: return {{KR(3, 0, 4)}};
        default: return {};
    }
}

// 2-adic hermitian K-groups KQ_{8k+c, 4k+w} of a ring of S-integers
Row kq_2adic_row(int w, int c) {
    switch (w * 8 + c) {
        case 0: return {{IH(0, 0)}, {H(1, 1)}, {H(2, 2)}, {ZT()}};
        case 1: return {{H(0, 1)}, {KOp("pr", 3, 2), H(1, 2)}};
        case 2: return {{KOp("tau pr, Sq^2", 2, 2)}, {COp("tau pr", 1, 3)}};
        case 3: return {{KOp("pr", 1, 2)}, {H(0, 3)}};
        case 4: return {{ZT()}};
        case 5: return {};
        case 6: return {{KOp("Sq^2 pr", 2, 4)}};
        case 7: return {{KOp("Sq^2 del", 1, 4)}, {KR(2, 2, 5)}};

        case 8: return {{KR(2, 1, 4)}, {KR(2, 2, 5)}};
        case 9: return {{H(0, 0)}, {KOp("pr", 3, 1), H(1, 1)}, {COp("tau pr", 2, 2)}, {ZT()}};
        case 10: return {{KOp("pr", 2, 1), H(0, 1)}, {COp("tau pr", 1, 2)}};
        case 11: return {{KOp("pr", 1, 1)}, {H(0, 2)}};
        case 12: return {};
        case 13: return {{ZT()}};
        case 14: return {{KOp("pr", 2, 3)}};
        case 15: return {{KOp("Sq^2 pr", 1, 3)}, {KR(1, 2, 4)}};

        case 16: return {{KR(2, 1, 3)}, {CR(2, 2, 4)}};
        case 17: return {{KR(2, 0, 3)}, {KR(2, 1, 4)}};
        case 18: return {{KOp("tau pr", 2, 0), H(0, 0)}, {COp("tau pr", 1, 1)}, {ZT()}};
        case 19: return {{KOp("pr", 1, 0)}, {COp("tau pr", 0, 1)}};
        case 20: return {{KOp("pr", 0, 0)}};
        case 21: return {};
        case 22: return {{IH(2, 2)}, {ZT()}};
        case 23: return {{IH(1, 2)}, {H(2, 3)}};

        case 24: return {{H(1, 1)}, {CR(2, 2, 3)}};
        case 25: return {{KR(2, 0, 2)}, {KOp("pr", 3, 3)}, {COp("tau pr", 2, 4)}};
        case 26: return {{KOp("tau pr, Sq^2", 2, 3)}, {COp("tau pr", 1, 4)}};
        case 27: return {{KOp("pr", 1, -1)}, {H(0, 0)}, {ZT()}};
        case 28: return {};
        case 29: return {};
        case 30: return {{KOp("Sq^2 del", 2, 1)}};
        default: return {{IH(1, 1)}, {H(2, 2)}, {ZTr()}};
    }
}

std::string weight_str(bool symbolic, int k, int off) {
    if (!symbolic) return std::to_string(4 * k + off);
    if (off == 0) return "4k";
    if (off > 0) return "4k+" + std::to_string(off);
    return "4k-" + std::to_string(-off);
}

GroupDescriptor ent_descriptor(const BaseModel& model, const Ent& e, int k, bool symbolic) {
    int k_eval = symbolic ? 1 : k;  // representative generic value of k
    int q = 4 * k_eval + e.off;
    std::string w = weight_str(symbolic, k, e.off);
    GroupDescriptor g;
    switch (e.kind) {
        case EntKind::H: g = h_descriptor(model, e.m, q, w); break;
        case EntKind::KerRho: g = ker_rho_descriptor(model, e.i, e.m, q, w); break;
        case EntKind::CokerRho: g = coker_rho_descriptor(model, e.i, e.m, q, w); break;
        case EntKind::IntH: g = int_h_descriptor(model, e.m, q, w); break;
        case EntKind::FreeTower: g = tower_descriptor(model, false); break;
        case EntKind::FreeTowerBare: g = tower_descriptor(model, true); break;
        case EntKind::KerOp: g = ker_op_descriptor(model, e.op, e.m, q, w); break;
        case EntKind::CokerOp: g = coker_op_descriptor(model, e.op, e.m, q, w); break;
    }
    if (symbolic) {
        if (e.off < 0) append_note(g.note, "vanishes when k = 0");
        if (e.kind == EntKind::IntH && e.m == 0 && e.off == 0)
            append_note(g.note, "free of rank one when k = 0");
    }
    return g;
}

GroupDescriptor combine(std::vector<GroupDescriptor> parts) {
    if (parts.size() == 1) return std::move(parts.front());
    GroupDescriptor g;
    bool all_orders = true;
    bool exact = true;
    std::vector<unsigned> ords;
    DimInterval total{0, 0};
    for (GroupDescriptor& part : parts) {
        if (!g.symbol.empty()) g.symbol += " + ";
        g.symbol += part.symbol;
        g.free_rank += part.free_rank;
        g.elementary = g.elementary && part.elementary;
        g.torsion_symbolic = g.torsion_symbolic || part.torsion_symbolic;
        append_note(g.note, part.note);
        if (part.orders) {
            ords.insert(ords.end(), part.orders->begin(), part.orders->end());
            total.lo += static_cast<int>(part.orders->size());
            total.hi += static_cast<int>(part.orders->size());
        } else if (part.dim) {
            all_orders = false;
            total.lo += *part.dim;
            total.hi += *part.dim;
        } else if (part.dim_bounds) {
            all_orders = false;
            exact = false;
            total.lo += part.dim_bounds->lo;
            total.hi += part.dim_bounds->hi;
        } else {
            all_orders = false;
            exact = false;
        }
    }
    if (all_orders) {
        std::sort(ords.begin(), ords.end());
        g.orders = std::move(ords);
    } else if (exact) {
        g.dim = total.lo;
    } else {
        g.dim_bounds = total;
    }
    return g;
}

std::vector<GroupDescriptor> instantiate_row(const BaseModel& model, const Row& row, int k,
                                             bool symbolic) {
    std::vector<GroupDescriptor> out;
    out.reserve(row.size());
    for (const Quot& quot : row) {
        std::vector<GroupDescriptor> parts;
        parts.reserve(quot.size());
        for (const Ent& e : quot) parts.push_back(ent_descriptor(model, e, k, symbolic));
        out.push_back(combine(std::move(parts)));
    }
    return out;
}

// ---------------------------------------------------------------------------
// filtration assembly

FiltrationTable tier1_filtration(const BaseModel& model, Theory theory, int n, int p, int w) {
    int q_hi = std::max(w, p - w) + model.vcd() + n + 6;
    Window win{p - 1, p + 1, w, q_hi};
    Page page = higher_pages(e2_page(e1_page(model, theory, n, w, win)));

    FiltrationTable t;
    t.theory = theory;
    t.coeff = coeff_label(n);
    t.p = p;
    t.w = w;
    t.symbolic = false;
    if (theory == Theory::KGL) {
        t.abutment = "K_" + std::to_string(p - 2 * w) + "(" + model.name() + "; " + t.coeff + ")";
    } else {
        t.abutment = to_string(theory) + "_{" + std::to_string(p) + "," + std::to_string(w) + "}(" +
                     model.name() + "; " + t.coeff + ")";
    }
    t.extensions = (theory == Theory::KW && model.kind() == BaseKind::RealClosed)
                       ? ExtensionStatus::ResolvedByRho
                       : ExtensionStatus::SplitUnknown;
    for (const auto& [key, cell] : page.cells) {
        if (key.first != p || cell.orders.empty()) continue;
        GroupDescriptor g = descriptor_from_orders("slice " + std::to_string(key.second), cell.orders);
        g.slice = key.second;
        t.quotients.push_back(std::move(g));
    }
    return t;
}

FiltrationTable tier2_kgl(const BaseModel& model, int n, int p, int w) {
    if (n != 1) throw UnsupportedTier("number-ring K-group tables cover Z/2 coefficients only");
    int nk = p - 2 * w;
    if (nk < 0) throw OutOfRange("mod-2 K-group tables start in degree zero");
    FiltrationTable t;
    t.theory = Theory::KGL;
    t.coeff = "Z/2";
    t.abutment = "K_" + std::to_string(nk) + "(" + model.name() + "; Z/2)";
    t.p = p;
    t.w = w;
    t.quotients = instantiate_row(model, kgl_row(nk % 8), nk / 8, false);
    return t;
}

FiltrationTable tier2_kq(const BaseModel& model, int n, int p, int w) {
    if (n != 1) throw UnsupportedTier("number-ring hermitian tables cover Z/2 coefficients only");
    int wbar = ((w % 4) + 4) % 4;
    int a = (w - wbar) / 4;       // (8,4)-periodicity shift
    int row = (p - 8 * a) - 2 * wbar;
    if (row < 0) throw OutOfRange("mod-2 hermitian tables start in shifted degree zero");
    FiltrationTable t;
    t.theory = Theory::KQ;
    t.coeff = "Z/2";
    t.abutment = "KQ_{" + std::to_string(p) + "," + std::to_string(w) + "}(" + model.name() + "; Z/2)";
    t.p = p;
    t.w = w;
    t.quotients = instantiate_row(model, kq_row(wbar, row % 8), row / 8, false);
    return t;
}

}  // namespace

FiltrationTable filtration(const BaseModel& model, Theory theory, int n, int p, int w) {
    if (n < 1) throw std::invalid_argument("coefficient exponent must be positive");
    if (!model.dimension_only()) return tier1_filtration(model, theory, n, p, w);
    switch (theory) {
        case Theory::KGL: return tier2_kgl(model, n, p, w);
        case Theory::KQ: return tier2_kq(model, n, p, w);
        default:
            throw UnsupportedTier(
                "higher Witt-theory over number rings is recorded integrally, not as a mod-2 table");
    }
}

GroupBounds group_order_2rank(const FiltrationTable& table) {
    GroupBounds b;
    int rank_lo = 0;
    int rank_hi = 0;
    for (const GroupDescriptor& g : table.quotients) {
        if (g.free_rank > 0) b.finite = false;
        if (g.torsion_symbolic) {
            b.order_bounded = false;
        } else if (g.orders) {
            int e = 0;
            for (unsigned x : *g.orders) e += static_cast<int>(x);
            b.order_exp.lo += e;
            b.order_exp.hi += e;
        } else {
            b.order_exp.lo += g.dim ? *g.dim : g.dim_bounds->lo;
            b.order_exp.hi += g.dim ? *g.dim : g.dim_bounds->hi;
            if (!g.elementary) b.order_bounded = false;
        }
        rank_lo = std::max(rank_lo, g.rank_lo());
        rank_hi += g.rank_hi();
    }
    if (!b.finite) b.order_bounded = false;
    b.two_rank = DimInterval{rank_lo, rank_hi};
    return b;
}

int graded_witt(const BaseModel& model, int q) {
    if (q < 0) return 0;
    if (model.dimension_only()) {
        const NumberRingParams& P = model.ring_params();
        if (q == 0) return 1;
        if (q == 1) return P.r1 + P.r2 + P.s + P.t;
        if (q == 2) return P.r1 + P.s - 1;  // tau embeds the Picard part of weight one
        return P.r1;
    }
    GradedPiece diag = basis(model, q, q);
    if (q == 0 || diag.dim == 0) return diag.dim;
    GradedPiece below = basis(model, q, q - 1);
    if (below.dim == 0) return diag.dim;
    auto lift = op_matrix(model, OperationSymbol::mul_tau(), below, diag);
    std::vector<std::vector<int>> rows(lift.size());
    for (std::size_t r = 0; r < lift.size(); ++r) {
        rows[r].reserve(lift[r].size());
        for (std::uint32_t v : lift[r]) rows[r].push_back(static_cast<int>(v & 1u));
    }
    return diag.dim - static_cast<int>(rank(BitMatrix::from_rows(rows)));
}

WittGrading graded_witt_table(const BaseModel& model, int q_max) {
    WittGrading g;
    for (int q = 0; q <= q_max; ++q) g.dims[q] = graded_witt(model, q);
    return g;
}

std::vector<FiltrationTable> two_adic_tables(const BaseModel& model, int w_mod4) {
    if (!model.dimension_only())
        throw std::invalid_argument("2-adic hermitian tables are recorded for number rings");
    if (w_mod4 < 0 || w_mod4 > 3) throw OutOfRange("weight residue must lie in 0..3");
    std::vector<FiltrationTable> out;
    out.reserve(8);
    for (int c = 0; c < 8; ++c) {
        Row row = kq_2adic_row(w_mod4, c);
        FiltrationTable t;
        t.theory = Theory::KQ;
        t.coeff = "Z_2";
        std::string deg = c == 0 ? "8k" : "8k+" + std::to_string(c);
        std::string wt = w_mod4 == 0 ? "4k" : "4k+" + std::to_string(w_mod4);
        t.abutment = "KQ_{" + deg + "," + wt + "}(" + model.name() + "; Z_2)";
        t.p = c;
        t.w = w_mod4;
        t.symbolic = true;
        t.quotients = instantiate_row(model, row, 0, true);
        bool tower = std::any_of(row.begin(), row.end(), [](const Quot& quot) {
            return std::any_of(quot.begin(), quot.end(), [](const Ent& e) {
                return e.kind == EntKind::FreeTower || e.kind == EntKind::FreeTowerBare;
            });
        });
        t.extensions = tower ? ExtensionStatus::ResolvedByRho : ExtensionStatus::SplitUnknown;
        out.push_back(std::move(t));
    }
    return out;
}

GroupDescriptor integral_witt(const BaseModel& model, int p, int w) {
    if (!model.dimension_only())
        throw std::invalid_argument("integral Witt groups are recorded for number rings");
    const NumberRingParams& P = model.ring_params();
    int r = (((p - w) % 4) + 4) % 4;
    GroupDescriptor g;
    if (r == 0) {
        g.symbol = "W(" + model.name() + ")";
        g.free_rank = P.r1;
        g.torsion_symbolic = true;
        g.elementary = false;
        g.note = "finitely generated; torsion left symbolic";
    } else if (r == 3) {
        g.symbol = "Pic(" + model.name() + ")/2";
        g.orders = std::vector<unsigned>(static_cast<std::size_t>(P.t), 1u);
    } else {
        g.symbol = "0";
        g.orders = std::vector<unsigned>{};
    }
    return g;
}

GroupDescriptor odd_primary(const BaseModel& model, int ell, int p, int w) {
    if (!model.dimension_only())
        throw std::invalid_argument("odd-primary hermitian groups are recorded for number rings");
    if (ell < 3 || ell % 2 == 0) throw std::invalid_argument("ell must be an odd prime");
    if (p - w < 0) throw OutOfRange("odd-primary hermitian groups need p - w >= 0");
    const NumberRingParams& P = model.ring_params();
    std::string zl = "Z_" + std::to_string(ell);
    int half = (p - w) / 2;
    GroupDescriptor g;
    g.elementary = false;
    switch ((p - w) % 4) {
        case 0: {
            g.symbol = "H^{0," + std::to_string(half) + "}(" + model.name() + "; " + zl + ")";
            if (half == 0) {
                g.free_rank = 1;
                g.dim = 0;
                g.note = "free of rank one";
            } else {
                g.torsion_symbolic = true;
                g.note = "cyclic of order the " + zl + "-part of w_" + std::to_string(half);
            }
            break;
        }
        case 1:
            g.symbol = "0";
            g.orders = std::vector<unsigned>{};
            g.elementary = true;
            break;
        case 2:
            g.symbol = "H^{2," + std::to_string(2 + half) + "}(" + model.name() + "; " + zl + ")";
            g.torsion_symbolic = true;
            g.note = "finite; odd-primary ranks are not carried by the stored parameters";
            break;
        default:
            g.symbol = "H^{1," + std::to_string(2 + half) + "}(" + model.name() + "; " + zl + ")";
            g.free_rank = free_rank_h1(P, 2 + half);
            g.torsion_symbolic = true;
            g.note = "free part from the Borel ranks; torsion left symbolic";
            break;
    }
    return g;
}

// ---------------------------------------------------------------------------
// serializers

namespace {

std::string describe(const GroupDescriptor& g) {
    std::string s = g.symbol;
    std::string info;
    if (g.free_rank > 0) info = "free " + std::to_string(g.free_rank);
    if (g.orders) {
        if (!info.empty()) info += ", ";
        info += orders_to_string(*g.orders);
    } else if (g.dim) {
        if (!(*g.dim == 0 && !info.empty())) {
            if (!info.empty()) info += ", ";
            info += "rk " + std::to_string(*g.dim);
        }
    } else if (g.dim_bounds) {
        if (!info.empty()) info += ", ";
        info += "rk " + std::to_string(g.dim_bounds->lo) + ".." + std::to_string(g.dim_bounds->hi);
    } else {
        if (!info.empty()) info += ", ";
        info += "torsion symbolic";
    }
    return s + " [" + info + "]";
}

std::string quotient_line(const FiltrationTable& t) {
    if (t.quotients.empty()) return "0";
    std::string s;
    int l = t.length();
    for (int i = 0; i < l; ++i) {
        if (i) s += ", ";
        if (i + 1 < l)
            s += "f" + std::to_string(i) + "/f" + std::to_string(i + 1) + " = ";
        else
            s += "f" + std::to_string(i) + " = ";
        s += describe(t.quotients[i]);
    }
    return s;
}

void replace_all(std::string& s, const std::string& from, const std::string& to) {
    std::size_t pos = 0;
    while ((pos = s.find(from, pos)) != std::string::npos) {
        s.replace(pos, from.size(), to);
        pos += to.size();
    }
}

std::string latex_symbol(std::string s) {
    replace_all(s, "tau pr", "\x01");
    replace_all(s, "Sq^2 del", "\x02");
    replace_all(s, "Sq^2 pr", "\x03");
    replace_all(s, "pr", "\x04");
    replace_all(s, "rho", "\\rho");
    replace_all(s, "Sq^2", "\\mathsf{Sq}^2");
    replace_all(s, "ker(", "\\ker(");
    replace_all(s, "Z_2", "\\mathbb{Z}_2");
    replace_all(s, " + ", " \\oplus ");
    replace_all(s, "slice ", "\\mathsf{slice}\\,");
    replace_all(s, "\x01", "\\tau\\mathsf{pr}");
    replace_all(s, "\x02", "\\mathsf{Sq}^2\\partial");
    replace_all(s, "\x03", "\\mathsf{Sq}^2\\mathsf{pr}");
    replace_all(s, "\x04", "\\mathsf{pr}");
    return s;
}

}  // namespace

std::string tables_to_json(const std::vector<FiltrationTable>& tables) {
    nlohmann::ordered_json root;
    root["schema"] = "ssc.tables.v1";
    root["count"] = tables.size();
    root["tables"] = nlohmann::ordered_json::array();
    for (const FiltrationTable& t : tables) {
        nlohmann::ordered_json jt;
        jt["theory"] = to_string(t.theory);
        jt["coefficients"] = t.coeff;
        jt["abutment"] = t.abutment;
        jt["degree"] = t.p;
        jt["weight"] = t.w;
        jt["symbolic"] = t.symbolic;
        jt["extensions"] = to_string(t.extensions);
        jt["length"] = t.length();
        jt["quotients"] = nlohmann::ordered_json::array();
        for (const GroupDescriptor& g : t.quotients) {
            nlohmann::ordered_json jg;
            jg["symbol"] = g.symbol;
            if (g.slice != INT_MIN) jg["slice"] = g.slice;
            if (g.orders) jg["orders"] = *g.orders;
            if (g.dim) jg["dim"] = *g.dim;
            if (g.dim_bounds) {
                jg["dim_lo"] = g.dim_bounds->lo;
                jg["dim_hi"] = g.dim_bounds->hi;
            }
            if (g.free_rank > 0) jg["free_rank"] = g.free_rank;
            jg["elementary"] = g.elementary;
            if (g.torsion_symbolic) jg["torsion_symbolic"] = true;
            if (!g.note.empty()) jg["note"] = g.note;
            jt["quotients"].push_back(std::move(jg));
        }
        GroupBounds b = group_order_2rank(t);
        jt["order"] = {{"finite", b.finite},
                       {"bounded", b.order_bounded},
                       {"log2_lo", b.order_exp.lo},
                       {"log2_hi", b.order_exp.hi}};
        jt["two_rank"] = {{"lo", b.two_rank.lo}, {"hi", b.two_rank.hi}};
        root["tables"].push_back(std::move(jt));
    }
    return root.dump(2) + "\n";
}

std::string tables_to_text(const std::vector<FiltrationTable>& tables) {
    std::size_t name_w = 0;
    for (const FiltrationTable& t : tables) name_w = std::max(name_w, t.abutment.size());
    std::ostringstream out;
    for (const FiltrationTable& t : tables) {
        out << t.abutment << std::string(name_w - t.abutment.size(), ' ') << " | " << t.length()
            << " | " << quotient_line(t);
        if (t.extensions == ExtensionStatus::ResolvedByRho) out << "  (resolved by rho)";
        out << "\n";
    }
    return out.str();
}

std::string tables_to_latex(const std::vector<FiltrationTable>& tables) {
    std::ostringstream out;
    out << "\\begin{tabular}{l|l|l}\n\\hline\n";
    out << "group & $l$ & filtration quotients\\\\\n\\hline\n";
    for (const FiltrationTable& t : tables) {
        out << "$" << latex_symbol(t.abutment) << "$ & " << t.length() << " & $";
        if (t.quotients.empty()) {
            out << "0";
        } else {
            int l = t.length();
            for (int i = 0; i < l; ++i) {
                if (i) out << ", ";
                out << "\\mathsf{f}_{" << i << "}";
                if (i + 1 < l) out << "/\\mathsf{f}_{" << i + 1 << "}";
                out << " = " << latex_symbol(t.quotients[i].symbol);
            }
        }
        out << "$\\\\\n";
    }
    out << "\\hline\n\\end{tabular}\n";
    return out.str();
}

}  // namespace ssc
