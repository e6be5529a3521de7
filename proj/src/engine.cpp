#include "ssc/engine.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

#include "json.hpp"

namespace ssc {

namespace {

// lift matrices carry raw integer entries; 30 is the widest IntMatrix2n modulus
constexpr unsigned kLiftExp = 30;

int mod4(int v) { return ((v % 4) + 4) % 4; }

IntMatrix2n lift_matrix(const std::vector<std::vector<std::uint32_t>>& entries, std::size_t rows,
                        std::size_t cols) {
    IntMatrix2n m(rows, cols, kLiftExp);
    for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t c = 0; c < cols; ++c) m.set(r, c, entries[r][c]);
    return m;
}

std::vector<std::string> coord_labels(const Cell& cell) {
    std::vector<std::string> labels;
    for (const CellPiece& cp : cell.pieces) {
        const GradedPiece& piece = cp.piece;
        if (piece.dimension_only) {
            for (int k = 0; k < piece.dim; ++k) {
                std::ostringstream os;
                os << "h^{" << piece.p << ',' << piece.q << "}#" << k;
                labels.push_back(os.str());
            }
        } else if (piece.level == 1) {
            for (const Monomial& m : piece.basis) labels.push_back(to_string(m));
        } else {
            for (const UcCoord& c : piece.coords)
                labels.push_back((c.tor ? "~" : "") + to_string(c.label));
        }
    }
    return labels;
}

std::string group_label(const std::vector<unsigned>& orders) {
    if (orders.empty()) return "0";
    // run-length over equal exponents, ascending
    std::ostringstream os;
    std::size_t i = 0;
    bool first = true;
    while (i < orders.size()) {
        std::size_t j = i;
        while (j < orders.size() && orders[j] == orders[i]) ++j;
        if (!first) os << " + ";
        first = false;
        std::size_t count = j - i;
        if (count > 1) os << count << "x";
        os << "Z/" << (1u << orders[i]);
        i = j;
    }
    return os.str();
}

}  // namespace

unsigned Cell::total_exp() const { return std::accumulate(orders.begin(), orders.end(), 0u); }

const Cell* Page::find(int p, int q) const {
    auto it = cells.find({p, q});
    return it == cells.end() ? nullptr : &it->second;
}

int Page::dim(int p, int q) const {
    const Cell* c = find(p, q);
    return c ? c->dim() : 0;
}

std::vector<unsigned> Page::orders(int p, int q) const {
    const Cell* c = find(p, q);
    return c ? c->orders : std::vector<unsigned>{};
}

bool DifferentialMatrix::zero() const {
    for (const auto& row : entries)
        for (std::uint32_t v : row)
            if (v != 0) return false;
    return true;
}

std::vector<std::vector<std::uint32_t>> DifferentialMatrix::block(int j_src, int j_dst) const {
    std::vector<std::size_t> rows_sel, cols_sel;
    for (std::size_t r = 0; r < dst_j.size(); ++r)
        if (dst_j[r] == j_dst) rows_sel.push_back(r);
    for (std::size_t c = 0; c < src_j.size(); ++c)
        if (src_j[c] == j_src) cols_sel.push_back(c);
    std::vector<std::vector<std::uint32_t>> out(rows_sel.size(),
                                                std::vector<std::uint32_t>(cols_sel.size(), 0));
    for (std::size_t r = 0; r < rows_sel.size(); ++r)
        for (std::size_t c = 0; c < cols_sel.size(); ++c)
            out[r][c] = entries[rows_sel[r]][cols_sel[c]];
    return out;
}

Page e1_page(const BaseModel& model, Theory theory, int n, int w, const Window& window) {
    if (n < 1) throw std::invalid_argument("coefficient exponent must be positive");
    if (window.p_lo > window.p_hi || window.q_lo > window.q_hi)
        throw std::invalid_argument("window bounds are reversed");
    if (model.dimension_only() && n >= 2)
        throw UnsupportedTier("mod-2^n cells over a number ring carry no element bases");

    Page page{theory, n, w, 1, model, window, {}};
    for (int p = window.p_lo - 1; p <= window.p_hi + 1; ++p) {
        for (int q = window.q_lo - 1; q <= window.q_hi + 1; ++q) {
            int qp = q - w;
            if (qp < 0) continue;
            Cell cell;
            cell.p = p;
            cell.q = q;
            cell.boundary = !window.contains(p, q);
            // piece index i = q + j - p; pieces vanish above the diagonal band
            for (int i = 0; i <= qp + 1; ++i) {
                int j = i + p - q;
                if (!has_summand(theory, n, q, j)) continue;
                int level = summand_level(theory, n, q, j);
                GradedPiece piece =
                    level == 1 ? basis(model, i, qp) : basis_mod2n(model, n, i, qp);
                if (piece.empty()) continue;
                auto mods = coord_moduli(piece);
                cell.orders.insert(cell.orders.end(), mods.begin(), mods.end());
                cell.pieces.push_back(CellPiece{SummandSpec{q, j, level}, std::move(piece)});
            }
            if (!cell.pieces.empty()) page.cells.emplace(std::pair{p, q}, std::move(cell));
        }
    }
    return page;
}

DifferentialMatrix d1_matrix(const Page& page, int p, int q) {
    if (page.r != 1) throw std::invalid_argument("d^1 acts on the first page");
    DifferentialMatrix m;
    m.p = p;
    m.q = q;
    m.w = page.w;

    const Cell* src = page.find(p, q);
    const Cell* dst = page.find(p - 1, q + 1);
    std::vector<std::size_t> col_off, row_off;
    std::size_t cols = 0, rows = 0;
    if (src) {
        m.src_moduli = src->orders;
        for (const CellPiece& cp : src->pieces) {
            col_off.push_back(cols);
            cols += static_cast<std::size_t>(cp.piece.dim);
            for (int k = 0; k < cp.piece.dim; ++k) m.src_j.push_back(cp.summand.j);
        }
    }
    if (dst) {
        m.dst_moduli = dst->orders;
        for (const CellPiece& cp : dst->pieces) {
            row_off.push_back(rows);
            rows += static_cast<std::size_t>(cp.piece.dim);
            for (int k = 0; k < cp.piece.dim; ++k) m.dst_j.push_back(cp.summand.j);
        }
    }
    m.entries.assign(rows, std::vector<std::uint32_t>(cols, 0));
    if (!src || !dst) return m;

    for (std::size_t si = 0; si < src->pieces.size(); ++si) {
        const CellPiece& sp = src->pieces[si];
        DifferentialSpec spec = d1_components(page.theory, page.n, q, sp.summand.j);
        for (int d = 0; d <= 4; ++d) {
            const OperationSymbol& sym = spec.entries[static_cast<std::size_t>(d)];
            if (sym.is_zero()) continue;
            int j2 = sp.summand.j + spec.target_offset(d);
            for (std::size_t ti = 0; ti < dst->pieces.size(); ++ti) {
                if (dst->pieces[ti].summand.j != j2) continue;
                auto blk = op_matrix(page.model, sym, sp.piece, dst->pieces[ti].piece);
                for (std::size_t r = 0; r < blk.size(); ++r)
                    for (std::size_t c = 0; c < blk[r].size(); ++c)
                        m.entries[row_off[ti] + r][col_off[si] + c] = blk[r][c];
                break;
            }
        }
    }
    return m;
}

Page e2_page(const Page& page) {
    if (page.r != 1) throw std::invalid_argument("the second page is computed from a first page");
    Page out{page.theory, page.n, page.w, 2, page.model, page.window, {}};
    for (const auto& [key, cell] : page.cells) {
        if (cell.boundary) continue;
        auto [p, q] = key;
        DifferentialMatrix dout = d1_matrix(page, p, q);
        DifferentialMatrix din = d1_matrix(page, p + 1, q - 1);
        std::size_t nb = cell.orders.size();
        IntMatrix2n din_m = lift_matrix(din.entries, nb, din.src_moduli.size());
        IntMatrix2n dout_m = lift_matrix(dout.entries, dout.dst_moduli.size(), nb);
        auto hom = homology_group_2n(din_m, dout_m, din.src_moduli, cell.orders, dout.dst_moduli);
        if (hom.empty()) continue;
        Cell c2;
        c2.p = p;
        c2.q = q;
        c2.orders = std::move(hom);
        out.cells.emplace(key, std::move(c2));
    }
    return out;
}

Page higher_pages(const Page& page) {
    if (page.r != 2) throw std::invalid_argument("later pages are computed from a second page");
    if (page.model.dimension_only())
        throw UnsupportedTier("later pages over a number ring come from transcribed charts");

    Page out{page.theory, page.n, page.w, kInfinityPage, page.model, page.window, page.cells};

    // mod 2 the pages collapse for degree reasons over every supported base
    if (page.n == 1) return out;

    if (page.theory == Theory::KGL) {
        // cells live in columns 0 <= 2q-p <= 4 while any longer differential
        // moves the column by at least 5, so nothing later can act
        for (const auto& [key, cell] : page.cells) {
            int col = 2 * key.second - key.first;
            if (col < 0 || col > 4)
                throw NoCollapseRule("second-page support leaves the five-column band");
        }
        return out;
    }

    BaseKind kind = page.model.kind();
    if (kind == BaseKind::QuadClosed || kind == BaseKind::FiniteField || kind == BaseKind::LocalQl)
        return out;  // the recorded exceptions to collapse are the real closed and 2-adic bases

    if (page.theory == Theory::KW && kind == BaseKind::RealClosed) {
        // one family of d^n differentials pairs the two residue columns; the
        // survivors sit at p - w = 0 mod 4 with q - w < n
        for (int p = page.window.p_lo; p <= page.window.p_hi; ++p) {
            for (int q = page.window.q_lo; q <= page.window.q_hi; ++q) {
                int qp = q - page.w;
                int res = mod4(p - page.w);
                bool expected = qp >= 0 && (res == 0 || res == 1);
                const Cell* c = page.find(p, q);
                bool matches = expected ? (c && c->orders == std::vector<unsigned>{1})
                                        : (c == nullptr);
                if (!matches)
                    throw NoCollapseRule(
                        "second page differs from the single-class pattern over a real closed "
                        "field");
            }
        }
        out.cells.clear();
        for (int p = page.window.p_lo; p <= page.window.p_hi; ++p) {
            for (int q = page.window.q_lo; q <= page.window.q_hi; ++q) {
                int qp = q - page.w;
                if (mod4(p - page.w) != 0 || qp < 0 || qp >= page.n) continue;
                Cell c;
                c.p = p;
                c.q = q;
                c.orders = {1};
                out.cells.emplace(std::pair{p, q}, std::move(c));
            }
        }
        return out;
    }

    if (kind == BaseKind::LocalQ2)
        throw NoCollapseRule("an unrecorded second differential acts over the 2-adic base");
    throw NoCollapseRule("no recorded rule for the later pages in this regime");
}

HatPiece hat_piece(const BaseModel& model, int n, int p, int q) {
    if (n < 1) throw std::invalid_argument("coefficient exponent must be positive");
    if (model.dimension_only())
        throw UnsupportedTier("stabilized pieces need explicit element bases");
    HatPiece h;
    h.p = p;
    h.q = q;
    if (p < 0 || q < 0) return h;

    // targets: the leading piece, then the level-1 pieces four columns apart
    std::vector<GradedPiece> tgt;
    tgt.push_back(n == 1 ? basis(model, p, q) : basis_mod2n(model, n, p, q));
    for (int k = 1; p - 4 * k >= 0; ++k) tgt.push_back(basis(model, p - 4 * k, q));

    std::vector<GradedPiece> src;
    if (q - 1 >= 0)
        for (int c = 0; p - 4 * (c + 1) >= 0; ++c) src.push_back(basis(model, p - 4 * (c + 1), q - 1));

    std::vector<unsigned> tgt_mod, src_mod;
    std::vector<std::size_t> row_off, col_off;
    for (const GradedPiece& g : tgt) {
        row_off.push_back(tgt_mod.size());
        auto mods = coord_moduli(g);
        tgt_mod.insert(tgt_mod.end(), mods.begin(), mods.end());
    }
    for (const GradedPiece& g : src) {
        col_off.push_back(src_mod.size());
        auto mods = coord_moduli(g);
        src_mod.insert(src_mod.end(), mods.begin(), mods.end());
    }

    const OperationSymbol tau = OperationSymbol::mul_tau();
    const OperationSymbol diag =
        n == 1 ? OperationSymbol::sq3sq1()
               : OperationSymbol::del_2_to_2n(n) * OperationSymbol::sq2sq1();

    std::vector<std::vector<std::uint32_t>> entries(tgt_mod.size(),
                                                    std::vector<std::uint32_t>(src_mod.size(), 0));
    for (std::size_t c = 0; c < src.size(); ++c) {
        if (src[c].empty()) continue;
        auto put = [&](std::size_t r, const OperationSymbol& sym) {
            if (r >= tgt.size() || tgt[r].empty()) return;
            auto blk = op_matrix(model, sym, src[c], tgt[r]);
            for (std::size_t i = 0; i < blk.size(); ++i)
                for (std::size_t k = 0; k < blk[i].size(); ++k)
                    entries[row_off[r] + i][col_off[c] + k] = blk[i][k];
        };
        put(c, c == 0 ? diag : OperationSymbol::sq3sq1());
        put(c + 1, tau);
    }

    IntMatrix2n m_in = lift_matrix(entries, tgt_mod.size(), src_mod.size());
    IntMatrix2n m_out(0, tgt_mod.size(), kLiftExp);
    h.orders = homology_group_2n(m_in, m_out, src_mod, tgt_mod, {});
    return h;
}

std::string page_to_json(const Page& page) {
    nlohmann::json meta;
    meta["schema"] = 1;
    meta["theory"] = to_string(page.theory);
    meta["mod"] = page.n;
    meta["base"] = page.model.name();
    meta["weight"] = page.w;
    if (page.r == kInfinityPage)
        meta["page"] = "infinity";
    else
        meta["page"] = page.r;

    nlohmann::json cells = nlohmann::json::array();
    for (const auto& [key, cell] : page.cells) {
        nlohmann::json c;
        c["p"] = key.first;
        c["q"] = key.second;
        c["dims"] = cell.orders;
        c["labels"] = coord_labels(cell);
        c["boundary"] = cell.boundary;
        cells.push_back(std::move(c));
    }
    nlohmann::json doc;
    doc["meta"] = std::move(meta);
    doc["cells"] = std::move(cells);
    return doc.dump(2) + "\n";
}

std::string page_to_csv(const Page& page) {
    std::ostringstream os;
    os << "p,q,dim\n";
    for (const auto& [key, cell] : page.cells) {
        if (cell.boundary) continue;
        os << key.first << ',' << key.second << ',' << cell.dim() << '\n';
    }
    return os.str();
}

std::string page_to_ascii(const Page& page) {
    std::ostringstream os;
    os << to_string(page.theory) << "/2^" << page.n << " over " << page.model.name() << ", weight "
       << page.w << ", page ";
    if (page.r == kInfinityPage)
        os << "infinity";
    else
        os << page.r;
    os << '\n';
    for (int q = page.window.q_hi; q >= page.window.q_lo; --q) {
        os << (q < 10 && q > -1 ? " " : "") << q << " |";
        for (int p = page.window.p_lo; p <= page.window.p_hi; ++p) {
            int d = page.dim(p, q);
            if (d == 0)
                os << "   .";
            else {
                std::string s = std::to_string(d);
                os << std::string(4 - s.size(), ' ') << s;
            }
        }
        os << '\n';
    }
    os << "    ";
    for (int p = page.window.p_lo; p <= page.window.p_hi; ++p) {
        std::string s = std::to_string(p);
        os << std::string(4 - s.size(), ' ') << s;
    }
    os << '\n';
    return os.str();
}

std::string page_to_tikz(const Page& page) {
    std::ostringstream os;
    os << "\\begin{tikzpicture}[font=\\tiny,scale=1]\n";
    os << "  \\draw[help lines] (" << page.window.p_lo - 0.5 << "," << page.window.q_lo << ") grid ("
       << page.window.p_hi + 0.5 << "," << page.window.q_hi + 0.5 << ");\n";
    for (int q = page.window.q_lo; q <= page.window.q_hi; ++q)
        os << "  \\node[label=left:$" << q << "$] at (" << page.window.p_lo - 0.5 << "," << q
           << ") {};\n";
    for (int p = page.window.p_lo; p <= page.window.p_hi; ++p)
        os << "  \\node[label=below:$" << p << "$] at (" << p << "," << page.window.q_lo - 0.2
           << ") {};\n";
    for (const auto& [key, cell] : page.cells) {
        if (cell.boundary || cell.orders.empty()) continue;
        os << "  \\draw[fill] (" << key.first << "," << key.second << ") circle (1pt);\n";
        os << "  \\node[above right=0pt] at (" << key.first << "," << key.second << ") {$"
           << group_label(cell.orders) << "$};\n";
    }
    os << "\\end{tikzpicture}\n";
    return os.str();
}

}  // namespace ssc
