#include "ssc/motivic.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cassert>
#include <mutex>
#include <shared_mutex>
#include <sstream>
#include <tuple>

namespace ssc {

namespace {

int require_l_mod4(int l) {
    if (l != 1 && l != 3) throw std::invalid_argument("residue mod 4 must be 1 or 3");
    return l;
}

void require_ring_params(const NumberRingParams& p) {
    if (p.r1 < 0 || p.r2 < 0 || p.t < 0) throw std::invalid_argument("negative number-ring parameter");
    if (p.s < 1) throw std::invalid_argument("at least one finite prime must be inverted");
    if (p.tplus < p.t) throw std::invalid_argument("narrow Picard rank cannot be below Picard rank");
}

}  // namespace

BaseModel BaseModel::real_closed() { return BaseModel(BaseKind::RealClosed, 0, {}); }
BaseModel BaseModel::quad_closed() { return BaseModel(BaseKind::QuadClosed, 0, {}); }
BaseModel BaseModel::finite_field(int l_mod4) {
    return BaseModel(BaseKind::FiniteField, require_l_mod4(l_mod4), {});
}
BaseModel BaseModel::local_q2() { return BaseModel(BaseKind::LocalQ2, 0, {}); }
BaseModel BaseModel::local_ql(int l_mod4) {
    return BaseModel(BaseKind::LocalQl, require_l_mod4(l_mod4), {});
}
BaseModel BaseModel::number_ring(const NumberRingParams& params) {
    require_ring_params(params);
    return BaseModel(BaseKind::NumberRing, 0, params);
}

BaseModel BaseModel::parse(const std::string& text) {
    if (text == "R") return real_closed();
    if (text == "Qbar") return quad_closed();
    if (text == "Q2") return local_q2();
    auto colon = text.find(':');
    if (colon != std::string::npos) {
        std::string head = text.substr(0, colon);
        std::string rest = text.substr(colon + 1);
        auto parse_int = [](const std::string& v) {
            std::size_t used = 0;
            int value = 0;
            try {
                value = std::stoi(v, &used);
            } catch (const std::exception&) {
                throw std::invalid_argument("malformed integer in model string: " + v);
            }
            if (used != v.size()) throw std::invalid_argument("malformed integer in model string: " + v);
            return value;
        };
        if (head == "Fl") return finite_field(parse_int(rest));
        if (head == "Ql") return local_ql(parse_int(rest));
        if (head == "numberring") {
            NumberRingParams p;
            std::map<std::string, int> seen;
            std::stringstream ss(rest);
            std::string item;
            while (std::getline(ss, item, ',')) {
                auto eq = item.find('=');
                if (eq == std::string::npos) throw std::invalid_argument("expected key=value: " + item);
                std::string key = item.substr(0, eq);
                if (seen.count(key)) throw std::invalid_argument("duplicate key: " + key);
                seen[key] = parse_int(item.substr(eq + 1));
            }
            for (const char* key : {"r1", "r2", "s", "t", "tplus"})
                if (!seen.count(key)) throw std::invalid_argument(std::string("missing key: ") + key);
            if (seen.size() != 5) throw std::invalid_argument("unexpected key in number-ring string");
            p.r1 = seen["r1"];
            p.r2 = seen["r2"];
            p.s = seen["s"];
            p.t = seen["t"];
            p.tplus = seen["tplus"];
            return number_ring(p);
        }
    }
    throw std::invalid_argument("unrecognized base model: " + text);
}

std::string BaseModel::name() const {
    switch (kind_) {
        case BaseKind::RealClosed: return "R";
        case BaseKind::QuadClosed: return "Qbar";
        case BaseKind::LocalQ2: return "Q2";
        case BaseKind::FiniteField: return "Fl:" + std::to_string(l_mod4_);
        case BaseKind::LocalQl: return "Ql:" + std::to_string(l_mod4_);
        case BaseKind::NumberRing: {
            std::ostringstream os;
            os << "numberring:r1=" << nr_.r1 << ",r2=" << nr_.r2 << ",s=" << nr_.s
               << ",t=" << nr_.t << ",tplus=" << nr_.tplus;
            return os.str();
        }
    }
    throw std::logic_error("unreachable");
}

int BaseModel::l_mod4() const {
    if (kind_ != BaseKind::FiniteField && kind_ != BaseKind::LocalQl)
        throw std::invalid_argument("model has no residue parameter");
    return l_mod4_;
}

const NumberRingParams& BaseModel::ring_params() const {
    if (kind_ != BaseKind::NumberRing) throw std::invalid_argument("model has no ring parameters");
    return nr_;
}

int BaseModel::vcd() const {
    switch (kind_) {
        case BaseKind::RealClosed: return 0;
        case BaseKind::QuadClosed: return 0;
        case BaseKind::FiniteField: return 1;
        case BaseKind::LocalQ2: return 2;
        case BaseKind::LocalQl: return 2;
        case BaseKind::NumberRing: return 2;
    }
    throw std::logic_error("unreachable");
}

bool BaseModel::has_rho() const {
    switch (kind_) {
        case BaseKind::RealClosed: return true;
        case BaseKind::LocalQ2: return true;
        case BaseKind::FiniteField: return l_mod4_ == 3;
        case BaseKind::LocalQl: return l_mod4_ == 3;
        default: return false;
    }
}

bool BaseModel::has_u() const {
    switch (kind_) {
        case BaseKind::LocalQ2: return true;
        case BaseKind::FiniteField: return l_mod4_ == 1;
        case BaseKind::LocalQl: return l_mod4_ == 1;
        default: return false;
    }
}

bool BaseModel::has_pi() const {
    return kind_ == BaseKind::LocalQ2 || kind_ == BaseKind::LocalQl;
}

bool operator==(const BaseModel& a, const BaseModel& b) {
    return a.kind_ == b.kind_ && a.l_mod4_ == b.l_mod4_ && a.nr_ == b.nr_;
}

std::string to_string(const Monomial& m) {
    std::ostringstream os;
    bool wrote = false;
    auto emit = [&](const char* g, int e) {
        if (e == 0) return;
        if (wrote) os << ' ';
        os << g;
        if (e != 1) os << '^' << e;
        wrote = true;
    };
    emit("rho", m.rho);
    emit("u", m.u);
    emit("pi", m.pi);
    emit("tau", m.tau);
    if (!wrote) os << '1';
    return os.str();
}

void xor_insert(F2Sum& sum, const Monomial& m) {
    auto it = std::lower_bound(sum.begin(), sum.end(), m);
    if (it != sum.end() && *it == m)
        sum.erase(it);
    else
        sum.insert(it, m);
}

F2Sum f2_add(const F2Sum& a, const F2Sum& b) {
    F2Sum out = a;
    for (const auto& m : b) xor_insert(out, m);
    return out;
}

std::string to_string(const F2Sum& sum) {
    if (sum.empty()) return "0";
    std::ostringstream os;
    for (std::size_t i = 0; i < sum.size(); ++i) {
        if (i) os << " + ";
        os << to_string(sum[i]);
    }
    return os.str();
}

std::optional<Monomial> normalize(const BaseModel& model, Monomial m) {
    if (model.dimension_only())
        throw std::invalid_argument("monomial arithmetic is undefined on a dimension-only model");
    if (m.tau < 0 || m.rho < 0 || m.u < 0 || m.pi < 0) return std::nullopt;
    if (m.rho > 0 && !model.has_rho()) return std::nullopt;
    if (m.u > 0 && !model.has_u()) return std::nullopt;
    if (m.pi > 0 && !model.has_pi()) return std::nullopt;
    switch (model.kind()) {
        case BaseKind::RealClosed:
        case BaseKind::QuadClosed:
            break;
        case BaseKind::FiniteField:
            // the single unit class squares to zero
            if (m.rho > 1 || m.u > 1) return std::nullopt;
            break;
        case BaseKind::LocalQ2: {
            // u pi = rho^2; rho u = rho pi = u^2 = pi^2 = 0, hence rho^3 = 0
            int k = std::min(m.u, m.pi);
            m.rho += 2 * k;
            m.u -= k;
            m.pi -= k;
            if (m.rho > 0 && (m.u > 0 || m.pi > 0)) return std::nullopt;
            if (m.u > 1 || m.pi > 1) return std::nullopt;
            if (m.rho > 2) return std::nullopt;
            break;
        }
        case BaseKind::LocalQl:
            if (model.l_mod4() == 1) {
                if (m.u > 1 || m.pi > 1) return std::nullopt;
            } else {
                // pi rho = pi^2 and rho^2 = 0, hence pi^3 = pi^2 rho = pi rho^2 = 0
                if (m.pi > 0) {
                    m.pi += m.rho;
                    m.rho = 0;
                }
                if (m.rho > 1) return std::nullopt;
                if (m.pi > 2) return std::nullopt;
            }
            break;
        case BaseKind::NumberRing:
            throw std::logic_error("unreachable");
    }
    m.normal = true;
    return m;
}

F2Sum multiply(const BaseModel& model, const Monomial& a, const Monomial& b) {
    Monomial raw{a.tau + b.tau, a.rho + b.rho, a.u + b.u, a.pi + b.pi, false};
    auto nm = normalize(model, raw);
    if (!nm) return {};
    return {*nm};
}

F2Sum multiply(const BaseModel& model, const F2Sum& a, const F2Sum& b) {
    F2Sum out;
    for (const auto& x : a)
        for (const auto& y : b)
            for (const auto& m : multiply(model, x, y)) xor_insert(out, m);
    return out;
}

// ---------------------------------------------------------------------------
// operation symbols

namespace {

bool is_level_map(OpTag t) {
    return t == OpTag::Pr || t == OpTag::Inc || t == OpTag::Del2to2n || t == OpTag::Del2nTo2;
}

std::pair<int, int> atom_bidegree(const OpAtom& a) {
    switch (a.tag) {
        case OpTag::Zero:
        case OpTag::Id:
        case OpTag::Pr:
        case OpTag::Inc: return {0, 0};
        case OpTag::Sq1: return {1, 0};
        case OpTag::Sq2: return {2, 1};
        case OpTag::Sq3: return {3, 1};
        case OpTag::Sq2Sq1: return {3, 1};
        case OpTag::Sq3Sq1: return {4, 1};
        case OpTag::Mul: return {a.rho_pow, a.rho_pow + a.tau_pow};
        case OpTag::Del2to2n:
        case OpTag::Del2nTo2: return {1, 0};
    }
    throw std::logic_error("unreachable");
}

// source/target coefficient levels, 0 = any
std::pair<int, int> atom_levels(const OpAtom& a) {
    switch (a.tag) {
        case OpTag::Zero:
        case OpTag::Id: return {0, 0};
        case OpTag::Sq1:
        case OpTag::Sq2:
        case OpTag::Sq3:
        case OpTag::Sq2Sq1:
        case OpTag::Sq3Sq1:
        case OpTag::Mul: return {1, 1};
        case OpTag::Pr: return {a.n, 1};
        case OpTag::Inc: return {1, a.n};
        case OpTag::Del2to2n: return {1, a.n};
        case OpTag::Del2nTo2: return {a.n, 1};
    }
    throw std::logic_error("unreachable");
}

std::pair<int, int> term_bidegree(const OperationSymbol::Term& t) {
    int dp = 0, dq = 0;
    for (const auto& a : t) {
        auto [p, q] = atom_bidegree(a);
        dp += p;
        dq += q;
    }
    return {dp, dq};
}

std::pair<int, int> term_levels(const OperationSymbol::Term& t) {
    int src = 0, cur = 0;
    for (const auto& a : t) {
        auto [as, at] = atom_levels(a);
        if (as != 0) {
            if (cur != 0 && cur != as)
                throw std::invalid_argument("composition with mismatched coefficient levels");
            if (cur == 0 && src == 0) src = as;
            cur = as;
        }
        if (at != 0) cur = at;
    }
    return {src, cur};
}

std::string atom_to_string(const OpAtom& a) {
    switch (a.tag) {
        case OpTag::Zero: return "0";
        case OpTag::Id: return "id";
        case OpTag::Sq1: return "Sq1";
        case OpTag::Sq2: return "Sq2";
        case OpTag::Sq3: return "Sq3";
        case OpTag::Sq2Sq1: return "Sq2Sq1";
        case OpTag::Sq3Sq1: return "Sq3Sq1";
        case OpTag::Mul: {
            std::ostringstream os;
            bool wrote = false;
            if (a.rho_pow) {
                os << "rho";
                if (a.rho_pow != 1) os << '^' << a.rho_pow;
                wrote = true;
            }
            if (a.tau_pow) {
                if (wrote) os << ' ';
                os << "tau";
                if (a.tau_pow != 1) os << '^' << a.tau_pow;
                wrote = true;
            }
            if (!wrote) os << "id";
            return os.str();
        }
        case OpTag::Pr: return "pr(" + std::to_string(a.n) + ")";
        case OpTag::Inc: return "inc(" + std::to_string(a.n) + ")";
        case OpTag::Del2to2n: return "del2to2n(" + std::to_string(a.n) + ")";
        case OpTag::Del2nTo2: return "del2nto2(" + std::to_string(a.n) + ")";
    }
    throw std::logic_error("unreachable");
}

int require_level(int n) {
    if (n < 1 || n > 30) throw std::invalid_argument("coefficient level out of range");
    return n;
}

}  // namespace

OperationSymbol::OperationSymbol(std::vector<Term> terms) : terms_(std::move(terms)) {
    canon();
    validate();
}

void OperationSymbol::canon() {
    for (auto& t : terms_) std::erase_if(t, [](const OpAtom& a) { return a.tag == OpTag::Id; });
    std::erase_if(terms_, [](const Term& t) {
        return std::any_of(t.begin(), t.end(), [](const OpAtom& a) { return a.tag == OpTag::Zero; });
    });
    std::sort(terms_.begin(), terms_.end());
    // xor: terms appearing an even number of times cancel
    std::vector<Term> kept;
    for (std::size_t i = 0; i < terms_.size();) {
        std::size_t j = i;
        while (j < terms_.size() && terms_[j] == terms_[i]) ++j;
        if ((j - i) % 2) kept.push_back(terms_[i]);
        i = j;
    }
    terms_ = std::move(kept);
}

void OperationSymbol::validate() const {
    if (terms_.empty()) return;
    auto bid = term_bidegree(terms_.front());
    auto lev = term_levels(terms_.front());
    for (const auto& t : terms_) {
        if (term_bidegree(t) != bid)
            throw std::invalid_argument("formal sum with mismatched bidegrees");
        auto l = term_levels(t);
        auto merge = [](int a, int b) {
            if (a == 0) return b;
            if (b != 0 && a != b) throw std::invalid_argument("formal sum with mismatched levels");
            return a;
        };
        lev.first = merge(lev.first, l.first);
        lev.second = merge(lev.second, l.second);
    }
}

OperationSymbol OperationSymbol::zero() { return OperationSymbol(std::vector<Term>{}); }
OperationSymbol OperationSymbol::id() { return OperationSymbol({Term{}}); }
OperationSymbol OperationSymbol::sq1() { return OperationSymbol({Term{OpAtom{OpTag::Sq1}}}); }
OperationSymbol OperationSymbol::sq2() { return OperationSymbol({Term{OpAtom{OpTag::Sq2}}}); }
OperationSymbol OperationSymbol::sq3() { return OperationSymbol({Term{OpAtom{OpTag::Sq3}}}); }
OperationSymbol OperationSymbol::sq2sq1() { return OperationSymbol({Term{OpAtom{OpTag::Sq2Sq1}}}); }
OperationSymbol OperationSymbol::sq3sq1() { return OperationSymbol({Term{OpAtom{OpTag::Sq3Sq1}}}); }
OperationSymbol OperationSymbol::mul_tau() { return mul(0, 1); }
OperationSymbol OperationSymbol::mul_rho() { return mul(1, 0); }
OperationSymbol OperationSymbol::mul(int rho_pow, int tau_pow) {
    if (rho_pow < 0) throw std::invalid_argument("negative rho power");
    return OperationSymbol({Term{OpAtom{OpTag::Mul, rho_pow, tau_pow, 0}}});
}
OperationSymbol OperationSymbol::pr(int n) {
    return OperationSymbol({Term{OpAtom{OpTag::Pr, 0, 0, require_level(n)}}});
}
OperationSymbol OperationSymbol::inc(int n) {
    return OperationSymbol({Term{OpAtom{OpTag::Inc, 0, 0, require_level(n)}}});
}
OperationSymbol OperationSymbol::del_2_to_2n(int n) {
    return OperationSymbol({Term{OpAtom{OpTag::Del2to2n, 0, 0, require_level(n)}}});
}
OperationSymbol OperationSymbol::del_2n_to_2(int n) {
    return OperationSymbol({Term{OpAtom{OpTag::Del2nTo2, 0, 0, require_level(n)}}});
}

OperationSymbol operator*(const OperationSymbol& f, const OperationSymbol& g) {
    std::vector<OperationSymbol::Term> out;
    for (const auto& tg : g.terms_)
        for (const auto& tf : f.terms_) {
            OperationSymbol::Term t = tg;
            t.insert(t.end(), tf.begin(), tf.end());
            out.push_back(std::move(t));
        }
    return OperationSymbol(std::move(out));
}

OperationSymbol operator+(const OperationSymbol& f, const OperationSymbol& g) {
    std::vector<OperationSymbol::Term> out = f.terms_;
    out.insert(out.end(), g.terms_.begin(), g.terms_.end());
    return OperationSymbol(std::move(out));
}

std::pair<int, int> OperationSymbol::bidegree() const {
    if (terms_.empty()) return {0, 0};
    return term_bidegree(terms_.front());
}

int OperationSymbol::source_level() const {
    int lvl = 0;
    for (const auto& t : terms_) {
        int l = term_levels(t).first;
        if (l != 0) lvl = l;
    }
    return lvl;
}

int OperationSymbol::target_level() const {
    int lvl = 0;
    for (const auto& t : terms_) {
        int l = term_levels(t).second;
        if (l != 0) lvl = l;
    }
    return lvl;
}

std::string OperationSymbol::to_string() const {
    if (terms_.empty()) return "0";
    std::ostringstream os;
    for (std::size_t i = 0; i < terms_.size(); ++i) {
        if (i) os << " + ";
        const Term& t = terms_[i];
        if (t.empty()) {
            os << "id";
            continue;
        }
        // print in function-composition order: last applied first
        for (std::size_t j = t.size(); j-- > 0;) {
            os << atom_to_string(t[j]);
            if (j) os << ' ';
        }
    }
    return os.str();
}

// ---------------------------------------------------------------------------
// Steenrod action on tau-powers

namespace {

struct TauRule {
    int rho_pow;
    int tau_delta;
};

// action on tau^k keyed by k mod 4; a monomial tau^k s with s diagonal picks
// up the listed rho-power and tau-shift, the diagonal factor passes through
std::optional<TauRule> tau_power_rule(OpTag tag, int k_mod4) {
    switch (tag) {
        case OpTag::Sq1:
            if (k_mod4 == 1 || k_mod4 == 3) return TauRule{1, -1};
            return std::nullopt;
        case OpTag::Sq2:
            if (k_mod4 == 2 || k_mod4 == 3) return TauRule{2, -1};
            return std::nullopt;
        case OpTag::Sq3:
            if (k_mod4 == 2) return TauRule{3, -2};
            return std::nullopt;
        case OpTag::Sq2Sq1:
            if (k_mod4 == 3) return TauRule{3, -2};
            return std::nullopt;
        case OpTag::Sq3Sq1:
            if (k_mod4 == 3) return TauRule{4, -3};
            return std::nullopt;
        default:
            throw std::logic_error("not a tau-power operation");
    }
}

F2Sum apply_mono_atom(const BaseModel& model, const OpAtom& atom, const Monomial& m) {
    switch (atom.tag) {
        case OpTag::Zero: return {};
        case OpTag::Id: {
            auto nm = normalize(model, m);
            if (!nm) return {};
            return {*nm};
        }
        case OpTag::Mul: {
            Monomial r = m;
            r.rho += atom.rho_pow;
            r.tau += atom.tau_pow;
            r.normal = false;
            auto nm = normalize(model, r);
            if (!nm) return {};
            return {*nm};
        }
        case OpTag::Sq1:
        case OpTag::Sq2:
        case OpTag::Sq3:
        case OpTag::Sq2Sq1:
        case OpTag::Sq3Sq1: {
            auto rule = tau_power_rule(atom.tag, ((m.tau % 4) + 4) % 4);
            if (!rule) return {};
            Monomial r = m;
            r.rho += rule->rho_pow;
            r.tau += rule->tau_delta;
            r.normal = false;
            auto nm = normalize(model, r);
            if (!nm) return {};
            return {*nm};
        }
        default:
            throw std::invalid_argument("coefficient-level map applied to a single monomial");
    }
}

}  // namespace

F2Sum steenrod_apply(const BaseModel& model, const OperationSymbol& op, const Monomial& m) {
    if (model.dimension_only()) {
        for (const auto& t : op.terms())
            for (const auto& a : t)
                if (a.tag == OpTag::Mul && a.tau_pow < 0)
                    throw NegativeTauOnNumberRing("tau-division against a dimension-only model");
        throw std::invalid_argument("steenrod_apply needs an explicit model");
    }
    F2Sum acc;
    for (const auto& term : op.terms()) {
        F2Sum cur;
        if (auto nm = normalize(model, m)) cur.push_back(*nm);
        for (const auto& atom : term) {
            F2Sum next;
            for (const auto& mono : cur)
                for (const auto& r : apply_mono_atom(model, atom, mono)) xor_insert(next, r);
            cur = std::move(next);
            if (cur.empty()) break;
        }
        acc = f2_add(acc, cur);
    }
    return acc;
}

F2Sum steenrod_apply(const BaseModel& model, const OperationSymbol& op, const F2Sum& sum) {
    F2Sum acc;
    for (const auto& m : sum) acc = f2_add(acc, steenrod_apply(model, op, m));
    return acc;
}

// ---------------------------------------------------------------------------
// integral data and graded pieces

namespace {

unsigned v2u(unsigned x) { return static_cast<unsigned>(std::countr_zero(x)); }

// exponent of the 2-part of l^b - 1 for the residue representatives l = 5, 3
unsigned torsion_exp_l(int l_mod4, int b) {
    assert(b >= 1);
    if (b % 2) return l_mod4 == 1 ? 2u : 1u;
    return 2u + v2u(static_cast<unsigned>(b));
}

// exponent of the 2-adic cyclotomic order at twist b over the 2-adic rationals
unsigned torsion_exp_q2(int b) {
    assert(b >= 1);
    if (b % 2) return 1u;
    return 2u + v2u(static_cast<unsigned>(b));
}

Monomial mono(int tau, int rho, int u, int pi) { return Monomial{tau, rho, u, pi, true}; }

}  // namespace

std::vector<CyclicSummand> integral_summands(const BaseModel& model, int a, int b) {
    std::vector<CyclicSummand> out;
    auto add = [&](unsigned exp, Monomial red, Monomial tor = Monomial{}) {
        out.push_back(CyclicSummand{exp, red, tor});
    };
    switch (model.kind()) {
        case BaseKind::RealClosed:
            if (a == 0 && b >= 0 && b % 2 == 0) add(kInfiniteExp, mono(b, 0, 0, 0));
            if (a >= 1 && a <= b && (a % 2) == (b % 2))
                add(1, mono(b - a, a, 0, 0), mono(b - a + 1, a - 1, 0, 0));
            break;
        case BaseKind::QuadClosed:
            if (a == 0 && b >= 0) add(kInfiniteExp, mono(b, 0, 0, 0));
            break;
        case BaseKind::FiniteField: {
            if (a == 0 && b == 0) add(kInfiniteExp, mono(0, 0, 0, 0));
            if (a == 1 && b >= 1) {
                Monomial g = model.l_mod4() == 1 ? mono(b - 1, 0, 1, 0) : mono(b - 1, 1, 0, 0);
                add(torsion_exp_l(model.l_mod4(), b), g, mono(b, 0, 0, 0));
            }
            break;
        }
        case BaseKind::LocalQl: {
            const bool split = model.l_mod4() == 1;
            if (a == 0 && b == 0) add(kInfiniteExp, mono(0, 0, 0, 0));
            if (a == 1 && b == 1) {
                add(kInfiniteExp, mono(0, 0, 0, 1));
                add(torsion_exp_l(model.l_mod4(), 1),
                    split ? mono(0, 0, 1, 0) : mono(0, 1, 0, 0), mono(1, 0, 0, 0));
            }
            if (a == 1 && b >= 2)
                add(torsion_exp_l(model.l_mod4(), b),
                    split ? mono(b - 1, 0, 1, 0) : mono(b - 1, 1, 0, 0), mono(b, 0, 0, 0));
            if (a == 2 && b >= 2)
                add(torsion_exp_l(model.l_mod4(), b - 1),
                    split ? mono(b - 2, 0, 1, 1) : mono(b - 2, 0, 0, 2), mono(b - 1, 0, 0, 1));
            break;
        }
        case BaseKind::LocalQ2:
            if (a == 0 && b == 0) add(kInfiniteExp, mono(0, 0, 0, 0));
            if (a == 1 && b == 1) {
                add(kInfiniteExp, mono(0, 0, 0, 1));
                add(kInfiniteExp, mono(0, 0, 1, 0));
                add(1, mono(0, 1, 0, 0), mono(1, 0, 0, 0));
            }
            if (a == 1 && b >= 2) {
                add(kInfiniteExp, mono(b - 1, 0, 0, 1));
                add(torsion_exp_q2(b),
                    b % 2 ? mono(b - 1, 1, 0, 0) : mono(b - 1, 0, 1, 0), mono(b, 0, 0, 0));
            }
            if (a == 2 && b >= 2)
                add(torsion_exp_q2(b - 1), mono(b - 2, 2, 0, 0),
                    b % 2 ? mono(b - 1, 0, 1, 0) : mono(b - 1, 1, 0, 0));
            break;
        case BaseKind::NumberRing:
            throw std::invalid_argument("integral summands are stored only for explicit models");
    }
    return out;
}

namespace {

// memo shared by basis and basis_mod2n; pieces are immutable once stored
struct PieceMemo {
    std::shared_mutex mutex;
    std::map<std::tuple<std::string, int, int, int>, GradedPiece> pieces;
};

PieceMemo& piece_memo() {
    static PieceMemo memo;
    return memo;
}

GradedPiece compute_basis(const BaseModel& model, int p, int q) {
    GradedPiece g;
    g.p = p;
    g.q = q;
    g.level = 1;
    if (model.kind() == BaseKind::NumberRing) {
        const auto& P = model.ring_params();
        g.dimension_only = true;
        int d = 0;
        if (p == 0 && q >= 0)
            d = 1;
        else if (p == 1 && q >= 1)
            d = P.r1 + P.r2 + P.s + P.t;
        else if (p == 2 && q == 1)
            d = P.t;
        else if (p == 2 && q >= 2)
            d = P.r1 + P.s + P.t - 1;
        else if (p >= 3 && p <= q)
            d = P.r1;
        g.dim = d;
        if (p == 1 && q >= 1) {
            g.named_dims["ker_rho2"] = P.r2 + P.s + P.tplus;
            g.named_dims["ker_rho3"] = P.r2 + P.s + P.tplus;
            g.named_dims["ker_rho1_hi"] = P.r2 + P.s + P.tplus;
        } else if (p == 2 && q == 1) {
            g.named_dims["ker_rho1"] = P.t;
        } else if (p == 2 && q >= 2) {
            g.named_dims["ker_rho1"] = P.s + P.t - 1;
            g.named_dims["ker_rho2"] = P.s + P.t - 1;
            g.named_dims["ker_rho3"] = P.s + P.t - 1;
        } else if (p == 3 && q >= 3) {
            g.named_dims["coker_rho2"] = P.tplus - P.t;
            g.named_dims["coker_rho3"] = std::max(P.r1 - 1, 0);
        } else if (p == 4 && q >= 4) {
            g.named_dims["coker_rho3"] = P.tplus - P.t;
        }
        return g;
    }
    if (p < 0 || p > q) return g;
    for (int a = 0; a <= p; ++a)
        for (int bu = 0; a + bu <= p; ++bu) {
            int c = p - a - bu;
            Monomial m{q - p, a, bu, c, false};
            auto nm = normalize(model, m);
            if (nm && *nm == m) g.basis.push_back(*nm);
        }
    std::sort(g.basis.begin(), g.basis.end());
    g.dim = static_cast<int>(g.basis.size());
    return g;
}

GradedPiece compute_basis_mod2n(const BaseModel& model, int n, int p, int q) {
    GradedPiece g;
    g.p = p;
    g.q = q;
    g.level = n;
    for (const auto& s : integral_summands(model, p, q)) {
        unsigned order = std::min<unsigned>(static_cast<unsigned>(n), s.exp);
        g.coords.push_back(UcCoord{false, order, s.red, s.red});
    }
    for (const auto& s : integral_summands(model, p + 1, q)) {
        if (s.exp == kInfiniteExp) continue;
        unsigned order = std::min<unsigned>(static_cast<unsigned>(n), s.exp);
        g.coords.push_back(UcCoord{true, order, s.tor, s.red});
    }
    g.dim = static_cast<int>(g.coords.size());
    if (n == 1) {
        // a level-one piece is the monomial piece; matrices index its basis
        g.basis = compute_basis(model, p, q).basis;
        assert(static_cast<int>(g.basis.size()) == g.dim);
    }
    return g;
}

}  // namespace

GradedPiece basis(const BaseModel& model, int p, int q) {
    auto key = std::tuple(model.name(), 1, p, q);
    auto& memo = piece_memo();
    {
        std::shared_lock lock(memo.mutex);
        auto it = memo.pieces.find(key);
        if (it != memo.pieces.end()) return it->second;
    }
    GradedPiece g = compute_basis(model, p, q);
    std::unique_lock lock(memo.mutex);
    return memo.pieces.emplace(key, std::move(g)).first->second;
}

GradedPiece basis_mod2n(const BaseModel& model, int n, int p, int q) {
    require_level(n);
    if (model.dimension_only())
        throw std::invalid_argument("mod-2^n pieces are not constructed over dimension-only models");
    auto key = std::tuple(model.name(), -n, p, q);
    auto& memo = piece_memo();
    {
        std::shared_lock lock(memo.mutex);
        auto it = memo.pieces.find(key);
        if (it != memo.pieces.end()) return it->second;
    }
    GradedPiece g = compute_basis_mod2n(model, n, p, q);
    std::unique_lock lock(memo.mutex);
    return memo.pieces.emplace(key, std::move(g)).first->second;
}

std::vector<unsigned> coord_moduli(const GradedPiece& piece) {
    std::vector<unsigned> out;
    if (piece.level == 1) {
        out.assign(static_cast<std::size_t>(piece.dim), 1u);
    } else {
        out.reserve(piece.coords.size());
        for (const auto& c : piece.coords) out.push_back(c.order_exp);
    }
    return out;
}

// ---------------------------------------------------------------------------
// coefficient-map classification over the real closed model

std::string to_string(MapClass c) {
    switch (c) {
        case MapClass::Iso: return "iso";
        case MapClass::Trivial: return "trivial";
        case MapClass::SurjectiveWithKernel: return "surjective-with-kernel";
        case MapClass::InjectiveWithCokernel: return "injective-with-cokernel";
    }
    throw std::logic_error("unreachable");
}

MapClass coeff_map(const OperationSymbol& map, const BaseModel& model, int n, int p, int q) {
    if (model.kind() != BaseKind::RealClosed)
        throw std::invalid_argument("coefficient maps are classified over the real closed model");
    require_level(n);
    if (map.terms().size() != 1 || map.terms().front().size() != 1)
        throw std::invalid_argument("expected a single coefficient-level map");
    const OpAtom& atom = map.terms().front().front();
    if (!is_level_map(atom.tag)) throw std::invalid_argument("expected pr/inc/Bockstein");
    if (atom.n != n) throw std::invalid_argument("coefficient level disagrees with the symbol");
    const bool odd = ((p - q) % 2 + 2) % 2 == 1;
    const bool del = atom.tag == OpTag::Del2to2n || atom.tag == OpTag::Del2nTo2;
    if (n == 1) {
        // pr and inc are the identity; both Bocksteins reduce to Sq1
        if (!del) return MapClass::Iso;
        return odd ? MapClass::Iso : MapClass::Trivial;
    }
    if (odd) return atom.tag == OpTag::Pr ? MapClass::Trivial : MapClass::Iso;
    if (p > 0) return atom.tag == OpTag::Pr ? MapClass::Iso : MapClass::Trivial;
    if (del) return MapClass::Trivial;
    return atom.tag == OpTag::Inc ? MapClass::InjectiveWithCokernel : MapClass::SurjectiveWithKernel;
}

// ---------------------------------------------------------------------------
// rho-multiplication data over number rings

namespace {

const NumberRingParams& require_number_ring(const BaseModel& model) {
    if (model.kind() != BaseKind::NumberRing)
        throw std::invalid_argument("rho-multiplication ranks are stored for number rings only");
    return model.ring_params();
}

}  // namespace

int rho_kernel_dim(const BaseModel& model, int i, int p, int q) {
    const auto& P = require_number_ring(model);
    if (i < 1 || q < 1) throw std::invalid_argument("rho power and weight must be positive");
    if (p == 1 && (i == 2 || i == 3)) return P.r2 + P.s + P.tplus;
    if (p == 2 && q == 1) return P.t;  // rho annihilates the exceptional piece
    if (p == 2 && q >= 2 && i <= 3) return P.s + P.t - 1;
    throw UnknownKernel("kernel of rho^" + std::to_string(i) + " at (" + std::to_string(p) + "," +
                        std::to_string(q) + ") is not determined");
}

int rho_cokernel_dim(const BaseModel& model, int i, int p, int q) {
    const auto& P = require_number_ring(model);
    if (i < 1 || q < 1) throw std::invalid_argument("rho power and weight must be positive");
    if (p == 3 && i == 3 && q >= 3) return std::max(P.r1 - 1, 0);
    if (p == 3 && i == 2 && q >= 3) return P.tplus - P.t;
    if (p == 4 && i == 3 && q >= 4) return P.tplus - P.t;
    throw UnknownKernel("cokernel of rho^" + std::to_string(i) + " at (" + std::to_string(p) + "," +
                        std::to_string(q) + ") is not determined");
}

DimInterval rho_kernel_interval(const BaseModel& model, int i, int p, int q) {
    const auto& P = require_number_ring(model);
    if (i == 1 && p == 1 && q >= 1) return DimInterval{0, P.r2 + P.s + P.tplus};
    int d = rho_kernel_dim(model, i, p, q);
    return DimInterval{d, d};
}

// ---------------------------------------------------------------------------
// matrices of operation symbols

namespace {

// a class tracked through a chain: either a mod-2 monomial or a coordinate of
// a mod-2^n group, identified by its integral summand's red label and home
struct EvalKey {
    int kind = 0;  // 0 monomial, 1 free coordinate, 2 torsion coordinate
    Monomial m;
    int a = 0, b = 0;  // summand home bidegree, kinds 1 and 2
    friend bool operator<(const EvalKey& x, const EvalKey& y) {
        return std::tuple(x.kind, x.m, x.a, x.b) < std::tuple(y.kind, y.m, y.a, y.b);
    }
};

using EvalState = std::map<EvalKey, std::uint64_t>;

constexpr std::uint64_t kCoeffMask = 0xFFFFFFFFull;

const CyclicSummand* find_by_red(const std::vector<CyclicSummand>& ss, const Monomial& m) {
    for (const auto& s : ss)
        if (s.red == m) return &s;
    return nullptr;
}

const CyclicSummand* find_by_tor(const std::vector<CyclicSummand>& ss, const Monomial& m) {
    for (const auto& s : ss)
        if (s.exp != kInfiniteExp && s.tor == m) return &s;
    return nullptr;
}

void accumulate(EvalState& state, const EvalKey& key, std::uint64_t coeff) {
    coeff &= kCoeffMask;
    if (!coeff) return;
    auto [it, inserted] = state.emplace(key, coeff);
    if (!inserted) {
        it->second = (it->second + coeff) & kCoeffMask;
        if (!it->second) state.erase(it);
    }
}

EvalState step_atom(const BaseModel& model, const OpAtom& atom, const EvalKey& key, std::uint64_t coeff) {
    EvalState out;
    if (key.kind == 0) {
        const Monomial& m = key.m;
        switch (atom.tag) {
            case OpTag::Inc: {
                if (atom.n == 1) {  // identity at level one
                    accumulate(out, key, coeff);
                    return out;
                }
                int a = m.deg_p(), b = m.deg_q();
                const auto here = integral_summands(model, a, b);
                const auto above = integral_summands(model, a + 1, b);
                if (const auto* s = find_by_red(here, m)) {
                    accumulate(out, EvalKey{1, s->red, a, b}, coeff << (atom.n - 1));
                } else if (const auto* s2 = find_by_tor(above, m)) {
                    unsigned ord = std::min<unsigned>(static_cast<unsigned>(atom.n), s2->exp);
                    accumulate(out, EvalKey{2, s2->red, a + 1, b}, coeff << (ord - 1));
                }
                return out;
            }
            case OpTag::Del2to2n:
            case OpTag::Del2nTo2: {
                if (atom.tag == OpTag::Del2nTo2 && atom.n >= 2)
                    throw std::logic_error("level-n map reached a mod-2 class");
                int a = m.deg_p(), b = m.deg_q();
                const auto above = integral_summands(model, a + 1, b);
                if (const auto* s = find_by_tor(above, m)) {
                    if (s->exp <= static_cast<unsigned>(atom.n)) {
                        if (atom.n == 1)  // both connecting maps collapse to Sq1
                            accumulate(out, EvalKey{0, s->red, 0, 0}, coeff);
                        else
                            accumulate(out, EvalKey{1, s->red, a + 1, b}, coeff << (s->exp - 1));
                    }
                }
                return out;
            }
            case OpTag::Pr:
                if (atom.n == 1) {  // identity at level one
                    accumulate(out, key, coeff);
                    return out;
                }
                throw std::logic_error("level-n map reached a mod-2 class");
            default: {
                for (const auto& r : apply_mono_atom(model, atom, m))
                    accumulate(out, EvalKey{0, r, 0, 0}, coeff);
                return out;
            }
        }
    }
    // coordinate of a mod-2^n group
    const auto summands = integral_summands(model, key.a, key.b);
    const auto* s = find_by_red(summands, key.m);
    if (!s) throw std::logic_error("stale summand reference");
    switch (atom.tag) {
        case OpTag::Pr:
            if (key.kind == 1) {
                accumulate(out, EvalKey{0, s->red, 0, 0}, coeff);
            } else if (s->exp >= static_cast<unsigned>(atom.n)) {
                accumulate(out, EvalKey{0, s->tor, 0, 0}, coeff);
            }
            return out;
        case OpTag::Del2nTo2:
            if (key.kind == 2 && s->exp <= static_cast<unsigned>(atom.n))
                accumulate(out, EvalKey{0, s->red, 0, 0}, coeff);
            return out;
        default:
            throw std::logic_error("mod-2 operation reached a mod-2^n coordinate");
    }
}

}  // namespace

std::vector<std::vector<std::uint32_t>> op_matrix(const BaseModel& model, const OperationSymbol& op,
                                                  const GradedPiece& src, const GradedPiece& dst) {
    if (model.dimension_only()) throw std::invalid_argument("op_matrix needs an explicit model");
    if (src.dimension_only || dst.dimension_only)
        throw std::invalid_argument("op_matrix needs explicit pieces");
    if (!op.is_zero()) {
        auto [dp, dq] = op.bidegree();
        if (dst.p != src.p + dp || dst.q != src.q + dq)
            throw std::invalid_argument("target piece disagrees with the symbol's bidegree");
        int sl = op.source_level(), tl = op.target_level();
        if (sl != 0 && sl != src.level) throw std::invalid_argument("source level mismatch");
        if (tl != 0 && tl != dst.level) throw std::invalid_argument("target level mismatch");
        if (sl == 0 && tl == 0 && src.level != dst.level)
            throw std::invalid_argument("level-polymorphic symbol between distinct levels");
    }
    const std::size_t rows = static_cast<std::size_t>(dst.dim);
    const std::size_t cols = static_cast<std::size_t>(src.dim);
    std::vector<std::vector<std::uint64_t>> acc(rows, std::vector<std::uint64_t>(cols, 0));

    auto source_key = [&](std::size_t j) {
        if (src.level == 1) return EvalKey{0, src.basis[j], 0, 0};
        const UcCoord& c = src.coords[j];
        if (c.tor) return EvalKey{2, c.red, src.p + 1, src.q};
        return EvalKey{1, c.red, src.p, src.q};
    };

    auto project = [&](const EvalKey& key, std::uint64_t coeff, std::size_t col) {
        if (dst.level == 1) {
            if (key.kind != 0) throw std::logic_error("mod-2^n coordinate left in a mod-2 target");
            coeff &= 1;
            if (!coeff) return;
            auto it = std::lower_bound(dst.basis.begin(), dst.basis.end(), key.m);
            if (it == dst.basis.end() || !(*it == key.m))
                throw std::logic_error("image class outside the target piece");
            acc[static_cast<std::size_t>(it - dst.basis.begin())][col] += coeff;
            return;
        }
        if (key.kind == 0) throw std::logic_error("mod-2 class left in a mod-2^n target");
        for (std::size_t r = 0; r < dst.coords.size(); ++r) {
            const UcCoord& c = dst.coords[r];
            bool home_ok = c.tor ? (key.a == dst.p + 1 && key.b == dst.q)
                                 : (key.a == dst.p && key.b == dst.q);
            if (home_ok && c.tor == (key.kind == 2) && c.red == key.m) {
                acc[r][col] += coeff;
                return;
            }
        }
        if (coeff & kCoeffMask) throw std::logic_error("image coordinate outside the target piece");
    };

    for (std::size_t j = 0; j < cols; ++j) {
        for (const auto& term : op.terms()) {
            EvalState state;
            accumulate(state, source_key(j), 1);
            for (const auto& atom : term) {
                EvalState next;
                for (const auto& [key, coeff] : state)
                    for (const auto& [k2, c2] : step_atom(model, atom, key, coeff))
                        accumulate(next, k2, c2);
                state = std::move(next);
                if (state.empty()) break;
            }
            for (const auto& [key, coeff] : state) project(key, coeff, j);
        }
    }

    std::vector<std::vector<std::uint32_t>> out(rows, std::vector<std::uint32_t>(cols, 0));
    for (std::size_t r = 0; r < rows; ++r) {
        unsigned ord = dst.level == 1 ? 1u : dst.coords[r].order_exp;
        std::uint64_t mask = (ord >= 32) ? kCoeffMask : ((1ull << ord) - 1);
        for (std::size_t c = 0; c < cols; ++c)
            out[r][c] = static_cast<std::uint32_t>(acc[r][c] & mask);
    }
    return out;
}

}  // namespace ssc
