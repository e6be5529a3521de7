#include "ssc/slices.hpp"

#include <stdexcept>

namespace ssc {

Theory parse_theory(const std::string& text) {
    if (text == "KGL") return Theory::KGL;
    if (text == "KQ") return Theory::KQ;
    if (text == "KW") return Theory::KW;
    throw std::invalid_argument("unrecognized theory: " + text);
}

std::string to_string(Theory t) {
    switch (t) {
        case Theory::KGL: return "KGL";
        case Theory::KQ: return "KQ";
        case Theory::KW: return "KW";
    }
    throw std::logic_error("unreachable");
}

namespace {

int require_n(int n) {
    if (n < 1) throw std::invalid_argument("coefficient exponent must be positive");
    return n;
}

int mod4(int x) { return ((x % 4) + 4) % 4; }

}  // namespace

bool has_summand(Theory t, int n, int q, int j) {
    require_n(n);
    switch (t) {
        case Theory::KGL: return j == q;
        case Theory::KW: return true;
        case Theory::KQ: return j <= q;
    }
    throw std::logic_error("unreachable");
}

int summand_level(Theory t, int n, int q, int j) {
    if (!has_summand(t, n, q, j)) throw std::invalid_argument("no summand at this offset");
    switch (t) {
        case Theory::KGL: return n;
        case Theory::KW: return 1;
        case Theory::KQ: return (n >= 2 && j == q && q % 2 == 0) ? n : 1;
    }
    throw std::logic_error("unreachable");
}

std::vector<SummandSpec> slice_summands(Theory t, int n, int q, int j_lo, int j_hi) {
    require_n(n);
    std::vector<SummandSpec> out;
    for (int j = j_lo; j <= j_hi; ++j)
        if (has_summand(t, n, q, j)) out.push_back(SummandSpec{q, j, summand_level(t, n, q, j)});
    return out;
}

namespace {

using OS = OperationSymbol;
using Quintuple = std::array<OperationSymbol, 5>;  // indexed by d

Quintuple make(OS a4, OS a3, OS a2, OS a1, OS a0) {
    return {std::move(a0), std::move(a1), std::move(a2), std::move(a3), std::move(a4)};
}

// mod-2 components by offset class; shared by KW/2 and the j < q part of KQ/2
Quintuple witt_mod2(int j) {
    switch (mod4(j)) {
        case 0: return make(OS::sq3sq1(), OS::zero(), OS::sq2(), OS::zero(), OS::zero());
        case 1:
            return make(OS::sq3sq1(), OS::sq2sq1() + OS::sq3(), OS::sq2(),
                        OS::mul_rho() + OS::mul_tau() * OS::sq1(), OS::zero());
        case 2:
            return make(OS::sq3sq1(), OS::zero(), OS::sq2() + OS::mul_rho() * OS::sq1(),
                        OS::zero(), OS::mul_tau());
        default:
            return make(OS::sq3sq1(), OS::sq2sq1() + OS::sq3(),
                        OS::sq2() + OS::mul_rho() * OS::sq1(), OS::mul_tau() * OS::sq1(),
                        OS::mul_tau());
    }
}

// mod-2 components on the top summand j = q of the hermitian theory
Quintuple hermitian_mod2_top(int q) {
    switch (mod4(q)) {
        case 0:
            return make(OS::zero(), OS::sq2sq1(), OS::sq2() + OS::mul_rho() * OS::sq1(),
                        OS::zero(), OS::zero());
        case 1:
            return make(OS::zero(), OS::sq2sq1() + OS::sq3(), OS::sq2(),
                        OS::mul_rho() + OS::mul_tau() * OS::sq1(), OS::zero());
        case 2:
            return make(OS::zero(), OS::sq2sq1(), OS::sq2() + OS::mul_rho() * OS::sq1(),
                        OS::mul_tau() * OS::sq1(), OS::mul_tau());
        default:
            return make(OS::zero(), OS::sq2sq1() + OS::sq3(),
                        OS::sq2() + OS::mul_rho() * OS::sq1(), OS::mul_tau() * OS::sq1(),
                        OS::mul_tau());
    }
}

// mod-2^n components, n >= 2, away from the two exceptional offsets
Quintuple witt_mod2n(int j) {
    if (mod4(j) <= 1) return make(OS::sq3sq1(), OS::zero(), OS::sq2(), OS::zero(), OS::zero());
    return make(OS::sq3sq1(), OS::zero(), OS::sq2() + OS::mul_rho() * OS::sq1(), OS::zero(),
                OS::mul_tau());
}

// mod-2^n components on the next-to-top summand j = q - 1 of the hermitian
// theory: the top component is rerouted through the integral Bockstein when
// it hits the level-n summand of s_{q+1}
Quintuple hermitian_mod2n_subtop(int n, int q) {
    switch (mod4(q - 1)) {
        case 0:
            return make(OS::del_2_to_2n(n) * OS::sq2sq1(), OS::zero(), OS::sq2(), OS::zero(),
                        OS::zero());
        case 1: return make(OS::sq3sq1(), OS::zero(), OS::sq2(), OS::zero(), OS::zero());
        case 2:
            return make(OS::del_2_to_2n(n) * OS::sq2sq1(), OS::zero(),
                        OS::sq2() + OS::mul_rho() * OS::sq1(), OS::zero(), OS::mul_tau());
        default:
            return make(OS::sq3sq1(), OS::zero(), OS::sq2() + OS::mul_rho() * OS::sq1(),
                        OS::zero(), OS::mul_tau());
    }
}

// mod-2^n components on the top summand j = q of the hermitian theory
Quintuple hermitian_mod2n_top(int n, int q) {
    switch (mod4(q)) {
        case 0:
            return make(OS::zero(), OS::sq2() * OS::del_2n_to_2(n), OS::sq2() * OS::pr(n),
                        OS::zero(), OS::zero());
        case 1:
            return make(OS::zero(), OS::inc(n) * OS::sq2sq1(), OS::sq2(), OS::zero(), OS::zero());
        case 2:
            return make(OS::zero(), OS::sq2() * OS::del_2n_to_2(n), OS::sq2() * OS::pr(n),
                        OS::mul_tau() * OS::del_2n_to_2(n), OS::mul_tau() * OS::pr(n));
        default:
            return make(OS::zero(), OS::inc(n) * OS::sq2sq1(),
                        OS::sq2() + OS::mul_rho() * OS::sq1(), OS::zero(), OS::mul_tau());
    }
}

// the first Milnor operation and its mod-2^n counterpart, sitting at d = 3
Quintuple kgl_quintuple(int n) {
    OS a3 = n == 1 ? OS::sq3() + OS::sq2sq1()
                   : OS::del_2_to_2n(n) * OS::sq2() * OS::pr(n) +
                         OS::inc(n) * OS::sq2() * OS::del_2n_to_2(n);
    return make(OS::zero(), std::move(a3), OS::zero(), OS::zero(), OS::zero());
}

void validate_components(Theory t, int n, const DifferentialSpec& spec) {
    int src_level = summand_level(t, n, spec.q, spec.j);
    for (int d = 0; d <= 4; ++d) {
        const OperationSymbol& a = spec.entries[d];
        if (a.is_zero()) continue;
        if (a.bidegree() != std::pair(d, 1))
            throw std::logic_error("component bidegree disagrees with its slot");
        int jt = spec.j + DifferentialSpec::target_offset(d);
        if (!has_summand(t, n, spec.q + 1, jt))
            throw std::logic_error("component targets a missing summand");
        int dst_level = summand_level(t, n, spec.q + 1, jt);
        int sl = a.source_level(), tl = a.target_level();
        if (sl != 0 && sl != src_level) throw std::logic_error("component source level mismatch");
        if (tl != 0 && tl != dst_level) throw std::logic_error("component target level mismatch");
        if (sl == 0 && tl == 0 && src_level != dst_level)
            throw std::logic_error("component level mismatch");
    }
}

}  // namespace

DifferentialSpec d1_components(Theory t, int n, int q, int j) {
    if (!has_summand(t, n, q, j)) throw std::invalid_argument("no summand at this offset");
    DifferentialSpec spec;
    spec.q = q;
    spec.j = j;
    switch (t) {
        case Theory::KGL:
            spec.entries = kgl_quintuple(n);
            break;
        case Theory::KW:
            spec.entries = n == 1 ? witt_mod2(j) : witt_mod2n(j);
            break;
        case Theory::KQ:
            if (n == 1)
                spec.entries = j == q ? hermitian_mod2_top(q) : witt_mod2(j);
            else if (j == q)
                spec.entries = hermitian_mod2n_top(n, q);
            else if (j == q - 1)
                spec.entries = hermitian_mod2n_subtop(n, q);
            else
                spec.entries = witt_mod2n(j);
            break;
    }
    validate_components(t, n, spec);
    return spec;
}

}  // namespace ssc
