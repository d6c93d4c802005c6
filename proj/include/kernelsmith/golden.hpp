#pragma once

#include "kernelsmith/s_meromorphic.hpp"
#include "kernelsmith/term.hpp"

#include <stdexcept>

namespace kernelsmith {

// Hand-entered reference expressions for the first four kernel coefficients
// and the three assembled Green-sum displays. These are built literally from
// the published table, term by term, never through the expansion engine.

namespace golden_detail {

inline Affine g_1s() { return {Rat(1, 2), Rat(1, 2), Rat(0)}; }    // (1+s)/2
inline Affine g_2s() { return {Rat(1), Rat(1, 2), Rat(0)}; }       // (2+s)/2
inline Affine g_ns(int off) {                                      // (n+s+off)/2
    return {Rat(off, 2), Rat(1, 2), Rat(1, 2)};
}

/// Common prefactor 2^(s-1) / pi^(n/2+1) e^(-i pi s/2) sin(pi s).
inline Term prefactor() {
    Term p;
    p.sdep.two_exp = Affine(Rat(-1), Rat(1), Rat(0));
    p.sdep.sin_pow = 1;
    p.sdep.phase_pow = 1;
    p.c = SymConst::pi_pow(Rat(-1), Rat(-1, 2));
    return p;
}

/// [ Gamma((1+s)/2) Gamma((n+s+1)/2) u^(-n-s-1) u-slash
///   - Gamma((2+s)/2) Gamma((n+s)/2) u^(-n-s) ]
inline Expression bracket() {
    Term b1;
    Idx d = kFirstDummy;
    b1.sdep.mul_gamma(g_1s());
    b1.sdep.mul_gamma(g_ns(1));
    b1.u.radial = Affine(Rat(-1), Rat(-1), Rat(-1));
    b1.gammas = {d};
    b1.u.mono = {d};
    Term b2;
    b2.sdep.mul_gamma(g_2s());
    b2.sdep.mul_gamma(g_ns(0));
    b2.u.radial = Affine(Rat(0), Rat(-1), Rat(-1));
    b2.c = SymConst(GaussianRat(Rat(-1)));
    Expression e{b1};
    e.terms.push_back(std::move(b2));
    return e;
}

/// Wilson chain factor (coefficient times (u.D)^(k-1)(u.A)).
inline Expression chain_factor(int k, GaussianRat coeff) {
    Term t;
    t.c = SymConst(std::move(coeff));
    t.fields.push_back(Field{FieldKind::Chain, {}, {}, k, +1});
    return Expression{t};
}

/// (i/8) [ Gamma((1+s)/2) Gamma((n+s-1)/2) u^(-n-s+1) u_rho gamma_mu gamma_rho gamma_nu
///        + Gamma((2+s)/2) Gamma((n+s-2)/2) u^(-n-s+2) gamma_mu gamma_nu ] F_{mu nu}
inline Expression f_bracket() {
    Idx m = kFirstDummy, r = kFirstDummy + 1, v = kFirstDummy + 2;
    Term t1;
    t1.sdep.mul_gamma(g_1s());
    t1.sdep.mul_gamma(g_ns(-1));
    t1.u.radial = Affine(Rat(1), Rat(-1), Rat(-1));
    t1.u.mono = {r};
    t1.gammas = {m, r, v};
    t1.fields.push_back(Field{FieldKind::F, {}, {m, v}, 0, 0});
    t1.c = SymConst(GaussianRat(Rat(0), Rat(1, 8)));
    Term t2;
    t2.sdep.mul_gamma(g_2s());
    t2.sdep.mul_gamma(g_ns(-2));
    t2.u.radial = Affine(Rat(2), Rat(-1), Rat(-1));
    t2.gammas = {m, v};
    t2.fields.push_back(Field{FieldKind::F, {}, {m, v}, 0, 0});
    t2.c = SymConst(GaussianRat(Rat(0), Rat(1, 8)));
    Expression e{t1};
    e.terms.push_back(std::move(t2));
    return e;
}

}  // namespace golden_detail

/// Reference kernel coefficient rows (symbolic dimension).
inline Expression table_one_reference(int l) {
    using namespace golden_detail;
    Expression P{prefactor()};
    switch (l) {
        case 0: return P * bracket();
        case 1: return P * (bracket() * chain_factor(1, GaussianRat::i()));
        case 2: {
            Expression inner = bracket() * chain_factor(2, GaussianRat(Rat(-1, 2)));
            inner += f_bracket();
            return P * inner;
        }
        case 3: {
            Expression inner = bracket() * chain_factor(3, GaussianRat(Rat(0), Rat(-1, 6)));
            inner += f_bracket() * chain_factor(1, GaussianRat::i());
            // derivative block, coefficient i/24. The generating formula forces
            // the phase i here: the published table prints 1/24, which fails
            // against two independent evaluation routes (see the kernel
            // crosscheck suite); every other block matches the table as
            // printed.
            Idx m = kFirstDummy, r = kFirstDummy + 1, v = kFirstDummy + 2, sg = kFirstDummy + 3;
            auto term = [&](Affine gA, Affine gB, long long upow, Rat coeff) {
                Term t;
                t.sdep.mul_gamma(gA);
                t.sdep.mul_gamma(gB);
                t.u.radial = Affine(Rat(upow), Rat(-1), Rat(-1));
                t.c = SymConst(GaussianRat(Rat(0), coeff / 24));
                return t;
            };
            // -(3/2) u_rho u_sigma gamma_mu gamma_rho gamma_nu d_sigma F_{mu nu}
            Term t1 = term(g_1s(), g_ns(-1), 1, Rat(-3, 2));
            t1.u.mono = {r, sg};
            t1.gammas = {m, r, v};
            t1.fields.push_back(Field{FieldKind::F, {sg}, {m, v}, 0, 0});
            inner.terms.push_back(t1);
            // - u_mu u_rho gamma_rho d_nu F_{mu nu}
            Term t2 = term(g_1s(), g_ns(-1), 1, Rat(-1));
            t2.u.mono = {m, r};
            t2.gammas = {r};
            t2.fields.push_back(Field{FieldKind::F, {v}, {m, v}, 0, 0});
            inner.terms.push_back(t2);
            // + u_mu u_nu gamma_rho d_nu F_{mu rho}
            Term t3 = term(g_1s(), g_ns(-1), 1, Rat(1));
            t3.u.mono = {m, v};
            t3.gammas = {r};
            t3.fields.push_back(Field{FieldKind::F, {v}, {m, r}, 0, 0});
            inner.terms.push_back(t3);
            // -(3/2) u_mu gamma_nu gamma_rho d_mu F_{nu rho}
            Term t4 = term(g_2s(), g_ns(-2), 2, Rat(-3, 2));
            t4.u.mono = {m};
            t4.gammas = {v, r};
            t4.fields.push_back(Field{FieldKind::F, {m}, {v, r}, 0, 0});
            inner.terms.push_back(t4);
            // + u_mu d_nu F_{mu nu}
            Term t5 = term(g_2s(), g_ns(-2), 2, Rat(1));
            t5.u.mono = {m};
            t5.fields.push_back(Field{FieldKind::F, {v}, {m, v}, 0, 0});
            inner.terms.push_back(t5);
            // + Gamma((1+s)/2) Gamma((n+s-3)/2) u^(-n-s+3) gamma_nu d_mu F_{mu nu}
            Term t6 = term(g_1s(), g_ns(-3), 3, Rat(1));
            t6.gammas = {v};
            t6.fields.push_back(Field{FieldKind::F, {m}, {m, v}, 0, 0});
            inner.terms.push_back(t6);
            return P * inner;
        }
        default: throw std::invalid_argument("table_one_reference: row out of range");
    }
}

/// Reference Green sums times the gauge factor, exact through degree zero
/// with a single tagged remainder.
inline Expression green_sum_reference(int n) {
    Expression e;
    Idx d = kFirstDummy, m = kFirstDummy, r = kFirstDummy + 1, v = kFirstDummy + 2,
        sg = kFirstDummy + 3;
    auto uslash = [&](Rat coeff_re, Rat coeff_im, long long upow) {
        Term t;
        t.gammas = {d};
        t.u.mono = {d};
        t.u.radial = Affine(Rat(upow));
        t.c = SymConst(GaussianRat(coeff_re, coeff_im));
        return t;
    };
    if (n == 2) {
        // -(i/2pi) u-slash / u^2
        Term lead = uslash(Rat(0), Rat(-1, 2), -2);
        lead.c = lead.c * SymConst::pi_pow(Rat(-1));
        e.terms.push_back(lead);
    } else if (n == 3) {
        // -(i/4pi) u-slash / u^3
        Term lead = uslash(Rat(0), Rat(-1, 4), -3);
        lead.c = lead.c * SymConst::pi_pow(Rat(-1));
        e.terms.push_back(lead);
        // (1/16pi) [ (u_rho/u) gamma_mu gamma_rho gamma_nu + gamma_mu gamma_nu ] F_{mu nu}
        Term b1;
        b1.u.radial = Affine(Rat(-1));
        b1.u.mono = {r};
        b1.gammas = {m, r, v};
        b1.fields.push_back(Field{FieldKind::F, {}, {m, v}, 0, 0});
        b1.c = SymConst::pi_pow(Rat(-1)) * GaussianRat(Rat(1, 16));
        e.terms.push_back(b1);
        Term b2;
        b2.gammas = {m, v};
        b2.fields.push_back(Field{FieldKind::F, {}, {m, v}, 0, 0});
        b2.c = SymConst::pi_pow(Rat(-1)) * GaussianRat(Rat(1, 16));
        e.terms.push_back(b2);
    } else if (n == 4) {
        // -(i/2pi^2) u-slash / u^4
        Term lead = uslash(Rat(0), Rat(-1, 2), -4);
        lead.c = lead.c * SymConst::pi_pow(Rat(-2));
        e.terms.push_back(lead);
        // (1/16pi^2) (u_rho/u^2) gamma_mu gamma_rho gamma_nu F_{mu nu}
        Term b1;
        b1.u.radial = Affine(Rat(-2));
        b1.u.mono = {r};
        b1.gammas = {m, r, v};
        b1.fields.push_back(Field{FieldKind::F, {}, {m, v}, 0, 0});
        b1.c = SymConst::pi_pow(Rat(-2)) * GaussianRat(Rat(1, 16));
        e.terms.push_back(b1);
        // (1/48pi^2) (u_rho u_sigma/u^2) ( -(3/2) gamma_mu gamma_rho gamma_nu d_sigma F_{mu nu}
        //   - gamma_rho d_mu F_{sigma mu} + gamma_mu d_rho F_{sigma mu} )
        // The prefactor phase follows the corrected kernel row (i/24 block);
        // the published display carries -i/48 here.
        SymConst c3 = SymConst::pi_pow(Rat(-2)) * GaussianRat(Rat(1, 48));
        Term c1;
        c1.u.radial = Affine(Rat(-2));
        c1.u.mono = {r, sg};
        c1.gammas = {m, r, v};
        c1.fields.push_back(Field{FieldKind::F, {sg}, {m, v}, 0, 0});
        c1.c = c3 * GaussianRat(Rat(-3, 2));
        e.terms.push_back(c1);
        Term c2;
        c2.u.radial = Affine(Rat(-2));
        c2.u.mono = {r, sg};
        c2.gammas = {r};
        c2.fields.push_back(Field{FieldKind::F, {m}, {sg, m}, 0, 0});
        c2.c = c3 * GaussianRat(Rat(-1));
        e.terms.push_back(c2);
        Term c3t;
        c3t.u.radial = Affine(Rat(-2));
        c3t.u.mono = {r, sg};
        c3t.gammas = {m};
        c3t.fields.push_back(Field{FieldKind::F, {r}, {sg, m}, 0, 0});
        c3t.c = c3;
        e.terms.push_back(c3t);
        // (1/24pi^2) (ln 2 - ln u - i pi/2 + Gamma'(1)) gamma_nu d_mu F_{mu nu};
        // same phase correction as above, inner structure as displayed.
        SymConst c4 = SymConst::pi_pow(Rat(-2)) * GaussianRat(Rat(1, 24));
        auto push_log_block = [&](SymConst factor, int log_pow) {
            Term t;
            t.gammas = {v};
            t.fields.push_back(Field{FieldKind::F, {m}, {m, v}, 0, 0});
            t.u.log_pow = log_pow;
            t.c = c4 * factor;
            e.terms.push_back(std::move(t));
        };
        push_log_block(SymConst::ln2(), 0);
        push_log_block(SymConst(GaussianRat(Rat(-1))), 1);
        push_log_block(SymConst::pi_pow(Rat(1)) * GaussianRat(Rat(0), Rat(-1, 2)), 0);
        push_log_block(SymConst::gamma_prime_1(), 0);
    } else {
        throw std::invalid_argument("green_sum_reference: dimension out of range");
    }
    Term rem;
    rem.rem = Remainder{1, "o"};
    e.terms.push_back(std::move(rem));
    return e;
}

/// Golden equality: exact parts agree in the expanded derivative basis
/// (Gamma forms lowered to a shared base), remainder tags agree literally.
struct GoldenDiff {
    bool equal = false;
    Expression residual;          // exact-part difference, canonical
    bool remainders_match = true;
};

inline GoldenDiff golden_diff(const Expression& a, const Expression& b,
                              std::optional<Rat> dim = std::nullopt, Rat clifford_c = Rat(2)) {
    Expression ae, be;
    std::vector<Remainder> ar, br;
    for (const auto& t : a.terms)
        t.rem ? (void)ar.push_back(*t.rem) : (void)ae.terms.push_back(t);
    for (const auto& t : b.terms)
        t.rem ? (void)br.push_back(*t.rem) : (void)be.terms.push_back(t);
    std::sort(ar.begin(), ar.end());
    std::sort(br.begin(), br.end());
    CanonOptions opt;
    opt.expand_fields = true;
    opt.dim = dim;
    opt.clifford_c = clifford_c;
    GoldenDiff d;
    d.residual = canonicalize(lower_gamma_forms(ae - be), opt);
    d.remainders_match = ar == br;
    d.equal = d.residual.is_zero() && d.remainders_match;
    return d;
}

}  // namespace kernelsmith
