#pragma once

#include "kernelsmith/field_calculus.hpp"
#include "kernelsmith/s_meromorphic.hpp"
#include "kernelsmith/u_structure.hpp"

#include <optional>
#include <string>
#include <vector>

namespace kernelsmith {

namespace kernel_detail {

/// One application of (-i d-slash_u + d_a): the u-derivative branch prepends
/// a contracted gamma from the left, the a-branch lowers the auxiliary power.
inline Expression apply_us_da(const Expression& e, DummyAlloc& alloc) {
    Expression out;
    Idx d = alloc.fresh();
    for (const auto& t : e.terms) {
        // -i gamma_d d/du_d
        auto push_deriv = [&](Term base) {
            base.gammas.insert(base.gammas.begin(), d);
            base.c = base.c * (-GaussianRat::i());
            out.terms.push_back(std::move(base));
        };
        if (!t.u.radial.is_zero()) {
            Term r = t;
            r.c = r.c * SymConst::affine(t.u.radial);
            r.u.radial += Affine(-2);
            r.u.mono.push_back(d);
            push_deriv(std::move(r));
        }
        for (size_t k = 0; k < t.u.mono.size(); ++k) {
            Term r = t;
            r.u.mono.erase(r.u.mono.begin() + static_cast<long>(k));
            r.deltas.push_back({d, t.u.mono[k]});
            push_deriv(std::move(r));
        }
        if (t.u.log_pow > 0) {
            Term r = t;
            r.c = r.c * GaussianRat(Rat(t.u.log_pow));
            r.u.log_pow -= 1;
            r.u.radial += Affine(-2);
            r.u.mono.push_back(d);
            push_deriv(std::move(r));
        }
        // d/da
        if (t.a_pow > 0) {
            Term r = t;
            r.c = r.c * GaussianRat(Rat(t.a_pow));
            r.a_pow -= 1;
            out.terms.push_back(std::move(r));
        }
    }
    return out;
}

}  // namespace kernel_detail

/// Kernel coefficient H_{-n-s+l}(x, u) from the master formula, with the
/// dimension kept symbolic. The 2-power inside the k-sum is 2^(s+k-2l-2):
/// the k-dependence follows from the Mellin integral of the Bessel factor
/// and is required by the reference table.
inline Expression master_H(int l) {
    if (l < 0 || l > 3) throw std::invalid_argument("master_H: order out of range (0..3)");
    DummyAlloc alloc;
    // operand: sum over k of ((-ia)^k / k!) 2^(s+k-2l-2) Gamma((1+s+k)/2)
    //          Gamma((s+k+n-1-2l)/2) u^(-s-n+2l+1-k)
    Expression operand;
    for (int k = 0; k <= l + 1; ++k) {
        Term t;
        t.a_pow = k;
        GaussianRat mi = GaussianRat::i_pow(-k);  // (-i)^k
        t.c = SymConst(mi * GaussianRat(Rat(1) / Rat(factorial(k))));
        t.sdep.mul_gamma(Affine(Rat(1 + k, 2), Rat(1, 2), Rat(0)));
        t.sdep.mul_gamma(Affine(Rat(k - 1 - 2 * l, 2), Rat(1, 2), Rat(1, 2)));
        t.sdep.two_exp = Affine(Rat(k - 2 * l - 2), Rat(1), Rat(0));
        t.u.radial = Affine(Rat(2 * l + 1 - k), Rat(-1), Rat(-1));
        operand.terms.push_back(std::move(t));
    }
    // operator (-i d-slash_u + d_a) [ D_x (-i d-slash_u + d_a) ]^l, applied
    // right to left
    Expression e = kernel_detail::apply_us_da(operand, alloc);
    for (int j = 0; j < l; ++j) {
        e = apply_dirac(e);
        alloc.next = max_dummy(e) + 1;
        e = kernel_detail::apply_us_da(e, alloc);
    }
    // evaluate at a = 0
    Expression at_zero;
    for (const auto& t : e.terms)
        if (t.a_pow == 0) at_zero.terms.push_back(t);
    // prefactor -i / (pi^(n/2+1) l!) e^(-i pi s/2) sin(pi s)
    Term pre;
    pre.c = SymConst::pi_pow(Rat(-1), Rat(-1, 2)) *
            (-GaussianRat::i() * GaussianRat(Rat(1) / Rat(factorial(l))));
    pre.sdep.sin_pow = 1;
    pre.sdep.phase_pow = 1;
    Expression out = raw_product(Expression(pre), at_zero);
    return canonicalize(lower_gamma_forms(canonicalize(out)));
}

/// Display form of the kernel coefficient: Gamma factors re-absorbed and the
/// field strength reconstructed where the tensor structure antisymmetrizes.
inline Expression master_H_display(int l, Normalization norm = Normalization::standard()) {
    Expression h = master_H(l);
    Expression absorbed = canonicalize(absorb_gamma_factors(h));
    return canonicalize_to_F(absorbed, norm);
}

/// Whether any term of the (n-substituted) coefficient has a pole at s = -1.
inline int max_pole_order(const Expression& e_at_n) {
    int p = 0;
    for (const auto& t : e_at_n.terms)
        p = std::max(p, pole_order_at_minus_one(MeroScalar{t.sdep, t.c}));
    return p;
}

/// G_{-n+1+l}(x, u): the plain limit s -> -1 for l < N, the finite part for
/// l = N. Finite parts interact with u^(f(s)) and may produce ln u content.
inline Expression G_term(const Rat& n, int l, int N) {
    Expression h = master_H(l).subst_n(n);
    h = canonicalize(h, CanonOptions{.dim = n});
    Expression out;
    for (const auto& t : h.terms) {
        MeroScalar m{t.sdep, t.c};
        int p = pole_order_at_minus_one(m);
        if (p >= 2)
            throw PoleError("kernel coefficient with pole order >= 2 at s = -1 (l=" +
                            std::to_string(l) + ")");
        if (l < N && p >= 1)
            throw PoleError("plain limit requested at a pole (l=" + std::to_string(l) + ")");
        Laurent series = laurent_at_minus_one(m, 0);
        Rat alpha = t.u.radial.cs;  // u^(f(-1)) * exp(alpha t ln u)
        for (int q = 0; q <= std::max(p, 0); ++q) {
            SymConst coeff = series.at(-q);
            if (coeff.is_zero()) continue;
            Term r = t;
            r.sdep = SDep{};
            r.c = coeff * SymConst(GaussianRat(rat_pow(alpha, q) / Rat(factorial(q))));
            r.u.radial = Affine(t.u.radial.eval_s(Rat(-1)));
            r.u.log_pow = t.u.log_pow + q;
            out.terms.push_back(std::move(r));
        }
    }
    return canonicalize(out, CanonOptions{.dim = n});
}

/// Residue at s = -1 of the summed kernel coefficients l = 0..N; nonzero only
/// when a coefficient carries a pole (n = 4, l = 3). Its negative matches the
/// ln u coefficient of the finite part.
inline Expression residue_H_sum(const Rat& n, int N) {
    Expression out;
    for (int l = 0; l <= N; ++l) {
        Expression h = master_H(l).subst_n(n);
        h = canonicalize(h, CanonOptions{.dim = n});
        for (const auto& t : h.terms) {
            MeroScalar m{t.sdep, t.c};
            SymConst res = residue(m);
            if (res.is_zero()) continue;
            Term r = t;
            r.sdep = SDep{};
            r.c = res;
            r.u.radial = Affine(t.u.radial.eval_s(Rat(-1)));
            out.terms.push_back(std::move(r));
        }
    }
    return canonicalize(out, CanonOptions{.dim = n});
}

/// ln u content of an expression (terms with log_pow > 0, with the log
/// stripped).
inline Expression log_content(const Expression& e) {
    Expression out;
    for (const auto& t : e.terms)
        if (t.u.log_pow > 0) {
            Term r = t;
            r.u.log_pow -= 1;
            out.terms.push_back(std::move(r));
        }
    return out;
}

}  // namespace kernelsmith
