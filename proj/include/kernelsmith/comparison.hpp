#pragma once

#include "kernelsmith/kernel.hpp"

#include <string>

namespace kernelsmith {

/// Sum over l of G_{-n+1+l}(x,u) times the gauge-line factor exp(+i Int A.dz),
/// exact through homogeneity degree zero, everything above folded into one
/// positive-degree remainder tag.
inline Expression green_sum(const Rat& n, int wilson_order) {
    if (!is_integer(n) || n < 2) throw std::invalid_argument("green_sum: dimension");
    int N = static_cast<int>(rat_floor(n)) - 1;
    if (wilson_order < N) throw std::invalid_argument("green_sum: wilson order below n-1");
    Expression g;
    for (int l = 0; l <= N; ++l) g += G_term(n, l, N);
    {
        // omitted orders l > N all have degree >= 1
        Term tail;
        tail.rem = Remainder{1, "o"};
        g.terms.push_back(std::move(tail));
    }
    Expression w = expand_chains(wilson_line(wilson_order, WilsonSign::eq9));
    {
        Term tail;  // first omitted gauge-factor order
        tail.rem = Remainder{wilson_order + 1, "o"};
        w.terms.push_back(std::move(tail));
    }
    Expression prod = g * w;
    // fold strictly positive degrees into the remainder tag
    Expression out;
    bool any_dropped = false;
    for (const auto& t : prod.terms) {
        if (t.rem) {
            out.terms.push_back(t);
            continue;
        }
        Affine deg = t.u_degree();
        if (deg.cs != 0 || deg.cn != 0)
            throw std::logic_error("green_sum: unresolved degree");
        if (deg.c0 > 0) {
            any_dropped = true;
            continue;
        }
        out.terms.push_back(t);
    }
    if (any_dropped) {
        Term tail;
        tail.rem = Remainder{1, "o"};
        out.terms.push_back(std::move(tail));
    }
    return canonicalize(out, CanonOptions{.dim = n});
}

/// Display form with the field strength reconstructed.
inline Expression green_sum_display(const Rat& n, int wilson_order,
                                    Normalization norm = Normalization::standard()) {
    return canonicalize_to_F(green_sum(n, wilson_order), norm, n);
}

struct ComparisonVerdict {
    int dimension = 0;
    std::string representation;
    std::string normalization = "standard";
    std::string wilson_sign = "eq9";
    int wilson_order = 0;
    Expression difference;  // Delta_mu = SL[ tr(gamma_mu . green_sum) ]
    bool coincide = false;
};

/// Decides whether the two regularizations coincide: Delta_mu is the
/// Schwinger limit of the traced Green sum (free index mu); both currents
/// carry an overall -tr, so the report convention is J^Sch = J^zeta - Delta.
inline ComparisonVerdict current_difference(const Rat& n, const RepClass& cls,
                                            const std::string& rep_name,
                                            Normalization norm = Normalization::standard(),
                                            int wilson_order = -1) {
    int ni = static_cast<int>(rat_floor(n));
    if (wilson_order < 0) wilson_order = ni;
    Expression gs = green_sum(n, wilson_order);
    Term gmu;
    gmu.gammas = {MU};
    Expression traced_arg = Expression{gmu} * gs;
    Expression limited = schwinger_limit(canonicalize(traced_arg, CanonOptions{.dim = n}), n);
    Expression traced = trace_symbolic(limited, cls, norm, n);
    ComparisonVerdict v;
    v.dimension = ni;
    v.representation = rep_name;
    v.normalization = norm.c == 2 ? "standard" : "literal-paper";
    v.wilson_order = wilson_order;
    v.difference = canonicalize_to_F(traced, norm, n);
    v.coincide = v.difference.is_zero();
    return v;
}

/// The complex-power current as a formal object: -tr(gamma_mu R_G(x,0)),
/// an opaque named remainder the comparison never has to evaluate.
inline Expression zeta_current_formal(int n) {
    Term t;
    t.c = SymConst(GaussianRat(Rat(-1)));
    t.opaque = "tr(gamma_mu FP K_s(x,x))|n=" + std::to_string(n);
    return Expression{t};
}

}  // namespace kernelsmith
