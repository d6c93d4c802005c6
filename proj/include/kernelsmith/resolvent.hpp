#pragma once

#include "kernelsmith/field_calculus.hpp"

#include <optional>
#include <string>
#include <vector>

namespace kernelsmith {

/// B = (xi-slash - lambda) / (xi^2 - lambda^2), the inverse of -(xi-slash + lambda)
/// under the standard normalization.
inline Expression resolvent_inverse_factor() {
    Term slash;
    Idx d = kFirstDummy;
    slash.gammas = {d};
    slash.sym.xi = {d};
    slash.sym.den_pow = 1;
    Term lam;
    lam.sym.lam_pow = 1;
    lam.sym.den_pow = 1;
    lam.c = SymConst(GaussianRat(Rat(-1)));
    Expression b{slash};
    b.terms.push_back(std::move(lam));
    return b;
}

/// xi-slash + lambda (numerator only).
inline Expression xi_slash_plus_lambda() {
    Term slash;
    Idx d = kFirstDummy;
    slash.gammas = {d};
    slash.sym.xi = {d};
    Term lam;
    lam.sym.lam_pow = 1;
    Expression e{slash};
    e.terms.push_back(std::move(lam));
    return e;
}

/// Resolvent symbol coefficient of homogeneity degree -1-l:
///   -B [ D_x B ]^l, expanded with the Dirac operator acting to the right.
inline Expression resolvent_coefficient(int l, Normalization norm = Normalization::standard()) {
    if (l < 0) throw std::invalid_argument("resolvent_coefficient: negative order");
    Expression b = resolvent_inverse_factor();
    Expression acc = Expression::one();
    for (int j = 0; j < l; ++j) acc = apply_dirac(b * acc);
    Expression out = -(b * acc);
    CanonOptions opt;
    opt.clifford_c = norm.c;
    return canonicalize(out, opt);
}

/// Per-term (xi, lambda)-homogeneity check: every term of the coefficient
/// must have degree exactly -1-l.
inline bool resolvent_homogeneous(const Expression& e, int l) {
    for (const auto& t : e.terms)
        if (t.sym.degree() != -1 - l) return false;
    return true;
}

struct RecursionReport {
    bool passed = true;
    int failed_level = -1;
    std::string residual;  // canonical key + coefficient of the first offending term
};

/// Checks D_x C(-1-l) - (xi-slash + lambda) C(-1-l-1) = 0 for all l < l_max.
inline RecursionReport verify_recursion(int l_max,
                                        Normalization norm = Normalization::standard(),
                                        std::optional<Expression> perturbation = std::nullopt) {
    CanonOptions opt;
    opt.clifford_c = norm.c;
    RecursionReport rep;
    for (int l = 0; l < l_max; ++l) {
        Expression cl = resolvent_coefficient(l, norm);
        Expression cl1 = resolvent_coefficient(l + 1, norm);
        if (perturbation && l + 1 == l_max) cl1 += *perturbation;
        Expression lhs = apply_dirac(cl);
        Expression rhs = xi_slash_plus_lambda() * cl1;
        Expression diff = canonicalize(lhs - rhs, opt);
        if (!diff.is_zero()) {
            rep.passed = false;
            rep.failed_level = l;
            const Term& t = diff.terms.front();
            rep.residual = canon_detail::term_key(t) + " coeff " + t.c.str();
            return rep;
        }
    }
    return rep;
}

}  // namespace kernelsmith
