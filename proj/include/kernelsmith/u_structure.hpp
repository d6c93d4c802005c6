#pragma once

#include "kernelsmith/canonical.hpp"

#include <map>
#include <vector>

namespace kernelsmith {

struct SchwingerError : std::domain_error {
    using std::domain_error::domain_error;
};

/// d/du_mu with d(u^a) = a u^(a-2) u_mu and the product rule over the
/// monomial; lowers every term's homogeneity degree by exactly one.
inline Expression u_derivative(const Expression& e, Idx mu) {
    Expression out;
    for (const auto& t : e.terms) {
        if (t.opaque) throw std::invalid_argument("u_derivative of an opaque atom");
        if (t.rem) {
            Term r = t;
            r.rem->min_degree -= 1;
            out.terms.push_back(std::move(r));
            continue;
        }
        for (const auto& f : t.fields)
            if (f.kind == FieldKind::Chain)
                throw std::invalid_argument("u_derivative of an unexpanded chain factor");
        if (!t.u.radial.is_zero()) {
            Term r = t;
            r.c = r.c * SymConst::affine(t.u.radial);
            r.u.radial += Affine(-2);
            r.u.mono.push_back(mu);
            out.terms.push_back(std::move(r));
        }
        for (size_t k = 0; k < t.u.mono.size(); ++k) {
            Term r = t;
            r.u.mono.erase(r.u.mono.begin() + static_cast<long>(k));
            r.deltas.push_back({mu, t.u.mono[k]});
            out.terms.push_back(std::move(r));
        }
        if (t.u.log_pow > 0) {
            Term r = t;
            r.c = r.c * GaussianRat(Rat(t.u.log_pow));
            r.u.log_pow -= 1;
            r.u.radial += Affine(-2);
            r.u.mono.push_back(mu);
            out.terms.push_back(std::move(r));
        }
    }
    return out;
}

/// One u-homogeneous piece of an expression.
struct HomogeneousComponent {
    Rat degree;
    bool is_remainder = false;  // degree is then a lower bound
    Expression expression;
};

/// Partition by homogeneity degree evaluated at s = -1 (n must already be
/// substituted); components sum exactly to the input.
inline std::vector<HomogeneousComponent> decompose_homogeneous(const Expression& e) {
    std::map<std::pair<bool, Rat>, Expression> buckets;
    for (const auto& t : e.terms) {
        if (t.opaque) throw std::invalid_argument("decompose_homogeneous of an opaque atom");
        if (t.rem) {
            buckets[{true, Rat(t.rem->min_degree)}].terms.push_back(t);
            continue;
        }
        Affine deg = t.u_degree();
        if (deg.cn != 0)
            throw std::invalid_argument("decompose_homogeneous requires a substituted dimension");
        Rat d = deg.c0 - deg.cs;  // value at s = -1
        buckets[{false, d}].terms.push_back(t);
    }
    std::vector<HomogeneousComponent> out;
    for (auto& [key, expr] : buckets) out.push_back({key.second, key.first, std::move(expr)});
    return out;
}

/// Mean of u_{i1}...u_{i2k} / u^{2k} over the unit sphere S^{n-1}: full
/// delta symmetrization divided by n (n+2) ... (n+2k-2); odd monomials vanish.
inline Expression angular_average_monomial(const std::vector<Idx>& mono, const Rat& n) {
    if (mono.size() % 2 == 1) return Expression::zero();
    if (mono.empty()) return Expression::one();
    // sum over pairings
    std::function<Expression(std::vector<Idx>)> pairings = [&](std::vector<Idx> v) -> Expression {
        if (v.empty()) return Expression::one();
        Expression out;
        Idx first = v.front();
        for (size_t j = 1; j < v.size(); ++j) {
            std::vector<Idx> rest;
            for (size_t k = 1; k < v.size(); ++k)
                if (k != j) rest.push_back(v[k]);
            Term d;
            d.deltas.push_back({first, v[j]});
            out += raw_product(Expression(d), pairings(rest));
        }
        return out;
    };
    Rat norm(1);
    for (size_t k = 0; 2 * k < mono.size(); ++k) norm *= (n + Rat(2 * static_cast<long long>(k)));
    Expression sum = pairings(mono);
    return sum * SymConst(GaussianRat(Rat(1) / norm));
}

/// Per-term angular average for degree-zero, log-free u content.
inline Expression angular_average(const Expression& e, const Rat& n) {
    Expression out;
    for (const auto& t : e.terms) {
        if (t.rem || t.opaque) throw SchwingerError("angular average of tagged content");
        Affine deg = t.u_degree();
        if (!deg.is_constant() || deg.c0 != 0)
            throw SchwingerError("angular average requires homogeneity degree zero");
        if (t.u.log_pow != 0) throw SchwingerError("angular average of a logarithmic term");
        Term rest = t;
        rest.u = UPart{};
        Expression avg = angular_average_monomial(t.u.mono, n);
        out += raw_product(Expression(rest), avg);
    }
    return out;
}

/// The point-splitting limit functional: the ordinary limit where it exists,
/// zero on homogeneous content of nonzero degree and on logarithmic content,
/// the unit-sphere mean on degree-zero content.
inline Expression schwinger_limit(const Expression& e, const Rat& n) {
    Expression out;
    for (const auto& t : e.terms) {
        if (t.opaque) {
            out.terms.push_back(t);  // continuous at u = 0, evaluated there
            continue;
        }
        if (t.rem) {
            if (t.rem->min_degree <= 0)
                throw SchwingerError("remainder tag of non-positive degree under SL");
            continue;
        }
        if (!t.sdep.trivial())
            throw SchwingerError("Schwinger limit on unresolved s-dependence");
        Affine deg = t.u_degree();
        if (deg.cs != 0 || deg.cn != 0)
            throw SchwingerError("Schwinger limit on s- or n-dependent degree");
        if (!is_integer(deg.c0))
            throw SchwingerError("Schwinger limit on non-integer homogeneity degree " +
                                 rat_str(deg.c0));
        if (t.u.log_pow > 0) continue;  // logarithmic: annihilated
        if (deg.c0 != 0) continue;      // strictly positive or negative degree
        if (t.u.mono.empty()) {
            Term r = t;
            r.u = UPart{};
            out.terms.push_back(std::move(r));
            continue;
        }
        Term rest = t;
        rest.u = UPart{};
        out += raw_product(Expression(rest), angular_average_monomial(t.u.mono, n));
    }
    return out;
}

}  // namespace kernelsmith
