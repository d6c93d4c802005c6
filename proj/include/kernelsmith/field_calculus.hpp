#pragma once

#include "kernelsmith/canonical.hpp"
#include "kernelsmith/gamma_algebra.hpp"

#include <vector>

namespace kernelsmith {

/// Applies the local Dirac operator gamma_d (i d_d + A_d) from the left; the
/// partial derivative acts by product rule on every field factor, u- and
/// s-content are constants for it.
inline Expression apply_dirac(const Expression& e) {
    Idx d = max_dummy(e) + 1;
    Expression out;
    for (const auto& t : e.terms) {
        if (t.rem || t.opaque)
            throw std::invalid_argument("apply_dirac on remainder or opaque content");
        // derivative branch
        for (size_t f = 0; f < t.fields.size(); ++f) {
            if (t.fields[f].kind == FieldKind::Chain)
                throw std::invalid_argument("apply_dirac on an unexpanded chain factor");
            Term dt = t;
            dt.gammas.insert(dt.gammas.begin(), d);
            dt.fields[f].derivs.push_back(d);
            dt.c = dt.c * GaussianRat::i();
            out.terms.push_back(std::move(dt));
        }
        // gauge-potential branch
        Term at = t;
        at.gammas.insert(at.gammas.begin(), d);
        at.fields.push_back(Field{FieldKind::A, {}, {d}, 0, 0});
        out.terms.push_back(std::move(at));
    }
    return out;
}

enum class WilsonSign : int {
    eq24 = +1,  // expansion of exp(-i Int_x^y A.dz)
    eq9 = -1,   // expansion of exp(+i Int_x^y A.dz)
};

/// Truncated Wilson-line factor as opaque (u.D)^(k-1)(u.A) chain factors:
///   exp(-i Int) = sum_k (i^k / k!)   C_k   with (u.D) = i(u.d) + (u.A)
///   exp(+i Int) = sum_k ((-i)^k / k!) C_k  with (u.D) = -i(u.d) + (u.A)
/// The line integral is Int_x^y A.dz = -Int_0^1 A_mu(x - t u) u_mu dt.
inline Expression wilson_line(int order, WilsonSign sign = WilsonSign::eq24) {
    if (order < 0) throw std::invalid_argument("wilson_line: negative order");
    Expression out = Expression::one();
    GaussianRat i_pow(Rat(1));
    GaussianRat step = sign == WilsonSign::eq24 ? GaussianRat::i() : -GaussianRat::i();
    Rat fact(1);
    for (int k = 1; k <= order; ++k) {
        i_pow *= step;
        fact *= k;
        Term chain;
        chain.c = SymConst(i_pow * GaussianRat(Rat(1) / fact));
        chain.fields.push_back(
            Field{FieldKind::Chain, {}, {}, k, sign == WilsonSign::eq24 ? +1 : -1});
        out.terms.push_back(std::move(chain));
    }
    return out;
}

/// Expands every opaque chain factor into derivative monomials of A.
inline Expression expand_chains(const Expression& e) {
    DummyAlloc alloc{max_dummy(e) + 1};
    Expression out;
    for (const auto& t : e.terms) {
        std::vector<Expression> factors;
        Term rest = t;
        std::vector<Field> keep;
        for (const auto& f : rest.fields) {
            if (f.kind == FieldKind::Chain)
                factors.push_back(canon_detail::expand_chain(f.chain_k, f.chain_sign, alloc));
            else
                keep.push_back(f);
        }
        rest.fields = std::move(keep);
        Expression acc{rest};
        for (const auto& f : factors) acc = raw_product(acc, f);
        out += acc;
    }
    return out;
}

/// Substitution A_mu -> A_mu + d_mu chi with a formal scalar chi; F-built
/// content is unchanged by construction.
inline Expression gauge_shift(const Expression& e) {
    Expression out;
    for (const auto& t : e.terms) {
        std::vector<Expression> factor_sums;
        Term base = t;
        base.fields.clear();
        Expression acc{base};
        for (const auto& f : t.fields) {
            if (f.kind == FieldKind::A) {
                Term a;
                a.fields.push_back(f);
                Term chi;
                Field cf{FieldKind::Chi, f.derivs, {}, 0, 0};
                cf.derivs.push_back(f.idx[0]);
                chi.fields.push_back(std::move(cf));
                Expression sum{a};
                sum.terms.push_back(std::move(chi));
                acc = raw_product(acc, sum);
            } else if (f.kind == FieldKind::Chain) {
                throw std::invalid_argument("gauge_shift on an unexpanded chain factor");
            } else {
                Term keep;
                keep.fields.push_back(f);
                acc = raw_product(acc, Expression{keep});
            }
        }
        out += acc;
    }
    return out;
}

namespace fcanon_detail {

/// Whether word positions carrying dummies a and b admit forced
/// antisymmetrization: both in the gamma word, or both in one epsilon.
inline bool forced_antisymmetric(const Term& t, Idx a, Idx b) {
    bool ga = false, gb = false;
    for (auto g : t.gammas) {
        if (g == a) ga = true;
        if (g == b) gb = true;
    }
    if (ga && gb) return true;
    for (const auto& e : t.eps) {
        bool ea = false, eb = false;
        for (auto i : e) {
            if (i == a) ea = true;
            if (i == b) eb = true;
        }
        if (ea && eb) return true;
    }
    return false;
}

}  // namespace fcanon_detail

/// Rewrites derivative-of-A content into field-strength factors wherever the
/// term's tensor structure antisymmetrizes the pair; symmetric parts stay as
/// plain derivatives. Idempotent; equality semantics are untouched (F expands
/// back to the same derivative basis).
inline Expression canonicalize_to_F(const Expression& e, Normalization norm = Normalization::standard(),
                                    std::optional<Rat> dim = std::nullopt) {
    CanonOptions disp;
    disp.clifford_c = norm.c;
    disp.dim = dim;
    Expression cur = canonicalize(e, disp);

    // pass 1: single-term splits forced by gamma/epsilon contractions
    bool changed = true;
    while (changed) {
        changed = false;
        Expression next;
        for (const auto& t : cur.terms) {
            bool done = false;
            for (size_t f = 0; f < t.fields.size() && !done; ++f) {
                const Field& fl = t.fields[f];
                if (fl.kind != FieldKind::A || fl.derivs.empty()) continue;
                for (size_t di = 0; di < fl.derivs.size() && !done; ++di) {
                    Idx alpha = fl.derivs[di], beta = fl.idx[0];
                    if (!is_dummy(alpha) || !is_dummy(beta)) continue;
                    if (!fcanon_detail::forced_antisymmetric(t, alpha, beta)) continue;
                    // dA = (1/2) dF + (1/2) (dA + swapped dA)
                    Term tf = t, ts1 = t, ts2 = t;
                    Field ff{FieldKind::F, fl.derivs, {alpha, beta}, 0, 0};
                    ff.derivs.erase(ff.derivs.begin() + static_cast<long>(di));
                    tf.fields[f] = std::move(ff);
                    tf.c = tf.c * GaussianRat(Rat(1, 2));
                    ts1.c = ts1.c * GaussianRat(Rat(1, 2));
                    std::swap(ts2.fields[f].derivs[di], ts2.fields[f].idx[0]);
                    ts2.c = ts2.c * GaussianRat(Rat(1, 2));
                    next.terms.push_back(std::move(tf));
                    next.terms.push_back(std::move(ts1));
                    next.terms.push_back(std::move(ts2));
                    done = true;
                    changed = true;
                }
            }
            if (!done) next.terms.push_back(t);
        }
        cur = canonicalize(next, disp);
    }

    // pass 2: exact cross-term antisymmetric partners
    changed = true;
    while (changed) {
        changed = false;
        for (size_t ti = 0; ti < cur.terms.size() && !changed; ++ti) {
            const Term& t = cur.terms[ti];
            for (size_t f = 0; f < t.fields.size() && !changed; ++f) {
                const Field& fl = t.fields[f];
                if (fl.kind != FieldKind::A || fl.derivs.empty()) continue;
                for (size_t di = 0; di < fl.derivs.size() && !changed; ++di) {
                    Term swapped = t;
                    std::swap(swapped.fields[f].derivs[di], swapped.fields[f].idx[0]);
                    Expression probe = canonicalize(Expression{swapped}, disp);
                    if (probe.terms.size() != 1) continue;
                    std::string pkey = canon_detail::term_key(probe.terms[0]);
                    for (size_t tj = 0; tj < cur.terms.size() && !changed; ++tj) {
                        if (tj == ti) continue;
                        if (canon_detail::term_key(cur.terms[tj]) != pkey) continue;
                        if (!(cur.terms[tj].c == -probe.terms[0].c)) continue;
                        // exact pair: c (dA - swapped) = c dF
                        Term tf = t;
                        Field ff{FieldKind::F, fl.derivs, {fl.derivs[di], fl.idx[0]}, 0, 0};
                        ff.derivs.erase(ff.derivs.begin() + static_cast<long>(di));
                        tf.fields[f] = std::move(ff);
                        Expression next;
                        for (size_t k = 0; k < cur.terms.size(); ++k)
                            if (k != ti && k != tj) next.terms.push_back(cur.terms[k]);
                        next.terms.push_back(std::move(tf));
                        cur = canonicalize(next, disp);
                        changed = true;
                    }
                }
            }
        }
    }
    return cur;
}

}  // namespace kernelsmith
