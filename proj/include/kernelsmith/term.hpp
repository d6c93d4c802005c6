#pragma once

#include "kernelsmith/affine.hpp"
#include "kernelsmith/indices.hpp"
#include "kernelsmith/symconst.hpp"

#include <algorithm>
#include <array>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace kernelsmith {

/// s-dependent scalar factors of a term: a product of Gamma functions with
/// affine arguments, integer powers of sin(pi s) and of exp(-i pi s / 2), and
/// an optional factor 2^(affine exponent). Pure pi powers and rationals live
/// in the term's SymConst instead.
struct SDep {
    std::map<Affine, int> gammas;  // argument -> integer power (may be negative)
    int sin_pow = 0;
    int phase_pow = 0;
    Affine two_exp;  // exponent of 2; zero affine means no factor

    bool trivial() const {
        return gammas.empty() && sin_pow == 0 && phase_pow == 0 && two_exp.is_zero();
    }

    void mul_gamma(const Affine& arg, int pow = 1) {
        auto it = gammas.find(arg);
        if (it == gammas.end()) {
            if (pow != 0) gammas.emplace(arg, pow);
        } else {
            it->second += pow;
            if (it->second == 0) gammas.erase(it);
        }
    }

    SDep operator*(const SDep& o) const {
        SDep r = *this;
        for (const auto& [a, p] : o.gammas) r.mul_gamma(a, p);
        r.sin_pow += o.sin_pow;
        r.phase_pow += o.phase_pow;
        r.two_exp += o.two_exp;
        return r;
    }

    SDep subst_n(const Rat& n) const {
        SDep r;
        for (const auto& [a, p] : o_subst(gammas, n)) r.gammas.emplace(a, p);
        r.sin_pow = sin_pow;
        r.phase_pow = phase_pow;
        r.two_exp = two_exp.subst_n(n);
        return r;
    }

    auto tie() const { return std::tie(gammas, sin_pow, phase_pow, two_exp); }
    bool operator==(const SDep& o) const { return tie() == o.tie(); }
    bool operator<(const SDep& o) const { return tie() < o.tie(); }

  private:
    static std::map<Affine, int> o_subst(const std::map<Affine, int>& g, const Rat& n) {
        std::map<Affine, int> out;
        for (const auto& [a, p] : g) {
            Affine an = a.subst_n(n);
            out[an] += p;
            if (out[an] == 0) out.erase(an);
        }
        return out;
    }
};

/// Point-splitting variable content: |u|^(affine exponent) * u_{i1}...u_{ik}
/// * (ln u)^log_pow.
struct UPart {
    Affine radial;
    std::vector<Idx> mono;
    int log_pow = 0;

    bool trivial() const { return radial.is_zero() && mono.empty() && log_pow == 0; }

    /// Homogeneity degree (affine in s,n before substitution).
    Affine degree() const {
        Affine d = radial;
        d.c0 += Rat(static_cast<long long>(mono.size()));
        return d;
    }

    auto tie() const { return std::tie(radial, mono, log_pow); }
    bool operator==(const UPart& o) const { return tie() == o.tie(); }
    bool operator<(const UPart& o) const { return tie() < o.tie(); }
};

enum class FieldKind : std::uint8_t {
    A,      // gauge potential A_mu, derivs = partial multi-index
    F,      // field strength F_{mu nu}, derivs = partial multi-index
    Chi,    // formal scalar (gauge transformation tests), derivs only
    Chain,  // opaque (u.D)^(k-1)(u.A) factor
};

/// One x-dependent field factor. All factors commute.
struct Field {
    FieldKind kind = FieldKind::A;
    std::vector<Idx> derivs;  // symmetrized partial-derivative multi-index
    std::vector<Idx> idx;     // A: {mu}; F: {mu, nu}; Chi/Chain: empty
    int chain_k = 0;          // Chain: total u-degree k of the factor
    int chain_sign = +1;      // Chain: +1 ties to exp(-i Int), -1 to exp(+i Int)

    auto tie() const { return std::tie(kind, derivs, idx, chain_k, chain_sign); }
    bool operator==(const Field& o) const { return tie() == o.tie(); }
    bool operator<(const Field& o) const { return tie() < o.tie(); }
};

/// Resolvent-symbol sector: xi^2-powers, lambda powers, xi monomial and the
/// opaque denominator (xi^2 - lambda^2)^den_pow.
struct SymPart {
    int q_pow = 0;    // (xi^2)^q_pow
    int lam_pow = 0;  // lambda^lam_pow
    int den_pow = 0;  // (xi^2 - lambda^2)^(-den_pow)
    std::vector<Idx> xi;

    bool trivial() const { return q_pow == 0 && lam_pow == 0 && den_pow == 0 && xi.empty(); }

    /// (xi, lambda)-homogeneity degree.
    int degree() const { return 2 * q_pow + lam_pow - 2 * den_pow + static_cast<int>(xi.size()); }

    auto tie() const { return std::tie(q_pow, lam_pow, den_pow, xi); }
    bool operator==(const SymPart& o) const { return tie() == o.tie(); }
    bool operator<(const SymPart& o) const { return tie() < o.tie(); }
};

/// Tagged o(u^k) remainder: a term the Schwinger limit annihilates because
/// every constituent has u-degree >= min_degree > 0.
struct Remainder {
    int min_degree = 1;
    std::string label;

    auto tie() const { return std::tie(min_degree, label); }
    bool operator==(const Remainder& o) const { return tie() == o.tie(); }
    bool operator<(const Remainder& o) const { return tie() < o.tie(); }
};

/// One product term of the universal expression type.
struct Term {
    SymConst c = SymConst(1);
    SDep sdep;
    UPart u;
    std::vector<Idx> gammas;  // ordered gamma-matrix word
    std::vector<std::pair<Idx, Idx>> deltas;
    std::vector<std::array<Idx, 3>> eps;
    std::vector<Field> fields;
    SymPart sym;
    int a_pow = 0;  // auxiliary nilpotent-by-truncation variable
    std::optional<Remainder> rem;
    std::optional<std::string> opaque;  // named opaque kernel atom

    bool is_plain_scalar() const {
        return sdep.trivial() && u.trivial() && gammas.empty() && deltas.empty() && eps.empty() &&
               fields.empty() && sym.trivial() && a_pow == 0 && !rem && !opaque;
    }

    /// Product; gamma word of *this goes to the left.
    Term operator*(const Term& o) const {
        Term t;
        t.c = c * o.c;
        t.sdep = sdep * o.sdep;
        t.u.radial = u.radial + o.u.radial;
        t.u.mono = u.mono;
        t.u.mono.insert(t.u.mono.end(), o.u.mono.begin(), o.u.mono.end());
        t.u.log_pow = u.log_pow + o.u.log_pow;
        t.gammas = gammas;
        t.gammas.insert(t.gammas.end(), o.gammas.begin(), o.gammas.end());
        t.deltas = deltas;
        t.deltas.insert(t.deltas.end(), o.deltas.begin(), o.deltas.end());
        t.eps = eps;
        t.eps.insert(t.eps.end(), o.eps.begin(), o.eps.end());
        t.fields = fields;
        t.fields.insert(t.fields.end(), o.fields.begin(), o.fields.end());
        t.sym.q_pow = sym.q_pow + o.sym.q_pow;
        t.sym.lam_pow = sym.lam_pow + o.sym.lam_pow;
        t.sym.den_pow = sym.den_pow + o.sym.den_pow;
        t.sym.xi = sym.xi;
        t.sym.xi.insert(t.sym.xi.end(), o.sym.xi.begin(), o.sym.xi.end());
        t.a_pow = a_pow + o.a_pow;
        if (rem && o.rem) {
            t.rem = Remainder{rem->min_degree + o.rem->min_degree, rem->label};
        } else if (rem) {
            t.rem = rem;
        } else if (o.rem) {
            t.rem = o.rem;
        }
        if (opaque && o.opaque) throw std::logic_error("product of two opaque atoms");
        t.opaque = opaque ? opaque : o.opaque;
        return t;
    }

    /// All index slots of the term, in a fixed structural traversal order.
    /// Visitor gets mutable access (used for relabeling).
    template <typename F>
    void for_each_index(F&& f) {
        for (auto& g : gammas) f(g);
        for (auto& m : u.mono) f(m);
        for (auto& x : sym.xi) f(x);
        for (auto& fl : fields) {
            for (auto& d : fl.derivs) f(d);
            for (auto& i : fl.idx) f(i);
        }
        for (auto& d : deltas) {
            f(d.first);
            f(d.second);
        }
        for (auto& e : eps)
            for (auto& i : e) f(i);
    }
    template <typename F>
    void for_each_index(F&& f) const {
        const_cast<Term*>(this)->for_each_index([&](Idx& i) { f(static_cast<Idx>(i)); });
    }

    /// u-homogeneity degree, affine in (s, n).
    Affine u_degree() const { return u.degree(); }

    auto tie() const {
        return std::tie(sdep, u, gammas, deltas, eps, fields, sym, a_pow, rem, opaque);
    }
    /// Structural comparison ignoring the coefficient (terms with equal
    /// structure merge by adding coefficients).
    bool same_structure(const Term& o) const { return tie() == o.tie(); }
    bool structure_less(const Term& o) const { return tie() < o.tie(); }
};

/// Finite sum of terms; the universal value between all symbolic operations.
struct Expression {
    std::vector<Term> terms;

    Expression() = default;
    explicit Expression(Term t) : terms{std::move(t)} {}
    static Expression zero() { return {}; }
    static Expression one() { return Expression(Term{}); }
    static Expression constant(SymConst c) {
        Term t;
        t.c = std::move(c);
        return Expression(std::move(t));
    }

    bool is_zero() const { return terms.empty(); }

    Expression& operator+=(const Expression& o) {
        terms.insert(terms.end(), o.terms.begin(), o.terms.end());
        return *this;
    }
    Expression& operator-=(const Expression& o) {
        for (const auto& t : o.terms) {
            Term neg = t;
            neg.c = -neg.c;
            terms.push_back(std::move(neg));
        }
        return *this;
    }
    friend Expression operator+(Expression a, const Expression& b) { return a += b; }
    friend Expression operator-(Expression a, const Expression& b) { return a -= b; }
    /// Product with automatic renaming of the right factor's contraction tags
    /// so independent dummies never collide.
    friend Expression operator*(const Expression& a, const Expression& b);
    Expression operator*(const SymConst& c) const {
        Expression r = *this;
        for (auto& t : r.terms) t.c = t.c * c;
        return r;
    }
    Expression operator-() const {
        Expression r = *this;
        for (auto& t : r.terms) t.c = -t.c;
        return r;
    }

    Expression subst_n(const Rat& n) const {
        Expression r = *this;
        for (auto& t : r.terms) {
            t.c = t.c.subst_n(n);
            t.sdep = t.sdep.subst_n(n);
            t.u.radial = t.u.radial.subst_n(n);
        }
        return r;
    }

    size_t size() const { return terms.size(); }
};

/// Largest dummy id used in an expression (kFirstDummy - 1 when none).
inline Idx max_dummy(const Expression& e) {
    Idx m = kFirstDummy - 1;
    for (const auto& t : e.terms)
        t.for_each_index([&](Idx i) {
            if (is_dummy(i)) m = std::max(m, i);
        });
    return m;
}

inline Term shift_dummies(Term t, Idx offset) {
    t.for_each_index([&](Idx& i) {
        if (is_dummy(i)) i += offset;
    });
    return t;
}

/// Product without any dummy renaming: contraction tags shared between the
/// factors keep their pairing. For internal assembly only.
inline Expression raw_product(const Expression& a, const Expression& b) {
    Expression r;
    r.terms.reserve(a.terms.size() * b.terms.size());
    for (const auto& x : a.terms)
        for (const auto& y : b.terms) r.terms.push_back(x * y);
    return r;
}

inline Expression operator*(const Expression& a, const Expression& b) {
    Expression bx;
    bx.terms.reserve(b.terms.size());
    Idx ma = kFirstDummy - 1;
    for (const auto& t : a.terms)
        t.for_each_index([&](Idx i) {
            if (is_dummy(i)) ma = std::max(ma, i);
        });
    Idx offset = ma - kFirstDummy + 1;
    for (const auto& t : b.terms) bx.terms.push_back(offset > 0 ? shift_dummies(t, offset) : t);
    return raw_product(a, bx);
}

/// Validation: every dummy appears exactly twice; free labels at most once
/// per slot family is not required (free indices may repeat across tensors
/// only via explicit deltas, never silently).
inline void validate_contractions(const Term& t) {
    std::map<Idx, int> count;
    t.for_each_index([&](Idx i) {
        if (is_dummy(i)) ++count[i];
    });
    for (const auto& [i, k] : count)
        if (k != 2)
            throw std::invalid_argument("contraction tag " + index_name(i) + " appears " +
                                        std::to_string(k) + " times (expected 2)");
}

inline void validate_contractions(const Expression& e) {
    for (const auto& t : e.terms) validate_contractions(t);
}

}  // namespace kernelsmith
