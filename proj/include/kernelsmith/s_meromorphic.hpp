#pragma once

#include "kernelsmith/canonical.hpp"
#include "kernelsmith/symconst.hpp"
#include "kernelsmith/term.hpp"

#include <stdexcept>
#include <vector>

namespace kernelsmith {

struct PoleError : std::domain_error {
    using std::domain_error::domain_error;
};

/// zeta(k) for integer k >= 2: even values reduce to pi powers, odd values
/// stay symbolic.
inline SymConst zeta_sym(int k) {
    switch (k) {
        case 2: return SymConst::pi_pow(Rat(2)) * GaussianRat(Rat(1, 6));
        case 4: return SymConst::pi_pow(Rat(4)) * GaussianRat(Rat(1, 90));
        case 6: return SymConst::pi_pow(Rat(6)) * GaussianRat(Rat(1, 945));
        case 8: return SymConst::pi_pow(Rat(8)) * GaussianRat(Rat(1, 9450));
        case 10: return SymConst::pi_pow(Rat(10)) * GaussianRat(Rat(1, 93555));
        case 3:
        case 5:
        case 7: return SymConst::zeta_odd(k);
        default: throw std::domain_error("zeta_sym: order " + std::to_string(k) + " unsupported");
    }
}

/// Exact Gamma(c) for positive integers and half-integers (any sign).
inline SymConst exact_gamma_value(const Rat& c) {
    if (is_integer(c)) {
        if (c <= 0) throw PoleError("Gamma at nonpositive integer " + rat_str(c));
        return SymConst(GaussianRat(Rat(factorial(static_cast<int>(rat_floor(c)) - 1))));
    }
    if (denom(c) != 2) throw std::domain_error("exact_gamma_value: argument " + rat_str(c));
    long long m = static_cast<long long>(rat_floor(c));  // c = m + 1/2
    Rat r;
    if (m >= 0) {
        r = Rat(factorial(2 * static_cast<int>(m)), factorial(static_cast<int>(m))) /
            rat_pow(Rat(4), m);
    } else {
        long long k = -m;
        r = rat_pow(Rat(-4), k) * Rat(factorial(static_cast<int>(k)), 1) /
            Rat(factorial(2 * static_cast<int>(k)), 1);
    }
    return SymConst::pi_pow(Rat(1, 2)) * GaussianRat(r);
}

/// Polygamma psi^(order)(c) exactly, for rational c with denominator 1 or 2,
/// excluding nonpositive-integer arguments.
inline SymConst psi_value(int order, const Rat& c) {
    if (order < 0) throw std::domain_error("psi_value: negative order");
    if (is_integer(c) && c <= 0) throw PoleError("psi at nonpositive integer");
    SymConst base;
    Rat x;
    if (is_integer(c)) {
        if (order == 0)
            base = SymConst::gamma_prime_1();
        else
            base = zeta_sym(order + 1) *
                   GaussianRat(Rat((order % 2 == 0) ? -1 : 1) * Rat(factorial(order)));
        x = Rat(1);
    } else if (denom(c) == 2) {
        if (order == 0)
            base = SymConst::gamma_prime_1() - SymConst::ln2() * GaussianRat(Rat(2));
        else
            base = zeta_sym(order + 1) *
                   GaussianRat(Rat((order % 2 == 0) ? -1 : 1) * Rat(factorial(order)) *
                               (rat_pow(Rat(2), order + 1) - 1));
        x = Rat(1, 2);
    } else {
        throw std::domain_error("psi_value: argument " + rat_str(c));
    }
    // psi^(k)(x+1) = psi^(k)(x) + (-1)^k k! / x^(k+1)
    Rat sgn_fact = Rat((order % 2 == 0) ? 1 : -1) * Rat(factorial(order));
    while (x < c) {
        base += SymConst(GaussianRat(sgn_fact / rat_pow(x, order + 1)));
        x += 1;
    }
    while (x > c) {
        x -= 1;
        base -= SymConst(GaussianRat(sgn_fact / rat_pow(x, order + 1)));
    }
    return base;
}

/// Truncated Laurent series at s = -1 in the local variable t = s + 1.
/// Orders lo .. hi() are recorded; reading beyond the truncation throws,
/// never silently returns zero.
struct Laurent {
    int lo = 0;
    std::vector<SymConst> coef;  // empty means exact zero

    static Laurent zero() { return {}; }
    static Laurent one(int hi) {
        Laurent l;
        l.coef.assign(static_cast<size_t>(std::max(hi, 0)) + 1, SymConst(0));
        l.coef[0] = SymConst(1);
        return l;
    }

    bool is_zero() const { return coef.empty(); }
    int hi() const { return lo + static_cast<int>(coef.size()) - 1; }

    int valuation() const {
        for (size_t k = 0; k < coef.size(); ++k)
            if (!coef[k].is_zero()) return lo + static_cast<int>(k);
        return hi() + 1;
    }

    const SymConst& at(int order) const {
        static const SymConst kZero{};
        if (is_zero() || order < lo) return kZero;
        if (order > hi())
            throw std::out_of_range("Laurent: order " + std::to_string(order) +
                                    " beyond recorded truncation " + std::to_string(hi()));
        return coef[static_cast<size_t>(order - lo)];
    }

    Laurent truncated(int new_hi) const {
        if (is_zero() || new_hi >= hi()) return *this;
        Laurent l;
        l.lo = lo;
        for (int o = lo; o <= new_hi; ++o) l.coef.push_back(at(o));
        if (l.coef.empty()) return zero();
        return l;
    }

    /// Drops identically-zero leading coefficients so lo equals the valuation.
    Laurent normalized() const {
        if (is_zero()) return *this;
        int v = valuation();
        if (v == lo) return *this;
        Laurent l;
        l.lo = v;
        for (int o = v; o <= hi(); ++o) l.coef.push_back(at(o));
        return l;
    }

    Laurent operator*(const Laurent& o) const {
        if (is_zero() || o.is_zero()) return zero();
        Laurent r;
        r.lo = lo + o.lo;
        int rhi = std::min(lo + o.hi(), o.lo + hi());
        r.coef.assign(static_cast<size_t>(rhi - r.lo + 1), SymConst(0));
        for (size_t a = 0; a < coef.size(); ++a)
            for (size_t b = 0; b < o.coef.size(); ++b) {
                int order = lo + static_cast<int>(a) + o.lo + static_cast<int>(b);
                if (order > rhi) continue;
                r.coef[static_cast<size_t>(order - r.lo)] += coef[a] * o.coef[b];
            }
        return r;
    }

    Laurent operator+(const Laurent& o) const {
        if (is_zero()) return o;
        if (o.is_zero()) return *this;
        Laurent r;
        r.lo = std::min(lo, o.lo);
        int rhi = std::min(hi(), o.hi());
        if (rhi < r.lo) throw std::out_of_range("Laurent: incompatible truncations in sum");
        r.coef.assign(static_cast<size_t>(rhi - r.lo + 1), SymConst(0));
        for (int ord = r.lo; ord <= rhi; ++ord)
            r.coef[static_cast<size_t>(ord - r.lo)] = at(ord) + o.at(ord);
        return r;
    }

    Laurent operator*(const SymConst& c) const {
        Laurent r = *this;
        for (auto& x : r.coef) x = x * c;
        return r;
    }

    /// Reciprocal; the valuation coefficient must be a pure Gaussian-rational
    /// times a pi power.
    Laurent inverse() const {
        if (is_zero()) throw PoleError("Laurent: inverting zero series");
        int v = valuation();
        if (v > hi()) throw PoleError("Laurent: inverting zero-to-truncation series");
        const SymConst& lead = at(v);
        if (lead.terms.size() != 1)
            throw std::domain_error("Laurent: leading coefficient not invertible");
        SymMono lm = lead.terms.begin()->first;
        if (lm.s_pow || lm.n_pow || lm.ln2_pow || lm.gp1_pow || lm.z3_pow || lm.z5_pow ||
            lm.z7_pow)
            throw std::domain_error("Laurent: leading coefficient not invertible");
        SymMono inv_m;
        inv_m.pi_c = -lm.pi_c;
        inv_m.pi_n = -lm.pi_n;
        SymConst lead_inv = SymConst::sym(inv_m, lead.terms.begin()->second.inverse());

        int depth = hi() - v;
        Laurent xs;  // tail/lead, relative valuation >= 1
        xs.lo = 1;
        xs.coef.assign(static_cast<size_t>(std::max(depth, 0)), SymConst(0));
        for (int k = 1; k <= depth; ++k) xs.coef[static_cast<size_t>(k - 1)] = at(v + k) * lead_inv;
        Laurent geom = Laurent::one(depth);
        Laurent pw = Laurent::one(depth);
        for (int j = 1; j <= depth; ++j) {
            pw = (pw * xs).truncated(depth);
            geom = geom + (j % 2 == 1 ? pw * SymConst(GaussianRat(Rat(-1))) : pw);
            if (pw.is_zero()) break;
        }
        Laurent r = geom * lead_inv;
        r.lo -= v;
        return r;
    }
};

namespace laurent_detail {

/// exp of a series with valuation >= 1, truncated at hi.
inline Laurent exp_series(const Laurent& s, int hi) {
    if (!s.is_zero() && s.valuation() < 1)
        throw std::logic_error("exp_series: argument must vanish at t = 0");
    Laurent out = Laurent::one(hi);
    Laurent pw = Laurent::one(hi);
    Rat fact(1);
    for (int j = 1; j <= hi; ++j) {
        pw = (pw * s).truncated(hi);
        if (pw.is_zero() || pw.valuation() > hi) break;
        fact *= j;
        out = out + pw * SymConst(GaussianRat(Rat(1) / fact));
    }
    return out;
}

/// log Gamma(1 + sigma t) as a series: gp1*(sigma t) + sum_{k>=2} (-1)^k zeta(k) (sigma t)^k / k.
inline Laurent log_gamma_one_plus(const Rat& sigma, int hi) {
    Laurent s;
    s.lo = 1;
    s.coef.assign(static_cast<size_t>(std::max(hi, 0)), SymConst(0));
    Rat sp = sigma;
    for (int k = 1; k <= hi; ++k) {
        if (k == 1)
            s.coef[0] = SymConst::gamma_prime_1() * GaussianRat(sp);
        else
            s.coef[static_cast<size_t>(k - 1)] =
                zeta_sym(k) * GaussianRat(Rat(k % 2 == 0 ? 1 : -1) * sp / Rat(k));
        sp *= sigma;
    }
    return s;
}

/// Gamma(c + sigma t) to order hi.
inline Laurent gamma_series(const Rat& c, const Rat& sigma, int hi) {
    if (sigma == 0) return Laurent::one(std::max(hi, 0)) * exact_gamma_value(c);
    bool pole = is_integer(c) && c <= 0;
    if (!pole) {
        Laurent s;
        s.lo = 1;
        s.coef.assign(static_cast<size_t>(std::max(hi, 0)), SymConst(0));
        Rat sp = sigma, fact(1);
        for (int k = 1; k <= hi; ++k) {
            fact *= k;
            s.coef[static_cast<size_t>(k - 1)] = psi_value(k - 1, c) * GaussianRat(sp / fact);
            sp *= sigma;
        }
        return exp_series(s, hi) * exact_gamma_value(c);
    }
    // Gamma(-m + sigma t) = Gamma(1 + sigma t) / (sigma t * prod_{j=1..m} (sigma t - j))
    long long m = -static_cast<long long>(rat_floor(c));
    int inner_hi = hi + 1;
    Laurent num = exp_series(log_gamma_one_plus(sigma, inner_hi), inner_hi);
    for (long long j = 1; j <= m; ++j) {
        Laurent f;  // 1/(sigma t - j) = -(1/j) sum_k (sigma/j)^k t^k
        f.coef.assign(static_cast<size_t>(inner_hi + 1), SymConst(0));
        Rat p = Rat(-1) / Rat(j);
        for (int k = 0; k <= inner_hi; ++k) {
            f.coef[static_cast<size_t>(k)] = SymConst(GaussianRat(p));
            p *= sigma / Rat(j);
        }
        num = (num * f).truncated(inner_hi);
    }
    Laurent r = num * SymConst(GaussianRat(Rat(1) / sigma));
    r.lo -= 1;
    return r.truncated(hi);
}

/// sin(pi s) = -sin(pi t) around s = -1, to order hi.
inline Laurent sin_pi_s_series(int hi) {
    Laurent s;
    s.lo = 1;
    s.coef.assign(static_cast<size_t>(std::max(hi, 0)), SymConst(0));
    Rat fact(1);
    for (int k = 1; k <= hi; ++k) {
        fact *= k;
        if (k % 2 == 1) {
            Rat sign((k / 2) % 2 == 0 ? -1 : 1);
            s.coef[static_cast<size_t>(k - 1)] =
                SymConst::pi_pow(Rat(k)) * GaussianRat(sign / fact);
        }
    }
    return s;
}

/// exp(-i pi s / 2) = i * sum_k (-i pi / 2)^k t^k / k! around s = -1.
inline Laurent phase_series(int hi) {
    Laurent s;
    s.coef.assign(static_cast<size_t>(std::max(hi, 0)) + 1, SymConst(0));
    GaussianRat acc(Rat(1));
    Rat fact(1);
    for (int k = 0; k <= hi; ++k) {
        if (k > 0) {
            acc *= GaussianRat(Rat(0), Rat(-1, 2));
            fact *= k;
        }
        s.coef[static_cast<size_t>(k)] =
            SymConst::pi_pow(Rat(k)) * (acc * GaussianRat(Rat(1) / fact));
    }
    return s * SymConst::i();
}

inline Laurent laurent_pow(const Laurent& base, int p, int hi) {
    if (p == 0) return Laurent::one(std::max(hi, 0));
    Laurent b = p > 0 ? base : base.inverse();
    int k = p > 0 ? p : -p;
    Laurent out = b;
    for (int j = 1; j < k; ++j) out = out * b;
    return out;
}

/// Polynomial-in-s constant as a series in t = s + 1.
inline Laurent poly_series(const SymConst& C, int hi) {
    Laurent s;
    s.coef.assign(static_cast<size_t>(std::max(hi, 0)) + 1, SymConst(0));
    for (const auto& [m, c] : C.terms) {
        int k = m.s_pow;
        SymMono base = m;
        base.s_pow = 0;
        // s^k = (t - 1)^k
        Rat binom(1);
        for (int j = 0; j <= k; ++j) {
            if (j > 0) binom = binom * Rat(k - j + 1) / Rat(j);
            if (j > hi) break;
            Rat sign((k - j) % 2 == 0 ? 1 : -1);
            s.coef[static_cast<size_t>(j)] += SymConst::sym(base, c * GaussianRat(sign * binom));
        }
    }
    return s;
}

}  // namespace laurent_detail

/// The s-dependent scalar of the engine: structured factors and an exact
/// constant that may be polynomial in s.
struct MeroScalar {
    SDep sdep;
    SymConst c = SymConst(1);

    MeroScalar() = default;
    MeroScalar(SDep s, SymConst k) : sdep(std::move(s)), c(std::move(k)) {}
    MeroScalar operator*(const MeroScalar& o) const { return {sdep * o.sdep, c * o.c}; }
};

/// Structural pole order at s = -1; negative values report a zero of that
/// order. Requires n already substituted.
inline int pole_order_at_minus_one(const MeroScalar& m) {
    if (m.c.is_zero()) return 0;
    int min_order = 0;
    for (const auto& [arg, p] : m.sdep.gammas) {
        if (arg.cn != 0) throw std::logic_error("pole order with symbolic n");
        Rat v = arg.eval_s(Rat(-1));
        if (is_integer(v) && v <= 0) {
            if (arg.cs == 0) throw PoleError("constant Gamma factor at a pole");
            min_order -= p;
        }
    }
    min_order += m.sdep.sin_pow;
    SymConst shifted = m.c;
    while (!shifted.is_zero() && shifted.subst_s(Rat(-1)).is_zero()) {
        auto q = shifted.div_affine(Affine(Rat(1), Rat(1), Rat(0)));
        if (!q) break;
        shifted = *q;
        ++min_order;
    }
    return -min_order;
}

/// Laurent expansion at s = -1 carrying GammaPrime1, ln 2, pi and odd zeta
/// values symbolically; recorded orders run from the exact valuation to `hi`.
inline Laurent laurent_at_minus_one(const MeroScalar& m, int hi) {
    using namespace laurent_detail;
    if (m.c.is_zero()) return Laurent::zero();
    int V = -pole_order_at_minus_one(m);  // valuation of the product
    int depth = hi - V;
    if (depth < 0) {
        Laurent l;  // zero through the requested truncation
        l.lo = hi + 1;
        return l;
    }
    Laurent acc = Laurent::one(depth);
    for (const auto& [arg, p] : m.sdep.gammas) {
        Rat c0 = arg.eval_s(Rat(-1));
        int v1 = (is_integer(c0) && c0 <= 0) ? -1 : 0;
        Laurent g = gamma_series(c0, arg.cs, v1 + depth + (p < 0 ? 1 : 0));
        acc = acc * laurent_pow(g, p, depth);
    }
    if (m.sdep.sin_pow != 0)
        acc = acc * laurent_pow(sin_pi_s_series(1 + depth), m.sdep.sin_pow, depth);
    if (m.sdep.phase_pow != 0)
        acc = acc * laurent_pow(phase_series(depth), m.sdep.phase_pow, depth);
    if (!m.sdep.two_exp.is_zero()) {
        const Affine& e = m.sdep.two_exp;
        if (e.cn != 0) throw std::logic_error("two-power exponent with symbolic n");
        Rat base_exp = e.c0 - e.cs;
        if (!is_integer(base_exp))
            throw std::domain_error("two-power with non-integer exponent at s = -1");
        SymConst base(GaussianRat(rat_pow(Rat(2), static_cast<long long>(rat_floor(base_exp)))));
        Laurent ex;  // exp(cs * ln2 * t)
        ex.coef.assign(static_cast<size_t>(depth) + 1, SymConst(0));
        SymConst acc2 = base;
        Rat fact(1);
        for (int k = 0; k <= depth; ++k) {
            if (k > 0) {
                fact *= k;
                acc2 = acc2 * (SymConst::ln2() * GaussianRat(e.cs));
            }
            ex.coef[static_cast<size_t>(k)] = acc2 * GaussianRat(Rat(1) / fact);
        }
        acc = acc * ex;
    }
    acc = acc * poly_series(m.c, m.c.max_s_pow() + depth).normalized();
    return acc.truncated(hi);
}

inline SymConst finite_part(const MeroScalar& m, int extra_order = 1) {
    return laurent_at_minus_one(m, extra_order).at(0);
}

inline SymConst residue(const MeroScalar& m) { return laurent_at_minus_one(m, 0).at(-1); }

// ---------------------------------------------------------------------------
// Gamma-form normalization. Gamma factors related by the recurrence
// z Gamma(z) = Gamma(z+1) admit many equivalent writings; comparison lowers
// all arguments within a recurrence class to the least one present (picking
// up Pochhammer polynomials), display absorbs affine coefficient factors back
// into raised arguments.
// ---------------------------------------------------------------------------

namespace gamma_form_detail {

struct ClassKey {
    Rat cs, cn, frac;  // integer-step recurrence class
    auto tie() const { return std::tie(cs, cn, frac); }
    bool operator<(const ClassKey& o) const { return tie() < o.tie(); }
};

inline ClassKey class_of(const Affine& arg) {
    Rat f = arg.c0 - Rat(rat_floor(arg.c0));
    return {arg.cs, arg.cn, f};
}

}  // namespace gamma_form_detail

/// Lowers every positive-power Gamma argument to the least member of its
/// recurrence class present in the expression; exact, merge-friendly form.
inline Expression lower_gamma_forms(const Expression& e) {
    using gamma_form_detail::ClassKey;
    using gamma_form_detail::class_of;
    std::map<ClassKey, Rat> least;
    for (const auto& t : e.terms)
        for (const auto& [arg, p] : t.sdep.gammas) {
            if (p <= 0) continue;
            ClassKey k = class_of(arg);
            auto it = least.find(k);
            if (it == least.end() || arg.c0 < it->second) least[k] = arg.c0;
        }
    Expression out;
    for (const auto& t : e.terms) {
        Term r = t;
        std::map<Affine, int> lowered;
        for (const auto& [arg, p] : t.sdep.gammas) {
            if (p <= 0) {
                lowered[arg] += p;
                continue;
            }
            Rat base_c0 = least.at(class_of(arg));
            Rat steps = arg.c0 - base_c0;
            if (!is_integer(steps)) throw std::logic_error("gamma class with non-integer step");
            long long m = static_cast<long long>(rat_floor(steps));
            Affine base = arg;
            base.c0 = base_c0;
            lowered[base] += p;
            // Gamma(base + m) = Gamma(base) * prod_{j=0..m-1} (base + j)
            for (int rep = 0; rep < p; ++rep)
                for (long long j = 0; j < m; ++j) {
                    Affine f = base;
                    f.c0 += Rat(j);
                    r.c = r.c * SymConst::affine(f);
                }
        }
        r.sdep.gammas.clear();
        for (const auto& [arg, p] : lowered)
            if (p != 0) r.sdep.gammas.emplace(arg, p);
        out.terms.push_back(std::move(r));
    }
    return out;
}

/// Display normalization: absorbs affine coefficient factors into Gamma
/// arguments via z Gamma(z) = Gamma(z+1), maximally and deterministically.
inline Expression absorb_gamma_factors(const Expression& e) {
    Expression out;
    for (const auto& t : e.terms) {
        Term r = t;
        bool changed = true;
        while (changed) {
            changed = false;
            for (auto it = r.sdep.gammas.begin(); it != r.sdep.gammas.end(); ++it) {
                if (it->second <= 0) continue;
                const Affine& g = it->first;
                if (g.cs == 0 && g.cn == 0) continue;
                auto q = r.c.div_affine(Affine(g.c0 * 2, g.cs * 2, g.cn * 2));
                if (!q) continue;
                r.c = *q * GaussianRat(Rat(2));
                Affine raised = g;
                raised.c0 += 1;
                int p = it->second;
                if (p == 1)
                    r.sdep.gammas.erase(it);
                else
                    it->second = p - 1;
                r.sdep.mul_gamma(raised, 1);
                changed = true;
                break;
            }
        }
        out.terms.push_back(std::move(r));
    }
    return out;
}

/// Equality after lowering Gamma forms to a shared basis and expanding all
/// field shorthands.
inline bool expressions_equal_mero(const Expression& a, const Expression& b,
                                   CanonOptions opt = {}) {
    opt.expand_fields = true;
    Expression diff = canonicalize(lower_gamma_forms(a - b), opt);
    return diff.is_zero();
}

}  // namespace kernelsmith
