#pragma once

#include "kernelsmith/affine.hpp"
#include "kernelsmith/gaussian.hpp"

#include <map>
#include <stdexcept>
#include <string>
#include <tuple>

namespace kernelsmith {

/// One multiplicative symbol combination:
///   s^a * n^b * pi^(pc + pn*n) * (ln 2)^l * GammaPrime1^g * zeta3^.. zeta5^.. zeta7^..
/// GammaPrime1 stands for the derivative of the Gamma function at 1; the
/// engine never rewrites it numerically (that identity lives in the oracle).
struct SymMono {
    int s_pow = 0;
    int n_pow = 0;
    Rat pi_c{0};
    Rat pi_n{0};
    int ln2_pow = 0;
    int gp1_pow = 0;
    int z3_pow = 0;
    int z5_pow = 0;
    int z7_pow = 0;

    auto tie() const {
        return std::tie(s_pow, n_pow, pi_c, pi_n, ln2_pow, gp1_pow, z3_pow, z5_pow, z7_pow);
    }
    bool operator<(const SymMono& o) const { return tie() < o.tie(); }
    bool operator==(const SymMono& o) const { return tie() == o.tie(); }

    SymMono operator*(const SymMono& o) const {
        SymMono m;
        m.s_pow = s_pow + o.s_pow;
        m.n_pow = n_pow + o.n_pow;
        m.pi_c = pi_c + o.pi_c;
        m.pi_n = pi_n + o.pi_n;
        m.ln2_pow = ln2_pow + o.ln2_pow;
        m.gp1_pow = gp1_pow + o.gp1_pow;
        m.z3_pow = z3_pow + o.z3_pow;
        m.z5_pow = z5_pow + o.z5_pow;
        m.z7_pow = z7_pow + o.z7_pow;
        return m;
    }

    bool is_unit() const { return *this == SymMono{}; }

    std::string str() const {
        std::string out;
        auto p = [&](const std::string& sym, int e) {
            if (!e) return;
            if (!out.empty()) out += "*";
            out += sym;
            if (e != 1) out += "^" + std::to_string(e);
        };
        p("s", s_pow);
        p("n", n_pow);
        if (pi_c != 0 || pi_n != 0) {
            if (!out.empty()) out += "*";
            out += "pi^(" + Affine(pi_c, Rat(0), pi_n).str() + ")";
        }
        p("ln2", ln2_pow);
        p("Gamma'(1)", gp1_pow);
        p("zeta3", z3_pow);
        p("zeta5", z5_pow);
        p("zeta7", z7_pow);
        return out;
    }
};

/// Exact constant: finite sum of symbol monomials with Gaussian-rational
/// coefficients. Polynomial in s and n; pi may carry rational and n-affine
/// exponents.
struct SymConst {
    std::map<SymMono, GaussianRat> terms;

    SymConst() = default;
    SymConst(GaussianRat c) {
        if (!c.is_zero()) terms[SymMono{}] = std::move(c);
    }
    SymConst(Rat c) : SymConst(GaussianRat(std::move(c))) {}
    SymConst(long long c) : SymConst(GaussianRat(Rat(c))) {}

    static SymConst i() { return SymConst(GaussianRat::i()); }
    static SymConst sym(SymMono m, GaussianRat c = GaussianRat(Rat(1))) {
        SymConst x;
        if (!c.is_zero()) x.terms[m] = std::move(c);
        return x;
    }
    static SymConst pi_pow(Rat c, Rat n_coef = Rat(0)) {
        SymMono m;
        m.pi_c = std::move(c);
        m.pi_n = std::move(n_coef);
        return sym(m);
    }
    static SymConst s_var() {
        SymMono m;
        m.s_pow = 1;
        return sym(m);
    }
    static SymConst n_var() {
        SymMono m;
        m.n_pow = 1;
        return sym(m);
    }
    static SymConst ln2() {
        SymMono m;
        m.ln2_pow = 1;
        return sym(m);
    }
    static SymConst gamma_prime_1() {
        SymMono m;
        m.gp1_pow = 1;
        return sym(m);
    }
    static SymConst zeta_odd(int k) {
        SymMono m;
        if (k == 3)
            m.z3_pow = 1;
        else if (k == 5)
            m.z5_pow = 1;
        else if (k == 7)
            m.z7_pow = 1;
        else
            throw std::domain_error("zeta_odd: only 3,5,7 kept symbolic");
        return sym(m);
    }
    /// Affine c0 + cs*s + cn*n as a constant.
    static SymConst affine(const Affine& a) {
        SymConst x(GaussianRat(a.c0));
        if (a.cs != 0) x += sym(SymMono{.s_pow = 1}, GaussianRat(a.cs));
        if (a.cn != 0) x += sym(SymMono{.n_pow = 1}, GaussianRat(a.cn));
        return x;
    }

    bool is_zero() const { return terms.empty(); }
    bool is_rational() const {
        return terms.empty() || (terms.size() == 1 && terms.begin()->first.is_unit());
    }
    GaussianRat rational_part() const {
        auto it = terms.find(SymMono{});
        return it == terms.end() ? GaussianRat() : it->second;
    }

    SymConst& operator+=(const SymConst& o) {
        for (const auto& [m, c] : o.terms) {
            auto it = terms.find(m);
            if (it == terms.end()) {
                terms.emplace(m, c);
            } else {
                it->second += c;
                if (it->second.is_zero()) terms.erase(it);
            }
        }
        return *this;
    }
    SymConst& operator-=(const SymConst& o) { return *this += -o; }
    SymConst operator-() const {
        SymConst x;
        for (const auto& [m, c] : terms) x.terms[m] = -c;
        return x;
    }
    friend SymConst operator+(SymConst a, const SymConst& b) { return a += b; }
    friend SymConst operator-(SymConst a, const SymConst& b) { return a -= b; }

    SymConst operator*(const SymConst& o) const {
        SymConst x;
        for (const auto& [m1, c1] : terms)
            for (const auto& [m2, c2] : o.terms) {
                GaussianRat c = c1 * c2;
                if (c.is_zero()) continue;
                SymMono m = m1 * m2;
                auto it = x.terms.find(m);
                if (it == x.terms.end()) {
                    x.terms.emplace(std::move(m), std::move(c));
                } else {
                    it->second += c;
                    if (it->second.is_zero()) x.terms.erase(it);
                }
            }
        return x;
    }
    SymConst& operator*=(const SymConst& o) { return *this = *this * o; }
    SymConst operator*(const GaussianRat& c) const { return *this * SymConst(c); }

    /// Division by an exact Gaussian rational.
    SymConst div(const GaussianRat& c) const { return *this * c.inverse(); }

    bool operator==(const SymConst& o) const { return terms == o.terms; }
    bool operator!=(const SymConst& o) const { return !(*this == o); }
    bool operator<(const SymConst& o) const { return terms < o.terms; }

    /// Substitute a concrete dimension n.
    SymConst subst_n(const Rat& n) const {
        SymConst x;
        for (const auto& [m, c] : terms) {
            SymMono mm = m;
            GaussianRat cc = c;
            if (mm.n_pow) {
                cc *= GaussianRat(rat_pow(n, mm.n_pow));
                mm.n_pow = 0;
            }
            if (mm.pi_n != 0) {
                mm.pi_c += mm.pi_n * n;
                mm.pi_n = 0;
            }
            if (cc.is_zero()) continue;
            auto it = x.terms.find(mm);
            if (it == x.terms.end())
                x.terms.emplace(mm, cc);
            else {
                it->second += cc;
                if (it->second.is_zero()) x.terms.erase(it);
            }
        }
        return x;
    }

    /// Substitute a rational value for s.
    SymConst subst_s(const Rat& s) const {
        SymConst x;
        for (const auto& [m, c] : terms) {
            SymMono mm = m;
            GaussianRat cc = c;
            if (mm.s_pow) {
                cc *= GaussianRat(rat_pow(s, mm.s_pow));
                mm.s_pow = 0;
            }
            if (cc.is_zero()) continue;
            auto it = x.terms.find(mm);
            if (it == x.terms.end())
                x.terms.emplace(mm, cc);
            else {
                it->second += cc;
                if (it->second.is_zero()) x.terms.erase(it);
            }
        }
        return x;
    }

    int max_s_pow() const {
        int d = 0;
        for (const auto& [m, c] : terms) d = std::max(d, m.s_pow);
        return d;
    }
    int max_n_pow() const {
        int d = 0;
        for (const auto& [m, c] : terms) d = std::max(d, m.n_pow);
        return d;
    }

    /// Whether s or n appears polynomially.
    bool depends_on_s() const { return max_s_pow() > 0; }

    /// Coefficient extraction: terms with s_pow == k, with that power stripped.
    SymConst s_coefficient(int k) const {
        SymConst x;
        for (const auto& [m, c] : terms)
            if (m.s_pow == k) {
                SymMono mm = m;
                mm.s_pow = 0;
                x.terms[mm] = c;
            }
        return x;
    }

    /// Exact division by the affine c0 + cs*s + cn*n; returns quotient or
    /// nothing when not divisible.
    std::optional<SymConst> div_affine(const Affine& L) const {
        if (L.cs == 0 && L.cn == 0) {
            if (L.c0 == 0) throw std::domain_error("div_affine: zero divisor");
            return div(GaussianRat(L.c0));
        }
        bool by_s = L.cs != 0;
        GaussianRat lead(by_s ? L.cs : L.cn);
        // M = L minus its leading variable part
        SymConst M = by_s ? SymConst(GaussianRat(L.c0)) +
                                sym(SymMono{.n_pow = 1}, GaussianRat(L.cn))
                          : SymConst(GaussianRat(L.c0));
        auto var_pow = [&](const SymMono& m) { return by_s ? m.s_pow : m.n_pow; };
        SymConst R = *this, Q;
        while (!R.is_zero()) {
            int d = 0;
            for (const auto& [m, c] : R.terms) d = std::max(d, var_pow(m));
            if (d == 0) return std::nullopt;
            SymConst lead_part;
            for (const auto& [m, c] : R.terms)
                if (var_pow(m) == d) {
                    SymMono mm = m;
                    if (by_s)
                        mm.s_pow -= 1;
                    else
                        mm.n_pow -= 1;
                    lead_part.terms[mm] = c * lead.inverse();
                }
            if (lead_part.is_zero()) return std::nullopt;
            Q += lead_part;
            // R -= lead_part * L
            SymConst var = by_s ? s_var() : n_var();
            R -= lead_part * (var * SymConst(lead) + M);
            bool any_high = false;
            for (const auto& [m, c] : R.terms)
                if (var_pow(m) >= d) any_high = true;
            if (any_high) return std::nullopt;  // division stalled
            if (d == 1) break;                  // remainder now var-free
        }
        return R.is_zero() ? std::optional<SymConst>(Q) : std::nullopt;
    }

    std::string str() const {
        if (terms.empty()) return "0";
        std::string out;
        for (const auto& [m, c] : terms) {
            if (!out.empty()) out += " + ";
            if (m.is_unit()) {
                out += c.str();
            } else if (c.is_one()) {
                out += m.str();
            } else {
                out += c.str() + "*" + m.str();
            }
        }
        return out;
    }
};

}  // namespace kernelsmith
