#pragma once

#include "kernelsmith/gamma_algebra.hpp"
#include "kernelsmith/resolvent.hpp"
#include "kernelsmith/s_meromorphic.hpp"
#include "kernelsmith/u_structure.hpp"

#include <boost/math/constants/constants.hpp>
#include <boost/math/special_functions/zeta.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/multiprecision/cpp_complex.hpp>

#include <complex>
#include <map>
#include <random>
#include <vector>

namespace kernelsmith {

using Real100 = boost::multiprecision::cpp_bin_float_100;
using Complex100 = boost::multiprecision::cpp_complex_100;

// ---------------------------------------------------------------------------
// High-precision special functions (oracle side only; the symbolic core is
// float-free).
// ---------------------------------------------------------------------------

namespace oracle_detail {

/// Spouge's approximation with a = 64 terms; relative error far below the
/// 50-digit target. Reflection handles Re z < 1/2.
inline Complex100 spouge_gamma(const Complex100& z) {
    static const int a = 64;
    static std::vector<Real100> coef = [] {
        std::vector<Real100> c(a);
        Real100 pi = boost::math::constants::pi<Real100>();
        c[0] = sqrt(2 * pi);
        for (int k = 1; k < a; ++k) {
            Real100 ak(a - k);
            c[k] = exp(ak) * pow(ak, Real100(k) - Real100(0.5)) / Real100(k % 2 == 0 ? -1 : 1);
            for (int j = 2; j < k; ++j) c[k] /= j;
        }
        return c;
    }();
    Real100 pi = boost::math::constants::pi<Real100>();
    if (z.real() < Real100(0.5)) {
        // Gamma(z) Gamma(1-z) = pi / sin(pi z)
        Complex100 s = sin(pi * z);
        return pi / (s * spouge_gamma(Complex100(1) - z));
    }
    Complex100 zz = z - Complex100(1);
    Complex100 acc = coef[0];
    for (int k = 1; k < a; ++k) acc += coef[k] / (zz + Complex100(k));
    return pow(zz + Complex100(a), zz + Complex100(Real100(0.5))) * exp(-(zz + Complex100(a))) *
           acc;
}

inline Real100 const_pi() { return boost::math::constants::pi<Real100>(); }
inline Real100 const_ln2() { return boost::math::constants::ln_two<Real100>(); }
inline Real100 const_euler() { return boost::math::constants::euler<Real100>(); }
inline Real100 const_zeta(int k) { return boost::math::zeta(Real100(k)); }

}  // namespace oracle_detail

/// Numeric value of an exact symbolic constant (n must be substituted).
inline Complex100 symconst_eval(const SymConst& c) {
    using namespace oracle_detail;
    Complex100 total(0);
    for (const auto& [m, g] : c.terms) {
        if (m.s_pow || m.n_pow)
            throw std::invalid_argument("symconst_eval: unresolved s or n variable");
        if (m.pi_n != 0) throw std::invalid_argument("symconst_eval: n-dependent pi power");
        Real100 v(1);
        if (m.pi_c != 0)
            v *= pow(const_pi(), Real100(numer(m.pi_c).str()) / Real100(denom(m.pi_c).str()));
        for (int k = 0; k < m.ln2_pow; ++k) v *= const_ln2();
        for (int k = 0; k < m.gp1_pow; ++k) v *= -const_euler();  // Gamma'(1) = -euler
        for (int k = 0; k < m.z3_pow; ++k) v *= const_zeta(3);
        for (int k = 0; k < m.z5_pow; ++k) v *= const_zeta(5);
        for (int k = 0; k < m.z7_pow; ++k) v *= const_zeta(7);
        Complex100 coeff(Real100(numer(g.re).str()) / Real100(denom(g.re).str()),
                         Real100(numer(g.im).str()) / Real100(denom(g.im).str()));
        total += coeff * v;
    }
    return total;
}

/// Numeric value of a symbolic constant that may still carry s and n powers.
inline Complex100 symconst_eval_at(const SymConst& c, const Complex100& s, const Rat& n) {
    SymConst cn = c.subst_n(n);
    Complex100 total(0);
    for (const auto& [m, g] : cn.terms) {
        SymMono m0 = m;
        m0.s_pow = 0;
        Complex100 base = symconst_eval(SymConst::sym(m0, g));
        for (int k = 0; k < m.s_pow; ++k) base *= s;
        total += base;
    }
    return total;
}

/// High-precision evaluation of the s-dependent scalar at a point away from
/// poles; all factors are carried to >= 50 significant digits.
inline Complex100 numeric_eval(const MeroScalar& m, const Complex100& s,
                               std::optional<Rat> n = std::nullopt) {
    using namespace oracle_detail;
    Real100 pi = const_pi();
    Complex100 total = symconst_eval_at(m.c, s, n.value_or(Rat(0)));
    auto affine_at = [&](const Affine& a) -> Complex100 {
        Affine an = n ? a.subst_n(*n) : a;
        if (an.cn != 0) throw std::invalid_argument("numeric_eval: unresolved dimension");
        return Complex100(Real100(numer(an.c0).str()) / Real100(denom(an.c0).str())) +
               s * Complex100(Real100(numer(an.cs).str()) / Real100(denom(an.cs).str()));
    };
    for (const auto& [arg, p] : m.sdep.gammas) {
        Complex100 g = spouge_gamma(affine_at(arg));
        for (int k = 0; k < std::abs(p); ++k) total = p > 0 ? total * g : total / g;
    }
    if (m.sdep.sin_pow != 0) {
        Complex100 sn = sin(pi * s);
        for (int k = 0; k < std::abs(m.sdep.sin_pow); ++k)
            total = m.sdep.sin_pow > 0 ? total * sn : total / sn;
    }
    if (m.sdep.phase_pow != 0) {
        Complex100 ph = exp(Complex100(0, -1) * pi * s / 2);
        for (int k = 0; k < std::abs(m.sdep.phase_pow); ++k)
            total = m.sdep.phase_pow > 0 ? total * ph : total / ph;
    }
    if (!m.sdep.two_exp.is_zero()) total *= exp(const_ln2() * affine_at(m.sdep.two_exp));
    return total;
}

// ---------------------------------------------------------------------------
// Laurent coefficient fitting
// ---------------------------------------------------------------------------

struct PoleFit {
    std::vector<Complex100> coef;  // orders -max_order .. +max_order
    int max_order = 0;
    Real100 residual{0};
    bool well_conditioned = true;

    Complex100 at(int order) const {
        return coef.at(static_cast<size_t>(order + max_order));
    }
};

/// Fits c_{-p}/(s+1)^p + ... + c_{+p} (s+1)^p from evaluations on a geometric
/// epsilon ladder around s = -1; the far side of the ladder serves as a
/// residual check.
inline PoleFit pole_fit(const MeroScalar& m, int max_order,
                        std::optional<Rat> n = std::nullopt) {
    int unknowns = 2 * max_order + 1;
    int rows = unknowns;
    std::vector<std::vector<Complex100>> A(rows, std::vector<Complex100>(unknowns));
    std::vector<Complex100> b(rows);
    Real100 eps0("1e-6");
    for (int r = 0; r < rows; ++r) {
        Real100 eps = eps0 * pow(Real100(2), -r);
        Complex100 s = Complex100(-1) + Complex100(eps);
        b[r] = numeric_eval(m, s, n);
        for (int c = 0; c < unknowns; ++c) {
            int order = c - max_order;
            A[r][c] = pow(Complex100(eps), order);
        }
    }
    // Gaussian elimination with partial pivoting
    PoleFit fit;
    fit.max_order = max_order;
    for (int col = 0; col < unknowns; ++col) {
        int piv = col;
        for (int r = col + 1; r < rows; ++r)
            if (abs(A[r][col]) > abs(A[piv][col])) piv = r;
        std::swap(A[col], A[piv]);
        std::swap(b[col], b[piv]);
        if (abs(A[col][col]) == Real100(0)) {
            fit.well_conditioned = false;
            break;
        }
        for (int r = 0; r < rows; ++r) {
            if (r == col) continue;
            Complex100 f = A[r][col] / A[col][col];
            for (int c2 = col; c2 < unknowns; ++c2) A[r][c2] -= f * A[col][c2];
            b[r] -= f * b[col];
        }
    }
    fit.coef.assign(static_cast<size_t>(unknowns), Complex100(0));
    if (fit.well_conditioned)
        for (int c = 0; c < unknowns; ++c) fit.coef[static_cast<size_t>(c)] = b[c] / A[c][c];
    // residual at a held-out point
    Real100 eps = eps0 * pow(Real100(2), -rows);
    Complex100 s = Complex100(-1) + Complex100(eps);
    Complex100 pred(0);
    for (int c = 0; c < unknowns; ++c)
        pred += fit.coef[static_cast<size_t>(c)] * pow(Complex100(eps), c - max_order);
    Complex100 have = numeric_eval(m, s, n);
    Real100 scale = abs(have) > Real100(1) ? abs(have) : Real100(1);
    fit.residual = abs(pred - have) / scale;
    return fit;
}

// ---------------------------------------------------------------------------
// Sphere averages
// ---------------------------------------------------------------------------

struct QuadratureSpec {
    int dimension = 3;
    bool monte_carlo = false;
    std::uint64_t seed = 0;
    std::size_t samples = 1000000;
};

/// Exact mean of a monomial u_{i1}...u_{ik}/|u|^k over S^(n-1): zero for odd
/// multiplicity patterns, a double-factorial ratio otherwise.
inline Rat sphere_average_exact(const std::vector<int>& indices, int n) {
    std::map<int, int> mult;
    for (int i : indices) {
        if (i < 1 || i > n) throw std::out_of_range("sphere_average_exact: component index");
        ++mult[i];
    }
    for (const auto& [i, m] : mult)
        if (m % 2 == 1) return Rat(0);
    int M = static_cast<int>(indices.size());
    Rat num(1);
    for (const auto& [i, m] : mult) num *= Rat(double_factorial(m - 1));
    Rat den(1);
    for (int k = 0; 2 * k < M; ++k) den *= Rat(n + 2 * k);
    return num / den;
}

/// Seeded Monte-Carlo mean over the unit sphere; deterministic for a fixed
/// seed and sample count (the Gaussian sampler is hand-rolled Box-Muller on
/// the mt19937_64 stream).
inline double sphere_average_numeric(const std::vector<int>& indices, const QuadratureSpec& spec) {
    int n = spec.dimension;
    for (int i : indices)
        if (i < 1 || i > n) throw std::out_of_range("sphere_average_numeric: component index");
    std::mt19937_64 rng(spec.seed);
    auto uniform = [&]() {
        return (static_cast<double>(rng() >> 11) + 0.5) * (1.0 / 9007199254740992.0);
    };
    double acc = 0;
    std::vector<double> x(static_cast<size_t>(n));
    for (std::size_t it = 0; it < spec.samples; ++it) {
        double norm2 = 0;
        for (int k = 0; k < n; k += 2) {
            double u1 = uniform(), u2 = uniform();
            double r = std::sqrt(-2.0 * std::log(u1));
            double g1 = r * std::cos(2 * M_PI * u2), g2 = r * std::sin(2 * M_PI * u2);
            x[static_cast<size_t>(k)] = g1;
            if (k + 1 < n) x[static_cast<size_t>(k + 1)] = g2;
        }
        for (int k = 0; k < n; ++k) norm2 += x[static_cast<size_t>(k)] * x[static_cast<size_t>(k)];
        double inv = 1.0 / std::sqrt(norm2);
        double prod = 1;
        for (int i : indices) prod *= x[static_cast<size_t>(i - 1)] * inv;
        acc += prod;
    }
    return acc / static_cast<double>(spec.samples);
}

// ---------------------------------------------------------------------------
// Symbolic-vs-numeric trace crosscheck
// ---------------------------------------------------------------------------

/// Evaluates a tensor expression (deltas, epsilons, no other structure) under
/// a concrete assignment of its free labels; dummies are summed over 1..n.
inline std::complex<double> eval_tensor(const Expression& e, const std::map<Idx, int>& assignment,
                                        int n) {
    std::complex<double> total = 0;
    for (const auto& t : e.terms) {
        if (!t.gammas.empty() || !t.fields.empty() || !t.u.trivial() || !t.sym.trivial())
            throw std::invalid_argument("eval_tensor: non-tensor content");
        std::vector<Idx> dummies;
        t.for_each_index([&](Idx i) {
            if (is_dummy(i) && std::find(dummies.begin(), dummies.end(), i) == dummies.end())
                dummies.push_back(i);
        });
        std::function<double(size_t, std::map<Idx, int>&)> rec =
            [&](size_t k, std::map<Idx, int>& asg) -> double {
            if (k == dummies.size()) {
                auto val = [&](Idx i) {
                    auto it = asg.find(i);
                    if (it != asg.end()) return it->second;
                    auto jt = assignment.find(i);
                    if (jt == assignment.end())
                        throw std::invalid_argument("eval_tensor: unassigned index " +
                                                    index_name(i));
                    return jt->second;
                };
                double prod = 1;
                for (const auto& d : t.deltas) prod *= (val(d.first) == val(d.second)) ? 1 : 0;
                for (const auto& ep : t.eps) {
                    int a = val(ep[0]), b = val(ep[1]), c = val(ep[2]);
                    prod *= static_cast<double>((a - b) * (b - c) * (c - a)) / 2.0;
                }
                return prod;
            }
            double sum = 0;
            for (int v = 1; v <= n; ++v) {
                asg[dummies[k]] = v;
                sum += rec(k + 1, asg);
            }
            asg.erase(dummies[k]);
            return sum;
        };
        std::map<Idx, int> asg;
        double tensor = rec(0, asg);
        GaussianRat g = t.c.rational_part();
        if (!(SymConst(g) == t.c))
            throw std::invalid_argument("eval_tensor: non-rational coefficient");
        total += g.to_complex() * tensor;
    }
    return total;
}

// ---------------------------------------------------------------------------
// Independent route to the kernel coefficients: the verified resolvent symbol
// is pushed term by term through the ray integral and the radial Fourier
// transform, with the xi monomial realized as explicit u-derivatives. No
// auxiliary variable, no operator powers; shares nothing with the master
// formula expansion beyond the term algebra.
// ---------------------------------------------------------------------------

inline Expression master_H_via_resolvent(int l) {
    Expression c_sym = resolvent_coefficient(l);
    Expression out;
    for (const auto& t : c_sym.terms) {
        int p = t.sym.lam_pow, m = t.sym.den_pow, j = t.sym.q_pow;
        int q = static_cast<int>(t.sym.xi.size());
        Rat b0(p + 1 - 2 * m + 2 * j);  // beta = b0 + s
        Term base = t;
        base.sym = SymPart{};
        // (i/pi) e sin * i^p * (1/2) G((s+p+1)/2) G(m-(s+p+1)/2) / (m-1)!
        // * 2^beta G((n+beta)/2) / (pi^(n/2) G(-beta/2)) * u^(-n-beta) * (-i)^q
        base.sdep.sin_pow += 1;
        base.sdep.phase_pow += 1;
        base.sdep.mul_gamma(Affine(Rat(p + 1, 2), Rat(1, 2), Rat(0)));
        base.sdep.mul_gamma(Affine(Rat(m) - Rat(p + 1, 2), Rat(-1, 2), Rat(0)));
        base.sdep.mul_gamma(Affine(b0 / 2, Rat(1, 2), Rat(1, 2)));
        base.sdep.mul_gamma(Affine(-b0 / 2, Rat(-1, 2), Rat(0)), -1);
        base.sdep.two_exp += Affine(b0, Rat(1), Rat(0));
        base.u.radial += Affine(-b0, Rat(-1), Rat(-1));
        GaussianRat factor = GaussianRat::i() * GaussianRat::i_pow(p) *
                             GaussianRat::i_pow(-q) * GaussianRat(Rat(1, 2));
        base.c = base.c * SymConst::pi_pow(Rat(-1), Rat(-1, 2)) *
                 (factor * GaussianRat(Rat(1) / Rat(factorial(m - 1))));
        Expression e{base};
        for (int k = 0; k < q; ++k) e = u_derivative(e, t.sym.xi[static_cast<size_t>(k)]);
        out += e;
    }
    return canonicalize(out);
}

/// Structural comparison with numeric scalar coefficients: both sides are
/// expanded to the derivative basis, then every term's s-dependent scalar is
/// evaluated at the given point and accumulated per tensor structure.
inline bool kernel_numeric_match(const Expression& a, const Expression& b, const Complex100& s,
                                 const Rat& n, Real100 tol = Real100("1e-40")) {
    CanonOptions opt;
    opt.expand_fields = true;
    opt.dim = n;
    auto accumulate = [&](const Expression& e, std::map<std::string, Complex100>& acc, int sign) {
        Expression c = canonicalize(e, opt);
        for (const auto& t : c.terms) {
            Term probe = t;
            probe.sdep = SDep{};
            probe.c = SymConst(1);
            // radial s-dependence evaluated numerically as well
            Affine radial = probe.u.radial;
            probe.u.radial = Affine();
            std::string key = canon_detail::term_key(probe) + "|mono" +
                              std::to_string(probe.u.mono.size());
            // the radial power is evaluated at |u| = 2 so structures with
            // different exponents stay distinguishable
            if (radial.cn != 0) throw std::logic_error("kernel_numeric_match: unresolved n");
            Complex100 rexp =
                Complex100(Real100(numer(radial.c0).str()) / Real100(denom(radial.c0).str())) +
                s * Complex100(Real100(numer(radial.cs).str()) / Real100(denom(radial.cs).str()));
            Complex100 radial_val = exp(rexp * oracle_detail::const_ln2());
            Complex100 v = numeric_eval(MeroScalar{t.sdep, t.c}, s, n) * radial_val *
                           Complex100(Real100(sign));
            acc[key] += v;
        }
    };
    std::map<std::string, Complex100> acc;
    accumulate(a, acc, 1);
    accumulate(b, acc, -1);
    Real100 worst(0);
    for (const auto& [k, v] : acc) worst = std::max(worst, Real100(abs(v)));
    return worst < tol;
}

struct TraceCheckReport {
    double max_deviation = 0;
    int words_checked = 0;
    bool passed(double tol = 1e-12) const { return max_deviation < tol; }
};

/// Exhaustive symbolic-vs-numeric trace agreement over all words of length
/// <= max_len with concrete indices, for one representation.
inline TraceCheckReport trace_crosscheck(const Representation& rep, const RepClass& cls,
                                         int max_len = 4,
                                         Normalization norm = Normalization::standard()) {
    TraceCheckReport rep_out;
    int n = rep.spacetime_dim;
    std::vector<int> word;
    std::function<void(int)> go = [&](int len) {
        if (len > 0 && static_cast<int>(word.size()) == len) {
            // symbolic: build with distinct free labels, then assign
            Term t;
            std::map<Idx, int> assignment;
            for (size_t k = 0; k < word.size(); ++k) {
                Idx label = static_cast<Idx>(100 + k);  // concrete-slot labels
                t.gammas.push_back(label);
                assignment[label] = word[k];
            }
            Expression sym = trace_symbolic(Expression{t}, cls, norm, Rat(n));
            std::complex<double> s = eval_tensor(sym, assignment, n);
            std::complex<double> v = trace_numeric(word, rep);
            rep_out.max_deviation = std::max(rep_out.max_deviation, std::abs(s - v));
            ++rep_out.words_checked;
            return;
        }
        if (static_cast<int>(word.size()) == len) return;
        for (int i = 1; i <= n; ++i) {
            word.push_back(i);
            go(len);
            word.pop_back();
        }
    };
    for (int len = 0; len <= max_len; ++len) {
        if (len == 0) {
            Term t;
            Expression sym = trace_symbolic(Expression{t}, cls, norm, Rat(n));
            std::complex<double> s = eval_tensor(sym, {}, n);
            rep_out.max_deviation =
                std::max(rep_out.max_deviation, std::abs(s - std::complex<double>(rep.matrix_dim)));
            ++rep_out.words_checked;
            continue;
        }
        go(len);
    }
    return rep_out;
}

}  // namespace kernelsmith
