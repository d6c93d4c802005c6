#pragma once

#include "kernelsmith/canonical.hpp"

#include <cmath>
#include <complex>
#include <string>
#include <vector>

namespace kernelsmith {

struct TraceRuleError : std::domain_error {
    using std::domain_error::domain_error;
};

/// Clifford normalization gamma_a gamma_b + gamma_b gamma_a = c delta_ab.
/// `standard` (c = 2) is the default; `literal_paper` (c = 1) is retained for
/// the documented inconsistency check in the verification suite: with c = 1
/// the resolvent inverse -(xi-slash - lambda)/(xi^2 - lambda^2) fails.
struct Normalization {
    Rat c{2};
    static Normalization standard() { return {Rat(2)}; }
    static Normalization literal_paper() { return {Rat(1)}; }
    bool operator==(const Normalization& o) const { return c == o.c; }
};

/// Canonical reduction of gamma content under the given normalization.
inline Expression clifford_reduce(const Expression& e, Normalization norm = Normalization::standard(),
                                  std::optional<Rat> dim = std::nullopt) {
    CanonOptions opt;
    opt.clifford_c = norm.c;
    opt.dim = dim;
    return canonicalize(e, opt);
}

// ---------------------------------------------------------------------------
// Symbolic traces
// ---------------------------------------------------------------------------

enum class RepClassKind : std::uint8_t {
    GenericEven,   // even words by Wick pairing, odd words vanish
    Pauli3,        // 2x2 three-dimensional: full product recursion with epsilon
    OddVanishing,  // reducible representation: odd traces vanish identically
    Custom,        // explicit bounded rule table
};

struct RepClass {
    RepClassKind kind = RepClassKind::GenericEven;
    int d = 4;            // matrix dimension (trace of the identity)
    int max_len = -1;     // Custom: largest word length with a rule
    std::string name = "generic-even";

    static RepClass generic_even(int d) { return {RepClassKind::GenericEven, d, -1, "generic-even"}; }
    static RepClass pauli3() { return {RepClassKind::Pauli3, 2, -1, "pauli3"}; }
    static RepClass odd_vanishing(int d) {
        return {RepClassKind::OddVanishing, d, -1, "odd-vanishing"};
    }
    static RepClass custom(int d, int max_len) { return {RepClassKind::Custom, d, max_len, "custom"}; }
};

namespace gamma_detail {

/// Wick pairing sum for an even word; returns the tensor sum without the
/// overall trace-of-identity factor. Pair weight c/2.
inline Expression wick_pairs(const std::vector<Idx>& word, const Rat& half_c) {
    if (word.empty()) return Expression::one();
    if (word.size() % 2 != 0) return Expression::zero();
    Expression out;
    for (size_t j = 1; j < word.size(); ++j) {
        std::vector<Idx> rest;
        for (size_t k = 1; k < word.size(); ++k)
            if (k != j) rest.push_back(word[k]);
        Expression sub = wick_pairs(rest, half_c);
        Term pair;
        pair.deltas.push_back({word[0], word[j]});
        pair.c = SymConst(GaussianRat((j % 2 == 1 ? half_c : -half_c)));
        out += raw_product(Expression(pair), sub);
    }
    return out;
}

/// Pauli product recursion tr(s_a s_b R) = d_ab tr(R) + i eps_{a b e} tr(s_e R).
inline Expression pauli_trace(const std::vector<Idx>& word, DummyAlloc& alloc) {
    if (word.empty()) return Expression::constant(SymConst(2));
    if (word.size() == 1) return Expression::zero();
    std::vector<Idx> rest(word.begin() + 2, word.end());
    Expression first;
    {
        Term d;
        d.deltas.push_back({word[0], word[1]});
        first = raw_product(Expression(d), pauli_trace(rest, alloc));
    }
    Expression second;
    {
        Idx e = alloc.fresh();
        Term epsilon;
        epsilon.eps.push_back({word[0], word[1], e});
        epsilon.c = SymConst::i();
        std::vector<Idx> tail;
        tail.push_back(e);
        tail.insert(tail.end(), rest.begin(), rest.end());
        second = raw_product(Expression(epsilon), pauli_trace(tail, alloc));
    }
    return first + second;
}

}  // namespace gamma_detail

/// Trace of a bare gamma word as a tensor expression (deltas, epsilons).
inline Expression trace_word(const std::vector<Idx>& word, const RepClass& cls,
                             Normalization norm, DummyAlloc& alloc) {
    using namespace gamma_detail;
    switch (cls.kind) {
        case RepClassKind::GenericEven:
        case RepClassKind::OddVanishing: {
            if (word.size() % 2 != 0) return Expression::zero();
            Expression pairs = wick_pairs(word, norm.c / 2);
            return pairs * SymConst(cls.d);
        }
        case RepClassKind::Pauli3: {
            if (norm.c != 2)
                throw TraceRuleError(
                    "pauli3 trace rules require the standard normalization (c = 2)");
            return pauli_trace(word, alloc);
        }
        case RepClassKind::Custom: {
            if (static_cast<int>(word.size()) > cls.max_len)
                throw TraceRuleError("no trace rule for gamma word of length " +
                                     std::to_string(word.size()) + " in class '" + cls.name + "'");
            if (word.size() % 2 != 0) return Expression::zero();
            Expression pairs = wick_pairs(word, norm.c / 2);
            return pairs * SymConst(cls.d);
        }
    }
    throw std::logic_error("unreachable");
}

/// Replaces every gamma word in `e` by its trace under the representation
/// class; pre-reduces the gamma content first.
inline Expression trace_symbolic(const Expression& e, const RepClass& cls,
                                 Normalization norm = Normalization::standard(),
                                 std::optional<Rat> dim = std::nullopt) {
    Expression reduced = clifford_reduce(e, norm, dim);
    DummyAlloc alloc{max_dummy(reduced) + 1};
    Expression out;
    for (const auto& t : reduced.terms) {
        if (t.gammas.empty()) {
            Term scalar = t;
            scalar.c = scalar.c * SymConst(cls.d);
            out.terms.push_back(std::move(scalar));
            continue;
        }
        Expression tr = trace_word(t.gammas, cls, norm, alloc);
        Term rest = t;
        rest.gammas.clear();
        out += raw_product(Expression(rest), tr);
    }
    return clifford_reduce(out, norm, dim);
}

// ---------------------------------------------------------------------------
// Explicit representations and numeric traces
// ---------------------------------------------------------------------------

using CMat = std::vector<std::vector<std::complex<double>>>;

inline CMat cmat_identity(int d) {
    CMat m(d, std::vector<std::complex<double>>(d));
    for (int i = 0; i < d; ++i) m[i][i] = 1.0;
    return m;
}

inline CMat cmat_mul(const CMat& a, const CMat& b) {
    int d = static_cast<int>(a.size());
    CMat c(d, std::vector<std::complex<double>>(d));
    for (int i = 0; i < d; ++i)
        for (int k = 0; k < d; ++k) {
            auto aik = a[i][k];
            if (aik == std::complex<double>(0)) continue;
            for (int j = 0; j < d; ++j) c[i][j] += aik * b[k][j];
        }
    return c;
}

inline std::complex<double> cmat_trace(const CMat& m) {
    std::complex<double> t = 0;
    for (size_t i = 0; i < m.size(); ++i) t += m[i][i];
    return t;
}

/// A concrete gamma-matrix realization.
struct Representation {
    std::string name;
    int spacetime_dim = 0;
    int matrix_dim = 0;
    std::vector<CMat> matrices;

    /// Max deviation from the anticommutator normalization and hermiticity.
    double validate(const Normalization& norm = Normalization::standard()) const {
        double dev = 0;
        double c = static_cast<double>(norm.c);
        for (int a = 0; a < spacetime_dim; ++a) {
            for (int i = 0; i < matrix_dim; ++i)
                for (int j = 0; j < matrix_dim; ++j)
                    dev = std::max(dev, std::abs(matrices[a][i][j] - std::conj(matrices[a][j][i])));
            for (int b = 0; b < spacetime_dim; ++b) {
                CMat ab = cmat_mul(matrices[a], matrices[b]);
                CMat ba = cmat_mul(matrices[b], matrices[a]);
                for (int i = 0; i < matrix_dim; ++i)
                    for (int j = 0; j < matrix_dim; ++j) {
                        std::complex<double> want = (a == b && i == j) ? c : 0.0;
                        dev = std::max(dev, std::abs(ab[i][j] + ba[i][j] - want));
                    }
            }
        }
        return dev;
    }
};

/// Matrix trace of an explicit gamma word; indices are concrete values 1..n.
inline std::complex<double> trace_numeric(const std::vector<int>& word, const Representation& rep) {
    CMat prod = cmat_identity(rep.matrix_dim);
    for (int i : word) {
        if (i < 1 || i > rep.spacetime_dim)
            throw std::out_of_range("gamma index " + std::to_string(i) + " out of range for '" +
                                    rep.name + "'");
        prod = cmat_mul(prod, rep.matrices[i - 1]);
    }
    return cmat_trace(prod);
}

namespace builtin {

inline CMat sigma1() { return {{0, 1}, {1, 0}}; }
inline CMat sigma2() {
    return {{0, std::complex<double>(0, -1)}, {std::complex<double>(0, 1), 0}};
}
inline CMat sigma3() { return {{1, 0}, {0, -1}}; }

inline Representation pauli2() { return {"pauli2", 2, 2, {sigma1(), sigma2()}}; }
inline Representation pauli3() { return {"pauli3", 3, 2, {sigma1(), sigma2(), sigma3()}}; }

/// Block-diagonal diag(sigma_a, -sigma_a): odd traces vanish identically.
inline Representation reducible4() {
    auto block = [](const CMat& s) {
        CMat m(4, std::vector<std::complex<double>>(4));
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) {
                m[i][j] = s[i][j];
                m[i + 2][j + 2] = -s[i][j];
            }
        return m;
    };
    return {"reducible4", 3, 4, {block(sigma1()), block(sigma2()), block(sigma3())}};
}

/// Standard Euclidean 4x4 set: gamma_j = offdiag(-i s_j, i s_j), gamma_4 = offdiag(1, 1).
inline Representation dirac4() {
    auto off = [](const CMat& s, std::complex<double> upper, std::complex<double> lower) {
        CMat m(4, std::vector<std::complex<double>>(4));
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) {
                m[i][j + 2] = upper * s[i][j];
                m[i + 2][j] = lower * s[i][j];
            }
        return m;
    };
    std::complex<double> mi(0, -1), pi_(0, 1);
    Representation r{"dirac4", 4, 4, {}};
    r.matrices = {off(sigma1(), mi, pi_), off(sigma2(), mi, pi_), off(sigma3(), mi, pi_),
                  off(cmat_identity(2), 1, 1)};
    return r;
}

}  // namespace builtin

/// Built-in representation by name; throws on unknown names.
inline Representation builtin_representation(const std::string& name) {
    if (name == "pauli2") return builtin::pauli2();
    if (name == "pauli3" || name == "pauli") return builtin::pauli3();
    if (name == "reducible4") return builtin::reducible4();
    if (name == "dirac4") return builtin::dirac4();
    throw std::invalid_argument("unknown built-in representation '" + name + "'");
}

/// Trace rule class appropriate for a built-in or validated representation.
inline RepClass rep_class_for(const Representation& rep) {
    if (rep.name == "pauli3" || rep.name == "pauli") return RepClass::pauli3();
    if (rep.name == "pauli2") return RepClass::generic_even(2);
    if (rep.name == "reducible4") return RepClass::odd_vanishing(4);
    if (rep.name == "dirac4") return RepClass::generic_even(4);
    // user representations: vanishing odd traces make the generic rules valid
    double odd_dev = 0;
    for (int a = 1; a <= rep.spacetime_dim; ++a) {
        odd_dev = std::max(odd_dev, std::abs(trace_numeric({a}, rep)));
        for (int b = 1; b <= rep.spacetime_dim; ++b)
            for (int c = 1; c <= rep.spacetime_dim; ++c)
                odd_dev = std::max(odd_dev, std::abs(trace_numeric({a, b, c}, rep)));
    }
    if (odd_dev < 1e-12) return RepClass::odd_vanishing(rep.matrix_dim);
    if (rep.spacetime_dim == 3 && rep.matrix_dim == 2) return RepClass::pauli3();
    throw TraceRuleError("no symbolic trace rule class for representation '" + rep.name + "'");
}

}  // namespace kernelsmith
