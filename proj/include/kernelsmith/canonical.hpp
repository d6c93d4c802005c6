#pragma once

#include "kernelsmith/term.hpp"

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

namespace kernelsmith {

struct CanonOptions {
    Rat clifford_c{2};          // gamma_a gamma_b + gamma_b gamma_a = c delta_ab
    bool expand_fields = false;  // equality basis: F -> dA, chains expanded
    std::optional<Rat> dim;      // concrete dimension, else deltas trace to symbolic n
};

namespace canon_detail {

// Coarse sector code of a slot, used in label-free comparisons.
enum Sector : std::uint8_t {
    kSecFree = 0,
    kSecU = 1,
    kSecXi = 2,
    kSecGamma = 3,
    kSecEps = 4,
    kSecFld = 5,
    kSecNone = 6,
};

struct SlotRef {
    Sector sector = kSecNone;
    int a = 0, b = 0;  // sector detail (word position, field number + slot role, ...)
};

/// All occurrences of index i in a term, excluding gamma word position skip_pos.
inline std::vector<SlotRef> find_slots(const Term& t, Idx i, int skip_gamma_pos = -1) {
    std::vector<SlotRef> out;
    for (int p = 0; p < static_cast<int>(t.gammas.size()); ++p)
        if (t.gammas[p] == i && p != skip_gamma_pos) out.push_back({kSecGamma, p, 0});
    for (auto m : t.u.mono)
        if (m == i) out.push_back({kSecU, 0, 0});
    for (auto x : t.sym.xi)
        if (x == i) out.push_back({kSecXi, 0, 0});
    for (int f = 0; f < static_cast<int>(t.fields.size()); ++f) {
        const Field& fl = t.fields[f];
        for (auto d : fl.derivs)
            if (d == i) out.push_back({kSecFld, f, 0});
        for (int k = 0; k < static_cast<int>(fl.idx.size()); ++k)
            if (fl.idx[k] == i) out.push_back({kSecFld, f, k + 1});
    }
    for (int e = 0; e < static_cast<int>(t.eps.size()); ++e)
        for (int k = 0; k < 3; ++k)
            if (t.eps[e][k] == i) out.push_back({kSecEps, e, k});
    for (const auto& d : t.deltas) {
        if (d.first == i) out.push_back({kSecNone, -1, 0});
        if (d.second == i) out.push_back({kSecNone, -1, 1});
    }
    return out;
}

/// Label-free ordering tag of one gamma-word slot.
struct SlotTag {
    int cls = 0;  // 0 free, 1 u, 2 xi, 3 field, 4 eps
    Idx free_label = 0;
    // field partner details
    int fkind = 0, nderivs = 0, nidx = 0, chain_k = 0, role = 0;
    std::vector<int> peers;  // coarse sectors of the partner field's other slots

    auto tie() const { return std::tie(cls, free_label, fkind, nderivs, nidx, chain_k, role, peers); }
    bool operator<(const SlotTag& o) const { return tie() < o.tie(); }
    bool operator==(const SlotTag& o) const { return tie() == o.tie(); }
};

/// Label-free descriptor of an index: 0 for free, else the sorted pair of
/// sectors its two occurrences live in.
inline int coarse_pair(const Term& t, Idx i) {
    if (!is_dummy(i)) return 0;
    auto slots = find_slots(t, i, -1);
    int a = slots.empty() ? kSecNone : slots[0].sector;
    int b = slots.size() > 1 ? slots[1].sector : kSecNone;
    if (a > b) std::swap(a, b);
    return 1 + a * 8 + b;
}

inline SlotTag slot_tag(const Term& t, int word_pos) {
    Idx i = t.gammas[word_pos];
    SlotTag tag;
    if (!is_dummy(i)) {
        tag.cls = 0;
        tag.free_label = i;
        return tag;
    }
    auto slots = find_slots(t, i, word_pos);
    if (slots.empty()) throw std::logic_error("slot_tag: unpaired dummy in gamma word");
    const SlotRef& s = slots.front();
    switch (s.sector) {
        case kSecU: tag.cls = 1; break;
        case kSecXi: tag.cls = 2; break;
        case kSecFld: {
            tag.cls = 3;
            const Field& f = t.fields[s.a];
            tag.fkind = static_cast<int>(f.kind);
            tag.nderivs = static_cast<int>(f.derivs.size());
            tag.nidx = static_cast<int>(f.idx.size());
            tag.chain_k = f.chain_k;
            tag.role = s.b;
            // peer descriptors of the field's other slots (i occurs once here)
            for (auto d : f.derivs)
                if (d != i) tag.peers.push_back(coarse_pair(t, d));
            for (auto x : f.idx)
                if (x != i) tag.peers.push_back(coarse_pair(t, x));
            std::sort(tag.peers.begin(), tag.peers.end());
            break;
        }
        case kSecEps:
            throw std::logic_error("gamma slot contracted into epsilon during word sort");
        case kSecGamma:
            throw std::logic_error("in-word contraction reached the word sort");
        default:
            throw std::logic_error("gamma slot contracted into delta during word sort");
    }
    return tag;
}

/// Whether the term is invariant under swapping dummies a <-> b outside the
/// gamma word (word positions pa, pb excluded).
inline bool symmetric_under_swap(const Term& t, Idx a, Idx b, int pa, int pb) {
    Term s = t;
    int pos = 0;
    s.for_each_index([&](Idx& i) { (void)i; ++pos; });
    // swap everywhere except the two word positions
    for (int p = 0; p < static_cast<int>(s.gammas.size()); ++p) {
        if (p == pa || p == pb) continue;
        if (s.gammas[p] == a)
            s.gammas[p] = b;
        else if (s.gammas[p] == b)
            s.gammas[p] = a;
    }
    auto swap_in = [&](std::vector<Idx>& v) {
        for (auto& i : v) {
            if (i == a)
                i = b;
            else if (i == b)
                i = a;
        }
    };
    swap_in(s.u.mono);
    swap_in(s.sym.xi);
    for (auto& f : s.fields) {
        swap_in(f.derivs);
        swap_in(f.idx);
    }
    for (auto& d : s.deltas) {
        if (d.first == a)
            d.first = b;
        else if (d.first == b)
            d.first = a;
        if (d.second == a)
            d.second = b;
        else if (d.second == b)
            d.second = a;
    }
    for (auto& e : s.eps)
        for (auto& i : e) {
            if (i == a)
                i = b;
            else if (i == b)
                i = a;
        }
    // compare commutative content as multisets
    auto norm = [](Term x) {
        std::sort(x.u.mono.begin(), x.u.mono.end());
        std::sort(x.sym.xi.begin(), x.sym.xi.end());
        for (auto& f : x.fields) std::sort(f.derivs.begin(), f.derivs.end());
        std::sort(x.fields.begin(), x.fields.end());
        for (auto& d : x.deltas)
            if (d.second < d.first) std::swap(d.first, d.second);
        std::sort(x.deltas.begin(), x.deltas.end());
        for (auto& e : x.eps) std::sort(e.begin(), e.end());
        std::sort(x.eps.begin(), x.eps.end());
        return x;
    };
    Term tn = norm(t), sn = norm(s);
    return tn.u.mono == sn.u.mono && tn.sym.xi == sn.sym.xi && tn.fields == sn.fields &&
           tn.deltas == sn.deltas && tn.eps == sn.eps;
}

inline SymConst dim_factor(const CanonOptions& opt) {
    return opt.dim ? SymConst(GaussianRat(*opt.dim)) : SymConst::n_var();
}

/// Expansion of the opaque chain factor (u.D)^(k-1)(u.A) into derivative
/// monomials; sign +1 pairs with exp(-i Int A.dz), -1 with exp(+i Int A.dz).
inline Expression expand_chain(int k, int sign, DummyAlloc& alloc) {
    if (k <= 0) return Expression::one();
    Term base;
    Idx d0 = alloc.fresh();
    base.u.mono.push_back(d0);
    base.fields.push_back(Field{FieldKind::A, {}, {d0}, 0, 0});
    Expression e{base};
    GaussianRat i_or_minus_i = sign > 0 ? GaussianRat::i() : -GaussianRat::i();
    for (int j = 2; j <= k; ++j) {
        Expression next;
        for (const auto& t : e.terms) {
            // u_a partial_a branch, product rule over field factors
            for (size_t f = 0; f < t.fields.size(); ++f) {
                Term d = t;
                Idx a = alloc.fresh();
                d.fields[f].derivs.push_back(a);
                d.u.mono.push_back(a);
                d.c = d.c * i_or_minus_i;
                next.terms.push_back(std::move(d));
            }
            // (u.A) multiplication branch
            Term m = t;
            Idx a = alloc.fresh();
            m.fields.push_back(Field{FieldKind::A, {}, {a}, 0, 0});
            m.u.mono.push_back(a);
            next.terms.push_back(std::move(m));
        }
        e = std::move(next);
    }
    return e;
}

/// One rewrite step; returns true when a rule fired (replacements pushed to
/// `out`, possibly none for a vanishing term).
inline bool reduce_step(const Term& t, const CanonOptions& opt, DummyAlloc& alloc,
                        std::vector<Term>& out) {
    if (t.c.is_zero()) return true;

    // remainder terms absorb any attached structure into their degree bound
    if (t.rem) {
        Term r = t;
        bool had_content = !(r.u.trivial() && r.gammas.empty() && r.deltas.empty() &&
                             r.eps.empty() && r.fields.empty() && r.sym.trivial() && r.a_pow == 0);
        if (had_content) {
            if (!r.sdep.trivial())
                throw std::logic_error("remainder term with unresolved s-dependence");
            Affine deg = r.u_degree();
            if (!deg.is_constant() || !is_integer(deg.c0))
                throw std::logic_error("remainder term with non-integer u-degree");
            r.rem->min_degree += static_cast<int>(rat_floor(deg.c0));
            r.u = UPart{};
            r.gammas.clear();
            r.deltas.clear();
            r.eps.clear();
            r.fields.clear();
            r.sym = SymPart{};
            r.a_pow = 0;
            out.push_back(std::move(r));
            return true;
        }
        return false;
    }
    if (t.opaque) {
        if (!(t.u.trivial() && t.deltas.empty() && t.eps.empty() && t.fields.empty() &&
              t.sym.trivial() && t.a_pow == 0 && t.sdep.trivial()))
            throw std::logic_error("opaque kernel atom multiplied by structure");
        return false;
    }

    // field expansion to the comparison basis
    if (opt.expand_fields) {
        for (size_t f = 0; f < t.fields.size(); ++f) {
            const Field& fl = t.fields[f];
            if (fl.kind == FieldKind::F) {
                // F(derivs; m, n) = dA(derivs+m; n) - dA(derivs+n; m)
                Term t1 = t, t2 = t;
                Field a1{FieldKind::A, fl.derivs, {fl.idx[1]}, 0, 0};
                a1.derivs.push_back(fl.idx[0]);
                Field a2{FieldKind::A, fl.derivs, {fl.idx[0]}, 0, 0};
                a2.derivs.push_back(fl.idx[1]);
                t1.fields[f] = std::move(a1);
                t2.fields[f] = std::move(a2);
                t2.c = -t2.c;
                out.push_back(std::move(t1));
                out.push_back(std::move(t2));
                return true;
            }
            if (fl.kind == FieldKind::Chain) {
                Term rest = t;
                rest.fields.erase(rest.fields.begin() + f);
                Expression chain = expand_chain(fl.chain_k, fl.chain_sign, alloc);
                for (const auto& ct : chain.terms) out.push_back(rest * ct);
                return true;
            }
        }
    }

    // epsilon with a repeated slot vanishes
    for (const auto& e : t.eps)
        if (e[0] == e[1] || e[0] == e[2] || e[1] == e[2]) return true;

    // epsilon pair contraction over a shared dummy (three-dimensional identity)
    for (size_t e1 = 0; e1 < t.eps.size(); ++e1)
        for (size_t e2 = e1 + 1; e2 < t.eps.size(); ++e2) {
            for (int k1 = 0; k1 < 3; ++k1)
                for (int k2 = 0; k2 < 3; ++k2)
                    if (t.eps[e1][k1] == t.eps[e2][k2] && is_dummy(t.eps[e1][k1])) {
                        // rotate shared slot to the back of both (cyclic, no sign)
                        auto rot = [](std::array<Idx, 3> a, int to_back) {
                            while (to_back != 2) {
                                std::array<Idx, 3> b{a[1], a[2], a[0]};
                                a = b;
                                to_back = (to_back + 2) % 3;
                            }
                            return a;
                        };
                        auto A = rot(t.eps[e1], k1);
                        auto B = rot(t.eps[e2], k2);
                        Term base = t;
                        base.eps.erase(base.eps.begin() + e2);
                        base.eps.erase(base.eps.begin() + e1);
                        Term t1 = base, t2 = base;
                        t1.deltas.push_back({A[0], B[0]});
                        t1.deltas.push_back({A[1], B[1]});
                        t2.deltas.push_back({A[0], B[1]});
                        t2.deltas.push_back({A[1], B[0]});
                        t2.c = -t2.c;
                        out.push_back(std::move(t1));
                        out.push_back(std::move(t2));
                        return true;
                    }
        }

    // delta resolution
    for (size_t d = 0; d < t.deltas.size(); ++d) {
        auto [a, b] = t.deltas[d];
        if (a == b) {
            if (!is_dummy(a)) throw std::logic_error("repeated free label in delta");
            Term r = t;
            r.deltas.erase(r.deltas.begin() + d);
            r.c = r.c * dim_factor(opt);
            out.push_back(std::move(r));
            return true;
        }
        if (is_dummy(a) || is_dummy(b)) {
            Idx dummy = is_dummy(a) ? a : b;
            Idx other = is_dummy(a) ? b : a;
            Term r = t;
            r.deltas.erase(r.deltas.begin() + d);
            bool replaced = false;
            r.for_each_index([&](Idx& i) {
                if (i == dummy && !replaced) {
                    i = other;
                    replaced = true;
                }
            });
            if (!replaced) throw std::logic_error("dangling contraction tag in delta");
            out.push_back(std::move(r));
            return true;
        }
    }

    // repeated dummy inside the u monomial: u_d u_d = u^2
    for (size_t i = 0; i < t.u.mono.size(); ++i)
        for (size_t j = i + 1; j < t.u.mono.size(); ++j)
            if (t.u.mono[i] == t.u.mono[j] && is_dummy(t.u.mono[i])) {
                Term r = t;
                r.u.mono.erase(r.u.mono.begin() + j);
                r.u.mono.erase(r.u.mono.begin() + i);
                r.u.radial += Affine(2);
                out.push_back(std::move(r));
                return true;
            }

    // repeated dummy in the xi monomial: xi_d xi_d = xi^2
    for (size_t i = 0; i < t.sym.xi.size(); ++i)
        for (size_t j = i + 1; j < t.sym.xi.size(); ++j)
            if (t.sym.xi[i] == t.sym.xi[j] && is_dummy(t.sym.xi[i])) {
                Term r = t;
                r.sym.xi.erase(r.sym.xi.begin() + j);
                r.sym.xi.erase(r.sym.xi.begin() + i);
                r.sym.q_pow += 1;
                out.push_back(std::move(r));
                return true;
            }

    // contracted pair inside the gamma word
    for (size_t i = 0; i < t.gammas.size(); ++i)
        for (size_t j = i + 1; j < t.gammas.size(); ++j)
            if (t.gammas[i] == t.gammas[j]) {
                if (!is_dummy(t.gammas[i]))
                    throw std::invalid_argument("free label repeated inside a gamma word");
                if (j == i + 1) {
                    Term r = t;
                    r.gammas.erase(r.gammas.begin() + j);
                    r.gammas.erase(r.gammas.begin() + i);
                    r.c = r.c * (dim_factor(opt) * GaussianRat(opt.clifford_c / 2));
                    out.push_back(std::move(r));
                } else {
                    // move the second occurrence one step left
                    Term swapped = t;
                    std::swap(swapped.gammas[j - 1], swapped.gammas[j]);
                    swapped.c = -swapped.c;
                    Term del = t;
                    Idx x = del.gammas[j - 1], y = del.gammas[j];
                    del.gammas.erase(del.gammas.begin() + j);
                    del.gammas.erase(del.gammas.begin() + (j - 1));
                    del.deltas.push_back({x, y});
                    del.c = del.c * GaussianRat(opt.clifford_c);
                    out.push_back(std::move(swapped));
                    out.push_back(std::move(del));
                }
                return true;
            }

    // field normalization: sorted derivative multi-indices, oriented F
    for (size_t f = 0; f < t.fields.size(); ++f) {
        const Field& fl = t.fields[f];
        if (!std::is_sorted(fl.derivs.begin(), fl.derivs.end())) {
            Term r = t;
            std::sort(r.fields[f].derivs.begin(), r.fields[f].derivs.end());
            out.push_back(std::move(r));
            return true;
        }
        if (fl.kind == FieldKind::F) {
            if (fl.idx[0] == fl.idx[1]) return true;  // antisymmetric: vanishes
            if (fl.idx[0] > fl.idx[1]) {
                Term r = t;
                std::swap(r.fields[f].idx[0], r.fields[f].idx[1]);
                r.c = -r.c;
                out.push_back(std::move(r));
                return true;
            }
        }
    }

    // gamma word ordering by label-free slot tags
    for (size_t p = 0; p + 1 < t.gammas.size(); ++p) {
        SlotTag ta = slot_tag(t, static_cast<int>(p));
        SlotTag tb = slot_tag(t, static_cast<int>(p + 1));
        if (tb < ta) {
            Term swapped = t;
            std::swap(swapped.gammas[p], swapped.gammas[p + 1]);
            swapped.c = -swapped.c;
            Term del = t;
            Idx x = del.gammas[p], y = del.gammas[p + 1];
            del.gammas.erase(del.gammas.begin() + (p + 1));
            del.gammas.erase(del.gammas.begin() + p);
            del.deltas.push_back({x, y});
            del.c = del.c * GaussianRat(opt.clifford_c);
            out.push_back(std::move(swapped));
            out.push_back(std::move(del));
            return true;
        }
        if (ta == tb && ta.cls != 0) {
            Idx a = t.gammas[p], b = t.gammas[p + 1];
            if (symmetric_under_swap(t, a, b, static_cast<int>(p), static_cast<int>(p + 1))) {
                // gamma_a gamma_b S_ab = (c/2) S_dd for S symmetric in (a,b)
                Term r = t;
                r.gammas.erase(r.gammas.begin() + (p + 1));
                r.gammas.erase(r.gammas.begin() + p);
                bool replaced = false;
                r.for_each_index([&](Idx& i) {
                    if (i == b) {
                        i = a;
                        replaced = true;
                    }
                });
                if (!replaced) throw std::logic_error("collapse lost a contraction partner");
                r.c = r.c * GaussianRat(opt.clifford_c / 2);
                out.push_back(std::move(r));
                return true;
            }
            // equal tags on an asymmetric pair: leave the order to the
            // label-minimization stage (pure relabeling covers it)
        }
    }

    return false;
}

/// Dummy-slot signature used to split the relabeling search.
inline std::string dummy_signature(const Term& t, Idx d) {
    auto slots = find_slots(t, d, -1);
    std::vector<std::string> descs;
    for (const auto& s : slots) {
        std::ostringstream os;
        switch (s.sector) {
            case kSecGamma: os << "g" << s.a; break;
            case kSecU: os << "u"; break;
            case kSecXi: os << "x"; break;
            case kSecFld: {
                const Field& f = t.fields[s.a];
                os << "f" << static_cast<int>(f.kind) << "." << f.derivs.size() << "."
                   << f.idx.size() << "." << f.chain_k << "r" << s.b;
                break;
            }
            case kSecEps: os << "e" << s.b; break;
            default: os << "?"; break;
        }
        descs.push_back(os.str());
    }
    std::sort(descs.begin(), descs.end());
    std::string sig;
    for (auto& d2 : descs) sig += d2 + ";";
    return sig;
}

/// Sorts commutative lists, normalizing epsilon orientation; returns the sign.
inline int normalize_commutative(Term& t) {
    int sign = 1;
    std::sort(t.u.mono.begin(), t.u.mono.end());
    std::sort(t.sym.xi.begin(), t.sym.xi.end());
    for (auto& d : t.deltas)
        if (d.second < d.first) std::swap(d.first, d.second);
    std::sort(t.deltas.begin(), t.deltas.end());
    for (auto& e : t.eps) {
        // bubble-sort 3 slots, tracking parity
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2 - i; ++j)
                if (e[j] > e[j + 1]) {
                    std::swap(e[j], e[j + 1]);
                    sign = -sign;
                }
    }
    std::sort(t.eps.begin(), t.eps.end());
    for (auto& f : t.fields) {
        std::sort(f.derivs.begin(), f.derivs.end());
        if (f.kind == FieldKind::F && f.idx.size() == 2 && f.idx[0] > f.idx[1]) {
            std::swap(f.idx[0], f.idx[1]);
            sign = -sign;
        }
    }
    std::sort(t.fields.begin(), t.fields.end());
    return sign;
}

inline std::string term_key(const Term& t) {
    std::ostringstream os;
    os << "G[";
    for (auto g : t.gammas) os << g << ",";
    os << "]U[" << t.u.radial.str() << ";";
    for (auto m : t.u.mono) os << m << ",";
    os << ";" << t.u.log_pow << "]S[";
    for (const auto& [a, p] : t.sdep.gammas) os << a.str() << "^" << p << ",";
    os << ";" << t.sdep.sin_pow << ";" << t.sdep.phase_pow << ";" << t.sdep.two_exp.str() << "]D[";
    for (const auto& d : t.deltas) os << d.first << ":" << d.second << ",";
    os << "]E[";
    for (const auto& e : t.eps) os << e[0] << ":" << e[1] << ":" << e[2] << ",";
    os << "]F[";
    for (const auto& f : t.fields) {
        os << static_cast<int>(f.kind) << "(";
        for (auto d : f.derivs) os << d << ",";
        os << ";";
        for (auto i : f.idx) os << i << ",";
        os << ";" << f.chain_k << ";" << f.chain_sign << ")";
    }
    os << "]X[" << t.sym.q_pow << ";" << t.sym.lam_pow << ";" << t.sym.den_pow << ";";
    for (auto x : t.sym.xi) os << x << ",";
    os << "]a" << t.a_pow;
    if (t.rem) os << "R[" << t.rem->min_degree << ";" << t.rem->label << "]";
    if (t.opaque) os << "O[" << *t.opaque << "]";
    return os.str();
}

inline Term relabel(const Term& t, const std::map<Idx, Idx>& m) {
    Term r = t;
    r.for_each_index([&](Idx& i) {
        auto it = m.find(i);
        if (it != m.end()) i = it->second;
    });
    return r;
}

/// Canonical dummy labeling: minimize the serialized key over relabelings,
/// permuting only within groups of equal slot signature.
inline Term minimize_labels(const Term& t) {
    std::vector<Idx> dummies;
    t.for_each_index([&](Idx i) {
        if (is_dummy(i) && std::find(dummies.begin(), dummies.end(), i) == dummies.end())
            dummies.push_back(i);
    });
    if (dummies.empty()) {
        Term r = t;
        int sign = normalize_commutative(r);
        if (sign < 0) r.c = -r.c;
        return r;
    }
    // group by signature
    std::map<std::string, std::vector<Idx>> groups;
    for (auto d : dummies) groups[dummy_signature(t, d)].push_back(d);
    // base target labels assigned group-by-group in signature order
    std::vector<std::vector<Idx>> group_list;
    size_t total_perms = 1;
    for (auto& [sig, g] : groups) {
        std::sort(g.begin(), g.end());
        size_t f = 1;
        for (size_t k = 2; k <= g.size(); ++k) f *= k;
        total_perms *= f;
        group_list.push_back(g);
    }
    if (total_perms > 40320)
        throw std::logic_error("canonical labeling: too many equivalent contraction tags");

    Idx next = kFirstDummy;
    std::vector<std::vector<Idx>> group_targets;
    for (const auto& g : group_list) {
        std::vector<Idx> tg;
        for (size_t k = 0; k < g.size(); ++k) tg.push_back(next++);
        group_targets.push_back(tg);
    }

    std::string best_key;
    Term best;
    bool have = false;
    // iterate over the product of per-group permutations
    std::vector<std::vector<Idx>> perms = group_list;  // mutable copies
    std::vector<bool> more(group_list.size(), true);
    std::function<void(size_t, std::map<Idx, Idx>&)> rec = [&](size_t gi, std::map<Idx, Idx>& m) {
        if (gi == perms.size()) {
            Term cand = relabel(t, m);
            int sign = normalize_commutative(cand);
            if (sign < 0) cand.c = -cand.c;
            std::string key = term_key(cand);
            if (!have || key < best_key) {
                best_key = key;
                best = cand;
                have = true;
            }
            return;
        }
        std::vector<Idx> p = perms[gi];
        std::sort(p.begin(), p.end());
        do {
            for (size_t k = 0; k < p.size(); ++k) m[p[k]] = group_targets[gi][k];
            rec(gi + 1, m);
        } while (std::next_permutation(p.begin(), p.end()));
    };
    std::map<Idx, Idx> m;
    rec(0, m);
    return best;
}

/// Coefficients of s-dependent terms keep their powers of two inside the
/// 2^(affine) factor; makes forms produced by the Gamma recurrence merge.
inline void normalize_two_power(Term& t) {
    if (t.sdep.trivial() || t.c.is_zero()) return;
    bool first = true;
    long long v = 0;
    for (const auto& [m, c] : t.c.terms) {
        auto upd = [&](const Rat& r) {
            if (r == 0) return;
            long long w = two_valuation(r);
            if (first || w < v) v = w;
            first = false;
        };
        upd(c.re);
        upd(c.im);
    }
    if (first || v == 0) return;
    t.c = t.c * GaussianRat(rat_pow(Rat(2), -v));
    t.sdep.two_exp += Affine(Rat(v));
}

/// Cross-term rational reduction in the resolvent sector: combines terms over
/// the common (xi^2 - lambda^2) denominator and cancels it from the numerator.
inline std::vector<Term> reduce_sym_rational(std::vector<Term> terms) {
    std::map<std::string, std::vector<Term>> groups;
    for (auto& t : terms) {
        Term probe = t;
        probe.sym.q_pow = 0;
        probe.sym.lam_pow = 0;
        probe.sym.den_pow = 0;
        groups[term_key(probe)].push_back(std::move(t));
    }
    std::vector<Term> out;
    for (auto& [key, g] : groups) {
        int den = 0;
        for (const auto& t : g) den = std::max(den, t.sym.den_pow);
        if (den == 0) {
            for (auto& t : g) out.push_back(std::move(t));
            continue;
        }
        // numerator polynomial in (xi^2, lambda)
        std::map<std::pair<int, int>, SymConst> poly;
        for (const auto& t : g) {
            int extra = den - t.sym.den_pow;
            // (q - lambda^2)^extra binomial
            for (int j = 0; j <= extra; ++j) {
                Rat binom(1);
                for (int k = 0; k < j; ++k) binom = binom * Rat(extra - k) / Rat(k + 1);
                GaussianRat coef{(extra - j) % 2 == 0 ? binom : -binom};
                auto kk = std::make_pair(t.sym.q_pow + j, t.sym.lam_pow + 2 * (extra - j));
                poly[kk] += t.c * coef;
                if (poly[kk].is_zero()) poly.erase(kk);
            }
        }
        // cancel (q - lambda^2) factors while the remainder at q = lambda^2 vanishes
        while (den > 0 && !poly.empty()) {
            std::map<int, SymConst> rem;  // lambda powers of numerator at q = lambda^2
            for (const auto& [ab, c] : poly) {
                rem[2 * ab.first + ab.second] += c;
                if (rem[2 * ab.first + ab.second].is_zero()) rem.erase(2 * ab.first + ab.second);
            }
            if (!rem.empty()) break;
            // synthetic division by (q - lambda^2) in q
            std::map<std::pair<int, int>, SymConst> quot;
            auto work = poly;
            while (!work.empty()) {
                auto it = std::max_element(work.begin(), work.end(),
                                           [](const auto& x, const auto& y) {
                                               return x.first.first < y.first.first;
                                           });
                int a = it->first.first, b = it->first.second;
                if (a == 0) throw std::logic_error("rational reduction: division failed");
                SymConst c = it->second;
                quot[{a - 1, b}] += c;
                work.erase(it->first);
                auto lower = std::make_pair(a - 1, b + 2);
                work[lower] += c;
                if (work[lower].is_zero()) work.erase(lower);
            }
            poly = std::move(quot);
            --den;
        }
        Term base = g.front();
        for (const auto& [ab, c] : poly) {
            Term t = base;
            t.sym.q_pow = ab.first;
            t.sym.lam_pow = ab.second;
            t.sym.den_pow = den;
            t.c = c;
            out.push_back(std::move(t));
        }
    }
    return out;
}

}  // namespace canon_detail

/// Full canonicalization: rewriting to the reduced basis, canonical dummy
/// labels, merged coefficients, deterministic term order.
inline Expression canonicalize(const Expression& input, const CanonOptions& opt = {}) {
    using namespace canon_detail;
    Expression e = input;
    if (opt.dim) e = e.subst_n(*opt.dim);
    DummyAlloc alloc{max_dummy(e) + 1};

    std::vector<Term> done;
    std::vector<Term> stack(e.terms.rbegin(), e.terms.rend());
    size_t guard = 0;
    while (!stack.empty()) {
        if (++guard > 5000000) throw std::logic_error("canonicalize: rewrite did not terminate");
        Term t = std::move(stack.back());
        stack.pop_back();
        std::vector<Term> produced;
        if (reduce_step(t, opt, alloc, produced)) {
            for (auto& p : produced) stack.push_back(std::move(p));
        } else {
            done.push_back(std::move(t));
        }
    }

    // canonical labels, then normalize-and-merge to a fixpoint: summing
    // coefficients can expose fresh common two-powers which change keys
    std::vector<Term> flat;
    flat.reserve(done.size());
    for (auto& t : done) flat.push_back(minimize_labels(t));
    for (int round = 0; round < 64; ++round) {
        bool stable = true;
        std::map<std::string, Term> merged;
        for (auto& t : flat) {
            Term x = std::move(t);
            Affine before = x.sdep.two_exp;
            normalize_two_power(x);
            if (!(x.sdep.two_exp == before)) stable = false;
            std::string key = term_key(x);
            auto it = merged.find(key);
            if (it == merged.end()) {
                merged.emplace(std::move(key), std::move(x));
            } else {
                it->second.c += x.c;
                stable = false;
            }
        }
        flat.clear();
        for (auto& [k, t] : merged)
            if (!t.c.is_zero() || t.rem) flat.push_back(std::move(t));
        if (stable) break;
        if (round == 63) throw std::logic_error("canonicalize: two-power merge did not settle");
    }

    flat = reduce_sym_rational(std::move(flat));

    // remainder tags: one per label, weakest degree bound, unit coefficient
    std::map<std::string, int> rems;
    std::vector<Term> final_terms;
    for (auto& t : flat) {
        if (t.rem) {
            auto it = rems.find(t.rem->label);
            if (it == rems.end())
                rems[t.rem->label] = t.rem->min_degree;
            else
                it->second = std::min(it->second, t.rem->min_degree);
        } else if (!t.c.is_zero()) {
            final_terms.push_back(std::move(t));
        }
    }
    for (const auto& [label, deg] : rems) {
        Term r;
        r.rem = Remainder{deg, label};
        final_terms.push_back(std::move(r));
    }

    std::map<std::string, Term> ordered;
    for (auto& t : final_terms) {
        std::string key = term_key(t);
        auto it = ordered.find(key);
        if (it == ordered.end())
            ordered.emplace(std::move(key), std::move(t));
        else
            it->second.c += t.c;
    }
    Expression result;
    for (auto& [k, t] : ordered)
        if (!t.c.is_zero() || t.rem) result.terms.push_back(std::move(t));
    return result;
}

/// Exact equality in the expanded comparison basis.
inline bool expressions_equal(const Expression& a, const Expression& b, CanonOptions opt = {}) {
    opt.expand_fields = true;
    Expression diff = canonicalize(a - b, opt);
    return diff.is_zero();
}

}  // namespace kernelsmith
