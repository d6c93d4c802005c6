#pragma once

#include "kernelsmith/rational.hpp"

#include <optional>
#include <string>
#include <tuple>

namespace kernelsmith {

/// Exact affine form  c0 + cs*s + cn*n  in the complex power s and the
/// spacetime dimension n (kept symbolic until fixed).
struct Affine {
    Rat c0{0};
    Rat cs{0};
    Rat cn{0};

    Affine() = default;
    Affine(Rat c) : c0(std::move(c)) {}
    Affine(long long c) : c0(c) {}
    Affine(Rat c, Rat s, Rat n) : c0(std::move(c)), cs(std::move(s)), cn(std::move(n)) {}

    static Affine s() { return {Rat(0), Rat(1), Rat(0)}; }
    static Affine n() { return {Rat(0), Rat(0), Rat(1)}; }

    bool is_constant() const { return cs == 0 && cn == 0; }
    bool is_zero() const { return c0 == 0 && cs == 0 && cn == 0; }

    Affine operator-() const { return {-c0, -cs, -cn}; }
    Affine& operator+=(const Affine& o) {
        c0 += o.c0;
        cs += o.cs;
        cn += o.cn;
        return *this;
    }
    Affine& operator-=(const Affine& o) {
        c0 -= o.c0;
        cs -= o.cs;
        cn -= o.cn;
        return *this;
    }
    friend Affine operator+(Affine a, const Affine& b) { return a += b; }
    friend Affine operator-(Affine a, const Affine& b) { return a -= b; }
    friend Affine operator*(const Affine& a, const Rat& k) {
        return {a.c0 * k, a.cs * k, a.cn * k};
    }

    Affine subst_n(const Rat& n) const { return {c0 + cn * n, cs, Rat(0)}; }

    /// Value at given s (requires n already substituted).
    Rat eval_s(const Rat& s) const {
        if (cn != 0) throw std::logic_error("Affine::eval_s with symbolic n");
        return c0 + cs * s;
    }

    auto tie() const { return std::tie(c0, cs, cn); }
    bool operator==(const Affine& o) const { return tie() == o.tie(); }
    bool operator!=(const Affine& o) const { return !(*this == o); }
    bool operator<(const Affine& o) const { return tie() < o.tie(); }

    std::string str() const {
        std::string out;
        auto emit = [&](const Rat& c, const char* sym) {
            if (c == 0) return;
            if (!out.empty() && c > 0) out += "+";
            if (sym[0] == 0) {
                out += rat_str(c);
            } else if (c == 1) {
                out += sym;
            } else if (c == -1) {
                out += std::string("-") + sym;
            } else {
                out += rat_str(c) + "*" + sym;
            }
        };
        emit(cs, "s");
        emit(cn, "n");
        emit(c0, "");
        return out.empty() ? "0" : out;
    }
};

}  // namespace kernelsmith
