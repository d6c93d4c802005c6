#pragma once

#include "kernelsmith/rational.hpp"

#include <complex>
#include <string>

namespace kernelsmith {

/// Exact complex rational a + b*i.
struct GaussianRat {
    Rat re{0};
    Rat im{0};

    GaussianRat() = default;
    GaussianRat(Rat r) : re(std::move(r)) {}
    GaussianRat(long long r) : re(r) {}
    GaussianRat(Rat r, Rat i) : re(std::move(r)), im(std::move(i)) {}

    static GaussianRat i() { return {Rat(0), Rat(1)}; }

    bool is_zero() const { return re == 0 && im == 0; }
    bool is_one() const { return re == 1 && im == 0; }

    GaussianRat operator-() const { return {-re, -im}; }
    GaussianRat conj() const { return {re, -im}; }

    GaussianRat& operator+=(const GaussianRat& o) {
        re += o.re;
        im += o.im;
        return *this;
    }
    GaussianRat& operator-=(const GaussianRat& o) {
        re -= o.re;
        im -= o.im;
        return *this;
    }
    GaussianRat& operator*=(const GaussianRat& o) {
        Rat r = re * o.re - im * o.im;
        Rat i = re * o.im + im * o.re;
        re = std::move(r);
        im = std::move(i);
        return *this;
    }
    friend GaussianRat operator+(GaussianRat a, const GaussianRat& b) { return a += b; }
    friend GaussianRat operator-(GaussianRat a, const GaussianRat& b) { return a -= b; }
    friend GaussianRat operator*(GaussianRat a, const GaussianRat& b) { return a *= b; }

    GaussianRat inverse() const {
        Rat n = re * re + im * im;
        if (n == 0) throw std::domain_error("GaussianRat: division by zero");
        return {re / n, -im / n};
    }
    friend GaussianRat operator/(const GaussianRat& a, const GaussianRat& b) {
        return a * b.inverse();
    }

    /// i^k for any integer k.
    static GaussianRat i_pow(long long k) {
        switch (((k % 4) + 4) % 4) {
            case 0: return {Rat(1), Rat(0)};
            case 1: return {Rat(0), Rat(1)};
            case 2: return {Rat(-1), Rat(0)};
            default: return {Rat(0), Rat(-1)};
        }
    }

    bool operator==(const GaussianRat& o) const { return re == o.re && im == o.im; }
    bool operator!=(const GaussianRat& o) const { return !(*this == o); }
    bool operator<(const GaussianRat& o) const {
        if (re != o.re) return re < o.re;
        return im < o.im;
    }

    std::complex<double> to_complex() const {
        return {static_cast<double>(re), static_cast<double>(im)};
    }

    std::string str() const {
        if (im == 0) return rat_str(re);
        if (re == 0) return rat_str(im) + "*i";
        return "(" + rat_str(re) + (im > 0 ? "+" : "") + rat_str(im) + "*i)";
    }
};

}  // namespace kernelsmith
