#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace kernelsmith {

/// Tensor index slot value. Small ids are free (named) Lorentz indices;
/// ids >= kFirstDummy are contraction tags appearing exactly twice per term.
using Idx = std::int32_t;

inline constexpr Idx kFirstDummy = 1000;

inline bool is_dummy(Idx i) { return i >= kFirstDummy; }

inline const std::vector<std::string>& free_index_names() {
    static const std::vector<std::string> names = {"mu",    "nu",   "rho", "sigma",
                                                   "alpha", "beta", "tau", "kappa"};
    return names;
}

inline std::string index_name(Idx i) {
    if (is_dummy(i)) return "d" + std::to_string(i - kFirstDummy);
    const auto& names = free_index_names();
    if (i >= 0 && static_cast<size_t>(i) < names.size()) return names[i];
    return "x" + std::to_string(i);
}

inline Idx index_from_name(const std::string& s) {
    if (!s.empty() && s[0] == 'd') {
        try {
            return kFirstDummy + std::stoi(s.substr(1));
        } catch (const std::exception&) {
        }
    }
    const auto& names = free_index_names();
    for (size_t k = 0; k < names.size(); ++k)
        if (names[k] == s) return static_cast<Idx>(k);
    if (!s.empty() && s[0] == 'x') {
        try {
            return std::stoi(s.substr(1));
        } catch (const std::exception&) {
        }
    }
    throw std::invalid_argument("unknown index name '" + s + "'");
}

/// Hands out fresh dummy ids within one expression build.
struct DummyAlloc {
    Idx next = kFirstDummy;
    Idx fresh() { return next++; }
};

// Conventional free labels.
inline constexpr Idx MU = 0, NU = 1, RHO = 2, SIGMA = 3, ALPHA = 4, BETA = 5, TAU = 6, KAPPA = 7;

}  // namespace kernelsmith
