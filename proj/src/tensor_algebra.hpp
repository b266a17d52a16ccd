#pragma once

// Truncated free associative algebra: noncommutative polynomials keyed by words.

#include <gmpxx.h>

#include <map>
#include <vector>

namespace srflat::detail {

using Word = std::vector<int>;
using TensorPoly = std::map<Word, mpq_class>;

inline void add_scaled(TensorPoly& a, const TensorPoly& b, const mpq_class& s) {
    for (const auto& [w, c] : b) {
        auto& t = a[w];
        t += s * c;
        if (sgn(t) == 0) a.erase(w);
    }
}

inline TensorPoly multiply(const TensorPoly& a, const TensorPoly& b, size_t maxlen) {
    TensorPoly out;
    for (const auto& [u, cu] : a)
        for (const auto& [v, cv] : b) {
            if (u.size() + v.size() > maxlen) continue;
            Word w = u;
            w.insert(w.end(), v.begin(), v.end());
            auto& t = out[w];
            t += cu * cv;
            if (sgn(t) == 0) out.erase(w);
        }
    return out;
}

inline TensorPoly commutator(const TensorPoly& a, const TensorPoly& b, size_t maxlen) {
    TensorPoly out = multiply(a, b, maxlen);
    add_scaled(out, multiply(b, a, maxlen), -1);
    return out;
}

}  // namespace srflat::detail
