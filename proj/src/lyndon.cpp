#include <algorithm>
#include <cmath>

#include "srflat/carnot.hpp"
#include "tensor_algebra.hpp"

namespace srflat {

using detail::TensorPoly;
using detail::Word;

namespace {

long mobius(long n) {
    long r = 1;
    for (long p = 2; p * p <= n; ++p) {
        if (n % p) continue;
        n /= p;
        if (n % p == 0) return 0;
        r = -r;
    }
    return n > 1 ? -r : r;
}

// Number of Lyndon words of length n over m letters; huge values saturate.
double witt(int m, int n) {
    double s = 0;
    for (int d = 1; d <= n; ++d)
        if (n % d == 0) s += mobius(d) * std::pow(double(m), n / d);
    return s / n;
}

bool is_lyndon(const Word& w) {
    for (size_t i = 1; i < w.size(); ++i)
        if (!std::lexicographical_compare(w.begin(), w.end(), w.begin() + i, w.end())) return false;
    return true;
}

}  // namespace

std::vector<std::vector<int>> lyndon_words(int m, int s) {
    std::vector<Word> out;
    Word w{-1};
    while (!w.empty()) {
        ++w.back();
        out.push_back(w);
        size_t len = w.size();
        while (w.size() < size_t(s)) w.push_back(w[w.size() - len]);
        while (!w.empty() && w.back() == m - 1) w.pop_back();
    }
    std::stable_sort(out.begin(), out.end(), [](const Word& a, const Word& b) { return a.size() < b.size(); });
    return out;
}

StratifiedAlgebra free_nilpotent(int m, int s) {
    if (m < 2 || s < 1) throw AlgebraError("free nilpotent algebra needs m >= 2 and s >= 1");
    double total = 0;
    for (int n = 1; n <= s; ++n) total += witt(m, n);
    if (total > 1000.5) throw AlgebraError("free nilpotent algebra exceeds 1000 dimensions");

    auto words = lyndon_words(m, s);
    std::map<Word, size_t> index;
    for (size_t i = 0; i < words.size(); ++i) index[words[i]] = i;

    // standard bracketing: w = uv with v the longest proper Lyndon suffix
    std::vector<TensorPoly> P(words.size());
    std::vector<std::string> names(words.size());
    for (size_t i = 0; i < words.size(); ++i) {
        const Word& w = words[i];
        if (w.size() == 1) {
            P[i][w] = 1;
            names[i] = "X" + std::to_string(w[0] + 1);
            continue;
        }
        size_t split = 1;
        while (!is_lyndon(Word(w.begin() + split, w.end()))) ++split;
        size_t u = index.at(Word(w.begin(), w.begin() + split)), v = index.at(Word(w.begin() + split, w.end()));
        P[i] = detail::commutator(P[u], P[v], s);
        names[i] = "[" + names[u] + "," + names[v] + "]";
    }

    std::vector<size_t> strata(s, 0);
    for (const auto& w : words) ++strata[w.size() - 1];

    std::vector<BracketTriple> brackets;
    for (size_t i = 0; i < words.size(); ++i)
        for (size_t j = i + 1; j < words.size(); ++j) {
            if (words[i].size() + words[j].size() > size_t(s)) continue;
            TensorPoly q = detail::commutator(P[i], P[j], s);
            // the smallest word of a Lie polynomial is Lyndon and leads exactly one basis element
            while (!q.empty()) {
                auto it = index.find(q.begin()->first);
                if (it == index.end()) throw std::logic_error("non-Lyndon leading word in free bracket");
                mpq_class a = q.begin()->second;
                brackets.emplace_back(int(i), int(j), int(it->second), a);
                detail::add_scaled(q, P[it->second], -a);
            }
        }
    return StratifiedAlgebra(strata, names, brackets, RatMatrix::identity(m));
}

}  // namespace srflat
