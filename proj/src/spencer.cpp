#include <map>

#include "srflat/carnot.hpp"

namespace srflat {

namespace {

using Tuple = std::vector<size_t>;

void combinations(size_t n, size_t k, size_t start, Tuple& cur, std::vector<Tuple>& out) {
    if (cur.size() == k) {
        out.push_back(cur);
        return;
    }
    for (size_t i = start; i + (k - cur.size()) <= n; ++i) {
        cur.push_back(i);
        combinations(n, k, i + 1, cur, out);
        cur.pop_back();
    }
}

std::map<Tuple, size_t> tuple_index(const std::vector<Tuple>& forms) {
    std::map<Tuple, size_t> idx;
    for (size_t i = 0; i < forms.size(); ++i) idx[forms[i]] = i;
    return idx;
}

// Sort (m, K...) into increasing order; returns the permutation sign, 0 on a repeated index.
int sort_with_sign(Tuple& t) {
    int sign = 1;
    for (size_t i = 1; i < t.size(); ++i)
        for (size_t j = i; j > 0 && t[j - 1] >= t[j]; --j) {
            if (t[j - 1] == t[j]) return 0;
            std::swap(t[j - 1], t[j]);
            sign = -sign;
        }
    return sign;
}

}  // namespace

SpencerComplex::SpencerComplex(StratifiedAlgebra alg) : alg_(std::move(alg)) {
    g0_ = isometry_algebra(alg_);
    G_ = extend_inner_product(alg_);
    size_t d0 = g0_.dim(), n = alg_.dim();
    auto Ginv = inverse(G_);
    target_gram_ = RatMatrix(d0 + n, d0 + n);
    // g_0 sits in g* (x) g: <D1, D2> = tr(G^-1 D1^T G D2)
    for (size_t p = 0; p < d0; ++p)
        for (size_t q = p; q < d0; ++q)
            target_gram_(p, q) = target_gram_(q, p) =
                (*Ginv * g0_.basis[p].transpose() * G_ * g0_.basis[q]).trace();
    target_gram_.set_block(d0, d0, G_);
}

std::vector<std::vector<size_t>> SpencerComplex::forms(size_t k) const {
    std::vector<Tuple> out;
    Tuple cur;
    if (k <= alg_.dim()) combinations(alg_.dim(), k, 0, cur, out);
    return out;
}

RatVec SpencerComplex::hat_bracket(size_t i, const RatVec& t) const {
    size_t d0 = g0_.dim(), n = alg_.dim();
    RatVec out(d0 + n);
    RatVec b(t.begin() + long(d0), t.end());
    RatVec g = alg_.bracket(alg_.basis(i), b);
    for (size_t p = 0; p < d0; ++p) {
        if (sgn(t[p]) == 0) continue;
        for (size_t k = 0; k < n; ++k) g[k] -= t[p] * g0_.basis[p](k, i);
    }
    for (size_t k = 0; k < n; ++k) out[d0 + k] = g[k];
    return out;
}

RatMatrix SpencerComplex::differential(size_t k) const {
    size_t D = target_dim(), n = alg_.dim();
    auto src = forms(k), dst = forms(k + 1);
    auto src_idx = tuple_index(src);
    RatMatrix M(dst.size() * D, src.size() * D);
    std::vector<RatVec> hb(n * D);
    for (size_t i = 0; i < n; ++i)
        for (size_t t = 0; t < D; ++t) {
            RatVec e(D);
            e[t] = 1;
            hb[i * D + t] = hat_bracket(i, e);
        }
    for (size_t row = 0; row < dst.size(); ++row) {
        const Tuple& J = dst[row];
        // sum_i (-1)^i [A_i, alpha(..., ^A_i, ...)]
        for (size_t i = 0; i <= k; ++i) {
            Tuple I = J;
            I.erase(I.begin() + long(i));
            size_t col = src_idx.at(I);
            mpq_class s = i % 2 ? -1 : 1;
            for (size_t t = 0; t < D; ++t)
                for (size_t a = 0; a < D; ++a)
                    if (sgn(hb[J[i] * D + t][a]) != 0) M(row * D + a, col * D + t) += s * hb[J[i] * D + t][a];
        }
        // sum_{i<l} (-1)^(i+l) alpha([A_i, A_l], ...)
        for (size_t i = 0; i <= k; ++i)
            for (size_t l = i + 1; l <= k; ++l) {
                Tuple K = J;
                K.erase(K.begin() + long(l));
                K.erase(K.begin() + long(i));
                for (size_t m = 0; m < n; ++m) {
                    const mpq_class& c = alg_.c(J[i], J[l], m);
                    if (sgn(c) == 0) continue;
                    Tuple I = K;
                    I.insert(I.begin(), m);
                    int sign = sort_with_sign(I);
                    if (sign == 0) continue;
                    size_t col = src_idx.at(I);
                    mpq_class s = c * sign * ((i + l) % 2 ? -1 : 1);
                    for (size_t t = 0; t < D; ++t) M(row * D + t, col * D + t) += s;
                }
            }
    }
    return M;
}

RatMatrix SpencerComplex::gram(size_t k) const {
    auto f = forms(k);
    auto Ginv = *inverse(G_);
    RatMatrix L(f.size(), f.size());
    for (size_t p = 0; p < f.size(); ++p)
        for (size_t q = 0; q < f.size(); ++q) {
            RatMatrix S(k, k);
            for (size_t a = 0; a < k; ++a)
                for (size_t b = 0; b < k; ++b) S(a, b) = Ginv(f[p][a], f[q][b]);
            L(p, q) = determinant(S);
        }
    return kron(L, target_gram_);
}

RatMatrix SpencerComplex::adjoint(size_t k) const {
    auto Gk_inv = inverse(gram(k));
    if (!Gk_inv) throw AlgebraError("degenerate cochain inner product");
    return *Gk_inv * differential(k).transpose() * gram(k + 1);
}

RatMatrix spencer_differential(const StratifiedAlgebra& alg, size_t k) { return SpencerComplex(alg).differential(k); }

RatMatrix spencer_adjoint(const StratifiedAlgebra& alg, size_t k) { return SpencerComplex(alg).adjoint(k); }

}  // namespace srflat
