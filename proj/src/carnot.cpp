#include "srflat/carnot.hpp"

#include <mutex>
#include <numeric>
#include <sstream>

#include "tensor_algebra.hpp"

namespace srflat {

StratifiedAlgebra::StratifiedAlgebra(std::vector<size_t> strata, std::vector<std::string> names,
                                     const std::vector<BracketTriple>& brackets, RatMatrix gram1)
    : strata_(std::move(strata)), names_(std::move(names)), gram1_(std::move(gram1)) {
    for (size_t w = 0; w < strata_.size(); ++w)
        for (size_t i = 0; i < strata_[w]; ++i) weight_.push_back(int(w) + 1);
    size_t n = weight_.size();
    if (names_.empty())
        for (size_t i = 0; i < n; ++i) names_.push_back("e" + std::to_string(i + 1));
    if (names_.size() != n) throw AlgebraError("basis names do not match strata dimensions");
    size_t n1 = strata_.empty() ? 0 : strata_[0];
    if (gram1_.rows() == 0) gram1_ = RatMatrix::identity(n1);
    if (gram1_.rows() != n1 || gram1_.cols() != n1) throw AlgebraError("stratum-1 Gram matrix has wrong size");
    c_.assign(n * n * n, mpq_class(0));
    std::vector<bool> given(n * n * n, false);
    for (const auto& [i, j, k, v] : brackets) {
        if (i < 0 || j < 0 || k < 0 || size_t(i) >= n || size_t(j) >= n || size_t(k) >= n)
            throw AlgebraError("bracket index out of range");
        size_t a = (size_t(i) * n + size_t(j)) * n + size_t(k);
        c_[a] += v;
        given[a] = true;
    }
    for (size_t i = 0; i < n; ++i)
        for (size_t j = 0; j < n; ++j)
            for (size_t k = 0; k < n; ++k) {
                size_t a = (i * n + j) * n + k, b = (j * n + i) * n + k;
                if (given[a] && !given[b]) c_[b] = -c_[a];
            }
}

size_t StratifiedAlgebra::offset(int w) const {
    size_t o = 0;
    for (int i = 1; i < w; ++i) o += strata_[i - 1];
    return o;
}

RatVec StratifiedAlgebra::bracket(const RatVec& a, const RatVec& b) const {
    size_t n = dim();
    RatVec out(n);
    for (size_t i = 0; i < n; ++i) {
        if (sgn(a[i]) == 0) continue;
        for (size_t j = 0; j < n; ++j) {
            if (sgn(b[j]) == 0) continue;
            mpq_class ab = a[i] * b[j];
            for (size_t k = 0; k < n; ++k)
                if (sgn(c(i, j, k)) != 0) out[k] += ab * c(i, j, k);
        }
    }
    return out;
}

RatVec StratifiedAlgebra::basis(size_t i) const {
    RatVec v(dim());
    v[i] = 1;
    return v;
}

std::vector<BracketTriple> StratifiedAlgebra::triples() const {
    std::vector<BracketTriple> out;
    for (size_t i = 0; i < dim(); ++i)
        for (size_t j = i + 1; j < dim(); ++j)
            for (size_t k = 0; k < dim(); ++k)
                if (sgn(c(i, j, k)) != 0) out.emplace_back(int(i), int(j), int(k), c(i, j, k));
    return out;
}

size_t StratifiedAlgebra::index_of(const std::string& name) const {
    for (size_t i = 0; i < names_.size(); ++i)
        if (names_[i] == name) return i;
    throw AlgebraError("unknown basis element " + name);
}

bool ValidationReport::ok() const {
    for (const auto& c : checks)
        if (!c.pass) return false;
    return true;
}

const ValidationCheck& ValidationReport::check(const std::string& name) const {
    for (const auto& c : checks)
        if (c.name == name) return c;
    throw std::out_of_range("no validation check " + name);
}

ValidationReport validate(const StratifiedAlgebra& alg) {
    size_t n = alg.dim();
    const auto& nm = alg.names();
    auto triple = [&](size_t i, size_t j, size_t k) {
        return "(" + nm[i] + ", " + nm[j] + ", " + nm[k] + ")";
    };
    ValidationReport rep;

    ValidationCheck anti{"antisymmetry"};
    for (size_t i = 0; i < n && anti.pass; ++i)
        for (size_t j = i; j < n && anti.pass; ++j)
            for (size_t k = 0; k < n; ++k)
                if (alg.c(i, j, k) + alg.c(j, i, k) != 0) {
                    anti.pass = false;
                    anti.detail = "[e_i,e_j] + [e_j,e_i] != 0 at " + triple(i, j, k);
                    break;
                }
    rep.checks.push_back(anti);

    ValidationCheck jac{"jacobi"};
    for (size_t i = 0; i < n && jac.pass; ++i)
        for (size_t j = i + 1; j < n && jac.pass; ++j)
            for (size_t l = j + 1; l < n; ++l) {
                auto a = alg.basis(i), b = alg.basis(j), c = alg.basis(l);
                RatVec s = alg.bracket(a, alg.bracket(b, c));
                RatVec t = alg.bracket(b, alg.bracket(c, a));
                RatVec u = alg.bracket(c, alg.bracket(a, b));
                for (size_t k = 0; k < n; ++k) s[k] += t[k] + u[k];
                if (!is_zero(s)) {
                    jac.pass = false;
                    jac.detail = "Jacobi sum nonzero at " + triple(i, j, l);
                    break;
                }
            }
    rep.checks.push_back(jac);

    ValidationCheck grad{"grading"};
    for (size_t i = 0; i < n && grad.pass; ++i)
        for (size_t j = 0; j < n && grad.pass; ++j)
            for (size_t k = 0; k < n; ++k)
                if (sgn(alg.c(i, j, k)) != 0 && alg.weight(k) != alg.weight(i) + alg.weight(j)) {
                    grad.pass = false;
                    grad.detail = "[e_i,e_j] has a component outside weight i+j at " + triple(i, j, k);
                    break;
                }
    rep.checks.push_back(grad);

    ValidationCheck gen{"generation"};
    for (size_t w = 1; w < alg.step() && gen.pass; ++w) {
        size_t o = alg.offset(int(w) + 1), nk = alg.strata()[w];
        std::vector<RatVec> rows;
        for (size_t a = 0; a < alg.strata()[0]; ++a)
            for (size_t b = alg.offset(int(w)); b < alg.offset(int(w)) + alg.strata()[w - 1]; ++b) {
                RatVec v(nk);
                for (size_t k = 0; k < nk; ++k) v[k] = alg.c(a, b, o + k);
                rows.push_back(v);
            }
        if (nk == 0 || rank(RatMatrix::from_rows(rows)) != nk) {
            gen.pass = false;
            gen.detail = "[g_1, g_" + std::to_string(w) + "] does not span g_" + std::to_string(w + 1);
        }
    }
    for (size_t w = 0; w < alg.step() && gen.pass; ++w)
        if (alg.strata()[w] == 0) {
            gen.pass = false;
            gen.detail = "empty stratum " + std::to_string(w + 1);
        }
    rep.checks.push_back(gen);

    ValidationCheck ip{"inner_product"};
    if (!positive_definite(alg.gram1())) {
        ip.pass = false;
        ip.detail = "stratum-1 Gram matrix is not symmetric positive definite";
    }
    rep.checks.push_back(ip);
    return rep;
}

StratifiedAlgebra heisenberg_algebra(size_t n, const std::vector<mpq_class>& lambda) {
    std::vector<std::string> names;
    for (size_t i = 1; i <= n; ++i) names.push_back("X" + std::to_string(i));
    for (size_t i = 1; i <= n; ++i) names.push_back("Y" + std::to_string(i));
    names.push_back("Z");
    std::vector<BracketTriple> br;
    for (size_t i = 0; i < n; ++i) br.emplace_back(int(i), int(n + i), int(2 * n), mpq_class(1));
    RatVec d(2 * n, mpq_class(1));
    if (!lambda.empty()) {
        if (lambda.size() != n) throw AlgebraError("lambda has wrong length");
        for (size_t i = 0; i < n; ++i) d[i] = d[n + i] = lambda[i] * lambda[i];
    }
    return StratifiedAlgebra({2 * n, 1}, names, br, RatMatrix::diagonal(d));
}

StratifiedAlgebra engel_algebra() {
    return StratifiedAlgebra({2, 1, 1}, {"X", "Y", "Z", "W"}, {{0, 1, 2, 1}, {0, 2, 3, 1}}, RatMatrix::identity(2));
}

RatMatrix dilation_matrix(const StratifiedAlgebra& alg, const mpq_class& r) {
    if (sgn(r) <= 0) throw AlgebraError("dilation factor must be positive");
    RatVec d(alg.dim());
    for (size_t i = 0; i < alg.dim(); ++i) {
        mpq_class p = 1;
        for (int k = 0; k < alg.weight(i); ++k) p *= r;
        d[i] = p;
    }
    return RatMatrix::diagonal(d);
}

namespace {

using detail::TensorPoly;
using detail::Word;

// log(exp(a) exp(b)) in the free associative algebra on letters 0 = a, 1 = b.
const TensorPoly& bch_series(size_t s) {
    static std::mutex mu;
    static std::map<size_t, TensorPoly> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(s);
    if (it != cache.end()) return it->second;
    auto exp_letter = [&](int l) {
        TensorPoly e;
        mpq_class f = 1;
        for (size_t n = 0; n <= s; ++n) {
            if (n > 0) f /= mpq_class(long(n));
            e[Word(n, l)] = f;
        }
        return e;
    };
    TensorPoly X = detail::multiply(exp_letter(0), exp_letter(1), s);
    X.erase(Word{});
    TensorPoly log, power = X;
    for (size_t n = 1; n <= s; ++n) {
        detail::add_scaled(log, power, mpq_class(n % 2 ? 1 : -1, long(n)));
        power = detail::multiply(power, X, s);
    }
    return cache.emplace(s, std::move(log)).first->second;
}

}  // namespace

RatVec bch(const StratifiedAlgebra& alg, const RatVec& A, const RatVec& B) {
    size_t s = std::max<size_t>(alg.step(), 1);
    RatVec out(alg.dim());
    // Dynkin-Specht-Wever: a homogeneous Lie polynomial of degree n equals 1/n times its left-normed bracketing
    for (const auto& [w, z] : bch_series(s)) {
        RatVec v = w[0] == 0 ? A : B;
        for (size_t i = 1; i < w.size() && !is_zero(v); ++i) v = alg.bracket(v, w[i] == 0 ? A : B);
        if (is_zero(v)) continue;
        mpq_class f = z / mpq_class(long(w.size()));
        for (size_t k = 0; k < out.size(); ++k) out[k] += f * v[k];
    }
    return out;
}

namespace {

// Unknowns of a stratum-preserving endomorphism: one per (row, col) pair of equal weight.
struct BlockUnknowns {
    std::vector<std::pair<size_t, size_t>> slots;
    std::map<std::pair<size_t, size_t>, size_t> index;

    explicit BlockUnknowns(const StratifiedAlgebra& alg) {
        for (size_t i = 0; i < alg.dim(); ++i)
            for (size_t j = 0; j < alg.dim(); ++j)
                if (alg.weight(i) == alg.weight(j)) {
                    index[{i, j}] = slots.size();
                    slots.emplace_back(i, j);
                }
    }
    long at(size_t i, size_t j) const {
        auto it = index.find({i, j});
        return it == index.end() ? -1 : long(it->second);
    }
};

}  // namespace

GradedDerivationBasis isometry_algebra(const StratifiedAlgebra& alg) {
    size_t n = alg.dim(), n1 = alg.strata().empty() ? 0 : alg.strata()[0];
    BlockUnknowns U(alg);
    std::vector<RatVec> rows;
    auto add = [&](RatVec& r, long u, const mpq_class& v) {
        if (u >= 0) r[size_t(u)] += v;
    };
    // D[e_i, e_j] - [D e_i, e_j] - [e_i, D e_j] = 0, component k
    for (size_t i = 0; i < n; ++i)
        for (size_t j = i + 1; j < n; ++j)
            for (size_t k = 0; k < n; ++k) {
                RatVec r(U.slots.size());
                for (size_t m = 0; m < n; ++m) {
                    if (sgn(alg.c(i, j, m)) != 0) add(r, U.at(k, m), alg.c(i, j, m));
                    if (sgn(alg.c(m, j, k)) != 0) add(r, U.at(m, i), -alg.c(m, j, k));
                    if (sgn(alg.c(i, m, k)) != 0) add(r, U.at(m, j), -alg.c(i, m, k));
                }
                if (!is_zero(r)) rows.push_back(std::move(r));
            }
    // G D_1 + D_1^T G = 0 on the first stratum
    const RatMatrix& G = alg.gram1();
    for (size_t a = 0; a < n1; ++a)
        for (size_t b = a; b < n1; ++b) {
            RatVec r(U.slots.size());
            for (size_t m = 0; m < n1; ++m) {
                add(r, U.at(m, b), G(a, m));
                add(r, U.at(m, a), G(m, b));
            }
            if (!is_zero(r)) rows.push_back(std::move(r));
        }
    GradedDerivationBasis out;
    std::vector<RatVec> null =
        rows.empty() ? std::vector<RatVec>{} : nullspace(RatMatrix::from_rows(rows));
    if (rows.empty())
        for (size_t u = 0; u < U.slots.size(); ++u) {
            RatVec e(U.slots.size());
            e[u] = 1;
            null.push_back(e);
        }
    for (const auto& v : null) {
        RatMatrix D(n, n);
        for (size_t u = 0; u < U.slots.size(); ++u) D(U.slots[u].first, U.slots[u].second) = v[u];
        out.basis.push_back(std::move(D));
    }
    return out;
}

bool is_graded_isometric_derivation(const StratifiedAlgebra& alg, const RatMatrix& D) {
    size_t n = alg.dim(), n1 = alg.strata()[0];
    for (size_t i = 0; i < n; ++i)
        for (size_t j = 0; j < n; ++j)
            if (alg.weight(i) != alg.weight(j) && sgn(D(i, j)) != 0) return false;
    for (size_t i = 0; i < n; ++i)
        for (size_t j = 0; j < n; ++j) {
            RatVec lhs = D * alg.bracket(alg.basis(i), alg.basis(j));
            RatVec r1 = alg.bracket(D.col(i), alg.basis(j)), r2 = alg.bracket(alg.basis(i), D.col(j));
            for (size_t k = 0; k < n; ++k)
                if (lhs[k] != r1[k] + r2[k]) return false;
        }
    RatMatrix D1 = D.block(0, 0, n1, n1);
    return (alg.gram1() * D1 + D1.transpose() * alg.gram1()).is_zero();
}

RatMatrix extend_inner_product(const StratifiedAlgebra& alg) {
    size_t n = alg.dim();
    RatMatrix G(n, n);
    G.set_block(0, 0, alg.gram1());
    for (size_t w = 2; w <= alg.step(); ++w) {
        size_t o = alg.offset(int(w)), nk = alg.strata()[w - 1];
        // wedge pairs e_a ^ e_b, a < b, of total weight w
        std::vector<std::pair<size_t, size_t>> pairs;
        for (size_t a = 0; a < o; ++a)
            for (size_t b = a + 1; b < o; ++b)
                if (size_t(alg.weight(a) + alg.weight(b)) == w) pairs.emplace_back(a, b);
        size_t m = pairs.size();
        RatMatrix M(m, m), Bm(nk, m);
        for (size_t p = 0; p < m; ++p) {
            auto [a, b] = pairs[p];
            for (size_t q = 0; q < m; ++q) {
                auto [c, d] = pairs[q];
                M(p, q) = G(a, c) * G(b, d) - G(a, d) * G(b, c);
            }
            for (size_t k = 0; k < nk; ++k) Bm(k, p) = alg.c(a, b, o + k);
        }
        auto Minv = inverse(M);
        if (!Minv) throw AlgebraError("degenerate wedge inner product");
        auto Gk = inverse(Bm * *Minv * Bm.transpose());
        if (!Gk) throw AlgebraError("bracket does not generate stratum " + std::to_string(w));
        G.set_block(o, o, *Gk);
    }
    return G;
}

}  // namespace srflat
