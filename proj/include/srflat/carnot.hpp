#pragma once

#include "srflat/geometry.hpp"
#include "srflat/ratmatrix.hpp"

namespace srflat {

struct AlgebraError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Graded nilpotent Lie algebra with an inner product on the first stratum.
// Basis vectors are ordered by stratum; weight(i) is 1-based.
class StratifiedAlgebra {
public:
    StratifiedAlgebra() = default;
    // Brackets listed as [e_i, e_j] = c e_k; the opposite order is filled in by antisymmetry
    // unless it is listed too.
    StratifiedAlgebra(std::vector<size_t> strata, std::vector<std::string> names,
                      const std::vector<BracketTriple>& brackets, RatMatrix gram1);

    size_t dim() const { return weight_.size(); }
    size_t step() const { return strata_.size(); }
    const std::vector<size_t>& strata() const { return strata_; }
    const std::vector<std::string>& names() const { return names_; }
    int weight(size_t i) const { return weight_[i]; }
    // first basis index of stratum w (1-based)
    size_t offset(int w) const;
    const RatMatrix& gram1() const { return gram1_; }

    const mpq_class& c(size_t i, size_t j, size_t k) const { return c_[(i * dim() + j) * dim() + k]; }
    RatVec bracket(const RatVec& a, const RatVec& b) const;
    RatVec basis(size_t i) const;
    // nonzero c^k_ij with i < j
    std::vector<BracketTriple> triples() const;
    size_t index_of(const std::string& name) const;

private:
    std::vector<size_t> strata_;
    std::vector<std::string> names_;
    std::vector<int> weight_;
    std::vector<mpq_class> c_;
    RatMatrix gram1_;
};

struct ValidationCheck {
    std::string name;
    bool pass = true;
    std::string detail;
};

struct ValidationReport {
    std::vector<ValidationCheck> checks;
    bool ok() const;
    const ValidationCheck& check(const std::string& name) const;
};

ValidationReport validate(const StratifiedAlgebra& alg);

// Lyndon words over {0..m-1} up to length s, ordered by length then lexicographically.
std::vector<std::vector<int>> lyndon_words(int m, int s);
StratifiedAlgebra free_nilpotent(int m, int s);

StratifiedAlgebra heisenberg_algebra(size_t n, const std::vector<mpq_class>& lambda = {});
StratifiedAlgebra engel_algebra();

RatMatrix dilation_matrix(const StratifiedAlgebra& alg, const mpq_class& r);
// log(exp A exp B), truncated at the step of the algebra.
RatVec bch(const StratifiedAlgebra& alg, const RatVec& A, const RatVec& B);

// Matrices act on column vectors: D e_j = sum_i D(i, j) e_i.
struct GradedDerivationBasis {
    std::vector<RatMatrix> basis;
    size_t dim() const { return basis.size(); }
};

GradedDerivationBasis isometry_algebra(const StratifiedAlgebra& alg);
bool is_graded_isometric_derivation(const StratifiedAlgebra& alg, const RatMatrix& D);

// Inner product on all of g making the bracket an isometry off its kernel, stratum by stratum.
RatMatrix extend_inner_product(const StratifiedAlgebra& alg);

// Cochains Lambda^k g* (x) g^, g^ = g_0 (+) g with the g_0 block first.
// Coordinates are indexed form-major: (increasing index tuple, target index).
class SpencerComplex {
public:
    explicit SpencerComplex(StratifiedAlgebra alg);

    const StratifiedAlgebra& algebra() const { return alg_; }
    const GradedDerivationBasis& g0() const { return g0_; }
    size_t target_dim() const { return g0_.dim() + alg_.dim(); }
    std::vector<std::vector<size_t>> forms(size_t k) const;
    size_t cochain_dim(size_t k) const { return forms(k).size() * target_dim(); }

    // [e_i, t] for e_i in g and t in g^: [A, D] = -D(A), [A, B] the bracket of g.
    RatVec hat_bracket(size_t i, const RatVec& t) const;
    RatMatrix differential(size_t k) const;
    RatMatrix gram(size_t k) const;
    RatMatrix target_gram() const { return target_gram_; }
    RatMatrix adjoint(size_t k) const;

private:
    StratifiedAlgebra alg_;
    GradedDerivationBasis g0_;
    RatMatrix G_;
    RatMatrix target_gram_;
};

RatMatrix spencer_differential(const StratifiedAlgebra& alg, size_t k);
RatMatrix spencer_adjoint(const StratifiedAlgebra& alg, size_t k);

}  // namespace srflat
