#pragma once

#include "srflat/symexpr.hpp"

#include <memory>
#include <tuple>

namespace srflat {

enum class Mode { Coordinates, ConstantStructure };

struct GeometryError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

using BracketTriple = std::tuple<int, int, int, mpq_class>;  // [E_i, E_j] has c on E_k

// Either a coordinate chart (frame = coordinate derivations) or an abstract
// left-invariant frame with constant structure constants.
class Space {
public:
    static std::shared_ptr<const Space> coordinates(Chart c);
    static std::shared_ptr<const Space> constant_structure(std::vector<std::string> basis,
                                                           const std::vector<BracketTriple>& brackets);

    Mode mode() const { return mode_; }
    const Chart& chart() const { return chart_; }
    size_t dim() const { return dim_; }
    const std::vector<std::string>& basis_names() const { return names_; }
    // c^k_ij
    const mpq_class& c(size_t i, size_t j, size_t k) const { return c_[(i * dim_ + j) * dim_ + k]; }
    bool has_structure() const { return has_c_; }
    // E_i(f): coordinate derivative, or zero on constants.
    Expr basis_apply(size_t i, const Expr& f) const;

private:
    Mode mode_ = Mode::Coordinates;
    Chart chart_;
    size_t dim_ = 0;
    std::vector<std::string> names_;
    std::vector<mpq_class> c_;
    bool has_c_ = false;
};

using SpacePtr = std::shared_ptr<const Space>;

struct VectorField {
    SpacePtr space;
    std::vector<Expr> comp;

    static VectorField zero(SpacePtr s);
    static VectorField basis(SpacePtr s, size_t i);
    size_t dim() const { return comp.size(); }
    Expr apply(const Expr& f) const;
    bool is_zero() const;
};

VectorField operator+(const VectorField& a, const VectorField& b);
VectorField operator-(const VectorField& a, const VectorField& b);
VectorField operator-(const VectorField& a);
VectorField operator*(const Expr& f, const VectorField& v);

struct OneForm {
    SpacePtr space;
    std::vector<Expr> comp;

    Expr operator()(const VectorField& v) const;
};

OneForm operator+(const OneForm& a, const OneForm& b);
OneForm operator*(const Expr& f, const OneForm& a);

using FrameField = std::vector<VectorField>;

struct Metric {
    SpacePtr space;
    std::vector<std::vector<Expr>> g;

    Expr operator()(const VectorField& a, const VectorField& b) const;
    size_t dim() const { return g.size(); }
};

VectorField lie_bracket(const VectorField& X, const VectorField& Y);
Expr d_oneform(const OneForm& a, const VectorField& X, const VectorField& Y);
Expr lie_derivative_metric(const VectorField& Z, const Metric& g, const VectorField& X, const VectorField& Y);

using ExprMatrix = std::vector<std::vector<Expr>>;

// Symbolic elimination; pivots chosen as the simplest entry that is not zero on the domain.
struct SymbolicLinAlg {
    const Chart& chart;
    SampleConfig cfg;

    bool nonzero(const Expr& e) const;
    std::optional<ExprMatrix> inverse(ExprMatrix m) const;
    std::vector<std::vector<Expr>> nullspace(ExprMatrix m) const;
    std::optional<std::vector<Expr>> solve(ExprMatrix m, std::vector<Expr> rhs) const;
};

Expr determinant(const ExprMatrix& m);

std::vector<OneForm> annihilator(const FrameField& F, const SampleConfig& cfg = {});

// Minimum over sample points of sigma_min / sigma_max of the component matrix.
double min_relative_singular_value(const FrameField& F, const SampleConfig& cfg = {});
bool pointwise_independent(const FrameField& F, const SampleConfig& cfg = {});
void check_metric(const Metric& g, const SampleConfig& cfg = {});

// A frame of n fields spanning the tangent space, with cached inverse and structure functions.
class FullFrame {
public:
    FullFrame(FrameField F, const SampleConfig& cfg = {});

    size_t size() const { return F_.size(); }
    const VectorField& operator[](size_t i) const { return F_[i]; }
    const FrameField& fields() const { return F_; }
    const SpacePtr& space() const { return F_.front().space; }
    const Chart& chart() const { return space()->chart(); }
    const SampleConfig& config() const { return cfg_; }

    std::vector<Expr> expand(const VectorField& v) const;
    VectorField combine(const std::vector<Expr>& a) const;
    // b^k_ij with [E_i, E_j] = sum_k b^k_ij E_k
    const Expr& b(size_t i, size_t j, size_t k) const { return b_[(i * size() + j) * size() + k]; }

private:
    FrameField F_;
    SampleConfig cfg_;
    ExprMatrix inv_;
    std::vector<Expr> b_;
};

}  // namespace srflat
