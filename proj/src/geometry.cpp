#include "srflat/geometry.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <map>

namespace srflat {

std::shared_ptr<const Space> Space::coordinates(Chart c) {
    if (c.dim() == 0) throw GeometryError("coordinate mode needs at least one coordinate");
    auto s = std::make_shared<Space>();
    s->mode_ = Mode::Coordinates;
    s->dim_ = c.dim();
    s->names_ = c.names();
    s->chart_ = std::move(c);
    return s;
}

std::shared_ptr<const Space> Space::constant_structure(std::vector<std::string> basis,
                                                       const std::vector<BracketTriple>& brackets) {
    auto s = std::make_shared<Space>();
    s->mode_ = Mode::ConstantStructure;
    s->dim_ = basis.size();
    s->names_ = std::move(basis);
    size_t n = s->dim_;
    if (n == 0) throw GeometryError("empty basis");
    s->c_.assign(n * n * n, mpq_class(0));
    s->has_c_ = true;
    std::vector<bool> set(n * n * n, false);
    for (const auto& [i, j, k, v] : brackets) {
        if (i < 0 || j < 0 || k < 0 || static_cast<size_t>(i) >= n || static_cast<size_t>(j) >= n ||
            static_cast<size_t>(k) >= n)
            throw GeometryError("bracket index out of range");
        if (i == j && v != 0) throw GeometryError("nonzero self-bracket");
        auto at = [&](int a, int b) { return (a * n + b) * n + k; };
        for (auto [a, b, sign] : {std::tuple{i, j, 1}, std::tuple{j, i, -1}}) {
            mpq_class val = sign * v;
            if (set[at(a, b)] && s->c_[at(a, b)] != val)
                throw GeometryError("structure constants not antisymmetric");
            s->c_[at(a, b)] = val;
            set[at(a, b)] = true;
        }
    }
    // Jacobi: sum over cyclic [[E_i,E_j],E_l]
    for (size_t i = 0; i < n; ++i)
        for (size_t j = i + 1; j < n; ++j)
            for (size_t l = j + 1; l < n; ++l)
                for (size_t k = 0; k < n; ++k) {
                    mpq_class sum = 0;
                    for (size_t m = 0; m < n; ++m) {
                        sum += s->c(i, j, m) * s->c(m, l, k);
                        sum += s->c(j, l, m) * s->c(m, i, k);
                        sum += s->c(l, i, m) * s->c(m, j, k);
                    }
                    if (sum != 0) throw GeometryError("structure constants violate the Jacobi identity");
                }
    return s;
}

Expr Space::basis_apply(size_t i, const Expr& f) const {
    if (mode_ == Mode::ConstantStructure) return Expr();
    return diff(f, chart_, i);
}

VectorField VectorField::zero(SpacePtr s) {
    size_t n = s->dim();
    return VectorField{std::move(s), std::vector<Expr>(n)};
}

VectorField VectorField::basis(SpacePtr s, size_t i) {
    auto v = zero(std::move(s));
    v.comp.at(i) = Expr(1);
    return v;
}

Expr VectorField::apply(const Expr& f) const {
    Expr r;
    if (space->mode() == Mode::ConstantStructure) return r;
    for (size_t i = 0; i < comp.size(); ++i)
        if (!comp[i].is_zero()) r += comp[i] * space->basis_apply(i, f);
    return r;
}

bool VectorField::is_zero() const {
    for (const auto& c : comp)
        if (!c.is_zero()) return false;
    return true;
}

static void same_space(const SpacePtr& a, const SpacePtr& b) {
    if (a != b && (a->mode() != b->mode() || a->dim() != b->dim()))
        throw GeometryError("vector fields live on different spaces");
}

VectorField operator+(const VectorField& a, const VectorField& b) {
    same_space(a.space, b.space);
    VectorField r = a;
    for (size_t i = 0; i < r.comp.size(); ++i) r.comp[i] += b.comp[i];
    return r;
}

VectorField operator-(const VectorField& a, const VectorField& b) {
    same_space(a.space, b.space);
    VectorField r = a;
    for (size_t i = 0; i < r.comp.size(); ++i) r.comp[i] -= b.comp[i];
    return r;
}

VectorField operator-(const VectorField& a) {
    VectorField r = a;
    for (auto& c : r.comp) c = -c;
    return r;
}

VectorField operator*(const Expr& f, const VectorField& v) {
    VectorField r = v;
    for (auto& c : r.comp) c = f * c;
    return r;
}

Expr OneForm::operator()(const VectorField& v) const {
    Expr r;
    for (size_t i = 0; i < comp.size(); ++i)
        if (!comp[i].is_zero() && !v.comp[i].is_zero()) r += comp[i] * v.comp[i];
    return r;
}

OneForm operator+(const OneForm& a, const OneForm& b) {
    OneForm r = a;
    for (size_t i = 0; i < r.comp.size(); ++i) r.comp[i] += b.comp[i];
    return r;
}

OneForm operator*(const Expr& f, const OneForm& a) {
    OneForm r = a;
    for (auto& c : r.comp) c = f * c;
    return r;
}

Expr Metric::operator()(const VectorField& a, const VectorField& b) const {
    Expr r;
    for (size_t i = 0; i < g.size(); ++i) {
        if (a.comp[i].is_zero()) continue;
        for (size_t j = 0; j < g.size(); ++j)
            if (!b.comp[j].is_zero() && !g[i][j].is_zero()) r += a.comp[i] * g[i][j] * b.comp[j];
    }
    return r;
}

VectorField lie_bracket(const VectorField& X, const VectorField& Y) {
    same_space(X.space, Y.space);
    const Space& s = *X.space;
    size_t n = s.dim();
    VectorField r = VectorField::zero(X.space);
    if (s.mode() == Mode::Coordinates) {
        for (size_t k = 0; k < n; ++k) r.comp[k] = X.apply(Y.comp[k]) - Y.apply(X.comp[k]);
    }
    if (s.has_structure()) {
        for (size_t i = 0; i < n; ++i) {
            if (X.comp[i].is_zero()) continue;
            for (size_t j = 0; j < n; ++j) {
                if (Y.comp[j].is_zero()) continue;
                Expr xy = X.comp[i] * Y.comp[j];
                for (size_t k = 0; k < n; ++k)
                    if (s.c(i, j, k) != 0) r.comp[k] += Expr(s.c(i, j, k)) * xy;
            }
        }
    }
    return r;
}

Expr d_oneform(const OneForm& a, const VectorField& X, const VectorField& Y) {
    return X.apply(a(Y)) - Y.apply(a(X)) - a(lie_bracket(X, Y));
}

Expr lie_derivative_metric(const VectorField& Z, const Metric& g, const VectorField& X, const VectorField& Y) {
    return Z.apply(g(X, Y)) - g(lie_bracket(Z, X), Y) - g(X, lie_bracket(Z, Y));
}

// ---------------------------------------------------------------------------

bool SymbolicLinAlg::nonzero(const Expr& e) const {
    if (e.is_zero()) return false;
    if (!e.has_atoms()) return true;
    return !is_zero(e, chart, cfg).zero();
}

namespace {

// Reduced row echelon form in place; returns pivot columns.
std::vector<size_t> rref(ExprMatrix& m, const SymbolicLinAlg& la, size_t ncols) {
    std::vector<size_t> pivots;
    size_t rows = m.size(), row = 0;
    for (size_t col = 0; col < ncols && row < rows; ++col) {
        int best = -1;
        size_t best_cost = 0;
        for (size_t r = row; r < rows; ++r) {
            if (!la.nonzero(m[r][col])) continue;
            size_t cost = m[r][col].complexity();
            if (best < 0 || cost < best_cost) {
                best = static_cast<int>(r);
                best_cost = cost;
            }
        }
        if (best < 0) {
            for (size_t r = row; r < rows; ++r) m[r][col] = Expr();
            continue;
        }
        std::swap(m[row], m[best]);
        Expr inv = Expr(1) / m[row][col];
        for (auto& e : m[row]) e = e * inv;
        m[row][col] = Expr(1);
        for (size_t r = 0; r < rows; ++r) {
            if (r == row || m[r][col].is_zero()) continue;
            Expr f = m[r][col];
            for (size_t c = 0; c < m[r].size(); ++c)
                if (!m[row][c].is_zero()) m[r][c] -= f * m[row][c];
            m[r][col] = Expr();
        }
        pivots.push_back(col);
        ++row;
    }
    return pivots;
}

}  // namespace

std::optional<ExprMatrix> SymbolicLinAlg::inverse(ExprMatrix m) const {
    size_t n = m.size();
    for (size_t i = 0; i < n; ++i) {
        m[i].resize(2 * n);
        for (size_t j = 0; j < n; ++j) m[i][n + j] = Expr(i == j ? 1L : 0L);
    }
    auto piv = rref(m, *this, n);
    if (piv.size() < n) return std::nullopt;
    ExprMatrix inv(n);
    for (size_t i = 0; i < n; ++i) inv[i].assign(m[i].begin() + n, m[i].end());
    return inv;
}

std::vector<std::vector<Expr>> SymbolicLinAlg::nullspace(ExprMatrix m) const {
    size_t ncols = m.empty() ? 0 : m[0].size();
    auto piv = rref(m, *this, ncols);
    std::vector<std::vector<Expr>> basis;
    for (size_t free = 0; free < ncols; ++free) {
        if (std::find(piv.begin(), piv.end(), free) != piv.end()) continue;
        std::vector<Expr> v(ncols);
        v[free] = Expr(1);
        for (size_t r = 0; r < piv.size(); ++r) v[piv[r]] = -m[r][free];
        basis.push_back(std::move(v));
    }
    return basis;
}

std::optional<std::vector<Expr>> SymbolicLinAlg::solve(ExprMatrix m, std::vector<Expr> rhs) const {
    size_t ncols = m.empty() ? 0 : m[0].size();
    for (size_t i = 0; i < m.size(); ++i) m[i].push_back(rhs[i]);
    auto piv = rref(m, *this, ncols);
    if (piv.size() < ncols) return std::nullopt;
    for (size_t r = piv.size(); r < m.size(); ++r)
        if (nonzero(m[r][ncols])) return std::nullopt;
    std::vector<Expr> x(ncols);
    for (size_t r = 0; r < piv.size(); ++r) x[piv[r]] = m[r][ncols];
    return x;
}

Expr determinant(const ExprMatrix& m) {
    size_t n = m.size();
    if (n == 0) return Expr(1);
    if (n == 1) return m[0][0];
    Expr det;
    for (size_t j = 0; j < n; ++j) {
        if (m[0][j].is_zero()) continue;
        ExprMatrix minor;
        for (size_t i = 1; i < n; ++i) {
            std::vector<Expr> row;
            for (size_t k = 0; k < n; ++k)
                if (k != j) row.push_back(m[i][k]);
            minor.push_back(std::move(row));
        }
        Expr t = m[0][j] * determinant(minor);
        det = j % 2 ? det - t : det + t;
    }
    return det;
}

std::vector<OneForm> annihilator(const FrameField& F, const SampleConfig& cfg) {
    if (F.empty()) throw GeometryError("empty frame");
    const auto& sp = F.front().space;
    if (!pointwise_independent(F, cfg)) throw GeometryError("frame is rank deficient");
    ExprMatrix m;
    for (const auto& f : F) m.push_back(f.comp);
    SymbolicLinAlg la{sp->chart(), cfg};
    std::vector<OneForm> out;
    for (auto& v : la.nullspace(m)) out.push_back(OneForm{sp, std::move(v)});
    return out;
}

double min_relative_singular_value(const FrameField& F, const SampleConfig& cfg) {
    if (F.empty()) return 1;
    const auto& sp = F.front().space;
    const Chart& c = sp->chart();
    size_t n = sp->dim(), k = F.size();
    if (k > n) return 0;
    int count = sp->mode() == Mode::ConstantStructure ? 1 : cfg.samples;
    std::vector<Expr> all;
    for (const auto& f : F)
        for (const auto& e : f.comp) all.push_back(e);
    double worst = 1;
    for (const auto& p : sample_points(c, cfg, count, all)) {
        auto d = to_double(p);
        Eigen::MatrixXd M(n, k);
        for (size_t j = 0; j < k; ++j)
            for (size_t i = 0; i < n; ++i) M(i, j) = eval(F[j].comp[i], c, d);
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(M);
        const auto& s = svd.singularValues();
        double rel = s(0) > 0 ? s(s.size() - 1) / s(0) : 0;
        worst = std::min(worst, rel);
    }
    return worst;
}

bool pointwise_independent(const FrameField& F, const SampleConfig& cfg) {
    return min_relative_singular_value(F, cfg) > 1e-8;
}

void check_metric(const Metric& g, const SampleConfig& cfg) {
    size_t n = g.dim();
    for (size_t i = 0; i < n; ++i)
        for (size_t j = 0; j < i; ++j)
            if (g.g[i][j] != g.g[j][i]) throw GeometryError("metric is not symmetric");
    const Chart& c = g.space->chart();
    int count = g.space->mode() == Mode::ConstantStructure ? 1 : cfg.samples;
    std::vector<Expr> all;
    for (const auto& row : g.g) all.insert(all.end(), row.begin(), row.end());
    for (const auto& p : sample_points(c, cfg, count, all)) {
        auto d = to_double(p);
        Eigen::MatrixXd M(n, n);
        for (size_t i = 0; i < n; ++i)
            for (size_t j = 0; j < n; ++j) M(i, j) = eval(g.g[i][j], c, d);
        for (size_t k = 1; k <= n; ++k)
            if (!(M.topLeftCorner(k, k).determinant() > 0))
                throw GeometryError("metric is not positive definite at a sample point");
    }
}

FullFrame::FullFrame(FrameField F, const SampleConfig& cfg) : F_(std::move(F)), cfg_(cfg) {
    if (F_.empty()) throw GeometryError("empty frame");
    size_t n = F_.size();
    if (n != F_.front().space->dim()) throw GeometryError("frame does not span the tangent space");
    if (!pointwise_independent(F_, cfg_)) throw GeometryError("singular frame matrix");
    ExprMatrix m(n, std::vector<Expr>(n));
    for (size_t i = 0; i < n; ++i)
        for (size_t j = 0; j < n; ++j) m[i][j] = F_[j].comp[i];
    SymbolicLinAlg la{chart(), cfg_};
    auto inv = la.inverse(m);
    if (!inv) throw GeometryError("singular frame matrix");
    inv_ = std::move(*inv);
    b_.assign(n * n * n, Expr());
    for (size_t i = 0; i < n; ++i)
        for (size_t j = i + 1; j < n; ++j) {
            auto a = expand(lie_bracket(F_[i], F_[j]));
            for (size_t k = 0; k < n; ++k) {
                b_[(i * n + j) * n + k] = a[k];
                b_[(j * n + i) * n + k] = -a[k];
            }
        }
}

std::vector<Expr> FullFrame::expand(const VectorField& v) const {
    size_t n = size();
    std::vector<Expr> a(n);
    for (size_t i = 0; i < n; ++i)
        for (size_t j = 0; j < n; ++j)
            if (!inv_[i][j].is_zero() && !v.comp[j].is_zero()) a[i] += inv_[i][j] * v.comp[j];
    return a;
}

VectorField FullFrame::combine(const std::vector<Expr>& a) const {
    VectorField r = VectorField::zero(space());
    for (size_t i = 0; i < a.size(); ++i)
        if (!a[i].is_zero()) r = r + a[i] * F_[i];
    return r;
}

}  // namespace srflat
