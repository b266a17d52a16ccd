#include "srflat/riemann.hpp"

namespace srflat {

static ExprMatrix inverse_metric(const Metric& g, const SampleConfig& cfg) {
    SymbolicLinAlg la{g.space->chart(), cfg};
    auto inv = la.inverse(g.g);
    if (!inv) throw GeometryError("degenerate metric");
    return *inv;
}

ChristoffelTable levi_civita(const Metric& g, const SampleConfig& cfg) {
    const Space& s = *g.space;
    if (s.mode() != Mode::Coordinates) throw GeometryError("levi_civita needs a coordinate chart");
    size_t n = g.dim();
    ExprMatrix gi = inverse_metric(g, cfg);
    // dg[l][i][j] = d_l g_ij
    std::vector<std::vector<std::vector<Expr>>> dg(n, std::vector<std::vector<Expr>>(n, std::vector<Expr>(n)));
    for (size_t l = 0; l < n; ++l)
        for (size_t i = 0; i < n; ++i)
            for (size_t j = i; j < n; ++j) dg[l][i][j] = dg[l][j][i] = s.basis_apply(l, g.g[i][j]);
    ChristoffelTable C{g.space, n, std::vector<Expr>(n * n * n)};
    for (size_t i = 0; i < n; ++i)
        for (size_t j = i; j < n; ++j) {
            std::vector<Expr> lower(n);
            for (size_t l = 0; l < n; ++l) lower[l] = dg[i][j][l] + dg[j][i][l] - dg[l][i][j];
            for (size_t k = 0; k < n; ++k) {
                Expr sum;
                for (size_t l = 0; l < n; ++l)
                    if (!gi[k][l].is_zero() && !lower[l].is_zero()) sum += gi[k][l] * lower[l];
                sum = sum * Expr(mpq_class(1, 2));
                C.G[(k * n + i) * n + j] = sum;
                C.G[(k * n + j) * n + i] = sum;
            }
        }
    return C;
}

CurvatureTensor riemann_tensor(const ChristoffelTable& C) {
    size_t n = C.n;
    const Space& s = *C.space;
    CurvatureTensor R{n, std::vector<Expr>(n * n * n * n)};
    for (size_t l = 0; l < n; ++l)
        for (size_t i = 0; i < n; ++i)
            for (size_t j = i + 1; j < n; ++j)
                for (size_t k = 0; k < n; ++k) {
                    Expr r = s.basis_apply(i, C(l, j, k)) - s.basis_apply(j, C(l, i, k));
                    for (size_t m = 0; m < n; ++m) {
                        if (!C(l, i, m).is_zero() && !C(m, j, k).is_zero()) r += C(l, i, m) * C(m, j, k);
                        if (!C(l, j, m).is_zero() && !C(m, i, k).is_zero()) r -= C(l, j, m) * C(m, i, k);
                    }
                    R.R[((l * n + i) * n + j) * n + k] = r;
                    R.R[((l * n + j) * n + i) * n + k] = -r;
                }
    return R;
}

Expr gaussian_curvature(const Metric& g, const SampleConfig& cfg) {
    if (g.dim() != 2) throw GeometryError("gaussian curvature needs a 2D metric");
    auto R = riemann_tensor(levi_civita(g, cfg));
    Expr num = R(0, 0, 1, 1) * g.g[0][0] + R(1, 0, 1, 1) * g.g[1][0];
    return num / determinant(g.g);
}

FlatnessReport riemannian_flatness(const Metric& g, const SampleConfig& cfg) {
    check_metric(g, cfg);
    auto C = levi_civita(g, cfg);
    auto R = riemann_tensor(C);
    size_t n = g.dim();
    const auto& names = g.space->basis_names();
    std::vector<Residual> res;
    for (size_t l = 0; l < n; ++l)
        for (size_t i = 0; i < n; ++i)
            for (size_t j = i + 1; j < n; ++j)
                for (size_t k = 0; k < n; ++k)
                    res.push_back({"R^" + names[l] + "_" + names[i] + names[j] + names[k], R(l, i, j, k)});
    auto rep = certify(res, g.space->chart(), cfg);
    for (size_t k = 0; k < n; ++k)
        for (size_t i = 0; i < n; ++i)
            for (size_t j = i; j < n; ++j)
                if (!C(k, i, j).is_zero())
                    rep.transcript.push_back({"Gamma^" + names[k] + "_" + names[i] + names[j], to_string(C(k, i, j))});
    return rep;
}

FrameConnection::FrameConnection(std::shared_ptr<const FullFrame> f) : frame(std::move(f)) {
    size_t n = frame->size();
    G.assign(n * n * n, Expr());
}

std::vector<Expr> FrameConnection::covariant(size_t i, const std::vector<Expr>& y) const {
    size_t n = this->n();
    std::vector<Expr> out(n);
    const VectorField& Ei = (*frame)[i];
    for (size_t j = 0; j < n; ++j) {
        if (y[j].is_zero()) continue;
        out[j] += Ei.apply(y[j]);
        for (size_t k = 0; k < n; ++k)
            if (!(*this)(k, i, j).is_zero()) out[k] += y[j] * (*this)(k, i, j);
    }
    return out;
}

std::vector<Expr> frame_torsion(const FrameConnection& C) {
    size_t n = C.n();
    const FullFrame& F = *C.frame;
    std::vector<Expr> T(n * n * n);
    for (size_t i = 0; i < n; ++i)
        for (size_t j = i + 1; j < n; ++j)
            for (size_t k = 0; k < n; ++k) {
                Expr t = C(k, i, j) - C(k, j, i) - F.b(i, j, k);
                T[(k * n + i) * n + j] = t;
                T[(k * n + j) * n + i] = -t;
            }
    return T;
}

CurvatureTensor frame_curvature(const FrameConnection& C) {
    size_t n = C.n();
    const FullFrame& F = *C.frame;
    CurvatureTensor R{n, std::vector<Expr>(n * n * n * n)};
    for (size_t l = 0; l < n; ++l)
        for (size_t i = 0; i < n; ++i)
            for (size_t j = i + 1; j < n; ++j)
                for (size_t k = 0; k < n; ++k) {
                    Expr r = F[i].apply(C(l, j, k)) - F[j].apply(C(l, i, k));
                    for (size_t m = 0; m < n; ++m) {
                        if (!C(m, j, k).is_zero() && !C(l, i, m).is_zero()) r += C(m, j, k) * C(l, i, m);
                        if (!C(m, i, k).is_zero() && !C(l, j, m).is_zero()) r -= C(m, i, k) * C(l, j, m);
                        if (!F.b(i, j, m).is_zero() && !C(l, m, k).is_zero()) r -= F.b(i, j, m) * C(l, m, k);
                    }
                    R.R[((l * n + i) * n + j) * n + k] = r;
                    R.R[((l * n + j) * n + i) * n + k] = -r;
                }
    return R;
}

FrameConnection koszul_orthonormal(std::shared_ptr<const FullFrame> f) {
    FrameConnection C(f);
    size_t n = f->size();
    Expr half(mpq_class(1, 2));
    for (size_t i = 0; i < n; ++i)
        for (size_t j = 0; j < n; ++j)
            for (size_t k = 0; k < n; ++k) C.at(k, i, j) = half * (f->b(i, j, k) - f->b(i, k, j) - f->b(j, k, i));
    return C;
}

}  // namespace srflat
