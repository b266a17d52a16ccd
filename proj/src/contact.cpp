#include <Eigen/Dense>
#include <cmath>

#include "srflat/flatness.hpp"

namespace srflat {

namespace {

ExprMatrix zeros(size_t n) { return ExprMatrix(n, std::vector<Expr>(n)); }

ExprMatrix identity(size_t n) {
    auto m = zeros(n);
    for (size_t i = 0; i < n; ++i) m[i][i] = Expr(1);
    return m;
}

ExprMatrix mul(const ExprMatrix& a, const ExprMatrix& b) {
    size_t n = a.size();
    auto m = zeros(n);
    for (size_t i = 0; i < n; ++i)
        for (size_t l = 0; l < n; ++l) {
            if (a[i][l].is_zero()) continue;
            for (size_t j = 0; j < n; ++j)
                if (!b[l][j].is_zero()) m[i][j] += a[i][l] * b[l][j];
        }
    return m;
}

ExprMatrix axpy(const ExprMatrix& a, const Expr& s, const ExprMatrix& b) {
    auto m = a;
    for (size_t i = 0; i < a.size(); ++i)
        for (size_t j = 0; j < a.size(); ++j)
            if (!b[i][j].is_zero()) m[i][j] += s * b[i][j];
    return m;
}

ExprMatrix scale(const Expr& s, const ExprMatrix& a) { return axpy(zeros(a.size()), s, a); }

std::string matrix_string(const ExprMatrix& m) {
    std::string s = "[";
    for (size_t i = 0; i < m.size(); ++i) {
        s += i ? "; " : "";
        for (size_t j = 0; j < m[i].size(); ++j) s += (j ? ", " : "") + to_string(m[i][j]);
    }
    return s + "]";
}

std::vector<double> spectrum_at(const ExprMatrix& B, const Chart& c, const std::vector<mpq_class>& p) {
    size_t k = B.size();
    Eigen::MatrixXd M(k, k);
    for (size_t i = 0; i < k; ++i)
        for (size_t j = 0; j < k; ++j) M(long(i), long(j)) = B[i][j].is_zero() ? 0.0 : eval(B[i][j], c, p);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(M.transpose() * M);
    auto ev = es.eigenvalues();
    double mu_max = std::sqrt(std::max(0.0, ev(long(k) - 1)));
    std::vector<double> lam;
    for (long i = long(k) - 1; i >= 0; i -= 2) {
        double mu = std::sqrt(std::max(0.0, ev(i)));
        if (!(mu > 1e-9 * std::max(1.0, mu_max))) throw FlatnessError("degenerate d theta on E: not contact");
        lam.push_back(mu_max / mu);
    }
    return lam;
}

}  // namespace

ContactData contact_normalize(const SRStructure& S, const SampleConfig& cfg, bool flip) {
    size_t n = S.ambient(), k = S.rank();
    if (n % 2 == 0 || k + 1 != n) throw FlatnessError("contact certifier needs rank 2n in dimension 2n+1");
    require_growth(S, {k, n}, cfg);
    const auto& sp = S.space();
    const Chart& chart = S.chart();
    ContactData D;

    auto ann = annihilator(S.frame, cfg);
    if (ann.size() != 1) throw FlatnessError("E is not a hyperplane distribution");
    const OneForm& theta0 = ann[0];
    // d theta0(X_i, X_j) = -theta0([X_i, X_j]) on E
    auto B = zeros(k);
    std::vector<Expr> entries;
    for (size_t i = 0; i < k; ++i)
        for (size_t j = i + 1; j < k; ++j) {
            B[i][j] = -theta0(lie_bracket(S.frame[i], S.frame[j]));
            B[j][i] = -B[i][j];
            entries.push_back(B[i][j]);
        }

    std::vector<std::vector<mpq_class>> pts;
    if (sp->mode() == Mode::ConstantStructure) pts = {{}};
    else pts = sample_points(chart, cfg, cfg.samples, entries);
    std::vector<double> ref;
    for (const auto& p : pts) {
        auto lam = spectrum_at(B, chart, p);
        if (ref.empty()) ref = lam;
        for (size_t j = 0; j < lam.size(); ++j)
            if (std::fabs(lam[j] - ref[j]) > 1e-7 * std::max(1.0, ref[j]))
                throw FlatnessError("lambda spectrum varies across samples: the symbol is not constant");
    }
    for (size_t j = 0; j < ref.size();) {
        size_t l = j;
        while (l < ref.size() && std::fabs(ref[l] - ref[j]) <= 1e-7 * ref[j]) ++l;
        D.lambda.push_back(j == 0 ? mpq_class(1) : rationalize(ref[j]));
        D.multiplicity.push_back(l - j);
        j = l;
    }

    // normalize so the largest |eigenvalue| of A is 1
    Expr mu;
    if (k == 2) {
        mu = B[0][1];
    } else {
        mpq_class w = 0;
        for (size_t j = 0; j < D.lambda.size(); ++j) w += D.multiplicity[j] / (D.lambda[j] * D.lambda[j]);
        Expr tr;
        for (size_t i = 0; i < k; ++i)
            for (size_t j = 0; j < k; ++j)
                if (!B[i][j].is_zero()) tr += B[i][j] * B[i][j];
        mu = root(tr / Expr(2 * w));
    }
    if (flip) mu = -mu;
    D.theta = OneForm{sp, theta0.comp};
    for (auto& c : D.theta.comp) c = c / mu;
    D.A = scale(Expr(1) / mu, B);

    // -A^2 has eigenvalues t_j = 1/lambda_j^2; Lambda = q(-A^2) by Lagrange interpolation
    auto N = scale(Expr(-1), mul(D.A, D.A));
    size_t m = D.lambda.size();
    D.Lambda = zeros(k);
    for (size_t j = 0; j < m; ++j) {
        mpq_class tj = 1 / (D.lambda[j] * D.lambda[j]);
        auto P = identity(k);
        for (size_t l = 0; l < m; ++l) {
            if (l == j) continue;
            mpq_class tl = 1 / (D.lambda[l] * D.lambda[l]);
            P = scale(Expr(1 / (tj - tl)), mul(P, axpy(N, Expr(-tl), identity(k))));
        }
        D.pr.push_back(P);
        D.Lambda = axpy(D.Lambda, Expr(D.lambda[j]), P);
    }
    D.J = mul(D.Lambda, D.A);
    auto J2 = axpy(mul(D.J, D.J), Expr(1), identity(k));
    for (const auto& row : J2)
        for (const auto& e : row)
            if (!is_zero(e, chart, cfg).zero()) throw FlatnessError("J^2 = -id fails: lambda spectrum not recovered");

    // Reeb field: theta(Z) = 1, d theta(Z, X_i) = 0
    ExprMatrix M(n, std::vector<Expr>(n));
    for (size_t c = 0; c < n; ++c) {
        auto e = VectorField::basis(sp, c);
        M[0][c] = D.theta.comp[c];
        for (size_t i = 0; i < k; ++i) M[i + 1][c] = d_oneform(D.theta, e, S.frame[i]);
    }
    std::vector<Expr> rhs(n);
    rhs[0] = Expr(1);
    auto z = SymbolicLinAlg{chart, cfg}.solve(M, rhs);
    if (!z) throw FlatnessError("Reeb system is not uniquely solvable");
    D.Z = VectorField{sp, *z};
    FrameField F = S.frame;
    F.push_back(D.Z);
    D.frame = std::make_shared<const FullFrame>(F, cfg);

    std::string lam;
    for (size_t j = 0; j < m; ++j)
        lam += (j ? ", " : "") + to_string(D.lambda[j]) + (D.multiplicity[j] > 1 ? " x" + std::to_string(D.multiplicity[j]) : "");
    D.transcript = {{"theta", to_string(D.theta)}, {"lambda", "(" + lam + ")"},  {"A", matrix_string(D.A)},
                    {"J", matrix_string(D.J)},       {"Z", to_string(D.Z)}};
    return D;
}

ContactConnection contact_connection(const ContactData& D) {
    const FullFrame& F = *D.frame;
    size_t N = F.size(), k = N - 1;
    using Vec = std::vector<Expr>;
    auto LC = koszul_orthonormal(D.frame);

    auto bracket = [&](const Vec& a, const Vec& b) { return F.expand(lie_bracket(F.combine(a), F.combine(b))); };
    auto inner = [&](const Vec& a, const Vec& b) {
        Expr r;
        for (size_t i = 0; i < N; ++i)
            if (!a[i].is_zero() && !b[i].is_zero()) r += a[i] * b[i];
        return r;
    };
    auto apply_E = [&](const ExprMatrix& P, const Vec& a) {
        Vec r(N);
        for (size_t c = 0; c < k; ++c)
            for (size_t d = 0; d < k; ++d)
                if (!P[c][d].is_zero() && !a[d].is_zero()) r[c] += P[c][d] * a[d];
        return r;
    };
    auto sub = [&](Vec a, const Vec& b) {
        for (size_t i = 0; i < N; ++i) a[i] -= b[i];
        return a;
    };
    auto lc = [&](const Vec& v, const Vec& w) {
        Vec r(N);
        for (size_t i = 0; i < N; ++i) {
            if (v[i].is_zero()) continue;
            auto c = LC.covariant(i, w);
            for (size_t j = 0; j < N; ++j)
                if (!c[j].is_zero()) r[j] += v[i] * c[j];
        }
        return r;
    };
    // (L_V g_I)(A, B)
    auto lie_g = [&](const Vec& v, const Vec& a, const Vec& b) {
        return F.combine(v).apply(inner(a, b)) - inner(bracket(v, a), b) - inner(a, bracket(v, b));
    };
    auto unit = [&](size_t i) {
        Vec e(N);
        e[i] = Expr(1);
        return e;
    };

    ContactConnection C{FrameConnection(D.frame), FrameConnection(D.frame)};
    Expr half(mpq_class(1, 2));
    for (size_t a = 0; a < N; ++a)
        for (size_t b = 0; b < k; ++b) {
            Vec out(N);
            for (const auto& P : D.pr) {
                Vec Pa = apply_E(P, unit(a)), Pb = apply_E(P, unit(b)), Qa = sub(unit(a), Pa);
                auto t1 = apply_E(P, lc(Pa, Pb));
                auto t2 = apply_E(P, bracket(Qa, Pb));
                for (size_t c = 0; c < k; ++c) out[c] += t1[c] + t2[c];
                for (size_t c = 0; c < k; ++c) out[c] += half * lie_g(Qa, Pb, apply_E(P, unit(c)));
            }
            for (size_t c = 0; c < N; ++c) C.nabla.at(c, a, b) = out[c];
        }

    // nabla' = nabla + 1/2 (nabla J) J
    for (size_t a = 0; a < N; ++a)
        for (size_t b = 0; b < k; ++b) {
            Vec W(N);
            for (size_t c = 0; c < k; ++c) W[c] = D.J[c][b];
            auto JW = apply_E(D.J, W);
            auto t = sub(C.nabla.covariant(a, JW), apply_E(D.J, C.nabla.covariant(a, W)));
            for (size_t c = 0; c < N; ++c) C.nabla_prime.at(c, a, b) = C.nabla(c, a, b) + half * t[c];
        }
    return C;
}

namespace {

FlatnessReport contact_variant(const SRStructure& S, const SampleConfig& cfg, bool flip) {
    auto D = contact_normalize(S, cfg, flip);
    auto C = contact_connection(D);
    size_t N = D.frame->size(), k = N - 1;
    std::vector<std::string> names = S.names;
    names.push_back("Z");
    auto T = frame_torsion(C.nabla_prime);
    auto R = frame_curvature(C.nabla_prime);
    std::vector<Residual> res;
    for (size_t i = 0; i < N; ++i)
        for (size_t j = i + 1; j < N; ++j)
            for (size_t c = 0; c < N; ++c) {
                Expr target = (c == k && j < k) ? D.A[i][j] : Expr(0);
                res.push_back({"T'(" + names[i] + "," + names[j] + ")^" + names[c],
                               T[(c * N + i) * N + j] - target});
            }
    for (size_t i = 0; i < N; ++i)
        for (size_t j = i + 1; j < N; ++j)
            for (size_t m = 0; m < N; ++m)
                for (size_t l = 0; l < N; ++l)
                    res.push_back({"R'(" + names[i] + "," + names[j] + ")" + names[m] + "^" + names[l], R(l, i, j, m)});
    auto rep = certify(res, S.chart(), cfg);
    rep.transcript = D.transcript;
    return rep;
}

}  // namespace

FlatnessReport contact_flatness(const SRStructure& S, const SampleConfig& cfg) {
    auto rep = contact_variant(S, cfg, false);
    auto alt = contact_variant(S, cfg, true);
    if (rep.verdict != alt.verdict)
        throw std::logic_error(std::string("contact orientation variants disagree: ") + to_string(rep.verdict) +
                               " vs " + to_string(alt.verdict));
    rep.note = "checked R' = 0 and T' = d theta (x) Z for theta and -theta";
    return rep;
}

}  // namespace srflat
