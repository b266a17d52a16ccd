#include "srflat/flatness.hpp"

namespace srflat {

G235Data g235_canonical_data(const SRStructure& S, const SampleConfig& cfg, Y2Reading y2) {
    require_growth(S, {2, 3, 5}, cfg);
    const Chart& chart = S.chart();
    G235Data D;
    const VectorField& X1 = S.frame[0];
    const VectorField& X2 = S.frame[1];
    VectorField X3 = lie_bracket(X1, X2), X4 = lie_bracket(X1, X3), X5 = lie_bracket(X2, X3);
    try {
        D.bracket_frame = std::make_shared<const FullFrame>(FrameField{X1, X2, X3, X4, X5}, cfg);
    } catch (const GeometryError& e) {
        throw FlatnessError(std::string("(X1, ..., X5) is not a frame: ") + e.what());
    }
    auto c = [&](size_t i, size_t j, size_t k) { return D.c(i, j, k); };

    Expr a1 = c(1, 4, 4) + c(1, 5, 5), a2 = c(2, 4, 4) + c(2, 5, 5);
    D.Z = X3 + (c(2, 3, 3) + a2) * X1 - (c(1, 3, 3) + a1) * X2;
    D.Y1 = X4 - a1 * X3 + (c(2, 4, 3) - X2.apply(a1) + c(2, 4, 4) * a1 + c(2, 4, 5) * a2) * X1 -
           (c(1, 4, 3) - X1.apply(a1) + c(1, 4, 4) * a1 + c(1, 4, 5) * a2) * X2;
    // printed reading: c_25^4 + c_25^5; symmetry with Y1 suggests c_24^4 + c_25^5
    Expr b = y2 == Y2Reading::Printed ? c(2, 5, 4) + c(2, 5, 5) : a2;
    D.Y2 = X5 - a2 * X3 + (c(2, 5, 3) - X2.apply(b) + c(2, 5, 4) * a1 + c(2, 5, 5) * a2) * X1 -
           (c(1, 5, 3) - X1.apply(b) + c(1, 5, 4) * a1 + c(1, 5, 5) * a2) * X2;
    D.y2_ambiguous = !is_zero(X1.apply(b - a2), chart, cfg).zero() || !is_zero(X2.apply(b - a2), chart, cfg).zero();

    D.graded.frame = std::make_shared<const FullFrame>(FrameField{X1, X2, D.Z, D.Y1, D.Y2}, cfg);
    D.graded.names = {"X1", "X2", "Z", "Y1", "Y2"};
    D.graded.layers = {2, 1, 2};

    std::string table;
    for (size_t i = 1; i <= 5; ++i)
        for (size_t j = i + 1; j <= 5; ++j)
            for (size_t k = 1; k <= 5; ++k)
                if (!c(i, j, k).is_zero())
                    table += (table.empty() ? "" : "; ") + ("c" + std::to_string(i) + std::to_string(j) + "^" +
                                                            std::to_string(k) + " = " + to_string(c(i, j, k)));
    D.transcript = {{"c", table.empty() ? "all zero" : table},
                    {"Z", to_string(D.Z)},
                    {"Y1", to_string(D.Y1)},
                    {"Y2", to_string(D.Y2)}};
    return D;
}

FrameConnection g235_connection(const G235Data& D) {
    const FullFrame& G = *D.graded.frame;
    FrameConnection C(D.graded.frame);
    auto LC = koszul_orthonormal(D.graded.frame);
    Expr half(mpq_class(1, 2));
    // slots: X1, X2 = 0, 1; Z = 2; Y1, Y2 = 3, 4. E and V3 carry the same block; Z is parallel
    for (size_t i = 0; i < 5; ++i)
        for (size_t j = 0; j < 2; ++j)
            for (size_t k = 0; k < 2; ++k) {
                Expr g = i < 2 ? LC(k, i, j) : half * (G.b(i, j, k) - G.b(i, k, j));
                C.at(k, i, j) = g;
                C.at(3 + k, i, 3 + j) = g;
            }
    return C;
}

FlatnessReport g235_flatness(const SRStructure& S, const SampleConfig& cfg, Y2Reading y2) {
    auto D = g235_canonical_data(S, cfg, y2);
    auto C = g235_connection(D);
    const auto& names = D.graded.names;
    auto T = frame_torsion(C);
    auto R = frame_curvature(C);
    // T(X2, X1) = Z, T(Z, X1) = Y1, T(Z, X2) = Y2, stored with i < j
    auto target = [](size_t k, size_t i, size_t j) -> long {
        if (i == 0 && j == 1 && k == 2) return -1;
        if (i == 0 && j == 2 && k == 3) return -1;
        if (i == 1 && j == 2 && k == 4) return -1;
        return 0;
    };
    std::vector<Residual> res;
    for (size_t i = 0; i < 5; ++i)
        for (size_t j = i + 1; j < 5; ++j)
            for (size_t k = 0; k < 5; ++k)
                res.push_back({"T(" + names[i] + "," + names[j] + ")^" + names[k],
                               T[(k * 5 + i) * 5 + j] - Expr(target(k, i, j))});
    for (size_t i = 0; i < 5; ++i)
        for (size_t j = i + 1; j < 5; ++j)
            for (size_t m = 0; m < 5; ++m)
                for (size_t l = 0; l < 5; ++l)
                    res.push_back({"R(" + names[i] + "," + names[j] + ")" + names[m] + "^" + names[l], R(l, i, j, m)});
    auto rep = certify(res, S.chart(), cfg);
    rep.transcript = D.transcript;
    if (y2 == Y2Reading::Printed) {
        rep.warnings.push_back("Y2 uses the printed derivative term X_i(c25^4 + c25^5)");
        if (D.y2_ambiguous)
            rep.warnings.push_back("the printed Y2 derivative term differs from X_i(c24^4 + c25^5) for this structure");
    } else {
        rep.warnings.push_back("Y2 uses the symmetric derivative term X_i(c24^4 + c25^5)");
    }
    return rep;
}

}  // namespace srflat
