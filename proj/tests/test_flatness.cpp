#include <gtest/gtest.h>

#include "srflat/flatness.hpp"

using namespace srflat;

namespace {

SpacePtr chart(std::vector<std::string> names, std::vector<std::string> constraints = {}) {
    return Space::coordinates(Chart(std::move(names), std::move(constraints)));
}

VectorField V(const SpacePtr& s, std::vector<std::string> comps) {
    VectorField v{s, {}};
    for (const auto& c : comps) v.comp.push_back(simplify(parse(c, s->chart())));
    return v;
}

SRStructure constant_frame(const StratifiedAlgebra& a) {
    auto s = Space::constant_structure(a.names(), a.triples());
    FrameField F;
    for (size_t i = 0; i < a.strata()[0]; ++i) F.push_back(VectorField::basis(s, i));
    return make_sr(F);
}

SRStructure engel_coords(const std::string& scale = "1") {
    auto s = chart({"x", "y", "z", "w"});
    auto X = V(s, {"1", "0", "-1/2*y", "-1/2*z - 1/12*x*y"});
    return make_sr({simplify(parse(scale, s->chart())) * X, V(s, {"0", "1", "1/2*x", "1/12*x^2"})});
}

SampleConfig fast() {
    SampleConfig c;
    c.samples = 8;
    return c;
}

bool is_constant_zero(const Expr& e) { return e.is_zero(); }

}  // namespace

TEST(Engel, ModelCanonicalData) {
    auto D = engel_canonical_data(constant_frame(engel_algebra()), fast());
    for (const auto* e : {&D.c0, &D.c1, &D.C0, &D.C1, &D.C2}) EXPECT_TRUE(is_constant_zero(*e)) << to_string(*e);
    for (size_t i = 0; i < 4; ++i) {
        EXPECT_EQ(D.X2.comp[i], D.Z.comp[i]);
        EXPECT_EQ(D.X3.comp[i], D.Y.comp[i]);
    }
    // theta([X0, X1]) = 1
    EXPECT_EQ(D.theta(lie_bracket(D.X0, D.X1)), Expr(1));
}

TEST(Engel, UnitOrthogonalKernelFrame) {
    auto S = engel_coords("1 + x^2");
    auto D = engel_canonical_data(S, fast());
    // g makes the input frame orthonormal: compare coefficients against (X_a, X_b)
    const Chart& c = S.chart();
    FrameField full = S.frame;
    full.push_back(lie_bracket(S.frame[0], S.frame[1]));
    full.push_back(lie_bracket(S.frame[0], full[2]));
    FullFrame F(full, fast());
    auto a = F.expand(D.X0), b = F.expand(D.X1);
    EXPECT_TRUE(is_zero(a[0] * a[0] + a[1] * a[1] - Expr(1), c, fast()).zero());
    EXPECT_TRUE(is_zero(b[0] * b[0] + b[1] * b[1] - Expr(1), c, fast()).zero());
    EXPECT_TRUE(is_zero(a[0] * b[0] + a[1] * b[1], c, fast()).zero());
    EXPECT_TRUE(is_zero(a[2], c, fast()).zero());
    EXPECT_TRUE(is_zero(D.theta(lie_bracket(D.X0, D.X1)) - Expr(1), c, fast()).zero());
}

TEST(Engel, ModelIsFlatProven) {
    auto rep = engel_flatness(constant_frame(engel_algebra()), fast());
    EXPECT_EQ(rep.verdict, Verdict::FlatProven) << rep.note;
    auto rep2 = engel_flatness(engel_coords(), fast());
    EXPECT_EQ(rep2.verdict, Verdict::FlatProven);
    EXPECT_EQ(rep2.proven_zero, rep2.residual_count);
    EXPECT_EQ(rep2.warnings.size(), 2u);
}

TEST(Engel, RescaledFieldNotFlat) {
    auto rep = engel_flatness(engel_coords("1 + x^2"), fast());
    EXPECT_EQ(rep.verdict, Verdict::NotFlat);
    ASSERT_FALSE(rep.violations.empty());
    EXPECT_FALSE(rep.violations[0].witness.empty());
}

TEST(Engel, SwapInvariant) {
    for (std::string scale : {"1", "1 + x^2"}) {
        auto S = engel_coords(scale);
        auto swapped = make_sr({S.frame[1], S.frame[0]});
        EXPECT_EQ(engel_flatness(S, fast()).verdict, engel_flatness(swapped, fast()).verdict) << scale;
    }
}

TEST(Engel, GrowthMismatch) {
    auto s = chart({"x", "y", "z"});
    EXPECT_THROW(engel_flatness(make_sr({V(s, {"1", "0", "-1/2*y"}), V(s, {"0", "1", "1/2*x"})}), fast()),
                 FlatnessError);
}

TEST(Engel, PointDependentRotationStaysFlat) {
    // same (E, g), frame rotated by the rational angle with cos = (1-y^2)/(1+y^2)
    auto S = engel_coords();
    const Chart& c = S.chart();
    Expr co = simplify(parse("(1 - y^2)/(1 + y^2)", c)), si = simplify(parse("2*y/(1 + y^2)", c));
    auto R = make_sr({co * S.frame[0] + si * S.frame[1], -si * S.frame[0] + co * S.frame[1]});
    auto rep = engel_flatness(R, fast());
    EXPECT_TRUE(is_flat(rep.verdict)) << to_string(rep.verdict);
}

TEST(Engel, DiffeomorphicImageStaysFlat) {
    // push the model frame forward by (x, y, z, w) -> (x, y + x^2, z, w + y*z)
    auto s = chart({"u", "v", "p", "q"});
    // inverse: x = u, y = v - u^2, z = p, w = q - (v - u^2)*p
    auto X = V(s, {"1", "2*u", "-1/2*(v - u^2)", "-1/2*p - 1/12*u*(v - u^2) - 1/2*(v - u^2)^2"});
    auto Y = V(s, {"0", "1", "1/2*u", "1/12*u^2 + p + 1/2*(v - u^2)*u"});
    auto rep = engel_flatness(make_sr({X, Y}), fast());
    EXPECT_EQ(rep.verdict, Verdict::FlatProven);
}

namespace {

SRStructure heisenberg3() {
    auto s = chart({"x", "y", "z"});
    return make_sr({V(s, {"1", "0", "-1/2*y"}), V(s, {"0", "1", "1/2*x"})});
}

SRStructure hopf() {
    auto s = Space::constant_structure({"X", "Y", "Z"}, {{0, 1, 2, 1}, {1, 2, 0, 1}, {2, 0, 1, 1}});
    return make_sr({VectorField::basis(s, 0), VectorField::basis(s, 1)});
}

SRStructure atan_frame() {
    auto s = chart({"x", "y", "z"}, {"x"});
    // pi/2 + atan(z) = 2*atan(z + sqrt(1 + z^2)); the grammar has no pi
    const std::string a = "(2*atan(z + sqrt(1 + z^2)))";
    return make_sr({V(s, {a, "0", "0"}), V(s, {"x/((1 + z^2)*" + a + ")", a + "/x", "1/2*x/" + a})});
}

}  // namespace

TEST(Contact, HeisenbergNormalization) {
    auto S = heisenberg3();
    auto D = contact_normalize(S, fast());
    ASSERT_EQ(D.lambda.size(), 1u);
    EXPECT_EQ(D.lambda[0], 1);
    // theta = +-(dz - 1/2 x dy + 1/2 y dx), Z = +-dz with theta(Z) = 1
    const Chart& c = S.chart();
    Expr s = D.theta.comp[2];
    EXPECT_TRUE(s == Expr(1) || s == Expr(-1));
    EXPECT_EQ(D.theta.comp[0], s * simplify(parse("1/2*y", c)));
    EXPECT_EQ(D.theta.comp[1], s * simplify(parse("-1/2*x", c)));
    EXPECT_EQ(D.Z.comp[2], s);
    EXPECT_TRUE(D.Z.comp[0].is_zero() && D.Z.comp[1].is_zero());
    // J(X1) = +-X2
    EXPECT_TRUE(D.J[0][0].is_zero());
    EXPECT_TRUE(D.J[1][0] == Expr(1) || D.J[1][0] == Expr(-1));
}

TEST(Contact, HopfNormalization) {
    auto D = contact_normalize(hopf(), fast());
    EXPECT_EQ(D.lambda, std::vector<mpq_class>{1});
    EXPECT_TRUE(D.Z.comp[0].is_zero() && D.Z.comp[1].is_zero());
    EXPECT_TRUE(D.Z.comp[2] == Expr(1) || D.Z.comp[2] == Expr(-1));
}

TEST(Contact, ReebResiduals) {
    auto S = atan_frame();
    auto D = contact_normalize(S, fast());
    const Chart& c = S.chart();
    EXPECT_TRUE(is_zero(D.theta(D.Z) - Expr(1), c, fast()).zero());
    for (const auto& X : S.frame) EXPECT_TRUE(is_zero(d_oneform(D.theta, D.Z, X), c, fast()).zero());
}

TEST(Contact, HeisenbergFlatProven) {
    auto rep = contact_flatness(heisenberg3(), fast());
    EXPECT_EQ(rep.verdict, Verdict::FlatProven);
    auto C = contact_connection(contact_normalize(heisenberg3(), fast()));
    for (const auto& g : C.nabla_prime.G) EXPECT_TRUE(g.is_zero());
}

TEST(Contact, HopfNotFlat) {
    auto rep = contact_flatness(hopf(), fast());
    EXPECT_EQ(rep.verdict, Verdict::NotFlat);
    bool curvature = false;
    for (const auto& v : rep.violations) curvature |= v.slot.rfind("R'", 0) == 0;
    EXPECT_TRUE(curvature);
}

TEST(Contact, RotatedHeisenbergFrameFlat) {
    auto S = heisenberg3();
    const Chart& c = S.chart();
    Expr co = simplify(parse("(1 - z^2)/(1 + z^2)", c)), si = simplify(parse("2*z/(1 + z^2)", c));
    auto R = make_sr({co * S.frame[0] + si * S.frame[1], -si * S.frame[0] + co * S.frame[1]});
    EXPECT_TRUE(is_flat(contact_flatness(R, fast()).verdict));
}

TEST(Contact, PrintedAtanFrameIsNotFlat) {
    // The Agrachev-Barilari invariants chi and kappa of this frame are nonzero (checked separately
    // with a computer algebra system), so the printed frame is not locally Heisenberg.
    auto rep = contact_flatness(atan_frame(), fast());
    EXPECT_EQ(rep.verdict, Verdict::NotFlat);
}

TEST(Contact, WeightedHeisenberg) {
    // h_2 with lambda = (1, 2): [X1,Y1] = Z, [X2,Y2] = 4 Z in an orthonormal frame
    auto s = chart({"x1", "y1", "x2", "y2", "z"});
    auto S = make_sr({V(s, {"1", "0", "0", "0", "-1/2*y1"}), V(s, {"0", "1", "0", "0", "1/2*x1"}),
                      V(s, {"0", "0", "1", "0", "-1/4*y2"}), V(s, {"0", "0", "0", "1", "1/4*x2"})});
    auto D = contact_normalize(S, fast());
    EXPECT_EQ(D.lambda, (std::vector<mpq_class>{1, 2}));
    EXPECT_EQ(D.multiplicity, (std::vector<size_t>{1, 1}));
    EXPECT_EQ(contact_flatness(S, fast()).verdict, Verdict::FlatProven);

    auto bent = make_sr({S.frame[0], S.frame[1], S.frame[2],
                         V(s, {"0", "0", "0", "1 + x1^2", "1/4*x2*(1 + x1^2)"})});
    EXPECT_THROW(contact_normalize(bent, fast()), FlatnessError);
}

TEST(Contact, MetricCompatibleOnE) {
    auto S = atan_frame();
    auto D = contact_normalize(S, fast());
    auto C = contact_connection(D);
    // orthonormal E-frame: <nabla'_a X_b, X_c> + <X_b, nabla'_a X_c> = 0
    for (size_t a = 0; a < 3; ++a)
        for (size_t b = 0; b < 2; ++b)
            for (size_t c = 0; c < 2; ++c)
                EXPECT_TRUE(is_zero(C.nabla_prime(c, a, b) + C.nabla_prime(b, a, c), S.chart(), fast()).zero());
}

TEST(Contact, NotContact) {
    EXPECT_THROW(contact_flatness(engel_coords(), fast()), FlatnessError);
}

TEST(Contact, TranscendentalPushforwardFlat) {
    // Heisenberg frame pushed forward by (u, v, w) -> (u, v, w + u*atan(v))
    auto s = chart({"x", "y", "z"});
    auto S = make_sr({V(s, {"1", "0", "-1/2*y + atan(y)"}), V(s, {"0", "1", "1/2*x + x/(1 + y^2)"})});
    auto rep = contact_flatness(S, fast());
    EXPECT_TRUE(is_flat(rep.verdict)) << to_string(rep.verdict);
}

namespace {

SRStructure cartan_coords(const std::string& x1_scale = "1") {
    auto s = chart({"x1", "x2", "x3", "x4", "x5"});
    auto X1 = V(s, {"1", "0", "0", "0", "0"});
    auto X2 = V(s, {"0", "1", "x1", "1/2*x1^2", "x1*x2"});
    return make_sr({simplify(parse(x1_scale, s->chart())) * X1, X2});
}

SRStructure rotated(const SRStructure& S, const Expr& co, const Expr& si) {
    return make_sr({co * S.frame[0] + si * S.frame[1], -si * S.frame[0] + co * S.frame[1]});
}

}  // namespace

TEST(G235, ModelCollapse) {
    auto D = g235_canonical_data(constant_frame(free_nilpotent(2, 3)), fast());
    const FullFrame& B = *D.bracket_frame;
    for (size_t i = 0; i < 5; ++i) {
        EXPECT_EQ(D.Z.comp[i], B[2].comp[i]);
        EXPECT_EQ(D.Y1.comp[i], B[3].comp[i]);
        EXPECT_EQ(D.Y2.comp[i], B[4].comp[i]);
    }
    EXPECT_FALSE(D.y2_ambiguous);
    auto C = g235_connection(D);
    for (const auto& g : C.G) EXPECT_TRUE(g.is_zero());
}

TEST(G235, StructureFunctionsAntisymmetric) {
    auto D = g235_canonical_data(cartan_coords("1 + x2^2"), fast());
    for (size_t i = 1; i <= 5; ++i)
        for (size_t j = 1; j <= 5; ++j)
            for (size_t k = 1; k <= 5; ++k) EXPECT_EQ(D.c(i, j, k), -D.c(j, i, k));
}

TEST(G235, ModelTorsionTargets) {
    // symbol basis X1, X2, [X1,X2], [X1,[X1,X2]], [X2,[X1,X2]] is A1, A2, B, C1, C2
    auto sym = symbol_at_point(constant_frame(free_nilpotent(2, 3)), {}).algebra;
    auto T = model_torsion(sym);
    auto at = [&](size_t k, size_t i, size_t j) { return T[(k * 5 + i) * 5 + j]; };
    EXPECT_EQ(at(2, 1, 0), 1);  // T(A2, A1) = B
    EXPECT_EQ(at(3, 2, 0), 1);  // T(B, A1) = C1
    EXPECT_EQ(at(4, 2, 1), 1);  // T(B, A2) = C2
    size_t nonzero = 0;
    for (const auto& t : T) nonzero += sgn(t) != 0;
    EXPECT_EQ(nonzero, 6u);  // the three listed components and their antisymmetric partners
}

TEST(G235, ModelFlatProven) {
    EXPECT_EQ(g235_flatness(constant_frame(free_nilpotent(2, 3)), fast()).verdict, Verdict::FlatProven);
    auto rep = g235_flatness(cartan_coords(), fast());
    EXPECT_EQ(rep.verdict, Verdict::FlatProven);
    EXPECT_EQ(rep.warnings.size(), 1u);
}

TEST(G235, ConnectionPreservesLayers) {
    auto D = g235_canonical_data(cartan_coords("1 + x2^2"), fast());
    auto C = g235_connection(D);
    const auto& L = D.graded;
    for (size_t k = 0; k < 5; ++k)
        for (size_t i = 0; i < 5; ++i)
            for (size_t j = 0; j < 5; ++j)
                if (L.layer_of(j) != L.layer_of(k)) EXPECT_TRUE(C(k, i, j).is_zero());
    for (size_t i = 0; i < 5; ++i)
        for (size_t j = 0; j < 2; ++j)
            for (size_t k = 0; k < 2; ++k) EXPECT_TRUE((C(k, i, j) + C(j, i, k)).is_zero());
}

TEST(G235, PerturbedNotFlat) {
    auto rep = g235_flatness(cartan_coords("1 + x2^2"), fast());
    EXPECT_EQ(rep.verdict, Verdict::NotFlat);
    EXPECT_FALSE(rep.violations.empty());
}

namespace {

// True when the rotated pipeline gives the same span Z, span(Y1, Y2) and g-bar.
bool same_grading(const SRStructure& S, Y2Reading y2) {
    auto R = rotated(S, Expr(mpq_class(3, 5)), Expr(mpq_class(4, 5)));
    auto D = g235_canonical_data(S, fast(), y2);
    auto E = g235_canonical_data(R, fast(), y2);
    const FullFrame& F = *D.graded.frame;
    const Chart& c = S.chart();
    auto zero = [&](const Expr& e) { return is_zero(e, c, fast()).zero(); };
    auto z = F.expand(E.Z), y1 = F.expand(E.Y1), y2v = F.expand(E.Y2);
    bool ok = zero(z[2] * z[2] - Expr(1)) && zero(y1[3] * y2v[3] + y1[4] * y2v[4]) &&
              zero(y1[3] * y1[3] + y1[4] * y1[4] - Expr(1));
    for (size_t k : {0, 1, 3, 4}) ok = ok && zero(z[k]);
    for (size_t k : {0, 1, 2}) ok = ok && zero(y1[k]) && zero(y2v[k]);
    return ok;
}

}  // namespace

TEST(G235, BasisIndependenceOnModel) {
    EXPECT_TRUE(same_grading(cartan_coords(), Y2Reading::Printed));
    EXPECT_TRUE(same_grading(cartan_coords(), Y2Reading::Symmetric));
}

TEST(G235, PrintedY2BreaksBasisIndependence) {
    // off the model the printed Y2 term is not rotation invariant; the symmetric reading is
    auto S = cartan_coords("1 + x2^2");
    EXPECT_TRUE(g235_canonical_data(S, fast()).y2_ambiguous);
    EXPECT_FALSE(same_grading(S, Y2Reading::Printed));
    EXPECT_TRUE(same_grading(S, Y2Reading::Symmetric));
}

TEST(G235, VerdictRotationInvariant) {
    for (std::string scale : {"1", "1 + x2^2"})
        for (auto y2 : {Y2Reading::Printed, Y2Reading::Symmetric}) {
            auto S = cartan_coords(scale);
            auto R = rotated(S, Expr(mpq_class(3, 5)), Expr(mpq_class(4, 5)));
            EXPECT_EQ(g235_flatness(S, fast(), y2).verdict, g235_flatness(R, fast(), y2).verdict) << scale;
        }
    EXPECT_EQ(g235_flatness(cartan_coords("1 + x2^2"), fast(), Y2Reading::Symmetric).verdict, Verdict::NotFlat);
}

TEST(G235, GrowthMismatch) {
    EXPECT_THROW(g235_flatness(engel_coords(), fast()), FlatnessError);
}

TEST(G235, PointDependentRotationKeepsZButNotYSpan) {
    auto S = cartan_coords();
    const Chart& c = S.chart();
    Expr co = simplify(parse("(1 - x1^2)/(1 + x1^2)", c)), si = simplify(parse("2*x1/(1 + x1^2)", c));
    auto R = rotated(S, co, si);
    auto D = g235_canonical_data(S, fast(), Y2Reading::Symmetric);
    auto E = g235_canonical_data(R, fast(), Y2Reading::Symmetric);
    const FullFrame& F = *D.graded.frame;
    auto z = F.expand(E.Z);
    for (size_t k = 0; k < 5; ++k) EXPECT_TRUE(is_zero(z[k] - Expr(k == 2), c, fast()).zero()) << k;
    // the Y formulas only see first derivatives of a1, a2: an x-dependent rotation leaks into E
    auto y = F.expand(E.Y1);
    EXPECT_FALSE(is_zero(y[0], c, fast()).zero());
}
