#include <gtest/gtest.h>

#include "srflat/subriemann.hpp"

using namespace srflat;

namespace {

SpacePtr chart(std::vector<std::string> names) { return Space::coordinates(Chart(std::move(names))); }

VectorField V(const SpacePtr& s, std::vector<std::string> comps) {
    VectorField v{s, {}};
    for (const auto& c : comps) v.comp.push_back(simplify(parse(c, s->chart())));
    return v;
}

SRStructure heisenberg_coords() {
    auto s = chart({"x", "y", "z"});
    return make_sr({V(s, {"1", "0", "-1/2*y"}), V(s, {"0", "1", "1/2*x"})});
}

SRStructure martinet() {
    auto s = chart({"x", "y", "z"});
    return make_sr({V(s, {"1", "0", "0"}), V(s, {"0", "1", "1/2*x^2"})});
}

SRStructure engel_coords() {
    auto s = chart({"x", "y", "z", "w"});
    return make_sr({V(s, {"1", "0", "-1/2*y", "-1/2*z - 1/12*x*y"}), V(s, {"0", "1", "1/2*x", "1/12*x^2"})});
}

SRStructure constant_frame(const StratifiedAlgebra& a) {
    auto s = Space::constant_structure(a.names(), a.triples());
    FrameField F;
    for (size_t i = 0; i < a.strata()[0]; ++i) F.push_back(VectorField::basis(s, i));
    return make_sr(F, {}, std::vector<std::string>(a.names().begin(), a.names().begin() + long(a.strata()[0])));
}

SRStructure hopf() {
    auto s = Space::constant_structure({"X", "Y", "Z"}, {{0, 1, 2, 1}, {1, 2, 0, 1}, {2, 0, 1, 1}});
    return make_sr({VectorField::basis(s, 0), VectorField::basis(s, 1)}, {}, {"X", "Y"});
}

std::vector<mpq_class> pt(std::initializer_list<int> v) {
    std::vector<mpq_class> p;
    for (int x : v) p.emplace_back(x);
    return p;
}

void expect_same_algebra(const StratifiedAlgebra& a, const StratifiedAlgebra& b) {
    ASSERT_EQ(a.strata(), b.strata());
    size_t n = a.dim();
    for (size_t i = 0; i < n; ++i)
        for (size_t j = 0; j < n; ++j)
            for (size_t k = 0; k < n; ++k) EXPECT_EQ(a.c(i, j, k), b.c(i, j, k)) << i << j << k;
}

}  // namespace

TEST(Words, Names) {
    std::vector<std::string> names{"X1", "X2"};
    EXPECT_EQ(word_name({0}, names), "X1");
    EXPECT_EQ(word_name({0, 1}, names), "[X1,X2]");
    EXPECT_EQ(word_name({1, 0, 1}, names), "[X2,[X1,X2]]");
}

TEST(Growth, HeisenbergEverywhere) {
    auto S = heisenberg_coords();
    SampleConfig cfg;
    for (const auto& p : sample_points(S.chart(), cfg, 10)) EXPECT_EQ(growth_vector(S, p), (GrowthVector{2, 3}));
}

TEST(Growth, MartinetSingularLocus) {
    auto S = martinet();
    EXPECT_EQ(growth_vector(S, pt({1, 0, 0})), (GrowthVector{2, 3}));
    EXPECT_EQ(growth_vector(S, pt({-3, 2, 5})), (GrowthVector{2, 3}));
    EXPECT_EQ(growth_vector(S, pt({0, 0, 0})), (GrowthVector{2, 2, 3}));
    EXPECT_EQ(growth_vector(S, pt({0, 7, -1})), (GrowthVector{2, 2, 3}));
    auto F = flag_at_point(S, pt({0, 0, 0}));
    EXPECT_TRUE(F.exact);
    ASSERT_EQ(F.layer_words.size(), 3u);
    EXPECT_TRUE(F.layer_words[1].empty());
    EXPECT_EQ(F.layer_words[2], (std::vector<BracketWord>{{0, 0, 1}}));
}

TEST(Growth, NotBracketGenerating) {
    auto s = chart({"x", "y", "z"});
    auto S = make_sr({V(s, {"1", "0", "0"}), V(s, {"0", "1", "0"})});
    EXPECT_FALSE(flag_at_point(S, pt({0, 0, 0})).bracket_generating);
    EXPECT_THROW(growth_vector(S, pt({1, 2, 3})), SubRiemannError);
    EXPECT_FALSE(equiregular_check(S).pass);
}

TEST(Growth, Engel) {
    auto S = engel_coords();
    SampleConfig cfg;
    for (const auto& p : sample_points(S.chart(), cfg, 6)) EXPECT_EQ(growth_vector(S, p), (GrowthVector{2, 3, 4}));
}

TEST(Growth, ConstantStructureFree235) {
    auto S = constant_frame(free_nilpotent(2, 3));
    EXPECT_EQ(growth_vector(S, {}), (GrowthVector{2, 3, 5}));
    auto S33 = constant_frame(free_nilpotent(3, 3));
    EXPECT_EQ(growth_vector(S33, {}), (GrowthVector{3, 6, 14}));
}

TEST(Growth, TranscendentalUsesNumericRank) {
    auto s = chart({"x", "y", "z"});
    auto S = make_sr({V(s, {"1", "0", "0"}), V(s, {"0", "1", "sin(x)"})});
    auto F = flag_at_point(S, pt({1, 0, 0}));
    EXPECT_FALSE(F.exact);
    EXPECT_EQ(F.ranks, (GrowthVector{2, 3}));
}

TEST(Growth, InvariantUnderFrameRotation) {
    // (3/5, 4/5) rotation keeps the frame orthonormal and E unchanged
    auto s = chart({"x", "y", "z"});
    auto X = V(s, {"1", "0", "0"}), Y = V(s, {"0", "1", "1/2*x^2"});
    auto S = make_sr({Expr(mpq_class(3, 5)) * X + Expr(mpq_class(4, 5)) * Y,
                      Expr(mpq_class(-4, 5)) * X + Expr(mpq_class(3, 5)) * Y});
    EXPECT_EQ(growth_vector(S, pt({2, 1, 1})), (GrowthVector{2, 3}));
    EXPECT_EQ(growth_vector(S, pt({0, 1, 1})), (GrowthVector{2, 2, 3}));
}

TEST(Equiregular, PartitionsClasses) {
    auto S = martinet();
    std::vector<std::vector<mpq_class>> pts{pt({1, 0, 0}), pt({0, 1, 0}), pt({2, 2, 2}), pt({0, 0, 0})};
    auto rep = equiregular_check(S, pts);
    EXPECT_FALSE(rep.pass);
    ASSERT_EQ(rep.classes.size(), 2u);
    EXPECT_EQ(rep.classes.at(GrowthVector{2, 3}), (std::vector<size_t>{0, 2}));
    EXPECT_EQ(rep.classes.at(GrowthVector{2, 2, 3}), (std::vector<size_t>{1, 3}));
    EXPECT_TRUE(equiregular_check(heisenberg_coords()).pass);
    EXPECT_TRUE(equiregular_check(hopf()).pass);
}

TEST(Symbol, HopfIsHeisenberg) {
    auto sym = symbol_at_point(hopf(), {});
    expect_same_algebra(sym.algebra, heisenberg_algebra(1, {1}));
    EXPECT_EQ(sym.algebra.names()[2], "[X,Y]");
    EXPECT_TRUE(sym.exact);
}

TEST(Symbol, CarnotGroupsAreFixedPoints) {
    expect_same_algebra(symbol_at_point(constant_frame(heisenberg_algebra(2, {1, 2})), {}).algebra,
                        heisenberg_algebra(2, {1, 1}));
    expect_same_algebra(symbol_at_point(constant_frame(engel_algebra()), {}).algebra, engel_algebra());

    // free(2,3): adapted words [X1,[X1,X2]], [X2,[X1,X2]] and the Lyndon basis differ by a sign on the last vector
    auto f = free_nilpotent(2, 3);
    auto sym = symbol_at_point(constant_frame(f), {}).algebra;
    std::vector<int> sign{1, 1, 1, 1, -1};
    ASSERT_EQ(sym.strata(), f.strata());
    for (size_t i = 0; i < 5; ++i)
        for (size_t j = 0; j < 5; ++j)
            for (size_t k = 0; k < 5; ++k) EXPECT_EQ(sym.c(i, j, k), f.c(i, j, k) * sign[i] * sign[j] * sign[k]);
    EXPECT_TRUE(validate(sym).ok());
}

TEST(Symbol, CoordinateFramesAtPoints) {
    auto sE = symbol_at_point(engel_coords(), pt({1, -2, 3, 1}));
    expect_same_algebra(sE.algebra, engel_algebra());
    auto sH = symbol_at_point(heisenberg_coords(), pt({5, 1, 2}));
    expect_same_algebra(sH.algebra, heisenberg_algebra(1, {1}));
    // Martinet away from x = 0: the adapted vector is [X,Y] = x dz itself
    auto sM = symbol_at_point(martinet(), pt({3, 0, 0}));
    expect_same_algebra(sM.algebra, heisenberg_algebra(1, {1}));
    EXPECT_TRUE(validate(sM.algebra).ok());
}

TEST(Symbol, UndefinedOffEquiregularLocus) {
    EXPECT_THROW(symbol_at_point(martinet(), pt({0, 0, 0})), SubRiemannError);
}

TEST(Symbol, NumericConstantsRationalized) {
    EXPECT_EQ(rationalize(0.75), mpq_class(3, 4));
    EXPECT_EQ(rationalize(-1.0 / 3), mpq_class(-1, 3));
    auto s = chart({"x", "y", "z"});
    auto S = make_sr({V(s, {"1", "0", "0"}), V(s, {"0", "1", "exp(x)"})});
    auto sym = symbol_at_point(S, pt({0, 0, 0}));
    EXPECT_FALSE(sym.exact);
    EXPECT_EQ(sym.algebra.c(0, 1, 2), 1);
}

TEST(Spectrum, HeisenbergLambda) {
    auto l = contact_spectrum(heisenberg_algebra(3, {1, 2, 4}));
    ASSERT_EQ(l.size(), 3u);
    EXPECT_NEAR(l[0], 1, 1e-12);
    EXPECT_NEAR(l[1], 4, 1e-12);
    EXPECT_NEAR(l[2], 16, 1e-12);
}

TEST(ConstantSymbol, Classes) {
    SampleConfig cfg;
    cfg.samples = 6;
    EXPECT_EQ(constant_symbol_check(engel_coords(), cfg).decision, SymbolDecision::Constant);
    EXPECT_EQ(constant_symbol_check(constant_frame(free_nilpotent(2, 3)), cfg).decision, SymbolDecision::Constant);
    EXPECT_EQ(constant_symbol_check(heisenberg_coords(), cfg).decision, SymbolDecision::Constant);
    // seeded samples miss x = 0, where Martinet is contact with lambda = (1)
    EXPECT_EQ(constant_symbol_check(martinet(), cfg).decision, SymbolDecision::Constant);
    EXPECT_EQ(constant_symbol_check(martinet(), {pt({1, 0, 0}), pt({0, 0, 0})}, cfg).decision,
              SymbolDecision::NotConstant);

    auto s = chart({"x1", "y1", "x2", "y2", "z"});
    auto X1 = V(s, {"1", "0", "0", "0", "-1/2*y1"}), Y1 = V(s, {"0", "1", "0", "0", "1/2*x1"});
    auto X2 = V(s, {"0", "0", "1", "0", "0"});
    auto flat = make_sr({X1, Y1, X2, V(s, {"0", "0", "0", "1", "2*x2"})});
    auto rep = constant_symbol_check(flat, cfg);
    EXPECT_EQ(rep.growth_class, "contact");
    EXPECT_EQ(rep.decision, SymbolDecision::Constant);
    EXPECT_NEAR(rep.spectra[0][1], 2, 1e-9);

    auto varying = make_sr({X1, Y1, X2, V(s, {"0", "0", "0", "1", "x2*(1 + z^2)"})});
    std::vector<std::vector<mpq_class>> pts{pt({0, 0, 0, 0, 0}), pt({0, 0, 0, 0, 1})};
    auto rep2 = constant_symbol_check(varying, pts, cfg);
    EXPECT_EQ(rep2.decision, SymbolDecision::NotConstant);
    EXPECT_NEAR(rep2.spectra[1][1], 2, 1e-9);

    auto other = constant_frame(heisenberg_algebra(1, {1}));
    EXPECT_EQ(constant_symbol_check(other, cfg).decision, SymbolDecision::Constant);
    auto free33 = constant_frame(free_nilpotent(3, 2));
    auto rep3 = constant_symbol_check(free33, cfg);
    EXPECT_EQ(rep3.decision, SymbolDecision::Undecided);
    EXPECT_EQ(rep3.symbols.size(), 1u);
}
