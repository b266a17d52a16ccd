#include "srflat/flatness.hpp"

namespace srflat {

size_t GradedFrame::layer_of(size_t slot) const {
    size_t end = 0;
    for (size_t i = 0; i < layers.size(); ++i) {
        end += layers[i];
        if (slot < end) return i;
    }
    throw std::out_of_range("slot outside graded frame");
}

std::vector<mpq_class> model_torsion(const StratifiedAlgebra& g) {
    size_t n = g.dim();
    std::vector<mpq_class> T(n * n * n);
    for (size_t i = 0; i < n; ++i)
        for (size_t j = 0; j < n; ++j)
            for (size_t k = 0; k < n; ++k) T[(k * n + i) * n + j] = -g.c(i, j, k);
    return T;
}

Expr root(const Expr& e) {
    RatFunc r = e.rat();
    if (r.is_const()) return sqrt(e);
    auto sn = poly_sqrt(r.num);
    auto sd = poly_sqrt(r.den);
    if (sn && sd) return Expr(RatFunc{*sn, Poly(mpq_class(1))}) / Expr(RatFunc{*sd, Poly(mpq_class(1))});
    return sqrt(e);
}

void require_growth(const SRStructure& S, const GrowthVector& g, const SampleConfig& cfg) {
    auto eq = equiregular_check(S, cfg);
    for (size_t i = 0; i < eq.growth.size(); ++i)
        if (eq.growth[i] != g)
            throw FlatnessError("growth vector " + (eq.growth[i].empty() ? std::string("(not bracket-generating)")
                                                                          : to_string(eq.growth[i])) +
                                " at a sample point, expected " + to_string(g));
}

std::string to_string(const VectorField& v) {
    std::string s = "(";
    for (size_t i = 0; i < v.comp.size(); ++i) s += (i ? ", " : "") + to_string(v.comp[i]);
    return s + ")";
}

std::string to_string(const OneForm& a) {
    std::string s = "(";
    for (size_t i = 0; i < a.comp.size(); ++i) s += (i ? ", " : "") + to_string(a.comp[i]);
    return s + ")";
}

}  // namespace srflat
