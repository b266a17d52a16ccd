#include "srflat/subriemann.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <random>

namespace srflat {

SRStructure make_sr(FrameField frame, const SampleConfig& cfg, std::vector<std::string> names) {
    if (frame.empty()) throw GeometryError("empty horizontal frame");
    if (frame.size() > frame.front().space->dim()) throw GeometryError("more horizontal fields than dimensions");
    if (!pointwise_independent(frame, cfg)) throw GeometryError("horizontal frame is not pointwise independent");
    if (names.empty())
        for (size_t i = 0; i < frame.size(); ++i) names.push_back("X" + std::to_string(i + 1));
    return SRStructure{std::move(frame), std::move(names), {}};
}

std::string word_name(const BracketWord& w, const std::vector<std::string>& names) {
    std::string s = names.at(size_t(w.back()));
    for (size_t i = w.size() - 1; i-- > 0;) s = "[" + names.at(size_t(w[i])) + "," + s + "]";
    return s;
}

std::string to_string(const GrowthVector& g) {
    std::string s = "(";
    for (size_t i = 0; i < g.size(); ++i) s += (i ? "," : "") + std::to_string(g[i]);
    return s + ")";
}

BracketTower::BracketTower(const SRStructure& S) : S_(S), cap_(2 * S.ambient() + 2) {}

const std::vector<std::pair<BracketWord, VectorField>>& BracketTower::layer(size_t len) const {
    std::lock_guard<std::mutex> lock(mu_);
    while (layers_.size() < len) {
        size_t L = layers_.size() + 1;
        std::vector<std::pair<BracketWord, VectorField>> next;
        int k = int(S_.rank());
        if (L == 1) {
            for (int i = 0; i < k; ++i) next.emplace_back(BracketWord{i}, S_.frame[size_t(i)]);
        } else if (L == 2) {
            for (int i = 0; i < k; ++i)
                for (int j = i + 1; j < k; ++j) {
                    auto v = lie_bracket(S_.frame[size_t(i)], S_.frame[size_t(j)]);
                    if (!v.is_zero()) next.emplace_back(BracketWord{i, j}, std::move(v));
                }
        } else {
            for (int i = 0; i < k; ++i)
                for (const auto& [w, f] : layers_[L - 2]) {
                    auto v = lie_bracket(S_.frame[size_t(i)], f);
                    if (v.is_zero()) continue;
                    BracketWord nw{i};
                    nw.insert(nw.end(), w.begin(), w.end());
                    next.emplace_back(std::move(nw), std::move(v));
                }
        }
        layers_.push_back(std::move(next));
    }
    return layers_[len - 1];
}

namespace {

// Incremental independence test, exact while every value is rational.
class RankTracker {
public:
    explicit RankTracker(size_t n) : n_(n) {}

    bool exact() const { return exact_; }
    size_t rank() const { return exact_ ? qrows_.size() : drows_.size(); }

    // Adds v if it raises the rank.
    bool offer(const std::vector<std::optional<mpq_class>>& q, const std::vector<double>& d) {
        bool rational = std::all_of(q.begin(), q.end(), [](const auto& x) { return x.has_value(); });
        if (exact_ && !rational) exact_ = false;
        if (exact_) {
            RatVec v(n_);
            for (size_t i = 0; i < n_; ++i) v[i] = *q[i];
            auto rows = qrows_;
            rows.push_back(v);
            if (srflat::rank(RatMatrix::from_rows(rows)) > qrows_.size()) {
                qrows_.push_back(v);
                drows_.push_back(d);
                return true;
            }
            return false;
        }
        auto rows = drows_;
        rows.push_back(d);
        if (numeric_rank(rows) > drows_.size()) {
            drows_.push_back(d);
            return true;
        }
        return false;
    }

private:
    static size_t numeric_rank(const std::vector<std::vector<double>>& rows) {
        Eigen::MatrixXd m(rows.size(), rows[0].size());
        for (size_t i = 0; i < rows.size(); ++i) {
            double nrm = 0;
            for (double x : rows[i]) nrm += x * x;
            nrm = std::sqrt(nrm);
            for (size_t j = 0; j < rows[i].size(); ++j) m(long(i), long(j)) = nrm > 0 ? rows[i][j] / nrm : 0;
        }
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
        auto s = svd.singularValues();
        if (s.size() == 0 || s(0) == 0) return 0;
        size_t r = 0;
        for (long i = 0; i < s.size(); ++i)
            if (s(i) / s(0) > 1e-8) ++r;
        return r;
    }

    size_t n_;
    bool exact_ = true;
    std::vector<RatVec> qrows_;
    std::vector<std::vector<double>> drows_;
};

void evaluate(const VectorField& v, const Chart& c, const std::vector<mpq_class>& x,
              std::vector<std::optional<mpq_class>>& q, std::vector<double>& d) {
    q.resize(v.comp.size());
    d.resize(v.comp.size());
    for (size_t i = 0; i < v.comp.size(); ++i) {
        q[i] = eval_exact(v.comp[i], c, x);
        d[i] = q[i] ? q[i]->get_d() : eval(v.comp[i], c, x);
    }
}

}  // namespace

FlagAtPoint flag_at_point(const BracketTower& T, const std::vector<mpq_class>& x) {
    const Chart& c = T.layer(1).front().second.space->chart();
    size_t n = T.layer(1).front().second.dim();
    if (c.dim() > 0 && !in_domain(c, x)) throw SubRiemannError("point outside the chart domain");
    FlagAtPoint F;
    F.point = x;
    RankTracker rt(n);
    std::vector<std::optional<mpq_class>> q;
    std::vector<double> d;
    for (size_t L = 1; L <= T.depth_cap(); ++L) {
        const auto& layer = T.layer(L);
        if (layer.empty()) break;
        std::vector<BracketWord> added;
        for (const auto& [w, f] : layer) {
            evaluate(f, c, x, q, d);
            if (rt.offer(q, d)) added.push_back(w);
            if (rt.rank() == n) break;
        }
        F.ranks.push_back(rt.rank());
        F.layer_words.push_back(std::move(added));
        if (rt.rank() == n) {
            F.bracket_generating = true;
            break;
        }
    }
    F.exact = rt.exact();
    return F;
}

FlagAtPoint flag_at_point(const SRStructure& S, const std::vector<mpq_class>& x) {
    BracketTower T(S);
    return flag_at_point(T, x);
}

GrowthVector growth_vector(const SRStructure& S, const std::vector<mpq_class>& x) {
    auto F = flag_at_point(S, x);
    if (!F.bracket_generating)
        throw SubRiemannError("E is not bracket-generating at the point: flag stops at rank " +
                              std::to_string(F.ranks.empty() ? 0 : F.ranks.back()));
    return F.ranks;
}

EquiregularReport equiregular_check(const SRStructure& S, const std::vector<std::vector<mpq_class>>& points) {
    BracketTower T(S);
    EquiregularReport rep;
    rep.points = points;
    for (size_t i = 0; i < points.size(); ++i) {
        auto F = flag_at_point(T, points[i]);
        GrowthVector g = F.bracket_generating ? F.ranks : GrowthVector{};
        rep.growth.push_back(g);
        rep.classes[g].push_back(i);
    }
    rep.pass = rep.classes.size() == 1 && !rep.classes.begin()->first.empty();
    return rep;
}

EquiregularReport equiregular_check(const SRStructure& S, const SampleConfig& cfg) {
    if (!S.points.empty()) return equiregular_check(S, S.points);
    if (S.space()->mode() == Mode::ConstantStructure) return equiregular_check(S, {std::vector<mpq_class>{}});
    return equiregular_check(S, sample_points(S.chart(), cfg, cfg.samples));
}

mpq_class rationalize(double v) {
    if (!std::isfinite(v)) throw SubRiemannError("non-finite value");
    // continued fraction until the convergent is within 1e-12 relative
    double x = v;
    mpz_class h0 = 1, h1 = 0, k0 = 0, k1 = 1;
    for (int it = 0; it < 40; ++it) {
        double a = std::floor(x);
        mpz_class ai(a);
        mpz_class h2 = ai * h0 + h1, k2 = ai * k0 + k1;
        h1 = h0;
        h0 = h2;
        k1 = k0;
        k0 = k2;
        mpq_class q(h0, k0);
        q.canonicalize();
        if (std::fabs(q.get_d() - v) <= 1e-12 * std::max(1.0, std::fabs(v))) return q;
        double frac = x - a;
        if (frac < 1e-300) return q;
        x = 1 / frac;
    }
    mpq_class q(h0, k0);
    q.canonicalize();
    return q;
}

namespace {

std::vector<std::vector<mpq_class>> local_cloud(const SRStructure& S, const std::vector<mpq_class>& x,
                                                const SampleConfig& cfg) {
    std::mt19937_64 rng(cfg.seed ^ 0x5eedULL);
    std::uniform_int_distribution<int> num(-4, 4);
    std::vector<std::vector<mpq_class>> out;
    for (int attempt = 0; attempt < 64 && out.size() < 4; ++attempt) {
        auto p = x;
        for (auto& c : p) c += mpq_class(num(rng), 64);
        if (in_domain(S.chart(), p)) out.push_back(p);
    }
    return out;
}

}  // namespace

SymbolAlgebra symbol_at_point(const SRStructure& S, const std::vector<mpq_class>& x, const SampleConfig& cfg) {
    BracketTower T(S);
    auto F = flag_at_point(T, x);
    if (!F.bracket_generating) throw SubRiemannError("symbol undefined: E is not bracket-generating at the point");
    if (S.space()->mode() == Mode::Coordinates)
        for (const auto& p : local_cloud(S, x, cfg)) {
            auto G = flag_at_point(T, p);
            if (!G.bracket_generating || G.ranks != F.ranks)
                throw SubRiemannError("symbol undefined: growth vector " + to_string(F.ranks) +
                                      " is not locally constant, " + to_string(G.ranks) + " nearby");
        }

    std::vector<size_t> strata;
    std::vector<BracketWord> words;
    std::vector<VectorField> fields;
    std::vector<int> weight;
    for (size_t L = 0; L < F.layer_words.size(); ++L) {
        strata.push_back(F.layer_words[L].size());
        for (const auto& w : F.layer_words[L]) {
            for (const auto& [tw, f] : T.layer(L + 1))
                if (tw == w) fields.push_back(f);
            words.push_back(w);
            weight.push_back(int(L) + 1);
        }
    }
    size_t n = words.size();
    const Chart& c = S.chart();

    // adapted basis at x, exact when rational
    std::vector<std::optional<mpq_class>> q;
    std::vector<double> d;
    bool exact = true;
    RatMatrix Bq(n, n);
    Eigen::MatrixXd Bd(n, n);
    for (size_t a = 0; a < n; ++a) {
        evaluate(fields[a], c, x, q, d);
        for (size_t i = 0; i < n; ++i) {
            if (q[i]) Bq(i, a) = *q[i];
            else exact = false;
            Bd(long(i), long(a)) = d[i];
        }
    }
    auto Bq_inv = exact ? inverse(Bq) : std::nullopt;
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(Bd);

    std::vector<BracketTriple> triples;
    for (size_t a = 0; a < n; ++a)
        for (size_t b = a + 1; b < n; ++b) {
            int w = weight[a] + weight[b];
            if (w > int(strata.size())) continue;
            auto br = lie_bracket(fields[a], fields[b]);
            evaluate(br, c, x, q, d);
            bool rational = std::all_of(q.begin(), q.end(), [](const auto& v) { return v.has_value(); });
            std::vector<mpq_class> coef(n);
            if (exact && rational) {
                RatVec v(n);
                for (size_t i = 0; i < n; ++i) v[i] = *q[i];
                coef = *Bq_inv * v;
            } else {
                exact = false;
                Eigen::VectorXd rhs(n);
                for (size_t i = 0; i < n; ++i) rhs(long(i)) = d[i];
                Eigen::VectorXd sol = lu.solve(rhs);
                for (size_t i = 0; i < n; ++i) coef[i] = std::fabs(sol(long(i))) < 1e-12 ? mpq_class(0) : rationalize(sol(long(i)));
            }
            // keep only the layer a+b component: the bracket taken mod E^{i+j-1}
            for (size_t k = 0; k < n; ++k)
                if (weight[k] == w && sgn(coef[k]) != 0) triples.emplace_back(int(a), int(b), int(k), coef[k]);
        }
    std::vector<std::string> names;
    for (const auto& w : words) names.push_back(word_name(w, S.names));
    SymbolAlgebra sym{StratifiedAlgebra(strata, names, triples, RatMatrix::identity(strata[0])), x, words, exact};
    return sym;
}

const char* to_string(SymbolDecision d) {
    switch (d) {
        case SymbolDecision::Constant: return "constant";
        case SymbolDecision::NotConstant: return "not-constant";
        case SymbolDecision::Undecided: return "undecided";
    }
    return "?";
}

std::vector<double> contact_spectrum(const StratifiedAlgebra& sym) {
    size_t m = sym.strata()[0];
    if (sym.step() != 2 || sym.strata()[1] != 1 || m % 2) throw SubRiemannError("not a contact symbol");
    size_t z = m;
    Eigen::MatrixXd B(m, m);
    for (size_t i = 0; i < m; ++i)
        for (size_t j = 0; j < m; ++j) B(long(i), long(j)) = sym.c(i, j, z).get_d();
    // move to a g1-orthonormal basis: M = L^-1 B L^-T is antisymmetric, -M^2 has eigenvalues mu_j^2, each twice
    Eigen::MatrixXd G = to_eigen(sym.gram1());
    Eigen::MatrixXd L = G.llt().matrixL();
    Eigen::MatrixXd Li = L.inverse();
    Eigen::MatrixXd M = Li * B * Li.transpose();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(-(M * M));
    auto ev = es.eigenvalues();
    double mu_max = std::sqrt(std::max(0.0, ev(long(m) - 1)));
    std::vector<double> lambda;
    for (long i = long(m) - 1; i >= 0; i -= 2) {
        double mu = std::sqrt(std::max(0.0, ev(i)));
        if (mu <= 1e-12 * std::max(1.0, mu_max)) throw SubRiemannError("degenerate bracket form: not contact");
        lambda.push_back(mu_max / mu);
    }
    return lambda;
}

ConstantSymbolReport constant_symbol_check(const SRStructure& S, const std::vector<std::vector<mpq_class>>& points,
                                           const SampleConfig& cfg) {
    ConstantSymbolReport rep;
    auto eq = equiregular_check(S, points);
    if (!eq.pass) {
        rep.decision = SymbolDecision::NotConstant;
        rep.note = "not equiregular: " + std::to_string(eq.classes.size()) + " growth classes";
        return rep;
    }
    rep.growth = eq.growth.front();
    const auto& g = rep.growth;
    size_t n = S.ambient(), k = S.rank();
    if (g == GrowthVector{2, 3, 4}) {
        rep.growth_class = "(2,3,4)";
        rep.decision = SymbolDecision::Constant;
        rep.note = "the Engel algebra is the only Carnot algebra with growth (2,3,4)";
        return rep;
    }
    if (g == GrowthVector{2, 3, 5}) {
        rep.growth_class = "(2,3,5)";
        rep.decision = SymbolDecision::Constant;
        rep.note = "free(2,3) is the only Carnot algebra with growth (2,3,5)";
        return rep;
    }
    if (n % 2 == 1 && k == n - 1 && g == GrowthVector{k, n}) {
        rep.growth_class = "contact";
        try {
            for (const auto& p : points) rep.spectra.push_back(contact_spectrum(symbol_at_point(S, p, cfg).algebra));
        } catch (const SubRiemannError& e) {
            rep.decision = SymbolDecision::Undecided;
            rep.note = e.what();
            return rep;
        }
        bool same = true;
        for (const auto& s : rep.spectra)
            for (size_t j = 0; j < s.size(); ++j)
                if (std::fabs(s[j] - rep.spectra[0][j]) > 1e-8 * std::max(1.0, std::fabs(s[j]))) same = false;
        rep.decision = same ? SymbolDecision::Constant : SymbolDecision::NotConstant;
        rep.note = same ? "lambda spectrum agrees at every sample" : "lambda spectrum varies across samples";
        return rep;
    }
    rep.growth_class = "other";
    rep.decision = SymbolDecision::Undecided;
    rep.note = "isometry testing of symbols is only supported for (2,3,4), (2,3,5) and contact growth";
    for (const auto& p : points) rep.symbols.push_back(symbol_at_point(S, p, cfg));
    return rep;
}

ConstantSymbolReport constant_symbol_check(const SRStructure& S, const SampleConfig& cfg) {
    std::vector<std::vector<mpq_class>> pts;
    if (!S.points.empty()) pts = S.points;
    else if (S.space()->mode() == Mode::ConstantStructure) pts = {std::vector<mpq_class>{}};
    else pts = sample_points(S.chart(), cfg, cfg.samples);
    return constant_symbol_check(S, pts, cfg);
}

}  // namespace srflat
