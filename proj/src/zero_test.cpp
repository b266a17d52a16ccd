#include "srflat/symexpr.hpp"

#include <cmath>
#include <random>

namespace srflat {

const char* to_string(ZeroVerdict::Kind k) {
    switch (k) {
        case ZeroVerdict::Kind::ProvenZero: return "ProvenZero";
        case ZeroVerdict::Kind::ProvenNonZero: return "ProvenNonZero";
        case ZeroVerdict::Kind::NumericallyZero: return "NumericallyZero";
        case ZeroVerdict::Kind::NumericallyNonZero: return "NumericallyNonZero";
    }
    return "?";
}

static bool evaluable(const std::vector<Expr>& es, const Chart& c, const std::vector<mpq_class>& p) {
    try {
        auto d = to_double(p);
        for (const auto& e : es) eval(e, c, d);
    } catch (const DomainError&) {
        return false;
    }
    return true;
}

std::vector<std::vector<mpq_class>> sample_points(const Chart& c, const SampleConfig& cfg, int count,
                                                  const std::vector<Expr>& extra) {
    std::mt19937_64 rng(cfg.seed);
    std::uniform_int_distribution<long> qd(1, 64);
    std::vector<std::vector<mpq_class>> pts;
    long attempts = 0, limit = 100L * std::max(count, 1);
    while (static_cast<int>(pts.size()) < count) {
        if (attempts++ >= limit)
            throw SamplingError("could not find " + std::to_string(count) + " valid domain points in " +
                                std::to_string(limit) + " attempts");
        std::vector<mpq_class> p;
        for (size_t i = 0; i < c.dim(); ++i) {
            long q = qd(rng);
            std::uniform_int_distribution<long> pd(-2 * q, 2 * q);
            mpq_class v(pd(rng), q);
            v.canonicalize();
            p.push_back(v);
        }
        if (!in_domain(c, p) || !evaluable(extra, c, p)) continue;
        pts.push_back(std::move(p));
    }
    return pts;
}

ZeroVerdict is_zero(const Expr& e, const Chart& c, const SampleConfig& cfg) {
    ZeroVerdict v;
    Expr s = simplify(e);
    if (s.is_zero()) {
        v.kind = ZeroVerdict::Kind::ProvenZero;
        return v;
    }
    if (!s.has_atoms()) {
        // A nonzero rational function vanishes only on a thin set; keep drawing until a witness appears.
        for (std::uint64_t round = 0; round < 8; ++round) {
            SampleConfig sc = cfg;
            sc.seed = cfg.seed + round * 0x9e3779b97f4a7c15ULL;
            for (const auto& p : sample_points(c, sc, cfg.samples, {s})) {
                mpq_class val = *eval_exact(s, c, p);
                if (val != 0) {
                    v.kind = ZeroVerdict::Kind::ProvenNonZero;
                    v.witness = to_double(p);
                    v.value = val.get_d();
                    v.sample_count = 1;
                    v.max_abs = std::fabs(v.value);
                    return v;
                }
            }
        }
        throw SamplingError("no nonzero witness found for a nonzero rational function");
    }
    auto pts = sample_points(c, cfg, cfg.samples, {s});
    double worst = -1;
    v.sample_count = static_cast<int>(pts.size());
    v.kind = ZeroVerdict::Kind::NumericallyZero;
    for (const auto& p : pts) {
        auto d = to_double(p);
        double val = eval(s, c, d);
        double env = eval_envelope(s, c, d);
        double tol = cfg.tol * std::max(1.0, env);
        v.max_abs = std::max(v.max_abs, std::fabs(val));
        double ratio = std::fabs(val) / tol;
        if (ratio > 1 && ratio > worst) {
            worst = ratio;
            v.kind = ZeroVerdict::Kind::NumericallyNonZero;
            v.witness = d;
            v.value = val;
        }
    }
    return v;
}

}  // namespace srflat
