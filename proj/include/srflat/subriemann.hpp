#pragma once

#include <map>
#include <mutex>

#include "srflat/carnot.hpp"
#include "srflat/geometry.hpp"

namespace srflat {

struct SubRiemannError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Orthonormal horizontal frame X_1..X_k of (E, g).
struct SRStructure {
    FrameField frame;
    std::vector<std::string> names;  // defaults to X1..Xk
    std::vector<std::vector<mpq_class>> points;  // optional declared sample points

    const SpacePtr& space() const { return frame.front().space; }
    const Chart& chart() const { return space()->chart(); }
    size_t rank() const { return frame.size(); }
    size_t ambient() const { return space()->dim(); }
};

SRStructure make_sr(FrameField frame, const SampleConfig& cfg = {}, std::vector<std::string> names = {});

// Right-nested bracket word [X_w0, [X_w1, [..., X_wn]]].
using BracketWord = std::vector<int>;
std::string word_name(const BracketWord& w, const std::vector<std::string>& names);

// Iterated brackets of the frame, one layer per word length; symbolically zero words are pruned.
class BracketTower {
public:
    explicit BracketTower(const SRStructure& S);
    const std::vector<std::pair<BracketWord, VectorField>>& layer(size_t len) const;
    size_t depth_cap() const { return cap_; }

private:
    const SRStructure& S_;
    size_t cap_;
    mutable std::mutex mu_;
    mutable std::vector<std::vector<std::pair<BracketWord, VectorField>>> layers_;
};

using GrowthVector = std::vector<size_t>;
std::string to_string(const GrowthVector& g);

struct FlagAtPoint {
    std::vector<mpq_class> point;
    GrowthVector ranks;                       // rank E^1_x, E^2_x, ...
    std::vector<std::vector<BracketWord>> layer_words;  // words first raising the rank in each layer
    bool bracket_generating = false;
    bool exact = true;
};

FlagAtPoint flag_at_point(const BracketTower& T, const std::vector<mpq_class>& x);
FlagAtPoint flag_at_point(const SRStructure& S, const std::vector<mpq_class>& x);
// Throws SubRiemannError when E is not bracket-generating at x.
GrowthVector growth_vector(const SRStructure& S, const std::vector<mpq_class>& x);

struct EquiregularReport {
    bool pass = false;
    std::vector<std::vector<mpq_class>> points;
    std::vector<GrowthVector> growth;  // empty vector marks a non-bracket-generating point
    std::map<GrowthVector, std::vector<size_t>> classes;
};

EquiregularReport equiregular_check(const SRStructure& S, const std::vector<std::vector<mpq_class>>& points);
// Declared points when present, otherwise cfg.samples seeded points.
EquiregularReport equiregular_check(const SRStructure& S, const SampleConfig& cfg = {});

struct SymbolAlgebra {
    StratifiedAlgebra algebra;
    std::vector<mpq_class> point;
    std::vector<BracketWord> adapted_words;
    bool exact = true;
};

SymbolAlgebra symbol_at_point(const SRStructure& S, const std::vector<mpq_class>& x, const SampleConfig& cfg = {});

enum class SymbolDecision { Constant, NotConstant, Undecided };
const char* to_string(SymbolDecision d);

struct ConstantSymbolReport {
    SymbolDecision decision = SymbolDecision::Undecided;
    std::string growth_class;
    GrowthVector growth;
    std::vector<std::vector<double>> spectra;  // contact class: lambda per point
    std::vector<SymbolAlgebra> symbols;         // other classes: per-point structure constants
    std::string note;
};

ConstantSymbolReport constant_symbol_check(const SRStructure& S, const std::vector<std::vector<mpq_class>>& points,
                                           const SampleConfig& cfg = {});
ConstantSymbolReport constant_symbol_check(const SRStructure& S, const SampleConfig& cfg = {});

// Contact spectrum of a Heisenberg-type symbol: lambda_j = mu_max / mu_j for eigenvalues +-i mu_j
// of the bracket 2-form on the first stratum, ascending.
std::vector<double> contact_spectrum(const StratifiedAlgebra& sym);

mpq_class rationalize(double v);

}  // namespace srflat
