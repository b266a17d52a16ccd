#pragma once

#include "srflat/symexpr.hpp"

#include <string>
#include <utility>
#include <vector>

namespace srflat {

enum class Verdict { FlatProven, FlatNumeric, NotFlat, Undecided };

const char* to_string(Verdict v);
inline bool is_flat(Verdict v) { return v == Verdict::FlatProven || v == Verdict::FlatNumeric; }

struct Residual {
    std::string slot;
    Expr value;
};

struct Violation {
    std::string slot;
    std::string expr;
    std::vector<double> witness;
    double value = 0;
    std::string zero_kind;
};

struct FlatnessReport {
    Verdict verdict = Verdict::Undecided;
    std::vector<Violation> violations;
    std::vector<std::pair<std::string, std::string>> transcript;
    std::vector<std::string> warnings;
    size_t residual_count = 0;
    size_t proven_zero = 0;
    std::string note;
};

// Zero-tests every residual. FlatProven needs every residual ProvenZero.
FlatnessReport certify(const std::vector<Residual>& residuals, const Chart& chart, const SampleConfig& cfg);

}  // namespace srflat
