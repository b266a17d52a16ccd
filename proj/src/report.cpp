#include "srflat/report.hpp"

namespace srflat {

const char* to_string(Verdict v) {
    switch (v) {
        case Verdict::FlatProven: return "FlatProven";
        case Verdict::FlatNumeric: return "FlatNumeric";
        case Verdict::NotFlat: return "NotFlat";
        case Verdict::Undecided: return "Undecided";
    }
    return "?";
}

FlatnessReport certify(const std::vector<Residual>& residuals, const Chart& chart, const SampleConfig& cfg) {
    FlatnessReport rep;
    rep.residual_count = residuals.size();
    bool numeric = false;
    for (const auto& r : residuals) {
        ZeroVerdict z;
        try {
            z = is_zero(r.value, chart, cfg);
        } catch (const SamplingError& e) {
            rep.verdict = Verdict::Undecided;
            rep.note = std::string("sampling failure on ") + r.slot + ": " + e.what();
            return rep;
        }
        if (z.kind == ZeroVerdict::Kind::ProvenZero) {
            ++rep.proven_zero;
        } else if (z.kind == ZeroVerdict::Kind::NumericallyZero) {
            numeric = true;
        } else {
            rep.violations.push_back({r.slot, to_string(r.value), z.witness, z.value, to_string(z.kind)});
        }
    }
    if (!rep.violations.empty())
        rep.verdict = Verdict::NotFlat;
    else
        rep.verdict = numeric ? Verdict::FlatNumeric : Verdict::FlatProven;
    return rep;
}

}  // namespace srflat
