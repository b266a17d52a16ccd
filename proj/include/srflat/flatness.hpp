#pragma once

#include "srflat/riemann.hpp"
#include "srflat/subriemann.hpp"

namespace srflat {

struct FlatnessError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Full frame ordered by layer; g_I makes it orthonormal.
struct GradedFrame {
    std::shared_ptr<const FullFrame> frame;
    std::vector<std::string> names;
    std::vector<size_t> layers;  // number of slots in V_1, V_2, ...

    size_t layer_of(size_t slot) const;
};

// T(v, w) = -[v, w] on the symbol, as (k * n + i) * n + j.
std::vector<mpq_class> model_torsion(const StratifiedAlgebra& g);

// Exact square root when e is a perfect square up to sign, otherwise a sqrt atom.
Expr root(const Expr& e);

// Throws FlatnessError unless every sample point has growth vector g.
void require_growth(const SRStructure& S, const GrowthVector& g, const SampleConfig& cfg);

std::string to_string(const VectorField& v);
std::string to_string(const OneForm& a);

// Engel-type (2,3,4).
struct EngelData {
    VectorField X0, X1, Z, Y, X2, X3;
    OneForm psi, theta;
    Expr c0, c1, C0, C1, C2;
    GradedFrame graded;
    std::vector<std::pair<std::string, std::string>> transcript;
};

// flip negates X_0 before the rest of the construction.
EngelData engel_canonical_data(const SRStructure& S, const SampleConfig& cfg = {}, bool flip = false);
FlatnessReport engel_flatness(const SRStructure& S, const SampleConfig& cfg = {});

// Contact, rank 2n in dimension 2n+1.
struct ContactData {
    OneForm theta;
    ExprMatrix A, Lambda, J;          // endomorphisms of E in the horizontal frame
    std::vector<mpq_class> lambda;    // distinct eigenvalues of Lambda, ascending
    std::vector<size_t> multiplicity; // pairs per eigenvalue
    std::vector<ExprMatrix> pr;       // eigenprojections of Lambda
    VectorField Z;
    std::shared_ptr<const FullFrame> frame;  // (X_1, ..., X_2n, Z)
    std::vector<std::pair<std::string, std::string>> transcript;
};

ContactData contact_normalize(const SRStructure& S, const SampleConfig& cfg = {}, bool flip = false);

struct ContactConnection {
    FrameConnection nabla;
    FrameConnection nabla_prime;
};

ContactConnection contact_connection(const ContactData& D);
FlatnessReport contact_flatness(const SRStructure& S, const SampleConfig& cfg = {});

// (2,3,5).
struct G235Data {
    std::shared_ptr<const FullFrame> bracket_frame;  // X_1, ..., X_5
    VectorField Z, Y1, Y2;
    GradedFrame graded;  // X_1, X_2 | Z | Y_1, Y_2
    bool y2_ambiguous = false;  // the printed Y_2 derivative term differs from its symmetric reading
    std::vector<std::pair<std::string, std::string>> transcript;

    // c_ij^k, 1-based
    const Expr& c(size_t i, size_t j, size_t k) const { return bracket_frame->b(i - 1, j - 1, k - 1); }
};

// Printed: Y2's derivative term X_i(c25^4 + c25^5). Symmetric: X_i(c24^4 + c25^5), mirroring Y1.
enum class Y2Reading { Printed, Symmetric };

G235Data g235_canonical_data(const SRStructure& S, const SampleConfig& cfg = {}, Y2Reading y2 = Y2Reading::Printed);
FrameConnection g235_connection(const G235Data& D);
FlatnessReport g235_flatness(const SRStructure& S, const SampleConfig& cfg = {}, Y2Reading y2 = Y2Reading::Printed);

}  // namespace srflat
