#pragma once

#include "srflat/geometry.hpp"
#include "srflat/report.hpp"

namespace srflat {

struct ChristoffelTable {
    SpacePtr space;
    size_t n = 0;
    std::vector<Expr> G;  // Gamma^k_ij at (k * n + i) * n + j

    const Expr& operator()(size_t k, size_t i, size_t j) const { return G[(k * n + i) * n + j]; }
};

// R^l_ijk at ((l * n + i) * n + j) * n + k, with R(E_i, E_j) E_k = sum_l R^l_ijk E_l.
struct CurvatureTensor {
    size_t n = 0;
    std::vector<Expr> R;

    const Expr& operator()(size_t l, size_t i, size_t j, size_t k) const { return R[((l * n + i) * n + j) * n + k]; }
};

ChristoffelTable levi_civita(const Metric& g, const SampleConfig& cfg = {});
CurvatureTensor riemann_tensor(const ChristoffelTable& C);
Expr gaussian_curvature(const Metric& g, const SampleConfig& cfg = {});
FlatnessReport riemannian_flatness(const Metric& g, const SampleConfig& cfg = {});

// nabla_{E_i} E_j = sum_k Gamma^k_ij E_k relative to a full frame.
struct FrameConnection {
    std::shared_ptr<const FullFrame> frame;
    std::vector<Expr> G;  // (k * n + i) * n + j

    explicit FrameConnection(std::shared_ptr<const FullFrame> f);
    size_t n() const { return frame->size(); }
    Expr& at(size_t k, size_t i, size_t j) { return G[(k * n() + i) * n() + j]; }
    const Expr& operator()(size_t k, size_t i, size_t j) const { return G[(k * n() + i) * n() + j]; }
    // nabla_{E_i} Y for Y given by frame coefficients.
    std::vector<Expr> covariant(size_t i, const std::vector<Expr>& y) const;
};

// T^k_ij at (k * n + i) * n + j
std::vector<Expr> frame_torsion(const FrameConnection& C);
CurvatureTensor frame_curvature(const FrameConnection& C);
// Levi-Civita connection of the metric making the frame orthonormal (Koszul formula).
FrameConnection koszul_orthonormal(std::shared_ptr<const FullFrame> f);

}  // namespace srflat
