#pragma once

#include <cstddef>
#include <iosfwd>

#include "wordpost/embedding_store.hpp"
#include "wordpost/spectral.hpp"

namespace wordpost {

// Threshold for variance normalization: the first d components are rescaled
// to the spread of component d+1.
struct PvnConfig {
    std::size_t d = 0;

    // round(D / 50)
    static PvnConfig for_dimension(std::size_t dim);
    // The value used for every reported experiment.
    static PvnConfig preset() { return PvnConfig{11}; }

    // Requires d + 1 <= min(D, |V|).
    void validate(std::size_t dim, std::size_t rows) const;
};

inline constexpr std::size_t kPresetThreshold = 11;

// Variance normalization of the leading principal components:
//   v'(w) = ṽ(w) − Σ_{i≤d} ((σ_i − σ_{d+1}) / σ_i) (u_iᵀ ṽ(w)) u_i
// where ṽ is the mean-removed input. After the transform the spread along
// u_1..u_d equals σ_{d+1}. Throws NumericalError if any of σ_1..σ_{d+1} is zero.
EmbeddingMatrix pvn(const EmbeddingMatrix& emb, const PvnConfig& cfg);

// Removes the mean and the top d principal components entirely.
EmbeddingMatrix ppa(const EmbeddingMatrix& emb, std::size_t d);

// Shared-basis variants: `centered` must already be mean-removed and `basis`
// must hold at least d+1 (pvn) or d (ppa) components.
EmbeddingMatrix pvn_with_basis(const EmbeddingMatrix& centered, const SpectralBasis& basis, std::size_t d);
EmbeddingMatrix ppa_with_basis(const EmbeddingMatrix& centered, const SpectralBasis& basis, std::size_t d);

// ṽ − Σ_i shrink_i (u_iᵀ ṽ) u_i for i < shrink.size(). Both transforms above
// reduce to this with different shrink factors.
EmbeddingMatrix shrink_components(const EmbeddingMatrix& centered, const SpectralBasis& basis,
                                  const Eigen::Ref<const Vector>& shrink);

// PVN shrink factors (σ_i − σ_{d+1}) / σ_i for i = 1..d.
Vector pvn_factors(const SpectralBasis& basis, std::size_t d);

struct AnisotropyReport {
    std::size_t rows = 0;
    std::size_t dim = 0;
    double mean_norm = 0;
    double average_row_norm = 0;
    double mean_norm_ratio = 0;  // ‖μ‖ / mean_w ‖v(w)‖
    Vector stddevs;              // σ_1..σ_top
    Vector ratios;               // σ_i / σ_top
    Vector energy;               // σ_i² / total variance
};

// Range: 1 <= top <= min(D, |V|).
AnisotropyReport anisotropy_report(const EmbeddingMatrix& emb, std::size_t top);

void print_report(std::ostream& out, const AnisotropyReport& report);

}  // namespace wordpost
