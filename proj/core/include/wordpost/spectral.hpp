#pragma once

#include <Eigen/Core>

#include <cstddef>
#include <iosfwd>

#include "wordpost/embedding_store.hpp"

namespace wordpost {

// Mean, leading principal directions (one per column, descending variance)
// and the standard deviation of the data along each direction.
struct SpectralBasis {
    Vector mean;
    Eigen::MatrixXd components;  // D x m, orthonormal columns
    Vector stddevs;              // m, non-increasing

    std::size_t dim() const noexcept { return static_cast<std::size_t>(components.rows()); }
    std::size_t size() const noexcept { return static_cast<std::size_t>(components.cols()); }
};

struct Centered {
    Vector mean;
    EmbeddingMatrix rows;
};

// Subtracts the column mean. Throws std::invalid_argument on an empty matrix.
Centered remove_mean(const EmbeddingMatrix& emb);

// Top-m eigenpairs of the population covariance XᵀX/|V| of already-centered
// rows. Each component is oriented so its largest-magnitude entry is positive.
// Rejects m outside [1, min(D, |V|)] and inputs whose column means exceed 1e-6.
SpectralBasis fit_pca(const EmbeddingMatrix& centered, std::size_t m);

// remove_mean + fit_pca, with the mean stored in the basis.
SpectralBasis fit_basis(const EmbeddingMatrix& emb, std::size_t m);

// Coefficients ⟨u_i, x⟩ for every component.
Vector project(const Eigen::Ref<const Vector>& x, const SpectralBasis& basis);

// Σ_i coeffs_i u_i over the first coeffs.size() components.
Vector reconstruct(const Eigen::Ref<const Vector>& coeffs, const SpectralBasis& basis);

// Top-`target` PCA coordinates of the mean-removed rows.
EmbeddingMatrix reduce_static(const EmbeddingMatrix& emb, std::size_t target);

// Text form: "m D", the mean line, m component lines, the stddev line.
void save_basis(std::ostream& out, const SpectralBasis& basis);
SpectralBasis load_basis(std::istream& in);

}  // namespace wordpost
