#include "wordpost/postprocess.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <string>

namespace wordpost {

PvnConfig PvnConfig::for_dimension(std::size_t dim) {
    return PvnConfig{static_cast<std::size_t>(std::lround(static_cast<double>(dim) / 50.0))};
}

void PvnConfig::validate(std::size_t dim, std::size_t rows) const {
    const std::size_t limit = std::min(dim, rows);
    if (d + 1 > limit)
        throw std::invalid_argument("threshold d=" + std::to_string(d) + " needs d+1 <= min(D, |V|) = " +
                                    std::to_string(limit));
}

Vector pvn_factors(const SpectralBasis& basis, std::size_t d) {
    if (basis.size() < d + 1) throw std::invalid_argument("pvn: basis holds fewer than d+1 components");
    const double floor = basis.stddevs(static_cast<Eigen::Index>(d));
    // σ is non-increasing, so checking σ_{d+1} covers σ_1..σ_{d+1}. Eigenvalue
    // round-off is about eps·σ_1², i.e. a stddev of ~1e-8·σ_1, so anything
    // below 1e-7·σ_1 is indistinguishable from zero.
    if (!(floor > 1e-7 * basis.stddevs(0)))
        throw NumericalError("pvn: standard deviation of component " + std::to_string(d + 1) +
                             " is zero (rank-deficient input)");
    Vector f(static_cast<Eigen::Index>(d));
    for (Eigen::Index i = 0; i < f.size(); ++i) f(i) = (basis.stddevs(i) - floor) / basis.stddevs(i);
    return f;
}

EmbeddingMatrix shrink_components(const EmbeddingMatrix& centered, const SpectralBasis& basis,
                                  const Eigen::Ref<const Vector>& shrink) {
    if (static_cast<std::size_t>(centered.cols()) != basis.dim())
        throw std::invalid_argument("shrink_components: dimension mismatch");
    if (static_cast<std::size_t>(shrink.size()) > basis.size())
        throw std::invalid_argument("shrink_components: more factors than components");
    if (shrink.size() == 0) return centered;
    const auto u = basis.components.leftCols(shrink.size());
    Eigen::MatrixXd coeffs = centered * u;
    coeffs = coeffs * shrink.asDiagonal();
    return centered - coeffs * u.transpose();
}

EmbeddingMatrix pvn_with_basis(const EmbeddingMatrix& centered, const SpectralBasis& basis, std::size_t d) {
    return shrink_components(centered, basis, pvn_factors(basis, d));
}

EmbeddingMatrix ppa_with_basis(const EmbeddingMatrix& centered, const SpectralBasis& basis, std::size_t d) {
    if (basis.size() < d) throw std::invalid_argument("ppa: basis holds fewer than d components");
    return shrink_components(centered, basis, Vector::Ones(static_cast<Eigen::Index>(d)));
}

EmbeddingMatrix pvn(const EmbeddingMatrix& emb, const PvnConfig& cfg) {
    cfg.validate(static_cast<std::size_t>(emb.cols()), static_cast<std::size_t>(emb.rows()));
    Centered c = remove_mean(emb);
    if (cfg.d == 0) return std::move(c.rows);
    SpectralBasis basis = fit_pca(c.rows, cfg.d + 1);
    return pvn_with_basis(c.rows, basis, cfg.d);
}

EmbeddingMatrix ppa(const EmbeddingMatrix& emb, std::size_t d) {
    PvnConfig{d}.validate(static_cast<std::size_t>(emb.cols()), static_cast<std::size_t>(emb.rows()));
    Centered c = remove_mean(emb);
    if (d == 0) return std::move(c.rows);
    SpectralBasis basis = fit_pca(c.rows, d);
    return ppa_with_basis(c.rows, basis, d);
}

AnisotropyReport anisotropy_report(const EmbeddingMatrix& emb, std::size_t top) {
    const auto n = static_cast<std::size_t>(emb.rows());
    const auto dim = static_cast<std::size_t>(emb.cols());
    if (top < 1 || top > std::min(n, dim))
        throw std::invalid_argument("anisotropy_report: top=" + std::to_string(top) + " outside [1, " +
                                    std::to_string(std::min(n, dim)) + "]");
    AnisotropyReport r;
    r.rows = n;
    r.dim = dim;
    Centered c = remove_mean(emb);
    r.mean_norm = c.mean.norm();
    r.average_row_norm = emb.rowwise().norm().mean();
    r.mean_norm_ratio = r.average_row_norm > 0 ? r.mean_norm / r.average_row_norm
                                               : std::numeric_limits<double>::infinity();

    SpectralBasis basis = fit_pca(c.rows, top);
    r.stddevs = basis.stddevs;
    const double last = basis.stddevs(basis.stddevs.size() - 1);
    // A zero last spread makes every non-zero ratio infinite; equal spreads stay 1.
    r.ratios = basis.stddevs.unaryExpr([last](double s) {
        return s == last ? 1.0 : last > 0 ? s / last : std::numeric_limits<double>::infinity();
    });
    const double total = c.rows.squaredNorm() / static_cast<double>(n);
    r.energy = total > 0 ? Vector(basis.stddevs.array().square() / total) : Vector::Zero(basis.stddevs.size());
    return r;
}

void print_report(std::ostream& out, const AnisotropyReport& r) {
    const auto flags = out.flags();
    const auto prec = out.precision();
    out << "rows " << r.rows << "\n"
        << "dim " << r.dim << "\n"
        << std::setprecision(9)
        << "mean_norm " << r.mean_norm << "\n"
        << "average_row_norm " << r.average_row_norm << "\n"
        << "mean_norm_ratio " << r.mean_norm_ratio << "\n"
        << "component stddev ratio_to_last energy\n";
    for (Eigen::Index i = 0; i < r.stddevs.size(); ++i)
        out << (i + 1) << ' ' << r.stddevs(i) << ' ' << r.ratios(i) << ' ' << r.energy(i) << '\n';
    out.flags(flags);
    out.precision(prec);
}

}  // namespace wordpost
