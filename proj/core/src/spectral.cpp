#include "wordpost/spectral.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace wordpost {

namespace {

constexpr double kCenteredTolerance = 1e-6;

void orient(Eigen::Ref<Eigen::VectorXd> u) {
    Eigen::Index arg = 0;
    u.cwiseAbs().maxCoeff(&arg);
    if (u(arg) < 0) u = -u;
}

}  // namespace

Centered remove_mean(const EmbeddingMatrix& emb) {
    if (emb.rows() == 0 || emb.cols() == 0) throw std::invalid_argument("remove_mean: empty matrix");
    Centered out;
    out.mean = emb.colwise().mean().transpose();
    out.rows = emb.rowwise() - out.mean.transpose();
    return out;
}

SpectralBasis fit_pca(const EmbeddingMatrix& centered, std::size_t m) {
    const auto n = static_cast<std::size_t>(centered.rows());
    const auto d = static_cast<std::size_t>(centered.cols());
    if (n == 0 || d == 0) throw std::invalid_argument("fit_pca: empty matrix");
    if (m < 1 || m > std::min(n, d))
        throw std::invalid_argument("fit_pca: component count " + std::to_string(m) + " outside [1, " +
                                    std::to_string(std::min(n, d)) + "]");

    Vector col_mean = centered.colwise().mean().transpose();
    if (col_mean.cwiseAbs().maxCoeff() > kCenteredTolerance)
        throw std::invalid_argument("fit_pca: input is not mean-removed (max |column mean| = " +
                                    std::to_string(col_mean.cwiseAbs().maxCoeff()) + ")");

    Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
    cov.selfadjointView<Eigen::Lower>().rankUpdate(centered.transpose());
    cov.triangularView<Eigen::StrictlyUpper>() = cov.transpose();
    cov /= static_cast<double>(n);

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
    if (solver.info() != Eigen::Success) throw NumericalError("fit_pca: eigendecomposition failed");

    // Eigen returns ascending eigenvalues; take them from the back.
    SpectralBasis basis;
    basis.mean = col_mean;
    basis.components.resize(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(m));
    basis.stddevs.resize(static_cast<Eigen::Index>(m));
    for (std::size_t i = 0; i < m; ++i) {
        const auto src = static_cast<Eigen::Index>(d - 1 - i);
        const auto dst = static_cast<Eigen::Index>(i);
        basis.components.col(dst) = solver.eigenvectors().col(src);
        orient(basis.components.col(dst));
        basis.stddevs(dst) = std::sqrt(std::max(0.0, solver.eigenvalues()(src)));
    }
    return basis;
}

SpectralBasis fit_basis(const EmbeddingMatrix& emb, std::size_t m) {
    Centered c = remove_mean(emb);
    SpectralBasis basis = fit_pca(c.rows, m);
    basis.mean = std::move(c.mean);
    return basis;
}

Vector project(const Eigen::Ref<const Vector>& x, const SpectralBasis& basis) {
    if (static_cast<std::size_t>(x.size()) != basis.dim())
        throw std::invalid_argument("project: vector has length " + std::to_string(x.size()) + ", basis dim is " +
                                    std::to_string(basis.dim()));
    return basis.components.transpose() * x;
}

Vector reconstruct(const Eigen::Ref<const Vector>& coeffs, const SpectralBasis& basis) {
    if (static_cast<std::size_t>(coeffs.size()) > basis.size())
        throw std::invalid_argument("reconstruct: more coefficients than components");
    return basis.components.leftCols(coeffs.size()) * coeffs;
}

EmbeddingMatrix reduce_static(const EmbeddingMatrix& emb, std::size_t target) {
    const auto d = static_cast<std::size_t>(emb.cols());
    if (target < 1 || target > d)
        throw std::invalid_argument("reduce_static: target " + std::to_string(target) + " outside [1, " +
                                    std::to_string(d) + "]");
    Centered c = remove_mean(emb);
    SpectralBasis basis = fit_pca(c.rows, std::min<std::size_t>(target, static_cast<std::size_t>(emb.rows())));
    EmbeddingMatrix out = EmbeddingMatrix::Zero(emb.rows(), static_cast<Eigen::Index>(target));
    out.leftCols(basis.components.cols()) = c.rows * basis.components;
    return out;
}

void save_basis(std::ostream& out, const SpectralBasis& basis) {
    const Eigen::IOFormat fmt(Eigen::FullPrecision, Eigen::DontAlignCols, " ", " ");
    out << basis.size() << ' ' << basis.dim() << '\n';
    out << basis.mean.transpose().format(fmt) << '\n';
    for (Eigen::Index i = 0; i < basis.components.cols(); ++i)
        out << basis.components.col(i).transpose().format(fmt) << '\n';
    out << basis.stddevs.transpose().format(fmt) << '\n';
}

SpectralBasis load_basis(std::istream& in) {
    std::size_t m = 0, d = 0;
    if (!(in >> m >> d) || d == 0) throw ParseError("basis: expected header '<m> <D>'", 1);
    auto read_row = [&](Eigen::Index len, std::size_t line) {
        Vector row(len);
        for (Eigen::Index j = 0; j < len; ++j)
            if (!(in >> row(j)) || !std::isfinite(row(j))) throw ParseError("basis: bad value", line);
        return row;
    };
    SpectralBasis basis;
    const auto dd = static_cast<Eigen::Index>(d);
    basis.mean = read_row(dd, 2);
    basis.components.resize(dd, static_cast<Eigen::Index>(m));
    for (std::size_t i = 0; i < m; ++i) basis.components.col(static_cast<Eigen::Index>(i)) = read_row(dd, 3 + i);
    basis.stddevs = read_row(static_cast<Eigen::Index>(m), 3 + m);
    return basis;
}

}  // namespace wordpost
