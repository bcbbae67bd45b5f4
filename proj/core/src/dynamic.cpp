#include "wordpost/dynamic.hpp"

#include "wordpost/spectral.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace wordpost {

SampleBuffer::SampleBuffer(std::size_t half_window) : half_window_(half_window) {
    if (half_window == 0) throw std::invalid_argument("context half-window must be >= 1");
}

void SampleBuffer::push(Index center, std::span<const Index> context) {
    if (context.size() != window())
        throw std::invalid_argument("context has " + std::to_string(context.size()) + " words, expected " +
                                    std::to_string(window()));
    data_.push_back(center);
    data_.insert(data_.end(), context.begin(), context.end());
}

Corpus ingest_corpus(std::istream& text, const Vocabulary& vocab, std::size_t half_window, Index unk) {
    if (unk >= vocab.size()) throw std::invalid_argument("ingest_corpus: UNK index outside vocabulary");
    Corpus corpus{SampleBuffer(half_window), std::vector<std::uint64_t>(vocab.size(), 0)};
    const std::size_t c = half_window;

    std::string line;
    std::vector<Index> ids;
    std::vector<Index> context(2 * c);
    while (std::getline(text, line)) {
        ids.clear();
        std::istringstream tokens(line);
        std::string tok;
        while (tokens >> tok) {
            auto id = vocab.find(tok);
            if (!id) ++corpus.oov_tokens;
            ids.push_back(id ? *id : unk);
            ++corpus.counts[ids.back()];
        }
        corpus.tokens += ids.size();
        for (std::size_t i = c; i + c < ids.size(); ++i) {
            std::copy(ids.begin() + static_cast<std::ptrdiff_t>(i - c), ids.begin() + static_cast<std::ptrdiff_t>(i),
                      context.begin());
            std::copy(ids.begin() + static_cast<std::ptrdiff_t>(i + 1),
                      ids.begin() + static_cast<std::ptrdiff_t>(i + c + 1), context.begin() + static_cast<std::ptrdiff_t>(c));
            corpus.samples.push(ids[i], context);
        }
    }
    return corpus;
}

Index ensure_unk_row(Embeddings& emb, const std::string& token) {
    if (auto id = emb.vocab.find(token)) return *id;
    if (emb.vectors.cols() == 0) throw std::invalid_argument("ensure_unk_row: embedding has no dimension");
    Eigen::RowVectorXd mean = emb.vectors.rows() > 0 ? Eigen::RowVectorXd(emb.vectors.colwise().mean())
                                                     : Eigen::RowVectorXd::Zero(emb.vectors.cols());
    emb.vectors.conservativeResize(emb.vectors.rows() + 1, Eigen::NoChange);
    emb.vectors.row(emb.vectors.rows() - 1) = mean;
    return emb.vocab.add(token);
}

namespace {

std::vector<double> sampler_weights(std::span<const std::uint64_t> counts, double alpha) {
    if (!(alpha >= 0.0) || !std::isfinite(alpha)) throw std::invalid_argument("sampler exponent must be >= 0");
    std::vector<double> w(counts.size());
    for (std::size_t i = 0; i < counts.size(); ++i)
        w[i] = counts[i] > 0 ? std::pow(static_cast<double>(counts[i]), alpha) : 0.0;
    if (std::none_of(w.begin(), w.end(), [](double x) { return x > 0; }))
        throw std::invalid_argument("negative sampler needs at least one word with a positive count");
    return w;
}

}  // namespace

NegativeSampler::NegativeSampler(std::span<const std::uint64_t> counts, double alpha, std::uint64_t seed)
    : rng_(seed) {
    auto w = sampler_weights(counts, alpha);
    dist_ = std::discrete_distribution<Index>(w.begin(), w.end());
}

void NegativeSampler::fill(std::span<Index> out) {
    for (auto& id : out) id = dist_(rng_);
}

void PdeConfig::validate(std::size_t dim) const {
    auto fail = [](const std::string& msg) { throw std::invalid_argument("pde config: " + msg); };
    if (k < 1) fail("k must be >= 1");
    if (dim > 0 && k > dim) fail("k=" + std::to_string(k) + " exceeds embedding dimension " + std::to_string(dim));
    if (c < 1) fail("c must be >= 1");
    if (negatives < 1) fail("negatives must be >= 1");
    if (!(beta > 0.0 && beta <= 1.0)) fail("beta must lie in (0, 1]");
    if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) fail("learning rate must be > 0");
    if (!(final_lr_fraction > 0.0 && final_lr_fraction <= 1.0)) fail("final lr fraction must lie in (0, 1]");
    if (batch_size < 1) fail("batch size must be >= 1");
    if (epochs < 1) fail("epochs must be >= 1");
    if (!(alpha >= 0.0)) fail("alpha must be >= 0");
}

void save_subspace(std::ostream& out, const DynamicSubspace& s) {
    const Eigen::IOFormat fmt(Eigen::FullPrecision, Eigen::DontAlignCols, " ", " ");
    out << s.k() << ' ' << s.c() << ' ' << s.dim() << '\n';
    for (Eigen::Index j = 0; j < s.A.cols(); ++j) out << s.A.col(j).transpose().format(fmt) << '\n';
    out << s.b.transpose().format(fmt) << '\n';
    if (!out) throw std::runtime_error("write failed");
}

DynamicSubspace load_subspace(std::istream& in) {
    std::string line;
    std::size_t line_no = 0;
    auto next_line = [&]() -> std::istringstream {
        while (std::getline(in, line)) {
            ++line_no;
            if (line.find_first_not_of(" \t\r") != std::string::npos) return std::istringstream(line);
        }
        throw ParseError("subspace: unexpected end of input", line_no + 1);
    };
    auto read_values = [&](Eigen::Index n) {
        auto fields = next_line();
        Vector v(n);
        for (Eigen::Index i = 0; i < n; ++i)
            if (!(fields >> v(i)) || !std::isfinite(v(i)))
                throw ParseError("subspace: expected " + std::to_string(n) + " finite values", line_no);
        std::string extra;
        if (fields >> extra) throw ParseError("subspace: too many values", line_no);
        return v;
    };

    std::size_t k = 0, c = 0, d = 0;
    auto header = next_line();
    if (!(header >> k >> c >> d) || k == 0 || c == 0 || d == 0)
        throw ParseError("subspace: expected header '<k> <c> <D>'", line_no);

    DynamicSubspace s;
    s.A.resize(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(k));
    for (std::size_t j = 0; j < k; ++j) s.A.col(static_cast<Eigen::Index>(j)) = read_values(static_cast<Eigen::Index>(d));
    s.b = read_values(static_cast<Eigen::Index>(2 * c));
    return s;
}

namespace {

void check_shapes(const DynamicSubspace& s, const ContextSample& sample, const EmbeddingMatrix& emb) {
    if (s.A.rows() != emb.cols())
        throw std::invalid_argument("subspace dimension " + std::to_string(s.A.rows()) +
                                    " does not match embedding dimension " + std::to_string(emb.cols()));
    if (static_cast<Eigen::Index>(sample.context.size()) != s.b.size())
        throw std::invalid_argument("context window of " + std::to_string(sample.context.size()) +
                                    " words does not match b of length " + std::to_string(s.b.size()));
}

// Columns are the context vectors in window order (D x 2c).
Eigen::MatrixXd gather_context(const ContextSample& sample, const EmbeddingMatrix& emb) {
    Eigen::MatrixXd V(emb.cols(), static_cast<Eigen::Index>(sample.context.size()));
    for (std::size_t j = 0; j < sample.context.size(); ++j)
        V.col(static_cast<Eigen::Index>(j)) = emb.row(sample.context[j]).transpose();
    return V;
}

double sigmoid(double x) {
    if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
    const double e = std::exp(x);
    return e / (1.0 + e);
}

std::size_t negatives_per_sample(std::size_t batch, std::size_t negatives) {
    if (batch == 0) return 0;
    if (negatives % batch != 0)
        throw std::invalid_argument("negative ids (" + std::to_string(negatives) +
                                    ") are not a multiple of the batch size (" + std::to_string(batch) + ")");
    return negatives / batch;
}

}  // namespace

double score(const DynamicSubspace& s, const ContextSample& sample, Index target, const EmbeddingMatrix& emb) {
    check_shapes(s, sample, emb);
    const Vector predicted = s.A.transpose() * (gather_context(sample, emb) * s.b);
    const Vector actual = s.A.transpose() * emb.row(target).transpose();
    return predicted.dot(actual);
}

double score(const DynamicSubspace& s, const ContextSample& sample, const EmbeddingMatrix& emb) {
    return score(s, sample, sample.center, emb);
}

double log_sigmoid(double x) {
    if (x >= 0) return -std::log1p(std::exp(-x));
    return x - std::log1p(std::exp(x));
}

ObjectiveGradient objective_gradient(const DynamicSubspace& s, std::span<const ContextSample> batch,
                                     std::span<const Index> negatives, const EmbeddingMatrix& emb) {
    const std::size_t n_neg = negatives_per_sample(batch.size(), negatives.size());
    ObjectiveGradient g;
    g.dA = Eigen::MatrixXd::Zero(s.A.rows(), s.A.cols());
    g.db = Vector::Zero(s.b.size());

    const Eigen::MatrixXd At = s.A.transpose();
    Vector weighted_targets(s.A.rows());  // Σ_t coeff_t q_t
    Vector weighted_proj(s.A.cols());     // Σ_t coeff_t Aᵀq_t
    for (std::size_t i = 0; i < batch.size(); ++i) {
        const ContextSample& sample = batch[i];
        check_shapes(s, sample, emb);
        const Eigen::MatrixXd V = gather_context(sample, emb);
        const Eigen::MatrixXd ctx_proj = At * V;  // k x 2c
        const Vector p = V * s.b;
        const Vector proj_p = ctx_proj * s.b;

        weighted_targets.setZero();
        weighted_proj.setZero();
        for (std::size_t t = 0; t <= n_neg; ++t) {
            const bool positive = t == 0;
            const Index target = positive ? sample.center : negatives[i * n_neg + t - 1];
            const auto q = emb.row(target).transpose();
            const Vector proj_q = At * q;
            const double sc = proj_p.dot(proj_q);
            // d/ds log σ(s) = σ(−s); d/ds log σ(−s) = −σ(s)
            double coeff;
            if (positive) {
                g.objective += log_sigmoid(sc);
                coeff = sigmoid(-sc);
            } else {
                g.objective += log_sigmoid(-sc);
                coeff = -sigmoid(sc);
            }
            weighted_targets.noalias() += coeff * q;
            weighted_proj.noalias() += coeff * proj_q;
        }
        // ∂s/∂A = p (Aᵀq)ᵀ + q (Aᵀp)ᵀ, ∂s/∂b = Vᵀ A Aᵀ q
        g.dA.noalias() += p * weighted_proj.transpose();
        g.dA.noalias() += weighted_targets * proj_p.transpose();
        g.db.noalias() += ctx_proj.transpose() * weighted_proj;
    }
    return g;
}

double objective_batch(const DynamicSubspace& s, std::span<const ContextSample> batch,
                       std::span<const Index> negatives, const EmbeddingMatrix& emb) {
    const std::size_t n_neg = negatives_per_sample(batch.size(), negatives.size());
    double total = 0;
    for (std::size_t i = 0; i < batch.size(); ++i) {
        total += log_sigmoid(score(s, batch[i], emb));
        for (std::size_t t = 0; t < n_neg; ++t) total += log_sigmoid(-score(s, batch[i], negatives[i * n_neg + t], emb));
    }
    return total;
}

ObjectiveGradient gradient_step(DynamicSubspace& s, std::span<const ContextSample> batch,
                                std::span<const Index> negatives, const EmbeddingMatrix& emb, double lr) {
    ObjectiveGradient g = objective_gradient(s, batch, negatives, emb);
    if (!g.dA.allFinite() || !g.db.allFinite() || !std::isfinite(g.objective)) {
        std::ostringstream msg;
        msg << "non-finite gradient (objective " << g.objective << ", |A| " << s.A.norm() << ", |b| " << s.b.norm()
            << ", batch " << batch.size() << ")";
        throw NumericalError(msg.str());
    }
    if (batch.empty() || lr == 0.0) return g;
    const double scale = lr / static_cast<double>(batch.size());
    s.A.noalias() += scale * g.dA;
    s.b.noalias() += scale * g.db;
    return g;
}

Vector renormalize_b(const Vector& b) {
    const double n = b.norm();
    if (!(n > 0.0) || !std::isfinite(n)) throw NumericalError("cannot renormalize a zero or non-finite b");
    return b / n;
}

Eigen::MatrixXd reorthogonalize_A(const Eigen::MatrixXd& A, double beta) {
    const Eigen::MatrixXd gram = A.transpose() * A;
    return (1.0 + beta) * A - beta * (A * gram);
}

double orthogonality_error(const Eigen::MatrixXd& A) {
    const Eigen::MatrixXd gram = A.transpose() * A;
    return (gram - Eigen::MatrixXd::Identity(gram.rows(), gram.cols())).cwiseAbs().maxCoeff();
}

namespace {

// Fixed-point iteration of the orthogonalization map. Converges whenever every
// singular value starts inside (0, sqrt((1+β)/β)).
Eigen::MatrixXd polish_orthogonality(Eigen::MatrixXd A, double beta, double tol) {
    for (int it = 0; it < 200 && orthogonality_error(A) > tol; ++it) A = reorthogonalize_A(A, beta);
    if (!(orthogonality_error(A) <= tol))
        throw NumericalError("orthogonalization did not converge (error " + std::to_string(orthogonality_error(A)) + ")");
    return A;
}

}  // namespace

DynamicSubspace initialize_subspace(std::size_t dim, std::size_t k, std::size_t c, double beta,
                                    std::mt19937_64& rng) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(dim));
    std::uniform_real_distribution<double> entry(-bound, bound);
    std::uniform_real_distribution<double> weight(0.0, 1.0);
    DynamicSubspace s;
    s.A.resize(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(k));
    for (Eigen::Index j = 0; j < s.A.cols(); ++j)
        for (Eigen::Index i = 0; i < s.A.rows(); ++i) s.A(i, j) = entry(rng);
    s.b.resize(static_cast<Eigen::Index>(2 * c));
    for (Eigen::Index i = 0; i < s.b.size(); ++i) s.b(i) = weight(rng);

    // Scale so the largest singular value is 1; the iteration then converges
    // from below for any k <= D.
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> gram(s.A.transpose() * s.A, Eigen::EigenvaluesOnly);
    const double top = std::sqrt(gram.eigenvalues().maxCoeff());
    if (!(top > 0.0)) throw NumericalError("degenerate random initialization");
    s.A /= top;
    s.A = polish_orthogonality(s.A, beta, 1e-12);
    s.b = renormalize_b(s.b);
    return s;
}

TrainResult train_pde(const SampleBuffer& samples, std::span<const std::uint64_t> counts,
                      const EmbeddingMatrix& emb, const PdeConfig& cfg,
                      const std::function<void(const EpochStats&)>& on_epoch) {
    cfg.validate(static_cast<std::size_t>(emb.cols()));
    if (samples.half_window() != cfg.c)
        throw std::invalid_argument("samples use half-window " + std::to_string(samples.half_window()) +
                                    " but config has c=" + std::to_string(cfg.c));
    if (samples.empty()) throw std::invalid_argument("train_pde: corpus produced no samples");
    if (counts.size() != static_cast<std::size_t>(emb.rows()))
        throw std::invalid_argument("train_pde: counts do not match the embedding rows");

    std::mt19937_64 rng(cfg.seed);
    NegativeSampler sampler(counts, cfg.alpha, rng());

    TrainResult result;
    result.subspace = initialize_subspace(static_cast<std::size_t>(emb.cols()), cfg.k, cfg.c, cfg.beta, rng);
    DynamicSubspace& s = result.subspace;

    const std::size_t n = samples.size();
    const std::size_t batches_per_epoch = (n + cfg.batch_size - 1) / cfg.batch_size;
    const double total_batches = static_cast<double>(batches_per_epoch * cfg.epochs);
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::vector<ContextSample> batch;
    std::vector<Index> negatives;
    batch.reserve(cfg.batch_size);

    std::size_t step = 0;
    for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
        std::shuffle(order.begin(), order.end(), rng);
        double epoch_objective = 0;
        for (std::size_t start = 0; start < n; start += cfg.batch_size, ++step) {
            const std::size_t stop = std::min(n, start + cfg.batch_size);
            batch.clear();
            for (std::size_t i = start; i < stop; ++i) batch.push_back(samples[order[i]]);
            negatives.resize(batch.size() * cfg.negatives);
            sampler.fill(negatives);

            const double progress = static_cast<double>(step) / total_batches;
            const double lr = cfg.learning_rate * (1.0 - (1.0 - cfg.final_lr_fraction) * progress);
            epoch_objective += gradient_step(s, batch, negatives, emb, lr).objective;
            s.b = renormalize_b(s.b);
            s.A = reorthogonalize_A(s.A, cfg.beta);
        }
        EpochStats stats{epoch, n, epoch_objective / static_cast<double>(n)};
        result.log.push_back(stats);
        if (on_epoch) on_epoch(stats);
    }
    // One orthogonalization step per batch trails the gradient by a little;
    // finish on the constraint set.
    s.A = polish_orthogonality(s.A, cfg.beta, 1e-10);
    s.b = renormalize_b(s.b);
    return result;
}

double mean_objective(const DynamicSubspace& s, const SampleBuffer& samples, std::span<const std::uint64_t> counts,
                      const EmbeddingMatrix& emb, std::size_t negatives, double alpha, std::uint64_t seed) {
    if (samples.empty()) throw std::invalid_argument("mean_objective: no samples");
    NegativeSampler sampler(counts, alpha, seed);
    std::vector<Index> neg(negatives);
    double total = 0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        sampler.fill(neg);
        const ContextSample sample = samples[i];
        total += objective_batch(s, std::span<const ContextSample>(&sample, 1), neg, emb);
    }
    return total / static_cast<double>(samples.size());
}

EmbeddingMatrix compose_embedding(const EmbeddingMatrix& emb, const DynamicSubspace& s, std::size_t static_dim) {
    if (s.k() == 0) throw std::invalid_argument("compose: subspace has no dynamic dimensions");
    if (s.dim() != static_cast<std::size_t>(emb.cols()))
        throw std::invalid_argument("compose: subspace dimension " + std::to_string(s.dim()) +
                                    " does not match embedding dimension " + std::to_string(emb.cols()));
    if (static_dim > static_cast<std::size_t>(emb.cols()))
        throw std::invalid_argument("compose: static dimension " + std::to_string(static_dim) +
                                    " exceeds embedding dimension " + std::to_string(emb.cols()));
    const auto sd = static_cast<Eigen::Index>(static_dim);
    EmbeddingMatrix out(emb.rows(), sd + s.A.cols());
    if (static_dim > 0) out.leftCols(sd) = reduce_static(emb, static_dim);
    out.rightCols(s.A.cols()) = emb * s.A;
    return out;
}

}  // namespace wordpost
