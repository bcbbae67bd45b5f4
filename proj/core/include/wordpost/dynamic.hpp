#pragma once

#include <Eigen/Core>

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "wordpost/embedding_store.hpp"

namespace wordpost {

// One center word and its ordered window [w_{i-c}..w_{i-1}, w_{i+1}..w_{i+c}].
struct ContextSample {
    Index center;
    std::span<const Index> context;
};

// Flat storage for many samples of the same half-window c.
class SampleBuffer {
public:
    explicit SampleBuffer(std::size_t half_window);

    void push(Index center, std::span<const Index> context);

    std::size_t size() const noexcept { return data_.size() / stride(); }
    bool empty() const noexcept { return data_.empty(); }
    std::size_t half_window() const noexcept { return half_window_; }
    std::size_t window() const noexcept { return 2 * half_window_; }

    ContextSample operator[](std::size_t i) const {
        const Index* row = data_.data() + i * stride();
        return {row[0], std::span<const Index>(row + 1, window())};
    }

private:
    std::size_t stride() const noexcept { return window() + 1; }

    std::size_t half_window_;
    std::vector<Index> data_;
};

struct Corpus {
    SampleBuffer samples;
    std::vector<std::uint64_t> counts;  // occurrences per vocabulary row, OOV mass on the UNK row
    std::size_t tokens = 0;
    std::size_t oov_tokens = 0;
};

// One sample per token with c in-vocabulary-or-UNK neighbours on each side
// inside its line. Tokens not in `vocab` map to `unk`.
Corpus ingest_corpus(std::istream& text, const Vocabulary& vocab, std::size_t half_window, Index unk);

inline constexpr const char* kUnkToken = "<unk>";

// Returns the row of `token`, appending it first (with the mean vector of the
// existing rows) if the vocabulary lacks it.
Index ensure_unk_row(Embeddings& emb, const std::string& token = kUnkToken);

// Draws word ids with probability ∝ count^alpha (zero counts are never drawn).
class NegativeSampler {
public:
    NegativeSampler(std::span<const std::uint64_t> counts, double alpha, std::uint64_t seed);

    Index operator()() { return dist_(rng_); }
    void fill(std::span<Index> out);
    std::vector<double> probabilities() const { return dist_.probabilities(); }

private:
    std::discrete_distribution<Index> dist_;
    std::mt19937_64 rng_;
};

struct PdeConfig {
    std::size_t k = 60;          // dynamic dimension
    std::size_t c = 5;           // context half-window
    std::size_t negatives = 5;   // N
    double beta = 0.5;           // orthogonalization rate
    double learning_rate = 0.025;
    double final_lr_fraction = 0.1;  // linear decay target
    std::size_t batch_size = 256;
    std::size_t epochs = 1;
    double alpha = 1.0;          // sampler exponent; 0.75 is the smoothed preset
    std::uint64_t seed = 1;

    // Throws std::invalid_argument; dim is the embedding dimension (k <= D).
    void validate(std::size_t dim) const;
};

// A (D x k, orthonormal columns) and b (2c, unit norm).
struct DynamicSubspace {
    Eigen::MatrixXd A;
    Vector b;

    std::size_t dim() const noexcept { return static_cast<std::size_t>(A.rows()); }
    std::size_t k() const noexcept { return static_cast<std::size_t>(A.cols()); }
    std::size_t c() const noexcept { return static_cast<std::size_t>(b.size()) / 2; }
};

// Header "k c D", then the k columns of A one per line, then b.
void save_subspace(std::ostream& out, const DynamicSubspace& s);
DynamicSubspace load_subspace(std::istream& in);

// ⟨Aᵀ V_i b, Aᵀ v(target)⟩; the one-sample overload uses the sample's center.
double score(const DynamicSubspace& s, const ContextSample& sample, const EmbeddingMatrix& emb);
double score(const DynamicSubspace& s, const ContextSample& sample, Index target, const EmbeddingMatrix& emb);

// Numerically stable log(1 / (1 + e^{-x})).
double log_sigmoid(double x);

// Σ_samples [log σ(s_center) + Σ_n log σ(−s_negative_n)]. `negatives` holds N
// ids per sample, sample-major.
double objective_batch(const DynamicSubspace& s, std::span<const ContextSample> batch,
                       std::span<const Index> negatives, const EmbeddingMatrix& emb);

struct ObjectiveGradient {
    double objective = 0;
    Eigen::MatrixXd dA;
    Vector db;
};

// objective_batch and its exact gradient with respect to A and b.
ObjectiveGradient objective_gradient(const DynamicSubspace& s, std::span<const ContextSample> batch,
                                     std::span<const Index> negatives, const EmbeddingMatrix& emb);

// Ascent step A += lr·∇A/|batch|, b += lr·∇b/|batch|. Returns the objective and
// gradient at the pre-step parameters. Throws NumericalError on non-finite gradients.
ObjectiveGradient gradient_step(DynamicSubspace& s, std::span<const ContextSample> batch,
                                std::span<const Index> negatives, const EmbeddingMatrix& emb, double lr);

// b / ‖b‖; throws NumericalError for a zero vector.
Vector renormalize_b(const Vector& b);

// One step of A := (1+β)A − βAAᵀA. Each singular value s maps to (1+β)s − βs³.
Eigen::MatrixXd reorthogonalize_A(const Eigen::MatrixXd& A, double beta);

// max |AᵀA − I|
double orthogonality_error(const Eigen::MatrixXd& A);

// Uniform ±1/√D entries driven to orthonormality, b uniform positive then unit.
DynamicSubspace initialize_subspace(std::size_t dim, std::size_t k, std::size_t c, double beta,
                                    std::mt19937_64& rng);

struct EpochStats {
    std::size_t epoch = 0;
    std::size_t samples = 0;
    double mean_objective = 0;  // per sample, at pre-step parameters
};

struct TrainResult {
    DynamicSubspace subspace;
    std::vector<EpochStats> log;
};

// Mini-batch SGD ascent on the negative-sampled objective; after every batch b
// is renormalized and A receives one orthogonalization step. Single-threaded,
// so a fixed seed reproduces the result bit for bit.
TrainResult train_pde(const SampleBuffer& samples, std::span<const std::uint64_t> counts,
                      const EmbeddingMatrix& emb, const PdeConfig& cfg,
                      const std::function<void(const EpochStats&)>& on_epoch = {});

// Mean per-sample objective of fixed parameters with fresh negatives.
double mean_objective(const DynamicSubspace& s, const SampleBuffer& samples,
                      std::span<const std::uint64_t> counts, const EmbeddingMatrix& emb,
                      std::size_t negatives, double alpha, std::uint64_t seed);

// [PCA-reduced static coordinates (static_dim) ; Aᵀ v(w) (k)] per row.
EmbeddingMatrix compose_embedding(const EmbeddingMatrix& emb, const DynamicSubspace& s, std::size_t static_dim);

}  // namespace wordpost
