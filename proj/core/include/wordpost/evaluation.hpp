#pragma once

#include <Eigen/Core>

#include <array>
#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "wordpost/embedding_store.hpp"

namespace wordpost {

// Throws std::invalid_argument on a zero vector or length mismatch.
double cosine(const Eigen::Ref<const Vector>& u, const Eigen::Ref<const Vector>& v);

// 1-based ranks; tied values share the average of their positions.
std::vector<double> average_ranks(std::span<const double> values);

// Spearman's rho: Pearson correlation of average ranks.
double srcc(std::span<const double> x, std::span<const double> y);

struct SimilarityPair {
    std::string first;
    std::string second;
    double score = 0;
};

struct SimilarityDataset {
    std::string name;
    std::vector<SimilarityPair> pairs;
};

struct AnalogyQuestion {
    std::array<std::string, 4> words;  // a : b :: c : d
};

struct AnalogyCategory {
    std::string name;
    std::vector<AnalogyQuestion> questions;
};

struct AnalogyDataset {
    std::string name;
    std::vector<AnalogyCategory> categories;

    std::size_t size() const;
};

// "w1 w2 score" per line (blank or tab separated). '#' comment lines and a
// leading header line whose last field is not numeric are skipped.
SimilarityDataset load_similarity(std::istream& in, std::string name);

// ": category" section lines followed by "a b c d" questions. Questions before
// the first section go to a category named after the dataset.
AnalogyDataset load_analogy(std::istream& in, std::string name);

enum class DatasetKind { similarity, analogy };

// Looks at the first non-comment line (past a similarity header): ':' or four
// fields means analogy, three fields ending in a number means similarity.
DatasetKind detect_dataset_kind(std::istream& in);

// Row id for `token`, falling back to its ASCII-lowercased form.
std::optional<Index> resolve(const Vocabulary& vocab, std::string_view token);

struct ReportRow {
    std::string dataset;
    std::string task;
    std::size_t pairs_total = 0;
    std::size_t pairs_used = 0;
    std::size_t skipped = 0;
    double score_x100 = 0;
};

// SRCC x100 between cosine and human scores over pairs whose words both have
// a non-zero vector. Throws std::invalid_argument with fewer than 2 usable pairs.
ReportRow eval_similarity(const Vocabulary& vocab, const EmbeddingMatrix& emb, const SimilarityDataset& ds);

enum class AnalogyMode { add, mul };

std::string_view to_string(AnalogyMode mode);

inline constexpr double kMulEpsilon = 1e-3;

// Holds unit-normalized rows so many questions can be answered cheaply.
// Candidates exclude the three query words.
class AnalogySolver {
public:
    AnalogySolver(const Vocabulary& vocab, const EmbeddingMatrix& emb);

    // 3CosAdd: argmax_x cos(x, b − a + c)
    Index add(Index a, Index b, Index c) const;
    // 3CosMul: argmax_x cos'(x,b)·cos'(x,c) / (cos'(x,a) + ε), cos' = (1 + cos)/2
    Index mul(Index a, Index b, Index c) const;
    Index predict(AnalogyMode mode, Index a, Index b, Index c) const;

    const Vocabulary& vocab() const noexcept { return vocab_; }

private:
    Index best(const Vector& scores, Index a, Index b, Index c) const;

    const Vocabulary& vocab_;
    EmbeddingMatrix unit_;
};

// One-shot helpers; throw OutOfVocabulary for unknown query words.
std::string analogy_add(const Vocabulary& vocab, const EmbeddingMatrix& emb, std::string_view a,
                        std::string_view b, std::string_view c);
std::string analogy_mul(const Vocabulary& vocab, const EmbeddingMatrix& emb, std::string_view a,
                        std::string_view b, std::string_view c);

struct AnalogyResult {
    ReportRow overall;
    std::vector<ReportRow> categories;
};

// Accuracy x100 over questions whose four words are all in the vocabulary.
// Throws std::invalid_argument if no question survives that filter.
AnalogyResult eval_analogy(const Vocabulary& vocab, const EmbeddingMatrix& emb, const AnalogyDataset& ds,
                           AnalogyMode mode);

// Σ score·pairs_total / Σ pairs_total
double weighted_average(std::span<const ReportRow> rows);

struct EvalReport {
    std::vector<ReportRow> similarity;
    std::vector<AnalogyResult> analogy;
};

void write_text(std::ostream& out, const EvalReport& report);
// Header "dataset,pairs_total,pairs_used,score_x100". Similarity rows are
// followed by a weighted_average row; analogy categories appear as
// "<dataset>/<category>".
void write_csv(std::ostream& out, const EvalReport& report);

}  // namespace wordpost
