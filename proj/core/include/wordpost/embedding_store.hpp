#pragma once

#include <Eigen/Core>

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "wordpost/error.hpp"

namespace wordpost {

using Index = std::uint32_t;

// Row i is the vector of word i. Row-major so a word vector is contiguous.
using EmbeddingMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;

// Ordered token list with O(1) token -> row lookup and optional corpus counts.
class Vocabulary {
public:
    Vocabulary() = default;
    explicit Vocabulary(std::vector<std::string> words);

    // Appends a token; throws std::invalid_argument naming the token on duplicates.
    Index add(std::string token, std::uint64_t count = 0);

    std::optional<Index> find(std::string_view token) const;
    Index at(std::string_view token) const;  // throws OutOfVocabulary
    bool contains(std::string_view token) const { return find(token).has_value(); }

    const std::string& word(Index i) const { return words_.at(i); }
    const std::vector<std::string>& words() const noexcept { return words_; }
    std::size_t size() const noexcept { return words_.size(); }
    bool empty() const noexcept { return words_.empty(); }

    std::uint64_t count(Index i) const { return counts_.at(i); }
    const std::vector<std::uint64_t>& counts() const noexcept { return counts_; }
    void set_count(Index i, std::uint64_t count) { counts_.at(i) = count; }
    bool has_counts() const noexcept;

    bool operator==(const Vocabulary& other) const {
        return words_ == other.words_ && counts_ == other.counts_;
    }

private:
    struct Hash {
        using is_transparent = void;
        std::size_t operator()(std::string_view s) const noexcept {
            return std::hash<std::string_view>{}(s);
        }
    };
    std::vector<std::string> words_;
    std::vector<std::uint64_t> counts_;
    std::unordered_map<std::string, Index, Hash, std::equal_to<>> index_;
};

// A vocabulary together with its aligned vectors.
struct Embeddings {
    Vocabulary vocab;
    EmbeddingMatrix vectors;

    std::size_t dim() const noexcept { return static_cast<std::size_t>(vectors.cols()); }
    std::size_t size() const noexcept { return vocab.size(); }
};

enum class TextFormat {
    plain,   // "token f1 ... fD" per line
    header,  // first line "|V| D", then plain rows
    detect,  // header if the first line is exactly two non-negative integers
};

// Parses whitespace-separated text vectors. Throws ParseError carrying the
// offending line for ragged rows, non-numeric or non-finite values, and
// duplicate tokens.
Embeddings load_embeddings(std::istream& in, TextFormat format = TextFormat::detect);
Embeddings load_embeddings_file(const std::string& path, TextFormat format = TextFormat::detect);

// Values are written with 9 significant digits.
void save_embeddings(std::ostream& out, const Vocabulary& vocab, const EmbeddingMatrix& vectors,
                     TextFormat format = TextFormat::header);
void save_embeddings_file(const std::string& path, const Vocabulary& vocab,
                          const EmbeddingMatrix& vectors, TextFormat format = TextFormat::header);

// Row of `token`; throws OutOfVocabulary if absent.
EmbeddingMatrix::ConstRowXpr lookup(const Vocabulary& vocab, const EmbeddingMatrix& vectors,
                                    std::string_view token);

// "token count" per line. Tokens missing from the vocabulary are ignored.
// Returns how many lines matched a vocabulary entry.
std::size_t load_counts(std::istream& in, Vocabulary& vocab);

// Checks the alignment and finiteness invariants; throws std::invalid_argument.
void validate(const Vocabulary& vocab, const EmbeddingMatrix& vectors);

}  // namespace wordpost
