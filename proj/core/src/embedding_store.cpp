#include "wordpost/embedding_store.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <stdexcept>

namespace wordpost {

namespace {

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\v' || c == '\f'; }

// Splits on runs of blanks; views point into `line`.
void split_fields(std::string_view line, std::vector<std::string_view>& fields) {
    fields.clear();
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && is_space(line[i])) ++i;
        std::size_t start = i;
        while (i < line.size() && !is_space(line[i])) ++i;
        if (i > start) fields.push_back(line.substr(start, i - start));
    }
}

double parse_value(std::string_view field, std::size_t line_no) {
    double value = 0.0;
    const char* first = field.data();
    const char* last = field.data() + field.size();
    if (first != last && *first == '+') ++first;
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last)
        throw ParseError("not a number: '" + std::string(field) + "'", line_no);
    if (!std::isfinite(value))
        throw ParseError("non-finite value: '" + std::string(field) + "'", line_no);
    return value;
}

std::optional<std::size_t> parse_count(std::string_view field) {
    std::size_t value = 0;
    auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
    if (ec != std::errc() || ptr != field.data() + field.size()) return std::nullopt;
    return value;
}

}  // namespace

Vocabulary::Vocabulary(std::vector<std::string> words) {
    for (auto& w : words) add(std::move(w));
}

Index Vocabulary::add(std::string token, std::uint64_t count) {
    if (index_.contains(token)) throw std::invalid_argument("duplicate token: " + token);
    auto id = static_cast<Index>(words_.size());
    index_.emplace(token, id);
    words_.push_back(std::move(token));
    counts_.push_back(count);
    return id;
}

std::optional<Index> Vocabulary::find(std::string_view token) const {
    auto it = index_.find(token);
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

Index Vocabulary::at(std::string_view token) const {
    auto id = find(token);
    if (!id) throw OutOfVocabulary(std::string(token));
    return *id;
}

bool Vocabulary::has_counts() const noexcept {
    return std::any_of(counts_.begin(), counts_.end(), [](auto c) { return c > 0; });
}

Embeddings load_embeddings(std::istream& in, TextFormat format) {
    Embeddings out;
    std::vector<std::string_view> fields;
    std::vector<double> values;
    std::string line;
    std::size_t line_no = 0;
    std::size_t dim = 0;
    std::optional<std::size_t> expected_rows;

    while (std::getline(in, line)) {
        ++line_no;
        split_fields(line, fields);
        if (fields.empty()) continue;

        if (line_no == 1 && format != TextFormat::plain) {
            auto rows = fields.size() == 2 ? parse_count(fields[0]) : std::nullopt;
            auto cols = fields.size() == 2 ? parse_count(fields[1]) : std::nullopt;
            if (rows && cols) {
                if (*cols == 0) throw ParseError("header declares zero dimension", line_no);
                expected_rows = *rows;
                dim = *cols;
                values.reserve(*rows * *cols);
                continue;
            }
            if (format == TextFormat::header)
                throw ParseError("expected header '<rows> <dim>'", line_no);
        }

        if (fields.size() < 2) throw ParseError("row has no values", line_no);
        if (dim == 0) dim = fields.size() - 1;
        if (fields.size() - 1 != dim)
            throw ParseError("expected " + std::to_string(dim) + " values, found " +
                                 std::to_string(fields.size() - 1),
                             line_no);
        try {
            out.vocab.add(std::string(fields[0]));
        } catch (const std::invalid_argument&) {
            throw ParseError("duplicate token '" + std::string(fields[0]) + "'", line_no);
        }
        for (std::size_t j = 1; j < fields.size(); ++j) values.push_back(parse_value(fields[j], line_no));
    }
    if (in.bad()) throw std::runtime_error("read error after line " + std::to_string(line_no));
    if (expected_rows && *expected_rows != out.vocab.size())
        throw ParseError("header declares " + std::to_string(*expected_rows) + " rows, found " +
                         std::to_string(out.vocab.size()));

    out.vectors = Eigen::Map<EmbeddingMatrix>(values.data(), static_cast<Eigen::Index>(out.vocab.size()),
                                              static_cast<Eigen::Index>(dim));
    return out;
}

Embeddings load_embeddings_file(const std::string& path, TextFormat format) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open embedding file: " + path);
    return load_embeddings(in, format);
}

void save_embeddings(std::ostream& out, const Vocabulary& vocab, const EmbeddingMatrix& vectors,
                     TextFormat format) {
    if (static_cast<std::size_t>(vectors.rows()) != vocab.size())
        throw std::invalid_argument("vocabulary has " + std::to_string(vocab.size()) +
                                    " words but matrix has " + std::to_string(vectors.rows()) + " rows");
    if (format != TextFormat::plain) out << vectors.rows() << ' ' << vectors.cols() << '\n';

    std::string buf;
    char num[32];
    for (Eigen::Index i = 0; i < vectors.rows(); ++i) {
        buf = vocab.word(static_cast<Index>(i));
        for (Eigen::Index j = 0; j < vectors.cols(); ++j) {
            auto [ptr, ec] = std::to_chars(num, num + sizeof num, vectors(i, j), std::chars_format::general, 9);
            buf.push_back(' ');
            buf.append(num, ptr);
        }
        buf.push_back('\n');
        out << buf;
    }
    if (!out) throw std::runtime_error("write failed");
}

void save_embeddings_file(const std::string& path, const Vocabulary& vocab, const EmbeddingMatrix& vectors,
                          TextFormat format) {
    std::ofstream out(path);
    if (!out) throw std::invalid_argument("cannot open output file: " + path);
    save_embeddings(out, vocab, vectors, format);
}

EmbeddingMatrix::ConstRowXpr lookup(const Vocabulary& vocab, const EmbeddingMatrix& vectors,
                                    std::string_view token) {
    return vectors.row(vocab.at(token));
}

std::size_t load_counts(std::istream& in, Vocabulary& vocab) {
    std::vector<std::string_view> fields;
    std::string line;
    std::size_t line_no = 0, matched = 0;
    while (std::getline(in, line)) {
        ++line_no;
        split_fields(line, fields);
        if (fields.empty()) continue;
        if (fields.size() != 2) throw ParseError("expected '<token> <count>'", line_no);
        auto count = parse_count(fields[1]);
        if (!count) throw ParseError("bad count '" + std::string(fields[1]) + "'", line_no);
        if (auto id = vocab.find(fields[0])) {
            vocab.set_count(*id, *count);
            ++matched;
        }
    }
    return matched;
}

void validate(const Vocabulary& vocab, const EmbeddingMatrix& vectors) {
    if (static_cast<std::size_t>(vectors.rows()) != vocab.size())
        throw std::invalid_argument("vocabulary/matrix size mismatch");
    if (!vectors.allFinite()) throw std::invalid_argument("embedding contains non-finite values");
}

}  // namespace wordpost
