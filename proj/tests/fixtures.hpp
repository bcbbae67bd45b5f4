#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "oracles.hpp"
#include "wordpost/dynamic.hpp"
#include "wordpost/embedding_store.hpp"

namespace fixture {

using wordpost::EmbeddingMatrix;
using wordpost::Index;

inline EmbeddingMatrix gaussian(std::size_t rows, std::size_t cols, std::uint64_t seed, double scale = 1.0) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g(0.0, scale);
    EmbeddingMatrix m(rows, cols);
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j) m(i, j) = g(rng);
    return m;
}

inline Eigen::MatrixXd random_orthogonal(std::size_t n, std::uint64_t seed) {
    EmbeddingMatrix g = gaussian(n, n, seed);
    const Eigen::HouseholderQR<Eigen::MatrixXd> qr{Eigen::MatrixXd(gaussian(n, n, seed))};
    return qr.householderQ() * Eigen::MatrixXd::Identity(n, n);
}

// Rows drawn with per-axis stddev profile[j], rotated by a random orthogonal
// matrix and shifted by a common offset.
inline EmbeddingMatrix anisotropic(std::size_t rows, const std::vector<double>& profile, std::uint64_t seed,
                                   double offset = 0.0) {
    const std::size_t d = profile.size();
    EmbeddingMatrix z = gaussian(rows, d, seed);
    for (std::size_t j = 0; j < d; ++j) z.col(j) *= profile[j];
    EmbeddingMatrix out = z * random_orthogonal(d, seed + 1).transpose();
    out.array() += offset;
    return out;
}

// Geometric profile 10·0.85^j: strictly decreasing with comfortable gaps.
inline std::vector<double> decaying_profile(std::size_t d) {
    std::vector<double> p(d);
    for (std::size_t j = 0; j < d; ++j) p[j] = 10.0 * std::pow(0.85, static_cast<double>(j));
    return p;
}

inline wordpost::Vocabulary numbered_vocab(std::size_t n, const std::string& prefix = "w") {
    wordpost::Vocabulary v;
    for (std::size_t i = 0; i < n; ++i) v.add(prefix + std::to_string(i));
    return v;
}

// Twenty unit vectors in 11 dimensions: a_i = (−h, r e_i), b_i = (h, r e_i)
// with h² + r² = 1, so b_i − a_i is the same offset for every pair and the
// pairs are mutually orthogonal apart from the shared axis.
struct Parallelogram {
    wordpost::Vocabulary vocab;
    EmbeddingMatrix vectors;
    std::string questions;  // analogy file text
};

inline Parallelogram parallelogram(double h = 0.5) {
    constexpr std::size_t pairs = 10;
    Parallelogram p;
    p.vectors = EmbeddingMatrix::Zero(2 * pairs, pairs + 1);
    const double r = std::sqrt(1 - h * h);
    for (std::size_t i = 0; i < pairs; ++i) {
        p.vocab.add("a" + std::to_string(i));
        p.vocab.add("b" + std::to_string(i));
        p.vectors(2 * i, 0) = -h;
        p.vectors(2 * i, i + 1) = r;
        p.vectors(2 * i + 1, 0) = h;
        p.vectors(2 * i + 1, i + 1) = r;
    }
    std::ostringstream q;
    q << ": offset\n";
    for (std::size_t i = 0; i < pairs; ++i)
        for (std::size_t j = 0; j < pairs; ++j)
            if (i != j) q << 'a' << i << " b" << i << " a" << j << " b" << j << '\n';
    p.questions = q.str();
    return p;
}

// Random PDE instance for gradient and score checks, sized D x k with
// window 2c, N negatives, `samples` samples over `words` words.
struct PdeInstance {
    wordpost::DynamicSubspace subspace;
    EmbeddingMatrix emb;
    wordpost::SampleBuffer buffer{1};
    std::vector<Index> negatives;
    std::size_t N = 0;

    std::vector<wordpost::ContextSample> batch() const {
        std::vector<wordpost::ContextSample> out;
        for (std::size_t i = 0; i < buffer.size(); ++i) out.push_back(buffer[i]);
        return out;
    }

    oracle::Instance to_oracle() const {
        oracle::Instance in;
        in.A = oracle::to_dense(subspace.A);
        in.b.assign(subspace.b.data(), subspace.b.data() + subspace.b.size());
        in.emb = oracle::to_dense(emb);
        for (std::size_t i = 0; i < buffer.size(); ++i) {
            in.centers.push_back(buffer[i].center);
            in.contexts.emplace_back(buffer[i].context.begin(), buffer[i].context.end());
        }
        in.negatives = negatives;
        in.N = N;
        return in;
    }
};

inline PdeInstance pde_instance(std::size_t D, std::size_t k, std::size_t c, std::size_t N, std::size_t samples,
                                std::size_t words, std::uint64_t seed, double scale = 0.6) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g(0.0, 1.0);
    std::uniform_int_distribution<Index> pick(0, static_cast<Index>(words - 1));
    PdeInstance p;
    p.emb = gaussian(words, D, seed ^ 0x9e3779b97f4a7c15ULL, scale);
    p.subspace.A = Eigen::MatrixXd(D, k);
    for (Eigen::Index i = 0; i < p.subspace.A.size(); ++i) p.subspace.A.data()[i] = g(rng) / std::sqrt(double(D));
    p.subspace.b = Eigen::VectorXd(2 * c);
    for (Eigen::Index i = 0; i < p.subspace.b.size(); ++i) p.subspace.b(i) = g(rng);
    p.buffer = wordpost::SampleBuffer(c);
    std::vector<Index> ctx(2 * c);
    for (std::size_t s = 0; s < samples; ++s) {
        for (auto& w : ctx) w = pick(rng);
        p.buffer.push(pick(rng), ctx);
        for (std::size_t n = 0; n < N; ++n) p.negatives.push_back(pick(rng));
    }
    p.N = N;
    return p;
}

// Unique scratch directory removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        static int counter = 0;
        path_ = std::filesystem::temp_directory_path() /
                ("wordpost_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
        std::filesystem::remove_all(path_);
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;
    std::string file(const std::string& name) const { return (path_ / name).string(); }

private:
    std::filesystem::path path_;
};

inline void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    out << text;
}

inline std::string read_text(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

}  // namespace fixture
