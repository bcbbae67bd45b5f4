#pragma once

#include <Eigen/Core>

#include <cstddef>
#include <cstdint>
#include <string>

#include "wordpost/dynamic.hpp"
#include "wordpost/embedding_store.hpp"

namespace wordpost {

// Toy corpus with a known dynamic subspace. Every word vector is
// v(w) = P z(w) + background, with P a random D x k orthonormal basis and the
// coordinates whitened over the vocabulary (zero mean, uncorrelated). Each
// line is one window of 2c+1 tokens whose center is the word whose planted
// coordinates z lie closest to Σ_j b_j z(context_j) + noise.
struct PlantedSpec {
    std::size_t vocab_size = 200;
    std::size_t dim = 20;
    std::size_t k = 2;
    std::size_t c = 2;
    std::size_t lines = 20000;
    // Scores must stay in the near-linear range of log σ; with larger scales
    // the negative terms dominate and the optimum leaves the planted plane.
    double planted_scale = 0.5;     // stddev of z per planted coordinate
    double background_scale = 0.5;  // stddev of the orthogonal complement per coordinate
    double noise = 0.05;            // relative to planted_scale
    std::uint64_t seed = 7;
};

struct PlantedCorpus {
    Embeddings embeddings;   // words "w0", "w1", ...; counts left at zero
    Eigen::MatrixXd basis;   // P, D x k
    Vector weights;          // b, unit norm, length 2c
    std::string text;        // one window per line
};

PlantedCorpus make_planted_corpus(const PlantedSpec& spec);

// Same tokens and line lengths with word order shuffled across the whole text.
std::string shuffle_tokens(const std::string& text, std::uint64_t seed);

// Training settings that recover the default planted corpus in well under a
// second: k=2, c=2, N=3, lr 0.1, batch 64, 10 epochs.
PdeConfig planted_training_config(std::uint64_t seed = 1);

struct PlantedRecovery {
    TrainResult planted;
    TrainResult shuffled;
    Vector angles_deg;          // between learned A and the planted basis
    double planted_objective;   // last-epoch mean objective per sample
    double shuffled_objective;  // same, trained on the token-shuffled corpus
};

// Trains on the planted corpus and on its token-shuffled copy with the same config.
PlantedRecovery planted_recovery(const PlantedSpec& spec, const PdeConfig& cfg);

// Principal angles in degrees between the column spans of a and b, ascending.
Vector principal_angles_deg(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b);

}  // namespace wordpost
