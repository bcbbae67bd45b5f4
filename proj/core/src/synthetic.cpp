#include "wordpost/synthetic.hpp"

#include <Eigen/QR>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace wordpost {

namespace {

Eigen::MatrixXd orthonormal_columns(const Eigen::MatrixXd& m) {
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(m);
    return qr.householderQ() * Eigen::MatrixXd::Identity(m.rows(), m.cols());
}

}  // namespace

PlantedCorpus make_planted_corpus(const PlantedSpec& spec) {
    if (spec.k < 1 || spec.k >= spec.dim) throw std::invalid_argument("planted corpus: need 1 <= k < D");
    if (spec.vocab_size % 2 != 0 || spec.vocab_size <= 2 * spec.dim)
        throw std::invalid_argument("planted corpus: |V| must be even and exceed 2D");
    if (spec.c < 1 || spec.vocab_size < 2 * spec.c + 2) throw std::invalid_argument("planted corpus: bad c or vocab");

    const auto d = static_cast<Eigen::Index>(spec.dim);
    const auto k = static_cast<Eigen::Index>(spec.k);
    const auto n = static_cast<Eigen::Index>(spec.vocab_size);
    std::mt19937_64 rng(spec.seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    auto random_matrix = [&](Eigen::Index r, Eigen::Index c) {
        Eigen::MatrixXd m(r, c);
        for (Eigen::Index j = 0; j < c; ++j)
            for (Eigen::Index i = 0; i < r; ++i) m(i, j) = gauss(rng);
        return m;
    };

    // Full orthonormal frame: first k columns planted, rest background.
    const Eigen::MatrixXd frame = orthonormal_columns(random_matrix(d, d));
    // Words come in twins sharing planted coordinates with opposite
    // background, so no function of the planted part correlates with the
    // background. Base coordinates are whitened (zero mean, uncorrelated).
    const Eigen::Index base = n / 2;
    Eigen::MatrixXd coords = random_matrix(base, d);
    coords.rowwise() -= coords.colwise().mean();
    coords = orthonormal_columns(coords) * std::sqrt(static_cast<double>(base));
    const Eigen::MatrixXd base_planted = spec.planted_scale * coords.leftCols(k);
    const Eigen::MatrixXd base_background = spec.background_scale * coords.rightCols(d - k);
    Eigen::MatrixXd planted(n, k), background(n, d - k);
    for (Eigen::Index i = 0; i < base; ++i) {
        planted.row(2 * i) = planted.row(2 * i + 1) = base_planted.row(i);
        background.row(2 * i) = base_background.row(i);
        background.row(2 * i + 1) = -base_background.row(i);
    }

    PlantedCorpus out;
    out.basis = frame.leftCols(k);
    out.embeddings.vectors = planted * out.basis.transpose() + background * frame.rightCols(d - k).transpose();
    for (Eigen::Index i = 0; i < n; ++i) out.embeddings.vocab.add("w" + std::to_string(i));

    const std::size_t window = 2 * spec.c;
    out.weights.resize(static_cast<Eigen::Index>(window));
    // A fixed, asymmetric profile: nearer positions weigh more.
    for (std::size_t j = 0; j < window; ++j) {
        const double distance = j < spec.c ? static_cast<double>(spec.c - j) : static_cast<double>(j - spec.c + 1);
        out.weights(static_cast<Eigen::Index>(j)) = (j < spec.c ? 1.0 : 0.7) / distance;
    }
    out.weights.normalize();

    std::uniform_int_distribution<Eigen::Index> pick(0, n - 1);
    std::uniform_int_distribution<Eigen::Index> coin(0, 1);
    std::vector<Eigen::Index> ctx(window);
    std::ostringstream text;
    for (std::size_t line = 0; line < spec.lines; ++line) {
        Eigen::VectorXd target = Eigen::VectorXd::Zero(k);
        for (std::size_t j = 0; j < window; ++j) {
            ctx[j] = pick(rng);
            target += out.weights(static_cast<Eigen::Index>(j)) * planted.row(ctx[j]).transpose();
        }
        for (Eigen::Index i = 0; i < k; ++i) target(i) += spec.noise * spec.planted_scale * gauss(rng);

        Eigen::Index nearest = 0;
        (base_planted.rowwise() - target.transpose()).rowwise().squaredNorm().minCoeff(&nearest);
        const Eigen::Index center = 2 * nearest + coin(rng);

        for (std::size_t j = 0; j < spec.c; ++j) text << 'w' << ctx[j] << ' ';
        text << 'w' << center;
        for (std::size_t j = spec.c; j < window; ++j) text << " w" << ctx[j];
        text << '\n';
    }
    out.text = text.str();
    return out;
}

std::string shuffle_tokens(const std::string& text, std::uint64_t seed) {
    std::vector<std::string> tokens;
    std::vector<std::size_t> lengths;
    std::istringstream lines(text);
    std::string line;
    while (std::getline(lines, line)) {
        std::istringstream words(line);
        std::size_t count = 0;
        for (std::string w; words >> w; ++count) tokens.push_back(std::move(w));
        lengths.push_back(count);
    }
    std::mt19937_64 rng(seed);
    std::shuffle(tokens.begin(), tokens.end(), rng);
    std::ostringstream out;
    std::size_t next = 0;
    for (auto len : lengths) {
        for (std::size_t i = 0; i < len; ++i) out << (i ? " " : "") << tokens[next++];
        out << '\n';
    }
    return out.str();
}

PdeConfig planted_training_config(std::uint64_t seed) {
    PdeConfig cfg;
    cfg.k = 2;
    cfg.c = 2;
    cfg.negatives = 3;
    cfg.learning_rate = 0.1;
    cfg.batch_size = 64;
    cfg.epochs = 10;
    cfg.seed = seed;
    return cfg;
}

PlantedRecovery planted_recovery(const PlantedSpec& spec, const PdeConfig& cfg) {
    if (cfg.k != spec.k || cfg.c != spec.c) throw std::invalid_argument("planted recovery: config k/c differ from corpus");
    const PlantedCorpus corpus = make_planted_corpus(spec);
    auto train_on = [&](const std::string& text) {
        Embeddings emb = corpus.embeddings;
        const Index unk = ensure_unk_row(emb);
        std::istringstream in(text);
        Corpus ingested = ingest_corpus(in, emb.vocab, spec.c, unk);
        return train_pde(ingested.samples, ingested.counts, emb.vectors, cfg);
    };
    PlantedRecovery r{train_on(corpus.text), train_on(shuffle_tokens(corpus.text, spec.seed + 1)), {}, 0, 0};
    r.angles_deg = principal_angles_deg(r.planted.subspace.A, corpus.basis);
    r.planted_objective = r.planted.log.back().mean_objective;
    r.shuffled_objective = r.shuffled.log.back().mean_objective;
    return r;
}

Vector principal_angles_deg(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
    if (a.rows() != b.rows()) throw std::invalid_argument("principal angles: ambient dimensions differ");
    const Eigen::MatrixXd qa = orthonormal_columns(a);
    const Eigen::MatrixXd qb = orthonormal_columns(b);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(qa.transpose() * qb);
    Vector cosines = svd.singularValues();  // descending
    Vector angles(cosines.size());
    for (Eigen::Index i = 0; i < cosines.size(); ++i)
        angles(i) = std::acos(std::clamp(cosines(i), -1.0, 1.0)) * 180.0 / std::numbers::pi;
    return angles;
}

}  // namespace wordpost
