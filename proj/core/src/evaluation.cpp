#include "wordpost/evaluation.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <iomanip>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace wordpost {

double cosine(const Eigen::Ref<const Vector>& u, const Eigen::Ref<const Vector>& v) {
    if (u.size() != v.size()) throw std::invalid_argument("cosine: length mismatch");
    const double nu = u.norm(), nv = v.norm();
    if (nu == 0.0 || nv == 0.0) throw std::invalid_argument("cosine: zero vector");
    return std::clamp(u.dot(v) / (nu * nv), -1.0, 1.0);
}

std::vector<double> average_ranks(std::span<const double> values) {
    std::vector<std::size_t> order(values.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](auto i, auto j) { return values[i] < values[j]; });
    std::vector<double> ranks(values.size());
    for (std::size_t i = 0; i < order.size();) {
        std::size_t j = i;
        while (j + 1 < order.size() && values[order[j + 1]] == values[order[i]]) ++j;
        const double rank = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
        for (std::size_t t = i; t <= j; ++t) ranks[order[t]] = rank;
        i = j + 1;
    }
    return ranks;
}

double srcc(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw std::invalid_argument("srcc: length mismatch");
    if (x.size() < 2) throw std::invalid_argument("srcc: need at least 2 observations");
    const auto rx = average_ranks(x);
    const auto ry = average_ranks(y);
    const double n = static_cast<double>(x.size());
    const double mean = (n + 1.0) / 2.0;
    double sxy = 0, sxx = 0, syy = 0;
    for (std::size_t i = 0; i < rx.size(); ++i) {
        const double dx = rx[i] - mean, dy = ry[i] - mean;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (sxx == 0.0 || syy == 0.0) throw std::invalid_argument("srcc: constant input has no rank variance");
    return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

namespace {

std::vector<std::string> split(const std::string& line) {
    std::istringstream in(line);
    std::vector<std::string> out;
    for (std::string tok; in >> tok;) out.push_back(std::move(tok));
    return out;
}

bool is_comment(const std::vector<std::string>& fields) {
    return fields.empty() || fields[0].starts_with('#');
}

std::optional<double> parse_real(const std::string& s) {
    double v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) return std::nullopt;
    return v;
}

std::string format_number(double v) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

}  // namespace

std::size_t AnalogyDataset::size() const {
    std::size_t n = 0;
    for (const auto& c : categories) n += c.questions.size();
    return n;
}

SimilarityDataset load_similarity(std::istream& in, std::string name) {
    SimilarityDataset ds{std::move(name), {}};
    std::string line;
    std::size_t line_no = 0;
    bool seen_data = false;
    while (std::getline(in, line)) {
        ++line_no;
        auto f = split(line);
        if (is_comment(f)) continue;
        if (!seen_data) {
            seen_data = true;
            if (!parse_real(f.back())) continue;  // header, possibly with spaces inside column names
        }
        if (f.size() != 3) throw ParseError("similarity: expected 'word1 word2 score'", line_no);
        auto score = parse_real(f[2]);
        if (!score) throw ParseError("similarity: bad score '" + f[2] + "'", line_no);
        ds.pairs.push_back({f[0], f[1], *score});
    }
    if (ds.pairs.empty()) throw ParseError("similarity dataset '" + ds.name + "' has no pairs");
    return ds;
}

AnalogyDataset load_analogy(std::istream& in, std::string name) {
    AnalogyDataset ds{std::move(name), {}};
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        auto f = split(line);
        if (is_comment(f)) continue;
        if (f[0].starts_with(':')) {
            std::string cat = f[0].size() > 1 ? f[0].substr(1) : (f.size() > 1 ? f[1] : "");
            if (cat.empty()) throw ParseError("analogy: empty category name", line_no);
            ds.categories.push_back({cat, {}});
            continue;
        }
        if (f.size() != 4) throw ParseError("analogy: expected 4 words per question", line_no);
        if (ds.categories.empty()) ds.categories.push_back({ds.name, {}});
        ds.categories.back().questions.push_back({{f[0], f[1], f[2], f[3]}});
    }
    if (ds.size() == 0) throw ParseError("analogy dataset '" + ds.name + "' has no questions");
    return ds;
}

DatasetKind detect_dataset_kind(std::istream& in) {
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        auto f = split(line);
        if (is_comment(f)) continue;
        if (f[0].starts_with(':') || f.size() == 4) return DatasetKind::analogy;
        if (f.size() == 3 && parse_real(f[2])) return DatasetKind::similarity;
        // One leading similarity header line is allowed.
        if (!first || parse_real(f.back())) break;
        first = false;
    }
    throw ParseError("cannot tell whether this is a similarity or an analogy dataset");
}

std::optional<Index> resolve(const Vocabulary& vocab, std::string_view token) {
    if (auto id = vocab.find(token)) return id;
    std::string lower(token);
    std::transform(lower.begin(), lower.end(), lower.begin(),
                   [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
    if (lower == token) return std::nullopt;
    return vocab.find(lower);
}

ReportRow eval_similarity(const Vocabulary& vocab, const EmbeddingMatrix& emb, const SimilarityDataset& ds) {
    ReportRow row{ds.name, "similarity", ds.pairs.size(), 0, 0, 0};
    std::vector<double> model, human;
    for (const auto& p : ds.pairs) {
        auto a = resolve(vocab, p.first);
        auto b = resolve(vocab, p.second);
        if (!a || !b || emb.row(*a).squaredNorm() == 0.0 || emb.row(*b).squaredNorm() == 0.0) {
            ++row.skipped;
            continue;
        }
        model.push_back(cosine(emb.row(*a).transpose(), emb.row(*b).transpose()));
        human.push_back(p.score);
    }
    row.pairs_used = model.size();
    if (model.size() < 2)
        throw std::invalid_argument("similarity dataset '" + ds.name + "': fewer than 2 pairs in vocabulary");
    row.score_x100 = 100.0 * srcc(model, human);
    return row;
}

std::string_view to_string(AnalogyMode mode) { return mode == AnalogyMode::add ? "add" : "mul"; }

AnalogySolver::AnalogySolver(const Vocabulary& vocab, const EmbeddingMatrix& emb) : vocab_(vocab), unit_(emb) {
    if (static_cast<std::size_t>(emb.rows()) != vocab.size())
        throw std::invalid_argument("analogy: vocabulary and matrix are not aligned");
    for (Eigen::Index i = 0; i < unit_.rows(); ++i) {
        const double n = unit_.row(i).norm();
        if (n > 0) unit_.row(i) /= n;
    }
}

Index AnalogySolver::best(const Vector& scores, Index a, Index b, Index c) const {
    Index arg = 0;
    double top = -std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < scores.size(); ++i) {
        const auto id = static_cast<Index>(i);
        if (id == a || id == b || id == c) continue;
        if (scores(i) > top) {
            top = scores(i);
            arg = id;
        }
    }
    if (top == -std::numeric_limits<double>::infinity())
        throw std::invalid_argument("analogy: vocabulary has no candidate besides the query words");
    return arg;
}

Index AnalogySolver::add(Index a, Index b, Index c) const {
    // ‖b − a + c‖ is shared by every candidate, so the dot product orders them.
    const Vector target = (unit_.row(b) - unit_.row(a) + unit_.row(c)).transpose();
    return best(unit_ * target, a, b, c);
}

Index AnalogySolver::mul(Index a, Index b, Index c) const {
    const Vector ca = (1.0 + (unit_ * unit_.row(a).transpose()).array()) / 2.0;
    const Vector cb = (1.0 + (unit_ * unit_.row(b).transpose()).array()) / 2.0;
    const Vector cc = (1.0 + (unit_ * unit_.row(c).transpose()).array()) / 2.0;
    const Vector scores = cb.array() * cc.array() / (ca.array() + kMulEpsilon);
    return best(scores, a, b, c);
}

Index AnalogySolver::predict(AnalogyMode mode, Index a, Index b, Index c) const {
    return mode == AnalogyMode::add ? add(a, b, c) : mul(a, b, c);
}

namespace {

std::string one_shot(AnalogyMode mode, const Vocabulary& vocab, const EmbeddingMatrix& emb, std::string_view a,
                     std::string_view b, std::string_view c) {
    AnalogySolver solver(vocab, emb);
    return vocab.word(solver.predict(mode, vocab.at(a), vocab.at(b), vocab.at(c)));
}

}  // namespace

std::string analogy_add(const Vocabulary& vocab, const EmbeddingMatrix& emb, std::string_view a,
                        std::string_view b, std::string_view c) {
    return one_shot(AnalogyMode::add, vocab, emb, a, b, c);
}

std::string analogy_mul(const Vocabulary& vocab, const EmbeddingMatrix& emb, std::string_view a,
                        std::string_view b, std::string_view c) {
    return one_shot(AnalogyMode::mul, vocab, emb, a, b, c);
}

AnalogyResult eval_analogy(const Vocabulary& vocab, const EmbeddingMatrix& emb, const AnalogyDataset& ds,
                           AnalogyMode mode) {
    AnalogySolver solver(vocab, emb);
    const std::string task = "analogy-" + std::string(to_string(mode));
    AnalogyResult result;
    result.overall = {ds.name, task, 0, 0, 0, 0};
    std::size_t correct_total = 0;
    for (const auto& cat : ds.categories) {
        ReportRow row{ds.name + "/" + cat.name, task, cat.questions.size(), 0, 0, 0};
        std::size_t correct = 0;
        for (const auto& q : cat.questions) {
            std::array<Index, 4> ids{};
            bool known = true;
            for (std::size_t i = 0; i < 4 && known; ++i) {
                auto id = resolve(vocab, q.words[i]);
                known = id.has_value();
                if (known) ids[i] = *id;
            }
            if (!known) {
                ++row.skipped;
                continue;
            }
            ++row.pairs_used;
            if (solver.predict(mode, ids[0], ids[1], ids[2]) == ids[3]) ++correct;
        }
        row.score_x100 = row.pairs_used ? 100.0 * static_cast<double>(correct) / static_cast<double>(row.pairs_used) : 0.0;
        result.overall.pairs_total += row.pairs_total;
        result.overall.pairs_used += row.pairs_used;
        result.overall.skipped += row.skipped;
        correct_total += correct;
        result.categories.push_back(std::move(row));
    }
    if (result.overall.pairs_used == 0)
        throw std::invalid_argument("analogy dataset '" + ds.name + "': no question has all words in vocabulary");
    result.overall.score_x100 =
        100.0 * static_cast<double>(correct_total) / static_cast<double>(result.overall.pairs_used);
    return result;
}

double weighted_average(std::span<const ReportRow> rows) {
    if (rows.empty()) throw std::invalid_argument("weighted_average: no rows");
    double num = 0, den = 0;
    for (const auto& r : rows) {
        num += r.score_x100 * static_cast<double>(r.pairs_total);
        den += static_cast<double>(r.pairs_total);
    }
    if (den == 0) throw std::invalid_argument("weighted_average: total pair count is zero");
    return num / den;
}

void write_text(std::ostream& out, const EvalReport& report) {
    std::size_t width = std::string("weighted_average").size();
    for (const auto& r : report.similarity) width = std::max(width, r.dataset.size());
    for (const auto& a : report.analogy) {
        width = std::max(width, a.overall.dataset.size());
        for (const auto& r : a.categories) width = std::max(width, r.dataset.size() + 2);
    }
    const auto flags = out.flags();
    auto line = [&](const std::string& name, const std::string& task, std::size_t total, std::size_t used,
                    std::size_t skipped, double score) {
        out << std::left << std::setw(static_cast<int>(width)) << name << "  " << std::setw(11) << task << std::right
            << std::setw(8) << total << std::setw(8) << used << std::setw(8) << skipped << std::setw(9)
            << std::fixed << std::setprecision(2) << score << '\n';
    };
    out << std::left << std::setw(static_cast<int>(width)) << "dataset" << "  " << std::setw(11) << "task"
        << std::right << std::setw(8) << "pairs" << std::setw(8) << "used" << std::setw(8) << "skipped"
        << std::setw(9) << "score" << '\n';
    for (const auto& r : report.similarity) line(r.dataset, r.task, r.pairs_total, r.pairs_used, r.skipped, r.score_x100);
    if (!report.similarity.empty()) {
        std::size_t total = 0, used = 0, skipped = 0;
        for (const auto& r : report.similarity) total += r.pairs_total, used += r.pairs_used, skipped += r.skipped;
        line("weighted_average", "similarity", total, used, skipped, weighted_average(report.similarity));
    }
    for (const auto& a : report.analogy) {
        const auto& r = a.overall;
        line(r.dataset, r.task, r.pairs_total, r.pairs_used, r.skipped, r.score_x100);
        for (const auto& c : a.categories)
            line("  " + c.dataset, c.task, c.pairs_total, c.pairs_used, c.skipped, c.score_x100);
    }
    out.flags(flags);
}

void write_csv(std::ostream& out, const EvalReport& report) {
    auto row = [&](const std::string& name, std::size_t total, std::size_t used, double score) {
        out << name << ',' << total << ',' << used << ',' << format_number(score) << '\n';
    };
    out << "dataset,pairs_total,pairs_used,score_x100\n";
    for (const auto& r : report.similarity) row(r.dataset, r.pairs_total, r.pairs_used, r.score_x100);
    if (!report.similarity.empty()) {
        std::size_t total = 0, used = 0;
        for (const auto& r : report.similarity) total += r.pairs_total, used += r.pairs_used;
        row("weighted_average", total, used, weighted_average(report.similarity));
    }
    for (const auto& a : report.analogy) {
        row(a.overall.dataset, a.overall.pairs_total, a.overall.pairs_used, a.overall.score_x100);
        for (const auto& c : a.categories) row(c.dataset, c.pairs_total, c.pairs_used, c.score_x100);
    }
}

}  // namespace wordpost
