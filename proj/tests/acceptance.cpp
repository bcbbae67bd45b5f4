// Acceptance suite: one PASS/FAIL/SKIP line per criterion.
//
//   wordpost_acceptance                 run 1..10
//   wordpost_acceptance --criteria 4,6  run a subset
//
// Exit status: 0 all selected criteria passed, 1 any failed, 77 nothing ran
// because every selected criterion was skipped.

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "wordpost/dynamic.hpp"
#include "wordpost/evaluation.hpp"
#include "wordpost/postprocess.hpp"
#include "wordpost/spectral.hpp"
#include "wordpost/synthetic.hpp"

#ifdef WORDPOST_HAVE_CLI
#include "cli.hpp"
#endif

using namespace wordpost;

namespace {

enum class Status { pass, fail, skip };

struct Outcome {
    Status status;
    std::string detail;
};

Outcome verdict(bool ok, std::string detail) { return {ok ? Status::pass : Status::fail, std::move(detail)}; }

std::string fmt(double v, int digits = 3) {
    std::ostringstream s;
    s << std::setprecision(digits) << v;
    return s.str();
}

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(a), std::abs(b)); }

// 1. Equal leading spreads after PVN on D=50, |V|=5000.
Outcome criterion_1() {
    const auto t0 = Clock::now();
    const auto data = fixture::anisotropic(5000, fixture::decaying_profile(50), 20240501, 1.0);
    const auto before = fit_basis(data, 50);
    double pairwise = 0, to_target = 0;
    for (std::size_t d : {1u, 3u, 11u}) {
        const auto after = fit_basis(pvn(data, PvnConfig{d}), d + 1);
        for (std::size_t i = 0; i <= d; ++i) {
            to_target = std::max(to_target, rel(after.stddevs(i), before.stddevs(d)));
            for (std::size_t j = 0; j < i; ++j) pairwise = std::max(pairwise, rel(after.stddevs(i), after.stddevs(j)));
        }
    }
    const double t = seconds_since(t0);
    return verdict(pairwise <= 1e-6 && to_target <= 1e-6 && t < 10.0,
                   "d in {1,3,11}: max pairwise rel diff " + fmt(pairwise) + ", max |s'_j - s_{d+1}|/s_{d+1} " +
                       fmt(to_target) + " (tol 1e-6); " + fmt(t) + " s (limit 10 s)");
}

// 2. PPA equals the PVN row update with every shrink factor set to 1.
Outcome criterion_2() {
    double worst = 0;
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const auto data = fixture::anisotropic(400, fixture::decaying_profile(12), 700 + seed, 3.0);
        const Centered c = remove_mean(data);
        const SpectralBasis basis = fit_pca(c.rows, 6);
        for (std::size_t d = 1; d <= 5; ++d) {
            const EmbeddingMatrix library = ppa_with_basis(c.rows, basis, d);
            const EmbeddingMatrix unit = shrink_components(c.rows, basis, Vector::Ones(static_cast<Eigen::Index>(d)));
            for (Eigen::Index r = 0; r < c.rows.rows(); ++r) {
                // ṽ − Σ_{i≤d} 1·(u_iᵀṽ) u_i, written out with loops
                std::vector<double> row(c.rows.cols());
                for (Eigen::Index j = 0; j < c.rows.cols(); ++j) row[j] = c.rows(r, j);
                for (std::size_t i = 0; i < d; ++i) {
                    double dot = 0;
                    for (Eigen::Index j = 0; j < c.rows.cols(); ++j) dot += basis.components(j, i) * c.rows(r, j);
                    for (Eigen::Index j = 0; j < c.rows.cols(); ++j) row[j] -= dot * basis.components(j, i);
                }
                for (Eigen::Index j = 0; j < c.rows.cols(); ++j) {
                    worst = std::max(worst, std::abs(library(r, j) - row[j]));
                    worst = std::max(worst, std::abs(library(r, j) - unit(r, j)));
                }
            }
        }
    }
    return verdict(worst <= 1e-10, "max elementwise diff " + fmt(worst) + " (tol 1e-10), 5 datasets x d=1..5");
}

// 3. fit_pca against Jacobi on a loop-computed covariance.
Outcome criterion_3() {
    std::mt19937_64 rng(3);
    double worst_value = 0, worst_vector = 0;
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t D = 2 + rng() % 9;                 // 2..10
        const std::size_t n = D + 2 + rng() % (49 - D);      // D+2..50, full rank after centering
        EmbeddingMatrix x = fixture::gaussian(n, D, 1000 + trial);
        for (std::size_t j = 0; j < D; ++j) x.col(j) *= std::pow(1.6, static_cast<double>(D - j));
        x.array() += 0.5;
        const auto eig = oracle::jacobi_eigen(oracle::covariance(oracle::to_dense(x)));
        const SpectralBasis basis = fit_basis(x, D);
        for (std::size_t i = 0; i < D; ++i) {
            const double lib = basis.stddevs(i) * basis.stddevs(i);
            worst_value = std::max(worst_value, rel(lib, eig.values[i]));
            double plus = 0, minus = 0;
            for (std::size_t r = 0; r < D; ++r) {
                plus = std::max(plus, std::abs(basis.components(r, i) - eig.vectors[i][r]));
                minus = std::max(minus, std::abs(basis.components(r, i) + eig.vectors[i][r]));
            }
            worst_vector = std::max(worst_vector, std::min(plus, minus));
        }
    }
    return verdict(worst_value <= 1e-6 && worst_vector <= 1e-6,
                   "100 matrices up to 50x10: max eigenvalue rel err " + fmt(worst_value) +
                       ", max component err up to sign " + fmt(worst_vector) + " (tol 1e-6)");
}

// 4. Analytic gradient against central differences of the loop objective.
Outcome criterion_4() {
    const auto t0 = Clock::now();
    std::mt19937_64 rng(4);
    double worst = 0;
    const int instances = 200;
    for (int trial = 0; trial < instances; ++trial) {
        const std::size_t D = 2 + rng() % 7;  // 2..8
        const std::size_t k = 1 + rng() % std::min<std::size_t>(3, D);
        const std::size_t c = 1 + rng() % 2, N = 1 + rng() % 3;
        const auto p = fixture::pde_instance(D, k, c, N, 1 + rng() % 4, 12, 5000 + trial);
        const auto batch = p.batch();
        const ObjectiveGradient g = objective_gradient(p.subspace, batch, p.negatives, p.emb);
        const oracle::Gradient fd = oracle::finite_difference(p.to_oracle(), 1e-5);
        double scale = 1e-8;
        for (Eigen::Index i = 0; i < g.dA.size(); ++i) scale = std::max(scale, std::abs(g.dA.data()[i]));
        for (Eigen::Index i = 0; i < g.db.size(); ++i) scale = std::max(scale, std::abs(g.db(i)));
        // Relative error per entry, floored at 1e-3 of the largest gradient entry
        // so entries that are zero up to round-off do not divide by ~0.
        auto visit = [&](double a, double n) {
            worst = std::max(worst, std::abs(a - n) / std::max({std::abs(a), std::abs(n), 1e-3 * scale}));
        };
        for (std::size_t r = 0; r < D; ++r)
            for (std::size_t col = 0; col < k; ++col)
                visit(g.dA(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(col)), fd.dA[r][col]);
        for (std::size_t j = 0; j < 2 * c; ++j) visit(g.db(static_cast<Eigen::Index>(j)), fd.db[j]);
    }
    const double t = seconds_since(t0);
    return verdict(worst <= 1e-4 && t < 30.0, std::to_string(instances) + " instances (D<=8,k<=3,c<=2,N<=3), h=1e-5: " +
                                                  "max rel err " + fmt(worst) + " (tol 1e-4); " + fmt(t) +
                                                  " s (limit 30 s)");
}

// 5. Orthogonalization iterations and the scalar singular-value map.
Outcome criterion_5() {
    double worst = 0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        Eigen::MatrixXd a = fixture::random_orthogonal(10, 9000 + seed).leftCols(3);
        a += 0.05 * Eigen::MatrixXd(fixture::gaussian(10, 3, 9500 + seed));
        for (int i = 0; i < 20; ++i) a = reorthogonalize_A(a, 0.5);
        double err = 0;
        for (int p = 0; p < 3; ++p)
            for (int q = 0; q < 3; ++q) {
                double dot = 0;
                for (int r = 0; r < 10; ++r) dot += a(r, p) * a(r, q);
                err = std::max(err, std::abs(dot - (p == q ? 1.0 : 0.0)));
            }
        worst = std::max(worst, err);
    }

    // Scalar oracle: s ↦ (1+β)s − βs³ at β = 0.5, s = 1.1.
    const long double s = 1.1L, beta = 0.5L;
    const double scalar = static_cast<double>((1 + beta) * s - beta * s * s * s);
    const Eigen::MatrixXd q = fixture::random_orthogonal(6, 55).leftCols(3);
    const auto next = oracle::to_dense(reorthogonalize_A(1.1 * q, 0.5));
    oracle::Dense gram = oracle::zeros(3, 3);
    for (int p = 0; p < 3; ++p)
        for (int r = 0; r < 3; ++r)
            for (int i = 0; i < 6; ++i) gram[p][r] += next[i][p] * next[i][r];
    double sv_err = 0;
    for (double ev : oracle::jacobi_eigen(gram).values) sv_err = std::max(sv_err, std::abs(std::sqrt(ev) - scalar));
    const double expected = 0.9845;  // frozen from the scalar oracle above
    const bool ok = worst <= 1e-6 && std::abs(scalar - expected) <= 1e-5 && sv_err <= 1e-5;
    return verdict(ok, "20 steps from 100 near-orthonormal 10x3 starts: max |A'A-I| " + fmt(worst) +
                           " (tol 1e-6); 1.1 -> " + fmt(scalar, 8) + " (oracle 0.9845 +-1e-5; the criterion text's " +
                           "0.98445 is 5e-5 off exact arithmetic), matrix singular values within " + fmt(sv_err));
}

// 6. Planted subspace recovery against the shuffled-corpus baseline.
Outcome criterion_6() {
    const auto t0 = Clock::now();
    const PlantedSpec spec;
    const PlantedCorpus corpus = make_planted_corpus(spec);
    const PlantedRecovery r = planted_recovery(spec, planted_training_config());
    const auto angles =
        oracle::principal_angles_deg(oracle::to_dense(r.planted.subspace.A), oracle::to_dense(corpus.basis));
    const double worst = *std::max_element(angles.begin(), angles.end());
    const double gap = r.planted_objective - r.shuffled_objective;
    const double t = seconds_since(t0);
    return verdict(worst <= 5.0 && gap >= 0.1 && t < 120.0,
                   "|V|=200 D=20 k=2: principal angles " + fmt(angles[0]) + ", " + fmt(angles[1]) +
                       " deg (limit 5); objective planted " + fmt(r.planted_objective, 4) + " vs shuffled " +
                       fmt(r.shuffled_objective, 4) + ", gap " + fmt(gap) + " nats (min 0.1); " + fmt(t) +
                       " s (limit 120 s)");
}

// 7. SRCC against the counting oracle, and exact monotone invariance.
Outcome criterion_7() {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-5, 5);
    double worst = 0;
    bool invariant = true;
    for (int trial = 0; trial < 300; ++trial) {
        const std::size_t n = 2 + rng() % 199;  // 2..200
        std::vector<double> x(n), y(n), ex(n), ax(n), ey(n), ay(n);
        for (std::size_t i = 0; i < n; ++i) {
            x[i] = u(rng);
            y[i] = u(rng);
            ex[i] = std::exp(x[i]);
            ax[i] = 2.5 * x[i] - 7.0;
            ey[i] = std::exp(y[i]);
            ay[i] = 0.1 * y[i] + 3.0;
        }
        const double lib = srcc(x, y);
        worst = std::max(worst, std::abs(lib - oracle::srcc_tie_free(x, y)));
        invariant = invariant && srcc(ex, y) == lib && srcc(ax, y) == lib && srcc(x, ey) == lib &&
                    srcc(x, ay) == lib && srcc(ex, ay) == lib;
    }
    return verdict(worst <= 1e-12 && invariant, "300 tie-free instances n<=200: max |diff| " + fmt(worst) +
                                                    " (tol 1e-12); exp/affine invariance exact: " +
                                                    (invariant ? "yes" : "no"));
}

// 8. Exact-parallelogram analogies in both modes, query words excluded.
Outcome criterion_8() {
    const auto p = fixture::parallelogram();
    std::istringstream in(p.questions);
    const AnalogyDataset ds = load_analogy(in, "parallelogram");
    const double add = eval_analogy(p.vocab, p.vectors, ds, AnalogyMode::add).overall.score_x100;
    const double mul = eval_analogy(p.vocab, p.vectors, ds, AnalogyMode::mul).overall.score_x100;

    // a:b::a:? has b − a + a = b, so the unrestricted argmax is a query word.
    const AnalogySolver solver(p.vocab, p.vectors);
    bool excluded = true;
    int checked = 0;
    for (Index a = 0; a < 20; ++a)
        for (Index b = 0; b < 20; ++b) {
            if (a == b) continue;
            Vector target = p.vectors.row(b).transpose();
            Index nearest = 0;
            double best = -2;
            for (Index w = 0; w < 20; ++w) {
                const double cs = cosine(p.vectors.row(w).transpose(), target);
                if (cs > best) best = cs, nearest = w;
            }
            if (nearest != b) continue;
            ++checked;
            for (auto mode : {AnalogyMode::add, AnalogyMode::mul}) {
                const Index got = solver.predict(mode, a, b, a);
                excluded = excluded && got != a && got != b;
            }
        }
    return verdict(add == 100.0 && mul == 100.0 && excluded && checked > 0,
                   "20 words, 90 questions: add " + fmt(add) + "%, mul " + fmt(mul) + "%; exclusion held on " +
                       std::to_string(checked) + " queries whose nearest word is a query word");
}

// 9. Weighted averages of the published per-dataset scores.
Outcome criterion_9() {
    // Pair counts per dataset and the SGNS / PVN columns of the published
    // similarity table (WS-353, WS-353-SIM, WS-353-REL, Rare-Word, MEN,
    // MTurk-287, MTurk-771, SimLex-999, Verb-143, SimVerb-3500).
    const std::vector<std::size_t> pairs{353, 203, 252, 2034, 3000, 287, 771, 999, 143, 3500};
    const std::vector<double> sgns{65.7, 73.2, 58.1, 39.5, 70.2, 62.8, 64.6, 41.6, 35.0, 26.5};
    const std::vector<double> pvn_col{68.1, 73.9, 60.7, 42.9, 73.2, 66.4, 66.8, 42.8, 39.5, 28.5};
    auto rows_of = [&](const std::vector<double>& scores) {
        std::vector<ReportRow> rows;
        for (std::size_t i = 0; i < pairs.size(); ++i) rows.push_back({"d" + std::to_string(i), "similarity", pairs[i], pairs[i], 0, scores[i]});
        return rows;
    };
    const double a = weighted_average(rows_of(sgns));
    const double b = weighted_average(rows_of(pvn_col));
    return verdict(std::abs(a - 47.8) <= 0.3 && std::abs(b - 50.3) <= 0.3,
                   "SGNS " + fmt(a, 6) + " vs 47.8, PVN " + fmt(b, 6) + " vs 50.3 (tol +-0.3)");
}

// 10. pvn → eval on WS-353 → inspect over a real 50-d pretrained embedding.
Outcome criterion_10(const std::string& data_dir) {
#ifndef WORDPOST_HAVE_CLI
    return {Status::skip, "built without the command-line tool"};
#else
    const char* env = std::getenv("WORDPOST_PRETRAINED_50D");
    if (!env || !*env)
        return {Status::skip, "set WORDPOST_PRETRAINED_50D to a 50-d text embedding (e.g. glove.6B.50d.txt)"};
    const std::string source = env;
    const std::string ws = data_dir + "/wordsim353.tsv";
    if (!std::filesystem::exists(source)) return {Status::skip, "no such file: " + source};
    if (!std::filesystem::exists(ws)) return {Status::fail, "missing bundled dataset " + ws};

    fixture::TempDir dir("acceptance10");
    {
        std::ifstream in(source);
        std::ofstream out(dir.file("top50k.txt"));
        std::string line;
        std::size_t kept = 0;
        bool first = true;
        while (kept < 50000 && std::getline(in, line)) {
            if (first) {
                first = false;
                std::istringstream f(line);
                std::string a, b, extra;
                if (f >> a >> b && !(f >> extra) && a.find_first_not_of("0123456789") == std::string::npos &&
                    b.find_first_not_of("0123456789") == std::string::npos)
                    continue;  // word2vec-style header
            }
            out << line << '\n';
            ++kept;
        }
    }
    auto run = [](std::vector<std::string> args, std::string& out) {
        args.insert(args.begin(), "wordpost");
        std::ostringstream o, e;
        const int code = cli::run(args, o, e);
        out = o.str();
        if (code != 0) out += e.str();
        return code;
    };
    std::string text;
    const Embeddings truncated = load_embeddings_file(dir.file("top50k.txt"));
    if (truncated.dim() != 50) return {Status::fail, "embedding dimension is " + std::to_string(truncated.dim())};
    if (run({"pvn", "--input", dir.file("top50k.txt"), "--output", dir.file("pvn.txt"), "--d", "1"}, text) != 0)
        return {Status::fail, "pvn failed: " + text};
    if (run({"eval", "--input", dir.file("pvn.txt"), "--datasets", ws, "--format", "csv"}, text) != 0)
        return {Status::fail, "eval failed: " + text};
    std::vector<std::string> lines;
    for (std::istringstream s(text); std::getline(s, text);) lines.push_back(text);
    const bool well_formed = lines.size() == 3 && lines[0] == "dataset,pairs_total,pairs_used,score_x100" &&
                             lines[1].rfind("wordsim353,353,", 0) == 0 && lines[2].rfind("weighted_average,353,", 0) == 0;
    if (!well_formed) return {Status::fail, "malformed report"};
    const std::string report = lines[1];
    if (run({"inspect", "--input", dir.file("pvn.txt"), "--top", "2"}, text) != 0)
        return {Status::fail, "inspect failed: " + text};
    std::vector<double> ratios;
    bool table = false;
    for (std::istringstream s(text); std::getline(s, text);) {
        if (text.rfind("component", 0) == 0) {
            table = true;
            continue;
        }
        if (!table) continue;
        std::istringstream f(text);
        std::string idx;
        double sd, ratio;
        if (f >> idx >> sd >> ratio) ratios.push_back(ratio);
    }
    double worst = ratios.size() == 2 ? 0.0 : 1.0;
    for (double r : ratios) worst = std::max(worst, std::abs(r - 1.0));
    return verdict(worst <= 1e-6, std::to_string(truncated.size()) + " words; report row '" + report +
                                      "'; leading variance ratios within " + fmt(worst) + " of 1 (tol 1e-6)");
#endif
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Acceptance criteria"};
    std::vector<int> selected;
    std::string data_dir =
#ifdef WORDPOST_TEST_DATA_DIR
        WORDPOST_TEST_DATA_DIR;
#else
        "tests/data";
#endif
    app.add_option("--criteria", selected, "Criteria to run (default all)")->delimiter(',')->check(CLI::Range(1, 10));
    app.add_option("--data-dir", data_dir, "Directory with wordsim353.tsv")->capture_default_str();
    CLI11_PARSE(app, argc, argv);
    if (selected.empty())
        for (int i = 1; i <= 10; ++i) selected.push_back(i);

    const std::map<int, std::function<Outcome()>> criteria{
        {1, criterion_1}, {2, criterion_2}, {3, criterion_3}, {4, criterion_4},
        {5, criterion_5}, {6, criterion_6}, {7, criterion_7}, {8, criterion_8},
        {9, criterion_9}, {10, [&] { return criterion_10(data_dir); }},
    };

    int passed = 0, failed = 0, skipped = 0;
    for (int id : selected) {
        Outcome o;
        try {
            o = criteria.at(id)();
        } catch (const std::exception& e) {
            o = {Status::fail, std::string("exception: ") + e.what()};
        }
        const char* tag = o.status == Status::pass ? "PASS" : o.status == Status::fail ? "FAIL" : "SKIP";
        std::cout << "criterion " << std::setw(2) << id << ": " << tag << "  " << o.detail << std::endl;
        (o.status == Status::pass ? passed : o.status == Status::fail ? failed : skipped) += 1;
    }
    std::cout << "summary: " << passed << " passed, " << failed << " failed, " << skipped << " skipped" << std::endl;
    if (failed) return 1;
    return passed == 0 && skipped > 0 ? 77 : 0;
}
