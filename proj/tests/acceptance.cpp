// Acceptance gate: one PASS/FAIL line per criterion, non-zero exit if any fails.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <unistd.h>
#include <vector>

#include "glean/calibration.hpp"
#include "glean/cli.hpp"
#include "glean/evidence.hpp"
#include "glean/judge.hpp"
#include "glean/metrics.hpp"
#include "glean/parallel.hpp"
#include "glean/pipeline.hpp"
#include "glean/rng.hpp"
#include "glean/synthetic.hpp"

using namespace glean;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* f, double a, double b = 0, double c = 0, double d = 0) {
    char buf[256];
    std::snprintf(buf, sizeof buf, f, a, b, c, d);
    return buf;
}

int failures = 0;

void criterion(int id, const char* name, double budget_s, const std::function<Outcome()>& body) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome out;
    try {
        out = body();
    } catch (const std::exception& e) {
        out = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (secs > budget_s) {
        out.pass = false;
        out.detail += " [over budget]";
    }
    failures += out.pass ? 0 : 1;
    std::printf("%s  C%d %-34s %s (%.2f s, budget %.0f s)\n", out.pass ? "PASS" : "FAIL", id, name, out.detail.c_str(),
                secs, budget_s);
    std::fflush(stdout);
}

std::vector<CalibrationSample> calibration_set(const SyntheticDataset& data, const AggregationSpec& agg, double beta) {
    std::vector<CalibrationSample> out;
    for (std::size_t i = 0; i < data.trajectories.size(); ++i)
        out.push_back({evidence_path(data.ratings[i], agg, beta).back(), *data.trajectories[i].label});
    return out;
}

const AggregationSpec kScalar = AggregationSpec::from_names({"avg"});

// 1. Posterior means recover the generating slope and intercept.
Outcome calibrator_recovery() {
    int passed = 0;
    std::string worst;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        SyntheticSpec spec;
        spec.n_cases = 500;
        spec.seed = 1000 + seed;
        const auto data = generate(spec);
        const auto post = fit(calibration_set(data, kScalar, spec.beta), 1.0, 2000, seed);
        const auto m = posterior_mean(post);
        const bool ok = std::abs(m.w_mean[0] - 1.5) <= 0.3 && std::abs(m.b_mean + 0.2) <= 0.3;
        passed += ok;
        if (!ok) worst += fmt(" seed%.0f:(%.3f,%.3f)", static_cast<double>(seed), m.w_mean[0], m.b_mean);
    }
    return {passed >= 9, fmt("%.0f/10 seeds within 0.3", passed) + worst};
}

// 2. Held-out ECE and Brier against the Bayes-optimal Brier.
Outcome calibration_quality() {
    SyntheticSpec train_spec;
    train_spec.n_cases = 2000;
    train_spec.seed = 21;
    const auto post = fit(calibration_set(generate(train_spec), kScalar, train_spec.beta), 1.0, 2000, 7);

    SyntheticSpec test_spec = train_spec;
    test_spec.seed = 22;
    const auto test = generate(test_spec);
    std::vector<ScoredSample> scored;
    double bayes = 0.0;
    for (std::size_t i = 0; i < test.trajectories.size(); ++i) {
        const bool z = *test.trajectories[i].label;
        scored.push_back({predict(post, evidence_path(test.ratings[i], kScalar, test_spec.beta).back()), z});
        const double diff = test.true_probability[i] - (z ? 1.0 : 0.0);
        bayes += diff * diff;
    }
    bayes /= static_cast<double>(scored.size());
    const double e = ece(scored, 10), b = brier(scored);
    return {e <= 0.05 && std::abs(b - bayes) <= 0.01,
            fmt("ece=%.4f brier=%.4f bayes=%.4f", e, b, bayes)};
}

// 3. Metrics against brute-force and straight-line re-implementations.
Outcome metric_oracles() {
    Rng rng(3);
    double max_dev = 0.0;
    int auroc_mismatch = 0;
    for (int inst = 0; inst < 100; ++inst) {
        const std::size_t n = 2 + rng.below(199);
        const bool coarse = inst % 2 == 0;  // quantized scores exercise ties
        std::vector<ScoredSample> s(n);
        for (auto& x : s) {
            x.score = coarse ? static_cast<double>(rng.below(11)) / 10.0 : rng.uniform();
            x.label = rng.bernoulli(0.4);
        }
        s[0].label = true;
        s[1].label = false;

        double pairs = 0.0, good = 0.0;
        for (const auto& p : s)
            for (const auto& q : s)
                if (p.label && !q.label) {
                    pairs += 1.0;
                    good += p.score > q.score ? 1.0 : p.score == q.score ? 0.5 : 0.0;
                }
        auroc_mismatch += auroc(s) != good / pairs;

        double sq = 0.0;
        for (const auto& x : s) sq += (x.score - x.label) * (x.score - x.label);
        max_dev = std::max(max_dev, std::abs(brier(s) - sq / n));

        double e = 0.0;
        for (int b = 0; b < 10; ++b) {
            double cnt = 0, conf = 0, acc = 0;
            for (const auto& x : s) {
                const bool in = b == 0 ? x.score <= 0.1 : (x.score > b / 10.0 && x.score <= (b + 1) / 10.0);
                if (in) cnt += 1, conf += x.score, acc += x.label;
            }
            if (cnt > 0) e += cnt / n * std::abs(conf / cnt - acc / cnt);
        }
        max_dev = std::max(max_dev, std::abs(ece(s, 10) - e));

        for (double f : {0.1, 0.25, 0.5, 1.0}) {
            auto sorted = s;
            std::stable_sort(sorted.begin(), sorted.end(), [](auto& a, auto& b) { return a.score > b.score; });
            std::size_t keep = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(f * n - 1e-9)));
            double err = 0;
            for (std::size_t i = 0; i < keep; ++i) err += !sorted[i].label;
            max_dev = std::max(max_dev, std::abs(risk_at(s, f) - err / keep));
        }
    }
    return {auroc_mismatch == 0 && max_dev <= 1e-12,
            fmt("auroc mismatches=%.0f max deviation=%.2e", auroc_mismatch, max_dev)};
}

// 4. Recurrence against the explicit discounted sum.
Outcome accumulation_algebra() {
    Rng rng(4);
    double max_dev = 0.0;
    int exact_fail = 0;
    const double betas[] = {0.0, 0.3, 0.5, 0.7, 1.0};
    for (int c = 0; c < 1000; ++c) {
        const double beta = betas[c % 5];
        const std::size_t T = 1 + rng.below(50), d = 1 + rng.below(4);
        std::vector<Feature> f(T, Feature(d));
        for (auto& row : f)
            for (auto& x : row) x = clamp_probability(rng.uniform());
        const auto path = accumulate(f, beta);
        for (std::size_t t = 0; t < T; ++t)
            for (std::size_t j = 0; j < d; ++j) {
                double explicit_sum = 0.0, running = 0.0;
                for (std::size_t u = 0; u <= t; ++u) {
                    explicit_sum += std::pow(beta, static_cast<double>(t - u)) * logit(f[u][j]);
                    running += logit(f[u][j]);
                }
                const double got = path[t].values[j];
                max_dev = std::max(max_dev, std::abs(got - explicit_sum));
                if (beta == 0.0) exact_fail += got != logit(f[t][j]);
                if (beta == 1.0) exact_fail += got != running;
            }
    }
    return {max_dev <= 1e-9 && exact_fail == 0, fmt("max deviation=%.2e exact reduction failures=%.0f", max_dev, exact_fail)};
}

// 5. Rectification identities.
Outcome rectification_identities() {
    Rng rng(5);
    int fails = 0;
    for (int i = 0; i < 1000; ++i) {
        const double s = clamp_probability(rng.uniform()), c = clamp_probability(rng.uniform());
        fails += rectify(s, c, 0.0) != s;
        fails += std::abs(rectify(s, 0.5, rng.uniform(0, 3)) - s) > 1e-12;
        fails += std::abs(rectify(s, s, 1.0) - 0.5) > 1e-12;
    }
    for (int inst = 0; inst < 100; ++inst) {
        const std::size_t T = 1 + rng.below(8), G = 1 + rng.below(5), C = 1 + rng.below(3);
        RatingMatrix m{"t", {}, std::vector<std::vector<double>>(T, std::vector<double>(G))};
        RatingMatrix comp{"t", {}, std::vector<std::vector<double>>(T, std::vector<double>(C))};
        for (std::size_t g = 0; g < G; ++g) m.guideline_ids.push_back("g" + std::to_string(g));
        for (std::size_t g = 0; g < C; ++g) comp.guideline_ids.push_back("c" + std::to_string(g));
        for (auto& r : m.scores)
            for (auto& x : r) x = clamp_probability(rng.uniform());
        for (auto& r : comp.scores)
            for (auto& x : r) x = clamp_probability(rng.uniform());
        const double alpha = rng.uniform(0, 2);
        const auto out = rectify_matrix(m, comp, alpha);
        for (std::size_t t = 0; t < T; ++t) {
            const double cmax = *std::max_element(comp.scores[t].begin(), comp.scores[t].end());
            for (std::size_t g = 0; g < G; ++g) {
                const double want = clamp_probability(sigmoid(logit(m.scores[t][g]) - alpha * logit(cmax)));
                fails += std::abs(out.scores[t][g] - want) > 1e-15;
            }
        }
    }
    return {fails == 0, fmt("violations=%.0f", fails)};
}

// 6. passive < active(eps=0.5) <= active(eps=0) on the active scenario.
Outcome active_ordering() {
    SyntheticSpec spec;
    spec.n_cases = 500;
    spec.coverage_gap_rate = 0.5;
    spec.seed = 61;
    const auto train = generate_active_scenario(spec);
    const auto post = fit(calibration_set(train, AggregationSpec{}, spec.beta), 1.0, 2000, 6);

    spec.seed = 62;
    const auto test = generate_active_scenario(spec);
    MockJudge judge;
    auto run_auroc = [&](bool active, double eps, std::size_t* triggered) {
        PipelineConfig cfg;
        cfg.active_enabled = active;
        cfg.epsilon_u = eps;
        cfg.seed = 6;
        const auto items = verify_batch(test.trajectories, *test.store, judge, post, cfg, default_parallelism(),
                                        test.answer_pool);
        std::vector<ScoredSample> s;
        for (const auto& it : items) {
            if (!it.ok()) throw std::runtime_error(it.error);
            s.push_back({it.report->confidence, *it.report->label, std::nullopt, std::nullopt});
            if (triggered) *triggered += it.report->active_triggered;
        }
        return auroc(s);
    };
    std::size_t trig = 0;
    const double passive = run_auroc(false, 0.5, nullptr);
    const double mid = run_auroc(true, 0.5, &trig);
    const double full = run_auroc(true, 0.0, nullptr);
    const bool ok = full - passive >= 0.02 && mid >= passive - 0.005 && mid <= full;
    return {ok, fmt("passive=%.6f eps0.5=%.6f eps0=%.6f triggered@0.5=%.0f", passive, mid, full,
                    static_cast<double>(trig))};
}

// 7. Linearity diagnostic on well-specified and label-shuffled data.
Outcome linearity() {
    SyntheticSpec spec;
    spec.n_cases = 5000;
    spec.seed = 71;
    const auto data = generate(spec);
    std::vector<EvidencePoint> pts;
    for (std::size_t i = 0; i < data.trajectories.size(); ++i)
        pts.push_back({evidence_path(data.ratings[i], kScalar, spec.beta).back().values[0], *data.trajectories[i].label});
    const auto diag = linearity_diagnostic(pts, 10);

    int null_ok = 0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        auto shuffled = pts;
        Rng rng(7000 + seed);
        for (std::size_t i = shuffled.size(); i > 1; --i) std::swap(shuffled[i - 1].label, shuffled[rng.below(i)].label);
        null_ok += linearity_diagnostic(shuffled, 10).welch_p > 0.01;
    }
    const bool ok = diag.r_squared >= 0.99 && diag.welch_p < 1e-3 && null_ok >= 95;
    return {ok, fmt("r2=%.4f slope=%.3f welch_p=%.1e shuffled p>0.01 in %.0f/100", diag.r_squared, diag.slope,
                    diag.welch_p, null_ok)};
}

// 8. Oracle-score best-of-n equals pass@n and never decreases.
Outcome best_of_n_monotone() {
    Rng rng(8);
    std::vector<ScoredSample> s;
    for (int c = 0; c < 200; ++c) {
        const double p = rng.uniform(0.02, 0.4);
        for (int j = 0; j < 16; ++j) {
            const bool z = rng.bernoulli(p);
            s.push_back({z ? 1.0 : 0.0, z, "case-" + std::to_string(c), std::nullopt});
        }
    }
    bool ok = true;
    double prev = -1.0;
    std::string curve;
    for (int n : {1, 4, 8, 16}) {
        double pass = 0.0;
        for (int c = 0; c < 200; ++c) {
            bool any = false;
            for (int j = 0; j < n; ++j) any = any || s[c * 16 + j].label;
            pass += any;
        }
        pass /= 200.0;
        const double acc = best_of_n(s, n);
        ok = ok && acc == pass && acc >= prev;
        prev = acc;
        curve += fmt(" n=%.0f:%.3f", n, acc);
    }
    return {ok, "accuracy" + curve};
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// 9. Two identical CLI chains produce byte-identical files.
Outcome end_to_end_determinism() {
    const fs::path root = fs::temp_directory_path() / ("glean_acceptance_" + std::to_string(::getpid()));
    const fs::path work = root / "work", first = root / "first";
    fs::remove_all(root);
    auto chain = [&] {
        fs::remove_all(work);
        const std::string w = work.string();
        const std::vector<std::vector<std::string>> cmds = {
            {"--seed", "9", "--out-dir", w + "/synth", "synth", "--n-cases", "150", "--candidates", "2"},
            {"--out-dir", w + "/judge", "judge", "--trajectories", w + "/synth/trajectories.jsonl", "--guidelines",
             w + "/synth/guidelines.jsonl"},
            {"--seed", "9", "--out-dir", w + "/calibrate", "calibrate", "--trajectories",
             w + "/synth/trajectories.jsonl", "--ratings", w + "/judge/ratings.jsonl"},
            {"--seed", "9", "--out-dir", w + "/verify", "verify", "--trajectories", w + "/synth/trajectories.jsonl",
             "--guidelines", w + "/synth/guidelines.jsonl", "--calibrator", w + "/calibrate/calibrator.jsonl",
             "--answer-pool", w + "/synth/answer_pool.jsonl"},
            {"--out-dir", w + "/eval", "eval", "--reports", w + "/verify/reports.jsonl"},
        };
        std::ostringstream sink;
        auto* saved_out = std::cout.rdbuf(sink.rdbuf());
        auto* saved_err = std::cerr.rdbuf(sink.rdbuf());
        struct Restore {
            std::streambuf *out, *err;
            ~Restore() {
                std::cout.rdbuf(out);
                std::cerr.rdbuf(err);
            }
        } restore{saved_out, saved_err};
        for (const auto& c : cmds)
            if (cli::run(c) != 0) throw std::runtime_error("command failed: " + c[c.size() > 4 ? 4 : 0]);
    };
    chain();
    fs::rename(work, first);
    chain();

    std::size_t files = 0, diffs = 0;
    for (const auto& entry : fs::recursive_directory_iterator(first)) {
        if (!entry.is_regular_file()) continue;
        ++files;
        const fs::path other = work / fs::relative(entry.path(), first);
        if (!fs::exists(other) || slurp(entry.path()) != slurp(other)) ++diffs;
    }
    std::size_t second_files = 0;
    for (const auto& entry : fs::recursive_directory_iterator(work)) second_files += entry.is_regular_file();
    fs::remove_all(root);
    return {diffs == 0 && files == second_files && files >= 14,
            fmt("%.0f files compared, %.0f differ", static_cast<double>(files), static_cast<double>(diffs))};
}

}  // namespace

int main() {
    criterion(1, "calibrator recovery", 30, calibrator_recovery);
    criterion(2, "calibration quality", 10, calibration_quality);
    criterion(3, "metric oracles", 5, metric_oracles);
    criterion(4, "accumulation algebra", 5, accumulation_algebra);
    criterion(5, "rectification identities", 2, rectification_identities);
    criterion(6, "active-verification ordering", 60, active_ordering);
    criterion(7, "linearity diagnostic", 20, linearity);
    criterion(8, "best-of-n monotonicity", 5, best_of_n_monotone);
    criterion(9, "end-to-end determinism", 60, end_to_end_determinism);
    std::printf("%d/9 criteria passed\n", 9 - failures);
    return failures == 0 ? 0 : 1;
}
