#include <doctest.h>

#include <cmath>

#include "glean/calibration.hpp"
#include "glean/error.hpp"
#include "glean/evidence.hpp"
#include "glean/metrics.hpp"
#include "glean/synthetic.hpp"

using namespace glean;

namespace {

const AggregationSpec kAvg = AggregationSpec::from_names({"avg"});

double passive_auroc_gap(double gap_rate, std::uint64_t seed) {
    SyntheticSpec spec;
    spec.n_cases = 300;
    spec.coverage_gap_rate = gap_rate;
    spec.seed = seed;
    const auto train = generate_active_scenario(spec);
    std::vector<CalibrationSample> samples;
    for (std::size_t i = 0; i < train.trajectories.size(); ++i)
        samples.push_back({evidence_path(train.ratings[i], AggregationSpec{}, spec.beta).back(), *train.trajectories[i].label});
    const auto post = fit(samples, 1.0, 500, seed);

    spec.seed = seed + 1;
    const auto test = generate_active_scenario(spec);
    auto run = [&](bool active) {
        PipelineConfig cfg;
        cfg.active_enabled = active;
        cfg.epsilon_u = 0.0;
        std::vector<ScoredSample> s;
        for (const auto& item : verify_batch(test.trajectories, *test.store, MockJudge(), post, cfg, 4, test.answer_pool))
            s.push_back({item.report->confidence, *item.report->label, std::nullopt, std::nullopt});
        return auroc(s);
    };
    return run(true) - run(false);
}

}  // namespace

TEST_CASE("generated data passes validation and matches the mock judge") {
    SyntheticSpec spec;
    spec.n_cases = 40;
    spec.candidates_per_case = 2;
    spec.rating_noise_sd = 0.3;
    spec.coverage_gap_rate = 0.2;
    spec.seed = 4;
    const auto data = generate(spec);
    REQUIRE(data.trajectories.size() == 80);
    const MockJudge judge;
    for (std::size_t i = 0; i < data.trajectories.size(); ++i) {
        const auto& t = data.trajectories[i];
        CHECK_NOTHROW(validate(t));
        CHECK_NOTHROW(validate_rating_matrix(data.ratings[i], t));
        CHECK(t.length() >= 3);
        CHECK(t.length() <= 6);
        const auto ids = retrieve(*data.store, t.answer, spec.k).ranked_ids;
        CHECK(ids == data.ratings[i].guideline_ids);
        std::vector<Guideline> gs;
        for (const auto& id : ids) gs.push_back(data.store->get(id));
        CHECK(judge_trajectory(t, gs, judge) == data.ratings[i]);
    }
}

TEST_CASE("clean evidence equals the reference evidence") {
    SyntheticSpec spec;
    spec.n_cases = 50;
    spec.seed = 5;
    const auto data = generate(spec);
    for (std::size_t i = 0; i < data.trajectories.size(); ++i) {
        const double s = evidence_path(data.ratings[i], kAvg, spec.beta).back().values[0];
        CHECK(s == doctest::Approx(data.reference_evidence[i]).epsilon(1e-9));
        CHECK(data.true_probability[i] == doctest::Approx(sigmoid(1.5 * s - 0.2)).epsilon(1e-9));
    }
}

TEST_CASE("generation is deterministic") {
    SyntheticSpec spec;
    spec.n_cases = 30;
    spec.rating_noise_sd = 0.5;
    spec.seed = 6;
    const auto a = generate(spec), b = generate(spec);
    CHECK(a.trajectories == b.trajectories);
    CHECK(a.ratings == b.ratings);
    CHECK(a.guidelines == b.guidelines);
    spec.seed = 7;
    CHECK(!(generate(spec).trajectories == a.trajectories));
}

TEST_CASE("labels follow the generative model") {
    SyntheticSpec spec;
    spec.n_cases = 5000;
    spec.seed = 8;
    const auto data = generate(spec);
    std::vector<std::size_t> order(data.trajectories.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](auto a, auto b) { return data.reference_evidence[a] < data.reference_evidence[b]; });
    double total_dev = 0.0;
    const std::size_t per_bin = order.size() / 10;
    for (int b = 0; b < 10; ++b) {
        double hits = 0.0, model = 0.0;
        for (std::size_t i = b * per_bin; i < (b + 1) * per_bin; ++i) {
            hits += *data.trajectories[order[i]].label;
            model += data.true_probability[order[i]];
        }
        total_dev += std::abs(hits - model) / per_bin;
    }
    CHECK(total_dev / 10 <= 3.0 / std::sqrt(static_cast<double>(per_bin)));
}

TEST_CASE("zero slope gives chance-level discrimination") {
    SyntheticSpec spec;
    spec.n_cases = 5000;
    spec.true_slope = 0.0;
    spec.seed = 9;
    const auto data = generate(spec);
    std::vector<ScoredSample> s;
    for (std::size_t i = 0; i < data.trajectories.size(); ++i)
        s.push_back({data.reference_evidence[i], *data.trajectories[i].label, std::nullopt, std::nullopt});
    const double a = auroc(s);
    CHECK(a >= 0.45);
    CHECK(a <= 0.55);
}

TEST_CASE("well-specified data recovers the slope") {
    SyntheticSpec spec;
    spec.n_cases = 5000;
    spec.seed = 10;
    const auto data = generate(spec);
    std::vector<EvidencePoint> pts;
    for (std::size_t i = 0; i < data.trajectories.size(); ++i)
        pts.push_back({evidence_path(data.ratings[i], kAvg, spec.beta).back().values[0], *data.trajectories[i].label});
    CHECK(std::abs(linearity_diagnostic(pts, 10).slope - 1.5) <= 0.2);
}

TEST_CASE("active scenario without gaps gains nothing") {
    CHECK(std::abs(passive_auroc_gap(0.0, 11)) < 0.01);
    CHECK(passive_auroc_gap(0.5, 13) >= 0.02);
}

TEST_CASE("spec validation") {
    SyntheticSpec spec;
    spec.n_cases = 0;
    CHECK_THROWS_AS(generate(spec), Error);
    spec = {};
    spec.coverage_gap_rate = 1.5;
    CHECK_THROWS_AS(generate(spec), Error);
    spec = {};
    spec.min_steps = 5;
    spec.max_steps = 4;
    CHECK_THROWS_AS(generate(spec), Error);
}
