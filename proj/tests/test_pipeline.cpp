#include <doctest.h>

#include <cmath>

#include "glean/error.hpp"
#include "glean/metrics.hpp"
#include "glean/pipeline.hpp"

using namespace glean;

namespace {

struct ConstantJudge : Judge {
    double value;
    explicit ConstantJudge(double v) : value(v) {}
    double score(const JudgeRequest&) const override { return value; }
};

Guideline g(std::string id, std::string title) { return {std::move(id), std::move(title), std::nullopt, "content", {}}; }

std::shared_ptr<GuidelineStore> store() {
    return std::make_shared<GuidelineStore>(
        std::vector<Guideline>{g("p1", "Acute pancreatitis severity"), g("p2", "Acute pancreatitis imaging"),
                               g("p3", "Pancreatitis fluids"), g("p4", "Pancreatitis nutrition"),
                               g("p5", "Pancreatitis followup"), g("c1", "Cholecystitis"), g("a1", "Appendicitis")},
        std::make_shared<HashedEmbedder>());
}

Trajectory traj(std::string id, std::string answer, std::string case_id = "c") {
    Trajectory t{std::move(id), std::move(case_id), {}, std::move(answer), true};
    for (int i = 1; i <= 3; ++i) t.steps.push_back({i, "obs " + std::to_string(i), "act " + std::to_string(i)});
    return t;
}

CalibratorPosterior symmetric() {
    CalibratorPosterior p;
    p.d = 2;
    p.draws = {{{1.0, 0.0}, 0.0}, {{-1.0, 0.0}, 0.0}};
    return p;
}

CalibratorPosterior confident() {
    CalibratorPosterior p;
    p.d = 2;
    p.draws = {{{0.0, 0.0}, logit(0.99)}};
    return p;
}

}  // namespace

TEST_CASE("neutral evidence triggers active verification") {
    const auto s = store();
    const ConstantJudge judge(0.5);
    const auto r = verify(traj("t", "acute pancreatitis"), *s, judge, symmetric(), PipelineConfig{}, {"cholecystitis"});
    CHECK(r.passive_confidence == 0.5);
    CHECK(r.passive_uncertainty == 1.0);
    CHECK(r.active_triggered);
    CHECK(r.per_step_evidence.back().values == std::vector<double>{0.0, 0.0});
    CHECK(r.guidelines_used.size() == 4);
    CHECK(r.expansion_guidelines.size() == 1);
    CHECK(r.competitive_guidelines == std::vector<std::string>{"c1"});
    CHECK(!r.differential_skipped);
    CHECK(r.per_step_evidence.size() == 3);
}

TEST_CASE("confident posterior does not trigger") {
    const auto s = store();
    const MockJudge judge(1);
    const auto r = verify(traj("t", "acute pancreatitis"), *s, judge, confident(), PipelineConfig{}, {});
    CHECK(r.confidence == doctest::Approx(0.99));
    CHECK(r.uncertainty == doctest::Approx(0.0808).epsilon(1e-3));
    CHECK(!r.active_triggered);
    CHECK(r.guidelines_used.size() == 3);
    CHECK(r.expansion_guidelines.empty());
}

TEST_CASE("disabled active verification keeps the passive result") {
    const auto s = store();
    const MockJudge judge(2);
    PipelineConfig cfg;
    cfg.active_enabled = false;
    const auto r = verify(traj("t", "acute pancreatitis"), *s, judge, symmetric(), cfg, {"cholecystitis"});
    CHECK(!r.active_triggered);
    CHECK(r.confidence == r.passive_confidence);
    CHECK(r.uncertainty == r.passive_uncertainty);
    CHECK(r.competitive_guidelines.empty());
}

TEST_CASE("threshold extremes") {
    const auto s = store();
    const MockJudge judge(3);
    CalibratorPosterior post;
    post.d = 2;
    post.draws = {{{0.7, 0.4}, -0.1}};
    PipelineConfig cfg;
    cfg.epsilon_u = 0.0;
    CHECK(verify(traj("t", "acute pancreatitis"), *s, judge, post, cfg, {}).active_triggered);
    cfg.epsilon_u = 1.0;
    CHECK(!verify(traj("t", "acute pancreatitis"), *s, judge, post, cfg, {}).active_triggered);
    // H = 1 exactly at p = 0.5 and the trigger is strict.
    CHECK(!verify(traj("t", "acute pancreatitis"), *s, ConstantJudge(0.5), symmetric(), cfg, {}).active_triggered);
}

TEST_CASE("empty competitive pool is recorded") {
    const auto s = store();
    const ConstantJudge judge(0.5);
    const auto r = verify(traj("t", "acute pancreatitis"), *s, judge, symmetric(), PipelineConfig{}, {"pancreatitis acute"});
    CHECK(r.active_triggered);
    CHECK(r.differential_skipped);
    CHECK(r.competitive_guidelines.empty());
}

TEST_CASE("rectification uses the competitive scores") {
    struct Split : Judge {
        double score(const JudgeRequest& req) const override {
            return req.guideline_text.find("Cholecystitis") != std::string::npos ? 0.9 : 0.8;
        }
    };
    const auto s = store();
    PipelineConfig cfg;
    cfg.epsilon_u = 0.0;
    cfg.aggregation = AggregationSpec::from_names({"avg"});
    CalibratorPosterior post;
    post.d = 1;
    post.draws = {{{0.1}, 0.0}};
    const auto r = verify(traj("t", "acute pancreatitis"), *s, Split{}, post, cfg, {"cholecystitis"});
    const double cell = logit(rectify(0.8, 0.9, cfg.alpha));
    CHECK(r.per_step_evidence.back().values[0] == doctest::Approx(cell * (1 + 0.5 + 0.25)).epsilon(1e-9));
}

TEST_CASE("dimension mismatch is a data error") {
    const auto s = store();
    CalibratorPosterior post;
    post.d = 1;
    post.draws = {{{1.0}, 0.0}};
    CHECK_THROWS_AS(verify(traj("t", "acute pancreatitis"), *s, MockJudge(), post, PipelineConfig{}, {}), Error);
}

TEST_CASE("batch isolates failures and keeps order") {
    const auto s = store();
    const MockJudge judge(4);
    const std::vector<Trajectory> ts{traj("a", "acute pancreatitis"), traj("b", "gastroenteritis"),
                                     traj("c", "pancreatitis")};
    const auto items = verify_batch(ts, *s, judge, symmetric(), PipelineConfig{}, 4);
    REQUIRE(items.size() == 3);
    CHECK(items[0].ok());
    CHECK(!items[1].ok());
    CHECK(items[1].trajectory_id == "b");
    CHECK(items[1].error.find("no relevant guideline") != std::string::npos);
    CHECK(items[2].ok());
}

TEST_CASE("batch determinism across parallelism") {
    const auto s = store();
    const MockJudge judge(5);
    std::vector<Trajectory> ts;
    for (int i = 0; i < 12; ++i)
        ts.push_back(traj("t" + std::to_string(i), i % 3 ? "acute pancreatitis" : "cholecystitis", "c" + std::to_string(i / 4)));
    PipelineConfig cfg;
    cfg.epsilon_u = 0.0;
    const auto one = verify_batch(ts, *s, judge, symmetric(), cfg, 1);
    const auto eight = verify_batch(ts, *s, judge, symmetric(), cfg, 8);
    for (std::size_t i = 0; i < ts.size(); ++i) CHECK(*one[i].report == *eight[i].report);

    const std::vector<Trajectory> twice{ts[1], ts[1]};
    const auto dup = verify_batch(twice, *s, judge, symmetric(), cfg, 2);
    CHECK(*dup[0].report == *dup[1].report);
}

TEST_CASE("candidate answers") {
    const std::vector<Trajectory> batch{traj("a", "x", "c1"), traj("b", "y", "c1"), traj("c", "z", "c2"),
                                        traj("d", "x", "c1")};
    const AnswerPool pool{{"c1", {"w", "y", "x"}}};
    CHECK(candidate_answers_for(batch[0], batch, pool) == std::vector<std::string>{"y", "w"});
    CHECK(candidate_answers_for(batch[2], batch, pool).empty());
}

TEST_CASE("config validation") {
    PipelineConfig cfg;
    cfg.beta = 1.5;
    CHECK_THROWS_AS(validate(cfg), Error);
    cfg = {};
    cfg.epsilon_u = -0.1;
    CHECK_THROWS_AS(validate(cfg), Error);
    cfg = {};
    cfg.k = 0;
    CHECK_THROWS_AS(validate(cfg), Error);
}
