#include "glean/pipeline.hpp"

#include <algorithm>
#include <set>

#include "glean/error.hpp"
#include "glean/parallel.hpp"
#include "glean/rng.hpp"

namespace glean {

void validate(const PipelineConfig& cfg) {
    if (cfg.k < 1) throw data_error("k must be >= 1");
    if (!(cfg.beta >= 0.0 && cfg.beta <= 1.0)) throw data_error("beta must lie in [0, 1]");
    if (!(cfg.alpha >= 0.0)) throw data_error("alpha must be >= 0");
    if (!(cfg.epsilon_u >= 0.0 && cfg.epsilon_u <= 1.0)) throw data_error("epsilon_u must lie in [0, 1]");
    if (cfg.n_extra < 1) throw data_error("n_extra must be >= 1");
    if (cfg.n_comp < 1) throw data_error("n_comp must be >= 1");
    validate(cfg.aggregation);
}

namespace {

void append_columns(RatingMatrix& m, const RatingMatrix& extra) {
    for (const auto& id : extra.guideline_ids) m.guideline_ids.push_back(id);
    for (std::size_t t = 0; t < m.rows(); ++t)
        m.scores[t].insert(m.scores[t].end(), extra.scores[t].begin(), extra.scores[t].end());
}

}  // namespace

VerificationReport verify(const Trajectory& t, const GuidelineStore& store, const Judge& judge,
                          const CalibratorPosterior& post, const PipelineConfig& cfg,
                          const std::vector<std::string>& candidate_answers) {
    validate(cfg);
    validate(t);
    if (post.d != cfg.aggregation.d())
        throw data_error("calibrator dimension " + std::to_string(post.d) + " does not match aggregation dimension " +
                         std::to_string(cfg.aggregation.d()));

    std::vector<Guideline> passive;
    for (const auto& id : retrieve(store, t.answer, cfg.k).ranked_ids) passive.push_back(store.get(id));
    RatingMatrix ratings = judge_trajectory(t, passive, judge, cfg.judge_parallelism);

    auto path = evidence_path(ratings, cfg.aggregation, cfg.beta);
    double confidence = predict(post, path.back());
    double entropy = uncertainty(confidence, cfg.entropy_unit);

    VerificationReport report;
    report.trajectory_id = t.id;
    report.case_id = t.case_id;
    report.answer = t.answer;
    report.label = t.label;
    report.passive_confidence = confidence;
    report.passive_uncertainty = entropy;
    report.guidelines_used = ratings.guideline_ids;

    if (cfg.active_enabled && entropy > cfg.epsilon_u) {
        report.active_triggered = true;
        std::set<std::string> used(ratings.guideline_ids.begin(), ratings.guideline_ids.end());

        if (cfg.expansion_enabled) {
            const auto extra = expand(store, t.answer, used, cfg.n_extra);
            if (!extra.empty()) {
                append_columns(ratings, judge_trajectory(t, extra, judge, cfg.judge_parallelism));
                for (const auto& g : extra) {
                    used.insert(g.id);
                    report.expansion_guidelines.push_back(g.id);
                    report.guidelines_used.push_back(g.id);
                }
            }
        }

        if (cfg.differential_enabled) {
            const std::uint64_t seed = mix64(cfg.seed ^ fnv1a(t.id));
            const auto competitive = retrieve_competitive(store, t.answer, candidate_answers, cfg.n_comp, used, seed);
            if (competitive.empty()) {
                report.differential_skipped = true;
            } else {
                const auto comp = judge_trajectory(t, competitive, judge, cfg.judge_parallelism);
                ratings = rectify_matrix(ratings, comp, cfg.alpha);
                report.competitive_guidelines = comp.guideline_ids;
            }
        } else {
            report.differential_skipped = true;
        }

        path = evidence_path(ratings, cfg.aggregation, cfg.beta);
        confidence = predict(post, path.back());
        entropy = uncertainty(confidence, cfg.entropy_unit);
    }

    report.confidence = confidence;
    report.uncertainty = entropy;
    report.per_step_evidence = std::move(path);
    return report;
}

VerificationReport verify(const Trajectory& t, const GuidelineStore& store, const JudgeBackendConfig& judge_cfg,
                          const CalibratorPosterior& post, const PipelineConfig& cfg,
                          const std::vector<std::string>& candidate_answers) {
    const auto judge = make_judge(judge_cfg);
    return verify(t, store, *judge, post, cfg, candidate_answers);
}

std::vector<std::string> candidate_answers_for(const Trajectory& t, const std::vector<Trajectory>& batch,
                                               const AnswerPool& pool) {
    std::vector<std::string> out;
    auto add = [&](const std::string& a) {
        if (a != t.answer && std::find(out.begin(), out.end(), a) == out.end()) out.push_back(a);
    };
    for (const auto& other : batch)
        if (other.id != t.id && other.case_id == t.case_id) add(other.answer);
    if (auto it = pool.find(t.case_id); it != pool.end())
        for (const auto& a : it->second) add(a);
    return out;
}

std::vector<BatchItem> verify_batch(const std::vector<Trajectory>& ts, const GuidelineStore& store,
                                    const Judge& judge, const CalibratorPosterior& post, const PipelineConfig& cfg,
                                    std::size_t parallelism, const AnswerPool& pool) {
    std::vector<BatchItem> items(ts.size());
    parallel_for(ts.size(), parallelism, [&](std::size_t i) {
        items[i].trajectory_id = ts[i].id;
        try {
            items[i].report = verify(ts[i], store, judge, post, cfg, candidate_answers_for(ts[i], ts, pool));
        } catch (const std::exception& e) {
            items[i].error = e.what();
        }
    });
    return items;
}

}  // namespace glean
