#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "glean/calibration.hpp"
#include "glean/core.hpp"
#include "glean/evidence.hpp"
#include "glean/judge.hpp"
#include "glean/retrieval.hpp"

namespace glean {

struct PipelineConfig {
    std::size_t k = 3;
    double beta = 0.5;
    double alpha = 0.2;
    double epsilon_u = 0.5;
    std::size_t n_extra = 1;
    std::size_t n_comp = 2;
    AggregationSpec aggregation;
    bool active_enabled = true;
    // Independent switches for the two active strategies (ablations).
    bool expansion_enabled = true;
    bool differential_enabled = true;
    std::uint64_t seed = 0;
    EntropyUnit entropy_unit = EntropyUnit::bits;
    std::size_t judge_parallelism = 1;  // concurrent judge calls within one trajectory
};

void validate(const PipelineConfig& cfg);

// Retrieve, judge, aggregate, accumulate and calibrate; when the entropy of
// the calibrated confidence exceeds epsilon_u, expand the guideline set,
// judge competitive guidelines drawn from `candidate_answers`, rectify, and
// recompute. Errors from retrieval, judging and calibration propagate.
VerificationReport verify(const Trajectory& t, const GuidelineStore& store, const Judge& judge,
                          const CalibratorPosterior& post, const PipelineConfig& cfg,
                          const std::vector<std::string>& candidate_answers);

VerificationReport verify(const Trajectory& t, const GuidelineStore& store, const JudgeBackendConfig& judge_cfg,
                          const CalibratorPosterior& post, const PipelineConfig& cfg,
                          const std::vector<std::string>& candidate_answers);

// Either a report or the reason this trajectory failed.
struct BatchItem {
    std::string trajectory_id;
    std::optional<VerificationReport> report;
    std::string error;

    bool ok() const { return report.has_value(); }
};

// case_id -> alternative answers supplied from outside the batch.
using AnswerPool = std::map<std::string, std::vector<std::string>>;

// Answers of other trajectories sharing t.case_id, then the external pool, de-duplicated.
std::vector<std::string> candidate_answers_for(const Trajectory& t, const std::vector<Trajectory>& batch,
                                               const AnswerPool& pool);

// Verifies every trajectory independently on up to `parallelism` workers.
// Output order follows input order; failures become error items.
std::vector<BatchItem> verify_batch(const std::vector<Trajectory>& ts, const GuidelineStore& store,
                                    const Judge& judge, const CalibratorPosterior& post, const PipelineConfig& cfg,
                                    std::size_t parallelism, const AnswerPool& pool = {});

}  // namespace glean
