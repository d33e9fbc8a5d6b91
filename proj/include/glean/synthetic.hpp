#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <vector>

#include "glean/core.hpp"
#include "glean/pipeline.hpp"
#include "glean/retrieval.hpp"

namespace glean {

// Generative model: each trajectory draws a latent quality q ~ N(0, 1) and a
// target evidence S = evidence_mean + evidence_sd * q, splits S into per-step
// logits under the beta-discounted sum, and draws its label from
// sigmoid(true_slope * S + true_intercept).
struct SyntheticSpec {
    int n_cases = 100;
    int min_steps = 3;
    int max_steps = 6;
    double true_slope = 1.5;
    double true_intercept = -0.2;
    double rating_noise_sd = 0.0;    // additive logit noise on informative columns
    double coverage_gap_rate = 0.0;  // share of columns (or, for the active scenario, trajectories) that are noise
    std::uint64_t seed = 0;

    int candidates_per_case = 1;
    int answers_per_case = 3;  // distinct diagnoses available within a case
    double evidence_mean = 0.0;
    double evidence_sd = 2.0;
    double step_jitter_sd = 0.5;
    double beta = 0.5;  // must match the pipeline's discount
    std::size_t k = 3;
    std::size_t n_extra = 1;

    // Uninformative columns draw scores uniformly from [gap_low, gap_high].
    double gap_low = 0.05;
    double gap_high = 0.95;
    // Active scenario, gap trajectories: competitor logit is -competitor_strength * step logit.
    double competitor_strength = 2.0;
};

void validate(const SyntheticSpec& spec);

struct SyntheticDataset {
    std::vector<Trajectory> trajectories;
    std::vector<RatingMatrix> ratings;  // passive top-k columns, as the mock judge reproduces them
    std::vector<Guideline> guidelines;
    std::shared_ptr<const GuidelineStore> store;
    AnswerPool answer_pool;                // case_id -> every diagnosis of that case
    std::vector<double> reference_evidence;  // clean S_T the label was drawn from
    std::vector<double> true_probability;    // sigmoid(a* S_T + c*)
    bool active_scenario = false;
};

// Standard dataset: gap columns are chosen independently per column and
// competitive guidelines score a neutral 0.5.
SyntheticDataset generate(const SyntheticSpec& spec);

// A coverage_gap_rate share of trajectories get uninformative passive columns
// while expansion columns stay clean and competitive columns anti-correlate
// with step quality, so active verification can recover the lost signal.
// Other trajectories see neutral competitors, leaving them unchanged by it.
SyntheticDataset generate_active_scenario(const SyntheticSpec& spec);

// trajectories.jsonl, guidelines.jsonl, ratings.jsonl, answer_pool.jsonl, manifest.json
void write_dataset(const std::filesystem::path& dir, const SyntheticDataset& data, const SyntheticSpec& spec);

AnswerPool load_answer_pool(const std::filesystem::path& path);

}  // namespace glean
