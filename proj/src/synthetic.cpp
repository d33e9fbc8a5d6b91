#include "glean/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "glean/error.hpp"
#include "glean/io.hpp"
#include "glean/judge.hpp"
#include "glean/rng.hpp"

namespace glean {

void validate(const SyntheticSpec& spec) {
    if (spec.n_cases < 1) throw data_error("n_cases must be >= 1");
    if (spec.min_steps < 1 || spec.max_steps < spec.min_steps) throw data_error("invalid steps_per_trajectory range");
    if (!(spec.rating_noise_sd >= 0.0)) throw data_error("rating_noise_sd must be >= 0");
    if (!(spec.coverage_gap_rate >= 0.0 && spec.coverage_gap_rate <= 1.0))
        throw data_error("coverage_gap_rate must lie in [0, 1]");
    if (spec.candidates_per_case < 1) throw data_error("candidates_per_case must be >= 1");
    if (spec.answers_per_case < 1) throw data_error("answers_per_case must be >= 1");
    if (!(spec.evidence_sd >= 0.0)) throw data_error("evidence_sd must be >= 0");
    if (!(spec.beta >= 0.0 && spec.beta <= 1.0)) throw data_error("beta must lie in [0, 1]");
    if (spec.k < 1 || spec.n_extra < 1) throw data_error("k and n_extra must be >= 1");
    if (!(spec.gap_low > 0.0 && spec.gap_low <= spec.gap_high && spec.gap_high < 1.0))
        throw data_error("gap score range must satisfy 0 < gap_low <= gap_high < 1");
}

namespace {

constexpr const char* kSyllables[] = {"ba", "ke", "lo", "mi", "nu", "ra", "si", "to", "vu", "ze"};
constexpr const char* kTopics[] = {"management protocol", "diagnostic criteria", "imaging recommendations",
                                   "laboratory workup",   "treatment pathway",   "monitoring standards",
                                   "referral guidance",   "followup schedule"};

// Distinct diagnosis-like token per index; never collides with title words.
std::string pseudo_word(int index) {
    std::string w;
    int v = index;
    for (int i = 0; i < 4; ++i) {
        w += kSyllables[v % 10];
        v /= 10;
    }
    return w + "itis" + (index >= 10000 ? std::to_string(index / 10000) : std::string());
}

std::string case_id_of(int c) { return "case-" + std::to_string(c); }

struct Layout {
    std::vector<std::vector<std::string>> answers;  // per case
    std::map<std::string, std::vector<std::string>> ranking;  // answer -> its guideline ids, retrieve order
};

double discount_weight(double beta, int lag) { return lag == 0 ? 1.0 : std::pow(beta, lag); }

SyntheticDataset generate_impl(const SyntheticSpec& spec, bool active) {
    validate(spec);
    const std::size_t per_answer = spec.k + spec.n_extra + 1;
    if (per_answer > std::size(kTopics)) throw data_error("k + n_extra too large for the synthetic corpus");

    SyntheticDataset out;
    out.active_scenario = active;
    Layout layout;
    layout.answers.resize(spec.n_cases);
    for (int c = 0; c < spec.n_cases; ++c) {
        for (int a = 0; a < spec.answers_per_case; ++a) {
            const std::string word = pseudo_word(c * spec.answers_per_case + a);
            layout.answers[c].push_back(word);
            for (std::size_t j = 0; j < per_answer; ++j) {
                Guideline g;
                g.id = "syn-" + word + "-" + std::to_string(j);
                g.title = word + " " + kTopics[j];
                g.content = "Synthetic protocol " + std::to_string(j) + " for " + word + ". " + guideline_marker(g.id);
                out.guidelines.push_back(std::move(g));
            }
        }
        out.answer_pool[case_id_of(c)] = layout.answers[c];
    }
    out.store = std::make_shared<GuidelineStore>(out.guidelines, std::make_shared<HashedEmbedder>());
    for (const auto& answers : layout.answers)
        for (const auto& word : answers) layout.ranking[word] = retrieve(*out.store, word, per_answer).ranked_ids;

    Rng rng(spec.seed);
    for (int c = 0; c < spec.n_cases; ++c) {
        const auto& answers = layout.answers[c];
        for (int j = 0; j < spec.candidates_per_case; ++j) {
            Trajectory t;
            t.id = "syn-c" + std::to_string(c) + "-t" + std::to_string(j);
            t.case_id = case_id_of(c);
            const std::string& answer = answers[rng.below(answers.size())];
            t.answer = answer;
            const int steps = spec.min_steps + static_cast<int>(rng.below(spec.max_steps - spec.min_steps + 1));

            // Split the target evidence into per-step logits with zero-weighted-sum jitter.
            const double target = spec.evidence_mean + spec.evidence_sd * rng.normal();
            std::vector<double> weights(steps), jitter(steps);
            double wsum = 0.0, jsum = 0.0;
            for (int s = 0; s < steps; ++s) {
                weights[s] = discount_weight(spec.beta, steps - 1 - s);
                jitter[s] = spec.step_jitter_sd * rng.normal();
                wsum += weights[s];
                jsum += weights[s] * jitter[s];
            }
            std::vector<double> step_logit(steps);
            double realized = 0.0;
            for (int s = 0; s < steps; ++s) {
                const double p = clamp_probability(sigmoid(target / wsum + jitter[s] - jsum / wsum));
                step_logit[s] = logit(p);
                realized = spec.beta * realized + step_logit[s];
            }
            const double truth = sigmoid(spec.true_slope * realized + spec.true_intercept);
            t.label = rng.bernoulli(truth);

            const auto& own = layout.ranking.at(answer);
            std::vector<std::string> competitors;
            for (const auto& other : answers)
                if (other != answer) competitors.push_back(layout.ranking.at(other).front());

            // Which of the own-answer columns carry no signal.
            std::vector<bool> gap(own.size(), false);
            bool gap_trajectory = false;
            if (active) {
                gap_trajectory = rng.bernoulli(spec.coverage_gap_rate);
                for (std::size_t g = 0; g < spec.k && g < own.size(); ++g) gap[g] = gap_trajectory;
            } else {
                for (std::size_t g = 0; g < own.size(); ++g) gap[g] = rng.bernoulli(spec.coverage_gap_rate);
            }

            RatingMatrix m;
            m.trajectory_id = t.id;
            m.guideline_ids.assign(own.begin(), own.begin() + static_cast<std::ptrdiff_t>(spec.k));
            for (int s = 0; s < steps; ++s) {
                std::map<std::string, double> table;
                for (std::size_t g = 0; g < own.size(); ++g) {
                    double score;
                    if (gap[g])
                        score = rng.uniform(spec.gap_low, spec.gap_high);
                    else if (spec.rating_noise_sd > 0.0 && !(active && g >= spec.k))
                        score = sigmoid(step_logit[s] + spec.rating_noise_sd * rng.normal());
                    else
                        score = sigmoid(step_logit[s]);
                    table[own[g]] = clamp_probability(score);
                }
                for (const auto& id : competitors)
                    table[id] = gap_trajectory ? clamp_probability(sigmoid(-spec.competitor_strength * step_logit[s])) : 0.5;

                std::vector<double> row;
                for (const auto& id : m.guideline_ids) row.push_back(table.at(id));
                m.scores.push_back(std::move(row));

                Step step;
                step.index = s + 1;
                step.observation = "Case " + std::to_string(c) + " candidate " + std::to_string(j) +
                                   ": findings recorded at step " + std::to_string(s + 1) + ".";
                step.action = "Proceed with workup step " + std::to_string(s + 1) + ". " + score_table_marker(table);
                t.steps.push_back(std::move(step));
            }

            out.reference_evidence.push_back(realized);
            out.true_probability.push_back(truth);
            out.ratings.push_back(std::move(m));
            out.trajectories.push_back(std::move(t));
        }
    }
    return out;
}

}  // namespace

SyntheticDataset generate(const SyntheticSpec& spec) { return generate_impl(spec, false); }

SyntheticDataset generate_active_scenario(const SyntheticSpec& spec) { return generate_impl(spec, true); }

void write_dataset(const std::filesystem::path& dir, const SyntheticDataset& data, const SyntheticSpec& spec) {
    std::filesystem::create_directories(dir);
    save_trajectories(dir / "trajectories.jsonl", data.trajectories);
    save_guidelines(dir / "guidelines.jsonl", data.guidelines);
    save_ratings(dir / "ratings.jsonl", data.ratings);

    std::vector<json> pool;
    for (const auto& [case_id, answers] : data.answer_pool) pool.push_back(json{{"case_id", case_id}, {"answers", answers}});
    write_jsonl(dir / "answer_pool.jsonl", pool);

    std::vector<json> truth;
    for (std::size_t i = 0; i < data.trajectories.size(); ++i)
        truth.push_back(json{{"trajectory_id", data.trajectories[i].id},
                             {"evidence", data.reference_evidence[i]},
                             {"probability", data.true_probability[i]}});
    write_jsonl(dir / "truth.jsonl", truth);

    const json manifest = {
        {"scenario", data.active_scenario ? "active" : "standard"},
        {"true_slope", spec.true_slope},
        {"true_intercept", spec.true_intercept},
        {"seed", spec.seed},
        {"beta", spec.beta},
        {"n_cases", spec.n_cases},
        {"candidates_per_case", spec.candidates_per_case},
        {"answers_per_case", spec.answers_per_case},
        {"steps_per_trajectory", {spec.min_steps, spec.max_steps}},
        {"rating_noise_sd", spec.rating_noise_sd},
        {"coverage_gap_rate", spec.coverage_gap_rate},
        {"evidence_mean", spec.evidence_mean},
        {"evidence_sd", spec.evidence_sd},
        {"step_jitter_sd", spec.step_jitter_sd},
        {"k", spec.k},
        {"n_extra", spec.n_extra},
        {"gap_range", {spec.gap_low, spec.gap_high}},
        {"competitor_strength", spec.competitor_strength},
        {"clamp", kClampEps},
        {"n_trajectories", data.trajectories.size()},
    };
    write_text_file(dir / "manifest.json", manifest.dump(2) + "\n");
}

AnswerPool load_answer_pool(const std::filesystem::path& path) {
    AnswerPool pool;
    for (const auto& [line_no, value] : read_jsonl(path)) {
        try {
            auto& answers = pool[value.at("case_id").get<std::string>()];
            for (const auto& a : value.at("answers")) answers.push_back(a.get<std::string>());
        } catch (const json::exception& e) {
            throw input_error(path.string() + ":" + std::to_string(line_no) + ": invalid answer pool entry: " + e.what());
        }
    }
    return pool;
}

}  // namespace glean
