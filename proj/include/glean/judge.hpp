#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "glean/core.hpp"
#include "glean/error.hpp"

namespace glean {

struct JudgeRequest {
    std::string history;  // steps 1..t-1, empty only for the first step
    std::string observation;
    std::string action;
    std::string guideline_text;  // empty selects the uninformed prompt
    std::string answer;
};

enum class JudgeKind { mock, remote };

struct JudgeBackendConfig {
    JudgeKind kind = JudgeKind::mock;
    std::string endpoint;  // base URL such as http://host:8000/v1
    std::string model_name;
    std::string api_key;
    int top_logprobs = 10;
    int timeout_ms = 30000;
    int max_retries = 3;
    int initial_backoff_ms = 250;
    int max_in_flight = 8;
    std::uint64_t mock_seed = 0;
};

void validate(const JudgeBackendConfig& cfg);

// Fills endpoint and api key from GLEAN_JUDGE_ENDPOINT / GLEAN_JUDGE_API_KEY
// when the config leaves them empty.
JudgeBackendConfig with_environment(JudgeBackendConfig cfg);

std::string build_prompt(const JudgeRequest& req);

// P(YES) / (P(YES) + P(NO)) from two log-probabilities, unclamped.
double yes_probability(double logprob_yes, double logprob_no);

// yes_probability clamped to the score range. Throws on non-finite input.
double score_from_token_logprobs(double logprob_yes, double logprob_no);

struct TokenLogprob {
    std::string token;
    double logprob = 0.0;
};

// Neither a YES nor a NO variant was present among the returned tokens.
class UnresolvableJudgment : public Error {
public:
    explicit UnresolvableJudgment(std::vector<TokenLogprob> tokens);
    const std::vector<TokenLogprob>& tokens() const noexcept { return tokens_; }

private:
    std::vector<TokenLogprob> tokens_;
};

// Case- and leading-whitespace-insensitive YES/NO matching; repeated
// variants are merged with log-sum-exp. A label missing from the list gets
// the smallest observed log-probability as an upper bound.
double score_from_top_logprobs(std::span<const TokenLogprob> tokens);

// Thread-safe step scorer.
class Judge {
public:
    virtual ~Judge() = default;
    virtual double score(const JudgeRequest& req) const = 0;
};

// Deterministic offline judge. Guideline text may carry a "[ref:<id>]" tag and
// the step action a "[scores <id>=<p>;...]" table; when both resolve, the
// tabled score is returned. Otherwise the score is a seeded hash of the
// request mapped onto [0.05, 0.95].
class MockJudge : public Judge {
public:
    explicit MockJudge(std::uint64_t seed = 0) : seed_(seed) {}
    double score(const JudgeRequest& req) const override;

private:
    std::uint64_t seed_;
};

std::string guideline_marker(const std::string& guideline_id);
std::string score_table_marker(const std::map<std::string, double>& scores);

class RemoteJudge : public Judge {
public:
    explicit RemoteJudge(JudgeBackendConfig cfg);
    ~RemoteJudge() override;
    double score(const JudgeRequest& req) const override;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

std::unique_ptr<Judge> make_judge(const JudgeBackendConfig& cfg);

double judge_step(const JudgeRequest& req, const JudgeBackendConfig& cfg);

// Builds the request for step `t` (0-based) against one guideline.
JudgeRequest make_request(const Trajectory& traj, std::size_t t, const Guideline* guideline);

// T x |guidelines| matrix. Cells are independent and fan out over
// `parallelism` workers; the result does not depend on scheduling.
RatingMatrix judge_trajectory(const Trajectory& traj, std::span<const Guideline> guidelines, const Judge& judge,
                              std::size_t parallelism = 1);

RatingMatrix judge_trajectory(const Trajectory& traj, std::span<const Guideline> guidelines,
                              const JudgeBackendConfig& cfg, std::size_t parallelism = 1);

}  // namespace glean
