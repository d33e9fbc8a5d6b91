#include "glean/judge.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <optional>
#include <sstream>

#include "glean/parallel.hpp"
#include "glean/rng.hpp"

namespace glean {

void validate(const JudgeBackendConfig& cfg) {
    if (cfg.kind == JudgeKind::remote) {
        if (cfg.endpoint.empty()) throw data_error("remote judge requires an endpoint");
        if (cfg.model_name.empty()) throw data_error("remote judge requires a model name");
    }
    if (cfg.top_logprobs < 2) throw data_error("top_logprobs must be >= 2");
    if (cfg.timeout_ms <= 0) throw data_error("timeout_ms must be positive");
    if (cfg.max_retries < 0) throw data_error("max_retries must be >= 0");
    if (cfg.initial_backoff_ms < 0) throw data_error("initial_backoff_ms must be >= 0");
    if (cfg.max_in_flight < 1) throw data_error("max_in_flight must be >= 1");
}

JudgeBackendConfig with_environment(JudgeBackendConfig cfg) {
    if (cfg.endpoint.empty())
        if (const char* v = std::getenv("GLEAN_JUDGE_ENDPOINT")) cfg.endpoint = v;
    if (cfg.api_key.empty())
        if (const char* v = std::getenv("GLEAN_JUDGE_API_KEY")) cfg.api_key = v;
    return cfg;
}

std::string build_prompt(const JudgeRequest& req) {
    const bool informed = !req.guideline_text.empty();
    std::string p;
    p.reserve(2048 + req.history.size() + req.observation.size() + req.action.size() + req.guideline_text.size());
    if (informed)
        p += "You are a board-certified clinician and a strict guideline compliance evaluator.\n\n";
    else
        p += "You are a board-certified clinician and a strict evaluator.\n\n";
    p += "You will be given:\n"
         "(1) The diagnosis history so far (prior steps),\n"
         "(2) The current step, including the new observation(s) and the decision/action taken";
    if (informed)
        p += ",\n(3) A reference clinical guideline relevant to the proposed diagnosis or management.\n\n";
    else
        p += ".\n\n";
    p += "Your job is NOT to judge the entire final diagnosis. Your job is to judge whether the CURRENT STEP is "
         "clinically appropriate";
    if (informed) p += " and consistent with the guideline";
    p += ", given the available information up to this step.\n\n"
         "Be strict and conservative:\n"
         "- Answer YES only if the current step is clearly supported by the patient information so far";
    if (informed) p += " AND is consistent with the guideline";
    p += ".\n- Answer NO if the step is unsupported, premature, contradicts key facts, ";
    if (informed) p += "violates guideline recommendations, ";
    p += "skips required checks, or is not justified as the next best step.\n\n"
         "Reply with exactly one token: YES or NO.\n\n"
         "Diagnosis so far (prior steps):\n";
    p += req.history.empty() ? std::string("(none)") : req.history;
    p += "\n\nCurrent step:\nObservation(s):\n";
    p += req.observation;
    p += "\n\nRationale & Action:\n";
    p += req.action;
    if (informed) {
        p += "\n\nReference guideline:\n";
        p += req.guideline_text;
    }
    p += "\n\nTask: Is the CURRENT STEP appropriate";
    if (informed) p += " and guideline-consistent";
    p += " given the patient information so far?\nReply with YES or NO only.";
    return p;
}

double yes_probability(double logprob_yes, double logprob_no) { return sigmoid(logprob_yes - logprob_no); }

double score_from_token_logprobs(double logprob_yes, double logprob_no) {
    if (!std::isfinite(logprob_yes) || !std::isfinite(logprob_no))
        throw data_error("token log-probabilities must be finite");
    return clamp_probability(yes_probability(logprob_yes, logprob_no));
}

namespace {

std::string describe(const std::vector<TokenLogprob>& tokens) {
    std::ostringstream os;
    os << "unresolvable judgment: no YES/NO token among [";
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        if (i) os << ", ";
        os << '"' << tokens[i].token << "\": " << tokens[i].logprob;
    }
    os << ']';
    return os.str();
}

enum class Label { yes, no, other };

Label classify(std::string_view token) {
    std::size_t i = 0;
    while (i < token.size() && std::isspace(static_cast<unsigned char>(token[i]))) ++i;
    token.remove_prefix(i);
    // Only the three spellings YES/Yes/yes (and NO/No/no) count; mixed case like yEs does not.
    auto accepted = [&](std::string_view upper, std::string_view title, std::string_view low) {
        return token == upper || token == title || token == low;
    };
    if (accepted("YES", "Yes", "yes")) return Label::yes;
    if (accepted("NO", "No", "no")) return Label::no;
    return Label::other;
}

double log_add(double a, double b) {
    if (a == -std::numeric_limits<double>::infinity()) return b;
    const double hi = std::max(a, b), lo = std::min(a, b);
    return hi + std::log1p(std::exp(lo - hi));
}

}  // namespace

UnresolvableJudgment::UnresolvableJudgment(std::vector<TokenLogprob> tokens)
    : Error(ErrorKind::remote, describe(tokens)), tokens_(std::move(tokens)) {}

double score_from_top_logprobs(std::span<const TokenLogprob> tokens) {
    constexpr double none = -std::numeric_limits<double>::infinity();
    double yes = none, no = none;
    double floor = std::numeric_limits<double>::infinity();
    for (const auto& t : tokens) {
        if (!std::isfinite(t.logprob)) continue;
        floor = std::min(floor, t.logprob);
        switch (classify(t.token)) {
            case Label::yes: yes = log_add(yes, t.logprob); break;
            case Label::no: no = log_add(no, t.logprob); break;
            case Label::other: break;
        }
    }
    if (yes == none && no == none) throw UnresolvableJudgment({tokens.begin(), tokens.end()});
    if (yes == none) yes = floor;
    if (no == none) no = floor;
    return score_from_token_logprobs(yes, no);
}

std::string guideline_marker(const std::string& guideline_id) { return "[ref:" + guideline_id + "]"; }

std::string score_table_marker(const std::map<std::string, double>& scores) {
    std::string out = "[scores ";
    bool first = true;
    char buf[32];
    for (const auto& [id, s] : scores) {
        if (!first) out += ';';
        first = false;
        std::snprintf(buf, sizeof buf, "%.17g", s);
        out += id + "=" + buf;
    }
    out += ']';
    return out;
}

namespace {

std::optional<double> tabled_score(const JudgeRequest& req) {
    const auto ref = req.guideline_text.find("[ref:");
    if (ref == std::string::npos) return std::nullopt;
    const auto ref_end = req.guideline_text.find(']', ref);
    if (ref_end == std::string::npos) return std::nullopt;
    const std::string id = req.guideline_text.substr(ref + 5, ref_end - ref - 5);

    const auto table = req.action.find("[scores ");
    if (table == std::string::npos) return std::nullopt;
    const auto table_end = req.action.find(']', table);
    if (table_end == std::string::npos) return std::nullopt;
    std::string_view body(req.action);
    body = body.substr(table + 8, table_end - table - 8);
    while (!body.empty()) {
        const auto semi = body.find(';');
        const std::string_view entry = body.substr(0, semi);
        const auto eq = entry.find('=');
        if (eq != std::string_view::npos && entry.substr(0, eq) == id)
            return clamp_probability(std::strtod(std::string(entry.substr(eq + 1)).c_str(), nullptr));
        if (semi == std::string_view::npos) break;
        body.remove_prefix(semi + 1);
    }
    return std::nullopt;
}

}  // namespace

double MockJudge::score(const JudgeRequest& req) const {
    if (auto s = tabled_score(req)) return *s;
    std::uint64_t h = fnv1a(req.history);
    h = fnv1a("\x1f", h);
    h = fnv1a(req.observation, h);
    h = fnv1a("\x1f", h);
    h = fnv1a(req.action, h);
    h = fnv1a("\x1f", h);
    h = fnv1a(req.guideline_text, h);
    const std::uint64_t z = mix64(h ^ mix64(seed_ + 0x9E3779B97F4A7C15ULL));
    const double u = static_cast<double>(z >> 11) * 0x1.0p-53;
    return 0.05 + 0.9 * u;
}

std::unique_ptr<Judge> make_judge(const JudgeBackendConfig& cfg) {
    validate(cfg);
    if (cfg.kind == JudgeKind::mock) return std::make_unique<MockJudge>(cfg.mock_seed);
    return std::make_unique<RemoteJudge>(cfg);
}

double judge_step(const JudgeRequest& req, const JudgeBackendConfig& cfg) { return make_judge(cfg)->score(req); }

JudgeRequest make_request(const Trajectory& traj, std::size_t t, const Guideline* guideline) {
    JudgeRequest req;
    req.history = render_history(traj, t);
    req.observation = traj.steps.at(t).observation;
    req.action = traj.steps.at(t).action;
    if (guideline) req.guideline_text = render_guideline(*guideline);
    req.answer = traj.answer;
    return req;
}

RatingMatrix judge_trajectory(const Trajectory& traj, std::span<const Guideline> guidelines, const Judge& judge,
                              std::size_t parallelism) {
    if (guidelines.empty()) throw data_error("judge_trajectory needs at least one guideline");
    const std::size_t rows = traj.length(), cols = guidelines.size();
    RatingMatrix m;
    m.trajectory_id = traj.id;
    for (const auto& g : guidelines) m.guideline_ids.push_back(g.id);
    m.scores.assign(rows, std::vector<double>(cols, 0.5));

    parallel_for(rows * cols, parallelism, [&](std::size_t cell) {
        const std::size_t t = cell / cols, g = cell % cols;
        try {
            m.scores[t][g] = clamp_probability(judge.score(make_request(traj, t, &guidelines[g])));
        } catch (const Error& e) {
            throw Error(e.kind(), "trajectory " + traj.id + ": judging step " + std::to_string(t + 1) +
                                      " against guideline " + guidelines[g].id + " failed: " + e.what());
        }
    });
    return m;
}

RatingMatrix judge_trajectory(const Trajectory& traj, std::span<const Guideline> guidelines,
                              const JudgeBackendConfig& cfg, std::size_t parallelism) {
    auto judge = make_judge(cfg);
    return judge_trajectory(traj, guidelines, *judge, parallelism);
}

}  // namespace glean
