#include <semaphore>

#include "glean/judge.hpp"
#include "http_client.hpp"

namespace glean {

namespace {

using json = nlohmann::json;

// Reads the candidate list for the first generated token. Accepts both the
// chat format (logprobs.content[0].top_logprobs as a list) and the legacy
// completions format (logprobs.top_logprobs[0] as a token -> logprob map).
std::vector<TokenLogprob> first_token_candidates(const json& response) {
    std::vector<TokenLogprob> out;
    try {
        const json& choice = response.at("choices").at(0);
        const json& lp = choice.at("logprobs");
        if (lp.contains("content")) {
            for (const auto& c : lp.at("content").at(0).at("top_logprobs"))
                out.push_back({c.at("token").get<std::string>(), c.at("logprob").get<double>()});
        } else {
            for (const auto& [token, value] : lp.at("top_logprobs").at(0).items())
                out.push_back({token, value.get<double>()});
        }
    } catch (const json::exception& e) {
        throw remote_error(std::string("judge response lacks first-token logprobs: ") + e.what());
    }
    return out;
}

}  // namespace

struct RemoteJudge::Impl {
    JudgeBackendConfig cfg;
    detail::HttpOptions http;
    mutable std::counting_semaphore<> in_flight;

    explicit Impl(JudgeBackendConfig c)
        : cfg(std::move(c)),
          http{cfg.api_key, cfg.timeout_ms, cfg.max_retries, cfg.initial_backoff_ms},
          in_flight(cfg.max_in_flight) {}
};

RemoteJudge::RemoteJudge(JudgeBackendConfig cfg) {
    cfg = with_environment(std::move(cfg));
    cfg.kind = JudgeKind::remote;
    validate(cfg);
    impl_ = std::make_unique<Impl>(std::move(cfg));
}

RemoteJudge::~RemoteJudge() = default;

double RemoteJudge::score(const JudgeRequest& req) const {
    const json body = {
        {"model", impl_->cfg.model_name},
        {"messages", json::array({{{"role", "user"}, {"content", build_prompt(req)}}})},
        {"max_tokens", 1},
        {"temperature", 0},
        {"logprobs", true},
        {"top_logprobs", impl_->cfg.top_logprobs},
    };
    json response;
    impl_->in_flight.acquire();
    try {
        response = detail::post_json(impl_->cfg.endpoint, "/chat/completions", body, impl_->http);
    } catch (...) {
        impl_->in_flight.release();
        throw;
    }
    impl_->in_flight.release();
    const auto candidates = first_token_candidates(response);
    return score_from_top_logprobs(candidates);
}

}  // namespace glean
