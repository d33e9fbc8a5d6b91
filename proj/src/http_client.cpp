#include "http_client.hpp"

#include <chrono>
#include <thread>

#include "httplib.h"

#include "glean/error.hpp"

namespace glean::detail {

namespace {

struct SplitUrl {
    std::string origin;  // scheme://host[:port]
    std::string path;    // leading slash, no trailing slash
};

SplitUrl split_url(const std::string& url) {
    const auto scheme_end = url.find("://");
    if (scheme_end == std::string::npos) throw remote_error("endpoint must include a scheme: " + url);
    const auto path_start = url.find('/', scheme_end + 3);
    SplitUrl out;
    out.origin = url.substr(0, path_start);
    if (path_start != std::string::npos) out.path = url.substr(path_start);
    while (!out.path.empty() && out.path.back() == '/') out.path.pop_back();
    return out;
}

}  // namespace

nlohmann::json post_json(const std::string& base_url, const std::string& path, const nlohmann::json& body,
                         const HttpOptions& opts) {
    const SplitUrl url = split_url(base_url);
    std::string full_path = url.path;
    if (full_path.size() < path.size() || full_path.compare(full_path.size() - path.size(), path.size(), path) != 0)
        full_path += path;

    httplib::Client client(url.origin);
    const auto timeout = std::chrono::milliseconds(opts.timeout_ms);
    client.set_connection_timeout(timeout);
    client.set_read_timeout(timeout);
    client.set_write_timeout(timeout);

    httplib::Headers headers;
    if (!opts.api_key.empty()) headers.emplace("Authorization", "Bearer " + opts.api_key);
    const std::string payload = body.dump();

    std::string last_failure;
    for (int attempt = 0; attempt <= opts.max_retries; ++attempt) {
        if (attempt > 0) {
            const auto delay = std::chrono::milliseconds(static_cast<long long>(opts.initial_backoff_ms) << (attempt - 1));
            std::this_thread::sleep_for(delay);
        }
        auto res = client.Post(full_path, headers, payload, "application/json");
        if (!res) {
            last_failure = httplib::to_string(res.error());
            continue;
        }
        if (res->status == 429 || res->status >= 500) {
            last_failure = "HTTP " + std::to_string(res->status);
            continue;
        }
        if (res->status < 200 || res->status >= 300)
            throw remote_error(url.origin + full_path + " returned HTTP " + std::to_string(res->status) + ": " +
                               res->body.substr(0, 200));
        try {
            return nlohmann::json::parse(res->body);
        } catch (const nlohmann::json::exception& e) {
            throw remote_error(url.origin + full_path + " returned malformed JSON: " + e.what());
        }
    }
    throw remote_error(url.origin + full_path + " failed after " + std::to_string(opts.max_retries + 1) +
                       " attempts: " + last_failure);
}

}  // namespace glean::detail
