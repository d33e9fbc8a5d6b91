#pragma once

#include <string>

#include "json.hpp"

namespace glean::detail {

struct HttpOptions {
    std::string api_key;
    int timeout_ms = 30000;
    int max_retries = 3;
    int initial_backoff_ms = 250;
};

// POSTs `body` to base_url + path and returns the parsed JSON response.
// Transport errors, timeouts, 429 and 5xx are retried with exponential
// backoff; other HTTP errors fail immediately. Throws glean::Error(remote).
nlohmann::json post_json(const std::string& base_url, const std::string& path, const nlohmann::json& body,
                         const HttpOptions& opts);

}  // namespace glean::detail
