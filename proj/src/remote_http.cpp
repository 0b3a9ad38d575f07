// HTTP transport for the remote embedding and chat providers.

#include "ctxsql/embedding.hpp"
#include "ctxsql/llm.hpp"

#include <httplib.h>
#include <json.hpp>

#include <chrono>
#include <cstdlib>

namespace ctxsql {

using nlohmann::json;

namespace {

struct SplitUrl {
    std::string scheme_host_port;
    std::string path_prefix;
};

SplitUrl split_base_url(const std::string& base) {
    const std::size_t scheme_end = base.find("://");
    const std::size_t host_begin = scheme_end == std::string::npos ? 0 : scheme_end + 3;
    const std::size_t path_begin = base.find('/', host_begin);
    SplitUrl out;
    if (path_begin == std::string::npos) {
        out.scheme_host_port = base;
    } else {
        out.scheme_host_port = base.substr(0, path_begin);
        out.path_prefix = base.substr(path_begin);
    }
    while (!out.path_prefix.empty() && out.path_prefix.back() == '/') {
        out.path_prefix.pop_back();
    }
    return out;
}

std::optional<double> parse_retry_after(const httplib::Result& res) {
    if (!res->has_header("Retry-After")) {
        return std::nullopt;
    }
    const std::string value = res->get_header_value("Retry-After");
    char* end = nullptr;
    const double seconds = std::strtod(value.c_str(), &end);
    if (end == value.c_str() || seconds < 0) {
        return std::nullopt;
    }
    return seconds;
}

std::string error_detail(const std::string& body) {
    try {
        const json parsed = json::parse(body);
        if (parsed.contains("error")) {
            const json& e = parsed.at("error");
            if (e.is_object() && e.contains("message") && e.at("message").is_string()) {
                return e.at("message").get<std::string>();
            }
            return e.dump();
        }
    } catch (const json::exception&) {
    }
    return body.substr(0, 200);
}

json post_json(const RemoteEndpoint& endpoint, const std::string& path, const json& body) {
    const SplitUrl url = split_base_url(endpoint.base_url);
    httplib::Client client(url.scheme_host_port);
    const auto timeout = std::chrono::duration_cast<std::chrono::seconds>(endpoint.timeout).count();
    client.set_connection_timeout(static_cast<time_t>(timeout), 0);
    client.set_read_timeout(static_cast<time_t>(timeout), 0);
    client.set_write_timeout(static_cast<time_t>(timeout), 0);

    httplib::Headers headers;
    if (!endpoint.api_key.empty()) {
        headers.emplace("Authorization", "Bearer " + endpoint.api_key);
    }
    const std::string target = url.path_prefix + path;
    auto res = client.Post(target, headers, body.dump(), "application/json");
    if (!res) {
        throw ProviderError(ProviderError::Kind::transport,
                            "transport error calling " + endpoint.base_url + path + ": " + httplib::to_string(res.error()));
    }
    const int status = res->status;
    if (status == 429) {
        throw ProviderError(ProviderError::Kind::rate_limit, "rate limited: " + error_detail(res->body), status,
                            parse_retry_after(res));
    }
    if (status == 401 || status == 403) {
        throw ProviderError(ProviderError::Kind::auth, "authentication failed: " + error_detail(res->body), status);
    }
    if (status < 200 || status >= 300) {
        throw ProviderError(ProviderError::Kind::http,
                            "HTTP " + std::to_string(status) + " from " + target + ": " + error_detail(res->body), status,
                            parse_retry_after(res));
    }
    try {
        return json::parse(res->body);
    } catch (const json::parse_error& e) {
        throw ProviderError(ProviderError::Kind::bad_response, std::string("response is not JSON: ") + e.what(), status);
    }
}

}  // namespace

RemoteEmbedder::RemoteEmbedder(RemoteEndpoint endpoint, std::size_t batch_size)
    : endpoint_(std::move(endpoint)), batch_size_(batch_size == 0 ? 1 : batch_size) {}

std::vector<EmbeddingVector> RemoteEmbedder::embed(const std::vector<std::string>& texts) const {
    const std::size_t batches = (texts.size() + batch_size_ - 1) / batch_size_;
    std::vector<std::vector<EmbeddingVector>> results(batches);

    parallel_for(batches, endpoint_.max_in_flight, [&](std::size_t b) {
        const std::size_t first = b * batch_size_;
        const std::size_t last = std::min(texts.size(), first + batch_size_);
        json input = json::array();
        for (std::size_t i = first; i < last; ++i) {
            input.push_back(texts[i]);
        }
        const json reply = post_json(endpoint_, "/embeddings", json{{"model", endpoint_.model}, {"input", input}});
        if (!reply.contains("data") || !reply.at("data").is_array() || reply.at("data").size() != last - first) {
            throw ProviderError(ProviderError::Kind::bad_response, "embeddings response has wrong 'data' shape");
        }
        std::vector<EmbeddingVector> batch(last - first);
        for (std::size_t j = 0; j < reply.at("data").size(); ++j) {
            const json& item = reply.at("data")[j];
            const std::size_t slot = item.contains("index") ? item.at("index").get<std::size_t>() : j;
            if (slot >= batch.size() || !item.contains("embedding")) {
                throw ProviderError(ProviderError::Kind::bad_response, "embeddings response item malformed");
            }
            batch[slot].values = item.at("embedding").get<std::vector<double>>();
        }
        results[b] = std::move(batch);
    });

    std::vector<EmbeddingVector> out;
    out.reserve(texts.size());
    for (auto& batch : results) {
        for (auto& v : batch) {
            out.push_back(std::move(v));
        }
    }
    return out;
}

RemoteChatProvider::RemoteChatProvider(RemoteEndpoint endpoint) : endpoint_(std::move(endpoint)) {}

LlmResponse RemoteChatProvider::complete(const CompletionRequest& request) const {
    const json body{
        {"model", endpoint_.model},
        {"temperature", kTemperature},
        {"messages",
         json::array({json{{"role", "system"}, {"content", request.bundle.system_text}},
                      json{{"role", "user"}, {"content", request.bundle.render_user_message()}}})},
    };

    const auto started = std::chrono::steady_clock::now();
    const json reply = post_json(endpoint_, "/chat/completions", body);
    const auto elapsed =
        std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - started);

    try {
        LlmResponse response;
        response.provider_id = id();
        response.latency = elapsed;
        const json& content = reply.at("choices").at(0).at("message").at("content");
        response.raw_text = content.is_string() ? content.get<std::string>() : std::string{};
        if (reply.contains("usage") && reply.at("usage").is_object()) {
            const json& u = reply.at("usage");
            response.token_usage = TokenUsage{u.value("prompt_tokens", std::uint64_t{0}),
                                              u.value("completion_tokens", std::uint64_t{0}),
                                              u.value("total_tokens", std::uint64_t{0})};
        }
        if (response.raw_text.empty()) {
            throw ProviderError(ProviderError::Kind::bad_response, "chat completion returned no content");
        }
        return response;
    } catch (const json::exception& e) {
        throw ProviderError(ProviderError::Kind::bad_response,
                            std::string("unexpected chat completion response: ") + e.what());
    }
}

}  // namespace ctxsql
