#include "graphmind/llm.hpp"

#include <chrono>
#include <fstream>
#include <semaphore>
#include <thread>

#include <json.hpp>

#include "graphmind/errors.hpp"
#include "graphmind/text.hpp"

// httplib is included only here to keep its weight out of the public headers.
#include <httplib.h>

namespace graphmind {

using nlohmann::json;
using ordered_json = nlohmann::ordered_json;

std::string role_name(Role role) {
    switch (role) {
        case Role::system: return "system";
        case Role::user: return "user";
        case Role::assistant: return "assistant";
    }
    return "user";
}

namespace {

ordered_json request_snapshot(const std::vector<ChatMessage>& messages,
                              const CompletionParams& params) {
    ordered_json req;
    req["model"] = params.model_id;
    req["temperature"] = params.temperature;
    if (params.max_output_tokens) {
        req["max_output_tokens"] = *params.max_output_tokens;
    }
    ordered_json msgs = ordered_json::array();
    for (const ChatMessage& m : messages) {
        msgs.push_back({{"role", role_name(m.role)}, {"content", m.content}});
    }
    req["messages"] = std::move(msgs);
    return req;
}

} // namespace

std::string request_digest(const std::vector<ChatMessage>& messages,
                           const CompletionParams& params) {
    return to_hex(fnv1a64(request_snapshot(messages, params).dump()));
}

// ---------------------------------------------------------------------------
// Transcript

Transcript Transcript::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open transcript: " + path);
    Transcript t;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        json obj = json::parse(line, nullptr, false);
        if (obj.is_discarded() || !obj.is_object() || !obj.contains("digest") ||
            !obj.contains("response") || !obj["digest"].is_string() ||
            !obj["response"].is_string()) {
            throw InputDataError("corrupted transcript line " + std::to_string(line_no) + " in " +
                                 path);
        }
        Entry entry;
        entry.response = obj["response"].get<std::string>();
        if (obj.contains("request")) entry.request_json = obj["request"].dump();
        std::string digest = obj["digest"].get<std::string>();
        if (t.entries_.emplace(digest, std::move(entry)).second) {
            t.order_.push_back(digest);
        }
    }
    return t;
}

void Transcript::save(const std::string& path) const {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw ConfigError("cannot write transcript: " + path);
    for (const std::string& digest : order_) {
        const Entry& entry = entries_.at(digest);
        ordered_json line;
        line["digest"] = digest;
        if (!entry.request_json.empty()) {
            line["request"] = json::parse(entry.request_json);
        }
        line["response"] = entry.response;
        out << line.dump() << '\n';
    }
}

void Transcript::add(const std::string& digest, const std::vector<ChatMessage>& messages,
                     const CompletionParams& params, const std::string& response) {
    Entry entry;
    entry.request_json = request_snapshot(messages, params).dump();
    entry.response = response;
    if (entries_.emplace(digest, std::move(entry)).second) {
        order_.push_back(digest);
    }
}

std::optional<std::string> Transcript::lookup(const std::string& digest) const {
    auto it = entries_.find(digest);
    if (it == entries_.end()) return std::nullopt;
    return it->second.response;
}

// ---------------------------------------------------------------------------
// ReplayClient

std::unique_ptr<ReplayClient> ReplayClient::open(const std::string& transcript_path) {
    return std::make_unique<ReplayClient>(Transcript::load(transcript_path));
}

std::string ReplayClient::complete(const std::vector<ChatMessage>& messages,
                                   const CompletionParams& params) {
    if (messages.empty()) throw ContractViolation("complete: empty message list");
    ++calls_made_;
    std::string digest = request_digest(messages, params);
    auto response = transcript_.lookup(digest);
    if (!response) throw MissingRecordingError(digest);
    return *response;
}

// ---------------------------------------------------------------------------
// RecordingClient

RecordingClient::RecordingClient(std::unique_ptr<LlmClient> inner, std::string transcript_path)
    : inner_(std::move(inner)), path_(std::move(transcript_path)) {
    std::ifstream probe(path_);
    if (probe.good()) transcript_ = Transcript::load(path_);
}

std::string RecordingClient::complete(const std::vector<ChatMessage>& messages,
                                      const CompletionParams& params) {
    if (messages.empty()) throw ContractViolation("complete: empty message list");
    ++calls_made_;
    std::string digest = request_digest(messages, params);
    if (auto cached = transcript_.lookup(digest)) return *cached;

    std::string response = inner_->complete(messages, params);
    transcript_.add(digest, messages, params, response);

    std::ofstream out(path_, std::ios::app);
    if (!out) throw ConfigError("cannot append to transcript: " + path_);
    ordered_json line;
    line["digest"] = digest;
    line["request"] = request_snapshot(messages, params);
    line["response"] = response;
    out << line.dump() << '\n';
    out.flush();
    return response;
}

// ---------------------------------------------------------------------------
// HttpChatClient

struct HttpChatClient::Impl {
    explicit Impl(HttpClientConfig cfg)
        : config(std::move(cfg)),
          in_flight(config.max_in_flight > 0 ? config.max_in_flight : 1) {
        parse_endpoint();
    }

    void parse_endpoint() {
        const std::string& url = config.endpoint;
        std::size_t scheme_end = url.find("://");
        if (scheme_end == std::string::npos) {
            throw ConfigError("llm.endpoint must be an http(s) URL: " + url);
        }
        std::size_t host_start = scheme_end + 3;
        std::size_t path_start = url.find('/', host_start);
        if (path_start == std::string::npos) {
            base = url;
            path = "/v1/chat/completions";
        } else {
            base = url.substr(0, path_start);
            path = url.substr(path_start);
        }
    }

    HttpClientConfig config;
    std::string base;
    std::string path;
    std::counting_semaphore<64> in_flight;
};

HttpChatClient::HttpChatClient(HttpClientConfig config)
    : impl_(std::make_unique<Impl>(std::move(config))) {}

HttpChatClient::~HttpChatClient() = default;

std::string HttpChatClient::complete(const std::vector<ChatMessage>& messages,
                                     const CompletionParams& params) {
    if (messages.empty()) throw ContractViolation("complete: empty message list");
    ++calls_made_;

    json body;
    body["model"] = params.model_id;
    body["temperature"] = params.temperature;
    if (params.max_output_tokens) body["max_tokens"] = *params.max_output_tokens;
    json msgs = json::array();
    for (const ChatMessage& m : messages) {
        msgs.push_back({{"role", role_name(m.role)}, {"content", m.content}});
    }
    body["messages"] = std::move(msgs);
    std::string payload = body.dump();

    impl_->in_flight.acquire();
    struct Release {
        std::counting_semaphore<64>& sem;
        ~Release() { sem.release(); }
    } release{impl_->in_flight};

    int backoff_ms = impl_->config.initial_backoff_ms;
    std::string last_error;
    bool rate_limited = false;
    for (int attempt = 0; attempt <= impl_->config.max_retries; ++attempt) {
        if (attempt > 0) {
            std::this_thread::sleep_for(std::chrono::milliseconds(backoff_ms));
            backoff_ms = std::min(backoff_ms * 2, impl_->config.max_backoff_ms);
        }

        httplib::Client client(impl_->base);
        client.set_connection_timeout(impl_->config.timeout_seconds, 0);
        client.set_read_timeout(impl_->config.timeout_seconds, 0);
        httplib::Headers headers;
        if (!impl_->config.api_key.empty()) {
            headers.emplace("Authorization", "Bearer " + impl_->config.api_key);
        }

        auto res = client.Post(impl_->path, headers, payload, "application/json");
        if (!res) {
            last_error = "transport failure: " + httplib::to_string(res.error());
            continue;
        }
        if (res->status == 429) {
            rate_limited = true;
            last_error = "rate limited (HTTP 429)";
            continue;
        }
        if (res->status >= 500) {
            last_error = "server error (HTTP " + std::to_string(res->status) + ")";
            continue;
        }
        if (res->status < 200 || res->status >= 300) {
            std::string excerpt = res->body.substr(0, 300);
            throw TransportError("HTTP " + std::to_string(res->status) + ": " + excerpt);
        }
        json reply = json::parse(res->body, nullptr, false);
        if (reply.is_discarded() || !reply.contains("choices") || reply["choices"].empty() ||
            !reply["choices"][0].contains("message") ||
            !reply["choices"][0]["message"].contains("content")) {
            throw TransportError("malformed completion response: " + res->body.substr(0, 300));
        }
        return reply["choices"][0]["message"]["content"].get<std::string>();
    }
    if (rate_limited) throw RateLimitError(last_error + " after retries");
    throw TransportError(last_error + " after retries");
}

} // namespace graphmind
