#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

namespace graphmind {

enum class Role { system, user, assistant };

struct ChatMessage {
    Role role;
    std::string content;

    friend bool operator==(const ChatMessage&, const ChatMessage&) = default;
};

std::string role_name(Role role);

struct CompletionParams {
    std::string model_id = "gpt-3.5-turbo";
    double temperature = 0.0;
    std::optional<int> max_output_tokens;
};

// Stable across runs and platforms; order- and whitespace-sensitive over
// messages and params.
std::string request_digest(const std::vector<ChatMessage>& messages,
                           const CompletionParams& params);

class LlmClient {
public:
    virtual ~LlmClient() = default;

    // Returns the first choice's text. Throws TransportError (or subclasses)
    // on failure; messages must be nonempty.
    virtual std::string complete(const std::vector<ChatMessage>& messages,
                                 const CompletionParams& params) = 0;

    std::uint64_t calls_made() const { return calls_made_; }

protected:
    std::uint64_t calls_made_ = 0;
};

// Persisted map from request digest to recorded response (JSONL).
class Transcript {
public:
    Transcript() = default;

    static Transcript load(const std::string& path);
    void save(const std::string& path) const;

    void add(const std::string& digest, const std::vector<ChatMessage>& messages,
             const CompletionParams& params, const std::string& response);
    std::optional<std::string> lookup(const std::string& digest) const;
    std::size_t size() const { return order_.size(); }

private:
    struct Entry {
        std::string request_json;
        std::string response;
    };
    std::unordered_map<std::string, Entry> entries_;
    std::vector<std::string> order_;
};

// Serves recorded responses only; performs no network operations by
// construction. Unknown digests raise MissingRecordingError.
class ReplayClient : public LlmClient {
public:
    explicit ReplayClient(Transcript transcript) : transcript_(std::move(transcript)) {}

    static std::unique_ptr<ReplayClient> open(const std::string& transcript_path);

    std::string complete(const std::vector<ChatMessage>& messages,
                         const CompletionParams& params) override;

private:
    Transcript transcript_;
};

// Wraps a live client: known digests are served from the transcript without
// touching the inner client; new responses are appended to the transcript
// file as they arrive.
class RecordingClient : public LlmClient {
public:
    RecordingClient(std::unique_ptr<LlmClient> inner, std::string transcript_path);

    std::string complete(const std::vector<ChatMessage>& messages,
                         const CompletionParams& params) override;

    const Transcript& transcript() const { return transcript_; }

private:
    std::unique_ptr<LlmClient> inner_;
    std::string path_;
    Transcript transcript_;
};

struct HttpClientConfig {
    std::string endpoint;             // e.g. http://localhost:8089/v1/chat/completions
    std::string api_key;              // from GRAPHMIND_API_KEY, never config files
    int max_retries = 3;
    int initial_backoff_ms = 250;     // doubles per retry, capped
    int max_backoff_ms = 4000;
    int timeout_seconds = 120;
    int max_in_flight = 4;
};

// POSTs chat-completions JSON ({"model","messages","temperature"}) and reads
// choices[0].message.content. Transient failures and 429/5xx responses are
// retried with capped exponential backoff.
class HttpChatClient : public LlmClient {
public:
    explicit HttpChatClient(HttpClientConfig config);
    ~HttpChatClient() override;

    std::string complete(const std::vector<ChatMessage>& messages,
                         const CompletionParams& params) override;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

} // namespace graphmind
