#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>

#include "graphmind/explorer.hpp"
#include "graphmind/llm.hpp"

namespace graphmind {

// Flat dotted-key config file: `key = value` lines, '#' comments, blank lines
// ignored. Values are taken verbatim after trimming.
class ConfigFile {
public:
    ConfigFile() = default;
    static ConfigFile load(const std::string& path);
    static ConfigFile parse(const std::string& text, const std::string& origin = "<string>");

    bool has(const std::string& key) const;
    std::string get(const std::string& key, const std::string& fallback) const;
    double get_double(const std::string& key, double fallback) const;
    std::int64_t get_int(const std::string& key, std::int64_t fallback) const;
    bool get_bool(const std::string& key, bool fallback) const;

    void set(const std::string& key, std::string value);

private:
    std::map<std::string, std::string> values_;
};

enum class LlmMode { live, record, replay };

LlmMode llm_mode_from_name(const std::string& name);

struct RunConfig {
    std::string kg_path;
    TripleFormat kg_format = TripleFormat::csv;
    ExplorationConfig explore;
    std::string template_dir;      // profile directory of prompt templates
    std::string exemplar_path;     // entity-extraction exemplars (JSONL)
    CompletionParams completion;
    LlmMode mode = LlmMode::replay;
    std::string endpoint;
    std::string transcript_path;
    std::string output_dir;
    bool include_p1 = true;
    double min_similarity = 0.0;
    std::size_t retrieval_top_k = 3;
    std::size_t workers = 1;
    bool anti_tie = false;

    // Flags override config; GRAPHMIND_API_KEY is read from the environment
    // by the caller, never from the file.
    static RunConfig from_config(const ConfigFile& file);
    void validate() const;
};

// Builds the client named by mode; replay requires transcript_path.
std::unique_ptr<LlmClient> make_client(const RunConfig& cfg);

} // namespace graphmind
