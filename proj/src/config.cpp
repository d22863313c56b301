#include "graphmind/config.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "graphmind/errors.hpp"

namespace graphmind {

namespace {

std::string trim_copy(const std::string& text) {
    std::size_t b = text.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    std::size_t e = text.find_last_not_of(" \t\r");
    return text.substr(b, e - b + 1);
}

} // namespace

ConfigFile ConfigFile::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse(buf.str(), path);
}

ConfigFile ConfigFile::parse(const std::string& text, const std::string& origin) {
    ConfigFile cfg;
    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::string stripped = trim_copy(line);
        if (stripped.empty() || stripped[0] == '#') continue;
        std::size_t eq = stripped.find('=');
        if (eq == std::string::npos) {
            throw ConfigError(origin + ":" + std::to_string(line_no) +
                              ": expected `key = value`");
        }
        std::string key = trim_copy(stripped.substr(0, eq));
        std::string value = trim_copy(stripped.substr(eq + 1));
        if (key.empty()) {
            throw ConfigError(origin + ":" + std::to_string(line_no) + ": empty key");
        }
        cfg.values_[key] = value;
    }
    return cfg;
}

bool ConfigFile::has(const std::string& key) const { return values_.count(key) > 0; }

std::string ConfigFile::get(const std::string& key, const std::string& fallback) const {
    auto it = values_.find(key);
    return it == values_.end() ? fallback : it->second;
}

double ConfigFile::get_double(const std::string& key, double fallback) const {
    auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    try {
        return std::stod(it->second);
    } catch (const std::exception&) {
        throw ConfigError("config key " + key + " is not a number: " + it->second);
    }
}

std::int64_t ConfigFile::get_int(const std::string& key, std::int64_t fallback) const {
    auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    try {
        return std::stoll(it->second);
    } catch (const std::exception&) {
        throw ConfigError("config key " + key + " is not an integer: " + it->second);
    }
}

bool ConfigFile::get_bool(const std::string& key, bool fallback) const {
    auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    const std::string& v = it->second;
    if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
    if (v == "false" || v == "0" || v == "no" || v == "off") return false;
    throw ConfigError("config key " + key + " is not a boolean: " + v);
}

void ConfigFile::set(const std::string& key, std::string value) {
    values_[key] = std::move(value);
}

LlmMode llm_mode_from_name(const std::string& name) {
    if (name == "live") return LlmMode::live;
    if (name == "record") return LlmMode::record;
    if (name == "replay") return LlmMode::replay;
    throw ConfigError("llm.mode must be live, record, or replay; got " + name);
}

RunConfig RunConfig::from_config(const ConfigFile& file) {
    RunConfig cfg;
    cfg.kg_path = file.get("kg.path", "");
    std::string format = file.get("kg.format", "csv");
    if (format == "csv") {
        cfg.kg_format = TripleFormat::csv;
    } else if (format == "jsonl") {
        cfg.kg_format = TripleFormat::jsonl;
    } else {
        throw ConfigError("kg.format must be csv or jsonl; got " + format);
    }
    cfg.explore.k = static_cast<std::size_t>(file.get_int("explore.k", 3));
    cfg.explore.tau = file.get_double("explore.tau", 0.6);
    cfg.explore.n_max = static_cast<std::size_t>(file.get_int("explore.n_max", 5));
    cfg.explore.seed = static_cast<std::uint64_t>(file.get_int("explore.seed", 0));
    cfg.template_dir = file.get("templates.dir", "");
    cfg.exemplar_path = file.get("templates.exemplars", "");
    cfg.completion.model_id = file.get("llm.model", "gpt-3.5-turbo");
    cfg.completion.temperature = file.get_double("llm.temperature", 0.0);
    if (file.has("llm.max_output_tokens")) {
        cfg.completion.max_output_tokens =
            static_cast<int>(file.get_int("llm.max_output_tokens", 0));
    }
    cfg.mode = llm_mode_from_name(file.get("llm.mode", "replay"));
    cfg.endpoint = file.get("llm.endpoint", "");
    cfg.transcript_path = file.get("llm.transcript", "");
    cfg.output_dir = file.get("output.dir", ".");
    cfg.include_p1 = file.get_bool("prompt.p1", true);
    cfg.min_similarity = file.get_double("link.min_similarity", 0.0);
    cfg.retrieval_top_k = static_cast<std::size_t>(file.get_int("retrieval.top_k", 3));
    cfg.workers = static_cast<std::size_t>(file.get_int("batch.workers", 1));
    cfg.anti_tie = file.get_bool("eval.anti_tie", false);
    return cfg;
}

void RunConfig::validate() const {
    if (explore.k < 1) throw ConfigError("explore.k must be >= 1");
    if (explore.n_max < 1) throw ConfigError("explore.n_max must be >= 1");
    if (completion.temperature < 0.0) throw ConfigError("llm.temperature must be >= 0");
    if (mode == LlmMode::replay && transcript_path.empty()) {
        throw ConfigError("replay mode requires llm.transcript");
    }
    if (mode == LlmMode::record && transcript_path.empty()) {
        throw ConfigError("record mode requires llm.transcript");
    }
    if ((mode == LlmMode::live || mode == LlmMode::record) && endpoint.empty()) {
        throw ConfigError("live/record mode requires llm.endpoint");
    }
}

std::unique_ptr<LlmClient> make_client(const RunConfig& cfg) {
    cfg.validate();
    switch (cfg.mode) {
        case LlmMode::replay:
            return ReplayClient::open(cfg.transcript_path);
        case LlmMode::record: {
            HttpClientConfig http;
            http.endpoint = cfg.endpoint;
            if (const char* key = std::getenv("GRAPHMIND_API_KEY")) http.api_key = key;
            return std::make_unique<RecordingClient>(std::make_unique<HttpChatClient>(http),
                                                     cfg.transcript_path);
        }
        case LlmMode::live: {
            HttpClientConfig http;
            http.endpoint = cfg.endpoint;
            if (const char* key = std::getenv("GRAPHMIND_API_KEY")) http.api_key = key;
            return std::make_unique<HttpChatClient>(http);
        }
    }
    throw ConfigError("unreachable llm mode");
}

} // namespace graphmind
