/*
 * Copyright 2026 The obfusc Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "obfusc/llm_gateway.hpp"

#include <cmath>
#include <cstdlib>
#include <ctime>
#include <regex>
#include <thread>

#include "httplib.h"
#include "json.hpp"
#include "obfusc/hash.hpp"
#include "obfusc/rng.hpp"

namespace obfusc {

using nlohmann::json;

namespace {

struct ParsedUrl {
    std::string scheme_host_port;
    std::string base_path;
};

std::optional<ParsedUrl> parse_url(const std::string& url) {
    static const std::regex re(R"(^(https?)://([A-Za-z0-9.\-\[\]:]+?)(:[0-9]+)?(/.*)?$)");
    std::smatch m;
    if (!std::regex_match(url, m, re)) return std::nullopt;
    ParsedUrl p;
    p.scheme_host_port = m[1].str() + "://" + m[2].str() + m[3].str();
    p.base_path = m[4].str();
    while (!p.base_path.empty() && p.base_path.back() == '/') p.base_path.pop_back();
    return p;
}

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

void LlmConfig::validate() const {
    if (!parse_url(endpoint_url)) throw ConfigError("malformed endpoint_url '" + endpoint_url + "'");
    if (model_name.empty()) throw ConfigError("model_name is required");
    if (!(temperature >= 0) || !std::isfinite(temperature)) throw ConfigError("temperature must be >= 0");
    if (max_output_tokens <= 0) throw ConfigError("max_output_tokens must be positive");
    if (!(timeout_s > 0)) throw ConfigError("timeout must be positive");
    if (max_retries < 0) throw ConfigError("max_retries must be >= 0");
    if (requests_per_minute <= 0) throw ConfigError("requests_per_minute must be positive");
    if (max_concurrency <= 0) throw ConfigError("max_concurrency must be positive");
    if (!(backoff_base_s >= 0) || !(backoff_factor >= 1)) throw ConfigError("invalid backoff settings");
}

std::string_view to_string(BackendKind k) {
    switch (k) {
        case BackendKind::live: return "live";
        case BackendKind::mock: return "mock";
        case BackendKind::cache: return "cache";
    }
    return "live";
}

BackendKind backend_kind_from_string(std::string_view s) {
    if (s == "live") return BackendKind::live;
    if (s == "mock") return BackendKind::mock;
    if (s == "cache") return BackendKind::cache;
    throw DataError("unknown backend kind '" + std::string(s) + "'");
}

std::string record_to_json(const ParaphraseRecord& r) {
    return json{{"doc_id", r.doc_id},
                {"prompt_hash", r.prompt_hash},
                {"output_text", r.output_text},
                {"backend", std::string(to_string(r.backend))},
                {"created_at", r.created_at}}
        .dump(-1, ' ', false, json::error_handler_t::replace);
}

ParaphraseRecord record_from_json(std::string_view line) {
    try {
        const json j = json::parse(line);
        return {j.at("doc_id").get<std::string>(), j.at("prompt_hash").get<std::string>(),
                j.at("output_text").get<std::string>(),
                backend_kind_from_string(j.at("backend").get<std::string>()),
                j.at("created_at").get<std::string>()};
    } catch (const json::exception& e) {
        throw DataError(std::string("malformed paraphrase record: ") + e.what());
    }
}

std::string prompt_hash(std::string_view prompt, std::string_view model_name, double temperature) {
    std::string key(prompt);
    key += '\x1f';
    key += model_name;
    key += '\x1f';
    key += format_double(temperature);
    return sha256_hex(key);
}

std::string model_slug(std::string_view model_name) {
    std::string out;
    bool dash = false;
    for (char c : model_name) {
        const char lc = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
        if ((lc >= 'a' && lc <= 'z') || (lc >= '0' && lc <= '9') || lc == '.' || lc == '_') {
            out.push_back(lc);
            dash = false;
        } else if (!dash && !out.empty()) {
            out.push_back('-');
            dash = true;
        }
    }
    while (!out.empty() && out.back() == '-') out.pop_back();
    return out.empty() ? "model" : out;
}

ParaphraseCache::ParaphraseCache(std::filesystem::path file) : file_(std::move(file)) {
    if (file_.has_parent_path()) std::filesystem::create_directories(file_.parent_path());
    if (std::filesystem::exists(file_)) {
        std::ifstream in(file_, std::ios::binary);
        std::string line;
        std::size_t lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            if (line.empty()) continue;
            try {
                auto r = record_from_json(line);
                entries_.insert_or_assign(r.prompt_hash, std::move(r));
            } catch (const DataError& e) {
                throw DataError(file_.string() + ":" + std::to_string(lineno) + ": " + e.what());
            }
        }
    }
    out_.open(file_, std::ios::binary | std::ios::app);
    if (!out_) throw Error("cannot append to cache " + file_.string());
}

std::optional<ParaphraseRecord> ParaphraseCache::find(const std::string& hash) const {
    std::shared_lock lock(mu_);
    const auto it = entries_.find(hash);
    if (it == entries_.end()) return std::nullopt;
    return it->second;
}

void ParaphraseCache::put(const ParaphraseRecord& record) {
    std::unique_lock lock(mu_);
    if (entries_.contains(record.prompt_hash)) return;
    entries_.emplace(record.prompt_hash, record);
    if (out_.is_open()) {
        out_ << record_to_json(record) << '\n';
        out_.flush();
    }
}

std::size_t ParaphraseCache::size() const {
    std::shared_lock lock(mu_);
    return entries_.size();
}

std::filesystem::path cache_file(const std::filesystem::path& cache_dir, std::string_view model_name) {
    return cache_dir / (model_slug(model_name) + ".jsonl");
}

std::string chat_request_body(const std::string& prompt, const LlmConfig& cfg) {
    return json{{"model", cfg.model_name},
                {"messages", json::array({{{"role", "user"}, {"content", prompt}}})},
                {"temperature", cfg.temperature},
                {"max_tokens", cfg.max_output_tokens}}
        .dump(-1, ' ', false, json::error_handler_t::replace);
}

std::optional<std::string> parse_chat_content(std::string_view body) {
    const json j = json::parse(body, nullptr, false);
    if (j.is_discarded() || !j.is_object()) return std::nullopt;
    const auto choices = j.find("choices");
    if (choices == j.end() || !choices->is_array() || choices->empty()) return std::nullopt;
    const json& first = (*choices)[0];
    if (!first.contains("message") || !first["message"].contains("content")) return std::nullopt;
    const json& content = first["message"]["content"];
    if (content.is_null()) return std::string();
    if (!content.is_string()) return std::nullopt;
    return content.get<std::string>();
}

std::shared_ptr<HttpChatBackend> HttpChatBackend::from_env() {
    const char* key = std::getenv(kApiKeyEnv);
    if (key == nullptr || *key == '\0') {
        throw ConfigError(std::string("live LLM backend needs the ") + kApiKeyEnv +
                          " environment variable");
    }
    return std::make_shared<HttpChatBackend>(key);
}

HttpChatBackend::HttpChatBackend(std::string api_key) : api_key_(std::move(api_key)) {}

ChatReply HttpChatBackend::complete(const std::string& prompt, const LlmConfig& cfg) {
    const auto url = parse_url(cfg.endpoint_url);
    if (!url) throw ConfigError("malformed endpoint_url '" + cfg.endpoint_url + "'");
    httplib::Client client(url->scheme_host_port);
    const auto secs = static_cast<time_t>(cfg.timeout_s);
    const auto usecs = static_cast<time_t>((cfg.timeout_s - static_cast<double>(secs)) * 1e6);
    client.set_connection_timeout(secs, usecs);
    client.set_read_timeout(secs, usecs);
    client.set_write_timeout(secs, usecs);
    httplib::Headers headers{{"Authorization", "Bearer " + api_key_}};
    auto res = client.Post(url->base_path + "/chat/completions", headers,
                           chat_request_body(prompt, cfg), "application/json");
    ChatReply reply;
    if (!res) {
        reply.network_error = true;
        reply.status = 0;
        reply.error = httplib::to_string(res.error());
        return reply;
    }
    reply.status = res->status;
    if (res->status == 200) {
        auto content = parse_chat_content(res->body);
        if (!content) {
            // An unreadable 200 is treated like a bad gateway and retried.
            reply.status = 502;
            reply.error = "response lacks choices[0].message.content";
        } else {
            reply.content = std::move(*content);
        }
    } else {
        reply.error = res->body.substr(0, 500);
    }
    return reply;
}

std::string clean_completion(std::string_view raw) {
    auto trim = [](std::string_view s) {
        const auto first = s.find_first_not_of(" \t\r\n\v\f");
        if (first == std::string_view::npos) return std::string_view();
        const auto last = s.find_last_not_of(" \t\r\n\v\f");
        return s.substr(first, last - first + 1);
    };
    std::string_view s = trim(raw);
    static constexpr std::pair<std::string_view, std::string_view> kWrappers[] = {
        {"\"", "\""}, {"'", "'"}, {"“", "”"}, {"‘", "’"}, {"```", "```"}};
    for (const auto& [open, close] : kWrappers) {
        if (s.size() >= open.size() + close.size() && s.starts_with(open) && s.ends_with(close)) {
            const std::string_view inner = s.substr(open.size(), s.size() - open.size() - close.size());
            if (inner.find(open) == std::string_view::npos && inner.find(close) == std::string_view::npos) {
                s = trim(inner);
                break;
            }
        }
    }
    return std::string(s);
}

RateLimiter::RateLimiter(int requests_per_minute)
    : interval_(std::chrono::duration_cast<std::chrono::steady_clock::duration>(
          std::chrono::duration<double>(60.0 / std::max(1, requests_per_minute)))),
      next_(std::chrono::steady_clock::now()) {}

void RateLimiter::acquire() {
    std::chrono::steady_clock::time_point slot;
    {
        std::lock_guard lock(mu_);
        const auto now = std::chrono::steady_clock::now();
        if (next_ < now) next_ = now;
        slot = next_;
        next_ += interval_;
    }
    std::this_thread::sleep_until(slot);
}

ParaphraseGateway::ParaphraseGateway(LlmConfig cfg, std::shared_ptr<ChatBackend> backend,
                                     ParaphraseCache& cache, GatewayOptions options)
    : cfg_(std::move(cfg)),
      backend_(std::move(backend)),
      cache_(cache),
      options_(std::move(options)),
      limiter_(cfg_.requests_per_minute),
      jitter_state_(options_.jitter_seed) {
    cfg_.validate();
    if (!backend_) throw ConfigError("paraphrase gateway needs a backend");
    if (!options_.sleep) {
        options_.sleep = [](std::chrono::duration<double> d) { std::this_thread::sleep_for(d); };
    }
}

std::chrono::duration<double> ParaphraseGateway::backoff_delay(int attempt) {
    double u;
    {
        std::lock_guard lock(jitter_mu_);
        Rng rng(jitter_state_);
        u = rng.uniform();
        jitter_state_ = rng.next();
    }
    return std::chrono::duration<double>(cfg_.backoff_base_s * std::pow(cfg_.backoff_factor, attempt) *
                                         (1.0 + 0.25 * u));
}

ParaphraseRecord ParaphraseGateway::paraphrase(const std::string& prompt, const std::string& doc_id) {
    const std::string hash = prompt_hash(prompt, cfg_.model_name, cfg_.temperature);
    if (auto hit = cache_.find(hash)) {
        hit->backend = BackendKind::cache;
        if (!doc_id.empty()) hit->doc_id = doc_id;
        return *hit;
    }

    for (int attempt = 0;; ++attempt) {
        ChatReply reply;
        {
            std::unique_lock lock(slots_mu_);
            slots_cv_.wait(lock, [&] { return in_flight_ < cfg_.max_concurrency; });
            ++in_flight_;
        }
        try {
            limiter_.acquire();
            ++backend_calls_;
            reply = backend_->complete(prompt, cfg_);
        } catch (...) {
            {
                std::lock_guard lock(slots_mu_);
                --in_flight_;
            }
            slots_cv_.notify_one();
            throw;
        }
        {
            std::lock_guard lock(slots_mu_);
            --in_flight_;
        }
        slots_cv_.notify_one();

        if (!reply.network_error && reply.status == 200) {
            std::string text = clean_completion(reply.content);
            if (text.empty()) {
                throw EmptyCompletionError("empty completion for document '" + doc_id +
                                           "' (prompt " + hash.substr(0, 12) + "); retry manually");
            }
            ParaphraseRecord rec{doc_id, hash, std::move(text), backend_->kind(), utc_timestamp()};
            cache_.put(rec);
            return rec;
        }
        const bool transient = reply.network_error || reply.status == 429 || reply.status >= 500;
        if (!transient) {
            throw PermanentLlmError(reply.status, "LLM request failed with HTTP " +
                                                      std::to_string(reply.status) + ": " + reply.error);
        }
        if (attempt >= cfg_.max_retries) {
            throw TransientLlmError("LLM request failed after " + std::to_string(attempt + 1) +
                                    " attempts (last: " +
                                    (reply.network_error ? reply.error : "HTTP " + std::to_string(reply.status)) +
                                    ")");
        }
        ++backoffs_;
        options_.sleep(backoff_delay(attempt));
    }
}

std::string utc_timestamp() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

}  // namespace obfusc
