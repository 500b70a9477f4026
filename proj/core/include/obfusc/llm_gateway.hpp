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

#pragma once

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <unordered_map>

#include "obfusc/error.hpp"

namespace obfusc {

/// Environment variable holding the bearer token for live endpoints.
inline constexpr const char* kApiKeyEnv = "OBFS_LLM_API_KEY";

struct LlmConfig {
    std::string endpoint_url;  // e.g. https://api.openai.com/v1
    std::string model_name;    // e.g. gpt-4-turbo
    double temperature = 0.0;
    int max_output_tokens = 1024;
    double timeout_s = 120.0;
    int max_retries = 5;
    int requests_per_minute = 60;
    int max_concurrency = 4;
    double backoff_base_s = 1.0;
    double backoff_factor = 2.0;

    /// Throws ConfigError for a malformed URL or out-of-range values.
    void validate() const;
};

enum class BackendKind { live, mock, cache };

std::string_view to_string(BackendKind k);
BackendKind backend_kind_from_string(std::string_view s);

struct ParaphraseRecord {
    std::string doc_id;
    std::string prompt_hash;
    std::string output_text;
    BackendKind backend = BackendKind::live;
    std::string created_at;  // ISO-8601 UTC

    friend bool operator==(const ParaphraseRecord&, const ParaphraseRecord&) = default;
};

std::string record_to_json(const ParaphraseRecord& r);
ParaphraseRecord record_from_json(std::string_view line);

/// SHA-256 over prompt, model name and temperature.
std::string prompt_hash(std::string_view prompt, std::string_view model_name, double temperature);

/// Lowercase, with runs of characters outside [a-z0-9._] collapsed to '-'.
std::string model_slug(std::string_view model_name);

class LlmError : public Error {
public:
    using Error::Error;
};

/// 4xx other than 429: retrying cannot help.
class PermanentLlmError : public LlmError {
public:
    PermanentLlmError(int status, const std::string& what) : LlmError(what), status_(status) {}
    int status() const { return status_; }

private:
    int status_;
};

/// 429, 5xx or network failure that persisted through every retry.
class TransientLlmError : public LlmError {
public:
    using LlmError::LlmError;
};

/// The endpoint answered with an empty completion; flagged for manual retry.
class EmptyCompletionError : public LlmError {
public:
    using LlmError::LlmError;
};

/// Append-only JSONL store keyed by prompt hash. Many readers, one writer
/// at a time; safe to share across threads.
class ParaphraseCache {
public:
    /// In-memory only.
    ParaphraseCache() = default;
    /// Loads `file` if it exists and appends new records to it.
    explicit ParaphraseCache(std::filesystem::path file);

    std::optional<ParaphraseRecord> find(const std::string& hash) const;
    void put(const ParaphraseRecord& record);
    std::size_t size() const;
    const std::filesystem::path& path() const { return file_; }

private:
    std::filesystem::path file_;
    mutable std::shared_mutex mu_;
    std::unordered_map<std::string, ParaphraseRecord> entries_;
    std::ofstream out_;
};

std::filesystem::path cache_file(const std::filesystem::path& cache_dir, std::string_view model_name);

struct ChatReply {
    int status = 200;
    std::string content;
    /// Transport-level failure (connection refused, timeout).
    bool network_error = false;
    std::string error;
};

/// One completion request. Implementations must be thread-safe.
class ChatBackend {
public:
    virtual ~ChatBackend() = default;
    virtual ChatReply complete(const std::string& prompt, const LlmConfig& cfg) = 0;
    virtual BackendKind kind() const = 0;
};

/// JSON body for POST {endpoint}/chat/completions.
std::string chat_request_body(const std::string& prompt, const LlmConfig& cfg);
/// choices[0].message.content, or nullopt when the body lacks it.
std::optional<std::string> parse_chat_content(std::string_view body);

/// OpenAI-compatible chat-completions endpoint over HTTP(S).
class HttpChatBackend final : public ChatBackend {
public:
    /// Reads the key from OBFS_LLM_API_KEY; throws ConfigError when unset.
    static std::shared_ptr<HttpChatBackend> from_env();
    explicit HttpChatBackend(std::string api_key);

    ChatReply complete(const std::string& prompt, const LlmConfig& cfg) override;
    BackendKind kind() const override { return BackendKind::live; }

private:
    std::string api_key_;
};

/// Strips surrounding whitespace, then one layer of quotes that wraps the
/// whole reply (only when that quote character does not occur inside).
std::string clean_completion(std::string_view raw);

/// Spaces request starts at least 60/rpm seconds apart.
class RateLimiter {
public:
    explicit RateLimiter(int requests_per_minute);
    void acquire();

private:
    std::mutex mu_;
    std::chrono::steady_clock::duration interval_;
    std::chrono::steady_clock::time_point next_;
};

struct GatewayOptions {
    /// Sleep used between retries; tests substitute a recorder.
    std::function<void(std::chrono::duration<double>)> sleep;
    std::uint64_t jitter_seed = 0;
};

/// Cache lookup, rate limiting, bounded concurrency and retry with
/// exponential backoff around a ChatBackend.
class ParaphraseGateway {
public:
    ParaphraseGateway(LlmConfig cfg, std::shared_ptr<ChatBackend> backend, ParaphraseCache& cache,
                      GatewayOptions options = {});

    /// Served from the cache without any backend call when the prompt hash
    /// is known (backend field = cache). Otherwise requests, retrying 429,
    /// 5xx and network failures up to max_retries times with delays of
    /// base * factor^k scaled by a jitter in [1, 1.25).
    ParaphraseRecord paraphrase(const std::string& prompt, const std::string& doc_id = {});

    std::size_t backend_calls() const { return backend_calls_.load(); }
    std::size_t backoffs() const { return backoffs_.load(); }
    const LlmConfig& config() const { return cfg_; }

private:
    std::chrono::duration<double> backoff_delay(int attempt);

    LlmConfig cfg_;
    std::shared_ptr<ChatBackend> backend_;
    ParaphraseCache& cache_;
    GatewayOptions options_;
    RateLimiter limiter_;
    std::mutex slots_mu_;
    std::condition_variable slots_cv_;
    int in_flight_ = 0;
    std::mutex jitter_mu_;
    std::uint64_t jitter_state_;
    std::atomic<std::size_t> backend_calls_{0};
    std::atomic<std::size_t> backoffs_{0};
};

std::string utc_timestamp();

}  // namespace obfusc
