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

#include <cstdint>
#include <memory>
#include <string>
#include <string_view>

#include "obfusc/llm_gateway.hpp"

namespace obfusc {

/// Deterministic offline stand-in for an LLM. Rules:
///   identity
///   strip_feature:<feature_id>   lower the named feature
///   add_feature:<feature_id>     raise the named feature
///   shuffle_sentences:<seed>     reorder sentences (seeded per text)
///   follow_prompt[:<seed>]       read the personalized instruction from the
///                                prompt ("more/fewer **X**") and add/strip
///                                that feature; zero-shot prompts shuffle
/// Movable features: punct_*, pos_*, fw_*, uppercase_pct, digit_pct,
/// whitespace_pct, char_count, word_count, sentence_count.
class MockBackend final : public ChatBackend {
public:
    /// Throws ConfigError for an unknown rule or an unmovable feature.
    explicit MockBackend(std::string rule);

    /// Applies the rule to the input text embedded in `prompt`.
    ChatReply complete(const std::string& prompt, const LlmConfig& cfg) override;
    BackendKind kind() const override { return BackendKind::mock; }

    /// Applies the rule to raw text (follow_prompt shuffles).
    std::string transform(std::string_view text) const;

    const std::string& rule() const { return rule_; }

private:
    enum class Op { identity, strip, add, shuffle, follow };

    std::string rule_;
    Op op_ = Op::identity;
    std::string feature_;
    std::uint64_t seed_ = 0;
};

std::shared_ptr<MockBackend> mock_backend(const std::string& rule);

/// Text between "Input text: " and the trailing "output:" line of a
/// rendered prompt; the whole prompt when the markers are absent.
std::string extract_prompt_input(std::string_view prompt);

namespace mock {

std::string strip_feature(std::string_view text, std::string_view feature_id);
std::string add_feature(std::string_view text, std::string_view feature_id);
std::string shuffle_sentences(std::string_view text, std::uint64_t seed);
bool movable(std::string_view feature_id);

}  // namespace mock

}  // namespace obfusc
