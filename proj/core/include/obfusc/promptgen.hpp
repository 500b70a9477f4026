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

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include "obfusc/explain.hpp"

namespace obfusc {

enum class PromptKind { zero_shot, personalized };

std::string_view to_string(PromptKind k);

struct PromptSpec {
    PromptKind kind = PromptKind::zero_shot;
    std::optional<std::string> feature_display;
    std::optional<Direction> direction;
    std::string input_text;

    static PromptSpec zero_shot(std::string input);
    static PromptSpec personalized(std::string feature_display, Direction direction, std::string input);
};

/// Templates use the placeholders {input}, {feature} and {more_or_fewer}.
/// {input} must occur exactly once; the personalized template must also
/// contain the other two.
struct PromptTemplates {
    std::string zero_shot;
    std::string personalized;

    static PromptTemplates defaults();
    /// Either path may be empty to keep the default for that kind.
    static PromptTemplates load(const std::filesystem::path& zero_shot_path,
                                const std::filesystem::path& personalized_path);
    void validate() const;
};

inline constexpr std::string_view kZeroShotTemplate =
    "Paraphrase the following text to obfuscate the author's identity while maintaining the "
    "meaning. Only return the paraphrased text.\n"
    "Input text: {input}\n"
    "output:";

inline constexpr std::string_view kPersonalizedTemplate =
    "Paraphrase the following text to obfuscate the author's identity while maintaining the "
    "meaning. Ensure the paraphrased version has {more_or_fewer} **{feature}** than the input.\n"
    "Only return the paraphrased text.\n"
    "Input text: {input}\n"
    "Output:";

/// Single-pass placeholder substitution; the input text is inserted
/// verbatim and never rescanned. Throws UserError when the spec mixes the
/// fields of the two kinds.
std::string render(const PromptSpec& spec, const PromptTemplates& templates = PromptTemplates::defaults());

}  // namespace obfusc
