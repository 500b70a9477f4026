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

#include "obfusc/promptgen.hpp"

#include <fstream>
#include <sstream>

#include "obfusc/error.hpp"

namespace obfusc {

std::string_view to_string(PromptKind k) {
    return k == PromptKind::zero_shot ? "zeroshot" : "personalized";
}

PromptSpec PromptSpec::zero_shot(std::string input) {
    return {PromptKind::zero_shot, std::nullopt, std::nullopt, std::move(input)};
}

PromptSpec PromptSpec::personalized(std::string feature_display, Direction direction,
                                    std::string input) {
    return {PromptKind::personalized, std::move(feature_display), direction, std::move(input)};
}

namespace {

std::size_t count_of(std::string_view haystack, std::string_view needle) {
    std::size_t n = 0;
    for (auto pos = haystack.find(needle); pos != std::string_view::npos;
         pos = haystack.find(needle, pos + needle.size()))
        ++n;
    return n;
}

std::string read_file(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw ConfigError("cannot read prompt template " + p.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    std::string s = buf.str();
    while (!s.empty() && (s.back() == '\n' || s.back() == '\r')) s.pop_back();
    return s;
}

}  // namespace

PromptTemplates PromptTemplates::defaults() {
    return {std::string(kZeroShotTemplate), std::string(kPersonalizedTemplate)};
}

PromptTemplates PromptTemplates::load(const std::filesystem::path& zero_shot_path,
                                      const std::filesystem::path& personalized_path) {
    PromptTemplates t = defaults();
    if (!zero_shot_path.empty()) t.zero_shot = read_file(zero_shot_path);
    if (!personalized_path.empty()) t.personalized = read_file(personalized_path);
    t.validate();
    return t;
}

void PromptTemplates::validate() const {
    if (count_of(zero_shot, "{input}") != 1) {
        throw ConfigError("zero-shot template must contain {input} exactly once");
    }
    if (count_of(personalized, "{input}") != 1 || count_of(personalized, "{feature}") == 0 ||
        count_of(personalized, "{more_or_fewer}") == 0) {
        throw ConfigError(
            "personalized template must contain {input} once plus {feature} and {more_or_fewer}");
    }
}

std::string render(const PromptSpec& spec, const PromptTemplates& templates) {
    const bool has_feature = spec.feature_display.has_value();
    const bool has_direction = spec.direction.has_value();
    if (spec.kind == PromptKind::zero_shot && (has_feature || has_direction)) {
        throw UserError("zero-shot prompts take no feature or direction");
    }
    if (spec.kind == PromptKind::personalized &&
        (!has_feature || !has_direction || spec.feature_display->empty())) {
        throw UserError("personalized prompts need a feature and a direction");
    }
    const std::string& tmpl =
        spec.kind == PromptKind::zero_shot ? templates.zero_shot : templates.personalized;

    std::string out;
    out.reserve(tmpl.size() + spec.input_text.size() + 64);
    std::size_t i = 0;
    while (i < tmpl.size()) {
        if (tmpl[i] == '{') {
            const auto close = tmpl.find('}', i);
            if (close != std::string::npos) {
                const std::string_view name(tmpl.data() + i + 1, close - i - 1);
                if (name == "input") {
                    out += spec.input_text;
                    i = close + 1;
                    continue;
                }
                if (name == "feature" && has_feature) {
                    out += *spec.feature_display;
                    i = close + 1;
                    continue;
                }
                if (name == "more_or_fewer" && has_direction) {
                    out += *spec.direction == Direction::increase ? "more" : "fewer";
                    i = close + 1;
                    continue;
                }
            }
        }
        out.push_back(tmpl[i++]);
    }
    return out;
}

}  // namespace obfusc
