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
#include <span>
#include <string>
#include <vector>

namespace obfusc {

/// original_f1 - obf_f1, rounded to 12 decimals so that differences of
/// two-decimal F1 values come out exact (0.88 - 0.72 == 0.16).
double performance_drop(double original_f1, double obf_f1);

/// The ineffective-obfuscation rule: an absolute drop below 0.20.
inline constexpr double kIneffectiveDrop = 0.20;
inline bool is_ineffective(double drop) { return drop < kIneffectiveDrop; }

/// Hartigan & Hartigan's dip statistic (the AS 217 GCM/LCM iteration) on
/// the sorted sample. Samples with n <= 3 or a single distinct value have
/// dip 1/(2n) by convention. Throws DataError for non-finite input and for
/// an empty sample.
double dip_statistic(std::span<const double> samples);

struct DipResult {
    std::size_t n = 0;
    double dip = 0.0;
    double p_value = 1.0;
    int n_boot = 0;
    std::uint64_t seed = 0;
    /// Set when n < 4: p_value is 1 and no calibration was run.
    bool degenerate = false;
    // Labels attached by the pipeline.
    std::string llm;
    std::string verifier;
    std::string condition;
};

inline constexpr int kMinBoot = 100;
inline constexpr int kDefaultBoot = 10000;

/// Monte-Carlo p-value against n_boot uniform(0,1) samples of the same
/// size: (1 + #{boot dip >= dip}) / (1 + n_boot). Replicate r draws from
/// its own seed, so the result does not depend on the thread count.
/// Throws UserError when n_boot < 100.
DipResult dip_pvalue(std::span<const double> samples, int n_boot, std::uint64_t seed,
                     unsigned threads = 0);

std::string dips_to_json(const std::vector<DipResult>& dips);
std::vector<DipResult> dips_from_json(std::string_view json_text);

}  // namespace obfusc
