// Copyright 2026 the stepscope authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "stepscope/dataset.hpp"

namespace stepscope {

struct PipelineSpec;
struct StepTrace;

enum class Severity : std::uint8_t { Error, Warn, Info };

const char* to_string(Severity s);   // "error" / "warn" / "info"
const char* severity_tag(Severity s); // "ERROR" / "WARN" / "INFO"

// The full catalog. P-rules are static parameter checks, A-rules run on
// per-step traces. Codes, names, severities and message templates are a
// stable contract (see docs/hints.md).
enum class HintCode : std::uint8_t {
    P1_SortFlagBroadcast,
    P2_SortFlagArity,
    P3_JoinKeyMissing,
    P4_AggNonNumeric,
    P5_LimitNonpositive,
    P6_UnknownColumn,
    P7_JoinTypeMismatch,
    A1_EmptyResult,
    A2_NoopFilter,
    A3_JoinExplosion,
    A4_NullGrowth,
    A5_HeavyDedup,
    A6_SampleKeyDisjoint,
};

const char* hint_code(HintCode c);   // "P1".."A6"
const char* hint_name(HintCode c);   // "SORT_FLAG_BROADCAST", ...
Severity hint_severity(HintCode c);

struct Hint {
    HintCode code;
    Severity severity;
    std::uint64_t step_index;
    std::string message;
    // Exact numbers/params that fired the rule, enough to recompute the
    // trigger. Emitted in key order.
    std::map<std::string, nlohmann::json> evidence;
};

struct HintConfig {
    double join_explosion_factor = 10.0;
    double null_growth_delta = 0.5;   // sample-fraction rise
    double dedup_ratio = 0.9;
    std::set<HintCode> disabled;

    bool enabled(HintCode c) const { return !disabled.contains(c); }
    void validate() const;  // factors > 0, deltas/ratios in (0, 1]
};

/// All matching P-rules for the plan, given the schema before each step
/// (schema_chain[i] feeds step i). Ordered by rule code, then step.
std::vector<Hint> check_parameters(const PipelineSpec& spec,
                                   std::span<const Schema> schema_chain);

/// All matching A-rules for one executed step. Rules that use only exact
/// counts (A1, A2, A3, A5) are independent of sampling; A4 and A6 are
/// sample-based and advisory. Ordered by rule code.
std::vector<Hint> detect_anomalies(const StepTrace& step, const HintConfig& config);

} // namespace stepscope
