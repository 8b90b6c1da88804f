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
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "stepscope/dataset.hpp"
#include "stepscope/hints.hpp"
#include "stepscope/prng.hpp"

namespace stepscope {

struct TraceConfig {
    bool enabled = true;
    std::uint64_t sample_size = 20;  // k
    std::uint64_t seed = 0;
};

/// Per-column statistics over the sample only. row_count in DataState is
/// the lone exact full-data number; everything else is sample-derived so
/// capture cost stays near-constant per row.
struct ColumnStats {
    std::string column;
    std::uint64_t nulls_in_sample = 0;
    std::uint64_t sample_size = 0;
    Value min;  // Null for bool columns, empty/all-Null samples
    Value max;
};

struct DataState {
    std::uint64_t row_count = 0;
    Schema schema;
    std::vector<ColumnStats> column_stats;
};

using SampleRows = std::vector<std::vector<Value>>;

struct StepTrace {
    std::uint64_t step_index = 0;
    std::string op;
    nlohmann::ordered_json params;
    DataState state_before;
    DataState state_after;
    std::optional<DataState> state_right;    // join steps only
    SampleRows sample_before;
    SampleRows sample_after;
    std::optional<SampleRows> sample_right;  // join steps only
    std::vector<Hint> hints;
    std::int64_t duration_ns = 0;            // run() only
    std::int64_t instrumentation_ns = 0;     // capture cost, kept separate
};

struct TraceTotals {
    std::int64_t duration_ns = 0;
    std::int64_t instrumentation_ns = 0;
};

struct Trace {
    int version = 1;
    nlohmann::ordered_json spec_echo;
    std::uint64_t seed = 0;
    std::uint64_t sample_size = 0;
    std::vector<StepTrace> steps;
    TraceTotals totals;
};

/// Algorithm R over 0-based row indices: slots fill in order for i < k;
/// for i >= k, j = prng.next() mod (i+1) replaces slot j when j < k.
/// Exactly one draw per row past the k-th.
std::vector<std::uint64_t> reservoir_sample_indices(std::uint64_t n, std::uint64_t k,
                                                    SplitMix64& prng);

/// min(k, row_count) sampled rows, materialized in reservoir slot order.
SampleRows reservoir_sample(const Dataset& ds, std::uint64_t k, SplitMix64& prng);

struct Capture {
    DataState state;
    SampleRows sample;
};

/// One reservoir pass plus O(k * columns) statistics; never scans full
/// column data.
Capture capture_state(const Dataset& ds, std::uint64_t k, SplitMix64& prng);

} // namespace stepscope
