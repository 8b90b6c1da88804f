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
#include <span>
#include <string>
#include <vector>

#include "stepscope/pipeline.hpp"

namespace stepscope {

// The six pinned programs:
//   B1 filter-chain   three chained filters on age/score/ts
//   B2 join           filter, then inner join with a second synthetic table on age
//   B3 group-agg      group_by city with count+sum+avg
//   B4 sort           two-column sort (city asc, score desc)
//   B5 mixed ETL      filter -> with_column -> join -> group_by_agg -> sort
//   B6 dedup-union    union of two tables -> distinct -> limit
std::vector<std::string> bench_program_ids();
bool is_bench_program(const std::string& id);

/// The program's pipeline at a given scale. Deterministic in (id, scale, seed).
PipelineSpec bench_program_spec(const std::string& id, std::uint64_t scale_rows,
                                std::uint64_t seed);

struct BenchResult {
    std::string program;
    std::uint64_t scale_rows = 0;
    std::uint64_t rep_count = 0;
    std::int64_t baseline_median_ns = 0;
    std::int64_t instrumented_median_ns = 0;
    std::int64_t overhead_ns = 0;     // instrumented - baseline, may be negative
    double overhead_ratio = 0.0;      // overhead_ns / baseline_median_ns, raw
};

/// One (program, scale) measurement. Data is generated once and cached so
/// no timed region includes generation; one untimed warm-up per mode, then
/// reps timed runs per mode interleaved B,I,B,I,...; medians reported.
/// Also re-checks end to end that baseline and instrumented final datasets
/// are bit-identical.
BenchResult run_benchmark(const std::string& program, std::uint64_t scale_rows,
                          std::uint64_t reps, std::uint64_t seed);

struct BenchSummary {
    std::string csv;    // program,scale_rows,rep_count,baseline_median_ns,
                        // instrumented_median_ns,overhead_ns,overhead_ratio
    std::string table;  // text table; displayed ratios clamped at 0
    std::vector<std::string> flagged;  // programs whose ratio rises monotonically
};

BenchSummary summarize(std::span<const BenchResult> results);

} // namespace stepscope
