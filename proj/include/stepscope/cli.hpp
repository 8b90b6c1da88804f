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
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace stepscope {

// Exit codes are a stable contract: 0 success, 1 runtime/IO error,
// 2 spec/validation error.
inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntime = 1;
inline constexpr int kExitSpec = 2;

struct RunOptions {
    std::string spec_path;
    bool trace = true;
    std::uint64_t sample_size = 20;
    std::uint64_t seed = 0;
    bool hints = true;
    std::string format = "text";              // text | json
    std::optional<std::string> out_path;      // default: stdout
    std::optional<double> join_explosion_factor;
    std::optional<double> null_growth_delta;
    std::optional<double> dedup_ratio;
};

struct BenchOptions {
    std::vector<std::uint64_t> scales = {10000, 100000, 1000000};
    std::uint64_t reps = 20;
    std::string out_path = "results.csv";
    std::vector<std::string> programs;  // empty = all
};

int cmd_run(const RunOptions& opts, std::ostream& out, std::ostream& err);
int cmd_bench(const BenchOptions& opts, std::ostream& out, std::ostream& err);

/// Full argv interface (subcommands `run` and `bench`). Diagnostics to
/// err, report/summary to out or the chosen output file.
int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace stepscope
