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

#include "stepscope/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <map>

#include "stepscope/errors.hpp"

namespace stepscope {

using nlohmann::ordered_json;

std::vector<std::string> bench_program_ids() {
    return {"B1", "B2", "B3", "B4", "B5", "B6"};
}

bool is_bench_program(const std::string& id) {
    for (const std::string& p : bench_program_ids())
        if (p == id) return true;
    return false;
}

namespace {

ordered_json synthetic_source(std::uint64_t rows, std::uint64_t seed) {
    ordered_json j;
    j["format"] = "synthetic";
    j["rows"] = rows;
    j["seed"] = seed;
    return j;
}

// Second table for join programs: same five column types, key column kept
// as "age", everything else renamed so only the key overlaps.
ordered_json renamed_right(std::uint64_t rows, std::uint64_t seed) {
    ordered_json j = synthetic_source(rows, seed);
    ordered_json schema = ordered_json::array();
    const char* names[] = {"rid", "age", "rscore", "rcity", "rts"};
    const char* types[] = {"int", "int", "float", "str", "int"};
    for (int i = 0; i < 5; ++i) {
        ordered_json col;
        col["name"] = names[i];
        col["type"] = types[i];
        schema.push_back(std::move(col));
    }
    j["schema"] = std::move(schema);
    return j;
}

ordered_json filter_step(const char* predicate) {
    ordered_json j;
    j["op"] = "filter";
    j["predicate"] = predicate;
    return j;
}

ordered_json agg(const char* func, const char* column, const char* as) {
    ordered_json j;
    j["func"] = func;
    j["column"] = column;
    j["as"] = as;
    return j;
}

} // namespace

PipelineSpec bench_program_spec(const std::string& id, std::uint64_t scale_rows,
                                std::uint64_t seed) {
    if (!is_bench_program(id)) throw EngineError("unknown bench program '" + id + "'");
    if (scale_rows == 0) throw EngineError("bench: scale_rows must be positive");

    ordered_json doc;
    doc["source"] = synthetic_source(scale_rows, seed);
    ordered_json steps = ordered_json::array();

    if (id == "B1") {
        steps.push_back(filter_step("age > 30"));
        steps.push_back(filter_step("score < 0.9"));
        steps.push_back(filter_step("ts > 100000000"));
    } else if (id == "B2") {
        steps.push_back(filter_step("age > 18"));
        ordered_json join;
        join["op"] = "join";
        join["right"] = renamed_right(100, seed + 1);
        join["on"] = ordered_json::array({"age"});
        join["how"] = "inner";
        steps.push_back(std::move(join));
    } else if (id == "B3") {
        ordered_json group;
        group["op"] = "group_by_agg";
        group["keys"] = ordered_json::array({"city"});
        group["aggs"] = ordered_json::array(
            {agg("count", "*", "n"), agg("sum", "score", "score_sum"), agg("avg", "age", "age_avg")});
        steps.push_back(std::move(group));
    } else if (id == "B4") {
        ordered_json sort;
        sort["op"] = "sort";
        sort["columns"] = ordered_json::array({"city", "score"});
        sort["ascending"] = ordered_json::array({true, false});
        steps.push_back(std::move(sort));
    } else if (id == "B5") {
        steps.push_back(filter_step("age > 18"));
        ordered_json wc;
        wc["op"] = "with_column";
        wc["name"] = "weight";
        wc["expr"] = "score * age";
        steps.push_back(std::move(wc));
        ordered_json join;
        join["op"] = "join";
        join["right"] = renamed_right(100, seed + 1);
        join["on"] = ordered_json::array({"age"});
        join["how"] = "inner";
        steps.push_back(std::move(join));
        ordered_json group;
        group["op"] = "group_by_agg";
        group["keys"] = ordered_json::array({"city"});
        group["aggs"] =
            ordered_json::array({agg("avg", "weight", "weight_avg"), agg("count", "*", "n")});
        steps.push_back(std::move(group));
        ordered_json sort;
        sort["op"] = "sort";
        sort["columns"] = ordered_json::array({"weight_avg"});
        sort["ascending"] = ordered_json::array({false});
        steps.push_back(std::move(sort));
    } else {  // B6
        ordered_json un;
        un["op"] = "union";
        un["right"] = synthetic_source(scale_rows, seed);
        steps.push_back(std::move(un));
        ordered_json distinct;
        distinct["op"] = "distinct";
        steps.push_back(std::move(distinct));
        ordered_json limit;
        limit["op"] = "limit";
        limit["n"] = 1000;
        steps.push_back(std::move(limit));
    }

    doc["steps"] = std::move(steps);
    return parse_spec(doc.dump());
}

namespace {

std::int64_t median_ns(std::vector<std::int64_t> xs) {
    std::sort(xs.begin(), xs.end());
    const std::size_t n = xs.size();
    if (n % 2 == 1) return xs[n / 2];
    return (xs[n / 2 - 1] + xs[n / 2]) / 2;
}

} // namespace

BenchResult run_benchmark(const std::string& program, std::uint64_t scale_rows,
                          std::uint64_t reps, std::uint64_t seed) {
    if (reps == 0) throw EngineError("bench: reps must be >= 1");
    const PipelineSpec spec = bench_program_spec(program, scale_rows, seed);

    CachingSourceResolver resolver;
    TraceConfig baseline_cfg;
    baseline_cfg.enabled = false;
    baseline_cfg.seed = seed;
    TraceConfig instrumented_cfg;
    instrumented_cfg.enabled = true;
    instrumented_cfg.sample_size = 20;
    instrumented_cfg.seed = seed;
    const HintConfig hints;

    // Warm-up also primes the source cache and re-checks observer
    // non-interference end to end.
    ExecResult warm_base = execute(spec, baseline_cfg, hints, &resolver);
    ExecResult warm_instr = execute(spec, instrumented_cfg, hints, &resolver);
    if (!datasets_bits_equal(*warm_base.output, *warm_instr.output))
        throw EngineError("bench " + program + ": instrumented run changed the output");
    warm_base = ExecResult{};
    warm_instr = ExecResult{};

    using Clock = std::chrono::steady_clock;
    std::vector<std::int64_t> base_ns, instr_ns;
    base_ns.reserve(reps);
    instr_ns.reserve(reps);
    for (std::uint64_t rep = 0; rep < reps; ++rep) {
        const auto b0 = Clock::now();
        ExecResult b = execute(spec, baseline_cfg, hints, &resolver);
        const auto b1 = Clock::now();
        b = ExecResult{};
        base_ns.push_back(
            std::chrono::duration_cast<std::chrono::nanoseconds>(b1 - b0).count());

        const auto i0 = Clock::now();
        ExecResult t = execute(spec, instrumented_cfg, hints, &resolver);
        const auto i1 = Clock::now();
        t = ExecResult{};
        instr_ns.push_back(
            std::chrono::duration_cast<std::chrono::nanoseconds>(i1 - i0).count());
    }

    BenchResult r;
    r.program = program;
    r.scale_rows = scale_rows;
    r.rep_count = reps;
    r.baseline_median_ns = median_ns(std::move(base_ns));
    r.instrumented_median_ns = median_ns(std::move(instr_ns));
    r.overhead_ns = r.instrumented_median_ns - r.baseline_median_ns;
    r.overhead_ratio = r.baseline_median_ns > 0
                           ? static_cast<double>(r.overhead_ns) /
                                 static_cast<double>(r.baseline_median_ns)
                           : 0.0;
    return r;
}

BenchSummary summarize(std::span<const BenchResult> results) {
    if (results.empty()) throw EngineError("summarize: no results");

    BenchSummary s;
    s.csv = "program,scale_rows,rep_count,baseline_median_ns,instrumented_median_ns,"
            "overhead_ns,overhead_ratio\n";
    for (const BenchResult& r : results) {
        s.csv += r.program + ',' + std::to_string(r.scale_rows) + ',' +
                 std::to_string(r.rep_count) + ',' + std::to_string(r.baseline_median_ns) +
                 ',' + std::to_string(r.instrumented_median_ns) + ',' +
                 std::to_string(r.overhead_ns) + ',' + float_to_string(r.overhead_ratio) + '\n';
    }

    char line[160];
    std::snprintf(line, sizeof line, "%-8s %12s %16s %16s %14s %8s\n", "program", "scale_rows",
                  "baseline_ns", "instrumented_ns", "overhead_ns", "ratio");
    s.table = line;
    for (const BenchResult& r : results) {
        const double shown = std::max(0.0, r.overhead_ratio);
        std::snprintf(line, sizeof line, "%-8s %12llu %16lld %16lld %14lld %8.4f\n",
                      r.program.c_str(), static_cast<unsigned long long>(r.scale_rows),
                      static_cast<long long>(r.baseline_median_ns),
                      static_cast<long long>(r.instrumented_median_ns),
                      static_cast<long long>(r.overhead_ns), shown);
        s.table += line;
    }

    // Flag programs whose ratio strictly rises at every scale step: the
    // shape that contradicts the expected amortization trend.
    std::vector<std::string> order;
    std::map<std::string, std::vector<std::pair<std::uint64_t, double>>> by_program;
    for (const BenchResult& r : results) {
        if (!by_program.count(r.program)) order.push_back(r.program);
        by_program[r.program].emplace_back(r.scale_rows, r.overhead_ratio);
    }
    for (const std::string& p : order) {
        auto& points = by_program[p];
        std::sort(points.begin(), points.end());
        if (points.size() < 2) continue;
        bool rising = true;
        for (std::size_t i = 1; i < points.size(); ++i)
            if (points[i].second <= points[i - 1].second) { rising = false; break; }
        if (rising) s.flagged.push_back(p);
    }
    return s;
}

} // namespace stepscope
