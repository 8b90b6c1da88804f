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

#include <fstream>

#include <doctest.h>

#include "stepscope/errors.hpp"
#include "stepscope/pipeline.hpp"

using namespace stepscope;
using nlohmann::ordered_json;

namespace {

const char* kSmallSpec = R"({
  "source": {"format": "synthetic", "rows": 100, "seed": 3},
  "steps": [
    {"op": "filter", "predicate": "age > 30"},
    {"op": "with_column", "name": "half", "expr": "score / 2"},
    {"op": "sort", "columns": ["city", "half"], "ascending": [true, false]},
    {"op": "limit", "n": 10}
  ]
})";

} // namespace

TEST_CASE("parse_spec accepts the documented shape and echoes canonically") {
    const PipelineSpec spec = parse_spec(kSmallSpec);
    CHECK(spec.source.format == SourceSpec::Format::Synthetic);
    CHECK(spec.source.rows == 100);
    REQUIRE(spec.steps.size() == 4);
    CHECK(spec.steps[0].op == Step::Op::Filter);
    CHECK(spec.steps[2].ascending_is_scalar == false);
    CHECK(spec.steps[3].limit_n == 10);

    // Round trip: canonical echo parses back to the same canonical echo.
    const ordered_json echo = spec_to_json(spec);
    const PipelineSpec again = parse_spec(echo.dump());
    CHECK(spec_to_json(again) == echo);
    CHECK(echo["steps"][2]["ascending"].is_array());

    // Scalar ascending keeps its scalar shape through the echo.
    const PipelineSpec scalar = parse_spec(R"({
      "source": {"format": "synthetic", "rows": 5, "seed": 0},
      "steps": [{"op": "sort", "columns": ["id"], "ascending": false}]})");
    CHECK(spec_to_json(scalar)["steps"][0]["ascending"].is_boolean());
}

TEST_CASE("parse_spec is strict") {
    // Unknown top-level field.
    CHECK_THROWS_AS(parse_spec(R"({"source": {"format": "synthetic", "rows": 1, "seed": 0},
                                   "steps": [], "x": 1})"),
                    ParseError);
    // Unknown step field.
    CHECK_THROWS_AS(parse_spec(R"({"source": {"format": "synthetic", "rows": 1, "seed": 0},
                                   "steps": [{"op": "limit", "n": 1, "z": 2}]})"),
                    ParseError);
    // Unknown op.
    CHECK_THROWS_AS(parse_spec(R"({"source": {"format": "synthetic", "rows": 1, "seed": 0},
                                   "steps": [{"op": "fliter", "predicate": "x"}]})"),
                    ParseError);
    // Missing required param.
    CHECK_THROWS_AS(parse_spec(R"({"source": {"format": "synthetic", "rows": 1, "seed": 0},
                                   "steps": [{"op": "filter"}]})"),
                    ParseError);
    // csv source without schema.
    CHECK_THROWS_AS(parse_spec(R"({"source": {"format": "csv", "path": "x.csv"},
                                   "steps": []})"),
                    ParseError);
    // Unknown source format.
    CHECK_THROWS_AS(parse_spec(R"({"source": {"format": "orc", "path": "x"}, "steps": []})"),
                    ParseError);
    // Empty select.
    CHECK_THROWS_AS(parse_spec(R"({"source": {"format": "synthetic", "rows": 1, "seed": 0},
                                   "steps": [{"op": "select", "columns": []}]})"),
                    ParseError);
    // Bad predicate text surfaces as a ParseError naming the step.
    try {
        parse_spec(R"({"source": {"format": "synthetic", "rows": 1, "seed": 0},
                       "steps": [{"op": "filter", "predicate": "age = 1"}]})");
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(std::string(e.what()).find("step 0") != std::string::npos);
    }
    // Invalid JSON.
    CHECK_THROWS_AS(parse_spec("{"), ParseError);
    // Unknown agg func.
    CHECK_THROWS_AS(
        parse_spec(R"({"source": {"format": "synthetic", "rows": 1, "seed": 0},
                       "steps": [{"op": "group_by_agg", "keys": [],
                                  "aggs": [{"func": "median", "column": "age", "as": "m"}]}]})"),
        ParseError);
    // '*' only for count.
    CHECK_THROWS_AS(
        parse_spec(R"({"source": {"format": "synthetic", "rows": 1, "seed": 0},
                       "steps": [{"op": "group_by_agg", "keys": [],
                                  "aggs": [{"func": "sum", "column": "*", "as": "s"}]}]})"),
        ParseError);
}

TEST_CASE("validate_plan: schema chain, truncation and non-catalog errors") {
    const PipelineSpec spec = parse_spec(kSmallSpec);
    const PlanInfo plan = validate_plan(spec);
    CHECK(plan.ok());
    REQUIRE(plan.schema_chain.size() == 5);  // source + 4 steps
    CHECK(plan.schema_chain[0].size() == 5);
    CHECK(plan.schema_chain[2].has("half"));
    CHECK(plan.schema_chain[2].at(*plan.schema_chain[2].find("half")).type ==
          ValueType::Float);

    // Non-bool predicate is a PlanError, not a hint.
    const PipelineSpec bad = parse_spec(R"({
      "source": {"format": "synthetic", "rows": 5, "seed": 0},
      "steps": [{"op": "filter", "predicate": "age + 1"}]})");
    const PlanInfo bp = validate_plan(bad);
    CHECK_FALSE(bp.ok());
    REQUIRE(bp.errors.size() == 1);
    CHECK(bp.errors[0].step_index == 0);
    CHECK(bp.errors[0].message.find("expected bool") != std::string::npos);

    // The chain truncates at the failing step, but P-hints for later
    // steps that never get a schema are simply absent.
    const PipelineSpec trunc = parse_spec(R"({
      "source": {"format": "synthetic", "rows": 5, "seed": 0},
      "steps": [{"op": "select", "columns": ["ghost"]},
                {"op": "limit", "n": 0}]})");
    const PlanInfo tp = validate_plan(trunc);
    CHECK_FALSE(tp.ok());
    CHECK(tp.schema_chain.size() == 1);
    REQUIRE(tp.hints.size() == 1);  // P6 only; the limit is never reached
    CHECK(tp.hints[0].code == HintCode::P6_UnknownColumn);

    // Union schema mismatch is a PlanError.
    const PipelineSpec um = parse_spec(R"({
      "source": {"format": "synthetic", "rows": 5, "seed": 0},
      "steps": [{"op": "union", "right": {"format": "synthetic", "rows": 5, "seed": 0,
        "schema": [{"name": "a", "type": "int"}, {"name": "age", "type": "int"},
                   {"name": "s", "type": "float"}, {"name": "c", "type": "str"},
                   {"name": "t", "type": "int"}]}}]})");
    const PlanInfo up = validate_plan(um);
    CHECK_FALSE(up.ok());
    REQUIRE(up.errors.size() == 1);
    CHECK(up.errors[0].message.find("union") != std::string::npos);

    // A missing jsonl source file fails at the source slot.
    const PipelineSpec mf = parse_spec(R"({
      "source": {"format": "jsonl", "path": "definitely_missing.jsonl"}, "steps": []})");
    const PlanInfo mp = validate_plan(mf);
    CHECK_FALSE(mp.ok());
    REQUIRE(mp.errors.size() == 1);
    CHECK(mp.errors[0].step_index == 0);  // == steps.size()
}

TEST_CASE("execute produces a full trace and the expected output") {
    const PipelineSpec spec = parse_spec(kSmallSpec);
    TraceConfig cfg;
    cfg.sample_size = 5;
    cfg.seed = 11;
    const ExecResult r = execute(spec, cfg);

    CHECK(r.output->row_count() == 10);
    CHECK(r.trace.seed == 11);
    CHECK(r.trace.sample_size == 5);
    REQUIRE(r.trace.steps.size() == 4);
    const StepTrace& st = r.trace.steps[0];
    CHECK(st.op == "filter");
    CHECK(st.state_before.row_count == 100);
    CHECK(st.state_before.schema.size() == 5);
    CHECK(st.sample_before.size() == 5);
    CHECK(st.params.at("predicate") == "age > 30");
    CHECK_FALSE(st.state_right.has_value());
    CHECK(r.trace.totals.instrumentation_ns > 0);
    CHECK(r.trace.spec_echo == spec_to_json(spec));

    // Disabled tracing: totals only, bit-identical output.
    TraceConfig off = cfg;
    off.enabled = false;
    const ExecResult r2 = execute(spec, off);
    CHECK(r2.trace.steps.empty());
    CHECK(datasets_bits_equal(*r.output, *r2.output));
}

TEST_CASE("per-step sampling depends only on (seed, step index, data)") {
    // The same step in two pipelines of different length samples the same
    // rows: earlier steps cannot perturb later streams.
    const PipelineSpec one = parse_spec(R"({
      "source": {"format": "synthetic", "rows": 60, "seed": 4},
      "steps": [{"op": "filter", "predicate": "age > 0"},
                {"op": "sort", "columns": ["age"], "ascending": true}]})");
    const PipelineSpec two = parse_spec(R"({
      "source": {"format": "synthetic", "rows": 60, "seed": 4},
      "steps": [{"op": "limit", "n": 60},
                {"op": "sort", "columns": ["age"], "ascending": true}]})");
    TraceConfig cfg;
    cfg.sample_size = 7;
    const ExecResult a = execute(one, cfg);
    const ExecResult b = execute(two, cfg);
    // Step 1 input is the full table in both cases (filter/limit keep all).
    REQUIRE(a.trace.steps[1].sample_before.size() == 7);
    for (std::size_t r = 0; r < 7; ++r)
        for (std::size_t c = 0; c < 5; ++c)
            CHECK(value_bits_equal(a.trace.steps[1].sample_before[r][c],
                                   b.trace.steps[1].sample_before[r][c]));
}

TEST_CASE("execute refuses an invalid plan with PlanInvalid") {
    const PipelineSpec bad = parse_spec(R"({
      "source": {"format": "synthetic", "rows": 5, "seed": 0},
      "steps": [{"op": "select", "columns": ["ghost"]}]})");
    CHECK_THROWS_AS(execute(bad, TraceConfig{}), PlanInvalid);
    try {
        execute(bad, TraceConfig{});
    } catch (const PlanInvalid& e) {
        CHECK_FALSE(e.info().ok());
        CHECK(std::string(e.what()).find("invalid plan") != std::string::npos);
    }
}

TEST_CASE("join steps capture the right side; hints attach to their steps") {
    const PipelineSpec spec = parse_spec(R"({
      "source": {"format": "synthetic", "rows": 40, "seed": 6},
      "steps": [{"op": "join",
                 "right": {"format": "synthetic", "rows": 10, "seed": 7,
                   "schema": [{"name": "rid", "type": "int"}, {"name": "age", "type": "int"},
                              {"name": "rscore", "type": "float"},
                              {"name": "rcity", "type": "str"}, {"name": "rts", "type": "int"}]},
                 "on": ["age"], "how": "left"},
                {"op": "limit", "n": 0}]})");
    const ExecResult r = execute(spec, TraceConfig{});
    REQUIRE(r.trace.steps.size() == 2);
    CHECK(r.trace.steps[0].state_right.has_value());
    CHECK(r.trace.steps[0].state_right->row_count == 10);
    CHECK(r.trace.steps[0].sample_right.has_value());
    // P5 attaches to the limit step, then its A1 anomaly.
    bool p5 = false;
    for (const Hint& h : r.trace.steps[1].hints)
        if (h.code == HintCode::P5_LimitNonpositive) p5 = true;
    CHECK(p5);
}

TEST_CASE("caching resolver returns the same dataset object") {
    CachingSourceResolver resolver;
    SourceSpec s;
    s.format = SourceSpec::Format::Synthetic;
    s.rows = 10;
    s.seed = 5;
    const auto a = resolver.resolve(s);
    const auto b = resolver.resolve(s);
    CHECK(a.get() == b.get());
    SourceSpec t = s;
    t.seed = 6;
    CHECK(resolver.resolve(t).get() != a.get());
}

TEST_CASE("StepError carries the step index and input-side state") {
    DataState before;
    before.row_count = 42;
    const StepError e(3, "join", "right side vanished", before);
    CHECK(e.step_index() == 3);
    REQUIRE(e.state_before().has_value());
    CHECK(e.state_before()->row_count == 42);
    CHECK(std::string(e.what()) == "step 3 (join): right side vanished");
}

TEST_CASE("parse_spec_file reads from disk; missing file is an IoError") {
    {
        std::ofstream f("tmp_pipeline_spec.json", std::ios::binary);
        f << kSmallSpec;
    }
    const PipelineSpec spec = parse_spec_file("tmp_pipeline_spec.json");
    CHECK(spec.steps.size() == 4);
    CHECK_THROWS_AS(parse_spec_file("missing_spec.json"), IoError);
}
