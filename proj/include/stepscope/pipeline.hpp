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
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "stepscope/expr.hpp"
#include "stepscope/hints.hpp"
#include "stepscope/ingest.hpp"
#include "stepscope/ops.hpp"
#include "stepscope/trace.hpp"

namespace stepscope {

struct Step {
    enum class Op : std::uint8_t {
        Filter, Select, WithColumn, Join, GroupByAgg, Sort, Distinct, Union, Limit
    };

    Op op;

    std::string predicate_text;              // filter
    ExprPtr predicate;
    std::vector<std::string> columns;        // select, sort
    std::string column_name;                 // with_column
    std::string expr_text;
    ExprPtr expr;
    std::optional<SourceSpec> right;         // join, union
    std::vector<std::string> join_on;        // join
    JoinHow how = JoinHow::Inner;
    std::vector<std::string> keys;           // group_by_agg
    std::vector<AggSpec> aggs;
    bool ascending_is_scalar = false;        // sort
    bool ascending_scalar = true;
    std::vector<bool> ascending_list;
    std::int64_t limit_n = 0;                // limit
};

const char* op_name(Step::Op op);

struct PipelineSpec {
    SourceSpec source;
    std::vector<Step> steps;
};

/// Strict parse of the pipeline document: unknown ops, unknown fields,
/// missing params and malformed expressions are all ParseErrors.
PipelineSpec parse_spec(std::string_view json_text);
PipelineSpec parse_spec_file(const std::string& path);

// Canonical serialization (fixed key order) used for the trace spec echo
// and source cache keys.
nlohmann::ordered_json source_to_json(const SourceSpec& s);
nlohmann::ordered_json step_params_json(const Step& s);
nlohmann::ordered_json spec_to_json(const PipelineSpec& spec);

/// Non-catalog schema/type violation found during validation.
struct PlanError {
    std::uint64_t step_index;  // steps.size() means the source itself
    std::string message;
};

struct PlanInfo {
    // schema_chain[0] is the source schema, schema_chain[i+1] the schema
    // after step i. Truncated at the first failing step.
    std::vector<Schema> schema_chain;
    std::vector<Hint> hints;       // ordered by rule code, then step
    std::vector<PlanError> errors;

    bool ok() const;  // no errors, no error-severity hints
};

/// Static schema propagation over all steps, before any data is read
/// (jsonl sources: schema structure inferred from the file). Returns the
/// chain plus every matching parameter hint.
PlanInfo validate_plan(const PipelineSpec& spec);

/// Loads sources for execution. The default resolver reads/generates on
/// every call; the caching resolver dedups by canonical source JSON so
/// repeated runs (bench) exclude data generation from timed regions.
class SourceResolver {
public:
    virtual ~SourceResolver() = default;
    virtual std::shared_ptr<const Dataset> resolve(const SourceSpec& spec);
};

class CachingSourceResolver : public SourceResolver {
public:
    std::shared_ptr<const Dataset> resolve(const SourceSpec& spec) override;

private:
    std::map<std::string, std::shared_ptr<const Dataset>> cache_;
};

/// Runtime failure inside a step; carries the input-side state for
/// post-mortem when tracing was on.
class StepError : public std::runtime_error {
public:
    StepError(std::uint64_t step_index, const std::string& op, const std::string& what,
              std::optional<DataState> state_before);

    std::uint64_t step_index() const { return step_index_; }
    const std::optional<DataState>& state_before() const { return state_before_; }

private:
    std::uint64_t step_index_;
    std::optional<DataState> state_before_;
};

/// Raised by execute() when validation failed; carries the PlanInfo.
class PlanInvalid : public std::runtime_error {
public:
    explicit PlanInvalid(PlanInfo info);
    const PlanInfo& info() const { return info_; }

private:
    PlanInfo info_;
};

struct ExecResult {
    std::shared_ptr<const Dataset> output;
    Trace trace;
};

/// Run the chain. With tracing enabled, each step gets before/after state
/// and samples (per-step prng = seed xor step_index) plus anomaly hints;
/// disabled runs produce a bit-identical final dataset and a totals-only
/// trace. Parameter hints of surviving severities are attached to their
/// step's trace.
ExecResult execute(const PipelineSpec& spec, const TraceConfig& config,
                   const HintConfig& hints = {}, SourceResolver* resolver = nullptr);

} // namespace stepscope
