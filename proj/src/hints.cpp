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

#include "stepscope/hints.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

#include "stepscope/errors.hpp"
#include "stepscope/pipeline.hpp"
#include "stepscope/trace.hpp"

namespace stepscope {

const char* to_string(Severity s) {
    switch (s) {
        case Severity::Error: return "error";
        case Severity::Warn: return "warn";
        case Severity::Info: return "info";
    }
    return "?";
}

const char* severity_tag(Severity s) {
    switch (s) {
        case Severity::Error: return "ERROR";
        case Severity::Warn: return "WARN";
        case Severity::Info: return "INFO";
    }
    return "?";
}

const char* hint_code(HintCode c) {
    switch (c) {
        case HintCode::P1_SortFlagBroadcast: return "P1";
        case HintCode::P2_SortFlagArity: return "P2";
        case HintCode::P3_JoinKeyMissing: return "P3";
        case HintCode::P4_AggNonNumeric: return "P4";
        case HintCode::P5_LimitNonpositive: return "P5";
        case HintCode::P6_UnknownColumn: return "P6";
        case HintCode::P7_JoinTypeMismatch: return "P7";
        case HintCode::A1_EmptyResult: return "A1";
        case HintCode::A2_NoopFilter: return "A2";
        case HintCode::A3_JoinExplosion: return "A3";
        case HintCode::A4_NullGrowth: return "A4";
        case HintCode::A5_HeavyDedup: return "A5";
        case HintCode::A6_SampleKeyDisjoint: return "A6";
    }
    return "?";
}

const char* hint_name(HintCode c) {
    switch (c) {
        case HintCode::P1_SortFlagBroadcast: return "SORT_FLAG_BROADCAST";
        case HintCode::P2_SortFlagArity: return "SORT_FLAG_ARITY";
        case HintCode::P3_JoinKeyMissing: return "JOIN_KEY_MISSING";
        case HintCode::P4_AggNonNumeric: return "AGG_NON_NUMERIC";
        case HintCode::P5_LimitNonpositive: return "LIMIT_NONPOSITIVE";
        case HintCode::P6_UnknownColumn: return "UNKNOWN_COLUMN";
        case HintCode::P7_JoinTypeMismatch: return "JOIN_TYPE_MISMATCH";
        case HintCode::A1_EmptyResult: return "EMPTY_RESULT";
        case HintCode::A2_NoopFilter: return "NOOP_FILTER";
        case HintCode::A3_JoinExplosion: return "JOIN_EXPLOSION";
        case HintCode::A4_NullGrowth: return "NULL_GROWTH";
        case HintCode::A5_HeavyDedup: return "HEAVY_DEDUP";
        case HintCode::A6_SampleKeyDisjoint: return "SAMPLE_KEY_DISJOINT";
    }
    return "?";
}

Severity hint_severity(HintCode c) {
    switch (c) {
        case HintCode::P2_SortFlagArity:
        case HintCode::P3_JoinKeyMissing:
        case HintCode::P4_AggNonNumeric:
        case HintCode::P6_UnknownColumn:
        case HintCode::P7_JoinTypeMismatch:
            return Severity::Error;
        case HintCode::P5_LimitNonpositive:
        case HintCode::A1_EmptyResult:
        case HintCode::A3_JoinExplosion:
            return Severity::Warn;
        default:
            return Severity::Info;
    }
}

void HintConfig::validate() const {
    if (!(join_explosion_factor > 0.0))
        throw EngineError("hint config: join_explosion_factor must be > 0");
    if (!(null_growth_delta > 0.0 && null_growth_delta <= 1.0))
        throw EngineError("hint config: null_growth_delta must be in (0, 1]");
    if (!(dedup_ratio > 0.0 && dedup_ratio <= 1.0))
        throw EngineError("hint config: dedup_ratio must be in (0, 1]");
}

namespace {

Hint make_hint(HintCode code, std::uint64_t step,
               std::string message, std::map<std::string, nlohmann::json> evidence) {
    return Hint{code, hint_severity(code), step, std::move(message), std::move(evidence)};
}

std::string quoted(const std::string& s) { return "'" + s + "'"; }

void check_expr_columns(const char* op, const ExprPtr& expr, const Schema& schema,
                        std::uint64_t step, std::vector<Hint>& out) {
    if (!expr) return;
    const BindResult bound = bind_expr(*expr, schema);
    for (const BindIssue& issue : bound.issues) {
        if (issue.kind != BindIssue::Kind::UnknownColumn) continue;  // type errors are PlanErrors
        out.push_back(make_hint(HintCode::P6_UnknownColumn, step,
                                std::string(op) + ": unknown column " + quoted(issue.column),
                                {{"op", op}, {"column", issue.column}}));
    }
}

void check_column_list(const char* op, std::span<const std::string> columns,
                       const Schema& schema, std::uint64_t step, std::vector<Hint>& out) {
    for (const std::string& name : columns) {
        if (schema.has(name)) continue;
        out.push_back(make_hint(HintCode::P6_UnknownColumn, step,
                                std::string(op) + ": unknown column " + quoted(name),
                                {{"op", op}, {"column", name}}));
    }
}

void check_step(const Step& step, std::uint64_t index, const Schema& schema,
                std::vector<Hint>& out) {
    switch (step.op) {
        case Step::Op::Filter:
            check_expr_columns("filter", step.predicate, schema, index, out);
            break;
        case Step::Op::Select:
            check_column_list("select", step.columns, schema, index, out);
            break;
        case Step::Op::WithColumn:
            check_expr_columns("with_column", step.expr, schema, index, out);
            break;
        case Step::Op::Join: {
            std::optional<Schema> right;
            try {
                right = source_schema(*step.right);
            } catch (const std::exception&) {
                // Unresolvable right source becomes a PlanError; the key
                // rules need both schemas.
                break;
            }
            for (const std::string& key : step.join_on) {
                const auto li = schema.find(key);
                const auto ri = right->find(key);
                if (!li)
                    out.push_back(make_hint(
                        HintCode::P3_JoinKeyMissing, index,
                        "join: key " + quoted(key) + " is missing on the left side",
                        {{"key", key}, {"side", "left"}}));
                if (!ri)
                    out.push_back(make_hint(
                        HintCode::P3_JoinKeyMissing, index,
                        "join: key " + quoted(key) + " is missing on the right side",
                        {{"key", key}, {"side", "right"}}));
                if (li && ri && schema.at(*li).type != right->at(*ri).type) {
                    const char* lt = to_string(schema.at(*li).type);
                    const char* rt = to_string(right->at(*ri).type);
                    out.push_back(make_hint(
                        HintCode::P7_JoinTypeMismatch, index,
                        "join: key " + quoted(key) + " is " + lt + " on the left side, " +
                            rt + " on the right",
                        {{"key", key}, {"left_type", lt}, {"right_type", rt}}));
                }
            }
            break;
        }
        case Step::Op::GroupByAgg: {
            check_column_list("group_by_agg", step.keys, schema, index, out);
            for (const AggSpec& agg : step.aggs) {
                if (agg.func == AggFunc::Count && agg.column == "*") continue;
                const auto ci = schema.find(agg.column);
                if (!ci) {
                    out.push_back(make_hint(
                        HintCode::P6_UnknownColumn, index,
                        "group_by_agg: unknown column " + quoted(agg.column),
                        {{"op", "group_by_agg"}, {"column", agg.column}}));
                    continue;
                }
                const ValueType t = schema.at(*ci).type;
                const bool numeric = t == ValueType::Int || t == ValueType::Float;
                if ((agg.func == AggFunc::Sum || agg.func == AggFunc::Avg) && !numeric)
                    out.push_back(make_hint(
                        HintCode::P4_AggNonNumeric, index,
                        "group_by_agg: " + std::string(to_string(agg.func)) +
                            " over non-numeric column " + quoted(agg.column) + " (" +
                            to_string(t) + ")",
                        {{"func", to_string(agg.func)},
                         {"column", agg.column},
                         {"column_type", to_string(t)}}));
            }
            break;
        }
        case Step::Op::Sort: {
            check_column_list("sort", step.columns, schema, index, out);
            if (step.ascending_is_scalar && step.columns.size() > 1) {
                nlohmann::json names = nlohmann::json::array();
                for (const std::string& c : step.columns) names.push_back(c);
                out.push_back(make_hint(
                    HintCode::P1_SortFlagBroadcast, index,
                    std::string("sort: scalar ascending=") +
                        (step.ascending_scalar ? "true" : "false") + " applies to all " +
                        std::to_string(step.columns.size()) + " sort columns",
                    {{"ascending", step.ascending_scalar},
                     {"column_count", step.columns.size()},
                     {"columns", names}}));
            }
            if (!step.ascending_is_scalar &&
                step.ascending_list.size() != step.columns.size())
                out.push_back(make_hint(
                    HintCode::P2_SortFlagArity, index,
                    "sort: ascending list has " + std::to_string(step.ascending_list.size()) +
                        " flags for " + std::to_string(step.columns.size()) + " sort columns",
                    {{"ascending_count", step.ascending_list.size()},
                     {"column_count", step.columns.size()}}));
            break;
        }
        case Step::Op::Distinct:
        case Step::Op::Union:
            break;  // no parameter rules; union schema mismatch is a PlanError
        case Step::Op::Limit:
            if (step.limit_n <= 0)
                out.push_back(make_hint(HintCode::P5_LimitNonpositive, index,
                                        "limit: n=" + std::to_string(step.limit_n) +
                                            " yields an empty result",
                                        {{"n", step.limit_n}}));
            break;
    }
}

} // namespace

std::vector<Hint> check_parameters(const PipelineSpec& spec,
                                   std::span<const Schema> schema_chain) {
    std::vector<Hint> hints;
    // schema_chain[i] feeds step i; a truncated chain stops the checks at
    // the first step whose input schema is unknown.
    const std::size_t checkable = std::min(spec.steps.size(), schema_chain.size());
    for (std::size_t i = 0; i < checkable; ++i)
        check_step(spec.steps[i], i, schema_chain[i], hints);
    std::stable_sort(hints.begin(), hints.end(), [](const Hint& a, const Hint& b) {
        if (a.code != b.code) return a.code < b.code;
        return a.step_index < b.step_index;
    });
    return hints;
}

namespace {

double sample_null_fraction(std::uint64_t nulls, std::uint64_t sample) {
    return sample == 0 ? 0.0 : static_cast<double>(nulls) / static_cast<double>(sample);
}

using KeyTuple = std::vector<Value>;
struct TupleHash {
    std::size_t operator()(const KeyTuple& k) const { return row_identity_hash(k); }
};
struct TupleEq {
    bool operator()(const KeyTuple& a, const KeyTuple& b) const {
        return row_identity_equal(a, b);
    }
};

bool tuple_matchable(const KeyTuple& t) {
    for (const Value& v : t) {
        if (is_null(v)) return false;
        if (v.index() == 3 && std::isnan(std::get<double>(v))) return false;
    }
    return true;
}

} // namespace

std::vector<Hint> detect_anomalies(const StepTrace& step, const HintConfig& config) {
    std::vector<Hint> hints;
    const std::uint64_t rows_in = step.state_before.row_count;
    const std::uint64_t rows_out = step.state_after.row_count;
    const std::uint64_t idx = step.step_index;

    if (config.enabled(HintCode::A1_EmptyResult) && rows_out == 0 && rows_in > 0)
        hints.push_back(make_hint(HintCode::A1_EmptyResult, idx,
                                  "empty result: " + std::to_string(rows_in) +
                                      " rows in, 0 rows out",
                                  {{"rows_in", rows_in}, {"rows_out", rows_out}}));

    if (config.enabled(HintCode::A2_NoopFilter) && step.op == "filter" && rows_in > 0 &&
        rows_out == rows_in)
        hints.push_back(make_hint(HintCode::A2_NoopFilter, idx,
                                  "filter kept all " + std::to_string(rows_in) + " rows",
                                  {{"rows_in", rows_in}, {"rows_out", rows_out}}));

    if (config.enabled(HintCode::A3_JoinExplosion) && step.op == "join" && step.state_right) {
        const std::uint64_t rows_right = step.state_right->row_count;
        const double threshold = config.join_explosion_factor *
                                 static_cast<double>(std::max(rows_in, rows_right));
        if (static_cast<double>(rows_out) > threshold)
            hints.push_back(make_hint(
                HintCode::A3_JoinExplosion, idx,
                "join: " + std::to_string(rows_out) + " rows out, over " +
                    float_to_string(config.join_explosion_factor) + " x max(" +
                    std::to_string(rows_in) + ", " + std::to_string(rows_right) + ") = " +
                    float_to_string(threshold),
                {{"rows_left", rows_in},
                 {"rows_right", rows_right},
                 {"rows_out", rows_out},
                 {"factor", config.join_explosion_factor},
                 {"threshold", threshold}}));
    }

    if (config.enabled(HintCode::A4_NullGrowth)) {
        for (const ColumnStats& after : step.state_after.column_stats) {
            std::uint64_t nulls_before = 0, sample_before = 0;
            for (const ColumnStats& before : step.state_before.column_stats) {
                if (before.column == after.column) {
                    nulls_before = before.nulls_in_sample;
                    sample_before = before.sample_size;
                    break;
                }
            }
            // Columns new at this step count as fraction 0 before.
            const double f0 = sample_null_fraction(nulls_before, sample_before);
            const double f1 = sample_null_fraction(after.nulls_in_sample, after.sample_size);
            if (f1 - f0 > config.null_growth_delta)
                hints.push_back(make_hint(
                    HintCode::A4_NullGrowth, idx,
                    "column " + quoted(after.column) + ": sample null fraction rose from " +
                        float_to_string(f0) + " to " + float_to_string(f1),
                    {{"column", after.column},
                     {"nulls_before", nulls_before},
                     {"sample_before", sample_before},
                     {"nulls_after", after.nulls_in_sample},
                     {"sample_after", after.sample_size},
                     {"delta", config.null_growth_delta}}));
        }
    }

    if (config.enabled(HintCode::A5_HeavyDedup) && step.op == "distinct") {
        const double threshold = (1.0 - config.dedup_ratio) * static_cast<double>(rows_in);
        if (static_cast<double>(rows_out) < threshold)
            hints.push_back(make_hint(HintCode::A5_HeavyDedup, idx,
                                      "distinct kept " + std::to_string(rows_out) + " of " +
                                          std::to_string(rows_in) + " rows",
                                      {{"rows_in", rows_in},
                                       {"rows_out", rows_out},
                                       {"dedup_ratio", config.dedup_ratio},
                                       {"threshold", threshold}}));
    }

    if (config.enabled(HintCode::A6_SampleKeyDisjoint) && step.op == "join" &&
        step.state_right && step.sample_right && !step.sample_before.empty() &&
        !step.sample_right->empty() && step.params.contains("on")) {
        std::vector<std::size_t> lcols, rcols;
        bool resolvable = true;
        std::vector<std::string> keys;
        for (const auto& k : step.params["on"]) {
            const std::string key = k.get<std::string>();
            keys.push_back(key);
            const auto li = step.state_before.schema.find(key);
            const auto ri = step.state_right->schema.find(key);
            if (!li || !ri) { resolvable = false; break; }
            lcols.push_back(*li);
            rcols.push_back(*ri);
        }
        if (resolvable) {
            std::unordered_set<KeyTuple, TupleHash, TupleEq> left_keys;
            for (const auto& row : step.sample_before) {
                KeyTuple t;
                t.reserve(lcols.size());
                for (std::size_t c : lcols) t.push_back(row[c]);
                if (tuple_matchable(t)) left_keys.insert(std::move(t));
            }
            std::uint64_t shared = 0;
            for (const auto& row : *step.sample_right) {
                KeyTuple t;
                t.reserve(rcols.size());
                for (std::size_t c : rcols) t.push_back(row[c]);
                if (tuple_matchable(t) && left_keys.count(t)) ++shared;
            }
            if (shared == 0) {
                std::string key_list;
                for (std::size_t i = 0; i < keys.size(); ++i) {
                    if (i) key_list += ", ";
                    key_list += keys[i];
                }
                nlohmann::json key_json = nlohmann::json::array();
                for (const auto& k : keys) key_json.push_back(k);
                hints.push_back(make_hint(
                    HintCode::A6_SampleKeyDisjoint, idx,
                    "join: before-samples share no key values on (" + key_list +
                        "); sample-based and advisory",
                    {{"keys", key_json},
                     {"sample_left", step.sample_before.size()},
                     {"sample_right", step.sample_right->size()},
                     {"shared", shared}}));
            }
        }
    }

    return hints;
}

} // namespace stepscope
