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

#include "stepscope/pipeline.hpp"

#include <chrono>
#include <fstream>
#include <sstream>
#include <unordered_set>

#include "stepscope/errors.hpp"

namespace stepscope {

using nlohmann::ordered_json;

const char* op_name(Step::Op op) {
    switch (op) {
        case Step::Op::Filter: return "filter";
        case Step::Op::Select: return "select";
        case Step::Op::WithColumn: return "with_column";
        case Step::Op::Join: return "join";
        case Step::Op::GroupByAgg: return "group_by_agg";
        case Step::Op::Sort: return "sort";
        case Step::Op::Distinct: return "distinct";
        case Step::Op::Union: return "union";
        case Step::Op::Limit: return "limit";
    }
    return "?";
}

namespace {

[[noreturn]] void spec_fail(const std::string& where, const std::string& what) {
    throw ParseError("spec: " + where + ": " + what);
}

// Strict field discipline: every present key must be required or optional,
// every required key must be present.
void expect_fields(const ordered_json& obj, const std::string& where,
                   std::initializer_list<const char*> required,
                   std::initializer_list<const char*> optional = {}) {
    if (!obj.is_object()) spec_fail(where, "expected an object");
    for (const char* key : required)
        if (!obj.contains(key))
            spec_fail(where, std::string("missing required field '") + key + "'");
    for (const auto& item : obj.items()) {
        bool known = false;
        for (const char* key : required)
            if (item.key() == key) { known = true; break; }
        for (const char* key : optional)
            if (item.key() == key) { known = true; break; }
        if (!known) spec_fail(where, "unknown field '" + item.key() + "'");
    }
}

std::string get_string(const ordered_json& obj, const char* key, const std::string& where) {
    const auto& v = obj.at(key);
    if (!v.is_string()) spec_fail(where, std::string("field '") + key + "' must be a string");
    return v.get<std::string>();
}

std::uint64_t get_uint(const ordered_json& obj, const char* key, const std::string& where) {
    const auto& v = obj.at(key);
    if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0))
        spec_fail(where, std::string("field '") + key + "' must be a non-negative integer");
    return v.get<std::uint64_t>();
}

std::int64_t get_int(const ordered_json& obj, const char* key, const std::string& where) {
    const auto& v = obj.at(key);
    if (!v.is_number_integer() && !v.is_number_unsigned())
        spec_fail(where, std::string("field '") + key + "' must be an integer");
    return v.get<std::int64_t>();
}

std::vector<std::string> get_string_list(const ordered_json& obj, const char* key,
                                         const std::string& where, bool allow_empty) {
    const auto& v = obj.at(key);
    if (!v.is_array()) spec_fail(where, std::string("field '") + key + "' must be an array");
    if (!allow_empty && v.empty())
        spec_fail(where, std::string("field '") + key + "' must not be empty");
    std::vector<std::string> out;
    out.reserve(v.size());
    for (const auto& item : v) {
        if (!item.is_string())
            spec_fail(where, std::string("field '") + key + "' must hold strings");
        out.push_back(item.get<std::string>());
    }
    return out;
}

Schema parse_schema(const ordered_json& arr, const std::string& where) {
    if (!arr.is_array() || arr.empty())
        spec_fail(where, "field 'schema' must be a non-empty array");
    std::vector<Column> cols;
    cols.reserve(arr.size());
    for (const auto& item : arr) {
        expect_fields(item, where + ".schema", {"name", "type"});
        const std::string name = get_string(item, "name", where);
        const std::string type_text = get_string(item, "type", where);
        const auto type = value_type_from_string(type_text);
        if (!type) spec_fail(where, "unknown column type '" + type_text + "'");
        cols.push_back(Column{name, *type});
    }
    try {
        return Schema(std::move(cols));
    } catch (const EngineError& e) {
        spec_fail(where, e.what());
    }
}

SourceSpec parse_source(const ordered_json& j, const std::string& where) {
    if (!j.is_object()) spec_fail(where, "expected an object");
    if (!j.contains("format")) spec_fail(where, "missing required field 'format'");
    const std::string format = get_string(j, "format", where);
    SourceSpec spec;
    if (format == "csv") {
        expect_fields(j, where, {"format", "path", "schema"});
        spec.format = SourceSpec::Format::Csv;
        spec.path = get_string(j, "path", where);
        spec.schema = parse_schema(j.at("schema"), where);
    } else if (format == "jsonl") {
        expect_fields(j, where, {"format", "path"});
        spec.format = SourceSpec::Format::Jsonl;
        spec.path = get_string(j, "path", where);
    } else if (format == "synthetic") {
        expect_fields(j, where, {"format", "rows", "seed"}, {"schema"});
        spec.format = SourceSpec::Format::Synthetic;
        spec.rows = get_uint(j, "rows", where);
        spec.seed = get_uint(j, "seed", where);
        if (j.contains("schema")) spec.schema = parse_schema(j.at("schema"), where);
    } else {
        spec_fail(where, "unknown source format '" + format + "'");
    }
    return spec;
}

ExprPtr parse_step_expr(const std::string& text, const std::string& where) {
    try {
        return parse_expr(text);
    } catch (const ParseError& e) {
        spec_fail(where, e.what());
    }
}

Step parse_step(const ordered_json& j, std::size_t index) {
    const std::string where = "step " + std::to_string(index);
    if (!j.is_object()) spec_fail(where, "expected an object");
    if (!j.contains("op")) spec_fail(where, "missing required field 'op'");
    const std::string op = get_string(j, "op", where);

    Step step;
    if (op == "filter") {
        expect_fields(j, where, {"op", "predicate"});
        step.op = Step::Op::Filter;
        step.predicate_text = get_string(j, "predicate", where);
        step.predicate = parse_step_expr(step.predicate_text, where + " (filter)");
    } else if (op == "select") {
        expect_fields(j, where, {"op", "columns"});
        step.op = Step::Op::Select;
        step.columns = get_string_list(j, "columns", where, /*allow_empty=*/false);
    } else if (op == "with_column") {
        expect_fields(j, where, {"op", "name", "expr"});
        step.op = Step::Op::WithColumn;
        step.column_name = get_string(j, "name", where);
        if (step.column_name.empty()) spec_fail(where, "field 'name' must not be empty");
        step.expr_text = get_string(j, "expr", where);
        step.expr = parse_step_expr(step.expr_text, where + " (with_column)");
    } else if (op == "join") {
        expect_fields(j, where, {"op", "right", "on", "how"});
        step.op = Step::Op::Join;
        step.right = parse_source(j.at("right"), where + ".right");
        step.join_on = get_string_list(j, "on", where, /*allow_empty=*/false);
        const std::string how = get_string(j, "how", where);
        if (how == "inner") step.how = JoinHow::Inner;
        else if (how == "left") step.how = JoinHow::Left;
        else spec_fail(where, "unknown join how '" + how + "'");
    } else if (op == "group_by_agg") {
        expect_fields(j, where, {"op", "keys", "aggs"});
        step.op = Step::Op::GroupByAgg;
        step.keys = get_string_list(j, "keys", where, /*allow_empty=*/true);
        const auto& aggs = j.at("aggs");
        if (!aggs.is_array()) spec_fail(where, "field 'aggs' must be an array");
        for (const auto& item : aggs) {
            expect_fields(item, where + ".aggs", {"func", "column", "as"});
            AggSpec agg;
            const std::string func = get_string(item, "func", where);
            if (func == "count") agg.func = AggFunc::Count;
            else if (func == "sum") agg.func = AggFunc::Sum;
            else if (func == "min") agg.func = AggFunc::Min;
            else if (func == "max") agg.func = AggFunc::Max;
            else if (func == "avg") agg.func = AggFunc::Avg;
            else spec_fail(where, "unknown agg func '" + func + "'");
            agg.column = get_string(item, "column", where);
            if (agg.column == "*" && agg.func != AggFunc::Count)
                spec_fail(where, "'*' is valid only for count");
            agg.out_name = get_string(item, "as", where);
            if (agg.out_name.empty()) spec_fail(where, "field 'as' must not be empty");
            step.aggs.push_back(std::move(agg));
        }
    } else if (op == "sort") {
        expect_fields(j, where, {"op", "columns", "ascending"});
        step.op = Step::Op::Sort;
        step.columns = get_string_list(j, "columns", where, /*allow_empty=*/false);
        const auto& asc = j.at("ascending");
        if (asc.is_boolean()) {
            step.ascending_is_scalar = true;
            step.ascending_scalar = asc.get<bool>();
        } else if (asc.is_array()) {
            // A length mismatch is deliberately not a parse error; it is
            // validation hint P2.
            step.ascending_is_scalar = false;
            for (const auto& flag : asc) {
                if (!flag.is_boolean())
                    spec_fail(where, "field 'ascending' must hold booleans");
                step.ascending_list.push_back(flag.get<bool>());
            }
        } else {
            spec_fail(where, "field 'ascending' must be a boolean or boolean array");
        }
    } else if (op == "distinct") {
        expect_fields(j, where, {"op"});
        step.op = Step::Op::Distinct;
    } else if (op == "union") {
        expect_fields(j, where, {"op", "right"});
        step.op = Step::Op::Union;
        step.right = parse_source(j.at("right"), where + ".right");
    } else if (op == "limit") {
        expect_fields(j, where, {"op", "n"});
        step.op = Step::Op::Limit;
        step.limit_n = get_int(j, "n", where);
    } else {
        spec_fail(where, "unknown op '" + op + "'");
    }
    return step;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    if (in.bad()) throw IoError("read failed for '" + path + "'");
    return std::move(buf).str();
}

} // namespace

PipelineSpec parse_spec(std::string_view json_text) {
    ordered_json doc;
    try {
        doc = ordered_json::parse(json_text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(std::string("spec: ") + e.what());
    }
    expect_fields(doc, "document", {"source", "steps"});
    PipelineSpec spec;
    spec.source = parse_source(doc.at("source"), "source");
    const auto& steps = doc.at("steps");
    if (!steps.is_array()) spec_fail("document", "field 'steps' must be an array");
    for (std::size_t i = 0; i < steps.size(); ++i)
        spec.steps.push_back(parse_step(steps[i], i));
    return spec;
}

PipelineSpec parse_spec_file(const std::string& path) { return parse_spec(read_file(path)); }

namespace {

ordered_json schema_to_json(const Schema& schema) {
    ordered_json arr = ordered_json::array();
    for (const Column& c : schema.columns()) {
        ordered_json col;
        col["name"] = c.name;
        col["type"] = to_string(c.type);
        arr.push_back(std::move(col));
    }
    return arr;
}

} // namespace

ordered_json source_to_json(const SourceSpec& s) {
    ordered_json j;
    j["format"] = to_string(s.format);
    switch (s.format) {
        case SourceSpec::Format::Csv:
            j["path"] = s.path;
            j["schema"] = schema_to_json(*s.schema);
            break;
        case SourceSpec::Format::Jsonl:
            j["path"] = s.path;
            break;
        case SourceSpec::Format::Synthetic:
            j["rows"] = s.rows;
            j["seed"] = s.seed;
            if (s.schema) j["schema"] = schema_to_json(*s.schema);
            break;
    }
    return j;
}

ordered_json step_params_json(const Step& s) {
    ordered_json j = ordered_json::object();
    switch (s.op) {
        case Step::Op::Filter:
            j["predicate"] = s.predicate_text;
            break;
        case Step::Op::Select:
            j["columns"] = s.columns;
            break;
        case Step::Op::WithColumn:
            j["name"] = s.column_name;
            j["expr"] = s.expr_text;
            break;
        case Step::Op::Join:
            j["right"] = source_to_json(*s.right);
            j["on"] = s.join_on;
            j["how"] = to_string(s.how);
            break;
        case Step::Op::GroupByAgg: {
            j["keys"] = s.keys;
            ordered_json aggs = ordered_json::array();
            for (const AggSpec& a : s.aggs) {
                ordered_json agg;
                agg["func"] = to_string(a.func);
                agg["column"] = a.column;
                agg["as"] = a.out_name;
                aggs.push_back(std::move(agg));
            }
            j["aggs"] = std::move(aggs);
            break;
        }
        case Step::Op::Sort:
            j["columns"] = s.columns;
            if (s.ascending_is_scalar) {
                j["ascending"] = s.ascending_scalar;
            } else {
                ordered_json flags = ordered_json::array();
                for (bool f : s.ascending_list) flags.push_back(f);
                j["ascending"] = std::move(flags);
            }
            break;
        case Step::Op::Distinct:
            break;
        case Step::Op::Union:
            j["right"] = source_to_json(*s.right);
            break;
        case Step::Op::Limit:
            j["n"] = s.limit_n;
            break;
    }
    return j;
}

ordered_json spec_to_json(const PipelineSpec& spec) {
    ordered_json j;
    j["source"] = source_to_json(spec.source);
    ordered_json steps = ordered_json::array();
    for (const Step& s : spec.steps) {
        ordered_json step;
        step["op"] = op_name(s.op);
        const ordered_json params = step_params_json(s);
        for (const auto& item : params.items()) step[item.key()] = item.value();
        steps.push_back(std::move(step));
    }
    j["steps"] = std::move(steps);
    return j;
}

bool PlanInfo::ok() const {
    if (!errors.empty()) return false;
    for (const Hint& h : hints)
        if (h.severity == Severity::Error) return false;
    return true;
}

namespace {

// Output schema of one step, or nullopt when it cannot be computed. Catalog
// violations (P3/P4/P6/P7) truncate silently — check_parameters reports
// them; everything else becomes a PlanError.
std::optional<Schema> propagate_step(const Step& step, const Schema& in,
                                     std::uint64_t index, std::vector<PlanError>& errors) {
    const auto plan_error = [&](const std::string& msg) {
        errors.push_back(PlanError{index, msg});
    };
    switch (step.op) {
        case Step::Op::Filter: {
            const BindResult b = bind_expr(*step.predicate, in);
            for (const BindIssue& issue : b.issues)
                if (issue.kind == BindIssue::Kind::TypeError)
                    plan_error("filter: " + issue.message);
            if (b.ok() && b.type != StaticType::Bool && b.type != StaticType::NullT)
                plan_error(std::string("filter: predicate has type ") + to_string(b.type) +
                           ", expected bool");
            return in;  // schema unaffected even when the predicate is bad
        }
        case Step::Op::Select: {
            for (const std::string& c : step.columns)
                if (!in.has(c)) return std::nullopt;  // P6 covers it
            try {
                return select_schema(in, step.columns);
            } catch (const EngineError& e) {
                plan_error(e.what());
                return std::nullopt;
            }
        }
        case Step::Op::WithColumn: {
            const BindResult b = bind_expr(*step.expr, in);
            for (const BindIssue& issue : b.issues)
                if (issue.kind == BindIssue::Kind::TypeError)
                    plan_error("with_column: " + issue.message);
            if (!b.ok()) return std::nullopt;
            return with_column_schema(in, step.column_name, static_to_column_type(b.type));
        }
        case Step::Op::Join: {
            Schema right;
            try {
                right = source_schema(*step.right);
            } catch (const std::exception& e) {
                plan_error(std::string("join right source: ") + e.what());
                return std::nullopt;
            }
            for (const std::string& key : step.join_on) {
                const auto li = in.find(key);
                const auto ri = right.find(key);
                if (!li || !ri) return std::nullopt;  // P3 covers it
                if (in.at(*li).type != right.at(*ri).type) return std::nullopt;  // P7
            }
            try {
                return join_schema(in, right, step.join_on);
            } catch (const EngineError& e) {
                plan_error(e.what());
                return std::nullopt;
            }
        }
        case Step::Op::GroupByAgg: {
            for (const std::string& k : step.keys)
                if (!in.has(k)) return std::nullopt;  // P6
            for (const AggSpec& a : step.aggs) {
                if (a.func == AggFunc::Count && a.column == "*") continue;
                const auto ci = in.find(a.column);
                if (!ci) return std::nullopt;  // P6
                const ValueType t = in.at(*ci).type;
                const bool numeric = t == ValueType::Int || t == ValueType::Float;
                if ((a.func == AggFunc::Sum || a.func == AggFunc::Avg) && !numeric)
                    return std::nullopt;  // P4
            }
            try {
                return group_schema(in, step.keys, step.aggs);
            } catch (const EngineError& e) {
                plan_error(e.what());
                return std::nullopt;
            }
        }
        case Step::Op::Sort:
            return in;  // unknown columns (P6) and arity (P2) leave the schema intact
        case Step::Op::Distinct:
            return in;
        case Step::Op::Union: {
            Schema right;
            try {
                right = source_schema(*step.right);
            } catch (const std::exception& e) {
                plan_error(std::string("union right source: ") + e.what());
                return std::nullopt;
            }
            if (!(right == in)) {
                plan_error("union: right schema differs from the left");
                return std::nullopt;
            }
            return in;
        }
        case Step::Op::Limit:
            return in;
    }
    return std::nullopt;
}

} // namespace

PlanInfo validate_plan(const PipelineSpec& spec) {
    PlanInfo info;
    Schema current;
    try {
        current = source_schema(spec.source);
    } catch (const std::exception& e) {
        info.errors.push_back(
            PlanError{spec.steps.size(), std::string("source: ") + e.what()});
        info.hints = check_parameters(spec, info.schema_chain);
        return info;
    }
    info.schema_chain.push_back(current);
    for (std::size_t i = 0; i < spec.steps.size(); ++i) {
        auto next = propagate_step(spec.steps[i], info.schema_chain.back(), i, info.errors);
        if (!next) break;
        info.schema_chain.push_back(std::move(*next));
    }
    info.hints = check_parameters(spec, info.schema_chain);
    return info;
}

std::shared_ptr<const Dataset> SourceResolver::resolve(const SourceSpec& spec) {
    return std::make_shared<const Dataset>(resolve_source(spec));
}

std::shared_ptr<const Dataset> CachingSourceResolver::resolve(const SourceSpec& spec) {
    const std::string key = source_to_json(spec).dump();
    auto it = cache_.find(key);
    if (it != cache_.end()) return it->second;
    auto ds = SourceResolver::resolve(spec);
    cache_.emplace(key, ds);
    return ds;
}

StepError::StepError(std::uint64_t step_index, const std::string& op, const std::string& what,
                     std::optional<DataState> state_before)
    : std::runtime_error("step " + std::to_string(step_index) + " (" + op + "): " + what),
      step_index_(step_index),
      state_before_(std::move(state_before)) {}

namespace {

std::string plan_invalid_message(const PlanInfo& info) {
    for (const PlanError& e : info.errors)
        return "invalid plan: step " + std::to_string(e.step_index) + ": " + e.message;
    for (const Hint& h : info.hints)
        if (h.severity == Severity::Error)
            return "invalid plan: step " + std::to_string(h.step_index) + ": " + h.message;
    return "invalid plan";
}

} // namespace

PlanInvalid::PlanInvalid(PlanInfo info)
    : std::runtime_error(plan_invalid_message(info)), info_(std::move(info)) {}

namespace {

Dataset run_step(const Step& step, const Dataset& in, const Dataset* right) {
    switch (step.op) {
        case Step::Op::Filter: {
            const BindResult b = bind_expr(*step.predicate, in.schema());
            if (!b.ok()) throw EngineError("filter: predicate no longer binds");
            return filter(in, *b.expr);
        }
        case Step::Op::Select:
            return select(in, step.columns);
        case Step::Op::WithColumn: {
            const BindResult b = bind_expr(*step.expr, in.schema());
            if (!b.ok()) throw EngineError("with_column: expression no longer binds");
            return with_column(in, step.column_name, *b.expr,
                               static_to_column_type(b.type));
        }
        case Step::Op::Join:
            return join(in, *right, step.join_on, step.how);
        case Step::Op::GroupByAgg:
            return group_by_agg(in, step.keys, step.aggs);
        case Step::Op::Sort: {
            const std::vector<bool> ascending =
                step.ascending_is_scalar
                    ? std::vector<bool>(step.columns.size(), step.ascending_scalar)
                    : step.ascending_list;
            return sort(in, step.columns, ascending);
        }
        case Step::Op::Distinct:
            return distinct(in);
        case Step::Op::Union:
            return union_all(in, *right);
        case Step::Op::Limit:
            return limit(in, step.limit_n);
    }
    throw EngineError("unknown step op");
}

std::int64_t ns_between(std::chrono::steady_clock::time_point a,
                        std::chrono::steady_clock::time_point b) {
    return std::chrono::duration_cast<std::chrono::nanoseconds>(b - a).count();
}

} // namespace

ExecResult execute(const PipelineSpec& spec, const TraceConfig& config,
                   const HintConfig& hints, SourceResolver* resolver) {
    hints.validate();
    PlanInfo plan = validate_plan(spec);
    if (!plan.ok()) throw PlanInvalid(std::move(plan));

    SourceResolver default_resolver;
    if (!resolver) resolver = &default_resolver;

    ExecResult result;
    result.trace.spec_echo = spec_to_json(spec);
    result.trace.seed = config.seed;
    result.trace.sample_size = config.sample_size;

    std::shared_ptr<const Dataset> current = resolver->resolve(spec.source);

    using Clock = std::chrono::steady_clock;
    for (std::size_t i = 0; i < spec.steps.size(); ++i) {
        const Step& step = spec.steps[i];

        // Right-hand sources resolve outside every timed region.
        std::shared_ptr<const Dataset> right;
        if (step.right) right = resolver->resolve(*step.right);

        if (!config.enabled) {
            const auto t0 = Clock::now();
            Dataset out = run_step(step, *current, right.get());
            const auto t1 = Clock::now();
            result.trace.totals.duration_ns += ns_between(t0, t1);
            current = std::make_shared<const Dataset>(std::move(out));
            continue;
        }

        StepTrace st;
        st.step_index = i;
        st.op = op_name(step.op);
        st.params = step_params_json(step);

        // Per-step stream: a step's sample depends only on (seed, index,
        // its own data), never on how much earlier steps sampled.
        SplitMix64 prng(config.seed ^ static_cast<std::uint64_t>(i));

        const auto c0 = Clock::now();
        {
            Capture cap = capture_state(*current, config.sample_size, prng);
            st.state_before = std::move(cap.state);
            st.sample_before = std::move(cap.sample);
        }
        if (right) {
            Capture cap = capture_state(*right, config.sample_size, prng);
            st.state_right = std::move(cap.state);
            st.sample_right = std::move(cap.sample);
        }
        const auto c1 = Clock::now();
        st.instrumentation_ns = ns_between(c0, c1);

        const auto r0 = Clock::now();
        Dataset out;
        try {
            out = run_step(step, *current, right.get());
        } catch (const std::exception& e) {
            throw StepError(i, st.op, e.what(), std::move(st.state_before));
        }
        const auto r1 = Clock::now();
        st.duration_ns = ns_between(r0, r1);

        const auto c2 = Clock::now();
        {
            Capture cap = capture_state(out, config.sample_size, prng);
            st.state_after = std::move(cap.state);
            st.sample_after = std::move(cap.sample);
        }
        const auto c3 = Clock::now();
        st.instrumentation_ns += ns_between(c2, c3);

        // Surviving parameter hints for this step, then anomalies; both
        // halves are code-ordered so the concatenation is too. The disabled
        // set filters attachment only; the validity gate above saw all hints.
        for (const Hint& h : plan.hints)
            if (h.step_index == i && hints.enabled(h.code)) st.hints.push_back(h);
        for (Hint& h : detect_anomalies(st, hints)) st.hints.push_back(std::move(h));

        result.trace.totals.duration_ns += st.duration_ns;
        result.trace.totals.instrumentation_ns += st.instrumentation_ns;
        result.trace.steps.push_back(std::move(st));
        current = std::make_shared<const Dataset>(std::move(out));
    }

    result.output = std::move(current);
    return result;
}

} // namespace stepscope
