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

#include "stepscope/report.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include "stepscope/errors.hpp"

namespace stepscope {

using nlohmann::ordered_json;

namespace {

// null -> null, bool/int -> native, float -> number except NaN/Inf which
// have no JSON literal, str -> string.
ordered_json value_to_json(const Value& v) {
    if (is_null(v)) return nullptr;
    switch (*value_type_of(v)) {
        case ValueType::Bool: return std::get<bool>(v);
        case ValueType::Int: return std::get<std::int64_t>(v);
        case ValueType::Float: {
            const double d = std::get<double>(v);
            if (std::isnan(d)) return "NaN";
            if (std::isinf(d)) return d > 0 ? "Infinity" : "-Infinity";
            return d;
        }
        case ValueType::Str: return std::get<std::string>(v);
    }
    return nullptr;
}

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

ordered_json state_to_json(const DataState& state) {
    ordered_json j;
    j["row_count"] = state.row_count;
    j["schema"] = schema_to_json(state.schema);
    ordered_json stats = ordered_json::array();
    for (const ColumnStats& s : state.column_stats) {
        ordered_json st;
        st["column"] = s.column;
        st["nulls_in_sample"] = s.nulls_in_sample;
        st["sample_size"] = s.sample_size;
        st["min"] = value_to_json(s.min);
        st["max"] = value_to_json(s.max);
        stats.push_back(std::move(st));
    }
    j["column_stats"] = std::move(stats);
    return j;
}

ordered_json sample_to_json(const SampleRows& rows) {
    ordered_json arr = ordered_json::array();
    for (const auto& row : rows) {
        ordered_json r = ordered_json::array();
        for (const Value& v : row) r.push_back(value_to_json(v));
        arr.push_back(std::move(r));
    }
    return arr;
}

ordered_json hint_to_json(const Hint& h) {
    ordered_json j;
    j["code"] = hint_code(h.code);
    j["name"] = hint_name(h.code);
    j["severity"] = to_string(h.severity);
    j["step_index"] = h.step_index;
    j["message"] = h.message;
    ordered_json ev = ordered_json::object();
    for (const auto& [key, val] : h.evidence) ev[key] = val;
    j["evidence"] = std::move(ev);
    return j;
}

} // namespace

std::string emit_json(const Trace& trace) {
    ordered_json j;
    j["version"] = trace.version;
    j["spec"] = trace.spec_echo;
    j["seed"] = trace.seed;
    j["sample_size"] = trace.sample_size;
    ordered_json steps = ordered_json::array();
    for (const StepTrace& st : trace.steps) {
        ordered_json s;
        s["step_index"] = st.step_index;
        s["op"] = st.op;
        s["params"] = st.params;
        s["state_before"] = state_to_json(st.state_before);
        s["state_after"] = state_to_json(st.state_after);
        if (st.state_right) s["state_right"] = state_to_json(*st.state_right);
        s["sample_before"] = sample_to_json(st.sample_before);
        s["sample_after"] = sample_to_json(st.sample_after);
        if (st.sample_right) s["sample_right"] = sample_to_json(*st.sample_right);
        ordered_json hints = ordered_json::array();
        for (const Hint& h : st.hints) hints.push_back(hint_to_json(h));
        s["hints"] = std::move(hints);
        s["duration_ns"] = st.duration_ns;
        s["instrumentation_ns"] = st.instrumentation_ns;
        steps.push_back(std::move(s));
    }
    j["steps"] = std::move(steps);
    ordered_json totals;
    totals["duration_ns"] = trace.totals.duration_ns;
    totals["instrumentation_ns"] = trace.totals.instrumentation_ns;
    j["totals"] = std::move(totals);
    return j.dump(2) + "\n";
}

namespace {

void put_line(std::ostringstream& out, std::string line, std::size_t width) {
    if (line.size() > width) {
        line.resize(width - 3);
        line += "...";
    }
    out << line << '\n';
}

void put_sample_table(std::ostringstream& out, const std::string& title, const Schema& schema,
                      const SampleRows& rows, std::size_t width) {
    put_line(out, title, width);
    std::string header = " ";
    for (std::size_t c = 0; c < schema.size(); ++c) {
        header += ' ';
        header += schema.at(c).name;
        if (c + 1 < schema.size()) header += " |";
    }
    put_line(out, std::move(header), width);
    if (rows.empty()) {
        put_line(out, "  (no rows)", width);
        return;
    }
    for (const auto& row : rows) {
        std::string line = " ";
        for (std::size_t c = 0; c < row.size(); ++c) {
            line += ' ';
            line += format_value(row[c]);
            if (c + 1 < row.size()) line += " |";
        }
        put_line(out, std::move(line), width);
    }
}

std::string signed_delta(std::uint64_t before, std::uint64_t after) {
    const auto b = static_cast<std::int64_t>(before);
    const auto a = static_cast<std::int64_t>(after);
    const std::int64_t d = a - b;
    return (d >= 0 ? "+" : "") + std::to_string(d);
}

std::string percent(double fraction) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f%%", fraction * 100.0);
    return buf;
}

} // namespace

std::string emit_text(const Trace& trace, std::size_t width) {
    if (width < 40) throw EngineError("emit_text: width must be >= 40");
    std::ostringstream out;
    put_line(out,
             "trace v" + std::to_string(trace.version) + "  seed=" + std::to_string(trace.seed) +
                 "  sample_size=" + std::to_string(trace.sample_size),
             width);
    for (const StepTrace& st : trace.steps) {
        put_line(out, "", width);
        put_line(out, "[" + std::to_string(st.step_index) + "] " + st.op + "(" +
                          st.params.dump() + ")",
                 width);
        put_line(out,
                 "rows: " + std::to_string(st.state_before.row_count) + " -> " +
                     std::to_string(st.state_after.row_count) + " (" +
                     signed_delta(st.state_before.row_count, st.state_after.row_count) + ")",
                 width);
        put_sample_table(out, "before sample:", st.state_before.schema, st.sample_before, width);
        if (st.state_right && st.sample_right) {
            put_line(out, "right rows: " + std::to_string(st.state_right->row_count), width);
            put_sample_table(out, "right sample:", st.state_right->schema, *st.sample_right,
                             width);
        }
        put_sample_table(out, "after sample:", st.state_after.schema, st.sample_after, width);
        for (const Hint& h : st.hints)
            put_line(out,
                     std::string(severity_tag(h.severity)) + " " + hint_name(h.code) + " " +
                         h.message,
                     width);
    }
    put_line(out, "", width);
    const std::int64_t dur = trace.totals.duration_ns;
    const std::int64_t ins = trace.totals.instrumentation_ns;
    const double share =
        (dur + ins) > 0 ? static_cast<double>(ins) / static_cast<double>(dur + ins) : 0.0;
    put_line(out,
             "totals: duration " + std::to_string(dur) + " ns, instrumentation " +
                 std::to_string(ins) + " ns, overhead share " + percent(share),
             width);
    return std::move(out).str();
}

} // namespace stepscope
