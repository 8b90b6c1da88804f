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

#include "stepscope/ingest.hpp"

#include <charconv>
#include <fstream>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "stepscope/errors.hpp"
#include "stepscope/prng.hpp"

namespace stepscope {

const char* to_string(SourceSpec::Format f) {
    switch (f) {
        case SourceSpec::Format::Csv: return "csv";
        case SourceSpec::Format::Jsonl: return "jsonl";
        case SourceSpec::Format::Synthetic: return "synthetic";
    }
    return "?";
}

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    if (in.bad()) throw IoError("read failed for '" + path + "'");
    return std::move(buf).str();
}

struct CsvField {
    std::string text;
    bool quoted = false;
};

struct CsvRecord {
    std::vector<CsvField> fields;
    std::size_t line = 0;  // 1-based physical line where the record starts
};

[[noreturn]] void csv_fail(std::size_t line, const std::string& what) {
    throw ParseError("csv line " + std::to_string(line) + ": " + what);
}

std::vector<CsvRecord> parse_csv(const std::string& content) {
    std::vector<CsvRecord> records;
    std::size_t pos = 0, line = 1;
    const std::size_t n = content.size();
    while (pos < n) {
        CsvRecord record;
        record.line = line;
        bool record_done = false;
        while (!record_done) {
            CsvField field;
            if (pos < n && content[pos] == '"') {
                field.quoted = true;
                ++pos;
                for (;;) {
                    if (pos >= n) csv_fail(record.line, "unterminated quoted field");
                    const char c = content[pos];
                    if (c == '"') {
                        if (pos + 1 < n && content[pos + 1] == '"') {  // "" escapes a quote
                            field.text.push_back('"');
                            pos += 2;
                            continue;
                        }
                        ++pos;
                        break;
                    }
                    if (c == '\n') ++line;
                    field.text.push_back(c);
                    ++pos;
                }
                if (pos < n && content[pos] != ',' && content[pos] != '\n' &&
                    !(content[pos] == '\r' && pos + 1 < n && content[pos + 1] == '\n'))
                    csv_fail(line, "text after closing quote");
            } else {
                while (pos < n) {
                    const char c = content[pos];
                    if (c == ',' || c == '\n') break;
                    if (c == '\r' && pos + 1 < n && content[pos + 1] == '\n') break;
                    field.text.push_back(c);
                    ++pos;
                }
            }
            record.fields.push_back(std::move(field));
            if (pos >= n) {
                record_done = true;
            } else if (content[pos] == ',') {
                ++pos;
            } else {
                if (content[pos] == '\r') ++pos;  // \r\n, the \r checked above
                ++pos;                            // the \n
                ++line;
                record_done = true;
            }
        }
        records.push_back(std::move(record));
    }
    return records;
}

Value parse_csv_field(const CsvField& field, const Column& col, std::size_t line) {
    if (!field.quoted && field.text.empty()) return Value{};
    const std::string& s = field.text;
    const auto fail = [&]() -> Value {
        csv_fail(line, "column '" + col.name + "': cannot parse '" + s + "' as " +
                           to_string(col.type));
    };
    switch (col.type) {
        case ValueType::Bool:
            if (s == "true") return Value{true};
            if (s == "false") return Value{false};
            return fail();
        case ValueType::Int: {
            std::int64_t v = 0;
            auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
            if (ec != std::errc{} || p != s.data() + s.size()) return fail();
            return Value{v};
        }
        case ValueType::Float: {
            if (s == "NaN") return Value{std::numeric_limits<double>::quiet_NaN()};
            if (s == "Infinity") return Value{std::numeric_limits<double>::infinity()};
            if (s == "-Infinity") return Value{-std::numeric_limits<double>::infinity()};
            double v = 0.0;
            auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
            if (ec != std::errc{} || p != s.data() + s.size()) return fail();
            return Value{v};
        }
        case ValueType::Str:
            return Value{s};
    }
    return fail();
}

ValueType json_value_type(const nlohmann::ordered_json& v, std::size_t line,
                          const std::string& key) {
    if (v.is_boolean()) return ValueType::Bool;
    if (v.is_number_float()) return ValueType::Float;
    if (v.is_number_integer() || v.is_number_unsigned()) return ValueType::Int;
    if (v.is_string()) return ValueType::Str;
    throw ParseError("jsonl line " + std::to_string(line) + ": nested value at key '" + key +
                     "'");
}

struct JsonlScan {
    std::vector<std::string> keys;
    std::vector<std::optional<ValueType>> types;
    std::vector<nlohmann::ordered_json> rows;  // kept only when keep_rows
};

JsonlScan scan_jsonl(const std::string& path, bool keep_rows, bool stop_when_resolved) {
    const std::string content = read_file(path);
    JsonlScan scan;
    std::size_t pos = 0, line = 0;
    bool resolved = false;
    while (pos < content.size() && !(stop_when_resolved && resolved)) {
        std::size_t end = content.find('\n', pos);
        if (end == std::string::npos) end = content.size();
        std::string_view text(content.data() + pos, end - pos);
        if (!text.empty() && text.back() == '\r') text.remove_suffix(1);
        pos = end + 1;
        ++line;

        nlohmann::ordered_json j;
        try {
            j = nlohmann::ordered_json::parse(text);
        } catch (const nlohmann::json::parse_error& e) {
            throw ParseError("jsonl line " + std::to_string(line) + ": " + e.what());
        }
        if (!j.is_object())
            throw ParseError("jsonl line " + std::to_string(line) + ": not an object");

        if (line == 1) {
            for (auto& [key, v] : j.items()) {
                scan.keys.push_back(key);
                scan.types.emplace_back();
                if (!v.is_null()) scan.types.back() = json_value_type(v, line, key);
            }
        } else {
            for (auto& [key, v] : j.items()) {
                std::size_t idx = scan.keys.size();
                for (std::size_t i = 0; i < scan.keys.size(); ++i)
                    if (scan.keys[i] == key) { idx = i; break; }
                if (idx == scan.keys.size())
                    throw ParseError("jsonl line " + std::to_string(line) +
                                     ": key '" + key + "' not in the inferred schema");
                if (v.is_null()) continue;
                const ValueType vt = json_value_type(v, line, key);
                if (!scan.types[idx]) {
                    scan.types[idx] = vt;
                } else if (*scan.types[idx] != vt &&
                           !(*scan.types[idx] == ValueType::Float && vt == ValueType::Int)) {
                    throw ParseError("jsonl line " + std::to_string(line) + ": column '" +
                                     key + "' has " + to_string(vt) + ", inferred " +
                                     to_string(*scan.types[idx]));
                }
            }
        }
        if (keep_rows) scan.rows.push_back(std::move(j));

        resolved = true;
        for (const auto& t : scan.types)
            if (!t) { resolved = false; break; }
    }
    if (line == 0) throw ParseError("jsonl: empty file, cannot infer a schema");
    return scan;
}

Schema scan_to_schema(const JsonlScan& scan) {
    std::vector<Column> cols;
    cols.reserve(scan.keys.size());
    for (std::size_t i = 0; i < scan.keys.size(); ++i)
        cols.push_back(Column{scan.keys[i], scan.types[i].value_or(ValueType::Str)});
    return Schema(std::move(cols));
}

void csv_escape_into(std::string& out, const std::string& s, bool force_quote) {
    const bool needs_quote = force_quote || s.empty() ||
                             s.find_first_of(",\"\n\r") != std::string::npos;
    if (!needs_quote) {
        out += s;
        return;
    }
    out.push_back('"');
    for (char c : s) {
        if (c == '"') out.push_back('"');
        out.push_back(c);
    }
    out.push_back('"');
}

} // namespace

Dataset read_csv(const std::string& path, const Schema& schema) {
    const std::string content = read_file(path);
    const std::vector<CsvRecord> records = parse_csv(content);
    if (records.empty()) throw ParseError("csv line 1: missing header");

    const CsvRecord& header = records[0];
    if (header.fields.size() != schema.size())
        csv_fail(header.line, "header has " + std::to_string(header.fields.size()) +
                                  " fields, schema has " + std::to_string(schema.size()));
    for (std::size_t i = 0; i < schema.size(); ++i)
        if (header.fields[i].text != schema.at(i).name)
            csv_fail(header.line, "header field " + std::to_string(i + 1) + " is '" +
                                      header.fields[i].text + "', schema says '" +
                                      schema.at(i).name + "'");

    Dataset out(schema);
    out.reserve_rows(records.size() - 1);
    std::vector<Value> scratch(schema.size());
    for (std::size_t r = 1; r < records.size(); ++r) {
        const CsvRecord& record = records[r];
        if (record.fields.size() != schema.size())
            csv_fail(record.line, "expected " + std::to_string(schema.size()) +
                                      " fields, got " + std::to_string(record.fields.size()));
        for (std::size_t c = 0; c < schema.size(); ++c)
            scratch[c] = parse_csv_field(record.fields[c], schema.at(c), record.line);
        out.append_row(std::span<const Value>(scratch));
    }
    return out;
}

Dataset read_jsonl(const std::string& path) {
    const JsonlScan scan = scan_jsonl(path, /*keep_rows=*/true, /*stop_when_resolved=*/false);
    const Schema schema = scan_to_schema(scan);
    Dataset out(schema);
    out.reserve_rows(scan.rows.size());
    std::vector<Value> scratch(schema.size());
    for (const nlohmann::ordered_json& j : scan.rows) {
        for (std::size_t c = 0; c < schema.size(); ++c) {
            auto it = j.find(schema.at(c).name);
            if (it == j.end() || it->is_null()) {
                scratch[c] = Value{};
                continue;
            }
            switch (schema.at(c).type) {
                case ValueType::Bool: scratch[c] = Value{it->get<bool>()}; break;
                case ValueType::Int: scratch[c] = Value{it->get<std::int64_t>()}; break;
                case ValueType::Float: scratch[c] = Value{it->get<double>()}; break;
                case ValueType::Str: scratch[c] = Value{it->get<std::string>()}; break;
            }
        }
        out.append_row(std::span<const Value>(scratch));
    }
    return out;
}

Schema infer_jsonl_schema(const std::string& path) {
    return scan_to_schema(scan_jsonl(path, /*keep_rows=*/false, /*stop_when_resolved=*/true));
}

Schema synthetic_schema() {
    return Schema({Column{"id", ValueType::Int},
                   Column{"age", ValueType::Int},
                   Column{"score", ValueType::Float},
                   Column{"city", ValueType::Str},
                   Column{"ts", ValueType::Int}});
}

Dataset generate_synthetic(std::uint64_t row_count, std::uint64_t seed) {
    static const std::vector<std::string> cities = [] {
        std::vector<std::string> v;
        v.reserve(50);
        for (int i = 0; i < 50; ++i) {
            char buf[8];
            std::snprintf(buf, sizeof(buf), "city%02d", i);
            v.emplace_back(buf);
        }
        return v;
    }();

    Dataset out(synthetic_schema());
    out.reserve_rows(row_count);
    SplitMix64 prng(seed);
    std::vector<Value> scratch(5);
    for (std::uint64_t r = 0; r < row_count; ++r) {
        scratch[0] = Value{static_cast<std::int64_t>(r)};
        scratch[1] = Value{static_cast<std::int64_t>(1 + prng.next() % 100)};
        scratch[2] = Value{prng.next_unit()};
        scratch[3] = Value{cities[prng.next() % 50]};
        scratch[4] = Value{static_cast<std::int64_t>(prng.next() % 1000000000)};
        out.append_row(std::span<const Value>(scratch));
    }
    return out;
}

std::string write_csv(const Dataset& ds) {
    std::string out;
    const Schema& schema = ds.schema();
    for (std::size_t c = 0; c < schema.size(); ++c) {
        if (c) out.push_back(',');
        csv_escape_into(out, schema.at(c).name, false);
    }
    out.push_back('\n');
    for (std::size_t r = 0; r < ds.row_count(); ++r) {
        auto row = ds.row(r);
        for (std::size_t c = 0; c < row.size(); ++c) {
            if (c) out.push_back(',');
            const Value& v = row[c];
            if (is_null(v)) continue;  // Null is the empty field
            if (v.index() == 4)
                csv_escape_into(out, std::get<std::string>(v), std::get<std::string>(v).empty());
            else
                out += format_value(v);
        }
        out.push_back('\n');
    }
    return out;
}

void write_csv_file(const std::string& path, const Dataset& ds) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    const std::string text = write_csv(ds);
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out) throw IoError("write failed for '" + path + "'");
}

namespace {

// A synthetic rename keeps arity and types, only the names change.
Schema checked_rename(const Schema& renamed) {
    const Schema base = synthetic_schema();
    if (renamed.size() != base.size())
        throw EngineError("synthetic schema rename must keep " + std::to_string(base.size()) +
                          " columns, got " + std::to_string(renamed.size()));
    for (std::size_t i = 0; i < base.size(); ++i)
        if (renamed.at(i).type != base.at(i).type)
            throw EngineError("synthetic schema rename must keep column " +
                              std::to_string(i + 1) + " as " + to_string(base.at(i).type) +
                              ", got " + to_string(renamed.at(i).type));
    return renamed;
}

} // namespace

Dataset resolve_source(const SourceSpec& spec) {
    switch (spec.format) {
        case SourceSpec::Format::Csv:
            if (!spec.schema) throw EngineError("csv source requires a schema");
            return read_csv(spec.path, *spec.schema);
        case SourceSpec::Format::Jsonl:
            return read_jsonl(spec.path);
        case SourceSpec::Format::Synthetic: {
            Dataset data = generate_synthetic(spec.rows, spec.seed);
            if (!spec.schema) return data;
            Dataset renamed(checked_rename(*spec.schema));
            renamed.reserve_rows(data.row_count());
            for (std::size_t r = 0; r < data.row_count(); ++r)
                renamed.append_row(data.row(r));
            return renamed;
        }
    }
    throw EngineError("unknown source format");
}

Schema source_schema(const SourceSpec& spec) {
    switch (spec.format) {
        case SourceSpec::Format::Csv:
            if (!spec.schema) throw EngineError("csv source requires a schema");
            return *spec.schema;
        case SourceSpec::Format::Jsonl:
            return infer_jsonl_schema(spec.path);
        case SourceSpec::Format::Synthetic:
            return spec.schema ? checked_rename(*spec.schema) : synthetic_schema();
    }
    throw EngineError("unknown source format");
}

} // namespace stepscope
