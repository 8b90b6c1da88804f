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

#include "stepscope/dataset.hpp"

namespace stepscope {

struct SourceSpec {
    enum class Format : std::uint8_t { Csv, Jsonl, Synthetic };

    Format format = Format::Synthetic;
    std::string path;                 // csv/jsonl
    std::optional<Schema> schema;     // csv: required; synthetic: optional column rename
    std::uint64_t rows = 0;           // synthetic
    std::uint64_t seed = 0;           // synthetic

    bool operator==(const SourceSpec&) const = default;
};

const char* to_string(SourceSpec::Format f);

/// Strict CSV: comma delimiter, `"` quoting with doubled-quote escape,
/// UTF-8, \n or \r\n line ends. First line is a header that must match the
/// schema names in order. Empty field -> Null; `""` -> empty string.
/// Errors carry line number, column name and the raw field text.
Dataset read_csv(const std::string& path, const Schema& schema);

/// One flat JSON object per line. Schema inferred from the first line
/// (fractional/exponent number -> float, else int); null defers a column's
/// type to a later line, defaulting to str if never resolved. Missing keys
/// -> Null; unknown keys, nested values and cross-line type conflicts are
/// errors with a line number. An int-shaped number is accepted in a float
/// column (widened); the reverse is a conflict.
Dataset read_jsonl(const std::string& path);

/// The schema read_jsonl would infer, scanning only as far as needed to
/// resolve every column type. Used for static plan validation.
Schema infer_jsonl_schema(const std::string& path);

/// Schema of generate_synthetic output.
Schema synthetic_schema();

/// Deterministic benchmark data: [id sequential, age in [1,100], score in
/// [0,1), city in {"city00".."city49"}, ts in [0,1e9)]; one splitmix64
/// stream seeded with `seed`, drawn in field order per row.
Dataset generate_synthetic(std::uint64_t row_count, std::uint64_t seed);

/// Sample/dataset dump in the read_csv dialect: Null -> empty field, empty
/// string -> `""`, floats as shortest round-trip decimals, bools as
/// true/false. read_csv(write_csv(d)) == d for control-character-free data.
std::string write_csv(const Dataset& ds);
void write_csv_file(const std::string& path, const Dataset& ds);

/// Load whatever the spec describes (applies the synthetic rename).
Dataset resolve_source(const SourceSpec& spec);

/// Static schema of a source: csv -> declared, synthetic -> fixed or
/// renamed, jsonl -> infer_jsonl_schema.
Schema source_schema(const SourceSpec& spec);

} // namespace stepscope
