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

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "stepscope/value.hpp"

namespace stepscope {

struct Column {
    std::string name;
    ValueType type;

    bool operator==(const Column&) const = default;
};

/// Ordered, uniquely named, non-empty column names. Case-sensitive.
class Schema {
public:
    Schema() = default;
    explicit Schema(std::vector<Column> columns); // throws EngineError on dup/empty names

    const std::vector<Column>& columns() const { return columns_; }
    std::size_t size() const { return columns_.size(); }
    const Column& at(std::size_t i) const { return columns_.at(i); }
    std::optional<std::size_t> find(std::string_view name) const;
    bool has(std::string_view name) const { return find(name).has_value(); }

    bool operator==(const Schema&) const = default;

private:
    std::vector<Column> columns_;
};

/// Typed rows in row-major storage. Immutable through the operator API:
/// operators take const Datasets and build fresh ones. append_row is the
/// only mutation and enforces arity and per-column type of non-null cells.
class Dataset {
public:
    Dataset() = default;
    explicit Dataset(Schema schema) : schema_(std::move(schema)) {}

    const Schema& schema() const { return schema_; }
    std::size_t width() const { return schema_.size(); }
    std::size_t row_count() const { return rows_; }

    std::span<const Value> row(std::size_t i) const {
        return {cells_.data() + i * width(), width()};
    }
    const Value& at(std::size_t row, std::size_t col) const {
        return cells_[row * width() + col];
    }

    void reserve_rows(std::size_t n) { cells_.reserve(n * width()); }
    void append_row(std::vector<Value> row);          // moves cells in
    void append_row(std::span<const Value> row);      // copies cells

private:
    void check_row(std::span<const Value> row) const;

    Schema schema_;
    std::vector<Value> cells_;
    std::size_t rows_ = 0;
};

/// Row-identity equality of schema and every cell (Null==Null, NaN==NaN).
bool datasets_identical(const Dataset& a, const Dataset& b);

/// Bit-exact equality: schema plus every cell via value_bits_equal.
bool datasets_bits_equal(const Dataset& a, const Dataset& b);

} // namespace stepscope
