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

#include "stepscope/dataset.hpp"

#include <unordered_set>

#include "stepscope/errors.hpp"

namespace stepscope {

Schema::Schema(std::vector<Column> columns) : columns_(std::move(columns)) {
    std::unordered_set<std::string_view> seen;
    for (const Column& c : columns_) {
        if (c.name.empty()) throw EngineError("schema: empty column name");
        if (!seen.insert(c.name).second)
            throw EngineError("schema: duplicate column name '" + c.name + "'");
    }
}

std::optional<std::size_t> Schema::find(std::string_view name) const {
    for (std::size_t i = 0; i < columns_.size(); ++i)
        if (columns_[i].name == name) return i;
    return std::nullopt;
}

void Dataset::check_row(std::span<const Value> row) const {
    if (row.size() != schema_.size())
        throw EngineError("row arity " + std::to_string(row.size()) +
                          " does not match schema arity " + std::to_string(schema_.size()));
    for (std::size_t i = 0; i < row.size(); ++i) {
        const auto t = value_type_of(row[i]);
        if (t && *t != schema_.at(i).type)
            throw EngineError("column '" + schema_.at(i).name + "' expects " +
                              to_string(schema_.at(i).type) + ", got " + to_string(*t));
    }
}

void Dataset::append_row(std::vector<Value> row) {
    check_row(row);
    cells_.insert(cells_.end(), std::make_move_iterator(row.begin()),
                  std::make_move_iterator(row.end()));
    ++rows_;
}

void Dataset::append_row(std::span<const Value> row) {
    check_row(row);
    cells_.insert(cells_.end(), row.begin(), row.end());
    ++rows_;
}

bool datasets_identical(const Dataset& a, const Dataset& b) {
    if (!(a.schema() == b.schema())) return false;
    if (a.row_count() != b.row_count()) return false;
    for (std::size_t r = 0; r < a.row_count(); ++r)
        if (!row_identity_equal(a.row(r), b.row(r))) return false;
    return true;
}

bool datasets_bits_equal(const Dataset& a, const Dataset& b) {
    if (!(a.schema() == b.schema())) return false;
    if (a.row_count() != b.row_count()) return false;
    for (std::size_t r = 0; r < a.row_count(); ++r) {
        auto ra = a.row(r), rb = b.row(r);
        for (std::size_t c = 0; c < ra.size(); ++c)
            if (!value_bits_equal(ra[c], rb[c])) return false;
    }
    return true;
}

} // namespace stepscope
