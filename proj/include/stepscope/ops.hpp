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
#include <span>
#include <string>
#include <vector>

#include "stepscope/dataset.hpp"
#include "stepscope/expr.hpp"

namespace stepscope {

enum class JoinHow : std::uint8_t { Inner, Left };

enum class AggFunc : std::uint8_t { Count, Sum, Min, Max, Avg };

const char* to_string(JoinHow h);
const char* to_string(AggFunc f);

struct AggSpec {
    AggFunc func;
    std::string column;   // "*" allowed for count only
    std::string out_name;
};

// Static output-schema computation, shared by plan validation and the
// operators themselves so the predicted schema always matches runtime.
Schema select_schema(const Schema& in, std::span<const std::string> columns);
Schema with_column_schema(const Schema& in, const std::string& name, ValueType type);
Schema join_schema(const Schema& left, const Schema& right, std::span<const std::string> on);
Schema group_schema(const Schema& in, std::span<const std::string> keys, std::span<const AggSpec> aggs);

/// Rows where the predicate evaluates to Bool(true), original order.
Dataset filter(const Dataset& in, const BoundExpr& predicate);

/// Projection: schema reduced/reordered, row count preserved.
Dataset select(const Dataset& in, std::span<const std::string> columns);

/// Derived column: replaces `name` if present, else appends. `type` is the
/// expression's static type.
Dataset with_column(const Dataset& in, const std::string& name, const BoundExpr& expr,
                    ValueType type);

/// Hash join on key equality (Null and NaN keys never match). Output is
/// left columns then right non-key columns; left row order, matches in
/// right row order; `Left` pads unmatched rows with Nulls.
Dataset join(const Dataset& left, const Dataset& right, std::span<const std::string> on,
             JoinHow how);

/// One row per distinct key tuple, first-appearance order. Null is a
/// groupable key value. sum/min/max/avg skip Nulls (all-Null group ->
/// Null); count counts all rows in the group; avg is Float.
Dataset group_by_agg(const Dataset& in, std::span<const std::string> keys,
                     std::span<const AggSpec> aggs);

/// Stable multi-key sort; ascending has one flag per column. Nulls order
/// last in both directions; NaN after non-NaN floats.
Dataset sort(const Dataset& in, std::span<const std::string> columns,
             const std::vector<bool>& ascending);

/// First occurrence of each full-row identity, order preserved.
Dataset distinct(const Dataset& in);

/// a's rows then b's rows, no dedup. Schemas must be identical.
Dataset union_all(const Dataset& a, const Dataset& b);

/// First min(n, row_count) rows; negative n behaves as 0.
Dataset limit(const Dataset& in, std::int64_t n);

} // namespace stepscope
