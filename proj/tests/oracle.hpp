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

// Brute-force reference implementations of every operator: nested-loop
// join, comparison sort, linear-scan distinct/group/filter. Written for
// obviousness, not speed; quadratic everywhere. Int sums assume the data
// generator keeps totals inside int64 range.

#include "stepscope/expr.hpp"
#include "stepscope/ops.hpp"

namespace stepscope::oracle {

Dataset filter(const Dataset& in, const BoundExpr& pred);
Dataset select(const Dataset& in, const std::vector<std::string>& columns);
Dataset with_column(const Dataset& in, const std::string& name, const BoundExpr& expr,
                    ValueType type);
Dataset join(const Dataset& left, const Dataset& right, const std::vector<std::string>& on,
             JoinHow how);
Dataset group_by_agg(const Dataset& in, const std::vector<std::string>& keys,
                     const std::vector<AggSpec>& aggs);
Dataset sort(const Dataset& in, const std::vector<std::string>& columns,
             const std::vector<bool>& ascending);
Dataset distinct(const Dataset& in);
Dataset union_all(const Dataset& left, const Dataset& right);
Dataset limit(const Dataset& in, std::int64_t n);

} // namespace stepscope::oracle
