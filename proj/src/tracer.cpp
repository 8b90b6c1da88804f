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

#include "stepscope/trace.hpp"

#include <algorithm>

namespace stepscope {

std::vector<std::uint64_t> reservoir_sample_indices(std::uint64_t n, std::uint64_t k,
                                                    SplitMix64& prng) {
    std::vector<std::uint64_t> slots;
    const std::uint64_t filled = std::min(n, k);
    slots.reserve(filled);
    for (std::uint64_t i = 0; i < filled; ++i) slots.push_back(i);
    // Exactly one draw per row past the k-th, whether or not it replaces.
    for (std::uint64_t i = k; i < n; ++i) {
        const std::uint64_t j = prng.next() % (i + 1);
        if (j < k) slots[j] = i;
    }
    return slots;
}

SampleRows reservoir_sample(const Dataset& ds, std::uint64_t k, SplitMix64& prng) {
    const auto indices = reservoir_sample_indices(ds.row_count(), k, prng);
    SampleRows rows;
    rows.reserve(indices.size());
    for (std::uint64_t i : indices) {
        auto row = ds.row(i);
        rows.emplace_back(row.begin(), row.end());
    }
    return rows;
}

Capture capture_state(const Dataset& ds, std::uint64_t k, SplitMix64& prng) {
    Capture cap;
    cap.state.row_count = ds.row_count();
    cap.state.schema = ds.schema();
    cap.sample = reservoir_sample(ds, k, prng);

    cap.state.column_stats.reserve(ds.width());
    for (std::size_t c = 0; c < ds.width(); ++c) {
        ColumnStats stats;
        stats.column = ds.schema().at(c).name;
        stats.sample_size = cap.sample.size();
        const bool ordered = ds.schema().at(c).type != ValueType::Bool;
        for (const auto& row : cap.sample) {
            const Value& v = row[c];
            if (is_null(v)) {
                ++stats.nulls_in_sample;
                continue;
            }
            if (!ordered) continue;
            if (is_null(stats.min) || value_order_compare(v, stats.min) < 0) stats.min = v;
            if (is_null(stats.max) || value_order_compare(v, stats.max) > 0) stats.max = v;
        }
        cap.state.column_stats.push_back(std::move(stats));
    }
    return cap;
}

} // namespace stepscope
