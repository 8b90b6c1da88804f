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

#include <cmath>
#include <limits>

#include <doctest.h>

#include "stepscope/trace.hpp"

using namespace stepscope;

namespace {

const double kNaN = std::numeric_limits<double>::quiet_NaN();

Dataset mixed(std::size_t rows) {
    Dataset ds(Schema{{{"i", ValueType::Int},
                       {"f", ValueType::Float},
                       {"s", ValueType::Str},
                       {"b", ValueType::Bool}}});
    for (std::size_t r = 0; r < rows; ++r) {
        ds.append_row({r % 4 == 0 ? Value{} : Value{static_cast<std::int64_t>(r)},
                       r % 5 == 0 ? Value{kNaN} : Value{static_cast<double>(r) / 2.0},
                       Value{std::string("s") + std::to_string(r % 3)},
                       Value{r % 2 == 0}});
    }
    return ds;
}

} // namespace

TEST_CASE("capture_state: exact row count, sample-derived statistics") {
    const Dataset ds = mixed(30);
    SplitMix64 g(1);
    const Capture cap = capture_state(ds, 5, g);

    CHECK(cap.state.row_count == 30);
    CHECK(cap.state.schema == ds.schema());
    REQUIRE(cap.sample.size() == 5);
    REQUIRE(cap.state.column_stats.size() == 4);

    // The stats must be recomputable from the sample alone.
    SplitMix64 g2(1);
    const auto idx = reservoir_sample_indices(30, 5, g2);
    for (std::size_t c = 0; c < 4; ++c) {
        const ColumnStats& st = cap.state.column_stats[c];
        CHECK(st.column == ds.schema().at(c).name);
        CHECK(st.sample_size == 5);
        std::uint64_t nulls = 0;
        for (const std::uint64_t r : idx)
            if (is_null(ds.at(r, c))) ++nulls;
        CHECK(st.nulls_in_sample == nulls);
    }

    // Bool columns carry no min/max.
    CHECK(is_null(cap.state.column_stats[3].min));
    CHECK(is_null(cap.state.column_stats[3].max));

    // Min/max follow value ordering over the sample (Nulls skipped).
    const ColumnStats& fs = cap.state.column_stats[1];
    Value mn, mx;
    bool first = true;
    for (const std::uint64_t r : idx) {
        const Value& v = ds.at(r, 1);
        if (is_null(v)) continue;
        if (first || value_order_compare(v, mn) < 0) mn = v;
        if (first || value_order_compare(v, mx) > 0) mx = v;
        first = false;
    }
    CHECK(value_bits_equal(fs.min, mn));
    CHECK(value_bits_equal(fs.max, mx));
}

TEST_CASE("capture_state: small and empty datasets") {
    const Dataset ds = mixed(3);
    SplitMix64 g(7);
    const Capture cap = capture_state(ds, 20, g);
    CHECK(cap.state.row_count == 3);
    CHECK(cap.sample.size() == 3);  // min(k, n)

    const Dataset empty = mixed(0);
    SplitMix64 g2(7);
    const Capture ec = capture_state(empty, 20, g2);
    CHECK(ec.state.row_count == 0);
    CHECK(ec.sample.empty());
    REQUIRE(ec.state.column_stats.size() == 4);
    CHECK(ec.state.column_stats[0].sample_size == 0);
    CHECK(is_null(ec.state.column_stats[0].min));
}

TEST_CASE("capture_state: all-Null column and NaN extremes") {
    Dataset ds(Schema{{{"x", ValueType::Float}}});
    ds.append_row({Value{}});
    ds.append_row({Value{}});
    SplitMix64 g(3);
    const Capture cap = capture_state(ds, 10, g);
    CHECK(cap.state.column_stats[0].nulls_in_sample == 2);
    CHECK(is_null(cap.state.column_stats[0].min));
    CHECK(is_null(cap.state.column_stats[0].max));

    Dataset dn(Schema{{{"x", ValueType::Float}}});
    dn.append_row({Value{1.0}});
    dn.append_row({Value{kNaN}});
    SplitMix64 g2(3);
    const Capture c2 = capture_state(dn, 10, g2);
    CHECK(value_bits_equal(c2.state.column_stats[0].min, Value{1.0}));
    CHECK(std::isnan(std::get<double>(c2.state.column_stats[0].max)));
}

TEST_CASE("identical seeds give identical captures; k = 0 keeps stats empty") {
    const Dataset ds = mixed(50);
    SplitMix64 a(9), b(9);
    const Capture c1 = capture_state(ds, 8, a);
    const Capture c2 = capture_state(ds, 8, b);
    REQUIRE(c1.sample.size() == c2.sample.size());
    for (std::size_t r = 0; r < c1.sample.size(); ++r)
        for (std::size_t c = 0; c < c1.sample[r].size(); ++c)
            CHECK(value_bits_equal(c1.sample[r][c], c2.sample[r][c]));

    SplitMix64 z(9);
    const Capture c0 = capture_state(ds, 0, z);
    CHECK(c0.sample.empty());
    CHECK(c0.state.row_count == 50);
    CHECK(c0.state.column_stats[0].sample_size == 0);
}
