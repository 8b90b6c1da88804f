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

#include "stepscope/errors.hpp"
#include "stepscope/expr.hpp"
#include "stepscope/ops.hpp"

using namespace stepscope;

namespace {

const double kNaN = std::numeric_limits<double>::quiet_NaN();

Value I(std::int64_t x) { return Value{x}; }
Value F(double x) { return Value{x}; }
Value S(const char* x) { return Value{std::string(x)}; }
[[maybe_unused]] Value B(bool x) { return Value{x}; }
Value N() { return Value{}; }

Dataset people() {
    Dataset ds(Schema{{{"id", ValueType::Int},
                       {"name", ValueType::Str},
                       {"score", ValueType::Float}}});
    ds.append_row({I(1), S("ann"), F(0.5)});
    ds.append_row({I(2), S("bob"), N()});
    ds.append_row({I(3), N(), F(kNaN)});
    ds.append_row({I(4), S("ann"), F(0.25)});
    return ds;
}

std::shared_ptr<const BoundExpr> pred(const std::string& text, const Schema& s) {
    BindResult b = bind_expr(*parse_expr(text), s);
    REQUIRE(b.ok());
    return b.expr;
}

} // namespace

TEST_CASE("filter keeps only Bool(true); Null predicate drops the row") {
    const Dataset in = people();
    const Dataset out = filter(in, *pred("score > 0.3", in.schema()));
    REQUIRE(out.row_count() == 1);       // 0.5 passes; Null, NaN, 0.25 do not
    CHECK(out.at(0, 0) == I(1));

    const Dataset all = filter(in, *pred("id >= 1", in.schema()));
    CHECK(all.row_count() == 4);

    const Dataset nulls = filter(in, *pred("name is null", in.schema()));
    REQUIRE(nulls.row_count() == 1);
    CHECK(nulls.at(0, 0) == I(3));
}

TEST_CASE("select reorders and drops; dup/unknown requests are errors") {
    const Dataset in = people();
    const Dataset out = select(in, std::vector<std::string>{"score", "id"});
    REQUIRE(out.width() == 2);
    CHECK(out.schema().at(0).name == "score");
    CHECK(out.at(0, 1) == I(1));
    CHECK(out.row_count() == 4);

    CHECK_THROWS_AS(select(in, std::vector<std::string>{"id", "id"}), EngineError);
    CHECK_THROWS_AS(select(in, std::vector<std::string>{"ghost"}), EngineError);
}

TEST_CASE("with_column appends or replaces in place") {
    const Dataset in = people();
    const Dataset added =
        with_column(in, "double_id", *pred("id * 2", in.schema()), ValueType::Int);
    REQUIRE(added.width() == 4);
    CHECK(added.schema().at(3).name == "double_id");
    CHECK(added.at(3, 3) == I(8));

    const Dataset replaced =
        with_column(in, "score", *pred("id / 2", in.schema()), ValueType::Float);
    REQUIRE(replaced.width() == 3);
    CHECK(replaced.schema().at(2).type == ValueType::Float);
    CHECK(replaced.at(1, 2) == F(1.0));
}

TEST_CASE("join: Null and NaN keys never match; matches follow right row order") {
    Dataset left(Schema{{{"k", ValueType::Float}, {"l", ValueType::Int}}});
    left.append_row({F(1.0), I(10)});
    left.append_row({N(), I(20)});
    left.append_row({F(kNaN), I(30)});
    left.append_row({F(2.0), I(40)});

    Dataset right(Schema{{{"k", ValueType::Float}, {"r", ValueType::Str}}});
    right.append_row({F(2.0), S("x")});
    right.append_row({F(1.0), S("y")});
    right.append_row({N(), S("z")});
    right.append_row({F(kNaN), S("w")});
    right.append_row({F(1.0), S("y2")});

    const std::vector<std::string> on = {"k"};
    const Dataset inner = join(left, right, on, JoinHow::Inner);
    REQUIRE(inner.row_count() == 3);  // 1.0 -> y, y2 (right order); 2.0 -> x
    CHECK(inner.at(0, 2) == S("y"));
    CHECK(inner.at(1, 2) == S("y2"));
    CHECK(inner.at(2, 2) == S("x"));

    const Dataset lj = join(left, right, on, JoinHow::Left);
    REQUIRE(lj.row_count() == 5);     // unmatched Null and NaN rows pad
    CHECK(lj.at(2, 1) == I(20));
    CHECK(is_null(lj.at(2, 2)));
    CHECK(is_null(lj.at(3, 2)));
}

TEST_CASE("join output schema is left columns then right non-key columns") {
    const Schema left{{{"a", ValueType::Int}, {"k", ValueType::Str}}};
    const Schema right{{{"k", ValueType::Str}, {"b", ValueType::Float}}};
    const Schema js = join_schema(left, right, std::vector<std::string>{"k"});
    REQUIRE(js.size() == 3);
    CHECK(js.at(0).name == "a");
    CHECK(js.at(1).name == "k");
    CHECK(js.at(2).name == "b");

    CHECK_THROWS_AS(join_schema(left, right, std::vector<std::string>{}), EngineError);
    CHECK_THROWS_AS(join_schema(left, right, std::vector<std::string>{"k", "k"}), EngineError);
    const Schema overlap{{{"k", ValueType::Str}, {"a", ValueType::Int}}};
    CHECK_THROWS_AS(join_schema(left, overlap, std::vector<std::string>{"k"}), EngineError);
}

TEST_CASE("group_by_agg: first-appearance order, Null-skipping aggregates") {
    Dataset in(Schema{{{"g", ValueType::Str}, {"x", ValueType::Int}}});
    in.append_row({S("b"), I(1)});
    in.append_row({S("a"), N()});
    in.append_row({S("b"), I(3)});
    in.append_row({N(), I(5)});
    in.append_row({S("a"), N()});

    const std::vector<std::string> keys = {"g"};
    const std::vector<AggSpec> aggs = {
        {AggFunc::Count, "*", "n"},    {AggFunc::Count, "x", "nx"}, {AggFunc::Sum, "x", "sx"},
        {AggFunc::Avg, "x", "ax"},     {AggFunc::Min, "x", "mn"},   {AggFunc::Max, "x", "mx"},
    };
    const Dataset out = group_by_agg(in, keys, aggs);
    REQUIRE(out.row_count() == 3);
    // group order: b, a, Null (first appearance)
    CHECK(out.at(0, 0) == S("b"));
    CHECK(out.at(1, 0) == S("a"));
    CHECK(is_null(out.at(2, 0)));
    // b: n=2, count(x)=2, sum=4, avg=2.0, min=1, max=3
    CHECK(out.at(0, 1) == I(2));
    CHECK(out.at(0, 2) == I(2));
    CHECK(out.at(0, 3) == I(4));
    CHECK(out.at(0, 4) == F(2.0));
    CHECK(out.at(0, 5) == I(1));
    CHECK(out.at(0, 6) == I(3));
    // a: all-Null x -> count rows still 2, sum/avg/min/max Null
    CHECK(out.at(1, 1) == I(2));
    CHECK(out.at(1, 2) == I(2));  // count(x) counts rows in the group
    CHECK(is_null(out.at(1, 3)));
    CHECK(is_null(out.at(1, 4)));
    CHECK(is_null(out.at(1, 5)));
    CHECK(is_null(out.at(1, 6)));
    // Null is a groupable key
    CHECK(out.at(2, 1) == I(1));
    CHECK(out.at(2, 3) == I(5));
}

TEST_CASE("group_by_agg: empty keys aggregate the whole input") {
    Dataset in(Schema{{{"x", ValueType::Float}}});
    in.append_row({F(1.0)});
    in.append_row({F(2.0)});
    const Dataset out = group_by_agg(in, std::vector<std::string>{},
                                     std::vector<AggSpec>{{AggFunc::Avg, "x", "m"}});
    REQUIRE(out.row_count() == 1);
    CHECK(out.at(0, 0) == F(1.5));
}

TEST_CASE("group_by_agg: int sum overflow yields Null, float max can be NaN") {
    Dataset in(Schema{{{"x", ValueType::Int}, {"y", ValueType::Float}}});
    in.append_row({I(std::numeric_limits<std::int64_t>::max()), F(1.0)});
    in.append_row({I(1), F(kNaN)});
    const Dataset out = group_by_agg(
        in, std::vector<std::string>{},
        std::vector<AggSpec>{{AggFunc::Sum, "x", "sx"}, {AggFunc::Max, "y", "my"}});
    REQUIRE(out.row_count() == 1);
    CHECK(is_null(out.at(0, 0)));  // overflowed
    CHECK(std::isnan(std::get<double>(out.at(0, 1))));  // NaN ranks above all floats
}

TEST_CASE("group schema rules") {
    const Schema s{{{"g", ValueType::Str}, {"x", ValueType::Int}, {"f", ValueType::Bool}}};
    CHECK_THROWS_AS(
        group_schema(s, std::vector<std::string>{"g"},
                     std::vector<AggSpec>{{AggFunc::Min, "f", "m"}}),
        EngineError);  // min/max on bool
    CHECK_THROWS_AS(
        group_schema(s, std::vector<std::string>{"g"},
                     std::vector<AggSpec>{{AggFunc::Sum, "x", "g"}}),
        EngineError);  // output name collides with key
    const Schema gs = group_schema(s, std::vector<std::string>{"g"},
                                   std::vector<AggSpec>{{AggFunc::Sum, "x", "sx"},
                                                        {AggFunc::Avg, "x", "ax"}});
    CHECK(gs.at(1).type == ValueType::Int);    // sum keeps int
    CHECK(gs.at(2).type == ValueType::Float);  // avg is float
}

TEST_CASE("sort: stable, Nulls last and NaN after floats in both directions") {
    Dataset in(Schema{{{"x", ValueType::Float}, {"tag", ValueType::Int}}});
    in.append_row({F(2.0), I(0)});
    in.append_row({N(), I(1)});
    in.append_row({F(kNaN), I(2)});
    in.append_row({F(1.0), I(3)});
    in.append_row({F(2.0), I(4)});

    const Dataset asc = sort(in, std::vector<std::string>{"x"}, std::vector<bool>{true});
    CHECK(asc.at(0, 0) == F(1.0));
    CHECK(asc.at(1, 1) == I(0));  // stability: first 2.0 before second
    CHECK(asc.at(2, 1) == I(4));
    CHECK(std::isnan(std::get<double>(asc.at(3, 0))));
    CHECK(is_null(asc.at(4, 0)));

    const Dataset desc = sort(in, std::vector<std::string>{"x"}, std::vector<bool>{false});
    CHECK(desc.at(0, 0) == F(2.0));
    CHECK(desc.at(0, 1) == I(0));
    CHECK(desc.at(1, 1) == I(4));
    CHECK(desc.at(2, 0) == F(1.0));
    CHECK(std::isnan(std::get<double>(desc.at(3, 0))));  // NaN still before Null
    CHECK(is_null(desc.at(4, 0)));
}

TEST_CASE("sort: multi-key with per-column directions; arity must match") {
    Dataset in(Schema{{{"g", ValueType::Str}, {"x", ValueType::Int}}});
    in.append_row({S("a"), I(1)});
    in.append_row({S("b"), I(5)});
    in.append_row({S("a"), I(3)});
    const Dataset out = sort(in, std::vector<std::string>{"g", "x"},
                             std::vector<bool>{true, false});
    CHECK(out.at(0, 1) == I(3));
    CHECK(out.at(1, 1) == I(1));
    CHECK(out.at(2, 0) == S("b"));

    CHECK_THROWS_AS(
        sort(in, std::vector<std::string>{"g", "x"}, std::vector<bool>{true}),
        EngineError);
}

TEST_CASE("distinct: first occurrence wins; identity semantics for Null/NaN/-0.0") {
    Dataset in(Schema{{{"x", ValueType::Float}}});
    in.append_row({F(0.0)});
    in.append_row({F(-0.0)});
    in.append_row({F(kNaN)});
    in.append_row({F(kNaN)});
    in.append_row({N()});
    in.append_row({N()});
    in.append_row({F(1.0)});
    const Dataset out = distinct(in);
    REQUIRE(out.row_count() == 4);  // 0.0, NaN, Null, 1.0
    CHECK(value_bits_equal(out.at(0, 0), F(0.0)));  // first occurrence kept, not -0.0
    CHECK(std::isnan(std::get<double>(out.at(1, 0))));
    CHECK(is_null(out.at(2, 0)));
    CHECK(out.at(3, 0) == F(1.0));
}

TEST_CASE("union_all requires identical schemas and concatenates") {
    const Dataset a = people();
    const Dataset b = people();
    const Dataset u = union_all(a, b);
    CHECK(u.row_count() == 8);
    CHECK(u.at(4, 0) == I(1));

    const Dataset other(Schema{{{"id", ValueType::Int}}});
    CHECK_THROWS_AS(union_all(a, other), EngineError);
}

TEST_CASE("limit clamps and treats non-positive as zero") {
    const Dataset in = people();
    CHECK(limit(in, 2).row_count() == 2);
    CHECK(limit(in, 100).row_count() == 4);
    CHECK(limit(in, 0).row_count() == 0);
    CHECK(limit(in, -5).row_count() == 0);
}
