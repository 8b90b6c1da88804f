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

#include "stepscope/ops.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_map>
#include <unordered_set>

#include "stepscope/errors.hpp"

namespace stepscope {

const char* to_string(JoinHow h) { return h == JoinHow::Inner ? "inner" : "left"; }

const char* to_string(AggFunc f) {
    switch (f) {
        case AggFunc::Count: return "count";
        case AggFunc::Sum: return "sum";
        case AggFunc::Min: return "min";
        case AggFunc::Max: return "max";
        case AggFunc::Avg: return "avg";
    }
    return "?";
}

Schema select_schema(const Schema& in, std::span<const std::string> columns) {
    std::vector<Column> cols;
    cols.reserve(columns.size());
    std::unordered_set<std::string_view> seen;
    for (const std::string& name : columns) {
        if (!seen.insert(name).second)
            throw EngineError("select: column '" + name + "' requested twice");
        auto idx = in.find(name);
        if (!idx) throw EngineError("select: unknown column '" + name + "'");
        cols.push_back(in.at(*idx));
    }
    return Schema(std::move(cols));
}

Schema with_column_schema(const Schema& in, const std::string& name, ValueType type) {
    std::vector<Column> cols = in.columns();
    if (auto idx = in.find(name))
        cols[*idx].type = type;
    else
        cols.push_back(Column{name, type});
    return Schema(std::move(cols));
}

Schema join_schema(const Schema& left, const Schema& right, std::span<const std::string> on) {
    if (on.empty()) throw EngineError("join: empty key list");
    std::unordered_set<std::string_view> keys;
    for (const std::string& key : on) {
        if (!keys.insert(key).second)
            throw EngineError("join: key '" + key + "' listed twice");
        auto li = left.find(key);
        if (!li) throw EngineError("join: key '" + key + "' missing on left side");
        auto ri = right.find(key);
        if (!ri) throw EngineError("join: key '" + key + "' missing on right side");
        if (left.at(*li).type != right.at(*ri).type)
            throw EngineError("join: key '" + key + "' type mismatch: " +
                              to_string(left.at(*li).type) + " vs " +
                              to_string(right.at(*ri).type));
    }
    std::vector<Column> cols = left.columns();
    for (const Column& c : right.columns()) {
        if (keys.count(c.name)) continue;
        if (left.has(c.name))
            throw EngineError("join: non-key column '" + c.name + "' exists on both sides");
        cols.push_back(c);
    }
    return Schema(std::move(cols));
}

Schema group_schema(const Schema& in, std::span<const std::string> keys,
                    std::span<const AggSpec> aggs) {
    std::vector<Column> cols;
    cols.reserve(keys.size() + aggs.size());
    for (const std::string& key : keys) {
        auto idx = in.find(key);
        if (!idx) throw EngineError("group_by_agg: unknown key '" + key + "'");
        cols.push_back(in.at(*idx));
    }
    for (const AggSpec& agg : aggs) {
        ValueType col_type = ValueType::Int;
        if (!(agg.func == AggFunc::Count && agg.column == "*")) {
            auto idx = in.find(agg.column);
            if (!idx) throw EngineError("group_by_agg: unknown column '" + agg.column + "'");
            col_type = in.at(*idx).type;
        }
        const bool numeric = col_type == ValueType::Int || col_type == ValueType::Float;
        ValueType out_type = ValueType::Int;
        switch (agg.func) {
            case AggFunc::Count: out_type = ValueType::Int; break;
            case AggFunc::Sum:
                if (!numeric)
                    throw EngineError("group_by_agg: sum over non-numeric column '" +
                                      agg.column + "' (" + to_string(col_type) + ")");
                out_type = col_type;
                break;
            case AggFunc::Avg:
                if (!numeric)
                    throw EngineError("group_by_agg: avg over non-numeric column '" +
                                      agg.column + "' (" + to_string(col_type) + ")");
                out_type = ValueType::Float;
                break;
            case AggFunc::Min:
            case AggFunc::Max:
                if (!numeric && col_type != ValueType::Str)
                    throw EngineError("group_by_agg: " + std::string(to_string(agg.func)) +
                                      " over bool column '" + agg.column + "'");
                out_type = col_type;
                break;
        }
        cols.push_back(Column{agg.out_name, out_type});
    }
    return Schema(std::move(cols));
}

namespace {

inline bool bool_true(const Value& v) { return v.index() == 1 && std::get<bool>(v); }

// null after NaN after regular values, in both sort directions.
inline int trailing_rank(const Value& v) {
    if (is_null(v)) return 2;
    if (v.index() == 3 && std::isnan(std::get<double>(v))) return 1;
    return 0;
}

// Join/group key helpers over materialized key tuples.
using Key = std::vector<Value>;
struct KeyHash {
    std::size_t operator()(const Key& k) const { return row_identity_hash(k); }
};
struct KeyEq {
    bool operator()(const Key& a, const Key& b) const { return row_identity_equal(a, b); }
};

// Null and NaN key cells never match any row on the other join side.
inline bool key_never_matches(const Key& key) {
    for (const Value& v : key) {
        if (is_null(v)) return true;
        if (v.index() == 3 && std::isnan(std::get<double>(v))) return true;
    }
    return false;
}

Key extract_key(const Dataset& ds, std::size_t row, std::span<const std::size_t> cols) {
    Key key;
    key.reserve(cols.size());
    for (std::size_t c : cols) key.push_back(ds.at(row, c));
    return key;
}

std::vector<std::size_t> resolve_columns(const Schema& schema,
                                         std::span<const std::string> names,
                                         const char* op) {
    std::vector<std::size_t> idx;
    idx.reserve(names.size());
    for (const std::string& name : names) {
        auto i = schema.find(name);
        if (!i)
            throw EngineError(std::string(op) + ": unknown column '" + name + "'");
        idx.push_back(*i);
    }
    return idx;
}

} // namespace

Dataset filter(const Dataset& in, const BoundExpr& predicate) {
    Dataset out(in.schema());
    for (std::size_t r = 0; r < in.row_count(); ++r)
        if (bool_true(eval_expr(predicate, in.row(r)))) out.append_row(in.row(r));
    return out;
}

Dataset select(const Dataset& in, std::span<const std::string> columns) {
    Dataset out(select_schema(in.schema(), columns));
    const auto idx = resolve_columns(in.schema(), columns, "select");
    std::vector<Value> scratch(idx.size());
    out.reserve_rows(in.row_count());
    for (std::size_t r = 0; r < in.row_count(); ++r) {
        for (std::size_t j = 0; j < idx.size(); ++j) scratch[j] = in.at(r, idx[j]);
        out.append_row(std::span<const Value>(scratch));
    }
    return out;
}

Dataset with_column(const Dataset& in, const std::string& name, const BoundExpr& expr,
                    ValueType type) {
    Dataset out(with_column_schema(in.schema(), name, type));
    const auto replace = in.schema().find(name);
    std::vector<Value> scratch(out.width());
    out.reserve_rows(in.row_count());
    for (std::size_t r = 0; r < in.row_count(); ++r) {
        auto row = in.row(r);
        std::copy(row.begin(), row.end(), scratch.begin());
        scratch[replace ? *replace : in.width()] = eval_expr(expr, row);
        out.append_row(std::span<const Value>(scratch));
    }
    return out;
}

Dataset join(const Dataset& left, const Dataset& right, std::span<const std::string> on,
             JoinHow how) {
    Dataset out(join_schema(left.schema(), right.schema(), on));
    const auto lkeys = resolve_columns(left.schema(), on, "join");
    const auto rkeys = resolve_columns(right.schema(), on, "join");

    std::unordered_set<std::size_t> rkey_set(rkeys.begin(), rkeys.end());
    std::vector<std::size_t> rcarry;  // right non-key columns, in right order
    for (std::size_t c = 0; c < right.width(); ++c)
        if (!rkey_set.count(c)) rcarry.push_back(c);

    std::unordered_map<Key, std::vector<std::size_t>, KeyHash, KeyEq> index;
    for (std::size_t r = 0; r < right.row_count(); ++r) {
        Key key = extract_key(right, r, rkeys);
        if (key_never_matches(key)) continue;
        index[std::move(key)].push_back(r);
    }

    std::vector<Value> scratch(out.width());
    for (std::size_t l = 0; l < left.row_count(); ++l) {
        auto lrow = left.row(l);
        std::copy(lrow.begin(), lrow.end(), scratch.begin());

        const Key key = extract_key(left, l, lkeys);
        const std::vector<std::size_t>* matches = nullptr;
        if (!key_never_matches(key)) {
            auto it = index.find(key);
            if (it != index.end()) matches = &it->second;
        }
        if (matches) {
            for (std::size_t r : *matches) {
                for (std::size_t j = 0; j < rcarry.size(); ++j)
                    scratch[left.width() + j] = right.at(r, rcarry[j]);
                out.append_row(std::span<const Value>(scratch));
            }
        } else if (how == JoinHow::Left) {
            for (std::size_t j = 0; j < rcarry.size(); ++j)
                scratch[left.width() + j] = Value{};
            out.append_row(std::span<const Value>(scratch));
        }
    }
    return out;
}

namespace {

struct Acc {
    std::int64_t rows = 0;      // all rows in the group
    std::int64_t seen = 0;      // non-null cells
    std::int64_t isum = 0;
    bool int_overflow = false;
    double fsum = 0.0;
    Value extreme;              // running min/max, Null until first non-null
};

} // namespace

Dataset group_by_agg(const Dataset& in, std::span<const std::string> keys,
                     std::span<const AggSpec> aggs) {
    Dataset out(group_schema(in.schema(), keys, aggs));
    const auto key_cols = resolve_columns(in.schema(), keys, "group_by_agg");

    std::vector<std::size_t> agg_cols(aggs.size(), SIZE_MAX);
    for (std::size_t a = 0; a < aggs.size(); ++a)
        if (!(aggs[a].func == AggFunc::Count && aggs[a].column == "*"))
            agg_cols[a] = in.schema().find(aggs[a].column).value();

    struct Group {
        Key key;
        std::vector<Acc> accs;
    };
    std::vector<Group> groups;
    std::unordered_map<Key, std::size_t, KeyHash, KeyEq> group_of;

    for (std::size_t r = 0; r < in.row_count(); ++r) {
        Key key = extract_key(in, r, key_cols);
        auto [it, inserted] = group_of.try_emplace(key, groups.size());
        if (inserted) groups.push_back(Group{std::move(key), std::vector<Acc>(aggs.size())});
        std::vector<Acc>& accs = groups[it->second].accs;

        for (std::size_t a = 0; a < aggs.size(); ++a) {
            Acc& acc = accs[a];
            ++acc.rows;
            if (agg_cols[a] == SIZE_MAX) continue;  // count(*)
            const Value& v = in.at(r, agg_cols[a]);
            if (is_null(v)) continue;
            ++acc.seen;
            switch (aggs[a].func) {
                case AggFunc::Count:
                    break;
                case AggFunc::Sum:
                case AggFunc::Avg:
                    if (v.index() == 2) {
                        const std::int64_t x = std::get<std::int64_t>(v);
                        if (__builtin_add_overflow(acc.isum, x, &acc.isum))
                            acc.int_overflow = true;
                        acc.fsum += static_cast<double>(x);
                    } else {
                        acc.fsum += std::get<double>(v);
                    }
                    break;
                case AggFunc::Min:
                    if (acc.seen == 1 || value_order_compare(v, acc.extreme) < 0)
                        acc.extreme = v;
                    break;
                case AggFunc::Max:
                    if (acc.seen == 1 || value_order_compare(v, acc.extreme) > 0)
                        acc.extreme = v;
                    break;
            }
        }
    }

    std::vector<Value> scratch(out.width());
    for (const Group& g : groups) {
        std::copy(g.key.begin(), g.key.end(), scratch.begin());
        for (std::size_t a = 0; a < aggs.size(); ++a) {
            const Acc& acc = g.accs[a];
            Value& cell = scratch[keys.size() + a];
            switch (aggs[a].func) {
                case AggFunc::Count:
                    cell = Value{acc.rows};
                    break;
                case AggFunc::Sum:
                    if (acc.seen == 0) cell = Value{};
                    else if (out.schema().at(keys.size() + a).type == ValueType::Int)
                        cell = acc.int_overflow ? Value{} : Value{acc.isum};
                    else
                        cell = Value{acc.fsum};
                    break;
                case AggFunc::Avg:
                    cell = acc.seen == 0 ? Value{}
                                         : Value{acc.fsum / static_cast<double>(acc.seen)};
                    break;
                case AggFunc::Min:
                case AggFunc::Max:
                    cell = acc.seen == 0 ? Value{} : acc.extreme;
                    break;
            }
        }
        out.append_row(std::span<const Value>(scratch));
    }
    return out;
}

Dataset sort(const Dataset& in, std::span<const std::string> columns,
             const std::vector<bool>& ascending) {
    if (ascending.size() != columns.size())
        throw EngineError("sort: ascending list length " + std::to_string(ascending.size()) +
                          " does not match column count " + std::to_string(columns.size()));
    const auto cols = resolve_columns(in.schema(), columns, "sort");

    std::vector<std::size_t> order(in.row_count());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        for (std::size_t k = 0; k < cols.size(); ++k) {
            const Value& va = in.at(a, cols[k]);
            const Value& vb = in.at(b, cols[k]);
            const int ra = trailing_rank(va), rb = trailing_rank(vb);
            if (ra != rb) return ra < rb;  // Null/NaN last in both directions
            if (ra != 0) continue;
            const int c = value_order_compare(va, vb);
            if (c != 0) return ascending[k] ? c < 0 : c > 0;
        }
        return false;
    });

    Dataset out(in.schema());
    out.reserve_rows(in.row_count());
    for (std::size_t r : order) out.append_row(in.row(r));
    return out;
}

Dataset distinct(const Dataset& in) {
    struct RowHash {
        const Dataset* ds;
        std::size_t operator()(std::size_t i) const { return row_identity_hash(ds->row(i)); }
    };
    struct RowEq {
        const Dataset* ds;
        bool operator()(std::size_t a, std::size_t b) const {
            return row_identity_equal(ds->row(a), ds->row(b));
        }
    };
    std::unordered_set<std::size_t, RowHash, RowEq> seen(16, RowHash{&in}, RowEq{&in});
    Dataset out(in.schema());
    for (std::size_t r = 0; r < in.row_count(); ++r)
        if (seen.insert(r).second) out.append_row(in.row(r));
    return out;
}

Dataset union_all(const Dataset& a, const Dataset& b) {
    if (!(a.schema() == b.schema()))
        throw EngineError("union: schemas differ");
    Dataset out(a.schema());
    out.reserve_rows(a.row_count() + b.row_count());
    for (std::size_t r = 0; r < a.row_count(); ++r) out.append_row(a.row(r));
    for (std::size_t r = 0; r < b.row_count(); ++r) out.append_row(b.row(r));
    return out;
}

Dataset limit(const Dataset& in, std::int64_t n) {
    Dataset out(in.schema());
    if (n <= 0) return out;
    const std::size_t take = std::min<std::size_t>(static_cast<std::size_t>(n), in.row_count());
    out.reserve_rows(take);
    for (std::size_t r = 0; r < take; ++r) out.append_row(in.row(r));
    return out;
}

} // namespace stepscope
