#pragma once

// Brute-force reference results for single plan statements. Each case builds
// a random input, the plan text, and the expected table with plain loops over
// the grid. Nothing here calls into the plan evaluator.

#include "support/table_gen.hpp"

#include "smartpaste/decimal.hpp"
#include "smartpaste/table.hpp"

#include <algorithm>
#include <array>
#include <optional>
#include <string>
#include <vector>

namespace smartpaste::testing::oracle {

enum class Kind {
  drop_cols, keep_cols, merge_cols, split_col, derive, filter, sort, pivot_wider,
  pivot_longer, impute, dedupe, rename, style, merge_tables
};

inline constexpr std::array<Kind, 14> kAllKinds{
    Kind::drop_cols, Kind::keep_cols, Kind::merge_cols, Kind::split_col, Kind::derive,
    Kind::filter, Kind::sort, Kind::pivot_wider, Kind::pivot_longer, Kind::impute,
    Kind::dedupe, Kind::rename, Kind::style, Kind::merge_tables};

inline const char* kind_name(Kind k) {
  constexpr std::array<const char*, 14> kNames{
      "drop_cols", "keep_cols", "merge_cols", "split_col", "derive", "filter", "sort",
      "pivot_wider", "pivot_longer", "impute", "dedupe", "rename", "style", "merge_tables"};
  return kNames[static_cast<std::size_t>(k)];
}

struct Case {
  std::vector<StructuredTable> inputs;
  std::string plan;
  StructuredTable expected;
};

inline std::string q(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + "\"";
}

inline std::string name_of(const StructuredTable& t, std::size_t c) {
  return t.headers.empty() ? "col" + std::to_string(c + 1) : t.headers[c];
}

inline std::string trim_ws(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && (s[b] == ' ' || s[b] == '\t' || s[b] == '\r' || s[b] == '\n')) ++b;
  while (e > b && (s[e - 1] == ' ' || s[e - 1] == '\t' || s[e - 1] == '\r' || s[e - 1] == '\n')) --e;
  return s.substr(b, e - b);
}

inline StructuredTable with_shape(const StructuredTable& t) {
  StructuredTable out;
  out.caption = t.caption;
  out.column_count = 0;
  return out;
}

inline std::vector<std::string> materialized(const StructuredTable& t) {
  std::vector<std::string> h;
  for (std::size_t c = 0; c < t.column_count; ++c) h.push_back(name_of(t, c));
  return h;
}

class Builder {
 public:
  explicit Builder(std::uint64_t seed) : g_(seed) {}

  TableGen& gen() { return g_; }

  Case make(Kind k) {
    switch (k) {
      case Kind::drop_cols: return drop_cols();
      case Kind::keep_cols: return keep_cols();
      case Kind::merge_cols: return merge_cols();
      case Kind::split_col: return split_col();
      case Kind::derive: return derive();
      case Kind::filter: return filter();
      case Kind::sort: return sort();
      case Kind::pivot_wider: return pivot_wider();
      case Kind::pivot_longer: return pivot_longer();
      case Kind::impute: return impute();
      case Kind::dedupe: return dedupe();
      case Kind::rename: return rename();
      case Kind::style: return style();
      case Kind::merge_tables: return merge_tables();
    }
    return {};
  }

  StructuredTable table(std::size_t min_cols = 1) {
    for (;;) {
      auto t = g_.table({false, true, true, 8, 20});
      if (t.column_count >= min_cols) return t;
    }
  }

  std::string ref(const StructuredTable& t, std::size_t c) {
    if (t.has_headers() && g_.coin()) return q(t.headers[c]);
    if (!t.has_headers() && g_.coin(0.2)) return q("col" + std::to_string(c + 1));
    return std::to_string(c + 1);
  }

  std::string list(const StructuredTable& t, const std::vector<std::size_t>& cols) {
    std::string out = "[";
    for (std::size_t i = 0; i < cols.size(); ++i) out += (i ? ", " : "") + ref(t, cols[i]);
    return out + "]";
  }

  // Distinct columns in random order.
  std::vector<std::size_t> pick(std::size_t n, std::size_t k) {
    std::vector<std::size_t> all(n);
    for (std::size_t i = 0; i < n; ++i) all[i] = i;
    std::shuffle(all.begin(), all.end(), g_.rng());
    all.resize(k);
    return all;
  }

 private:
  Case drop_cols() {
    auto t = table(2);
    auto gone = pick(t.column_count, g_.uniform(1, t.column_count - 1));
    Case c{{t}, "drop_cols " + list(t, gone), with_shape(t)};
    auto dropped = [&](std::size_t col) { return std::find(gone.begin(), gone.end(), col) != gone.end(); };
    for (std::size_t col = 0; col < t.column_count; ++col) {
      if (dropped(col)) continue;
      if (t.has_headers()) c.expected.headers.push_back(t.headers[col]);
      ++c.expected.column_count;
    }
    for (const auto& row : t.rows) {
      auto& out = c.expected.rows.emplace_back();
      for (std::size_t col = 0; col < t.column_count; ++col)
        if (!dropped(col)) out.push_back(row[col]);
    }
    return c;
  }

  Case keep_cols() {
    auto t = table();
    auto keep = pick(t.column_count, g_.uniform(1, t.column_count));
    Case c{{t}, "keep_cols " + list(t, keep), with_shape(t)};
    c.expected.column_count = keep.size();
    for (std::size_t col : keep)
      if (t.has_headers()) c.expected.headers.push_back(t.headers[col]);
    for (const auto& row : t.rows) {
      auto& out = c.expected.rows.emplace_back();
      for (std::size_t col : keep) out.push_back(row[col]);
    }
    return c;
  }

  Case merge_cols() {
    auto t = table(2);
    auto ab = pick(t.column_count, 2);
    std::size_t a = ab[0], b = ab[1];
    std::string plan = "merge_cols " + ref(t, a) + " " + ref(t, b);
    std::optional<std::string> sep, name;
    if (g_.coin()) {
      sep = std::vector<std::string>{"-", ", ", "", " / "}[g_.uniform(0, 3)];
      plan += " sep=" + q(*sep);
    }
    if (g_.coin(0.4)) {
      name = "merged " + g_.text();
      plan += " as=" + q(*name);
    }
    std::string s = sep.value_or(" ");
    Case c{{t}, plan, with_shape(t)};
    c.expected.column_count = t.column_count - 1;
    std::vector<std::string> headers = name ? materialized(t) : t.headers;
    for (std::size_t col = 0; col < t.column_count; ++col) {
      if (col == b || headers.empty()) continue;
      if (col != a) c.expected.headers.push_back(headers[col]);
      else c.expected.headers.push_back(name ? *name : headers[a] + s + headers[b]);
    }
    for (const auto& row : t.rows) {
      auto& out = c.expected.rows.emplace_back();
      for (std::size_t col = 0; col < t.column_count; ++col) {
        if (col == b) continue;
        if (col != a) {
          out.push_back(row[col]);
          continue;
        }
        Cell m = row[a];
        if (is_empty(row[a].value)) m.value = row[b].value;
        else if (!is_empty(row[b].value))
          m.value = lex_cell(cell_text(row[a].value) + s + cell_text(row[b].value));
        out.push_back(m);
      }
    }
    return c;
  }

  Case split_col() {
    auto t = table();
    std::size_t col = g_.uniform(0, t.column_count - 1);
    std::string delim = std::vector<std::string>{"-", ", ", "/", " | "}[g_.uniform(0, 3)];
    for (auto& row : t.rows) {
      if (g_.coin(0.15)) {
        row[col].value = std::monostate{};
        continue;
      }
      std::string v;
      std::size_t parts = g_.uniform(1, 4);
      for (std::size_t i = 0; i < parts; ++i)
        v += (i ? delim : "") + (g_.coin() ? g_.number_text() : g_.text());
      row[col].value = lex_cell(v);
    }
    std::size_t n = g_.uniform(1, 3);
    std::vector<std::string> into;
    for (std::size_t i = 0; i < n; ++i) into.push_back("part " + std::to_string(i + 1));
    std::string plan = "split_col " + ref(t, col) + " delim=" + q(delim) + " into=[";
    for (std::size_t i = 0; i < n; ++i) plan += (i ? ", " : "") + q(into[i]);
    plan += "]";

    Case c{{t}, plan, with_shape(t)};
    auto headers = materialized(t);
    for (std::size_t k = 0; k < t.column_count; ++k) {
      if (k != col) c.expected.headers.push_back(headers[k]);
      else c.expected.headers.insert(c.expected.headers.end(), into.begin(), into.end());
    }
    c.expected.column_count = t.column_count + n - 1;
    for (const auto& row : t.rows) {
      auto& out = c.expected.rows.emplace_back();
      for (std::size_t k = 0; k < t.column_count; ++k) {
        if (k != col) {
          out.push_back(row[k]);
          continue;
        }
        std::string s = cell_text(row[k].value);
        std::vector<std::string> pieces;
        std::size_t start = 0;
        for (;;) {
          std::size_t hit = s.find(delim, start);
          if (hit == std::string::npos) break;
          pieces.push_back(s.substr(start, hit - start));
          start = hit + delim.size();
        }
        pieces.push_back(s.substr(start));
        while (pieces.size() > n) {
          pieces[pieces.size() - 2] += delim + pieces.back();
          pieces.pop_back();
        }
        pieces.resize(n);
        for (const auto& p : pieces) out.emplace_back(lex_cell(trim_ws(p)), row[k].style);
      }
    }
    return c;
  }

  Case derive() {
    auto t = table();
    std::size_t a = g_.uniform(0, t.column_count - 1), b = g_.uniform(0, t.column_count - 1);
    std::size_t op = g_.uniform(0, 3);
    const char* sym[] = {"+", "-", "*", "/"};
    auto headers = materialized(t);
    bool replace = g_.coin(0.3);
    std::size_t target = replace ? g_.uniform(0, t.column_count - 1) : t.column_count;
    std::string name = replace ? headers[target] : "derived " + g_.text();
    std::string plan = "derive " + q(name) + " = col(" + ref(t, a) + ") " + sym[op] + " col(" + ref(t, b) + ")";

    Case c{{t}, plan, t};
    c.expected.headers = headers;
    if (!replace) {
      c.expected.headers.push_back(name);
      ++c.expected.column_count;
      for (auto& row : c.expected.rows) row.emplace_back();
    }
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
      const Number* x = as_number(t.rows[r][a].value);
      const Number* y = as_number(t.rows[r][b].value);
      CellValue out;
      if (x && y) {
        if (op == 0) out = Number{x->value + y->value, false};
        if (op == 1) out = Number{x->value - y->value, false};
        if (op == 2) out = Number{x->value * y->value, false};
        if (op == 3 && !y->value.is_zero())
          out = Number{*Decimal::divide(x->value, y->value), false};
      }
      c.expected.rows[r][target].value = out;
    }
    return c;
  }

  // Comparison of a cell against a literal: numbers numerically, otherwise as
  // text (a percent number reads as its bare digits); empty never matches.
  static bool literal_cmp(const CellValue& v, const std::string& op, const std::optional<Decimal>& num,
                          const std::string& text) {
    if (is_empty(v)) return false;
    int ord;
    if (as_number(v) && num) {
      const Decimal& x = as_number(v)->value;
      ord = x < *num ? -1 : x > *num ? 1 : 0;
    } else {
      std::string lhs = as_number(v) ? as_number(v)->value.to_string() : *as_text(v);
      std::string rhs = num ? num->to_string() : text;
      ord = lhs < rhs ? -1 : lhs > rhs ? 1 : 0;
    }
    if (op == "=") return ord == 0;
    if (op == "!=") return ord != 0;
    if (op == "<") return ord < 0;
    if (op == "<=") return ord <= 0;
    if (op == ">") return ord > 0;
    return ord >= 0;
  }

  struct Pred {
    std::string text;
    std::size_t col;
    std::string op;
    std::optional<Decimal> num;
    std::string str;
    bool test(const std::vector<Cell>& row) const { return literal_cmp(row[col].value, op, num, str); }
  };

  Pred predicate(const StructuredTable& t) {
    Pred p;
    p.col = g_.uniform(0, t.column_count - 1);
    p.op = std::vector<std::string>{"=", "!=", "<", "<=", ">", ">="}[g_.uniform(0, 5)];
    std::string lit;
    if (g_.coin(0.6)) {
      std::string n = g_.number_text();
      if (n.back() == '%') n.pop_back();
      p.num = *Decimal::parse(n);
      lit = n[0] == '-' ? "-" + n.substr(1) : n;
    } else {
      // reuse a value from the column half the time so '=' can hit
      const auto& row = t.rows[g_.uniform(0, t.rows.size() - 1)];
      p.str = as_text(row[p.col].value) && g_.coin() ? *as_text(row[p.col].value) : g_.text();
      lit = q(p.str);
    }
    p.text = "col(" + ref(t, p.col) + ") " + p.op + " " + lit;
    return p;
  }

  Case filter() {
    auto t = table();
    Pred p = predicate(t);
    std::optional<Pred> p2;
    bool conj = g_.coin();
    std::string plan = "filter " + p.text;
    if (g_.coin(0.3)) {
      p2 = predicate(t);
      plan += (conj ? " and " : " or ") + p2->text;
    }
    Case c{{t}, plan, t};
    c.expected.rows.clear();
    for (const auto& row : t.rows) {
      bool keep = p.test(row);
      if (p2) keep = conj ? keep && p2->test(row) : keep || p2->test(row);
      if (keep) c.expected.rows.push_back(row);
    }
    return c;
  }

  Case sort() {
    auto t = table();
    std::size_t col = g_.uniform(0, t.column_count - 1);
    // plenty of ties
    for (auto& row : t.rows)
      if (g_.coin(0.3)) row[col].value = t.rows[0][col].value;
    bool desc = g_.coin();
    std::string plan = "sort " + ref(t, col) + (desc ? " desc" : g_.coin() ? " asc" : "");
    Case c{{t}, plan, t};
    c.expected.rows.clear();
    // numbers, then text, then empties; insertion keeps equal keys in order
    std::vector<std::vector<Cell>> nums, texts, empties;
    auto insert = [&](auto& bucket, const std::vector<Cell>& row, auto before) {
      std::size_t at = bucket.size();
      while (at > 0 && before(row[col].value, bucket[at - 1][col].value)) --at;
      bucket.insert(bucket.begin() + static_cast<std::ptrdiff_t>(at), row);
    };
    for (const auto& row : t.rows) {
      const CellValue& v = row[col].value;
      if (as_number(v)) {
        insert(nums, row, [&](const CellValue& x, const CellValue& y) {
          return desc ? as_number(x)->value > as_number(y)->value : as_number(x)->value < as_number(y)->value;
        });
      } else if (as_text(v)) {
        insert(texts, row, [&](const CellValue& x, const CellValue& y) {
          return desc ? *as_text(x) > *as_text(y) : *as_text(x) < *as_text(y);
        });
      } else {
        empties.push_back(row);
      }
    }
    for (auto* b : {&nums, &texts, &empties})
      for (auto& row : *b) c.expected.rows.push_back(row);
    return c;
  }

  Case pivot_wider() {
    std::size_t extra = g_.uniform(0, 2);
    std::vector<std::string> ids{"S1", "S2", "S3", "7", "7.0"};
    std::vector<std::string> names{"HW1", "HW2", "HW3", "10", "1.0"};
    std::vector<std::vector<Cell>> grid;
    std::size_t n = g_.uniform(1, 20);
    for (std::size_t r = 0; r < n; ++r) {
      std::vector<Cell> row;
      row.emplace_back(lex_cell(ids[g_.uniform(0, ids.size() - 1)]));
      for (std::size_t e = 0; e < extra; ++e) row.emplace_back(lex_cell(g_.coin() ? "x" : "y"));
      row.emplace_back(g_.coin(0.1) ? CellValue{} : lex_cell(names[g_.uniform(0, names.size() - 1)]));
      row.emplace_back(g_.value());
      grid.push_back(std::move(row));
    }
    std::vector<std::string> headers;
    if (g_.coin()) {
      headers.push_back("id");
      for (std::size_t e = 0; e < extra; ++e) headers.push_back("extra " + std::to_string(e));
      headers.push_back("what");
      headers.push_back("score");
    }
    auto t = StructuredTable::from_rows(headers, grid);
    std::vector<std::size_t> id{0};
    for (std::size_t e = 0; e < extra; ++e) id.push_back(e + 1);
    std::size_t nc = extra + 1, vc = extra + 2;
    int agg = static_cast<int>(g_.uniform(0, 3));  // 3 = default
    std::string plan = "pivot_wider id=" + (id.size() == 1 && g_.coin() ? ref(t, 0) : list(t, id)) +
                       " names=" + ref(t, nc) + " values=" + ref(t, vc);
    if (agg < 3) plan += std::string(" agg=") + (agg == 0 ? "first" : agg == 1 ? "sum" : "mean");

    Case c{{t}, plan, with_shape(t)};
    std::vector<std::size_t> group_first;
    std::vector<std::string> cols;
    for (std::size_t r = 0; r < n; ++r) {
      if (is_empty(t.rows[r][nc].value)) continue;
      bool seen = false;
      for (std::size_t f : group_first) {
        bool same = true;
        for (std::size_t k : id) same = same && t.rows[f][k].value == t.rows[r][k].value;
        seen = seen || same;
      }
      if (!seen) group_first.push_back(r);
      std::string name = cell_text(t.rows[r][nc].value);
      if (std::find(cols.begin(), cols.end(), name) == cols.end()) cols.push_back(name);
    }
    for (std::size_t k : id) c.expected.headers.push_back(name_of(t, k));
    for (const auto& name : cols) c.expected.headers.push_back(name);
    c.expected.column_count = c.expected.headers.size();
    for (std::size_t f : group_first) {
      auto& out = c.expected.rows.emplace_back();
      for (std::size_t k : id) out.push_back(t.rows[f][k]);
      for (const auto& name : cols) {
        std::vector<const Cell*> hits;
        for (std::size_t r = 0; r < n; ++r) {
          if (is_empty(t.rows[r][nc].value) || cell_text(t.rows[r][nc].value) != name) continue;
          bool same = true;
          for (std::size_t k : id) same = same && t.rows[f][k].value == t.rows[r][k].value;
          if (same) hits.push_back(&t.rows[r][vc]);
        }
        if (hits.empty()) {
          out.emplace_back();
        } else if (agg == 0 || agg == 3) {
          out.push_back(*hits[0]);
        } else {
          Decimal sum;
          long long count = 0;
          for (const Cell* h : hits)
            if (as_number(h->value)) {
              sum = sum + as_number(h->value)->value;
              ++count;
            }
          if (count == 0) out.emplace_back();
          else if (agg == 1) out.emplace_back(Number{sum, false});
          else out.emplace_back(Number{*Decimal::divide(sum, Decimal::from_int(count)), false});
        }
      }
    }
    return c;
  }

  Case pivot_longer() {
    auto t = table();
    auto cols = pick(t.column_count, g_.uniform(1, t.column_count));
    std::string plan = "pivot_longer " + list(t, cols);
    std::string names_to = "name", values_to = "value";
    if (g_.coin()) {
      names_to = "key " + g_.text();
      plan += " names_to=" + q(names_to);
    }
    if (g_.coin()) {
      values_to = "val " + g_.text();
      plan += " values_to=" + q(values_to);
    }
    Case c{{t}, plan, with_shape(t)};
    std::vector<std::size_t> id;
    for (std::size_t k = 0; k < t.column_count; ++k)
      if (std::find(cols.begin(), cols.end(), k) == cols.end()) id.push_back(k);
    for (std::size_t k : id) c.expected.headers.push_back(name_of(t, k));
    c.expected.headers.push_back(names_to);
    c.expected.headers.push_back(values_to);
    c.expected.column_count = c.expected.headers.size();
    for (const auto& row : t.rows)
      for (std::size_t k : cols) {
        auto& out = c.expected.rows.emplace_back();
        for (std::size_t i : id) out.push_back(row[i]);
        out.emplace_back(lex_cell(name_of(t, k)));
        out.push_back(row[k]);
      }
    return c;
  }

  static bool missing(const CellValue& v) {
    if (is_empty(v)) return true;
    if (!as_text(v)) return false;
    std::string s = trim_ws(*as_text(v));
    for (auto& ch : s) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
    for (const char* m : {"na", "n/a", "nan", "null", "none", "-", "?", ""})
      if (s == m) return true;
    return false;
  }

  Case impute() {
    auto t = table();
    const char* tokens[] = {"NA", "n/a", "NaN", "null", "None", "-", "?", " na "};
    for (auto& row : t.rows)
      for (auto& cell : row)
        if (g_.coin(0.1)) cell.value = std::string(tokens[g_.uniform(0, 7)]);
    auto cols = pick(t.column_count, g_.uniform(1, t.column_count));
    int mode = static_cast<int>(g_.uniform(0, 3));  // 3 = default (empty)
    std::string plan = "impute " + list(t, cols);
    if (mode < 3) plan += std::string(" mode=") + (mode == 0 ? "empty" : mode == 1 ? "zero" : "mean");
    Case c{{t}, plan, t};
    for (std::size_t k : cols) {
      CellValue fill;
      if (mode == 1) fill = Number{Decimal(), false};
      if (mode == 2) {
        Decimal sum;
        long long count = 0;
        int scale = 0;
        for (const auto& row : t.rows)
          if (const Number* n = as_number(row[k].value)) {
            sum = sum + n->value;
            scale = std::max(scale, n->value.scale());
            ++count;
          }
        if (count == 0) continue;
        Decimal mean = Decimal::divide(sum, Decimal::from_int(count), 40)->round_half_up(scale);
        Decimal::Int m = mean.mantissa();
        for (int s = mean.scale(); s < scale; ++s) m *= 10;
        fill = Number{Decimal(m, scale), false};
      }
      for (auto& row : c.expected.rows)
        if (missing(row[k].value)) row[k].value = fill;
    }
    return c;
  }

  Case dedupe() {
    auto t = table();
    // duplicate some rows so there is something to drop
    std::size_t n = t.rows.size();
    for (std::size_t i = 0; i < n; ++i)
      if (g_.coin(0.4)) {
        auto copy = t.rows[g_.uniform(0, n - 1)];
        if (g_.coin()) copy[g_.uniform(0, t.column_count - 1)].value = g_.value();
        t.rows.push_back(copy);
      }
    std::vector<std::size_t> cols;
    std::string plan = "dedupe";
    if (g_.coin()) {
      cols = pick(t.column_count, g_.uniform(1, t.column_count));
      plan += " " + list(t, cols);
    } else {
      for (std::size_t k = 0; k < t.column_count; ++k) cols.push_back(k);
    }
    Case c{{t}, plan, t};
    c.expected.rows.clear();
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
      bool dup = false;
      for (std::size_t p = 0; p < r && !dup; ++p) {
        bool same = true;
        for (std::size_t k : cols) same = same && t.rows[p][k].value == t.rows[r][k].value;
        dup = same;
      }
      if (!dup) c.expected.rows.push_back(t.rows[r]);
    }
    return c;
  }

  Case rename() {
    auto t = table();
    std::size_t col = g_.uniform(0, t.column_count - 1);
    std::string name = "renamed " + g_.text();
    Case c{{t}, "rename " + ref(t, col) + " " + q(name), t};
    c.expected.headers = materialized(t);
    c.expected.headers[col] = name;
    return c;
  }

  Case style() {
    auto t = g_.table({false, true, true, 8, 20});
    std::string color = g_.color();
    bool bold = g_.coin(), italic = g_.coin(0.3);
    bool bg = !bold || g_.coin();
    std::string with;
    if (bold) with += "bold";
    if (italic) with += std::string(with.empty() ? "" : ", ") + "italic";
    if (bg) with += std::string(with.empty() ? "" : ", ") + "bg=" + color;
    auto apply = [&](Cell& cell) {
      cell.style.bold = cell.style.bold || bold;
      cell.style.italic = cell.style.italic || italic;
      if (bg) cell.style.bg_color = color;
    };
    std::vector<std::size_t> cols;
    bool listed = g_.coin();
    if (listed) cols = pick(t.column_count, g_.uniform(1, t.column_count));
    else for (std::size_t k = 0; k < t.column_count; ++k) cols.push_back(k);

    Case c{{t}, "", t};
    if (g_.coin()) {
      Pred p = predicate(t);
      bool always = g_.coin(0.2);
      c.plan = "style rows" + (listed ? " " + list(t, cols) : std::string()) +
               (always ? "" : " where " + p.text) + " with " + with;
      for (auto& row : c.expected.rows)
        if (always || p.test(row))
          for (std::size_t k : cols) apply(row[k]);
    } else {
      // cell-wise row maximum (or minimum) over a column range
      std::size_t lo = g_.uniform(0, t.column_count - 1), hi = g_.uniform(lo, t.column_count - 1);
      bool max = g_.coin();
      std::string range = lo == hi ? std::to_string(lo + 1) : std::to_string(lo + 1) + ".." + std::to_string(hi + 1);
      c.plan = "style cells" + (listed ? " " + list(t, cols) : std::string()) + " where " +
               (g_.coin() ? "cell" : "col(i)") + " = " + (max ? "rowmax([" : "rowmin([") + range +
               "]) with " + with;
      for (auto& row : c.expected.rows) {
        std::optional<Decimal> best;
        for (std::size_t k = lo; k <= hi; ++k)
          if (const Number* n = as_number(row[k].value))
            if (!best || (max ? n->value > *best : n->value < *best)) best = n->value;
        if (!best) continue;
        for (std::size_t k : cols)
          if (const Number* n = as_number(row[k].value); n && n->value == *best) apply(row[k]);
      }
    }
    return c;
  }

  Case merge_tables() {
    std::size_t width = g_.uniform(1, 6);
    std::size_t count = g_.uniform(1, 3);
    Case c;
    for (std::size_t i = 0; i < count; ++i) {
      StructuredTable t;
      do t = g_.table({false, true, true, width, 8});
      while (t.column_count != width);
      if (g_.coin(0.4)) t.caption = "caption " + g_.text();
      c.inputs.push_back(t);
    }
    std::optional<std::string> label;
    c.plan = "merge_tables";
    if (g_.coin()) {
      label = "source " + g_.text();
      c.plan += " label=" + q(*label);
    }
    c.expected.column_count = width;
    for (const auto& t : c.inputs)
      if (t.has_headers()) {
        c.expected.headers = t.headers;
        break;
      }
    if (count == 1) c.expected.caption = c.inputs[0].caption;
    if (label) {
      if (c.expected.headers.empty())
        for (std::size_t k = 0; k < width; ++k) c.expected.headers.push_back("col" + std::to_string(k + 1));
      c.expected.headers.push_back(*label);
      ++c.expected.column_count;
    }
    for (std::size_t i = 0; i < count; ++i)
      for (const auto& row : c.inputs[i].rows) {
        auto out = row;
        if (label)
          out.emplace_back(lex_cell(c.inputs[i].caption.value_or("table " + std::to_string(i + 1))));
        c.expected.rows.push_back(out);
      }
    return c;
  }

  TableGen g_;
};

}  // namespace smartpaste::testing::oracle
