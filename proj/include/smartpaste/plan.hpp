#pragma once

// The table transformation language ("plan/1"): one statement per line,
// applied in order to a working table.

#include "smartpaste/table.hpp"

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace smartpaste::plan {

/// 1-based position or exact header text.
struct ColRef {
  std::variant<int, std::string> ref;

  static ColRef index(int i) { return {i}; }
  static ColRef name(std::string s) { return {std::move(s)}; }
  friend bool operator==(const ColRef&, const ColRef&) = default;
};

/// `[1, 3..5, "Name"]`; a range is stored as written.
struct ColItem {
  ColRef from;
  std::optional<int> to;  // set for `a..b`
  friend bool operator==(const ColItem&, const ColItem&) = default;
};
using ColList = std::vector<ColItem>;

enum class Op { add, sub, mul, div, eq, ne, lt, le, gt, ge, and_, or_, neg, not_ };

struct Expr {
  enum class Kind { number, text, col, cell, cols, unary, binary, call };

  Kind kind = Kind::number;
  Decimal number;
  std::string text;       // text literal, or function name for calls
  ColRef col;             // for col(...)
  ColList cols;           // list argument of rowmax/rowmin
  Op op = Op::add;
  std::vector<Expr> args;  // operands or call arguments

  friend bool operator==(const Expr&, const Expr&) = default;
};

struct DropCols { ColList cols; friend bool operator==(const DropCols&, const DropCols&) = default; };
struct KeepCols { ColList cols; friend bool operator==(const KeepCols&, const KeepCols&) = default; };
struct MergeCols {
  ColRef a, b;
  std::optional<std::string> sep;   // default " "
  std::optional<std::string> name;  // default: both headers joined by sep
  friend bool operator==(const MergeCols&, const MergeCols&) = default;
};
struct SplitCol {
  ColRef col;
  std::optional<std::string> regex;  // exactly one of regex / delim
  std::optional<std::string> delim;
  std::vector<std::string> into;
  friend bool operator==(const SplitCol&, const SplitCol&) = default;
};
struct Derive { std::string name; Expr expr; friend bool operator==(const Derive&, const Derive&) = default; };
struct Filter { Expr pred; friend bool operator==(const Filter&, const Filter&) = default; };
struct Sort {
  ColRef col;
  bool descending = false;  // asc is the default and is not printed
  friend bool operator==(const Sort&, const Sort&) = default;
};
enum class Agg { first, sum, mean };
struct PivotWider {
  ColList id;
  ColRef names, values;
  std::optional<Agg> agg;  // default first
  friend bool operator==(const PivotWider&, const PivotWider&) = default;
};
struct PivotLonger {
  ColList cols;
  std::string names_to = "name", values_to = "value";
  friend bool operator==(const PivotLonger&, const PivotLonger&) = default;
};
enum class ImputeMode { empty, zero, mean };
struct Impute {
  ColList cols;
  ImputeMode mode = ImputeMode::empty;
  friend bool operator==(const Impute&, const Impute&) = default;
};
struct Dedupe { ColList cols; friend bool operator==(const Dedupe&, const Dedupe&) = default; };  // empty = all
struct Rename { ColRef col; std::string name; friend bool operator==(const Rename&, const Rename&) = default; };
struct StyleDelta {
  bool bold = false, italic = false;
  std::optional<std::string> bg, fg;
  friend bool operator==(const StyleDelta&, const StyleDelta&) = default;
};
struct Style {
  bool rows = false;               // `style rows` vs `style cells`
  ColList cols;                    // empty = every column
  std::optional<Expr> where;       // absent = always
  StyleDelta delta;
  friend bool operator==(const Style&, const Style&) = default;
};
struct MergeTables {
  std::optional<std::string> label;
  friend bool operator==(const MergeTables&, const MergeTables&) = default;
};

using Statement = std::variant<DropCols, KeepCols, MergeCols, SplitCol, Derive, Filter, Sort,
                               PivotWider, PivotLonger, Impute, Dedupe, Rename, Style, MergeTables>;

struct Plan {
  std::vector<Statement> statements;
  std::vector<int> lines;  // source line of each statement
  std::string source_text;

  bool empty() const { return statements.empty(); }
  /// Structural equality; source text and line numbers are not compared.
  friend bool operator==(const Plan& a, const Plan& b) { return a.statements == b.statements; }
};

inline constexpr std::string_view kVersionTag = "plan/1";

/// Parses plan text. A leading "plan/1" line is accepted and skipped.
/// Throws PlanSyntaxError, or PlanTypeError for statically ill-typed
/// expressions and invalid regex patterns.
Plan parse_plan(std::string_view source);
/// Like parse_plan but the "plan/1" line is mandatory (plan files).
Plan parse_plan_file(std::string_view source);

/// Canonical text without the version line; parse_plan(canonicalize(p)) == p.
std::string canonicalize(const Plan& plan);
std::string to_string(const Expr& e);

struct EvalResult {
  StructuredTable table;
  std::vector<std::string> warnings;  // CellEvalWarning messages
};

/// Applies the plan. A multi-table input needs merge_tables as its first
/// statement. Throws UnknownColumnError, PlanTypeError, Error(EmptyResult).
EvalResult evaluate(const Plan& plan, std::span<const StructuredTable> input);
inline EvalResult evaluate(const Plan& plan, const StructuredTable& input) {
  return evaluate(plan, std::span<const StructuredTable>(&input, 1));
}

enum class QueryMode { scalar, count };
std::optional<QueryMode> query_mode_from_string(std::string_view s);

struct QueryResult {
  CellValue value;
  StructuredTable table;
  std::vector<std::string> warnings;
};

/// scalar: the result must be 1x1 (else Error(NotScalarResult)).
/// count: the number of rows left by the plan.
QueryResult query(const Plan& plan, std::span<const StructuredTable> input, QueryMode mode);

/// Cells counted as missing by impute: empty, or NA-like text.
bool is_missing(const CellValue& v);

/// The regex subset: classes, anchors, quantifiers, groups, alternation. No
/// backreferences or lookaround. Returns an error message or nullopt.
std::optional<std::string> check_regex(std::string_view pattern);

}  // namespace smartpaste::plan
