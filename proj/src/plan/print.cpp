#include "smartpaste/plan.hpp"

namespace smartpaste::plan {

namespace {

std::string quote(std::string_view s) {
  std::string out = "\"";
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      default: out += c;
    }
  }
  return out + "\"";
}

std::string ref(const ColRef& r) {
  if (const int* i = std::get_if<int>(&r.ref)) return std::to_string(*i);
  return quote(std::get<std::string>(r.ref));
}

std::string list(const ColList& cols) {
  std::string out = "[";
  for (std::size_t i = 0; i < cols.size(); ++i) {
    if (i) out += ", ";
    out += ref(cols[i].from);
    if (cols[i].to) out += ".." + std::to_string(*cols[i].to);
  }
  return out + "]";
}

int precedence(const Expr& e) {
  switch (e.kind) {
    case Expr::Kind::binary:
      switch (e.op) {
        case Op::or_: return 1;
        case Op::and_: return 2;
        case Op::eq: case Op::ne: case Op::lt: case Op::le: case Op::gt: case Op::ge: return 4;
        case Op::add: case Op::sub: return 5;
        default: return 6;
      }
    case Expr::Kind::unary: return e.op == Op::not_ ? 3 : 7;
    default: return 8;
  }
}

std::string_view symbol(Op op) {
  switch (op) {
    case Op::add: return "+";
    case Op::sub: return "-";
    case Op::mul: return "*";
    case Op::div: return "/";
    case Op::eq: return "=";
    case Op::ne: return "!=";
    case Op::lt: return "<";
    case Op::le: return "<=";
    case Op::gt: return ">";
    case Op::ge: return ">=";
    case Op::and_: return "and";
    case Op::or_: return "or";
    case Op::neg: return "-";
    case Op::not_: return "not";
  }
  return "?";
}

std::string print(const Expr& e);

std::string wrapped(const Expr& child, bool parens) {
  return parens ? "(" + print(child) + ")" : print(child);
}

std::string print(const Expr& e) {
  switch (e.kind) {
    case Expr::Kind::number: return e.number.to_string();
    case Expr::Kind::text: return quote(e.text);
    case Expr::Kind::col: return "col(" + ref(e.col) + ")";
    case Expr::Kind::cell: return "cell";
    case Expr::Kind::cols: return list(e.cols);
    case Expr::Kind::unary: {
      int p = precedence(e);
      const Expr& a = e.args[0];
      if (e.op == Op::not_) return "not " + wrapped(a, precedence(a) < p);
      return "-" + wrapped(a, precedence(a) < p);
    }
    case Expr::Kind::binary: {
      int p = precedence(e);
      // Left-associative: an equal-precedence right operand keeps its parens;
      // comparisons do not chain at all.
      bool left = precedence(e.args[0]) < p || (p == 4 && precedence(e.args[0]) == 4);
      bool right = precedence(e.args[1]) <= p;
      return wrapped(e.args[0], left) + " " + std::string(symbol(e.op)) + " " +
             wrapped(e.args[1], right);
    }
    case Expr::Kind::call: {
      std::string out = e.text + "(";
      for (std::size_t i = 0; i < e.args.size(); ++i) out += (i ? ", " : "") + print(e.args[i]);
      return out + ")";
    }
  }
  return "";
}

std::string_view agg_name(Agg a) {
  return a == Agg::first ? "first" : a == Agg::sum ? "sum" : "mean";
}

std::string_view mode_name(ImputeMode m) {
  return m == ImputeMode::empty ? "empty" : m == ImputeMode::zero ? "zero" : "mean";
}

struct Printer {
  std::string operator()(const DropCols& s) const { return "drop_cols " + list(s.cols); }
  std::string operator()(const KeepCols& s) const { return "keep_cols " + list(s.cols); }
  std::string operator()(const MergeCols& s) const {
    std::string out = "merge_cols " + ref(s.a) + " " + ref(s.b);
    if (s.sep) out += " sep=" + quote(*s.sep);
    if (s.name) out += " as=" + quote(*s.name);
    return out;
  }
  std::string operator()(const SplitCol& s) const {
    std::string out = "split_col " + ref(s.col);
    out += s.regex ? " regex=" + quote(*s.regex) : " delim=" + quote(*s.delim);
    out += " into=[";
    for (std::size_t i = 0; i < s.into.size(); ++i) out += (i ? ", " : "") + quote(s.into[i]);
    return out + "]";
  }
  std::string operator()(const Derive& s) const { return "derive " + quote(s.name) + " = " + print(s.expr); }
  std::string operator()(const Filter& s) const { return "filter " + print(s.pred); }
  std::string operator()(const Sort& s) const {
    return "sort " + ref(s.col) + (s.descending ? " desc" : "");
  }
  std::string operator()(const PivotWider& s) const {
    std::string out = "pivot_wider id=" + list(s.id) + " names=" + ref(s.names) + " values=" + ref(s.values);
    if (s.agg) out += " agg=" + std::string(agg_name(*s.agg));
    return out;
  }
  std::string operator()(const PivotLonger& s) const {
    return "pivot_longer " + list(s.cols) + " names_to=" + quote(s.names_to) +
           " values_to=" + quote(s.values_to);
  }
  std::string operator()(const Impute& s) const {
    return "impute " + list(s.cols) + " mode=" + std::string(mode_name(s.mode));
  }
  std::string operator()(const Dedupe& s) const {
    return s.cols.empty() ? "dedupe" : "dedupe " + list(s.cols);
  }
  std::string operator()(const Rename& s) const { return "rename " + ref(s.col) + " " + quote(s.name); }
  std::string operator()(const Style& s) const {
    std::string out = s.rows ? "style rows" : "style cells";
    if (!s.cols.empty()) out += " " + list(s.cols);
    if (s.where) out += " where " + print(*s.where);
    std::vector<std::string> items;
    if (s.delta.bold) items.emplace_back("bold");
    if (s.delta.italic) items.emplace_back("italic");
    if (s.delta.bg) items.push_back("bg=" + *s.delta.bg);
    if (s.delta.fg) items.push_back("fg=" + *s.delta.fg);
    out += " with";
    for (std::size_t i = 0; i < items.size(); ++i) out += (i ? ", " : " ") + items[i];
    return out;
  }
  std::string operator()(const MergeTables& s) const {
    return s.label ? "merge_tables label=" + quote(*s.label) : "merge_tables";
  }
};

}  // namespace

std::string to_string(const Expr& e) { return print(e); }

std::string canonicalize(const Plan& plan) {
  std::string out;
  for (std::size_t i = 0; i < plan.statements.size(); ++i) {
    if (i) out += "\n";
    out += std::visit(Printer{}, plan.statements[i]);
  }
  return out;
}

}  // namespace smartpaste::plan
