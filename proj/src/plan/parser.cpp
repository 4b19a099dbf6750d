#include "smartpaste/error.hpp"
#include "smartpaste/plan.hpp"
#include "smartpaste/text.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <regex>

namespace smartpaste::plan {

namespace {

enum class Tok { ident, integer, decimal, string, color, punct, end };

struct Token {
  Tok kind = Tok::end;
  std::string text;
  int col = 1;
};

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }
bool hex_digit(char c) { return std::isxdigit(static_cast<unsigned char>(c)) != 0; }

// Tokens of one line; `#` starts a comment unless it is a color right after '='.
std::vector<Token> lex_line(std::string_view s, int line) {
  std::vector<Token> out;
  std::size_t i = 0;
  auto at = [&](std::size_t k) { return k < s.size() ? s[k] : '\0'; };
  while (i < s.size()) {
    char c = s[i];
    int col = static_cast<int>(i) + 1;
    if (c == ' ' || c == '\t' || c == '\r') {
      ++i;
      continue;
    }
    if (c == '#') {
      bool after_eq = !out.empty() && out.back().kind == Tok::punct && out.back().text == "=";
      std::size_t j = i + 1;
      while (j < s.size() && hex_digit(s[j])) ++j;
      std::size_t n = j - i - 1;
      if (after_eq && (n == 3 || n == 6) && !ident_char(at(j))) {
        out.push_back({Tok::color, std::string(s.substr(i, j - i)), col});
        i = j;
        continue;
      }
      break;  // comment
    }
    if (ident_start(c)) {
      std::size_t j = i;
      while (j < s.size() && ident_char(s[j])) ++j;
      out.push_back({Tok::ident, std::string(s.substr(i, j - i)), col});
      i = j;
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t j = i;
      while (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j]))) ++j;
      Tok kind = Tok::integer;
      if (at(j) == '.' && std::isdigit(static_cast<unsigned char>(at(j + 1)))) {
        ++j;
        while (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j]))) ++j;
        kind = Tok::decimal;
      }
      out.push_back({kind, std::string(s.substr(i, j - i)), col});
      i = j;
      continue;
    }
    if (c == '"') {
      std::string value;
      std::size_t j = i + 1;
      bool closed = false;
      while (j < s.size()) {
        char d = s[j];
        if (d == '"') {
          closed = true;
          ++j;
          break;
        }
        if (d == '\\') {
          char e = at(j + 1);
          switch (e) {
            case '"': value += '"'; break;
            case '\\': value += '\\'; break;
            case 'n': value += '\n'; break;
            case 't': value += '\t'; break;
            default:
              // Unknown escapes stay literal so regex patterns read naturally.
              value += '\\';
              value += e;
          }
          j += 2;
          continue;
        }
        value += d;
        ++j;
      }
      if (!closed) throw PlanSyntaxError(line, col, "closing '\"'");
      out.push_back({Tok::string, std::move(value), col});
      i = j;
      continue;
    }
    static constexpr std::array<std::string_view, 6> kTwo{"..", "!=", "<=", ">=", "<>", "=="};
    bool matched = false;
    for (auto p : kTwo) {
      if (s.substr(i, 2) == p) {
        out.push_back({Tok::punct, std::string(p == "<>" ? "!=" : p == "==" ? "=" : p), col});
        i += 2;
        matched = true;
        break;
      }
    }
    if (matched) continue;
    // Unicode comparison signs and the multiplication, division and minus signs.
    static const std::array<std::pair<std::string_view, std::string_view>, 6> kUnicode{{
        {"\xE2\x89\xA0", "!="}, {"\xE2\x89\xA4", "<="}, {"\xE2\x89\xA5", ">="},
        {"\xC3\x97", "*"}, {"\xC3\xB7", "/"}, {"\xE2\x88\x92", "-"}}};
    for (auto [u, p] : kUnicode) {
      if (s.substr(i, u.size()) == u) {
        out.push_back({Tok::punct, std::string(p), col});
        i += u.size();
        matched = true;
        break;
      }
    }
    if (matched) continue;
    if (std::string_view("[](),=<>+-*/").find(c) != std::string_view::npos) {
      out.push_back({Tok::punct, std::string(1, c), col});
      ++i;
      continue;
    }
    throw PlanSyntaxError(line, col, "a token (found '" + std::string(1, c) + "')");
  }
  out.push_back({Tok::end, "", static_cast<int>(s.size()) + 1});
  return out;
}

enum class Type { num, text, boolean, any };

std::string_view type_name(Type t) {
  switch (t) {
    case Type::num: return "number";
    case Type::text: return "text";
    case Type::boolean: return "boolean";
    case Type::any: return "value";
  }
  return "value";
}

struct FnSig {
  std::string_view name;
  std::size_t min_args, max_args;
  Type result;
};

constexpr std::array<FnSig, 10> kFunctions{{
    {"abs", 1, 1, Type::num},
    {"round", 1, 2, Type::num},
    {"concat", 1, 16, Type::text},
    {"to_number", 1, 1, Type::num},
    {"to_text", 1, 1, Type::text},
    {"len", 1, 1, Type::num},
    {"regex_match", 2, 2, Type::boolean},
    {"regex_extract", 2, 3, Type::text},
    {"rowmax", 1, 1, Type::num},
    {"rowmin", 1, 1, Type::num},
}};

const FnSig* find_function(std::string_view name) {
  for (const auto& f : kFunctions)
    if (f.name == name) return &f;
  return nullptr;
}

constexpr std::array<std::string_view, 14> kKeywords{
    "drop_cols", "keep_cols", "merge_cols", "split_col", "derive", "filter", "sort",
    "pivot_wider", "pivot_longer", "impute", "dedupe", "rename", "style", "merge_tables"};

class LineParser {
 public:
  LineParser(std::vector<Token> toks, int line, int statement)
      : toks_(std::move(toks)), line_(line), statement_(statement) {}

  Statement statement() {
    const Token& kw = peek();
    if (kw.kind != Tok::ident ||
        std::find(kKeywords.begin(), kKeywords.end(), kw.text) == kKeywords.end())
      fail("a statement keyword");
    std::string k = next().text;
    Statement st = parse_body(k);
    if (peek().kind != Tok::end) fail("end of line");
    return st;
  }

 private:
  Statement parse_body(const std::string& k) {
    if (k == "drop_cols") return DropCols{list()};
    if (k == "keep_cols") return KeepCols{list()};
    if (k == "merge_cols") {
      MergeCols m{colref(), colref(), std::nullopt, std::nullopt};
      while (peek().kind == Tok::ident) {
        std::string opt = option_name({"sep", "as"});
        if (opt == "sep") m.sep = string_value();
        else m.name = string_value();
      }
      return m;
    }
    if (k == "split_col") {
      SplitCol s;
      s.col = colref();
      while (peek().kind == Tok::ident) {
        std::string opt = option_name({"regex", "delim", "into"});
        if (opt == "regex") s.regex = string_value();
        else if (opt == "delim") s.delim = string_value();
        else s.into = string_list();
      }
      if (s.regex.has_value() == s.delim.has_value()) fail("exactly one of regex= or delim=");
      if (s.into.empty()) fail("into=[...]");
      if (s.delim && s.delim->empty()) type_error("delimiter must not be empty");
      if (s.regex) {
        std::size_t groups = check_pattern(*s.regex);
        if (groups != s.into.size())
          type_error("regex has " + std::to_string(groups) + " groups but into= names " +
                     std::to_string(s.into.size()) + " columns");
      }
      return s;
    }
    if (k == "derive") {
      Derive d;
      d.name = string_value();
      expect("=");
      Type t;
      d.expr = expr(t, false);
      return d;
    }
    if (k == "filter") {
      Filter f;
      Type t;
      f.pred = expr(t, false);
      if (t != Type::boolean) type_error("filter needs a boolean condition, got " + std::string(type_name(t)));
      return f;
    }
    if (k == "sort") {
      Sort s;
      s.col = colref();
      if (peek().kind == Tok::ident) {
        std::string dir = next().text;
        if (dir == "desc") s.descending = true;
        else if (dir != "asc") fail("asc or desc", -1);
      }
      return s;
    }
    if (k == "pivot_wider") {
      PivotWider p;
      bool id = false, names = false, values = false;
      while (peek().kind == Tok::ident) {
        std::string opt = option_name({"id", "names", "values", "agg"});
        if (opt == "id") {
          p.id = at_punct("[") ? list() : ColList{ColItem{colref(), std::nullopt}};
          id = true;
        } else if (opt == "names") {
          p.names = colref();
          names = true;
        } else if (opt == "values") {
          p.values = colref();
          values = true;
        } else {
          std::string a = ident_value({"first", "sum", "mean"});
          p.agg = a == "first" ? Agg::first : a == "sum" ? Agg::sum : Agg::mean;
        }
      }
      if (!id) fail("id=");
      if (!names) fail("names=");
      if (!values) fail("values=");
      return p;
    }
    if (k == "pivot_longer") {
      PivotLonger p;
      p.cols = list();
      while (peek().kind == Tok::ident) {
        std::string opt = option_name({"names_to", "values_to"});
        (opt == "names_to" ? p.names_to : p.values_to) = string_value();
      }
      return p;
    }
    if (k == "impute") {
      Impute m;
      m.cols = list();
      if (peek().kind == Tok::ident) {
        option_name({"mode"});
        std::string v = ident_value({"empty", "zero", "mean"});
        m.mode = v == "empty" ? ImputeMode::empty : v == "zero" ? ImputeMode::zero : ImputeMode::mean;
      }
      return m;
    }
    if (k == "dedupe") {
      Dedupe d;
      if (at_punct("[")) d.cols = list();
      return d;
    }
    if (k == "rename") {
      Rename r;
      r.col = colref();
      r.name = string_value();
      return r;
    }
    if (k == "style") {
      Style s;
      std::string target = ident_value({"rows", "cells"});
      s.rows = target == "rows";
      if (at_punct("[")) s.cols = list();
      if (peek().kind == Tok::ident && peek().text == "where") {
        next();
        Type t;
        s.where = expr(t, !s.rows);
        if (t != Type::boolean)
          type_error("style condition must be boolean, got " + std::string(type_name(t)));
      }
      if (!(peek().kind == Tok::ident && peek().text == "with")) fail("'with'");
      next();
      do {
        std::string item = ident_value({"bold", "italic", "bg", "fg"});
        if (item == "bold") {
          s.delta.bold = true;
        } else if (item == "italic") {
          s.delta.italic = true;
        } else {
          expect("=");
          const Token& t = peek();
          std::optional<std::string> c;
          if (t.kind == Tok::color || t.kind == Tok::string) c = normalize_color(t.text);
          if (!c) fail("a color like #RRGGBB");
          next();
          (item == "bg" ? s.delta.bg : s.delta.fg) = c;
        }
      } while (accept(","));
      return s;
    }
    // merge_tables
    MergeTables m;
    if (peek().kind == Tok::ident) {
      option_name({"label"});
      m.label = string_value();
    }
    return m;
  }

  // --- expressions -----------------------------------------------------------

  Expr expr(Type& t, bool cell_ok) {
    cell_ok_ = cell_ok;
    return or_expr(t);
  }

  static Expr binary(Op op, Expr a, Expr b) {
    Expr e;
    e.kind = Expr::Kind::binary;
    e.op = op;
    e.args.push_back(std::move(a));
    e.args.push_back(std::move(b));
    return e;
  }

  void need_bool(Type t, std::string_view what) {
    if (t != Type::boolean)
      type_error(std::string(what) + " needs boolean operands, got " + std::string(type_name(t)));
  }

  Expr or_expr(Type& t) {
    Expr e = and_expr(t);
    while (peek().kind == Tok::ident && peek().text == "or") {
      next();
      need_bool(t, "or");
      Type rt;
      Expr r = and_expr(rt);
      need_bool(rt, "or");
      e = binary(Op::or_, std::move(e), std::move(r));
    }
    return e;
  }

  Expr and_expr(Type& t) {
    Expr e = not_expr(t);
    while (peek().kind == Tok::ident && peek().text == "and") {
      next();
      need_bool(t, "and");
      Type rt;
      Expr r = not_expr(rt);
      need_bool(rt, "and");
      e = binary(Op::and_, std::move(e), std::move(r));
    }
    return e;
  }

  Expr not_expr(Type& t) {
    if (peek().kind == Tok::ident && peek().text == "not") {
      next();
      Expr inner = not_expr(t);
      need_bool(t, "not");
      Expr e;
      e.kind = Expr::Kind::unary;
      e.op = Op::not_;
      e.args.push_back(std::move(inner));
      t = Type::boolean;
      return e;
    }
    return comparison(t);
  }

  Expr comparison(Type& t) {
    Expr e = additive(t);
    static const std::array<std::pair<std::string_view, Op>, 6> kOps{
        {{"=", Op::eq}, {"!=", Op::ne}, {"<", Op::lt}, {"<=", Op::le}, {">", Op::gt}, {">=", Op::ge}}};
    if (peek().kind != Tok::punct) return e;
    for (auto [sym, op] : kOps) {
      if (peek().text != sym) continue;
      next();
      Type rt;
      Expr r = additive(rt);
      bool lb = t == Type::boolean, rb = rt == Type::boolean;
      if (lb != rb) type_error("cannot compare a boolean with a " + std::string(type_name(lb ? rt : t)));
      if (lb && op != Op::eq && op != Op::ne) type_error("booleans only support = and !=");
      t = Type::boolean;
      return binary(op, std::move(e), std::move(r));
    }
    return e;
  }

  void need_value(Type t, std::string_view what) {
    if (t == Type::boolean) type_error(std::string(what) + " cannot take a boolean operand");
  }

  Expr additive(Type& t) {
    Expr e = multiplicative(t);
    while (peek().kind == Tok::punct && (peek().text == "+" || peek().text == "-")) {
      Op op = next().text == "+" ? Op::add : Op::sub;
      need_value(t, "arithmetic");
      Type rt;
      Expr r = multiplicative(rt);
      need_value(rt, "arithmetic");
      e = binary(op, std::move(e), std::move(r));
      t = Type::num;
    }
    return e;
  }

  Expr multiplicative(Type& t) {
    Expr e = unary(t);
    while (peek().kind == Tok::punct && (peek().text == "*" || peek().text == "/")) {
      Op op = next().text == "*" ? Op::mul : Op::div;
      need_value(t, "arithmetic");
      Type rt;
      Expr r = unary(rt);
      need_value(rt, "arithmetic");
      e = binary(op, std::move(e), std::move(r));
      t = Type::num;
    }
    return e;
  }

  Expr unary(Type& t) {
    if (peek().kind == Tok::punct && peek().text == "-") {
      next();
      Expr inner = unary(t);
      need_value(t, "negation");
      Expr e;
      e.kind = Expr::Kind::unary;
      e.op = Op::neg;
      e.args.push_back(std::move(inner));
      t = Type::num;
      return e;
    }
    return primary(t);
  }

  Expr primary(Type& t) {
    const Token& tok = peek();
    Expr e;
    if (tok.kind == Tok::integer || tok.kind == Tok::decimal) {
      e.kind = Expr::Kind::number;
      e.number = *Decimal::parse(next().text);
      t = Type::num;
      return e;
    }
    if (tok.kind == Tok::string) {
      e.kind = Expr::Kind::text;
      e.text = next().text;
      t = Type::text;
      return e;
    }
    if (tok.kind == Tok::punct && tok.text == "(") {
      next();
      e = or_expr(t);
      expect(")");
      return e;
    }
    if (tok.kind == Tok::ident) {
      if (tok.text == "cell") {
        if (!cell_ok_) type_error("'cell' is only available in `style cells ... where`");
        next();
        e.kind = Expr::Kind::cell;
        t = Type::any;
        return e;
      }
      if (tok.text == "col") {
        next();
        expect("(");
        // col(i): the cell under test, same as `cell`
        if (peek().kind == Tok::ident && peek().text == "i") {
          if (!cell_ok_) type_error("col(i) is only available in `style cells ... where`");
          next();
          expect(")");
          e.kind = Expr::Kind::cell;
          t = Type::any;
          return e;
        }
        e.kind = Expr::Kind::col;
        e.col = colref();
        expect(")");
        t = Type::any;
        return e;
      }
      const FnSig* fn = find_function(tok.text);
      if (!fn) fail("an expression");
      next();
      expect("(");
      e.kind = Expr::Kind::call;
      e.text = std::string(fn->name);
      std::vector<Type> types;
      if (!(peek().kind == Tok::punct && peek().text == ")")) {
        do {
          if (at_punct("[")) {
            Expr l;
            l.kind = Expr::Kind::cols;
            l.cols = list();
            e.args.push_back(std::move(l));
            types.push_back(Type::any);
          } else {
            Type at;
            e.args.push_back(or_expr(at));
            types.push_back(at);
          }
        } while (accept(","));
      }
      expect(")");
      check_call(*fn, e, types);
      t = fn->result;
      return e;
    }
    fail("an expression");
  }

  void check_call(const FnSig& fn, const Expr& e, const std::vector<Type>& types) {
    std::size_t n = e.args.size();
    std::string name(fn.name);
    if (n < fn.min_args || n > fn.max_args)
      type_error(name + " takes " + std::to_string(fn.min_args) +
                 (fn.max_args != fn.min_args ? ".." + std::to_string(fn.max_args) : "") +
                 " argument(s), got " + std::to_string(n));
    bool list_fn = name == "rowmax" || name == "rowmin";
    for (std::size_t i = 0; i < n; ++i) {
      bool is_list = e.args[i].kind == Expr::Kind::cols;
      if (is_list != list_fn) type_error(name + (list_fn ? " needs a column list like [2..4]" : " cannot take a column list"));
      if (types[i] == Type::boolean) type_error(name + " cannot take a boolean argument");
    }
    auto literal_int = [&](std::size_t i) {
      const Expr& a = e.args[i];
      if (a.kind != Expr::Kind::number || a.number.scale() != 0 || a.number.sign() < 0)
        type_error(name + " argument " + std::to_string(i + 1) + " must be a non-negative integer literal");
    };
    if (name == "round" && n == 2) literal_int(1);
    if (name == "regex_match" || name == "regex_extract") {
      if (e.args[1].kind != Expr::Kind::text) type_error(name + " needs a string literal pattern");
      std::size_t groups = check_pattern(e.args[1].text);
      if (name == "regex_extract" && n == 3) {
        literal_int(2);
        if (e.args[2].number > Decimal::from_int(static_cast<long long>(groups)))
          type_error("regex_extract group exceeds the pattern's " + std::to_string(groups) + " group(s)");
      }
    }
  }

  // Validates a pattern; returns its capture-group count.
  std::size_t check_pattern(const std::string& pattern) {
    if (auto err = check_regex(pattern)) type_error(*err);
    try {
      return std::regex(pattern, std::regex::ECMAScript).mark_count();
    } catch (const std::regex_error& ex) {
      type_error("invalid regex \"" + pattern + "\": " + ex.what());
    }
  }

  // --- pieces ----------------------------------------------------------------

  ColRef colref() {
    const Token& t = peek();
    if (t.kind == Tok::integer) {
      int v = std::stoi(next().text);
      if (v < 1) fail("a 1-based column number", -1);
      return ColRef::index(v);
    }
    if (t.kind == Tok::string) return ColRef::name(next().text);
    fail("a column reference");
  }

  ColList list() {
    expect("[");
    ColList out;
    if (accept("]")) fail("at least one column");
    do {
      ColItem item{colref(), std::nullopt};
      if (accept("..")) {
        if (!std::holds_alternative<int>(item.from.ref)) fail("a column number before '..'", -1);
        const Token& end = peek();
        if (end.kind != Tok::integer) fail("a column number after '..'");
        int to = std::stoi(next().text);
        if (to < std::get<int>(item.from.ref)) fail("a range end not below its start", -1);
        item.to = to;
      }
      out.push_back(std::move(item));
    } while (accept(","));
    expect("]");
    return out;
  }

  std::vector<std::string> string_list() {
    expect("[");
    std::vector<std::string> out;
    if (!accept("]")) {
      do out.push_back(string_value());
      while (accept(","));
      expect("]");
    }
    return out;
  }

  std::string option_name(std::initializer_list<std::string_view> allowed) {
    const Token& t = peek();
    if (t.kind != Tok::ident || std::find(allowed.begin(), allowed.end(), t.text) == allowed.end()) {
      std::string exp;
      for (auto a : allowed) exp += (exp.empty() ? "" : " or ") + std::string(a) + "=";
      fail(exp);
    }
    std::string name = next().text;
    expect("=");
    return name;
  }

  std::string ident_value(std::initializer_list<std::string_view> allowed) {
    const Token& t = peek();
    if (t.kind != Tok::ident || std::find(allowed.begin(), allowed.end(), t.text) == allowed.end()) {
      std::string exp;
      for (auto a : allowed) exp += (exp.empty() ? "" : " or ") + std::string(a);
      fail(exp);
    }
    return next().text;
  }

  std::string string_value() {
    if (peek().kind != Tok::string) fail("a quoted string");
    return next().text;
  }

  const Token& peek() const { return toks_[pos_]; }
  const Token& next() { return toks_[pos_ < toks_.size() - 1 ? pos_++ : pos_]; }

  bool at_punct(std::string_view p) const { return peek().kind == Tok::punct && peek().text == p; }

  bool accept(std::string_view p) {
    if (peek().kind == Tok::punct && peek().text == p) {
      next();
      return true;
    }
    return false;
  }

  void expect(std::string_view p) {
    if (!accept(p)) fail("\"" + std::string(p) + "\"");
  }

  // `back` = -1 reports at the previous token.
  [[noreturn]] void fail(const std::string& expected, int back = 0) const {
    std::size_t at = back < 0 && pos_ > 0 ? pos_ - 1 : pos_;
    throw PlanSyntaxError(line_, toks_[at].col, expected);
  }

  [[noreturn]] void type_error(const std::string& detail) const {
    throw PlanTypeError(statement_, detail + " (line " + std::to_string(line_) + ")");
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  int line_;
  int statement_;
  bool cell_ok_ = false;
};

Plan parse_impl(std::string_view source, bool require_version) {
  Plan plan;
  plan.source_text = std::string(source);
  auto lines = text::split_lines(source);
  bool first_content = true;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    int line = static_cast<int>(i) + 1;
    std::string trimmed = text::trim(lines[i]);
    if (first_content && !trimmed.empty() && trimmed[0] != '#') {
      first_content = false;
      if (trimmed == kVersionTag) continue;
      if (require_version) throw PlanSyntaxError(line, 1, "\"plan/1\" version line");
    }
    auto toks = lex_line(lines[i], line);
    if (toks.size() == 1) continue;  // blank or comment
    if (toks[0].kind == Tok::ident && toks[0].text == "plan" && toks.size() > 2 &&
        toks[1].text == "/")
      throw PlanSyntaxError(line, toks[0].col, "the version line only as the first line");
    LineParser p(std::move(toks), line, static_cast<int>(plan.statements.size()) + 1);
    plan.statements.push_back(p.statement());
    plan.lines.push_back(line);
  }
  if (require_version && first_content) throw PlanSyntaxError(1, 1, "\"plan/1\" version line");
  return plan;
}

}  // namespace

Plan parse_plan(std::string_view source) { return parse_impl(source, false); }
Plan parse_plan_file(std::string_view source) { return parse_impl(source, true); }

std::optional<std::string> check_regex(std::string_view p) {
  bool in_class = false;
  for (std::size_t i = 0; i < p.size(); ++i) {
    char c = p[i];
    if (c == '\\') {
      if (i + 1 >= p.size()) return "regex ends with a lone backslash";
      char n = p[i + 1];
      if (!in_class && n >= '1' && n <= '9') return "backreferences are not supported";
      if (!in_class && n == 'k') return "named backreferences are not supported";
      ++i;
      continue;
    }
    if (in_class) {
      if (c == ']') in_class = false;
      continue;
    }
    if (c == '[') {
      in_class = true;
      if (i + 1 < p.size() && p[i + 1] == '^') ++i;
      if (i + 1 < p.size() && p[i + 1] == ']') ++i;  // literal ']' first in class
      continue;
    }
    if (c == '(' && i + 1 < p.size() && p[i + 1] == '?') {
      std::string_view rest = p.substr(i + 2);
      if (rest.rfind(":", 0) == 0) continue;
      if (rest.rfind("=", 0) == 0 || rest.rfind("!", 0) == 0 || rest.rfind("<=", 0) == 0 ||
          rest.rfind("<!", 0) == 0)
        return "lookaround assertions are not supported";
      return "only (?:...) groups are supported";
    }
  }
  if (in_class) return "unterminated character class";
  return std::nullopt;
}

}  // namespace smartpaste::plan
