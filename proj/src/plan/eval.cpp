#include "smartpaste/error.hpp"
#include "smartpaste/plan.hpp"
#include "smartpaste/text.hpp"

#include <algorithm>
#include <map>
#include <regex>
#include <set>

namespace smartpaste::plan {

namespace {

using Value = std::variant<std::monostate, Decimal, std::string, bool>;

constexpr std::size_t kMaxWarnings = 50;

bool is_none(const Value& v) { return std::holds_alternative<std::monostate>(v); }

Value value_of(const CellValue& c) {
  if (const Number* n = as_number(c)) return n->value;
  if (const std::string* s = as_text(c)) return *s;
  return std::monostate{};
}

std::string text_of(const Value& v) {
  if (const Decimal* d = std::get_if<Decimal>(&v)) return d->to_string();
  if (const std::string* s = std::get_if<std::string>(&v)) return *s;
  if (const bool* b = std::get_if<bool>(&v)) return *b ? "true" : "false";
  return "";
}

std::optional<Decimal> number_of(const Value& v) {
  if (const Decimal* d = std::get_if<Decimal>(&v)) return *d;
  if (const std::string* s = std::get_if<std::string>(&v))
    if (auto n = lex_number(text::trim(*s))) return n->value;
  return std::nullopt;
}

CellValue to_cell(const Value& v) {
  if (const Decimal* d = std::get_if<Decimal>(&v)) return Number{*d, false};
  if (const bool* b = std::get_if<bool>(&v)) return std::string(*b ? "true" : "false");
  if (const std::string* s = std::get_if<std::string>(&v)) return lex_cell(*s);
  return std::monostate{};
}

std::string ref_text(const ColRef& r) {
  if (const int* i = std::get_if<int>(&r.ref)) return std::to_string(*i);
  return "\"" + std::get<std::string>(r.ref) + "\"";
}

// Grouping key with the same meaning as CellValue equality: numbers by value
// and percent flag (1.5 matches 1.50), text exactly.
std::string cell_key(const CellValue& v) {
  if (is_empty(v)) return "e";
  if (const Number* n = as_number(v))
    return "n" + n->value.normalized().to_string() + (n->percent ? "%" : "");
  return "t" + *as_text(v);
}

class Evaluator {
 public:
  explicit Evaluator(std::vector<std::string>& warnings) : warnings_(warnings) {}

  StructuredTable run(const Plan& plan, std::span<const StructuredTable> input) {
    if (input.empty()) throw PlanTypeError(0, "no input tables");
    std::size_t first = 0;
    bool merges = !plan.statements.empty() && std::holds_alternative<MergeTables>(plan.statements[0]);
    if (merges) {
      stmt_ = 1;
      t_ = merge_tables(std::get<MergeTables>(plan.statements[0]), input);
      first = 1;
    } else {
      if (input.size() > 1)
        throw PlanTypeError(1, std::to_string(input.size()) +
                                   " tables need merge_tables as the first statement");
      t_ = input[0];
    }
    for (std::size_t i = first; i < plan.statements.size(); ++i) {
      stmt_ = static_cast<int>(i) + 1;
      std::visit([this](const auto& s) { apply(s); }, plan.statements[i]);
    }
    if (suppressed_ > 0)
      warnings_.push_back(std::to_string(suppressed_) + " more cell warnings suppressed");
    return std::move(t_);
  }

 private:
  // --- columns ---------------------------------------------------------------

  std::string available() const {
    std::string out = "1.." + std::to_string(t_.column_count) + " [";
    for (std::size_t c = 0; c < t_.column_count; ++c) out += (c ? ", " : "") + t_.column_name(c);
    return out + "]";
  }

  std::optional<std::size_t> find_name(const std::string& name) const {
    for (std::size_t c = 0; c < t_.column_count; ++c)
      if (t_.column_name(c) == name) return c;
    return std::nullopt;
  }

  std::size_t resolve(const ColRef& r) const {
    if (const int* i = std::get_if<int>(&r.ref)) {
      if (*i >= 1 && static_cast<std::size_t>(*i) <= t_.column_count) return *i - 1;
    } else if (auto c = find_name(std::get<std::string>(r.ref))) {
      return *c;
    }
    throw UnknownColumnError(ref_text(r), available());
  }

  // Listed columns in order, each at most once.
  std::vector<std::size_t> resolve(const ColList& list) const {
    std::vector<std::size_t> out;
    auto add = [&](std::size_t c) {
      if (std::find(out.begin(), out.end(), c) == out.end()) out.push_back(c);
    };
    for (const auto& item : list) {
      std::size_t from = resolve(item.from);
      if (!item.to) {
        add(from);
        continue;
      }
      for (int i = std::get<int>(item.from.ref); i <= *item.to; ++i) add(resolve(ColRef::index(i)));
    }
    return out;
  }

  std::vector<std::size_t> all_columns() const {
    std::vector<std::size_t> out(t_.column_count);
    for (std::size_t c = 0; c < out.size(); ++c) out[c] = c;
    return out;
  }

  void check_refs(const Expr& e) const {
    if (e.kind == Expr::Kind::col) resolve(e.col);
    if (e.kind == Expr::Kind::cols) resolve(e.cols);
    for (const auto& a : e.args) check_refs(a);
  }

  void ensure_headers() {
    if (t_.has_headers()) return;
    for (std::size_t c = 0; c < t_.column_count; ++c) t_.headers.push_back("col" + std::to_string(c + 1));
  }

  void erase_column(std::size_t c) {
    if (t_.has_headers()) t_.headers.erase(t_.headers.begin() + static_cast<std::ptrdiff_t>(c));
    for (auto& row : t_.rows) row.erase(row.begin() + static_cast<std::ptrdiff_t>(c));
    --t_.column_count;
  }

  void require_rows(std::string_view what) const {
    if (t_.rows.empty())
      throw Error(ErrorCode::EmptyResult, "statement " + std::to_string(stmt_) + ": " +
                                              std::string(what) + " has no rows to work on");
  }

  void warn(std::size_t row, const std::string& msg) {
    if (warnings_.size() >= kMaxWarnings) {
      ++suppressed_;
      return;
    }
    warnings_.push_back("statement " + std::to_string(stmt_) + ", row " + std::to_string(row + 1) +
                        ": " + msg);
  }

  // --- expressions -----------------------------------------------------------

  struct Scope {
    std::size_t row = 0;
    const Cell* cell = nullptr;
  };

  const std::regex& compiled(const std::string& pattern) {
    auto it = regexes_.find(pattern);
    if (it == regexes_.end()) it = regexes_.emplace(pattern, std::regex(pattern, std::regex::ECMAScript)).first;
    return it->second;
  }

  Value eval(const Expr& e, const Scope& s) {
    const auto& row = t_.rows[s.row];
    switch (e.kind) {
      case Expr::Kind::number: return e.number;
      case Expr::Kind::text: return e.text;
      case Expr::Kind::col: return value_of(row[resolve(e.col)].value);
      case Expr::Kind::cell: return s.cell ? value_of(s.cell->value) : Value{};
      case Expr::Kind::cols: return Value{};
      case Expr::Kind::unary: {
        Value a = eval(e.args[0], s);
        if (e.op == Op::not_) return !std::get<bool>(a);
        if (is_none(a)) return Value{};
        if (auto n = number_of(a)) return n->negated();
        warn(s.row, "cannot negate \"" + text_of(a) + "\"");
        return Value{};
      }
      case Expr::Kind::binary: return binary(e, s);
      case Expr::Kind::call: return call(e, s);
    }
    return Value{};
  }

  Value binary(const Expr& e, const Scope& s) {
    if (e.op == Op::and_) return std::get<bool>(eval(e.args[0], s)) && std::get<bool>(eval(e.args[1], s));
    if (e.op == Op::or_) return std::get<bool>(eval(e.args[0], s)) || std::get<bool>(eval(e.args[1], s));
    Value a = eval(e.args[0], s), b = eval(e.args[1], s);
    switch (e.op) {
      case Op::eq: case Op::ne: case Op::lt: case Op::le: case Op::gt: case Op::ge:
        return compare(e.op, a, b);
      default: break;
    }
    if (is_none(a) || is_none(b)) {
      warn(s.row, "empty operand in arithmetic");
      return Value{};
    }
    auto x = number_of(a), y = number_of(b);
    if (!x || !y) {
      warn(s.row, "\"" + text_of(x ? b : a) + "\" is not a number");
      return Value{};
    }
    switch (e.op) {
      case Op::add: return *x + *y;
      case Op::sub: return *x - *y;
      case Op::mul: return *x * *y;
      default:
        if (auto q = Decimal::divide(*x, *y)) return *q;
        warn(s.row, "division by zero");
        return Value{};
    }
  }

  static bool compare(Op op, const Value& a, const Value& b) {
    if (is_none(a) || is_none(b)) return false;
    std::strong_ordering ord = std::strong_ordering::equal;
    if (std::holds_alternative<bool>(a) || std::holds_alternative<bool>(b)) {
      ord = text_of(a) <=> text_of(b);
    } else if (auto x = number_of(a), y = number_of(b); x && y) {
      ord = *x <=> *y;
    } else {
      ord = text_of(a) <=> text_of(b);
    }
    switch (op) {
      case Op::eq: return ord == 0;
      case Op::ne: return ord != 0;
      case Op::lt: return ord < 0;
      case Op::le: return ord <= 0;
      case Op::gt: return ord > 0;
      default: return ord >= 0;
    }
  }

  Value call(const Expr& e, const Scope& s) {
    const std::string& f = e.text;
    if (f == "rowmax" || f == "rowmin") {
      std::optional<Decimal> best;
      for (std::size_t c : resolve(e.args[0].cols)) {
        auto n = number_of(value_of(t_.rows[s.row][c].value));
        if (!n) continue;
        if (!best || (f == "rowmax" ? *n > *best : *n < *best)) best = n;
      }
      if (best) return *best;
      return Value{};
    }
    if (f == "concat") {
      std::string out;
      for (const auto& a : e.args) out += text_of(eval(a, s));
      return out;
    }
    Value a = eval(e.args[0], s);
    if (f == "to_text") return text_of(a);
    if (f == "len") return Decimal::from_int(static_cast<long long>(text::utf8_length(text_of(a))));
    if (f == "regex_match") return std::regex_search(text_of(a), compiled(e.args[1].text));
    if (f == "regex_extract") {
      const std::regex& re = compiled(e.args[1].text);
      std::size_t group = re.mark_count() > 0 ? 1 : 0;
      if (e.args.size() == 3) group = static_cast<std::size_t>(e.args[2].number.mantissa());
      std::string subject = text_of(a);
      std::smatch m;
      if (!std::regex_search(subject, m, re) || !m[group].matched) return Value{};
      return m[group].str();
    }
    // numeric functions
    if (is_none(a)) return Value{};
    auto n = number_of(a);
    if (!n) {
      warn(s.row, f + "(\"" + text_of(a) + "\") needs a number");
      return Value{};
    }
    if (f == "abs") return n->abs();
    if (f == "round") {
      // exactly `places` digits, so a rounded column reads uniformly
      int places = e.args.size() == 2 ? static_cast<int>(e.args[1].number.mantissa()) : 0;
      Decimal r = n->round_half_up(places);
      Decimal::Int m = r.mantissa();
      for (int i = r.scale(); i < places; ++i) m *= 10;
      return Decimal(m, places);
    }
    return *n;  // to_number
  }

  bool truth(const Expr& e, const Scope& s) {
    Value v = eval(e, s);
    const bool* b = std::get_if<bool>(&v);
    return b && *b;
  }

  // --- statements ------------------------------------------------------------

  void apply(const DropCols& s) {
    auto cols = resolve(s.cols);
    if (cols.size() >= t_.column_count) throw PlanTypeError(stmt_, "drop_cols would remove every column");
    t_.flatten_spans();
    std::sort(cols.rbegin(), cols.rend());
    for (std::size_t c : cols) erase_column(c);
  }

  void apply(const KeepCols& s) {
    auto cols = resolve(s.cols);
    t_.flatten_spans();
    StructuredTable out;
    out.caption = t_.caption;
    out.column_count = cols.size();
    if (t_.has_headers())
      for (std::size_t c : cols) out.headers.push_back(t_.headers[c]);
    for (const auto& row : t_.rows) {
      auto& r = out.rows.emplace_back();
      for (std::size_t c : cols) r.push_back(row[c]);
    }
    t_ = std::move(out);
  }

  void apply(const MergeCols& s) {
    std::size_t a = resolve(s.a), b = resolve(s.b);
    if (a == b) throw PlanTypeError(stmt_, "merge_cols needs two different columns");
    t_.flatten_spans();
    std::string sep = s.sep.value_or(" ");
    for (auto& row : t_.rows) {
      const CellValue& va = row[a].value;
      const CellValue& vb = row[b].value;
      if (is_empty(va)) row[a].value = vb;
      else if (!is_empty(vb)) row[a].value = lex_cell(cell_text(va) + sep + cell_text(vb));
    }
    if (s.name) {
      ensure_headers();
      t_.headers[a] = *s.name;
    } else if (t_.has_headers()) {
      t_.headers[a] = t_.headers[a] + sep + t_.headers[b];
    }
    erase_column(b);
  }

  void apply(const SplitCol& s) {
    std::size_t c = resolve(s.col);
    t_.flatten_spans();
    ensure_headers();
    std::size_t n = s.into.size();
    std::optional<std::regex> re;
    if (s.regex) re.emplace(*s.regex, std::regex::ECMAScript);
    for (auto& row : t_.rows) {
      std::string subject = cell_text(row[c].value);
      std::vector<std::string> pieces(n);
      if (re) {
        std::smatch m;
        if (std::regex_search(subject, m, *re))
          for (std::size_t g = 0; g < n; ++g)
            if (m[g + 1].matched) pieces[g] = m[g + 1].str();
      } else {
        std::size_t pos = 0;
        for (std::size_t g = 0; g < n; ++g) {
          std::size_t hit = g + 1 < n ? subject.find(*s.delim, pos) : std::string::npos;
          if (hit == std::string::npos) {
            pieces[g] = subject.substr(pos);
            break;
          }
          pieces[g] = subject.substr(pos, hit - pos);
          pos = hit + s.delim->size();
        }
      }
      CellStyle style = row[c].style;
      std::vector<Cell> cells;
      for (auto& p : pieces) cells.emplace_back(lex_cell(text::trim(p)), style);
      auto at = row.erase(row.begin() + static_cast<std::ptrdiff_t>(c));
      row.insert(at, cells.begin(), cells.end());
    }
    auto at = t_.headers.erase(t_.headers.begin() + static_cast<std::ptrdiff_t>(c));
    t_.headers.insert(at, s.into.begin(), s.into.end());
    t_.column_count += n - 1;
  }

  void apply(const Derive& s) {
    check_refs(s.expr);
    t_.flatten_spans();
    std::vector<CellValue> values;
    for (std::size_t r = 0; r < t_.rows.size(); ++r) values.push_back(to_cell(eval(s.expr, {r})));
    auto target = find_name(s.name);
    ensure_headers();
    if (!target) {
      t_.headers.push_back(s.name);
      for (auto& row : t_.rows) row.emplace_back();
      target = t_.column_count++;
    }
    for (std::size_t r = 0; r < t_.rows.size(); ++r) t_.rows[r][*target].value = std::move(values[r]);
  }

  void apply(const Filter& s) {
    check_refs(s.pred);
    t_.flatten_spans();
    std::vector<std::vector<Cell>> kept;
    for (std::size_t r = 0; r < t_.rows.size(); ++r)
      if (truth(s.pred, {r})) kept.push_back(t_.rows[r]);
    t_.rows = std::move(kept);
  }

  void apply(const Sort& s) {
    std::size_t c = resolve(s.col);
    t_.flatten_spans();
    auto group = [](const CellValue& v) { return is_empty(v) ? 2 : as_number(v) ? 0 : 1; };
    std::stable_sort(t_.rows.begin(), t_.rows.end(), [&](const auto& x, const auto& y) {
      const CellValue& a = x[c].value;
      const CellValue& b = y[c].value;
      int ga = group(a), gb = group(b);
      if (ga != gb) return ga < gb;
      if (ga == 2) return false;
      std::strong_ordering ord = ga == 0 ? as_number(a)->value <=> as_number(b)->value
                                         : *as_text(a) <=> *as_text(b);
      return s.descending ? ord > 0 : ord < 0;
    });
  }

  void apply(const PivotWider& s) {
    auto id = resolve(s.id);
    std::size_t names = resolve(s.names), values = resolve(s.values);
    for (std::size_t c : id)
      if (c == names || c == values) throw PlanTypeError(stmt_, "pivot_wider id columns overlap names/values");
    if (names == values) throw PlanTypeError(stmt_, "pivot_wider names and values are the same column");
    require_rows("pivot_wider");
    t_.flatten_spans();
    Agg agg = s.agg.value_or(Agg::first);

    std::vector<std::string> keys;               // group keys in first-appearance order
    std::map<std::string, std::size_t> group_of;
    std::vector<std::string> cols;               // new column names, first-appearance order
    std::map<std::string, std::size_t> col_of;
    std::vector<std::size_t> first_row;
    std::map<std::pair<std::size_t, std::size_t>, std::vector<const Cell*>> cells;
    for (std::size_t r = 0; r < t_.rows.size(); ++r) {
      const auto& row = t_.rows[r];
      if (is_empty(row[names].value)) {
        warn(r, "empty pivot name; row skipped");
        continue;
      }
      std::string key;
      for (std::size_t c : id) key += cell_key(row[c].value) + '\x1f';
      auto [g, new_group] = group_of.try_emplace(key, keys.size());
      if (new_group) {
        keys.push_back(key);
        first_row.push_back(r);
      }
      std::string name = cell_text(row[names].value);
      auto [k, new_col] = col_of.try_emplace(name, cols.size());
      if (new_col) cols.push_back(name);
      cells[{g->second, k->second}].push_back(&row[values]);
    }

    StructuredTable out;
    out.caption = t_.caption;
    for (std::size_t c : id) out.headers.push_back(t_.column_name(c));
    out.headers.insert(out.headers.end(), cols.begin(), cols.end());
    out.column_count = out.headers.size();
    for (std::size_t g = 0; g < keys.size(); ++g) {
      auto& row = out.rows.emplace_back();
      for (std::size_t c : id) row.push_back(t_.rows[first_row[g]][c]);
      for (std::size_t k = 0; k < cols.size(); ++k) {
        auto it = cells.find({g, k});
        if (it == cells.end()) {
          row.emplace_back();
        } else if (agg == Agg::first) {
          row.push_back(*it->second.front());
        } else {
          row.emplace_back(aggregate(it->second, agg));
        }
      }
    }
    t_ = std::move(out);
  }

  static CellValue aggregate(const std::vector<const Cell*>& cells, Agg agg) {
    Decimal sum;
    long long count = 0;
    for (const Cell* c : cells)
      if (const Number* n = as_number(c->value)) {
        sum = sum + n->value;
        ++count;
      }
    if (count == 0) return std::monostate{};
    if (agg == Agg::sum) return Number{sum, false};
    return Number{*Decimal::divide(sum, Decimal::from_int(count)), false};
  }

  void apply(const PivotLonger& s) {
    auto cols = resolve(s.cols);
    require_rows("pivot_longer");
    t_.flatten_spans();
    std::vector<std::size_t> id;
    for (std::size_t c = 0; c < t_.column_count; ++c)
      if (std::find(cols.begin(), cols.end(), c) == cols.end()) id.push_back(c);
    StructuredTable out;
    out.caption = t_.caption;
    for (std::size_t c : id) out.headers.push_back(t_.column_name(c));
    out.headers.push_back(s.names_to);
    out.headers.push_back(s.values_to);
    out.column_count = out.headers.size();
    for (const auto& row : t_.rows) {
      for (std::size_t c : cols) {
        auto& r = out.rows.emplace_back();
        for (std::size_t i : id) r.push_back(row[i]);
        r.emplace_back(lex_cell(t_.column_name(c)));
        r.push_back(row[c]);
      }
    }
    t_ = std::move(out);
  }

  void apply(const Impute& s) {
    auto cols = resolve(s.cols);
    if (s.mode == ImputeMode::mean) require_rows("impute mode=mean");
    t_.flatten_spans();
    for (std::size_t c : cols) {
      CellValue fill;
      if (s.mode == ImputeMode::zero) fill = Number{Decimal(), false};
      if (s.mode == ImputeMode::mean) {
        auto mean = column_mean(c);
        if (!mean) {
          if (warnings_.size() < kMaxWarnings)
            warnings_.push_back("statement " + std::to_string(stmt_) + ": column " +
                                t_.column_name(c) + " has no numbers to average");
          continue;
        }
        fill = Number{*mean, false};
      }
      for (auto& row : t_.rows)
        if (is_missing(row[c].value)) row[c].value = fill;
    }
  }

  // Mean of the numeric cells, rounded half away from zero to the widest
  // scale seen in the column.
  std::optional<Decimal> column_mean(std::size_t c) const {
    Decimal sum;
    long long count = 0;
    int scale = 0;
    for (const auto& row : t_.rows)
      if (const Number* n = as_number(row[c].value)) {
        sum = sum + n->value;
        scale = std::max(scale, n->value.scale());
        ++count;
      }
    if (count == 0) return std::nullopt;
    Decimal::Int m = sum.mantissa();
    for (int i = sum.scale(); i < scale; ++i) m *= 10;
    bool negative = m < 0;
    Decimal::Int a = negative ? Decimal::Int(-m) : m;
    Decimal::Int q = (2 * a + count) / (2 * Decimal::Int(count));
    return Decimal(negative ? Decimal::Int(-q) : q, scale);
  }

  void apply(const Dedupe& s) {
    auto cols = s.cols.empty() ? all_columns() : resolve(s.cols);
    t_.flatten_spans();
    std::set<std::string> seen;
    std::vector<std::vector<Cell>> kept;
    for (auto& row : t_.rows) {
      std::string key;
      for (std::size_t c : cols) key += cell_key(row[c].value) + '\x1f';
      if (seen.insert(key).second) kept.push_back(std::move(row));
    }
    t_.rows = std::move(kept);
  }

  void apply(const Rename& s) {
    std::size_t c = resolve(s.col);
    ensure_headers();
    t_.headers[c] = s.name;
  }

  void apply(const Style& s) {
    auto cols = s.cols.empty() ? all_columns() : resolve(s.cols);
    if (s.where) check_refs(*s.where);
    auto merge = [&](CellStyle& st) {
      st.bold = st.bold || s.delta.bold;
      st.italic = st.italic || s.delta.italic;
      if (s.delta.bg) st.bg_color = s.delta.bg;
      if (s.delta.fg) st.fg_color = s.delta.fg;
    };
    for (std::size_t r = 0; r < t_.rows.size(); ++r) {
      if (s.rows) {
        if (s.where && !truth(*s.where, {r})) continue;
        for (std::size_t c : cols) merge(t_.rows[r][c].style);
        continue;
      }
      // decide every cell of the row before touching any style
      std::vector<std::size_t> hit;
      for (std::size_t c : cols)
        if (!s.where || truth(*s.where, {r, &t_.rows[r][c]})) hit.push_back(c);
      for (std::size_t c : hit) merge(t_.rows[r][c].style);
    }
  }

  void apply(const MergeTables&) {
    throw PlanTypeError(stmt_, "merge_tables must be the first statement");
  }

  StructuredTable merge_tables(const MergeTables& s, std::span<const StructuredTable> input) {
    std::size_t width = input[0].column_count;
    for (std::size_t i = 1; i < input.size(); ++i)
      if (input[i].column_count != width)
        throw PlanTypeError(stmt_, "table " + std::to_string(i + 1) + " has " +
                                       std::to_string(input[i].column_count) + " columns, table 1 has " +
                                       std::to_string(width));
    StructuredTable out;
    out.column_count = width;
    for (const auto& t : input)
      if (t.has_headers()) {
        out.headers = t.headers;
        break;
      }
    if (input.size() == 1) out.caption = input[0].caption;
    for (std::size_t i = 0; i < input.size(); ++i) {
      StructuredTable t = input[i];
      t.flatten_spans();
      for (auto& row : t.rows) {
        if (s.label)
          row.emplace_back(lex_cell(t.caption.value_or("table " + std::to_string(i + 1))));
        out.rows.push_back(std::move(row));
      }
    }
    if (s.label) {
      if (!out.has_headers())
        for (std::size_t c = 0; c < width; ++c) out.headers.push_back(out.column_name(c));
      out.headers.push_back(*s.label);
      ++out.column_count;
    }
    return out;
  }

  StructuredTable t_;
  std::vector<std::string>& warnings_;
  std::size_t suppressed_ = 0;
  int stmt_ = 0;
  std::map<std::string, std::regex> regexes_;
};

}  // namespace

EvalResult evaluate(const Plan& plan, std::span<const StructuredTable> input) {
  EvalResult out;
  Evaluator ev(out.warnings);
  out.table = ev.run(plan, input);
  return out;
}

std::optional<QueryMode> query_mode_from_string(std::string_view s) {
  if (s == "scalar") return QueryMode::scalar;
  if (s == "count") return QueryMode::count;
  return std::nullopt;
}

QueryResult query(const Plan& plan, std::span<const StructuredTable> input, QueryMode mode) {
  auto r = evaluate(plan, input);
  QueryResult out;
  out.warnings = std::move(r.warnings);
  if (mode == QueryMode::count) {
    out.value = Number{Decimal::from_int(static_cast<long long>(r.table.row_count())), false};
  } else {
    if (r.table.row_count() != 1 || r.table.column_count != 1)
      throw Error(ErrorCode::NotScalarResult,
                  "result is " + std::to_string(r.table.row_count()) + "x" +
                      std::to_string(r.table.column_count) + ", not a single cell");
    out.value = r.table.rows[0][0].value;
  }
  out.table = std::move(r.table);
  return out;
}

bool is_missing(const CellValue& v) {
  const std::string* s = as_text(v);
  if (!s) return is_empty(v);
  std::string t = text::lower(text::trim(*s));
  return t.empty() || t == "na" || t == "n/a" || t == "nan" || t == "null" || t == "none" ||
         t == "-" || t == "?";
}

}  // namespace smartpaste::plan
