// LaTeX tabular environments: a small reader for the inline commands that
// carry styles and spans, and a renderer that writes them back.

#include "formats.hpp"

#include "smartpaste/error.hpp"
#include "smartpaste/text.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>

namespace smartpaste::codec {

namespace {

bool is_letter(char c) { return std::isalpha(static_cast<unsigned char>(c)) != 0; }
bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r'; }

// Removes unescaped % comments (through end of line).
std::string strip_comments(std::string_view s) {
  std::string out;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '\\' && i + 1 < s.size()) {
      out += s[i];
      out += s[++i];
      continue;
    }
    if (s[i] == '%') {
      while (i < s.size() && s[i] != '\n') ++i;
      if (i < s.size()) out += '\n';
      continue;
    }
    out += s[i];
  }
  return out;
}

// Index just past the group that opens at s[pos] == '{'.
std::size_t skip_group(std::string_view s, std::size_t pos) {
  int depth = 0;
  for (std::size_t i = pos; i < s.size(); ++i) {
    if (s[i] == '\\') {
      ++i;
      continue;
    }
    if (s[i] == '{') ++depth;
    if (s[i] == '}' && --depth == 0) return i + 1;
  }
  throw ParseError(pos, "unbalanced '{'");
}

std::size_t skip_spaces(std::string_view s, std::size_t i) {
  while (i < s.size() && is_space(s[i])) ++i;
  return i;
}

// Reads a mandatory {arg}; returns its inner text.
std::string_view read_arg(std::string_view s, std::size_t& i) {
  i = skip_spaces(s, i);
  if (i >= s.size()) throw ParseError(i, "expected '{'");
  if (s[i] != '{') {
    // Single-token argument, e.g. \textbf x
    std::size_t start = i;
    if (s[i] == '\\') {
      ++i;
      while (i < s.size() && is_letter(s[i])) ++i;
      if (i == start + 1 && i < s.size()) ++i;
    } else {
      ++i;
    }
    return s.substr(start, i - start);
  }
  std::size_t end = skip_group(s, i);
  std::string_view inner = s.substr(i + 1, end - i - 2);
  i = end;
  return inner;
}

std::optional<std::string_view> read_opt(std::string_view s, std::size_t& i) {
  std::size_t j = skip_spaces(s, i);
  if (j >= s.size() || s[j] != '[') return std::nullopt;
  std::size_t end = s.find(']', j);
  if (end == std::string_view::npos) throw ParseError(j, "unterminated '['");
  i = end + 1;
  return s.substr(j + 1, end - j - 1);
}

std::optional<std::string> latex_color(std::optional<std::string_view> model, std::string_view spec) {
  std::string v = text::trim(spec);
  if (!model) return normalize_color(v);
  std::string m = text::lower(text::trim(*model));
  if (m == "html") return normalize_color("#" + v);
  if (m == "rgb" || m == "rgb255") {
    std::vector<double> parts;
    std::size_t start = 0;
    while (start <= v.size()) {
      std::size_t comma = v.find(',', start);
      std::string p = text::trim(v.substr(start, comma == std::string::npos ? std::string::npos : comma - start));
      double d = 0;
      auto [ptr, ec] = std::from_chars(p.data(), p.data() + p.size(), d);
      if (ec != std::errc() || ptr != p.data() + p.size()) return std::nullopt;
      parts.push_back(d);
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    if (parts.size() != 3) return std::nullopt;
    std::string css = "rgb(";
    for (std::size_t k = 0; k < 3; ++k) {
      int c = static_cast<int>(m == "rgb" ? parts[k] * 255.0 + 0.5 : parts[k]);
      css += std::to_string(std::clamp(c, 0, 255)) + (k < 2 ? "," : ")");
    }
    return normalize_color(css);
  }
  return std::nullopt;
}

struct CellRead {
  std::string text;
  CellStyle style;
  int rowspan = 1;
  int colspan = 1;
};

void read_inline(std::string_view s, CellRead& cell, CellStyle style);

// Handles the command whose name starts at s[i] (just after the backslash).
void read_command(std::string_view s, std::size_t& i, CellRead& cell, CellStyle& style) {
  std::size_t start = i;
  while (i < s.size() && is_letter(s[i])) ++i;
  std::string name(s.substr(start, i - start));
  auto swallow_empty_group = [&] {
    std::size_t j = skip_spaces(s, i);
    if (j + 1 < s.size() && s[j] == '{' && s[j + 1] == '}') i = j + 2;
    else i = j;
  };
  if (name == "textbackslash") { cell.text += '\\'; swallow_empty_group(); return; }
  if (name == "textasciitilde") { cell.text += '~'; swallow_empty_group(); return; }
  if (name == "textasciicircum") { cell.text += '^'; swallow_empty_group(); return; }
  if (name == "textbar") { cell.text += '|'; swallow_empty_group(); return; }
  if (name == "textless") { cell.text += '<'; swallow_empty_group(); return; }
  if (name == "textgreater") { cell.text += '>'; swallow_empty_group(); return; }
  if (name == "newline" || name == "linebreak") { cell.text += '\n'; swallow_empty_group(); return; }
  if (name == "textbf" || name == "bfseries" || name == "bf") {
    CellStyle inner = style;
    inner.bold = true;
    if (name == "textbf") {
      read_inline(read_arg(s, i), cell, inner);
    } else {
      style = inner;
      swallow_empty_group();
    }
    cell.style.bold = true;
    return;
  }
  if (name == "textit" || name == "emph" || name == "itshape" || name == "it") {
    CellStyle inner = style;
    inner.italic = true;
    if (name == "textit" || name == "emph") {
      read_inline(read_arg(s, i), cell, inner);
    } else {
      style = inner;
      swallow_empty_group();
    }
    cell.style.italic = true;
    return;
  }
  if (name == "cellcolor") {
    auto model = read_opt(s, i);
    if (auto c = latex_color(model, read_arg(s, i))) cell.style.bg_color = c;
    return;
  }
  if (name == "textcolor") {
    auto model = read_opt(s, i);
    auto c = latex_color(model, read_arg(s, i));
    if (c) cell.style.fg_color = c;
    read_inline(read_arg(s, i), cell, style);
    return;
  }
  if (name == "color") {
    auto model = read_opt(s, i);
    if (auto c = latex_color(model, read_arg(s, i))) cell.style.fg_color = c;
    return;
  }
  if (name == "multicolumn") {
    std::string n = text::trim(read_arg(s, i));
    read_arg(s, i);  // column spec
    int v = 1;
    std::from_chars(n.data(), n.data() + n.size(), v);
    cell.colspan = std::max(1, v);
    read_inline(read_arg(s, i), cell, style);
    return;
  }
  if (name == "multirow") {
    read_opt(s, i);
    std::string n = text::trim(read_arg(s, i));
    read_opt(s, i);
    read_arg(s, i);  // width
    read_opt(s, i);  // fixup
    int v = 1;
    std::from_chars(n.data(), n.data() + n.size(), v);
    cell.rowspan = std::max(1, v);
    read_inline(read_arg(s, i), cell, style);
    return;
  }
  if (name == "hline" || name == "toprule" || name == "midrule" || name == "bottomrule" ||
      name == "centering" || name == "raggedright" || name == "raggedleft") {
    swallow_empty_group();
    return;
  }
  // Unknown command: keep the content of a following group, if any.
  std::size_t j = skip_spaces(s, i);
  if (j < s.size() && s[j] == '{') {
    i = j;
    read_inline(read_arg(s, i), cell, style);
  } else {
    i = j;
  }
}

void read_inline(std::string_view s, CellRead& cell, CellStyle style) {
  std::size_t i = 0;
  while (i < s.size()) {
    char c = s[i];
    if (c == '\\') {
      if (i + 1 >= s.size()) {
        ++i;
        continue;
      }
      char n = s[i + 1];
      if (is_letter(n)) {
        i += 1;
        read_command(s, i, cell, style);
        continue;
      }
      i += 2;
      if (n == ' ' || n == ',' || n == ';' || n == '!') cell.text += ' ';
      else if (n == '\\') cell.text += '\n';
      else cell.text += n;
      continue;
    }
    if (c == '{') {
      std::size_t end = skip_group(s, i);
      read_inline(s.substr(i + 1, end - i - 2), cell, style);
      i = end;
      continue;
    }
    if (c == '}' || c == '$') {
      ++i;
      continue;
    }
    if (c == '~') {
      cell.text += ' ';
      ++i;
      continue;
    }
    if (is_space(c)) {
      if (cell.text.empty() || cell.text.back() != ' ') cell.text += ' ';
      ++i;
      continue;
    }
    cell.text += c;
    if (style.bold) cell.style.bold = true;
    if (style.italic) cell.style.italic = true;
    ++i;
  }
}

CellRead read_cell(std::string_view raw) {
  CellRead cell;
  read_inline(raw, cell, {});
  // Collapse whitespace runs and trim; explicit line breaks survive.
  std::string out;
  for (char c : cell.text) {
    if (c == ' ' && (out.empty() || out.back() == ' ' || out.back() == '\n')) continue;
    if (c == '\n' && !out.empty() && out.back() == ' ') out.pop_back();
    out += c;
  }
  while (!out.empty() && out.back() == ' ') out.pop_back();
  cell.text = std::move(out);
  return cell;
}

struct Item {
  bool rule = false;
  std::vector<CellRead> cells;
};

// Splits a chunk on unescaped top-level '&'.
std::vector<std::string_view> split_cells(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  int depth = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '\\') {
      ++i;
      continue;
    }
    if (s[i] == '{') ++depth;
    else if (s[i] == '}') --depth;
    else if (s[i] == '&' && depth == 0) {
      out.push_back(s.substr(start, i - start));
      start = i + 1;
    }
  }
  out.push_back(s.substr(start));
  return out;
}

// Leading rule commands of a chunk; returns the rest. `row_bg` picks up \rowcolor.
std::string_view take_rules(std::string_view s, std::vector<Item>& items,
                            std::optional<std::string>& row_bg) {
  std::size_t i = 0;
  while (true) {
    i = skip_spaces(s, i);
    if (i >= s.size() || s[i] != '\\') break;
    std::size_t j = i + 1;
    while (j < s.size() && is_letter(s[j])) ++j;
    std::string_view name = s.substr(i + 1, j - i - 1);
    if (name == "hline" || name == "toprule" || name == "midrule" || name == "bottomrule") {
      items.push_back(Item{true, {}});
      i = j;
      continue;
    }
    if (name == "cline" || name == "cmidrule") {
      std::size_t k = skip_spaces(s, j);
      if (k < s.size() && s[k] == '(') {
        std::size_t close = s.find(')', k);
        k = close == std::string_view::npos ? s.size() : close + 1;
      }
      read_arg(s, k);
      i = k;
      continue;
    }
    if (name == "rowcolor") {
      std::size_t k = j;
      auto model = read_opt(s, k);
      row_bg = latex_color(model, read_arg(s, k));
      i = k;
      continue;
    }
    if (name == "addlinespace" || name == "noalign") {
      std::size_t k = j;
      read_opt(s, k);
      i = k;
      continue;
    }
    break;
  }
  return s.substr(i);
}

StructuredTable build_table(std::string_view body) {
  // Split the body into row chunks at top-level "\\".
  std::vector<std::pair<std::string_view, bool>> chunks;  // (text, terminated by \\)
  std::size_t start = 0;
  int depth = 0;
  for (std::size_t i = 0; i < body.size(); ++i) {
    char c = body[i];
    if (c == '{') ++depth;
    else if (c == '}') --depth;
    else if (c == '\\' && i + 1 < body.size()) {
      if (body[i + 1] == '\\' && depth == 0) {
        chunks.emplace_back(body.substr(start, i - start), true);
        i += 2;
        // Optional spacing argument: \\[2pt]
        std::size_t j = skip_spaces(body, i);
        if (j < body.size() && body[j] == '[') {
          std::size_t close = body.find(']', j);
          if (close != std::string_view::npos) i = close + 1;
        }
        start = i;
        --i;
        continue;
      }
      ++i;
    }
  }
  chunks.emplace_back(body.substr(start), false);

  std::vector<Item> items;
  for (auto [chunk, terminated] : chunks) {
    std::optional<std::string> row_bg;
    std::string_view rest = take_rules(chunk, items, row_bg);
    if (!terminated && text::trim(rest).empty()) continue;
    Item row;
    for (auto raw : split_cells(rest)) {
      CellRead cell = read_cell(raw);
      if (row_bg && !cell.style.bg_color) cell.style.bg_color = row_bg;
      row.cells.push_back(std::move(cell));
    }
    items.push_back(std::move(row));
  }

  // Header: a rule directly after the first row, with more content after it.
  std::size_t first = 0;
  while (first < items.size() && items[first].rule) ++first;
  bool header = first + 2 < items.size() && items[first + 1].rule;

  std::vector<std::string> headers;
  std::vector<std::vector<Cell>> grid;
  std::vector<std::vector<bool>> placed;  // positions claimed by a multirow above
  struct Origin {
    std::size_t row, col;
    int rowspan, colspan;
  };
  std::vector<Origin> origins;
  bool first_row = true;
  for (const auto& item : items) {
    if (item.rule) continue;
    if (first_row && header) {
      first_row = false;
      for (const auto& c : item.cells)
        for (int k = 0; k < c.colspan; ++k) headers.push_back(c.text);
      continue;
    }
    first_row = false;
    std::vector<Cell> row;
    for (const auto& c : item.cells) {
      Cell cell(lex_cell(c.text), c.style);
      if (c.rowspan > 1 || c.colspan > 1) {
        origins.push_back({grid.size(), row.size(), c.rowspan, c.colspan});
        cell.span = Span{c.rowspan, c.colspan};
      }
      std::size_t col = row.size();
      row.push_back(cell);
      for (int k = 1; k < c.colspan; ++k) {
        Cell copy = cell;
        copy.span = Span{};
        copy.covered_by = GridPos{grid.size(), col};
        row.push_back(std::move(copy));
      }
    }
    grid.push_back(std::move(row));
  }
  std::size_t width = headers.size();
  for (const auto& r : grid) width = std::max(width, r.size());
  for (auto& r : grid) r.resize(width);

  // Multirow: later rows hold placeholders at covered positions.
  for (const auto& o : origins) {
    if (o.rowspan <= 1) continue;
    const Cell origin = grid[o.row][o.col];
    for (int dr = 1; dr < o.rowspan; ++dr) {
      std::size_t rr = o.row + static_cast<std::size_t>(dr);
      if (rr >= grid.size()) break;
      for (int dc = 0; dc < o.colspan; ++dc) {
        std::size_t cc = o.col + static_cast<std::size_t>(dc);
        if (cc >= width) break;
        Cell copy = origin;
        copy.span = Span{};
        copy.covered_by = GridPos{o.row, o.col};
        grid[rr][cc] = std::move(copy);
      }
    }
  }
  auto t = StructuredTable::from_rows(std::move(headers), std::move(grid));
  if (!t.spans_consistent()) t.flatten_spans();
  return t;
}

std::string escape_latex(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '\\': out += "\\textbackslash{}"; break;
      case '~': out += "\\textasciitilde{}"; break;
      case '^': out += "\\textasciicircum{}"; break;
      case '<': out += "\\textless{}"; break;
      case '>': out += "\\textgreater{}"; break;
      case '|': out += "\\textbar{}"; break;
      case '&': case '%': case '$': case '#': case '_': case '{': case '}':
        out += '\\';
        out += c;
        break;
      case '\n': out += "\\newline{}"; break;
      case '\r': break;
      default: out += c;
    }
  }
  // A row that starts with '[' would be read as the optional argument of \\.
  if (!out.empty() && out[0] == '[') out = "{[}" + out.substr(1);
  return out;
}

std::string styled(const Cell& cell, const RenderOptions& opts) {
  std::string body = escape_latex(cell_text(cell.value));
  if (!opts.styles) return body;
  const CellStyle& s = cell.style;
  if (s.italic) body = "\\textit{" + body + "}";
  if (s.bold) body = "\\textbf{" + body + "}";
  if (s.fg_color) body = "\\textcolor[HTML]{" + s.fg_color->substr(1) + "}{" + body + "}";
  if (s.bg_color) body = "\\cellcolor[HTML]{" + s.bg_color->substr(1) + "}" + body;
  return body;
}

}  // namespace

std::vector<StructuredTable> parse_latex(std::string_view src) {
  std::string clean = strip_comments(src);
  std::string_view s = clean;
  std::vector<StructuredTable> tables;
  std::optional<std::string> caption;
  if (auto pos = s.find("\\caption"); pos != std::string_view::npos) {
    std::size_t i = pos + 8;
    read_opt(s, i);
    CellRead c = read_cell(read_arg(s, i));
    if (!c.text.empty()) caption = c.text;
  }
  static constexpr std::string_view kBegin = "\\begin{tabular";
  static constexpr std::string_view kEnd = "\\end{tabular";
  std::size_t pos = s.find(kBegin);
  if (pos == std::string_view::npos) {
    // Body-only fragment.
    if (!text::contains(s, "&") && !text::contains(s, "\\\\")) return {};
    tables.push_back(build_table(s));
    return tables;
  }
  while (pos != std::string_view::npos) {
    std::size_t i = s.find('}', pos);
    if (i == std::string_view::npos) throw ParseError(pos, "unterminated \\begin");
    bool starred = s.substr(pos + kBegin.size(), 1) == "*";
    ++i;
    if (starred) read_arg(s, i);  // width
    read_opt(s, i);
    read_arg(s, i);  // column spec
    std::size_t end = s.find(kEnd, i);
    if (end == std::string_view::npos) throw ParseError(i, "missing \\end{tabular}");
    tables.push_back(build_table(s.substr(i, end - i)));
    pos = s.find(kBegin, end);
  }
  if (caption && !tables.empty()) tables.front().caption = caption;
  return tables;
}

std::string render_latex(const StructuredTable& t, const RenderOptions& opts,
                         std::vector<std::string>& packages) {
  bool spans = t.has_spans() && t.spans_consistent();
  std::string spec;
  for (std::size_t c = 0; c < t.column_count; ++c) {
    bool any = false, numeric = true;
    for (const auto& row : t.rows) {
      if (is_empty(row[c].value)) continue;
      any = true;
      numeric = numeric && as_number(row[c].value);
    }
    spec += any && numeric ? 'r' : 'l';
  }
  std::string top = opts.booktabs ? "\\toprule" : "\\hline";
  std::string mid = opts.booktabs ? "\\midrule" : "\\hline";
  std::string bottom = opts.booktabs ? "\\bottomrule" : "\\hline";
  if (opts.booktabs) packages.push_back("\\usepackage{booktabs}");

  std::string out = "\\begin{tabular}{" + spec + "}\n" + top + "\n";
  if (t.has_headers()) {
    for (std::size_t c = 0; c < t.headers.size(); ++c)
      out += (c ? " & " : "") + escape_latex(t.headers[c]);
    out += " \\\\\n" + mid + "\n";
  }
  bool colors = false, multirow = false;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    std::vector<std::string> cells;
    for (std::size_t c = 0; c < t.column_count; ++c) {
      const Cell& cell = t.rows[r][c];
      if (opts.styles && (cell.style.bg_color || cell.style.fg_color) && !cell.covered_by)
        colors = true;
      if (!spans) {
        cells.push_back(styled(cell, opts));
        continue;
      }
      if (cell.covered_by) {
        const GridPos o = *cell.covered_by;
        if (o.row == r || c != o.col) continue;  // same-row cover, or inside a multicolumn
        int cs = t.rows[o.row][o.col].span.colspan;
        cells.push_back(cs > 1 ? "\\multicolumn{" + std::to_string(cs) + "}{l}{}" : "");
        continue;
      }
      std::string body = styled(cell, opts);
      if (cell.span.rowspan > 1) {
        multirow = true;
        body = "\\multirow{" + std::to_string(cell.span.rowspan) + "}{*}{" + body + "}";
      }
      if (cell.span.colspan > 1)
        body = "\\multicolumn{" + std::to_string(cell.span.colspan) + "}{l}{" + body + "}";
      cells.push_back(std::move(body));
    }
    for (std::size_t k = 0; k < cells.size(); ++k) out += (k ? " & " : "") + cells[k];
    out += " \\\\\n";
  }
  out += bottom + "\n\\end{tabular}";
  if (colors) packages.push_back("\\usepackage[table]{xcolor}");
  if (multirow) packages.push_back("\\usepackage{multirow}");
  return out;
}

}  // namespace smartpaste::codec
