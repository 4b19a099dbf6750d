// HTML tables: a forgiving tag scanner, inline-style extraction, and
// rowspan/colspan placement.

#include "formats.hpp"

#include "smartpaste/text.hpp"

#include <algorithm>
#include <charconv>
#include <cctype>
#include <map>

namespace smartpaste::codec {

namespace {

struct Tag {
  std::string name;  // lowercase, without '/'
  bool closing = false;
  bool self_closing = false;
  std::map<std::string, std::string> attrs;
};

struct Token {
  enum class Kind { text, tag } kind = Kind::text;
  std::string text;
  Tag tag;
};

std::string decode_entities(std::string_view s) {
  static const std::map<std::string, char32_t, std::less<>> kNamed{
      {"amp", '&'},     {"lt", '<'},      {"gt", '>'},      {"quot", '"'},
      {"apos", '\''},   {"nbsp", 0xA0},   {"ndash", 0x2013}, {"mdash", 0x2014},
      {"copy", 0xA9},   {"hellip", 0x2026}, {"minus", 0x2212}, {"times", 0xD7},
  };
  std::string out;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] != '&') {
      out += s[i];
      continue;
    }
    std::size_t semi = s.find(';', i);
    if (semi == std::string_view::npos || semi - i > 10) {
      out += '&';
      continue;
    }
    std::string_view name = s.substr(i + 1, semi - i - 1);
    char32_t cp = 0;
    bool ok = false;
    if (!name.empty() && name[0] == '#') {
      int base = 10;
      std::string_view digits = name.substr(1);
      if (!digits.empty() && (digits[0] == 'x' || digits[0] == 'X')) {
        base = 16;
        digits.remove_prefix(1);
      }
      unsigned v = 0;
      auto [p, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), v, base);
      ok = ec == std::errc() && p == digits.data() + digits.size() && v <= 0x10FFFF && v > 0;
      cp = v;
    } else if (auto it = kNamed.find(name); it != kNamed.end()) {
      cp = it->second;
      ok = true;
    }
    if (!ok) {
      out += '&';
      continue;
    }
    text::append_utf8(out, cp);
    i = semi;
  }
  return out;
}

// Reads `<...>` starting at s[pos] == '<'. Returns false for stray '<'.
bool read_tag(std::string_view s, std::size_t& pos, Tag& tag) {
  std::size_t i = pos + 1;
  if (i < s.size() && s[i] == '/') {
    tag.closing = true;
    ++i;
  }
  std::size_t name_start = i;
  while (i < s.size() && (std::isalnum(static_cast<unsigned char>(s[i])) || s[i] == ':' || s[i] == '-'))
    ++i;
  if (i == name_start) return false;
  tag.name = text::lower(s.substr(name_start, i - name_start));
  while (i < s.size()) {
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    if (i >= s.size()) return false;
    if (s[i] == '>') {
      pos = i + 1;
      return true;
    }
    if (s[i] == '/' && i + 1 < s.size() && s[i + 1] == '>') {
      tag.self_closing = true;
      pos = i + 2;
      return true;
    }
    std::size_t an = i;
    while (i < s.size() && !std::isspace(static_cast<unsigned char>(s[i])) && s[i] != '=' &&
           s[i] != '>' && !(s[i] == '/' && i + 1 < s.size() && s[i + 1] == '>'))
      ++i;
    std::string attr = text::lower(s.substr(an, i - an));
    if (attr.empty()) {
      ++i;
      continue;
    }
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    std::string value;
    if (i < s.size() && s[i] == '=') {
      ++i;
      while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
      if (i < s.size() && (s[i] == '"' || s[i] == '\'')) {
        char q = s[i++];
        std::size_t end = s.find(q, i);
        if (end == std::string_view::npos) return false;
        value = s.substr(i, end - i);
        i = end + 1;
      } else {
        std::size_t vs = i;
        while (i < s.size() && !std::isspace(static_cast<unsigned char>(s[i])) && s[i] != '>') ++i;
        value = s.substr(vs, i - vs);
      }
    }
    tag.attrs[attr] = decode_entities(value);
  }
  return false;
}

std::vector<Token> tokenize(std::string_view s) {
  std::vector<Token> tokens;
  std::string pending;
  auto flush = [&] {
    if (!pending.empty()) tokens.push_back({Token::Kind::text, std::move(pending), {}});
    pending.clear();
  };
  std::size_t i = 0;
  while (i < s.size()) {
    if (s[i] != '<') {
      pending += s[i++];
      continue;
    }
    if (s.substr(i, 4) == "<!--") {
      std::size_t end = s.find("-->", i + 4);
      i = end == std::string_view::npos ? s.size() : end + 3;
      continue;
    }
    if (s.substr(i, 2) == "<!" || s.substr(i, 2) == "<?") {
      std::size_t end = s.find('>', i);
      i = end == std::string_view::npos ? s.size() : end + 1;
      continue;
    }
    Tag tag;
    std::size_t pos = i;
    if (!read_tag(s, pos, tag)) {
      pending += s[i++];
      continue;
    }
    flush();
    i = pos;
    if (!tag.closing && (tag.name == "script" || tag.name == "style")) {
      std::string close = "</" + tag.name;
      std::size_t end = text::lower(s.substr(i)).find(close);
      i = end == std::string::npos ? s.size() : i + end;
      continue;
    }
    tokens.push_back({Token::Kind::tag, {}, std::move(tag)});
  }
  flush();
  return tokens;
}

std::map<std::string, std::string> parse_css(std::string_view style) {
  std::map<std::string, std::string> out;
  std::size_t start = 0;
  while (start < style.size()) {
    std::size_t semi = style.find(';', start);
    std::string_view decl = style.substr(start, semi == std::string_view::npos ? std::string_view::npos
                                                                               : semi - start);
    std::size_t colon = decl.find(':');
    if (colon != std::string_view::npos)
      out[text::lower(text::trim(decl.substr(0, colon)))] = text::trim(decl.substr(colon + 1));
    if (semi == std::string_view::npos) break;
    start = semi + 1;
  }
  return out;
}

void apply_inline_style(const Tag& tag, CellStyle& style) {
  if (auto it = tag.attrs.find("bgcolor"); it != tag.attrs.end())
    if (auto c = normalize_color(it->second)) style.bg_color = c;
  if (tag.name == "font")
    if (auto it = tag.attrs.find("color"); it != tag.attrs.end())
      if (auto c = normalize_color(it->second)) style.fg_color = c;
  auto it = tag.attrs.find("style");
  if (it == tag.attrs.end()) return;
  auto css = parse_css(it->second);
  for (const char* key : {"background-color", "background"})
    if (auto c = css.find(key); c != css.end())
      if (auto col = normalize_color(c->second)) style.bg_color = col;
  if (auto c = css.find("color"); c != css.end())
    if (auto col = normalize_color(c->second)) style.fg_color = col;
  if (auto w = css.find("font-weight"); w != css.end()) {
    std::string v = text::lower(w->second);
    int num = 0;
    std::from_chars(v.data(), v.data() + v.size(), num);
    style.bold = v == "bold" || v == "bolder" || num >= 600;
  }
  if (auto f = css.find("font-style"); f != css.end())
    style.italic = text::lower(f->second) == "italic" || text::lower(f->second) == "oblique";
}

int span_attr(const Tag& tag, const char* name) {
  auto it = tag.attrs.find(name);
  if (it == tag.attrs.end()) return 1;
  int v = 1;
  std::string t = text::trim(it->second);
  auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || v < 1) return 1;
  return std::min(v, 1000);
}

constexpr char kBreak = '\x01';  // <br> marker that survives whitespace collapsing

std::string finish_text(const std::string& raw) {
  std::string collapsed;
  bool space = false;
  for (char c : decode_entities(raw)) {
    if (c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f') {
      space = true;
      continue;
    }
    if (space && !collapsed.empty() && collapsed.back() != kBreak && c != kBreak) collapsed += ' ';
    space = false;
    collapsed += c;
  }
  for (auto& c : collapsed)
    if (c == kBreak) c = '\n';
  // Non-breaking spaces become ordinary spaces at the edges only if trimmed.
  return text::trim(text::replace_all(collapsed, "\xC2\xA0", " "));
}

struct RawCell {
  std::string text;
  CellStyle style;
  bool header = false;
  int rowspan = 1;
  int colspan = 1;
};

struct RawRow {
  std::vector<RawCell> cells;
  bool in_thead = false;
};

struct TableBuilder {
  std::vector<RawRow> rows;
  std::optional<std::string> caption;
};

StructuredTable assemble(const TableBuilder& b) {
  // Header: rows inside <thead>, else a leading row made only of <th>.
  std::size_t header_rows = 0;
  while (header_rows < b.rows.size() && b.rows[header_rows].in_thead) ++header_rows;
  if (header_rows == 0 && !b.rows.empty() && !b.rows[0].cells.empty() &&
      std::all_of(b.rows[0].cells.begin(), b.rows[0].cells.end(),
                  [](const RawCell& c) { return c.header; }))
    header_rows = 1;

  std::vector<std::string> headers;
  if (header_rows > 0) {
    for (const auto& c : b.rows[0].cells)
      for (int k = 0; k < c.colspan; ++k) headers.push_back(c.text);
  }

  // Place body cells on a grid honoring spans.
  std::vector<std::vector<std::optional<Cell>>> grid;
  std::size_t width = headers.size();
  for (std::size_t r = header_rows; r < b.rows.size(); ++r) {
    std::size_t gr = r - header_rows;
    if (grid.size() <= gr) grid.resize(gr + 1);
    std::size_t col = 0;
    for (const auto& rc : b.rows[r].cells) {
      while (col < grid[gr].size() && grid[gr][col]) ++col;
      Cell origin(lex_cell(rc.text), rc.style);
      origin.span = Span{rc.rowspan, rc.colspan};
      for (int dr = 0; dr < rc.rowspan; ++dr) {
        std::size_t rr = gr + static_cast<std::size_t>(dr);
        if (grid.size() <= rr) grid.resize(rr + 1);
        for (int dc = 0; dc < rc.colspan; ++dc) {
          std::size_t cc = col + static_cast<std::size_t>(dc);
          if (grid[rr].size() <= cc) grid[rr].resize(cc + 1);
          Cell cell = origin;
          if (dr || dc) {
            cell.span = Span{};
            cell.covered_by = GridPos{gr, col};
          }
          grid[rr][cc] = std::move(cell);
        }
      }
      col += static_cast<std::size_t>(rc.colspan);
    }
  }
  // Drop trailing rows that exist only because a rowspan overshot the body.
  std::size_t body_rows = b.rows.size() - header_rows;
  if (grid.size() > body_rows) grid.resize(body_rows);
  for (const auto& r : grid) width = std::max(width, r.size());

  std::vector<std::vector<Cell>> rows;
  for (auto& r : grid) {
    std::vector<Cell> row;
    for (std::size_t c = 0; c < width; ++c)
      row.push_back(c < r.size() && r[c] ? std::move(*r[c]) : Cell{});
    rows.push_back(std::move(row));
  }
  auto t = StructuredTable::from_rows(std::move(headers), std::move(rows));
  if (!t.spans_consistent()) t.flatten_spans();
  t.caption = b.caption;
  return t;
}

std::string escape_html(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\n': out += "<br>"; break;
      case '\r': break;
      default: out += c;
    }
  }
  return out;
}

std::string css_for(const CellStyle& s) {
  std::string css;
  if (s.bold) css += "font-weight:bold;";
  if (s.italic) css += "font-style:italic;";
  if (s.bg_color) css += "background-color:" + *s.bg_color + ";";
  if (s.fg_color) css += "color:" + *s.fg_color + ";";
  if (!css.empty()) css.pop_back();
  return css;
}

}  // namespace

std::vector<StructuredTable> parse_html(std::string_view src) {
  auto tokens = tokenize(src);
  std::vector<StructuredTable> tables;
  std::optional<TableBuilder> table;
  int nested = 0;  // depth of tables inside the current one (ignored)
  bool in_thead = false;
  bool in_caption = false;
  std::string caption_text;
  std::optional<RawCell> cell;
  std::string cell_raw;
  std::vector<std::string> format_stack;  // open inline tags inside the cell

  auto close_cell = [&] {
    if (!cell || !table) return;
    cell->text = finish_text(cell_raw);
    if (table->rows.empty()) table->rows.push_back(RawRow{{}, in_thead});
    table->rows.back().cells.push_back(std::move(*cell));
    cell.reset();
    cell_raw.clear();
    format_stack.clear();
  };

  for (const auto& tok : tokens) {
    if (!table) {
      if (tok.kind == Token::Kind::tag && tok.tag.name == "table" && !tok.tag.closing)
        table.emplace();
      continue;
    }
    if (tok.kind == Token::Kind::text) {
      if (nested) continue;
      if (in_caption) caption_text += tok.text;
      else if (cell) cell_raw += tok.text;
      continue;
    }
    const Tag& tag = tok.tag;
    if (tag.name == "table") {
      if (!tag.closing) {
        ++nested;
        continue;
      }
      if (nested) {
        --nested;
        continue;
      }
      close_cell();
      tables.push_back(assemble(*table));
      table.reset();
      in_thead = false;
      continue;
    }
    if (nested) continue;
    if (tag.name == "caption") {
      in_caption = !tag.closing;
      if (tag.closing) {
        std::string c = finish_text(caption_text);
        if (!c.empty()) table->caption = c;
        caption_text.clear();
      }
      continue;
    }
    if (tag.name == "thead") {
      close_cell();
      in_thead = !tag.closing;
      continue;
    }
    if (tag.name == "tbody" || tag.name == "tfoot") {
      close_cell();
      in_thead = false;
      continue;
    }
    if (tag.name == "tr") {
      close_cell();
      if (!tag.closing) table->rows.push_back(RawRow{{}, in_thead});
      continue;
    }
    if (tag.name == "td" || tag.name == "th") {
      close_cell();
      if (tag.closing) continue;
      cell.emplace();
      cell->header = tag.name == "th";
      cell->rowspan = span_attr(tag, "rowspan");
      cell->colspan = span_attr(tag, "colspan");
      apply_inline_style(tag, cell->style);
      continue;
    }
    if (!cell) continue;
    if (tag.name == "br") {
      cell_raw += kBreak;
      continue;
    }
    if (tag.name == "p" || tag.name == "div") {
      if (tag.closing) cell_raw += ' ';
      else apply_inline_style(tag, cell->style);
      continue;
    }
    if (tag.closing) continue;
    if (tag.name == "b" || tag.name == "strong") cell->style.bold = true;
    else if (tag.name == "i" || tag.name == "em") cell->style.italic = true;
    else if (tag.name == "span" || tag.name == "font") apply_inline_style(tag, cell->style);
    else if (tag.name == "img") {
      // Icon cells: fall back to the alt text.
      if (auto it = tag.attrs.find("alt"); it != tag.attrs.end()) cell_raw += it->second;
    }
  }
  if (table) {
    close_cell();
    tables.push_back(assemble(*table));
  }
  return tables;
}

std::string render_html(const StructuredTable& t, const RenderOptions& opts) {
  bool spans = t.has_spans() && t.spans_consistent();
  std::string out = "<table>\n";
  if (t.caption) out += "<caption>" + escape_html(*t.caption) + "</caption>\n";
  if (t.has_headers()) {
    out += "<thead>\n<tr>";
    for (const auto& h : t.headers) out += "<th>" + escape_html(h) + "</th>";
    out += "</tr>\n</thead>\n";
  }
  out += "<tbody>\n";
  for (const auto& row : t.rows) {
    out += "<tr>";
    for (const auto& cell : row) {
      if (spans && cell.covered_by) continue;
      out += "<td";
      if (spans && cell.span.rowspan > 1) out += " rowspan=\"" + std::to_string(cell.span.rowspan) + "\"";
      if (spans && cell.span.colspan > 1) out += " colspan=\"" + std::to_string(cell.span.colspan) + "\"";
      if (opts.styles) {
        std::string css = css_for(cell.style);
        if (!css.empty()) out += " style=\"" + css + "\"";
      }
      out += ">" + escape_html(cell_text(cell.value)) + "</td>";
    }
    out += "</tr>\n";
  }
  out += "</tbody>\n</table>";
  return out;
}

}  // namespace smartpaste::codec
