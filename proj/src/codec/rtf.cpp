// Minimal RTF tables: \trowd rows with \cellx boundaries, cell shading from
// the color table, run-level bold/italic/color, and Word-style merge flags.

#include "formats.hpp"

#include "smartpaste/error.hpp"
#include "smartpaste/text.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <map>

namespace smartpaste::codec {

namespace {

struct CellDef {
  std::optional<int> shading;  // color table index
  bool hmerge_first = false, hmerge = false;
  bool vmerge_first = false, vmerge = false;
};

struct RawCell {
  std::string text;
  CellDef def;
  bool bold = false, italic = false;
  std::optional<int> fg;
};

struct RawRow {
  bool header = false;
  std::vector<RawCell> cells;
};

struct CharState {
  bool bold = false;
  bool italic = false;
  int fg = 0;
  int uc = 1;      // fallback chars after \uN
  bool skip = false;  // inside an ignorable destination
};

class Reader {
 public:
  explicit Reader(std::string_view s) : s_(s) {}

  std::vector<StructuredTable> run() {
    std::vector<CharState> stack{CharState{}};
    std::size_t i = 0;
    std::size_t pending_skip = 0;  // fallback chars still to drop after \u
    while (i < s_.size()) {
      char c = s_[i];
      CharState& st = stack.back();
      if (c == '{') {
        stack.push_back(st);
        ++i;
        // {\*\dest ...} and known non-text destinations are skipped wholesale.
        std::size_t j = i;
        if (s_.substr(j, 2) == "\\*") {
          stack.back().skip = true;
        } else if (s_.substr(j, 1) == "\\") {
          std::string_view word = control_word_at(j + 1);
          if (word == "fonttbl" || word == "stylesheet" || word == "info" || word == "pict" ||
              word == "header" || word == "footer" || word == "listtable" ||
              word == "listoverridetable")
            stack.back().skip = true;
          if (word == "colortbl") {
            i = read_colortbl(i);
            stack.pop_back();
          }
        }
        continue;
      }
      if (c == '}') {
        if (stack.size() > 1) stack.pop_back();
        ++i;
        continue;
      }
      if (c == '\r' || c == '\n') {
        ++i;
        continue;
      }
      if (c != '\\') {
        if (pending_skip) {
          --pending_skip;
        } else if (!st.skip) {
          emit_char(c, st);
        }
        ++i;
        continue;
      }
      // Control symbol or word.
      if (i + 1 >= s_.size()) break;
      char n = s_[i + 1];
      if (!std::isalpha(static_cast<unsigned char>(n))) {
        i += 2;
        if (n == '\'') {
          if (i + 2 > s_.size()) throw ParseError(i, "truncated \\' escape");
          unsigned v = 0;
          auto [p, ec] = std::from_chars(s_.data() + i, s_.data() + i + 2, v, 16);
          if (ec != std::errc() || p != s_.data() + i + 2) throw ParseError(i, "bad \\' escape");
          i += 2;
          if (pending_skip) {
            --pending_skip;
          } else if (!st.skip) {
            // cp1252 for the printable range that maps 1:1 to Latin-1.
            append_cp(static_cast<char32_t>(v), st);
          }
          continue;
        }
        if (st.skip) continue;
        if (n == '\\' || n == '{' || n == '}') emit_char(n, st);
        else if (n == '~') emit_char(' ', st);
        else if (n == '-' || n == '_') {}
        continue;
      }
      std::size_t w = i + 1;
      while (w < s_.size() && std::isalpha(static_cast<unsigned char>(s_[w]))) ++w;
      std::string word(s_.substr(i + 1, w - i - 1));
      std::optional<int> param;
      std::size_t p = w;
      if (p < s_.size() && (s_[p] == '-' || std::isdigit(static_cast<unsigned char>(s_[p])))) {
        std::size_t q = p + 1;
        while (q < s_.size() && std::isdigit(static_cast<unsigned char>(s_[q]))) ++q;
        int v = 0;
        std::from_chars(s_.data() + p, s_.data() + q, v);
        param = v;
        p = q;
      }
      if (p < s_.size() && s_[p] == ' ') ++p;
      i = p;
      pending_skip = 0;
      if (word == "u" && param) {
        if (!st.skip) append_u(*param, st);
        pending_skip = static_cast<std::size_t>(st.uc);
        continue;
      }
      control(word, param, st);
    }
    finish_table();
    return std::move(tables_);
  }

 private:
  std::string_view control_word_at(std::size_t j) const {
    std::size_t k = j;
    while (k < s_.size() && std::isalpha(static_cast<unsigned char>(s_[k]))) ++k;
    return s_.substr(j, k - j);
  }

  // Parses "{\colortbl;\red..\green..\blue..;...}" starting after the '{'.
  std::size_t read_colortbl(std::size_t i) {
    std::size_t end = s_.find('}', i);
    if (end == std::string_view::npos) throw ParseError(i, "unterminated color table");
    std::string_view body = s_.substr(i, end - i);
    body.remove_prefix(std::string_view("\\colortbl").size());
    int rgb[3] = {0, 0, 0};
    bool any = false;
    for (std::size_t k = 0; k < body.size(); ++k) {
      if (body[k] == ';') {
        colors_.push_back(any ? std::optional<std::string>(hex(rgb)) : std::nullopt);
        rgb[0] = rgb[1] = rgb[2] = 0;
        any = false;
        continue;
      }
      if (body[k] != '\\') continue;
      std::size_t w = k + 1;
      while (w < body.size() && std::isalpha(static_cast<unsigned char>(body[w]))) ++w;
      std::string_view word = body.substr(k + 1, w - k - 1);
      std::size_t q = w;
      while (q < body.size() && std::isdigit(static_cast<unsigned char>(body[q]))) ++q;
      int v = 0;
      std::from_chars(body.data() + w, body.data() + q, v);
      int idx = word == "red" ? 0 : word == "green" ? 1 : word == "blue" ? 2 : -1;
      if (idx >= 0) {
        rgb[idx] = std::clamp(v, 0, 255);
        any = true;
      }
      k = q - 1;
    }
    return end + 1;
  }

  static std::string hex(const int rgb[3]) {
    static constexpr char kHex[] = "0123456789ABCDEF";
    std::string out = "#";
    for (int k = 0; k < 3; ++k) {
      out += kHex[rgb[k] >> 4];
      out += kHex[rgb[k] & 0xF];
    }
    return out;
  }

  void control(const std::string& word, std::optional<int> param, CharState& st) {
    if (word == "uc") st.uc = std::max(0, param.value_or(1));
    else if (word == "b") st.bold = param.value_or(1) != 0;
    else if (word == "i") st.italic = param.value_or(1) != 0;
    else if (word == "cf") st.fg = param.value_or(0);
    else if (word == "plain") {
      st.bold = st.italic = false;
      st.fg = 0;
    } else if (word == "trowd") {
      defs_.clear();
      pending_def_ = {};
      row_header_ = false;
      cell_index_ = 0;
      row_.reset();
    } else if (word == "trhdr") row_header_ = true;
    else if (word == "clcbpat") pending_def_.shading = param;
    else if (word == "clmgf") pending_def_.hmerge_first = true;
    else if (word == "clmrg") pending_def_.hmerge = true;
    else if (word == "clvmgf") pending_def_.vmerge_first = true;
    else if (word == "clvmrg") pending_def_.vmerge = true;
    else if (word == "cellx") {
      defs_.push_back(pending_def_);
      pending_def_ = {};
    } else if (word == "intbl") {
      intbl_ = true;
      open_cell();
    } else if (word == "pard") intbl_ = false;
    else if (word == "cell") {
      open_cell();
      close_cell();
    } else if (word == "row") {
      if (row_) {
        if (cell_ && !cell_->text.empty()) close_cell();
        row_->header = row_header_;
        if (row_->header && !rows_.empty() && !rows_.back().header) finish_table();
        rows_.push_back(std::move(*row_));
      }
      row_.reset();
      cell_.reset();
      cell_index_ = 0;
    } else if (word == "par") {
      if (intbl_) {
        if (cell_) cell_->text += '\n';
      } else if (!rows_.empty()) {
        finish_table();
      }
    } else if (word == "line") {
      if (cell_ && !st.skip) cell_->text += '\n';
    } else if (word == "tab") {
      if (cell_ && !st.skip) cell_->text += '\t';
    } else if (word == "emdash") append_cp(0x2014, st);
    else if (word == "endash") append_cp(0x2013, st);
    else if (word == "bullet") append_cp(0x2022, st);
    else if (word == "lquote") append_cp(0x2018, st);
    else if (word == "rquote") append_cp(0x2019, st);
    else if (word == "ldblquote") append_cp(0x201C, st);
    else if (word == "rdblquote") append_cp(0x201D, st);
  }

  void open_cell() {
    if (!row_) row_.emplace();
    if (!cell_) {
      cell_.emplace();
      if (cell_index_ < defs_.size()) cell_->def = defs_[cell_index_];
    }
  }

  void close_cell() {
    if (!cell_) return;
    row_->cells.push_back(std::move(*cell_));
    cell_.reset();
    ++cell_index_;
  }

  void mark_run(const CharState& st, bool visible) {
    if (!visible) return;
    if (st.bold) cell_->bold = true;
    if (st.italic) cell_->italic = true;
    if (st.fg) cell_->fg = st.fg;
  }

  void emit_char(char c, const CharState& st) {
    if (!intbl_) return;
    open_cell();
    cell_->text += c;
    mark_run(st, c != ' ');
  }

  void append_cp(char32_t cp, const CharState& st) {
    if (!intbl_ || st.skip) return;
    open_cell();
    text::append_utf8(cell_->text, cp);
    mark_run(st, cp != ' ');
  }

  void append_u(int param, const CharState& st) {
    char32_t unit = static_cast<char32_t>(param < 0 ? param + 65536 : param);
    if (unit >= 0xD800 && unit <= 0xDBFF) {
      high_surrogate_ = unit;
      return;
    }
    if (unit >= 0xDC00 && unit <= 0xDFFF && high_surrogate_) {
      unit = 0x10000 + ((high_surrogate_ - 0xD800) << 10) + (unit - 0xDC00);
      high_surrogate_ = 0;
    }
    append_cp(unit, st);
  }

  std::optional<std::string> color(std::optional<int> idx) const {
    if (!idx || *idx <= 0 || static_cast<std::size_t>(*idx) >= colors_.size()) return std::nullopt;
    return colors_[static_cast<std::size_t>(*idx)];
  }

  void finish_table() {
    if (rows_.empty()) return;
    std::vector<std::string> headers;
    std::size_t start = 0;
    if (rows_.front().header) {
      for (const auto& c : rows_.front().cells) headers.push_back(text::trim(c.text));
      start = 1;
    }
    std::size_t height = rows_.size() - start;
    std::size_t width = headers.size();
    for (std::size_t r = start; r < rows_.size(); ++r) width = std::max(width, rows_[r].cells.size());

    std::vector<std::vector<RawCell>> raw(height, std::vector<RawCell>(width));
    for (std::size_t r = 0; r < height; ++r)
      for (std::size_t c = 0; c < rows_[start + r].cells.size(); ++c) raw[r][c] = rows_[start + r].cells[c];

    std::vector<std::vector<Cell>> grid(height, std::vector<Cell>(width));
    for (std::size_t r = 0; r < height; ++r)
      for (std::size_t c = 0; c < width; ++c) {
        const RawCell& rc = raw[r][c];
        CellStyle style;
        style.bold = rc.bold;
        style.italic = rc.italic;
        style.bg_color = color(rc.def.shading);
        style.fg_color = color(rc.fg);
        grid[r][c] = Cell(lex_cell(text::trim(rc.text)), style);
      }

    // Resolve merge flags to origins: walk left over clmrg, then up over clvmrg.
    bool merged = false;
    for (std::size_t r = 0; r < height; ++r)
      for (std::size_t c = 0; c < width; ++c) {
        std::size_t orow = r, ocol = c;
        while (ocol > 0 && raw[orow][ocol].def.hmerge) --ocol;
        while (orow > 0 && raw[orow][ocol].def.vmerge) --orow;
        if (orow == r && ocol == c) continue;
        merged = true;
        Cell& origin = grid[orow][ocol];
        origin.span.rowspan = std::max(origin.span.rowspan, static_cast<int>(r - orow + 1));
        origin.span.colspan = std::max(origin.span.colspan, static_cast<int>(c - ocol + 1));
        grid[r][c].covered_by = GridPos{orow, ocol};
      }
    if (merged) {
      for (std::size_t r = 0; r < height; ++r)
        for (std::size_t c = 0; c < width; ++c)
          if (auto o = grid[r][c].covered_by) {
            grid[r][c].value = grid[o->row][o->col].value;
            grid[r][c].style = grid[o->row][o->col].style;
          }
    }
    auto t = StructuredTable::from_rows(std::move(headers), std::move(grid));
    if (!t.spans_consistent()) t.flatten_spans();
    tables_.push_back(std::move(t));
    rows_.clear();
  }

  std::string_view s_;
  std::vector<std::optional<std::string>> colors_;
  std::vector<CellDef> defs_;
  CellDef pending_def_;
  bool row_header_ = false;
  bool intbl_ = false;
  std::size_t cell_index_ = 0;
  std::optional<RawRow> row_;
  std::optional<RawCell> cell_;
  std::vector<RawRow> rows_;
  std::vector<StructuredTable> tables_;
  char32_t high_surrogate_ = 0;
};

std::string escape_rtf(std::string_view s) {
  std::string out;
  std::size_t i = 0;
  while (i < s.size()) {
    unsigned char c = static_cast<unsigned char>(s[i]);
    if (c < 0x80) {
      switch (c) {
        case '\\': out += "\\\\"; break;
        case '{': out += "\\{"; break;
        case '}': out += "\\}"; break;
        case '\n': out += "\\line "; break;
        case '\t': out += "\\tab "; break;
        case '\r': break;
        default: out += static_cast<char>(c);
      }
      ++i;
      continue;
    }
    // Decode one UTF-8 sequence (input is validated upstream).
    int len = c >= 0xF0 ? 4 : c >= 0xE0 ? 3 : 2;
    char32_t cp = c & (len == 4 ? 0x07 : len == 3 ? 0x0F : 0x1F);
    for (int k = 1; k < len && i + static_cast<std::size_t>(k) < s.size(); ++k)
      cp = (cp << 6) | (static_cast<unsigned char>(s[i + static_cast<std::size_t>(k)]) & 0x3F);
    i += static_cast<std::size_t>(len);
    auto unit = [&](char32_t u) {
      int v = static_cast<int>(u);
      if (v > 32767) v -= 65536;
      out += "\\u" + std::to_string(v) + "?";
    };
    if (cp > 0xFFFF) {
      cp -= 0x10000;
      unit(0xD800 + (cp >> 10));
      unit(0xDC00 + (cp & 0x3FF));
    } else {
      unit(cp);
    }
  }
  return out;
}

constexpr int kCellWidth = 2000;  // twips

}  // namespace

std::vector<StructuredTable> parse_rtf(std::string_view src) {
  return Reader(src).run();
}

std::string render_rtf(std::span<const StructuredTable> tables, const RenderOptions& opts) {
  std::vector<std::string> palette;
  auto color_index = [&](const std::string& hex) {
    auto it = std::find(palette.begin(), palette.end(), hex);
    if (it != palette.end()) return static_cast<int>(it - palette.begin()) + 1;
    palette.push_back(hex);
    return static_cast<int>(palette.size());
  };
  if (opts.styles)
    for (const auto& t : tables)
      for (const auto& row : t.rows)
        for (const auto& cell : row) {
          if (cell.style.bg_color) color_index(*cell.style.bg_color);
          if (cell.style.fg_color) color_index(*cell.style.fg_color);
        }

  std::string out = "{\\rtf1\\ansi\\deff0\n{\\fonttbl{\\f0 Helvetica;}}\n";
  if (!palette.empty()) {
    out += "{\\colortbl;";
    for (const auto& hex : palette) {
      int v = 0;
      std::from_chars(hex.data() + 1, hex.data() + 7, v, 16);
      out += "\\red" + std::to_string((v >> 16) & 0xFF) + "\\green" + std::to_string((v >> 8) & 0xFF) +
             "\\blue" + std::to_string(v & 0xFF) + ";";
    }
    out += "}\n";
  }

  auto cellx = [](std::size_t n) {
    std::string s;
    for (std::size_t c = 1; c <= n; ++c) s += "\\cellx" + std::to_string(static_cast<int>(c) * kCellWidth);
    return s;
  };

  for (std::size_t ti = 0; ti < tables.size(); ++ti) {
    const StructuredTable& t = tables[ti];
    bool spans = t.has_spans() && t.spans_consistent();
    if (ti) out += "\\pard\\par\n";
    if (t.has_headers()) {
      out += "\\trowd\\trhdr" + cellx(t.column_count) + "\n";
      for (const auto& h : t.headers) out += "\\pard\\intbl " + escape_rtf(h) + "\\cell\n";
      out += "\\row\n";
    }
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
      out += "\\trowd";
      for (std::size_t c = 0; c < t.column_count; ++c) {
        const Cell& cell = t.rows[r][c];
        if (spans) {
          GridPos o = cell.covered_by.value_or(GridPos{r, c});
          const Span& sp = t.rows[o.row][o.col].span;
          if (r > o.row) out += "\\clvmrg";
          else if (sp.rowspan > 1) out += "\\clvmgf";
          if (c > o.col) out += "\\clmrg";
          else if (sp.colspan > 1) out += "\\clmgf";
        }
        if (opts.styles && cell.style.bg_color && !cell.covered_by)
          out += "\\clcbpat" + std::to_string(color_index(*cell.style.bg_color));
        out += "\\cellx" + std::to_string(static_cast<int>(c + 1) * kCellWidth);
      }
      out += "\n";
      for (const auto& cell : t.rows[r]) {
        out += "\\pard\\intbl ";
        if (!(spans && cell.covered_by)) {
          std::string body = escape_rtf(cell_text(cell.value));
          std::string fmt;
          if (opts.styles) {
            if (cell.style.bold) fmt += "\\b";
            if (cell.style.italic) fmt += "\\i";
            if (cell.style.fg_color) fmt += "\\cf" + std::to_string(color_index(*cell.style.fg_color));
          }
          out += fmt.empty() ? body : "{" + fmt + " " + body + "}";
        }
        out += "\\cell\n";
      }
      out += "\\row\n";
    }
  }
  out += "}";
  return out;
}

}  // namespace smartpaste::codec
