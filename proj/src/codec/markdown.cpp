// GitHub-style pipe tables.

#include "formats.hpp"

#include "smartpaste/text.hpp"

#include <regex>

namespace smartpaste::codec {

namespace {

bool is_separator_row(const std::string& line) {
  static const std::regex kSep(R"(^\s*\|?\s*:?-{3,}:?\s*(\|\s*:?-{3,}:?\s*)*\|?\s*$)");
  return std::regex_match(line, kSep);
}

// Splits on unescaped pipes; escapes are kept for decode().
std::vector<std::string> split_row(const std::string& line) {
  std::string s = text::trim(line);
  std::vector<std::string> cells;
  std::string cur;
  bool trailing_pipe = false;
  for (std::size_t i = 0; i < s.size(); ++i) {
    trailing_pipe = false;
    if (s[i] == '\\' && i + 1 < s.size()) {
      cur += s[i];
      cur += s[++i];
      continue;
    }
    if (s[i] == '|') {
      cells.push_back(cur);
      cur.clear();
      trailing_pipe = true;
      continue;
    }
    cur += s[i];
  }
  cells.push_back(cur);
  if (!s.empty() && s.front() == '|') cells.erase(cells.begin());
  if (trailing_pipe && !cells.empty()) cells.pop_back();
  return cells;
}

bool is_punct(char c) {
  return std::ispunct(static_cast<unsigned char>(c)) != 0;
}

// Backslash escapes and <br> line breaks, in one pass so an escaped "\<br>"
// stays literal.
std::string decode(std::string_view s) {
  std::string out;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '\\' && i + 1 < s.size() && is_punct(s[i + 1])) {
      out += s[++i];
      continue;
    }
    bool matched = false;
    for (std::string_view br : {"<br>", "<br/>", "<br />"}) {
      if (s.substr(i, br.size()) == br) {
        out += '\n';
        i += br.size() - 1;
        matched = true;
        break;
      }
    }
    if (!matched) out += s[i];
  }
  return out;
}

// Wrapper such as "**" around the whole cell, not escaped at the close.
bool wrapped_in(const std::string& s, std::string_view mark) {
  if (s.size() < 2 * mark.size() + 1) return false;
  if (s.compare(0, mark.size(), mark) != 0) return false;
  if (s.compare(s.size() - mark.size(), mark.size(), mark) != 0) return false;
  // The closing mark is literal when preceded by an odd run of backslashes.
  std::size_t slashes = 0;
  for (std::size_t i = s.size() - mark.size(); i > mark.size() && s[i - 1] == '\\'; --i)
    ++slashes;
  return slashes % 2 == 0;
}

std::string header_text(const std::string& raw) {
  std::string s = text::trim(raw);
  if (wrapped_in(s, "**")) s = text::trim(s.substr(2, s.size() - 4));
  return decode(s);
}

Cell parse_cell(const std::string& raw) {
  std::string s = text::trim(raw);
  CellStyle style;
  for (std::string_view mark : {"**", "__"}) {
    if (wrapped_in(s, mark)) {
      style.bold = true;
      s = text::trim(s.substr(mark.size(), s.size() - 2 * mark.size()));
      break;
    }
  }
  for (std::string_view mark : {"*", "_"}) {
    if (wrapped_in(s, mark) && s.compare(0, 2, std::string(2, mark[0])) != 0) {
      style.italic = true;
      s = text::trim(s.substr(1, s.size() - 2));
      break;
    }
  }
  return Cell(lex_cell(decode(s)), style);
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '\\': out += "\\\\"; break;
      case '|': out += "\\|"; break;
      case '*': out += "\\*"; break;
      case '_': out += "\\_"; break;
      case '`': out += "\\`"; break;
      case '<': out += "\\<"; break;
      case '\n': out += "<br>"; break;
      case '\r': break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

std::vector<StructuredTable> parse_markdown(std::string_view src) {
  auto lines = text::split_lines(src);
  std::vector<StructuredTable> tables;
  std::size_t i = 0;
  while (i + 1 < lines.size()) {
    if (!text::contains(lines[i], "|") || !is_separator_row(lines[i + 1])) {
      ++i;
      continue;
    }
    std::vector<std::string> headers;
    for (const auto& h : split_row(lines[i])) headers.push_back(header_text(h));
    std::size_t width = split_row(lines[i + 1]).size();
    std::vector<std::vector<Cell>> rows;
    i += 2;
    for (; i < lines.size(); ++i) {
      std::string t = text::trim(lines[i]);
      if (t.empty() || !text::contains(t, "|")) break;
      std::vector<Cell> row;
      for (const auto& c : split_row(lines[i])) row.push_back(parse_cell(c));
      rows.push_back(std::move(row));
    }
    headers.resize(std::max(headers.size(), width));
    tables.push_back(StructuredTable::from_rows(std::move(headers), std::move(rows)));
  }
  return tables;
}

std::string render_markdown(const StructuredTable& t, const RenderOptions& opts,
                            std::vector<std::string>& warnings) {
  std::string out;
  auto line = [&](const std::vector<std::string>& cells) {
    out += "|";
    for (const auto& c : cells) out += " " + c + " |";
  };
  std::vector<std::string> header(t.column_count);
  for (std::size_t c = 0; c < t.column_count; ++c)
    header[c] = t.has_headers() ? escape(t.headers[c]) : "";
  line(header);
  out += "\n|";
  for (std::size_t c = 0; c < t.column_count; ++c) out += " --- |";
  std::size_t dropped = 0;
  for (const auto& row : t.rows) {
    out += "\n";
    std::vector<std::string> cells;
    for (const auto& cell : row) {
      std::string v = escape(cell_text(cell.value));
      if (opts.styles && cell.style.bold && !v.empty()) v = "**" + v + "**";
      if (opts.styles && (cell.style.italic || cell.style.bg_color || cell.style.fg_color))
        ++dropped;
      cells.push_back(std::move(v));
    }
    line(cells);
  }
  if (dropped)
    warnings.push_back(style_warning("markdown_table", "italic or colors", dropped));
  return out;
}

}  // namespace smartpaste::codec
