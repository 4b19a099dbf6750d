// Whitespace-aligned text (terminal / notebook output). Columns are found
// from gutters: character positions that are blank on every line.

#include "formats.hpp"

#include "smartpaste/text.hpp"

#include <algorithm>

namespace smartpaste::codec {

namespace {

constexpr std::size_t kMinGutter = 2;

std::string rtrim(std::string s) {
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.pop_back();
  return s;
}

}  // namespace

std::vector<StructuredTable> parse_aligned(std::string_view src, const ParseOptions& opts) {
  std::vector<std::string> lines;
  for (auto& l : text::split_lines(src)) {
    std::string t = rtrim(text::replace_all(l, "\t", "    "));
    if (!t.empty()) lines.push_back(std::move(t));
  }
  if (lines.empty()) return {};

  std::size_t width = 0;
  for (const auto& l : lines) width = std::max(width, l.size());
  std::vector<bool> blank(width, true);
  for (const auto& l : lines)
    for (std::size_t i = 0; i < l.size(); ++i)
      if (l[i] != ' ') blank[i] = false;

  // Column extents [begin, end) separated by gutters at least kMinGutter wide.
  std::vector<std::pair<std::size_t, std::size_t>> columns;
  std::size_t i = 0;
  while (i < width) {
    while (i < width && blank[i]) ++i;
    if (i >= width) break;
    std::size_t begin = i, end = i;
    while (i < width) {
      if (!blank[i]) {
        end = ++i;
        continue;
      }
      std::size_t gap = i;
      while (gap < width && blank[gap]) ++gap;
      if (gap >= width || gap - i >= kMinGutter) break;
      i = gap;
    }
    columns.emplace_back(begin, end);
  }

  std::vector<std::vector<std::string>> rows;
  for (const auto& l : lines) {
    std::vector<std::string> row;
    for (auto [b, e] : columns)
      row.push_back(b < l.size() ? text::trim(l.substr(b, std::min(e, l.size()) - b)) : "");
    rows.push_back(std::move(row));
  }
  return {table_from_strings(std::move(rows), opts.header)};
}

std::string render_aligned(const StructuredTable& t, const RenderOptions& opts,
                           std::vector<std::string>& warnings) {
  std::vector<std::vector<std::string>> grid;
  if (t.has_headers()) grid.push_back(t.headers);
  std::size_t styled = 0;
  for (const auto& row : t.rows) {
    std::vector<std::string> r;
    for (const auto& c : row) {
      r.push_back(text::replace_all(cell_text(c.value), "\n", " "));
      if (!c.style.is_plain()) ++styled;
    }
    grid.push_back(std::move(r));
  }
  std::vector<std::size_t> widths(t.column_count, 0);
  for (const auto& r : grid)
    for (std::size_t c = 0; c < r.size(); ++c)
      widths[c] = std::max(widths[c], text::utf8_length(r[c]));
  std::string out;
  for (const auto& r : grid) {
    std::string line;
    for (std::size_t c = 0; c < r.size(); ++c) {
      line += r[c];
      if (c + 1 < r.size())
        line.append(widths[c] - text::utf8_length(r[c]) + kMinGutter, ' ');
    }
    out += rtrim(std::move(line)) + "\n";
  }
  if (styled && opts.styles) warnings.push_back(style_warning("aligned_text", "cell styles", styled));
  return out;
}

}  // namespace smartpaste::codec
