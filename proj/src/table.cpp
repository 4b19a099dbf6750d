#include "smartpaste/table.hpp"

#include "smartpaste/error.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>

namespace smartpaste {

namespace {

bool is_digit(char c) { return c >= '0' && c <= '9'; }

std::string lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

std::string hex2(int v) {
  static constexpr char kHex[] = "0123456789ABCDEF";
  return {kHex[(v >> 4) & 0xF], kHex[v & 0xF]};
}

}  // namespace

std::optional<Number> lex_number(std::string_view text) {
  Number n;
  if (!text.empty() && text.back() == '%') {
    n.percent = true;
    text.remove_suffix(1);
  }
  std::size_t i = 0;
  std::string plain;
  if (i < text.size() && (text[i] == '+' || text[i] == '-')) {
    if (text[i] == '-') plain += '-';
    ++i;
  }
  std::size_t int_start = i;
  while (i < text.size() && is_digit(text[i])) plain += text[i++];
  std::size_t lead = i - int_start;
  if (lead == 0) return std::nullopt;
  if (i < text.size() && text[i] == ',') {
    // Thousands groups: 1-3 leading digits, then ",ddd" groups.
    if (lead > 3) return std::nullopt;
    while (i < text.size() && text[i] == ',') {
      if (i + 4 > text.size()) return std::nullopt;
      for (std::size_t k = 1; k <= 3; ++k)
        if (!is_digit(text[i + k])) return std::nullopt;
      plain.append(text.substr(i + 1, 3));
      i += 4;
      if (i < text.size() && is_digit(text[i])) return std::nullopt;
    }
  }
  if (i < text.size() && text[i] == '.') {
    plain += '.';
    ++i;
    std::size_t frac_start = i;
    while (i < text.size() && is_digit(text[i])) plain += text[i++];
    if (i == frac_start) return std::nullopt;
  }
  if (i != text.size()) return std::nullopt;
  auto d = Decimal::parse(plain);
  if (!d) return std::nullopt;
  n.value = *d;
  return n;
}

CellValue lex_cell(std::string_view text) {
  if (text.empty()) return std::monostate{};
  if (auto n = lex_number(text)) return *n;
  return std::string(text);
}

std::string cell_text(const CellValue& v) {
  if (const auto* n = as_number(v)) return n->value.to_string() + (n->percent ? "%" : "");
  if (const auto* t = as_text(v)) return *t;
  return {};
}

std::optional<std::string> normalize_color(std::string_view raw) {
  std::string s = lower(trim(raw));
  static const std::array<std::pair<std::string_view, std::string_view>, 12> kNamed{{
      {"black", "#000000"},
      {"white", "#FFFFFF"},
      {"red", "#FF0000"},
      {"green", "#008000"},
      {"lime", "#00FF00"},
      {"blue", "#0000FF"},
      {"yellow", "#FFFF00"},
      {"orange", "#FFA500"},
      {"gray", "#808080"},
      {"grey", "#808080"},
      {"cyan", "#00FFFF"},
      {"magenta", "#FF00FF"},
  }};
  for (const auto& [name, hex] : kNamed)
    if (s == name) return std::string(hex);

  auto all_hex = [](std::string_view h) {
    return std::all_of(h.begin(), h.end(),
                       [](char c) { return std::isxdigit(static_cast<unsigned char>(c)); });
  };
  if (s.size() == 7 && s[0] == '#' && all_hex(s.substr(1))) {
    std::string out = "#";
    for (std::size_t i = 1; i < 7; ++i)
      out += static_cast<char>(std::toupper(static_cast<unsigned char>(s[i])));
    return out;
  }
  if (s.size() == 4 && s[0] == '#' && all_hex(s.substr(1))) {
    std::string out = "#";
    for (std::size_t i = 1; i < 4; ++i) {
      char c = static_cast<char>(std::toupper(static_cast<unsigned char>(s[i])));
      out += c;
      out += c;
    }
    return out;
  }
  if (s.rfind("rgb(", 0) == 0 && s.back() == ')') {
    std::string body = s.substr(4, s.size() - 5);
    std::array<int, 3> rgb{};
    std::size_t pos = 0;
    for (int k = 0; k < 3; ++k) {
      std::size_t comma = body.find(',', pos);
      std::string part = trim(body.substr(pos, comma == std::string::npos ? std::string::npos
                                                                           : comma - pos));
      int v = 0;
      auto [p, ec] = std::from_chars(part.data(), part.data() + part.size(), v);
      if (ec != std::errc() || p != part.data() + part.size() || v < 0 || v > 255)
        return std::nullopt;
      rgb[static_cast<std::size_t>(k)] = v;
      if (k < 2) {
        if (comma == std::string::npos) return std::nullopt;
        pos = comma + 1;
      } else if (comma != std::string::npos) {
        return std::nullopt;
      }
    }
    return "#" + hex2(rgb[0]) + hex2(rgb[1]) + hex2(rgb[2]);
  }
  return std::nullopt;
}

std::string StructuredTable::column_name(std::size_t index) const {
  if (has_headers() && index < headers.size()) return headers[index];
  return "col" + std::to_string(index + 1);
}

StructuredTable StructuredTable::from_rows(std::vector<std::string> headers,
                                           std::vector<std::vector<Cell>> rows) {
  StructuredTable t;
  if (std::all_of(headers.begin(), headers.end(), [](const auto& h) { return h.empty(); }))
    headers.clear();
  std::size_t width = std::max<std::size_t>(headers.size(), 1);
  for (const auto& r : rows) width = std::max(width, r.size());
  if (!headers.empty()) headers.resize(width);
  for (auto& r : rows) r.resize(width);
  t.headers = std::move(headers);
  t.rows = std::move(rows);
  t.column_count = width;
  return t;
}

void StructuredTable::validate() const {
  if (column_count < 1) throw Error(ErrorCode::Parse, "table has no columns");
  if (!headers.empty() && headers.size() != column_count)
    throw Error(ErrorCode::Parse, "header width " + std::to_string(headers.size()) +
                                      " != column count " + std::to_string(column_count));
  for (std::size_t r = 0; r < rows.size(); ++r)
    if (rows[r].size() != column_count)
      throw Error(ErrorCode::Parse, "row " + std::to_string(r + 1) + " has " +
                                        std::to_string(rows[r].size()) + " cells, expected " +
                                        std::to_string(column_count));
}

bool StructuredTable::has_spans() const {
  for (const auto& r : rows)
    for (const auto& c : r)
      if (c.covered_by || c.span != Span{}) return true;
  return false;
}

bool StructuredTable::spans_consistent() const {
  std::vector<std::vector<int>> owner(rows.size(), std::vector<int>(column_count, 0));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t c = 0; c < rows[r].size(); ++c) {
      const Cell& cell = rows[r][c];
      if (cell.covered_by) continue;
      if (cell.span.rowspan < 1 || cell.span.colspan < 1) return false;
      for (int dr = 0; dr < cell.span.rowspan; ++dr) {
        for (int dc = 0; dc < cell.span.colspan; ++dc) {
          std::size_t rr = r + static_cast<std::size_t>(dr);
          std::size_t cc = c + static_cast<std::size_t>(dc);
          if (rr >= rows.size() || cc >= column_count) return false;
          if (++owner[rr][cc] != 1) return false;
          if ((dr || dc) && rows[rr][cc].covered_by != GridPos{r, c}) return false;
        }
      }
    }
  }
  for (const auto& row : owner)
    for (int o : row)
      if (o != 1) return false;
  return true;
}

void StructuredTable::flatten_spans() {
  for (auto& r : rows)
    for (auto& c : r) {
      c.span = Span{};
      c.covered_by.reset();
    }
}

Json to_json(const CellValue& v) {
  if (is_empty(v)) return nullptr;
  if (const auto* n = as_number(v)) return {{"number", cell_text(*n)}};
  return *as_text(v);
}

Json to_json(const CellStyle& s) {
  Json j = Json::object();
  if (s.bold) j["bold"] = true;
  if (s.italic) j["italic"] = true;
  if (s.bg_color) j["bg_color"] = *s.bg_color;
  if (s.fg_color) j["fg_color"] = *s.fg_color;
  return j;
}

Json to_json(const StructuredTable& t) {
  Json rows = Json::array();
  Json styles = Json::array();
  Json spans = Json::array();
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    Json row = Json::array();
    for (std::size_t c = 0; c < t.rows[r].size(); ++c) {
      const Cell& cell = t.rows[r][c];
      row.push_back(to_json(cell.value));
      if (!cell.style.is_plain())
        styles.push_back({{"row", r}, {"col", c}, {"style", to_json(cell.style)}});
      if (cell.span != Span{})
        spans.push_back({{"row", r},
                         {"col", c},
                         {"rowspan", cell.span.rowspan},
                         {"colspan", cell.span.colspan}});
    }
    rows.push_back(std::move(row));
  }
  Json j = {{"headers", t.headers},
                      {"column_count", t.column_count},
                      {"rows", std::move(rows)}};
  if (t.caption) j["caption"] = *t.caption;
  if (!styles.empty()) j["styles"] = std::move(styles);
  if (!spans.empty()) j["spans"] = std::move(spans);
  return j;
}

StructuredTable table_from_json(const Json& j) {
  std::vector<std::vector<Cell>> rows;
  for (const auto& jr : j.at("rows")) {
    std::vector<Cell> row;
    for (const auto& jc : jr) {
      if (jc.is_null()) {
        row.emplace_back(std::monostate{});
      } else if (jc.is_object()) {
        row.emplace_back(lex_cell(jc.at("number").get<std::string>()));
      } else if (jc.is_number()) {
        row.emplace_back(lex_cell(jc.dump()));
      } else {
        row.emplace_back(CellValue(jc.get<std::string>()));
      }
    }
    rows.push_back(std::move(row));
  }
  auto t = StructuredTable::from_rows(j.value("headers", std::vector<std::string>{}),
                                      std::move(rows));
  if (j.contains("column_count"))
    t.column_count = std::max(t.column_count, j["column_count"].get<std::size_t>());
  for (auto& r : t.rows) r.resize(t.column_count);
  if (t.has_headers()) t.headers.resize(t.column_count);
  if (j.contains("caption")) t.caption = j["caption"].get<std::string>();
  if (j.contains("styles")) {
    for (const auto& s : j["styles"]) {
      auto& cell = t.rows.at(s.at("row").get<std::size_t>()).at(s.at("col").get<std::size_t>());
      const auto& st = s.at("style");
      cell.style.bold = st.value("bold", false);
      cell.style.italic = st.value("italic", false);
      if (st.contains("bg_color")) cell.style.bg_color = st["bg_color"].get<std::string>();
      if (st.contains("fg_color")) cell.style.fg_color = st["fg_color"].get<std::string>();
    }
  }
  if (j.contains("spans")) {
    for (const auto& s : j["spans"]) {
      std::size_t r = s.at("row").get<std::size_t>(), c = s.at("col").get<std::size_t>();
      Span span{s.at("rowspan").get<int>(), s.at("colspan").get<int>()};
      t.rows.at(r).at(c).span = span;
      for (int dr = 0; dr < span.rowspan; ++dr)
        for (int dc = 0; dc < span.colspan; ++dc)
          if (dr || dc) {
            auto& covered = t.rows.at(r + static_cast<std::size_t>(dr))
                                .at(c + static_cast<std::size_t>(dc));
            covered.covered_by = GridPos{r, c};
          }
    }
  }
  return t;
}

}  // namespace smartpaste
