#include "formats.hpp"

#include "smartpaste/error.hpp"
#include "smartpaste/text.hpp"

#include <algorithm>
#include <array>
#include <regex>
#include <set>

namespace smartpaste {

namespace {

constexpr std::array<std::pair<FormatId, std::string_view>, 7> kFormatNames{{
    {FormatId::html_table, "html_table"},
    {FormatId::markdown_table, "markdown_table"},
    {FormatId::latex_tabular, "latex_tabular"},
    {FormatId::csv, "csv"},
    {FormatId::tsv, "tsv"},
    {FormatId::aligned_text, "aligned_text"},
    {FormatId::rtf_table, "rtf_table"},
}};

std::vector<std::string> non_empty_lines(std::string_view s) {
  std::vector<std::string> out;
  for (auto& l : text::split_lines(s))
    if (!text::trim(l).empty()) out.push_back(std::move(l));
  return out;
}

bool sniff_markdown(std::string_view s) {
  static const std::regex kSep(R"(^\s*\|?\s*:?-{3,}:?\s*(\|\s*:?-{3,}:?\s*)*\|?\s*$)");
  auto lines = text::split_lines(s);
  for (std::size_t i = 1; i < lines.size(); ++i)
    if (std::regex_match(lines[i], kSep) && text::contains(lines[i], "-") &&
        (text::contains(lines[i], "|") || text::contains(lines[i - 1], "|")) &&
        text::contains(lines[i - 1], "|"))
      return true;
  return false;
}

bool sniff_latex(std::string_view s) {
  if (text::contains(s, "\\begin{tabular}")) return true;
  auto lines = non_empty_lines(s);
  if (lines.empty()) return false;
  bool any_amp = false;
  for (const auto& raw : lines) {
    std::string l = text::trim(raw);
    if (l == "\\hline" || l == "\\toprule" || l == "\\midrule" || l == "\\bottomrule") continue;
    if (l.size() < 2 || l.substr(l.size() - 2) != "\\\\") return false;
    any_amp = any_amp || text::contains(l, "&");
  }
  return any_amp;
}

bool sniff_tsv(std::string_view s) {
  auto lines = non_empty_lines(s);
  if (lines.empty()) return false;
  auto tabs = [](const std::string& l) { return std::count(l.begin(), l.end(), '\t'); };
  auto first = tabs(lines.front());
  if (first < 1) return false;
  return std::all_of(lines.begin(), lines.end(), [&](const auto& l) { return tabs(l) == first; });
}

bool sniff_csv(std::string_view s) {
  try {
    auto records = codec::split_csv_records(s);
    std::size_t width = 0;
    for (const auto& r : records) {
      if (r.size() == 1 && r[0].empty()) continue;  // blank line
      if (width == 0) width = r.size();
      if (r.size() != width) return false;
    }
    return width >= 2;
  } catch (const Error&) {
    return false;
  }
}

bool sniff_aligned(std::string_view s) {
  auto lines = non_empty_lines(s);
  if (lines.size() < 2) return false;
  for (const auto& l : lines)
    if (!text::contains(text::trim(l), "  ")) return false;
  try {
    ParseOptions opts;
    opts.header = ParseOptions::Header::none;
    auto tables = codec::parse_aligned(s, opts);
    return tables.size() == 1 && tables[0].column_count >= 2;
  } catch (const Error&) {
    return false;
  }
}

// Source-app families and the format they usually hand over as text.
std::optional<FormatId> app_hint(std::string_view app_name) {
  std::string a = text::lower(app_name);
  auto any = [&](std::initializer_list<std::string_view> names) {
    return std::any_of(names.begin(), names.end(), [&](auto n) { return text::contains(a, n); });
  };
  if (any({"overleaf", "latex", "texstudio", "texmaker", "lyx"})) return FormatId::latex_tabular;
  if (any({"obsidian", "markdown", "typora", "blog", "md-editor"})) return FormatId::markdown_table;
  if (any({"excel", "sheets", "calc", "numbers"})) return FormatId::tsv;
  if (any({"jupyter", "notebook", "terminal", "console", "rstudio"}))
    return FormatId::aligned_text;
  return std::nullopt;
}

}  // namespace

std::string_view to_string(FormatId f) {
  for (const auto& [id, name] : kFormatNames)
    if (id == f) return name;
  return "csv";
}

std::optional<FormatId> try_format_from_string(std::string_view name) {
  for (const auto& [id, n] : kFormatNames)
    if (n == name) return id;
  return std::nullopt;
}

FormatId format_from_string(std::string_view name) {
  if (auto f = try_format_from_string(name)) return *f;
  throw Error(ErrorCode::UndetectableFormat, "unknown format '" + std::string(name) + "'");
}

ContentType content_type_for(FormatId f) {
  if (f == FormatId::html_table) return ContentType::html;
  if (f == FormatId::rtf_table) return ContentType::rtf;
  return ContentType::text;
}

FormatId detect_format(const RawPayload& payload, const AppContext& source) {
  switch (payload.kind) {
    case PayloadKind::image:
      throw Error(ErrorCode::ImagePayloadUnsupported,
                  "image payloads need a vision-capable provider");
    case PayloadKind::html: return FormatId::html_table;
    case PayloadKind::rtf: return FormatId::rtf_table;
    case PayloadKind::text: break;
  }
  std::string_view s = payload.bytes;
  if (text::icontains(s, "<table")) return FormatId::html_table;
  if (text::trim(s).rfind("{\\rtf", 0) == 0) return FormatId::rtf_table;

  // Every sniff rule that fires, in priority order.
  std::vector<FormatId> candidates;
  if (sniff_markdown(s)) candidates.push_back(FormatId::markdown_table);
  if (sniff_latex(s)) candidates.push_back(FormatId::latex_tabular);
  if (sniff_tsv(s)) candidates.push_back(FormatId::tsv);
  if (sniff_csv(s)) candidates.push_back(FormatId::csv);
  if (sniff_aligned(s)) candidates.push_back(FormatId::aligned_text);
  if (candidates.empty())
    throw Error(ErrorCode::UndetectableFormat,
                "no table format recognised in " + std::to_string(s.size()) + " bytes of text");

  // A source-app hint wins whenever the content is plausible for it.
  if (auto hint = app_hint(source.app_name))
    if (std::find(candidates.begin(), candidates.end(), *hint) != candidates.end()) return *hint;
  return candidates.front();
}

std::vector<StructuredTable> parse_text(std::string_view content, FormatId fmt,
                                        const ParseOptions& opts) {
  std::vector<StructuredTable> tables;
  switch (fmt) {
    case FormatId::html_table: tables = codec::parse_html(content); break;
    case FormatId::markdown_table: tables = codec::parse_markdown(content); break;
    case FormatId::latex_tabular: tables = codec::parse_latex(content); break;
    case FormatId::csv: tables = codec::parse_delimited(content, ',', opts); break;
    case FormatId::tsv: tables = codec::parse_delimited(content, '\t', opts); break;
    case FormatId::aligned_text: tables = codec::parse_aligned(content, opts); break;
    case FormatId::rtf_table: tables = codec::parse_rtf(content); break;
  }
  if (tables.empty())
    throw Error(ErrorCode::NoTablesFound,
                "no " + std::string(to_string(fmt)) + " tables found in payload");
  for (const auto& t : tables) t.validate();
  return tables;
}

std::vector<StructuredTable> parse(const RawPayload& payload, FormatId fmt,
                                   const ParseOptions& opts) {
  if (payload.kind == PayloadKind::image)
    throw Error(ErrorCode::ImagePayloadUnsupported,
                "image payloads need a vision-capable provider");
  return parse_text(payload.bytes, fmt, opts);
}

Rendered render(std::span<const StructuredTable> tables, FormatId fmt,
                const RenderOptions& opts) {
  if (tables.empty()) throw Error(ErrorCode::Render, "nothing to render");
  for (const auto& t : tables) {
    try {
      t.validate();
    } catch (const Error& e) {
      throw Error(ErrorCode::Render, e.what());
    }
  }
  Rendered out;
  out.content_type = content_type_for(fmt);
  if (fmt == FormatId::rtf_table) {
    out.text = codec::render_rtf(tables, opts);
    return out;
  }
  std::vector<std::string> parts;
  std::vector<std::string> packages;
  for (const auto& t : tables) {
    switch (fmt) {
      case FormatId::html_table: parts.push_back(codec::render_html(t, opts)); break;
      case FormatId::markdown_table:
        parts.push_back(codec::render_markdown(t, opts, out.warnings));
        break;
      case FormatId::latex_tabular: parts.push_back(codec::render_latex(t, opts, packages)); break;
      case FormatId::csv: parts.push_back(codec::render_delimited(t, ',', opts, out.warnings)); break;
      case FormatId::tsv: parts.push_back(codec::render_delimited(t, '\t', opts, out.warnings)); break;
      case FormatId::aligned_text: parts.push_back(codec::render_aligned(t, opts, out.warnings)); break;
      case FormatId::rtf_table: break;
    }
  }
  if (!packages.empty()) {
    std::sort(packages.begin(), packages.end());
    packages.erase(std::unique(packages.begin(), packages.end()), packages.end());
    for (const auto& p : packages) out.text += "% Requires: " + p + "\n";
  }
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out.text += "\n";
    out.text += parts[i];
  }
  return out;
}

LoaderTarget loader_target_from_string(std::string_view name) {
  if (name == "notebook_dataframe") return LoaderTarget::notebook_dataframe;
  if (name == "r_dataframe") return LoaderTarget::r_dataframe;
  throw Error(ErrorCode::UnknownTarget, "unknown loader target '" + std::string(name) + "'");
}

std::string_view to_string(LoaderTarget t) {
  return t == LoaderTarget::notebook_dataframe ? "notebook_dataframe" : "r_dataframe";
}

namespace {

// Double-quoted literal that is valid in both Python and R.
std::string quoted_literal(std::string_view s) {
  std::string out = "\"";
  for (char c : s) {
    switch (c) {
      case '\\': out += "\\\\"; break;
      case '"': out += "\\\""; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      case '\t': out += "\\t"; break;
      default: out += c;
    }
  }
  return out + "\"";
}

}  // namespace

std::string emit_loader_snippet(const StructuredTable& table, LoaderTarget target,
                                const std::filesystem::path& temp_path) {
  std::string path = quoted_literal(temp_path.string());
  std::string shape = std::to_string(table.row_count()) + " rows x " +
                      std::to_string(table.column_count) + " columns";
  if (target == LoaderTarget::notebook_dataframe)
    return "import pandas as pd\n\n# " + shape + "\ndf = pd.read_csv(" + path + ")\ndf.head()\n";
  return "# " + shape + "\ndf <- read.csv(" + path + ", check.names = FALSE)\nhead(df)\n";
}

namespace codec {

bool first_row_is_header(const std::vector<std::string>& first, ParseOptions::Header mode) {
  if (mode == ParseOptions::Header::first_row) return true;
  if (mode == ParseOptions::Header::none) return false;
  if (first.empty()) return false;
  return std::all_of(first.begin(), first.end(), [](const std::string& f) {
    std::string t = text::trim(f);
    return !t.empty() && !lex_number(t);
  });
}

StructuredTable table_from_strings(std::vector<std::vector<std::string>> rows,
                                   ParseOptions::Header mode) {
  std::vector<std::string> headers;
  std::size_t start = 0;
  if (!rows.empty() && first_row_is_header(rows.front(), mode)) {
    headers = rows.front();
    start = 1;
  }
  std::vector<std::vector<Cell>> cells;
  for (std::size_t r = start; r < rows.size(); ++r) {
    std::vector<Cell> row;
    for (const auto& f : rows[r]) row.emplace_back(lex_cell(f));
    cells.push_back(std::move(row));
  }
  return StructuredTable::from_rows(std::move(headers), std::move(cells));
}

std::string style_warning(std::string_view fmt, std::string_view what, std::size_t count) {
  return "UnsupportedStyleWarning: " + std::string(fmt) + " cannot express " + std::string(what) +
         "; dropped on " + std::to_string(count) + " cell(s)";
}

}  // namespace codec

}  // namespace smartpaste
