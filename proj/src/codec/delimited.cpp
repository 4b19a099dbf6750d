// CSV (RFC 4180 quoting) and TSV (hard tabs, backslash escapes).

#include "formats.hpp"

#include "smartpaste/error.hpp"
#include "smartpaste/text.hpp"

namespace smartpaste::codec {

std::vector<std::vector<std::string>> split_csv_records(std::string_view src) {
  std::vector<std::vector<std::string>> records;
  std::vector<std::string> record;
  std::string field;
  bool quoted = false;       // inside a quoted field
  bool was_quoted = false;   // current field started with a quote
  bool field_started = false;
  std::size_t quote_start = 0;

  auto end_field = [&] {
    record.push_back(std::move(field));
    field.clear();
    was_quoted = false;
    field_started = false;
  };
  auto end_record = [&] {
    end_field();
    records.push_back(std::move(record));
    record.clear();
  };

  for (std::size_t i = 0; i < src.size(); ++i) {
    char c = src[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < src.size() && src[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field += c;
      }
      continue;
    }
    if (c == '"' && !field_started) {
      quoted = was_quoted = field_started = true;
      quote_start = i;
      continue;
    }
    if (c == ',') {
      end_field();
      continue;
    }
    if (c == '\r' && i + 1 < src.size() && src[i + 1] == '\n') continue;
    if (c == '\n' || c == '\r') {
      end_record();
      continue;
    }
    if (was_quoted) throw ParseError(i, "unexpected character after closing quote");
    field += c;
    field_started = true;
  }
  if (quoted) throw ParseError(quote_start, "unterminated quoted field");
  // A final line terminator does not open another record.
  if (field_started || !record.empty() || (!src.empty() && src.back() != '\n' && src.back() != '\r'))
    end_record();
  return records;
}

namespace {

std::string tsv_unescape(std::string_view f) {
  std::string out;
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (f[i] == '\\' && i + 1 < f.size()) {
      char n = f[i + 1];
      if (n == 't' || n == 'n' || n == 'r' || n == '\\') {
        out += n == 't' ? '\t' : n == 'n' ? '\n' : n == 'r' ? '\r' : '\\';
        ++i;
        continue;
      }
    }
    out += f[i];
  }
  return out;
}

std::vector<std::vector<std::string>> split_tsv(std::string_view src) {
  if (!src.empty() && src.back() == '\n') src.remove_suffix(1);
  if (!src.empty() && src.back() == '\r') src.remove_suffix(1);
  std::vector<std::vector<std::string>> records;
  if (src.empty()) return records;
  for (const auto& line : text::split_lines(src)) {
    std::vector<std::string> rec;
    std::size_t start = 0;
    while (true) {
      std::size_t tab = line.find('\t', start);
      rec.push_back(tsv_unescape(
          std::string_view(line).substr(start, tab == std::string::npos ? std::string::npos
                                                                        : tab - start)));
      if (tab == std::string::npos) break;
      start = tab + 1;
    }
    records.push_back(std::move(rec));
  }
  return records;
}

std::string csv_field(const std::string& s) {
  bool needs_quotes = s.find_first_of(",\"\r\n") != std::string::npos ||
                      (!s.empty() && (s.front() == ' ' || s.back() == ' '));
  if (!needs_quotes) return s;
  return "\"" + text::replace_all(s, "\"", "\"\"") + "\"";
}

std::string tsv_field(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '\t': out += "\\t"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      case '\\': out += "\\\\"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

std::vector<StructuredTable> parse_delimited(std::string_view src, char delim,
                                             const ParseOptions& opts) {
  auto records = delim == ',' ? split_csv_records(src) : split_tsv(src);
  if (records.empty()) return {};
  return {table_from_strings(std::move(records), opts.header)};
}

std::string render_delimited(const StructuredTable& t, char delim, const RenderOptions& opts,
                             std::vector<std::string>& warnings) {
  auto field = [&](const std::string& s) { return delim == ',' ? csv_field(s) : tsv_field(s); };
  std::string out;
  auto emit_row = [&](const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
      if (i) out += delim;
      out += field(fields[i]);
    }
    out += '\n';
  };
  if (t.has_headers()) emit_row(t.headers);
  std::size_t styled = 0;
  for (const auto& row : t.rows) {
    std::vector<std::string> fields;
    for (const auto& c : row) {
      fields.push_back(cell_text(c.value));
      if (!c.style.is_plain()) ++styled;
    }
    emit_row(fields);
  }
  if (styled && opts.styles)
    warnings.push_back(style_warning(delim == ',' ? "csv" : "tsv", "cell styles", styled));
  return out;
}

}  // namespace smartpaste::codec
