#pragma once

// Per-format parsers and renderers behind codec.hpp.

#include "smartpaste/codec.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace smartpaste::codec {

std::vector<StructuredTable> parse_markdown(std::string_view src);
std::string render_markdown(const StructuredTable& t, const RenderOptions& opts,
                            std::vector<std::string>& warnings);

/// RFC 4180 record splitting; throws ParseError on bad quoting.
std::vector<std::vector<std::string>> split_csv_records(std::string_view src);
std::vector<StructuredTable> parse_delimited(std::string_view src, char delim,
                                             const ParseOptions& opts);
std::string render_delimited(const StructuredTable& t, char delim, const RenderOptions& opts,
                             std::vector<std::string>& warnings);

std::vector<StructuredTable> parse_aligned(std::string_view src, const ParseOptions& opts);
std::string render_aligned(const StructuredTable& t, const RenderOptions& opts,
                           std::vector<std::string>& warnings);

std::vector<StructuredTable> parse_html(std::string_view src);
std::string render_html(const StructuredTable& t, const RenderOptions& opts);

std::vector<StructuredTable> parse_latex(std::string_view src);
/// Returns the tabular body; `packages` collects required \usepackage lines.
std::string render_latex(const StructuredTable& t, const RenderOptions& opts,
                         std::vector<std::string>& packages);

std::vector<StructuredTable> parse_rtf(std::string_view src);
std::string render_rtf(std::span<const StructuredTable> tables, const RenderOptions& opts);

/// Header decision shared by the delimited/aligned parsers: with `detect`, the
/// first row is a header when all its fields are non-empty and non-numeric.
bool first_row_is_header(const std::vector<std::string>& first, ParseOptions::Header mode);

/// Wraps rows of raw strings into a table, typing each cell lexically.
StructuredTable table_from_strings(std::vector<std::vector<std::string>> rows,
                                   ParseOptions::Header mode);

std::string style_warning(std::string_view fmt, std::string_view what, std::size_t count);

}  // namespace smartpaste::codec
