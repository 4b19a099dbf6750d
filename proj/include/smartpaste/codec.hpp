#pragma once

#include "smartpaste/clipboard.hpp"
#include "smartpaste/table.hpp"

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace smartpaste {

enum class FormatId { html_table, markdown_table, latex_tabular, csv, tsv, aligned_text, rtf_table };

std::string_view to_string(FormatId f);
/// Throws Error(UndetectableFormat) for names outside the closed set.
FormatId format_from_string(std::string_view name);
std::optional<FormatId> try_format_from_string(std::string_view name);
ContentType content_type_for(FormatId f);

/// Picks a format from payload kind, then source-app hints, then content
/// sniffing. Pure in (payload bytes, payload kind, app_name).
FormatId detect_format(const RawPayload& payload, const AppContext& source);

struct ParseOptions {
  enum class Header { detect, first_row, none };
  /// Only consulted by csv, tsv and aligned_text; the other formats mark
  /// headers structurally.
  Header header = Header::detect;
};

std::vector<StructuredTable> parse(const RawPayload& payload, FormatId fmt,
                                   const ParseOptions& opts = {});
std::vector<StructuredTable> parse_text(std::string_view content, FormatId fmt,
                                        const ParseOptions& opts = {});

struct RenderOptions {
  bool styles = true;     // false renders values only
  bool booktabs = false;  // latex: \toprule/\midrule/\bottomrule
};

struct Rendered {
  std::string text;
  ContentType content_type = ContentType::text;
  /// UnsupportedStyleWarning messages; never fatal.
  std::vector<std::string> warnings;
};

/// Deterministic: equal inputs give byte-identical text. Throws
/// Error(Render) for an empty table list or a table that breaks its own
/// invariants.
Rendered render(std::span<const StructuredTable> tables, FormatId fmt,
                const RenderOptions& opts = {});
inline Rendered render(const StructuredTable& table, FormatId fmt,
                       const RenderOptions& opts = {}) {
  return render(std::span<const StructuredTable>(&table, 1), fmt, opts);
}

enum class LoaderTarget { notebook_dataframe, r_dataframe };

/// Throws Error(UnknownTarget).
LoaderTarget loader_target_from_string(std::string_view name);
std::string_view to_string(LoaderTarget t);

/// Code that reads the csv at `temp_path` into a dataframe named `df`.
std::string emit_loader_snippet(const StructuredTable& table, LoaderTarget target,
                                const std::filesystem::path& temp_path);

}  // namespace smartpaste
