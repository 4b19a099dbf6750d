#pragma once

#include "smartpaste/decimal.hpp"

#include "smartpaste/json.hpp"

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace smartpaste {

/// A lexically numeric cell. `percent` records a trailing "%" so it can be
/// written back; arithmetic ignores it.
struct Number {
  Decimal value;
  bool percent = false;

  friend bool operator==(const Number&, const Number&) = default;
};

using CellValue = std::variant<std::monostate, Number, std::string>;

inline bool is_empty(const CellValue& v) { return std::holds_alternative<std::monostate>(v); }
inline const Number* as_number(const CellValue& v) { return std::get_if<Number>(&v); }
inline const std::string* as_text(const CellValue& v) { return std::get_if<std::string>(&v); }

/// Strict lexical number rule: optional sign, digits (optionally grouped by
/// thousands commas), optional fraction, optional trailing "%".
std::optional<Number> lex_number(std::string_view text);

/// Types raw cell text: "" is empty, numbers become Number, the rest is text.
CellValue lex_cell(std::string_view text);

/// Canonical text of a value: numbers keep their scale and percent sign.
std::string cell_text(const CellValue& v);

/// "#RGB", "#RRGGBB", "rgb(r,g,b)" and a handful of CSS names, returned as
/// uppercase "#RRGGBB". nullopt for anything else.
std::optional<std::string> normalize_color(std::string_view text);

struct CellStyle {
  bool bold = false;
  bool italic = false;
  std::optional<std::string> bg_color;
  std::optional<std::string> fg_color;

  bool is_plain() const { return !bold && !italic && !bg_color && !fg_color; }
  friend bool operator==(const CellStyle&, const CellStyle&) = default;
};

struct Span {
  int rowspan = 1;
  int colspan = 1;
  friend bool operator==(const Span&, const Span&) = default;
};

struct GridPos {
  std::size_t row = 0;
  std::size_t col = 0;
  friend bool operator==(const GridPos&, const GridPos&) = default;
};

/// A grid cell. Spanning cells are normalized by duplication: the origin
/// carries `span`, every covered position carries a copy of the value and
/// style plus `covered_by` pointing at the origin.
struct Cell {
  CellValue value;
  CellStyle style;
  Span span;
  std::optional<GridPos> covered_by;

  Cell() = default;
  Cell(CellValue v) : value(std::move(v)) {}  // NOLINT(google-explicit-constructor)
  Cell(CellValue v, CellStyle s) : value(std::move(v)), style(std::move(s)) {}

  friend bool operator==(const Cell&, const Cell&) = default;
};

struct StructuredTable {
  std::vector<std::string> headers;  // empty when headerless
  std::vector<std::vector<Cell>> rows;
  std::size_t column_count = 1;
  std::optional<std::string> caption;

  bool has_headers() const { return !headers.empty(); }
  std::size_t row_count() const { return rows.size(); }

  /// Header text, or "col<i>" (1-based) for headerless tables.
  std::string column_name(std::size_t index) const;

  /// Builds a rectangular table, padding short rows (and headers) with empty
  /// cells. An all-empty header row is treated as no header.
  static StructuredTable from_rows(std::vector<std::string> headers,
                                   std::vector<std::vector<Cell>> rows);

  /// Throws Error(Parse) when the rectangular/header invariants do not hold.
  void validate() const;

  bool has_spans() const;
  /// True when every span record points at a real origin whose extent covers
  /// it; renderers fall back to flat output otherwise.
  bool spans_consistent() const;
  /// Drops span records, keeping the duplicated values.
  void flatten_spans();

  friend bool operator==(const StructuredTable&, const StructuredTable&) = default;
};

Json to_json(const CellValue& v);
Json to_json(const CellStyle& s);
Json to_json(const StructuredTable& t);
StructuredTable table_from_json(const Json& j);

}  // namespace smartpaste
