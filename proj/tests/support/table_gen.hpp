#pragma once

// Random tables for property tests and the acceptance run.

#include "smartpaste/table.hpp"

#include <ostream>
#include <random>
#include <string>
#include <vector>

namespace smartpaste {

inline void PrintTo(const StructuredTable& t, std::ostream* os) { *os << to_json(t).dump(); }
inline void PrintTo(const Cell& c, std::ostream* os) {
  *os << to_json(c.value).dump() << to_json(c.style).dump();
}
inline void PrintTo(const CellValue& v, std::ostream* os) { *os << to_json(v).dump(); }

}  // namespace smartpaste

namespace smartpaste::testing {

inline const std::vector<std::string>& word_pool() {
  static const std::vector<std::string> kWords{
      "alpha", "Beta",  "x",     "N/A",  "a&b",     "50% off", "$5", "#1",    "snake_case",
      "{x}",   "~tilde", "a^2",  "back\\slash", "pipe|bar", "<tag>", "**", "_", "a*b",
      "\"quoted\"", "it's", "a,b", "semi;colon", "[note]", "caf\xC3\xA9", "\xE4\xB8\xAD\xE6\x96\x87",
      "-", "--", "1.2.3", "1e5", "x1", "ten", "Gold", "&amp;", "\\\\", "end}"};
  return kWords;
}

struct GenOptions {
  bool always_headers = false;
  bool allow_headers = true;
  bool styles = false;
  std::size_t max_cols = 6;
  std::size_t max_rows = 8;
};

class TableGen {
 public:
  explicit TableGen(std::uint64_t seed) : rng_(seed) {}

  std::size_t uniform(std::size_t lo, std::size_t hi) {
    return std::uniform_int_distribution<std::size_t>(lo, hi)(rng_);
  }
  bool coin(double p = 0.5) { return std::bernoulli_distribution(p)(rng_); }

  std::string text() {
    const auto& pool = word_pool();
    std::string out = pool[uniform(0, pool.size() - 1)];
    std::size_t extra = uniform(0, 2);
    for (std::size_t i = 0; i < extra; ++i) out += " " + pool[uniform(0, pool.size() - 1)];
    if (lex_number(out)) out += " x";
    return out;
  }

  std::string number_text() {
    std::string s;
    if (coin(0.3)) s += '-';
    s += std::to_string(uniform(0, coin(0.2) ? 999999 : 99));
    if (coin(0.4)) {
      s += '.';
      std::size_t places = uniform(1, 3);
      for (std::size_t i = 0; i < places; ++i) s += static_cast<char>('0' + uniform(0, 9));
    }
    if (coin(0.15)) s += '%';
    return s;
  }

  CellValue value() {
    switch (uniform(0, 5)) {
      case 0: return std::monostate{};
      case 1:
      case 2: return lex_cell(number_text());
      default: return text();
    }
  }

  std::string color() {
    static constexpr char kHex[] = "0123456789ABCDEF";
    std::string c = "#";
    for (int i = 0; i < 6; ++i) c += kHex[uniform(0, 15)];
    return c;
  }

  CellStyle style() {
    CellStyle s;
    if (!coin(0.5)) return s;
    s.bold = coin(0.4);
    s.italic = coin(0.3);
    if (coin(0.4)) s.bg_color = color();
    if (coin(0.3)) s.fg_color = color();
    return s;
  }

  StructuredTable table(const GenOptions& opts = {}) {
    std::size_t cols = uniform(1, opts.max_cols);
    std::size_t rows = uniform(1, opts.max_rows);
    std::vector<std::string> headers;
    if (opts.always_headers || (opts.allow_headers && coin(0.7))) {
      for (std::size_t c = 0; c < cols; ++c) headers.push_back(text() + " " + std::to_string(c + 1));
    }
    std::vector<std::vector<Cell>> grid;
    for (std::size_t r = 0; r < rows; ++r) {
      std::vector<Cell> row;
      for (std::size_t c = 0; c < cols; ++c)
        row.emplace_back(value(), opts.styles ? style() : CellStyle{});
      grid.push_back(std::move(row));
    }
    return StructuredTable::from_rows(std::move(headers), std::move(grid));
  }

  std::mt19937_64& rng() { return rng_; }

 private:
  std::mt19937_64 rng_;
};

}  // namespace smartpaste::testing
