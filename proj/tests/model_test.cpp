#include "smartpaste/clipboard.hpp"
#include "smartpaste/decimal.hpp"
#include "smartpaste/error.hpp"
#include "smartpaste/table.hpp"
#include "smartpaste/text.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace smartpaste;

namespace {

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected an Error";
  return ErrorCode::Io;
}

Decimal dec(std::string_view s) { return *Decimal::parse(s); }

ClipboardSnapshot text_snapshot(std::string s, std::string app = "sim:excel") {
  ClipboardSnapshot snap;
  snap.payloads.push_back({PayloadKind::text, std::move(s), "utf-8"});
  snap.source = {std::move(app), 10, "Book1", std::nullopt};
  return snap;
}

}  // namespace

TEST(Decimal, ParseAndPrintKeepScale) {
  EXPECT_EQ(dec("1.50").to_string(), "1.50");
  EXPECT_EQ(dec("-0.0").to_string(), "0.0");
  EXPECT_EQ(dec("007").to_string(), "7");
  EXPECT_FALSE(Decimal::parse("1."));
  EXPECT_FALSE(Decimal::parse(".5"));
  EXPECT_FALSE(Decimal::parse("1e3"));
  EXPECT_EQ(dec("1.50"), dec("1.5"));
}

TEST(Decimal, Arithmetic) {
  EXPECT_EQ((dec("48") - dec("45")).to_string(), "3");
  EXPECT_EQ((dec("0.1") + dec("0.2")).to_string(), "0.3");
  EXPECT_EQ((dec("1.5") * dec("2.25")).to_string(), "3.375");
  EXPECT_EQ(Decimal::divide(dec("1"), dec("3"))->to_string(), "0.3333333333333333");
  EXPECT_EQ(Decimal::divide(dec("2"), dec("3"))->to_string(), "0.6666666666666667");
  EXPECT_EQ(Decimal::divide(dec("10"), dec("4"))->to_string(), "2.5");
  EXPECT_FALSE(Decimal::divide(dec("1"), dec("0")));
}

TEST(Decimal, RoundHalfUp) {
  EXPECT_EQ(dec("2.345").round_half_up(2).to_string(), "2.35");
  EXPECT_EQ(dec("-2.345").round_half_up(2).to_string(), "-2.35");
  EXPECT_EQ(dec("2.344").round_half_up(2).to_string(), "2.34");
  EXPECT_EQ(dec("2.3").round_half_up(2).to_string(), "2.3");
  EXPECT_EQ(dec("0.5").round_half_up(0).to_string(), "1");
}

TEST(Decimal, OrderingMatchesLongDouble) {
  std::mt19937 rng(3);
  std::uniform_int_distribution<int> d(-100000, 100000);
  std::uniform_int_distribution<int> s(0, 3);
  for (int i = 0; i < 2000; ++i) {
    Decimal a(d(rng), s(rng)), b(d(rng), s(rng));
    long double x = std::stold(a.to_string()), y = std::stold(b.to_string());
    EXPECT_EQ(a < b, x < y) << a.to_string() << " " << b.to_string();
  }
}

TEST(Table, LexicalNumbers) {
  EXPECT_TRUE(lex_number("1,234,567"));
  EXPECT_FALSE(lex_number("1234,567"));
  EXPECT_FALSE(lex_number("12,34"));
  EXPECT_TRUE(lex_number("-3.5%"));
  EXPECT_FALSE(lex_number("3 %"));
  EXPECT_FALSE(lex_number("%"));
  EXPECT_EQ(cell_text(lex_cell("+3")), "3");
  EXPECT_TRUE(is_empty(lex_cell("")));
}

TEST(Table, Colors) {
  EXPECT_EQ(normalize_color("#0f0"), "#00FF00");
  EXPECT_EQ(normalize_color("rgb(255, 0, 10)"), "#FF000A");
  EXPECT_EQ(normalize_color("Red"), "#FF0000");
  EXPECT_FALSE(normalize_color("#12345"));
  EXPECT_FALSE(normalize_color("chartreuse-ish"));
}

TEST(Table, FromRowsPadsAndNamesColumns) {
  auto t = StructuredTable::from_rows({}, {{Cell(lex_cell("1"))}, {Cell{}, Cell{}, Cell{}}});
  EXPECT_EQ(t.column_count, 3u);
  EXPECT_EQ(t.rows[0].size(), 3u);
  EXPECT_EQ(t.column_name(2), "col3");
  auto blank = StructuredTable::from_rows({"", ""}, {{Cell{}, Cell{}}});
  EXPECT_FALSE(blank.has_headers());
}

TEST(Table, JsonRoundTrip) {
  auto t = StructuredTable::from_rows({"A", "B"}, {{Cell(lex_cell("48%")), Cell(lex_cell("x"))},
                                                   {Cell{}, Cell(lex_cell("-1.50"))}});
  t.rows[0][1].style.bold = true;
  t.rows[1][0].style.bg_color = "#ABCDEF";
  t.caption = "Polls";
  EXPECT_EQ(table_from_json(to_json(t)), t);
  EXPECT_EQ(to_json(t)["rows"][0][0], Json({{"number", "48%"}}));
}

TEST(Clipboard, SimFixtureSinglePayload) {
  auto snap = parse_sim_fixture(
      R"({"source":{"app_name":"sim:excel","process_id":4,"window_title":"B"},
          "payloads":[{"kind":"text","data":"a,b\n1,2","encoding":"utf8"}]})");
  EXPECT_EQ(snap.payloads.size(), 1u);
  EXPECT_EQ(snap.source.app_name, "sim:excel");
  EXPECT_EQ(snap.payloads[0].bytes, "a,b\n1,2");
}

TEST(Clipboard, SimFixtureTwoKinds) {
  auto snap = parse_sim_fixture(
      R"({"source":{"app_name":"sim:chrome","process_id":1,"window_title":""},
          "payloads":[{"kind":"text","data":"x"},{"kind":"html","data":"<b>x</b>"}]})");
  EXPECT_EQ(snap.payloads.size(), 2u);
  EXPECT_TRUE(snap.find(PayloadKind::html));
}

TEST(Clipboard, SimFixtureErrors) {
  EXPECT_EQ(code_of([] {
              parse_sim_fixture(R"({"source":{"app_name":"a","process_id":1,"window_title":""},
                  "payloads":[{"kind":"text","data":"x"},{"kind":"text","data":"y"}]})");
            }),
            ErrorCode::DuplicateKind);
  EXPECT_EQ(code_of([] {
              parse_sim_fixture(
                  R"({"source":{"app_name":"a","process_id":1,"window_title":""},"payloads":[]})");
            }),
            ErrorCode::EmptyFixture);
  EXPECT_EQ(code_of([] { parse_sim_fixture("{not json"); }), ErrorCode::FixtureParse);
  EXPECT_EQ(code_of([] {
              parse_sim_fixture(R"({"source":{"app_name":"a","process_id":1,"window_title":""},
                  "payloads":[{"kind":"image","data":"aGVsbG8=","encoding":"base64"}]})");
            }),
            ErrorCode::FixtureParse);
}

TEST(Clipboard, FixtureEncodingIsByteExact) {
  std::mt19937 rng(11);
  for (int i = 0; i < 200; ++i) {
    ClipboardSnapshot snap;
    std::string bytes;
    std::size_t n = rng() % 64;
    for (std::size_t k = 0; k < n; ++k) bytes += static_cast<char>(rng() % 256);
    if (i % 2) {
      snap.payloads.push_back({PayloadKind::image, "\x89PNG\r\n\x1a\n" + bytes, "binary"});
    } else {
      std::string s = "t\xC3\xA9xt " + std::to_string(i);
      snap.payloads.push_back({PayloadKind::text, s, "utf-8"});
    }
    snap.source = {"sim:x", 1, "w", std::nullopt};
    auto back = parse_sim_fixture(encode_sim_fixture(snap).dump());
    ASSERT_EQ(back.payloads[0].bytes, snap.payloads[0].bytes);
    ASSERT_EQ(back.source, snap.source);
  }
}

TEST(Clipboard, PayloadValidation) {
  EXPECT_EQ(code_of([] { RawPayload{PayloadKind::text, "\xC3\x28", "utf-8"}.validate(); }),
            ErrorCode::InvalidPayload);
  EXPECT_NO_THROW((RawPayload{PayloadKind::image, "\xFF\xD8\xFF\xE0", "binary"}.validate()));
}

TEST(Context, NewContextIsEmptyAndIndependent) {
  auto snap = text_snapshot("a,b\n1,2");
  auto a = new_context(snap);
  auto b = new_context(snap);
  EXPECT_EQ(a.transformations.size(), 0u);
  EXPECT_FALSE(a.destination);
  a.transformations.put("t1", TransformResult::of_text("x", ContentType::text));
  a.metadata["k"] = 1;
  EXPECT_TRUE(b.transformations.empty());
  EXPECT_TRUE(b.metadata.empty());
}

TEST(Context, ImageBytesRetained) {
  ClipboardSnapshot snap;
  std::string png = std::string("\x89PNG\r\n\x1a\n", 8) + std::string("\0\1\2", 3);
  snap.payloads.push_back({PayloadKind::image, png, "binary"});
  auto ctx = new_context(snap);
  EXPECT_EQ(ctx.snapshot.payloads[0].bytes, png);
}

TEST(Context, AttachDestination) {
  auto ctx = new_context(text_snapshot("a"));
  ctx.transformations.put("t1", TransformResult::of_text("x", ContentType::text));
  AppContext dest{"sim:overleaf", 2, "", std::nullopt};
  auto out = attach_destination(ctx, dest, "make it latex");
  EXPECT_EQ(out.destination->app_name, "sim:overleaf");
  EXPECT_TRUE(out.transformations.find("t1"));
  EXPECT_EQ(out.instruction, "make it latex");
  EXPECT_FALSE(attach_destination(ctx, dest, "").instruction);
  auto twice = attach_destination(out, dest, "make it latex");
  EXPECT_EQ(context_view(twice), context_view(out));
}

TEST(Context, OrderedTransformations) {
  OrderedMap<int> m;
  EXPECT_FALSE(m.put("b", 1));
  EXPECT_FALSE(m.put("a", 2));
  EXPECT_TRUE(m.put("b", 3));
  EXPECT_EQ(m.keys(), (std::vector<std::string>{"b", "a"}));
  EXPECT_EQ(*m.find("b"), 3);
}

TEST(Adapters, SimulatedDestinationAndClipboard) {
  SimulatedDestination dest;
  AppContext app{"sim:md", 1, "", std::nullopt};
  dest.deliver(app, "x", ContentType::text);
  dest.set_down("sim:md", true);
  EXPECT_EQ(code_of([&] { dest.deliver(app, "y", ContentType::text); }), ErrorCode::Delivery);
  EXPECT_EQ(dest.deliveries().size(), 1u);

  SimulatedClipboard clip;
  EXPECT_FALSE(clip.capture());
  clip.load(text_snapshot("a"));
  EXPECT_EQ(clip.capture()->payloads[0].bytes, "a");
  clip.set_available(false);
  EXPECT_EQ(code_of([&] { clip.write({PayloadKind::text, "z", "utf-8"}); }), ErrorCode::Delivery);
}

TEST(Text, Utf8Helpers) {
  std::string s = "a\xC3\xA9\xE4\xB8\xAD";
  EXPECT_EQ(text::utf8_length(s), 3u);
  EXPECT_EQ(text::utf8_prefix_bytes(s, 2), 3u);
  EXPECT_FALSE(text::is_valid_utf8("\xED\xA0\x80"));  // surrogate
  EXPECT_FALSE(text::is_valid_utf8("\xC0\xAF"));      // overlong
  EXPECT_EQ(text::base64_decode(text::base64_encode(s)), s);
  EXPECT_FALSE(text::base64_decode("a$=="));
}
