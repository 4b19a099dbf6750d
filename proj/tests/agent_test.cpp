#include "smartpaste/agent.hpp"
#include "smartpaste/plan.hpp"
#include "smartpaste/text.hpp"
#include "support/table_gen.hpp"

#include <gtest/gtest.h>
#include <httplib.h>

#include <fstream>
#include <map>
#include <set>
#include <thread>

using namespace smartpaste;
using namespace smartpaste::agent;

namespace {

RawPayload payload(PayloadKind k, std::string bytes) { return RawPayload{k, std::move(bytes), "utf-8"}; }

ClipboardSnapshot snapshot(std::vector<RawPayload> payloads, std::string app = "sim:chrome") {
  ClipboardSnapshot s;
  s.payloads = std::move(payloads);
  s.source = AppContext{std::move(app), 100, "Results", std::nullopt};
  return s;
}

AppContext app(std::string name) { return AppContext{std::move(name), 200, "doc", std::nullopt}; }

// 5 columns x 20 rows, a few styled cells.
StructuredTable ballot() {
  std::vector<std::vector<Cell>> rows;
  for (int i = 0; i < 20; ++i) {
    CellStyle s;
    if (i % 7 == 0) s.bg_color = "#FFD700";
    rows.push_back({Cell(CellValue("Cand " + std::to_string(i + 1)), s),
                    Cell(CellValue(i % 2 ? "Left" : "Right")),
                    Cell(lex_cell(std::to_string(1000 + 37 * i))),
                    Cell(lex_cell(std::to_string(i) + ".5%")),
                    Cell(CellValue(i == 3 ? "recount" : ""))});
  }
  return StructuredTable::from_rows({"Candidate", "Party", "Votes", "Share", "Notes"}, std::move(rows));
}

ContextObject html_context(const StructuredTable& t, std::optional<std::string> dest = "sim:overleaf",
                           std::optional<std::string> instruction = std::nullopt) {
  auto ctx = new_context(snapshot({payload(PayloadKind::html, render(t, FormatId::html_table).text),
                                   payload(PayloadKind::text, render(t, FormatId::tsv).text)}));
  if (dest) ctx = attach_destination(std::move(ctx), app(*dest), instruction);
  return ctx;
}

ToolCall call(std::string tool, Json args, std::string id = "c") {
  return ToolCall{std::move(id), std::move(tool), std::move(args)};
}

struct TempDir {
  std::filesystem::path path;
  TempDir() {
    static int n = 0;
    path = std::filesystem::temp_directory_path() /
           ("smartpaste-agent-" + std::to_string(::getpid()) + "-" + std::to_string(n++));
    std::filesystem::remove_all(path);
  }
  ~TempDir() { std::filesystem::remove_all(path); }
};

class FakePlugins : public PluginGateway {
 public:
  std::map<std::string, std::vector<std::string>> registered;
  std::optional<ErrorCode> fail_with;
  std::vector<Json> calls;

  std::vector<std::string> apis(const std::string& app_name) override {
    auto it = registered.find(app_name);
    return it == registered.end() ? std::vector<std::string>{} : it->second;
  }
  Json invoke(const std::string& app_name, const std::string& api, const Json& args) override {
    if (fail_with) throw Error(*fail_with, "plugin for " + app_name + " failed");
    calls.push_back({{"app", app_name}, {"api", api}, {"args", args}});
    return Json{{"ok", true}};
  }
};

struct Harness {
  SimulatedDestination destination;
  SimulatedClipboard clipboard;
  FakePlugins plugins;
  TempDir temp;
  ToolEnv env(bool with_plugins = false) {
    return ToolEnv{&destination, &clipboard, with_plugins ? &plugins : nullptr, temp.path, "job-7"};
  }
};

Json tool_call_json(std::string tool, Json args, std::string id) {
  return Json{{"id", std::move(id)}, {"tool", std::move(tool)}, {"args", std::move(args)}};
}

Json calls(std::initializer_list<Json> list) {
  Json arr = Json::array();
  for (const auto& c : list) arr.push_back(c);
  return Json{{"tool_calls", std::move(arr)}};
}

// summary -> structured -> plan -> render -> paste -> final text
std::vector<Json> happy_script(const std::string& plan = "drop_cols [4, 5]") {
  return {calls({tool_call_json("get_clipboard_summary", Json::object(), "1")}),
          calls({tool_call_json("add_structured_data", {{"format", "html_table"}}, "2")}),
          calls({tool_call_json("add_transformation", {{"key", "t1"}, {"plan", plan}}, "3"),
                 tool_call_json("add_transformation",
                                {{"key", "out"}, {"render", {{"fmt", "latex_tabular"}, {"source_key", "t1"}}}},
                                "4")}),
          calls({tool_call_json("paste_to_destination", {{"key", "out"}, {"content_type", "text"}}, "5")}),
          Json{{"text", "Pasted the table without Share and Notes."}}};
}

// Skips the "% \\usepackage" preamble comments the latex renderer may emit.
std::string body_of(const std::string& latex) {
  std::size_t at = 0;
  while (latex.compare(at, 1, "%") == 0) at = latex.find('\n', at) + 1;
  return latex.substr(at);
}

}  // namespace

// --- registry and schemas -------------------------------------------------------------

TEST(Registry, EightToolsRoundTripNames) {
  EXPECT_EQ(all_tools().size(), 8u);
  std::set<std::string> names;
  for (auto t : all_tools()) {
    names.insert(std::string(to_string(t)));
    EXPECT_EQ(tool_from_string(to_string(t)), t);
  }
  EXPECT_EQ(names.size(), 8u);
  EXPECT_FALSE(tool_from_string("runPythonCode"));
  ASSERT_EQ(tool_schemas().size(), 8u);
  for (const auto& s : tool_schemas()) {
    EXPECT_TRUE(names.count(s["name"].get<std::string>()));
    EXPECT_EQ(s["parameters"]["type"], "object");
  }
}

TEST(Registry, ValidatesArgs) {
  EXPECT_FALSE(validate_args(ToolId::get_clipboard_summary, Json::object()));
  EXPECT_TRUE(validate_args(ToolId::get_clipboard_summary, {{"x", 1}}));
  EXPECT_FALSE(validate_args(ToolId::add_structured_data, {{"format", "csv"}, {"options", {{"header", "none"}}}}));
  EXPECT_EQ(*validate_args(ToolId::add_structured_data, Json::object()), "args.format: required");
  EXPECT_TRUE(validate_args(ToolId::add_structured_data, {{"format", "xlsx"}}));
  EXPECT_TRUE(validate_args(ToolId::add_structured_data, {{"format", "csv"}, {"options", {{"header", "yes"}}}}));
  EXPECT_EQ(*validate_args(ToolId::add_metadata, {{"key", 3}, {"extractor", "spans"}}), "args.key: expected string");
  EXPECT_TRUE(validate_args(ToolId::add_metadata, {{"key", ""}, {"extractor", "spans"}}));
  EXPECT_TRUE(validate_args(ToolId::sample_context, {{"path", "raw"}, {"range", {{"from", 0}, {"to", 3}}}}));
  EXPECT_FALSE(validate_args(ToolId::sample_context, {{"path", "raw"}, {"range", {{"from", 1}, {"to", 3}}}}));
  EXPECT_TRUE(validate_args(ToolId::add_transformation, {{"key", "a"}}));
  EXPECT_TRUE(validate_args(ToolId::add_transformation,
                            {{"key", "a"}, {"plan", "dedupe"}, {"render", {{"fmt", "csv"}}}}));
  EXPECT_FALSE(validate_args(ToolId::add_transformation, {{"key", "a"}, {"render", {{"fmt", "csv"}}}}));
  EXPECT_TRUE(validate_args(ToolId::add_transformation, {{"key", "a"}, {"render", {{"fmt", "png"}}}}));
  EXPECT_TRUE(validate_args(ToolId::paste_to_destination, {{"key", "a"}, {"content_type", "pdf"}}));
  EXPECT_TRUE(validate_args(ToolId::write_temp_file, {{"key", "a"}}));
  EXPECT_TRUE(validate_args(ToolId::run_query, {{"plan", "dedupe"}, {"mode", "max"}}));
}

TEST(Registry, InvalidCallsNeverExecute) {
  // Mutate valid calls into invalid ones and check the context never moves.
  Harness h;
  auto ctx = html_context(ballot());
  Toolbox box(h.env());
  ASSERT_TRUE(box.execute(ctx, call("add_structured_data", {{"format", "html_table"}})).ok);
  ASSERT_TRUE(box.execute(ctx, call("add_transformation", {{"key", "t1"}, {"plan", "dedupe"}})).ok);
  const Json before = context_view(ctx);

  std::vector<ToolCall> valid{
      call("add_structured_data", {{"format", "tsv"}}),
      call("add_metadata", {{"key", "m"}, {"extractor", "cell_styles"}}),
      call("add_transformation", {{"key", "t2"}, {"plan", "drop_cols [1]"}}),
      call("run_query", {{"plan", "filter col(\"Votes\") > 1000"}, {"mode", "count"}}),
      call("write_temp_file", {{"key", "t1"}, {"ext", "csv"}}),
      call("paste_to_destination", {{"key", "t1"}, {"content_type", "text"}}),
  };
  smartpaste::testing::TableGen gen(11);
  int checked = 0;
  for (int round = 0; round < 300; ++round) {
    ToolCall c = valid[gen.uniform(0, valid.size() - 1)];
    switch (gen.uniform(0, 3)) {
      case 0: c.args["unexpected"] = 1; break;
      case 1: c.args.erase(c.args.begin().key()); break;
      case 2: c.args[c.args.begin().key()] = Json::array({1, 2}); break;
      default: c.tool += "_x"; break;
    }
    auto r = box.execute(ctx, c);
    EXPECT_FALSE(r.ok);
    EXPECT_FALSE(r.executed);
    EXPECT_EQ(r.error.rfind("ToolArgsError: ", 0), 0u) << r.error;
    ++checked;
  }
  EXPECT_EQ(checked, 300);
  EXPECT_EQ(context_view(ctx), before);
  EXPECT_TRUE(h.destination.deliveries().empty());
  EXPECT_FALSE(std::filesystem::exists(h.temp.path));
}

// --- get_clipboard_summary ---------------------------------------------------------------

namespace {

std::string sample_of(const std::string& summary) {
  auto at = summary.find("):\n");
  return at == std::string::npos ? "" : summary.substr(at + 3);
}

}  // namespace

class Truncation : public ::testing::TestWithParam<std::size_t> {};

TEST_P(Truncation, SampleIsCutAtTenThousandChars) {
  std::size_t n = GetParam();
  // Mix one- and three-byte characters so byte and character counts differ.
  std::string body;
  for (std::size_t i = 0; i < n; ++i) body += i % 3 == 0 ? "\xE4\xB8\xAD" : "a";
  auto ctx = new_context(snapshot({payload(PayloadKind::text, body)}));
  auto s = raw_sample(ctx.snapshot);
  std::string sample = sample_of(clipboard_summary(ctx));
  EXPECT_EQ(sample, s.text);
  const std::string marker(kTruncatedMarker);
  if (n <= 10000) {
    EXPECT_FALSE(s.truncated);
    EXPECT_EQ(s.text, body);
    EXPECT_EQ(text::utf8_length(s.text), n);
  } else {
    EXPECT_TRUE(s.truncated);
    ASSERT_GT(s.text.size(), marker.size());
    EXPECT_EQ(s.text.substr(s.text.size() - marker.size()), marker);
    std::string kept = s.text.substr(0, s.text.size() - marker.size());
    EXPECT_EQ(text::utf8_length(kept), 10000u);
    EXPECT_EQ(body.rfind(kept, 0), 0u);
  }
}

INSTANTIATE_TEST_SUITE_P(Boundaries, Truncation, ::testing::Values(100, 9999, 10000, 10001, 15000));

TEST(Summary, Lines) {
  auto ctx = new_context(snapshot({payload(PayloadKind::text, "a\tb\n1\t2\n")}, "sim:excel"));
  auto s = clipboard_summary(ctx);
  EXPECT_NE(s.find("payloads: text\n"), std::string::npos);
  EXPECT_NE(s.find("source: sim:excel"), std::string::npos);
  EXPECT_EQ(s.find("destination:"), std::string::npos);
  EXPECT_EQ(s.find("instruction:"), std::string::npos);
  EXPECT_NE(s.find("detected format: tsv"), std::string::npos);

  ctx = attach_destination(std::move(ctx), app("sim:jupyter"), "load it");
  s = clipboard_summary(ctx);
  EXPECT_NE(s.find("destination: sim:jupyter\n"), std::string::npos);
  EXPECT_NE(s.find("instruction: load it\n"), std::string::npos);
}

TEST(Summary, PrefersHtmlSampleAndCapsFifteenThousand) {
  std::string html = "<table><tr><td>" + std::string(15000, 'x') + "</td></tr></table>";
  auto ctx = new_context(snapshot({payload(PayloadKind::text, "x"), payload(PayloadKind::html, html)}));
  auto s = raw_sample(ctx.snapshot);
  EXPECT_EQ(s.kind, "html");
  EXPECT_TRUE(s.truncated);
  EXPECT_LE(text::utf8_length(s.text), 10000 + text::utf8_length(kTruncatedMarker));
}

// --- add_structured_data / add_metadata -----------------------------------------------------

TEST(StructuredData, HtmlBallot) {
  Harness h;
  auto ctx = html_context(ballot());
  Toolbox box(h.env());
  auto r = box.execute(ctx, call("add_structured_data", {{"format", "html_table"}}));
  ASSERT_TRUE(r.ok) << r.error;
  EXPECT_EQ(r.result["summary"], "1 table, 5 cols \xC3\x97 20 rows");
  EXPECT_EQ(r.result["tables"][0]["headers"], Json({"Candidate", "Party", "Votes", "Share", "Notes"}));
  EXPECT_FALSE(r.result.contains("rows_data"));
  ASSERT_EQ(ctx.structured.size(), 1u);
  EXPECT_EQ(ctx.structured[0].row_count(), 20u);
}

TEST(StructuredData, MismatchAndAuto) {
  Harness h;
  auto ctx = new_context(snapshot({payload(PayloadKind::text, "a,b\n1,2\n")}));
  Toolbox box(h.env());
  auto r = box.execute(ctx, call("add_structured_data", {{"format", "html_table"}}));
  EXPECT_FALSE(r.ok);
  EXPECT_NE(r.error.find("format/payload mismatch"), std::string::npos);
  EXPECT_FALSE(ctx.has_structured());

  r = box.execute(ctx, call("add_structured_data", {{"format", "auto"}}));
  ASSERT_TRUE(r.ok) << r.error;
  EXPECT_EQ(r.result["format"], "csv");
  EXPECT_EQ(r.result["summary"], "1 table, 2 cols \xC3\x97 1 rows");
}

TEST(StructuredData, MultiTableEnumerates) {
  Harness h;
  std::string html = "<table><tr><th>A</th></tr><tr><td>1</td></tr></table>"
                     "<p>between</p>"
                     "<table><tr><th>A</th><th>B</th></tr><tr><td>1</td><td>2</td></tr><tr><td>3</td><td>4</td></tr></table>";
  auto ctx = new_context(snapshot({payload(PayloadKind::html, html)}));
  Toolbox box(h.env());
  auto r = box.execute(ctx, call("add_structured_data", {{"format", "html_table"}}));
  ASSERT_TRUE(r.ok) << r.error;
  EXPECT_EQ(r.result["summary"], "2 tables, 1 cols \xC3\x97 1 rows; 2 cols \xC3\x97 2 rows");
  EXPECT_EQ(r.result["tables"].size(), 2u);
}

TEST(StructuredData, ParseErrorIsToolError) {
  Harness h;
  auto ctx = new_context(snapshot({payload(PayloadKind::text, "just a sentence")}));
  Toolbox box(h.env());
  auto r = box.execute(ctx, call("add_structured_data", {{"format", "latex_tabular"}}));
  EXPECT_FALSE(r.ok);
  EXPECT_TRUE(r.executed);
  EXPECT_FALSE(ctx.has_structured());
}

TEST(Metadata, CellStylesMatchStyledCellCount) {
  smartpaste::testing::TableGen gen(5);
  for (int i = 0; i < 200; ++i) {
    Harness h;
    auto t = gen.table({.always_headers = true, .styles = true});
    auto ctx = html_context(t);
    Toolbox box(h.env());
    ASSERT_TRUE(box.execute(ctx, call("add_structured_data", {{"format", "html_table"}})).ok);
    auto r = box.execute(ctx, call("add_metadata", {{"key", "styles"}, {"extractor", "cell_styles"}}));
    ASSERT_TRUE(r.ok) << r.error;
    // Oracle: scan the parsed grid directly.
    std::size_t styled = 0;
    for (const auto& row : ctx.structured[0].rows)
      for (const auto& cell : row) styled += cell.style.is_plain() ? 0 : 1;
    EXPECT_EQ(r.result["entries"], styled);
    EXPECT_EQ(ctx.metadata["styles"].size(), styled);
    for (const auto& e : ctx.metadata["styles"]) {
      const Cell& cell = ctx.structured[0].rows[e["row"].get<std::size_t>()][e["col"].get<std::size_t>()];
      EXPECT_EQ(e["style"], to_json(cell.style));
    }
  }
}

TEST(Metadata, EmptyReplacedAndMissing) {
  Harness h;
  auto plain = StructuredTable::from_rows({"a"}, {{Cell(CellValue("x"))}});
  auto ctx = html_context(plain);
  Toolbox box(h.env());
  auto r = box.execute(ctx, call("add_metadata", {{"key", "m"}, {"extractor", "cell_styles"}}));
  EXPECT_FALSE(r.ok);
  EXPECT_EQ(r.error.rfind("MissingStructuredData", 0), 0u);

  ASSERT_TRUE(box.execute(ctx, call("add_structured_data", {{"format", "html_table"}})).ok);
  r = box.execute(ctx, call("add_metadata", {{"key", "m"}, {"extractor", "cell_styles"}}));
  ASSERT_TRUE(r.ok);
  EXPECT_EQ(ctx.metadata["m"], Json::array());
  EXPECT_EQ(r.result["replaced"], false);
  r = box.execute(ctx, call("add_metadata", {{"key", "m"}, {"extractor", "caption"}}));
  EXPECT_EQ(r.result["replaced"], true);
  EXPECT_EQ(ctx.metadata["m"], Json::array({nullptr}));
}

TEST(Metadata, SpansListOrigins) {
  Harness h;
  std::string html = "<table><tr><th>A</th><th>B</th></tr>"
                     "<tr><td rowspan=\"2\">x</td><td>1</td></tr><tr><td>2</td></tr></table>";
  auto ctx = new_context(snapshot({payload(PayloadKind::html, html)}));
  Toolbox box(h.env());
  ASSERT_TRUE(box.execute(ctx, call("add_structured_data", {{"format", "html_table"}})).ok);
  auto r = box.execute(ctx, call("add_metadata", {{"key", "spans"}, {"extractor", "spans"}}));
  ASSERT_TRUE(r.ok);
  EXPECT_EQ(ctx.metadata["spans"],
            Json::array({Json{{"table", 0}, {"row", 0}, {"col", 0}, {"rowspan", 2}, {"colspan", 1}}}));
}

// --- sample_context -------------------------------------------------------------------------

TEST(Sample, RowsRangeHeadersAndBadPath) {
  Harness h;
  auto ctx = html_context(ballot());
  Toolbox box(h.env());
  auto r = box.execute(ctx, call("sample_context", {{"path", "transformations.t1"}}));
  EXPECT_FALSE(r.ok);
  EXPECT_EQ(r.error, "BadPath: no 't1' under transformations; available: []");

  ASSERT_TRUE(box.execute(ctx, call("add_structured_data", {{"format", "html_table"}})).ok);
  r = box.execute(ctx, call("sample_context", {{"path", "structured[0].rows"}, {"range", {{"from", 1}, {"to", 3}}}}));
  ASSERT_TRUE(r.ok) << r.error;
  EXPECT_EQ(r.result["value"].size(), 3u);
  EXPECT_EQ(r.result["value"][0][0], "Cand 1");
  EXPECT_EQ(r.result["value"][2][0], "Cand 3");

  r = box.execute(ctx, call("sample_context", {{"path", "structured[0].headers"}}));
  EXPECT_EQ(r.result["value"], Json({"Candidate", "Party", "Votes", "Share", "Notes"}));
  r = box.execute(ctx, call("sample_context", {{"path", "structured.0.column_count"}}));
  EXPECT_EQ(r.result["value"], 5);

  r = box.execute(ctx, call("sample_context", {{"path", "structured[3]"}}));
  EXPECT_EQ(r.error, "BadPath: no [3] under structured; available: [0..0]");
  r = box.execute(ctx, call("sample_context", {{"path", "source"}}));
  EXPECT_EQ(r.error, "BadPath: no 'source' under context; available: [raw, structured, metadata, transformations]");
  r = box.execute(ctx, call("sample_context", {{"path", "raw["}}));
  EXPECT_EQ(r.error.rfind("BadPath", 0), 0u);
}

TEST(Sample, CapsRowsAndChars) {
  Harness h;
  std::vector<std::vector<Cell>> rows;
  for (int i = 0; i < 400; ++i) rows.push_back({Cell(lex_cell(std::to_string(i)))});
  auto ctx = html_context(StructuredTable::from_rows({"n"}, std::move(rows)));
  Toolbox box(h.env());
  ASSERT_TRUE(box.execute(ctx, call("add_structured_data", {{"format", "html_table"}})).ok);
  auto r = box.execute(ctx, call("sample_context", {{"path", "structured[0].rows"}}));
  EXPECT_EQ(r.result["value"].size(), 50u);
  EXPECT_EQ(r.result["total"], 400);
  EXPECT_TRUE(r.result["truncated"].get<bool>());

  r = box.execute(ctx, call("sample_context", {{"path", "raw.html"}}));
  ASSERT_TRUE(r.ok);
  std::string v = r.result["value"];
  EXPECT_TRUE(r.result["truncated"].get<bool>());
  EXPECT_EQ(text::utf8_length(v), 4000 + text::utf8_length(kTruncatedMarker));
}

// --- add_transformation / run_query ------------------------------------------------------------

TEST(Transformation, PlanRenderAndErrors) {
  Harness h;
  auto ctx = html_context(ballot());
  Toolbox box(h.env());
  auto r = box.execute(ctx, call("add_transformation", {{"key", "t1"}, {"plan", "drop_cols [4, 5]"}}));
  EXPECT_EQ(r.error.rfind("MissingStructuredData", 0), 0u);
  ASSERT_TRUE(box.execute(ctx, call("add_structured_data", {{"format", "html_table"}})).ok);

  r = box.execute(ctx, call("add_transformation", {{"key", "t1"}, {"plan", "drop_cols [4, 5]"}}));
  ASSERT_TRUE(r.ok) << r.error;
  EXPECT_EQ(r.result["shape"], "3 cols \xC3\x97 20 rows");
  EXPECT_EQ(ctx.transformations.find("t1")->table->column_count, 3u);

  r = box.execute(ctx, call("add_transformation",
                            {{"key", "tex"}, {"render", {{"fmt", "latex_tabular"}, {"source_key", "t1"}}}}));
  ASSERT_TRUE(r.ok) << r.error;
  const auto* tex = ctx.transformations.find("tex");
  EXPECT_EQ(tex->kind, TransformResult::Kind::rendered_text);
  EXPECT_EQ(body_of(*tex->text).rfind("\\begin{tabular}", 0), 0u);

  r = box.execute(ctx, call("add_transformation", {{"key", "bad"}, {"plan", "drop_cols [9]"}}));
  EXPECT_EQ(r.error, "UnknownColumn: unknown column 9 (available: 1..5 [Candidate, Party, Votes, Share, Notes])");
  r = box.execute(ctx, call("add_transformation", {{"key", "bad"}, {"plan", "drop_colz [1]"}}));
  EXPECT_EQ(r.error.rfind("PlanSyntaxError: plan syntax error at 1:1", 0), 0u) << r.error;
  r = box.execute(ctx, call("add_transformation", {{"key", "bad"}, {"plan", "dedupe"}, {"source_key", "tex"}}));
  EXPECT_EQ(r.error, "ToolArgsError: 'tex' is rendered_text, not a table");
  r = box.execute(ctx, call("add_transformation", {{"key", "bad"}, {"plan", "dedupe"}, {"source_key", "nope"}}));
  EXPECT_EQ(r.error, "UnknownKey: no transformation 'nope' (have: [t1, tex])");
  EXPECT_FALSE(ctx.transformations.find("bad"));
}

TEST(Transformation, SevenColumnProbe) {
  Harness h;
  std::vector<std::vector<Cell>> rows{{Cell(lex_cell("1")), Cell(lex_cell("2")), Cell(lex_cell("3")),
                                       Cell(lex_cell("4")), Cell(lex_cell("5")), Cell(lex_cell("6")),
                                       Cell(lex_cell("7"))}};
  auto ctx = html_context(StructuredTable::from_rows({"a", "b", "c", "d", "e", "f", "g"}, std::move(rows)));
  Toolbox box(h.env());
  ASSERT_TRUE(box.execute(ctx, call("add_structured_data", {{"format", "html_table"}})).ok);
  auto before = context_view(ctx);
  auto r = box.execute(ctx, call("add_transformation", {{"key", "t"}, {"plan", "drop_cols [8, 9]"}}));
  EXPECT_EQ(r.error.rfind("UnknownColumn: unknown column 8 (available: 1..7", 0), 0u) << r.error;
  EXPECT_EQ(context_view(ctx), before);
}

TEST(Transformation, LoaderNeedsCsvTempFile) {
  Harness h;
  auto ctx = html_context(ballot(), "sim:jupyter");
  Toolbox box(h.env());
  ASSERT_TRUE(box.execute(ctx, call("add_structured_data", {{"format", "html_table"}})).ok);
  ASSERT_TRUE(box.execute(ctx, call("add_transformation", {{"key", "t"}, {"plan", ""}})).ok);
  Json loader{{"key", "code"}, {"loader", {{"target", "notebook_dataframe"}, {"source_key", "t"}}}};
  auto r = box.execute(ctx, call("add_transformation", loader));
  EXPECT_EQ(r.error, "ToolArgsError: no csv temp file for 't'; call write_temp_file with ext csv first");
  auto w = box.execute(ctx, call("write_temp_file", {{"key", "t"}, {"ext", "csv"}}));
  ASSERT_TRUE(w.ok) << w.error;
  r = box.execute(ctx, call("add_transformation", loader));
  ASSERT_TRUE(r.ok) << r.error;
  const auto& code = *ctx.transformations.find("code")->text;
  EXPECT_NE(code.find(w.result["path"].get<std::string>()), std::string::npos);
  EXPECT_NE(code.find("pandas"), std::string::npos);
}

TEST(Query, CountScalarAndNotScalar) {
  Harness h;
  std::vector<std::vector<Cell>> rows;
  for (const char* s : {"ALABAMA", "Alaska", "ALASKA", "Texas", "ALBERTA"}) rows.push_back({Cell(CellValue(s))});
  auto ctx = html_context(StructuredTable::from_rows({"State"}, std::move(rows)));
  Toolbox box(h.env());
  ASSERT_TRUE(box.execute(ctx, call("add_structured_data", {{"format", "html_table"}})).ok);
  auto r = box.execute(ctx, call("run_query", {{"plan", "filter regex_match(col(\"State\"), \"^AL\")"}, {"mode", "count"}}));
  ASSERT_TRUE(r.ok) << r.error;
  EXPECT_EQ(r.result["text"], "3");
  EXPECT_EQ(r.result["key"], "query:1");
  EXPECT_EQ(ctx.transformations.find("query:1")->kind, TransformResult::Kind::scalar);

  r = box.execute(ctx, call("run_query", {{"plan", "filter col(\"State\") = \"Texas\""}}));
  ASSERT_TRUE(r.ok) << r.error;
  EXPECT_EQ(r.result["text"], "Texas");
  EXPECT_EQ(r.result["key"], "query:2");

  r = box.execute(ctx, call("run_query", {{"plan", ""}}));
  EXPECT_EQ(r.error.rfind("NotScalarResult", 0), 0u);
  EXPECT_FALSE(ctx.transformations.find("query:3"));
}

// --- write_temp_file -------------------------------------------------------------------------------

TEST(TempFile, CsvRoundTripAndUniqueNames) {
  Harness h;
  auto ctx = html_context(ballot());
  Toolbox box(h.env());
  auto r = box.execute(ctx, call("write_temp_file", {{"key", "t1"}, {"ext", "csv"}}));
  EXPECT_EQ(r.error, "UnknownKey: no transformation 't1' (have: [])");
  ASSERT_TRUE(box.execute(ctx, call("add_structured_data", {{"format", "html_table"}})).ok);
  ASSERT_TRUE(box.execute(ctx, call("add_transformation", {{"key", "t1"}, {"plan", "drop_cols [5]"}})).ok);

  auto a = box.execute(ctx, call("write_temp_file", {{"key", "t1"}, {"ext", "csv"}}));
  auto b = box.execute(ctx, call("write_temp_file", {{"key", "t1"}, {"ext", "csv"}}));
  ASSERT_TRUE(a.ok && b.ok);
  std::filesystem::path pa = a.result["path"].get<std::string>(), pb = b.result["path"].get<std::string>();
  EXPECT_NE(pa, pb);
  EXPECT_TRUE(pa.is_absolute());
  EXPECT_EQ(pa.filename(), "job-7-t1.csv");
  EXPECT_EQ(pb.filename(), "job-7-t1-2.csv");
  EXPECT_EQ(ctx.metadata["temp_files"].size(), 2u);

  std::ifstream in(pa, std::ios::binary);
  std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  auto parsed = parse_text(content, FormatId::csv, {ParseOptions::Header::first_row});
  ASSERT_EQ(parsed.size(), 1u);
  auto expected = *ctx.transformations.find("t1")->table;
  for (auto& row : expected.rows)
    for (auto& cell : row) cell.style = {};
  EXPECT_EQ(parsed[0], expected);

  ASSERT_TRUE(box.execute(ctx, call("run_query", {{"plan", "filter col(\"Votes\") = 1000\nkeep_cols [3]"}})).ok);
  r = box.execute(ctx, call("write_temp_file", {{"key", "query:1"}, {"ext", "txt"}}));
  EXPECT_EQ(r.error.rfind("ToolArgsError", 0), 0u);
  r = box.execute(ctx, call("write_temp_file", {{"key", "t1"}, {"ext", "xlsx"}}));
  EXPECT_EQ(r.error, "ToolArgsError: no table format for ext 'xlsx'");
}

// --- paste_to_destination ----------------------------------------------------------------------------

namespace {

ContextObject ready_context(Harness& h, Toolbox& box, const std::string& dest = "sim:overleaf") {
  auto ctx = html_context(ballot(), dest);
  EXPECT_TRUE(box.execute(ctx, call("add_structured_data", {{"format", "html_table"}})).ok);
  EXPECT_TRUE(box.execute(ctx, call("add_transformation", {{"key", "t"}, {"plan", "drop_cols [4, 5]"}})).ok);
  EXPECT_TRUE(box.execute(ctx, call("add_transformation",
                                    {{"key", "tex"}, {"render", {{"fmt", "latex_tabular"}, {"source_key", "t"}}}}))
                  .ok);
  (void)h;
  return ctx;
}

}  // namespace

TEST(Paste, DirectHappyPath) {
  Harness h;
  Toolbox box(h.env());
  auto ctx = ready_context(h, box);
  auto r = box.execute(ctx, call("paste_to_destination", {{"key", "tex"}, {"content_type", "text"}}));
  ASSERT_TRUE(r.ok) << r.error;
  EXPECT_EQ(r.result["delivered"], true);
  EXPECT_EQ(r.result["fallback"], false);
  EXPECT_EQ(r.result["route"], "direct");
  auto d = h.destination.deliveries();
  ASSERT_EQ(d.size(), 1u);
  EXPECT_EQ(d[0].dest.app_name, "sim:overleaf");
  EXPECT_EQ(d[0].content, *ctx.transformations.find("tex")->text);

  // One paste per job.
  r = box.execute(ctx, call("paste_to_destination", {{"key", "tex"}, {"content_type", "text"}}));
  EXPECT_EQ(r.error, "ToolArgsError: this job already pasted once");
}

TEST(Paste, FallbackToClipboard) {
  Harness h;
  h.destination.set_down("sim:overleaf", true);
  Toolbox box(h.env());
  auto ctx = ready_context(h, box);
  auto r = box.execute(ctx, call("paste_to_destination", {{"key", "tex"}, {"content_type", "text"}}));
  ASSERT_TRUE(r.ok) << r.error;
  EXPECT_EQ(r.result["fallback"], true);
  EXPECT_EQ(r.result["route"], "clipboard");
  ASSERT_EQ(h.clipboard.writes().size(), 1u);
  EXPECT_EQ(h.clipboard.writes()[0].bytes, *ctx.transformations.find("tex")->text);
}

TEST(Paste, BothPathsDown) {
  Harness h;
  h.destination.set_down("sim:overleaf", true);
  h.clipboard.set_available(false);
  Toolbox box(h.env());
  auto ctx = ready_context(h, box);
  auto r = box.execute(ctx, call("paste_to_destination", {{"key", "tex"}, {"content_type", "text"}}));
  EXPECT_EQ(r.error.rfind("DeliveryError: destination and clipboard both failed", 0), 0u) << r.error;
  EXPECT_TRUE(box.receipts().empty());
}

TEST(Paste, PluginPreferredThenFallbacks) {
  Harness h;
  h.plugins.registered["sim:excel"] = {"get_selection", "paste_table_to_new_sheet"};
  {
    Toolbox box(h.env(true));
    auto ctx = ready_context(h, box, "sim:excel");
    auto r = box.execute(ctx, call("paste_to_destination", {{"key", "t"}, {"content_type", "text"}}));
    ASSERT_TRUE(r.ok) << r.error;
    EXPECT_EQ(r.result["route"], "plugin");
    ASSERT_EQ(h.plugins.calls.size(), 1u);
    EXPECT_EQ(h.plugins.calls[0]["api"], "paste_table_to_new_sheet");
    // Spreadsheet destinations get tab-separated text.
    EXPECT_EQ(h.plugins.calls[0]["args"]["content"], render(*ctx.transformations.find("t")->table, FormatId::tsv).text);
    EXPECT_TRUE(h.destination.deliveries().empty());
  }
  {
    h.plugins.fail_with = ErrorCode::PluginTimeout;
    Toolbox box(h.env(true));
    auto ctx = ready_context(h, box, "sim:excel");
    auto r = box.execute(ctx, call("paste_to_destination", {{"key", "t"}, {"content_type", "text"}}));
    ASSERT_TRUE(r.ok) << r.error;
    EXPECT_EQ(r.result["route"], "clipboard");
    EXPECT_EQ(r.result["fallback"], true);
    EXPECT_EQ(r.result["note"].get<std::string>().rfind("PluginTimeout", 0), 0u);
  }
  {
    h.plugins.fail_with = ErrorCode::NoPlugin;
    Toolbox box(h.env(true));
    auto ctx = ready_context(h, box, "sim:excel");
    auto r = box.execute(ctx, call("paste_to_destination", {{"key", "t"}, {"content_type", "text"}}));
    EXPECT_EQ(r.result["route"], "direct");
  }
  {
    // A plugin that rejected the arguments never acted, so direct delivery is safe.
    h.plugins.fail_with = ErrorCode::Schema;
    Toolbox box(h.env(true));
    auto ctx = ready_context(h, box, "sim:excel");
    auto r = box.execute(ctx, call("paste_to_destination", {{"key", "t"}, {"content_type", "text"}}));
    EXPECT_EQ(r.result["route"], "direct");
    EXPECT_EQ(r.result["note"].get<std::string>().rfind("SchemaError", 0), 0u);
    h.plugins.fail_with.reset();
  }
  {
    Toolbox box(h.env(true));
    auto ctx = ready_context(h, box, "sim:excel");
    auto r = box.execute(ctx, call("paste_to_destination", {{"key", "t"}, {"content_type", "text"}, {"api", "nope"}}));
    EXPECT_EQ(r.error.rfind("ToolArgsError: no plugin API 'nope'", 0), 0u);
  }
}

TEST(Paste, ContentTypeRules) {
  Harness h;
  Toolbox box(h.env());
  auto ctx = ready_context(h, box);
  auto r = box.execute(ctx, call("paste_to_destination", {{"key", "tex"}, {"content_type", "html"}}));
  EXPECT_EQ(r.error, "ToolArgsError: 'tex' holds text, not html");
  r = box.execute(ctx, call("paste_to_destination", {{"key", "missing"}, {"content_type", "html"}}));
  EXPECT_EQ(r.error.rfind("UnknownKey", 0), 0u);
  r = box.execute(ctx, call("paste_to_destination", {{"key", "t"}, {"content_type", "html"}}));
  ASSERT_TRUE(r.ok);
  EXPECT_EQ(h.destination.deliveries()[0].type, ContentType::html);
  EXPECT_EQ(h.destination.deliveries()[0].content.rfind("<table", 0), 0u);
}

TEST(Paste, DefaultTextFormats) {
  EXPECT_EQ(default_text_format("sim:overleaf"), FormatId::latex_tabular);
  EXPECT_EQ(default_text_format("sim:excel"), FormatId::tsv);
  EXPECT_EQ(default_text_format("sim:jupyter"), FormatId::csv);
  EXPECT_EQ(default_text_format("sim:obsidian"), FormatId::markdown_table);
}

// --- provider wire ---------------------------------------------------------------------------

TEST(Wire, ResponseShapes) {
  auto r = provider_response_from_json(Json{{"text", "done"}});
  EXPECT_EQ(r.text, "done");
  r = provider_response_from_json(calls({Json{{"tool", "get_clipboard_summary"}}}));
  ASSERT_EQ(r.tool_calls.size(), 1u);
  EXPECT_EQ(r.tool_calls[0].call_id, "call-1");
  EXPECT_EQ(r.tool_calls[0].args, Json::object());
  EXPECT_THROW(provider_response_from_json(Json::object()), Error);
  EXPECT_THROW(provider_response_from_json(Json{{"tool_calls", {{{"args", 1}}}}}), Error);
  EXPECT_THROW(provider_response_from_json(Json{{"text", 4}}), Error);
  auto back = provider_response_from_json(to_json(provider_response_from_json(happy_script()[2])));
  EXPECT_EQ(back.tool_calls.size(), 2u);
}

TEST(Wire, LoadScripts) {
  auto one = load_scripts(Json{{"responses", Json::array({Json{{"text", "a"}}})}});
  EXPECT_EQ(one.size(), 1u);
  auto many = load_scripts(Json{{"jobs", Json::array({Json{{"responses", Json::array()}}, Json::array()})}});
  EXPECT_EQ(many.size(), 2u);
  EXPECT_THROW(load_scripts(Json{{"x", 1}}), Error);
}

TEST(Wire, SystemPromptAsset) {
  EXPECT_EQ(default_system_prompt().rfind("smartpaste-prompt/1", 0), 0u);
  EXPECT_NE(default_system_prompt().find("paste_to_destination"), std::string_view::npos);
}

TEST(Wire, HttpProviderRoundTrip) {
  httplib::Server server;
  Json seen;
  server.Post("/v1/complete", [&](const httplib::Request& req, httplib::Response& res) {
    seen = Json::parse(req.body);
    res.set_content(Json{{"tool_calls", {{{"id", "a"}, {"tool", "get_clipboard_summary"}, {"args", Json::object()}}}}}.dump(),
                    "application/json");
  });
  server.Post("/broken", [](const httplib::Request&, httplib::Response& res) { res.set_content("{", "application/json"); });
  int port = server.bind_to_any_port("127.0.0.1");
  std::thread th([&] { server.listen_after_bind(); });
  server.wait_until_ready();

  HttpProvider provider("http://127.0.0.1:" + std::to_string(port) + "/v1/complete", std::chrono::seconds(5));
  ProviderRequest req{"sys", Json::array({Json{{"role", "user"}, {"content", "hi"}}}), tool_schemas()};
  auto r = provider.complete(req);
  ASSERT_EQ(r.tool_calls.size(), 1u);
  EXPECT_EQ(r.tool_calls[0].call_id, "a");
  EXPECT_EQ(seen["system"], "sys");
  EXPECT_EQ(seen["tools"].size(), 8u);
  EXPECT_EQ(seen["messages"][0]["content"], "hi");

  HttpProvider broken("http://127.0.0.1:" + std::to_string(port) + "/broken", std::chrono::seconds(5));
  try {
    broken.complete(req);
    ADD_FAILURE();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ProviderTransport);
  }
  server.stop();
  th.join();

  HttpProvider gone("http://127.0.0.1:" + std::to_string(port) + "/v1/complete", std::chrono::seconds(1));
  try {
    gone.complete(req);
    ADD_FAILURE();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ProviderTransport);
  }
  EXPECT_THROW(HttpProvider("https://x", std::chrono::seconds(1)), Error);
}

// --- run_job ---------------------------------------------------------------------------------------

TEST(Job, HappyPath) {
  Harness h;
  auto ctx = html_context(ballot(), "sim:overleaf", "Copy the table without the fourth and fifth columns");
  ScriptedProvider provider(happy_script());
  std::vector<std::string> events;
  RunOptions opts;
  opts.on_event = [&](const JobEvent& e) { events.push_back(e.kind); };
  auto t = run_job(ctx, provider, h.env(), opts);
  EXPECT_EQ(t.outcome, Outcome::pasted) << t.error;
  EXPECT_EQ(t.retries_used, 0);
  EXPECT_EQ(t.final_text, "Pasted the table without Share and Notes.");
  ASSERT_EQ(t.receipts.size(), 1u);
  EXPECT_EQ(t.receipts[0].route, "direct");
  EXPECT_EQ(std::count(events.begin(), events.end(), "tool_started"), 5);
  EXPECT_EQ(t.turns.size(), 9u);

  const auto& first = provider.requests().front();
  EXPECT_EQ(first.system, std::string(default_system_prompt()));
  EXPECT_EQ(first.tools, tool_schemas());
  std::string opening = first.messages[0]["content"];
  EXPECT_NE(opening.find("instruction: Copy the table without the fourth and fifth columns"), std::string::npos);
  // Every later request carries the previous tool results.
  const auto& last = provider.requests().back();
  EXPECT_EQ(last.messages.back()["role"], "tool");
  EXPECT_EQ(last.messages.back()["content"]["route"], "direct");

  std::string pasted = *pasted_content(t);
  EXPECT_EQ(body_of(pasted).rfind("\\begin{tabular}{llr}", 0), 0u) << pasted;
  EXPECT_EQ(pasted.find("Share"), std::string::npos);
}

TEST(Job, SyntaxErrorsThenSuccess) {
  Harness h;
  auto ctx = html_context(ballot());
  auto script = happy_script();
  Json bad = calls({tool_call_json("add_transformation", {{"key", "t1"}, {"plan", "drop cols [4,5]"}}, "x")});
  script.insert(script.begin() + 2, {bad, bad});
  ScriptedProvider provider(script);
  auto t = run_job(ctx, provider, h.env());
  EXPECT_EQ(t.outcome, Outcome::pasted) << t.error;
  EXPECT_EQ(t.retries_used, 2);
  // The provider saw the error text.
  const auto& msgs = provider.requests()[3].messages;
  EXPECT_EQ(msgs.back()["error"].get<std::string>().rfind("PlanSyntaxError:", 0), 0u);
}

class RetryBudget : public ::testing::TestWithParam<int> {};

TEST_P(RetryBudget, ErrorsConsumeRetries) {
  int injected = GetParam();
  for (bool transport : {false, true}) {
    Harness h;
    auto ctx = html_context(ballot());
    auto script = happy_script();
    Json failure = transport ? Json{{"transport_error", "connection reset"}}
                             : calls({tool_call_json("sample_context", {{"path", "nowhere"}}, "e")});
    script.insert(script.begin() + 1, static_cast<std::size_t>(injected), failure);
    ScriptedProvider provider(script);
    auto t = run_job(ctx, provider, h.env());
    if (injected <= 3) {
      EXPECT_EQ(t.outcome, Outcome::pasted) << t.error;
      EXPECT_EQ(t.retries_used, injected);
    } else {
      EXPECT_EQ(t.outcome, Outcome::failed);
      EXPECT_EQ(t.retries_used, 3);
      EXPECT_FALSE(t.error.empty());
      EXPECT_TRUE(h.destination.deliveries().empty());
    }
    EXPECT_LE(t.retries_used, kRetryBudget);
  }
}

INSTANTIATE_TEST_SUITE_P(ZeroToFour, RetryBudget, ::testing::Values(0, 1, 2, 3, 4));

TEST(Job, ProviderErrorsFourTimes) {
  Harness h;
  auto ctx = html_context(ballot());
  ScriptedProvider provider(std::vector<Json>(4, Json{{"transport_error", "timeout"}}));
  auto t = run_job(ctx, provider, h.env());
  EXPECT_EQ(t.outcome, Outcome::failed);
  EXPECT_EQ(t.retries_used, 3);
  EXPECT_EQ(t.error, "ProviderTransportError: timeout");
  EXPECT_EQ(provider.remaining(), 0u);
}

TEST(Job, FirstErrorSkipsRestOfResponse) {
  Harness h;
  auto ctx = html_context(ballot());
  ScriptedProvider provider({calls({tool_call_json("add_structured_data", {{"format", "csv"}, {"x", 1}}, "a"),
                                    tool_call_json("add_structured_data", {{"format", "html_table"}}, "b")}),
                             Json{{"text", "giving up"}}});
  auto t = run_job(ctx, provider, h.env());
  EXPECT_EQ(t.outcome, Outcome::failed);
  EXPECT_EQ(t.retries_used, 1);
  EXPECT_FALSE(ctx.has_structured());
  const auto& results = t.turns[1].results;
  ASSERT_EQ(results.size(), 2u);
  EXPECT_FALSE(results[1].executed);
  EXPECT_EQ(results[1].error, "Skipped: an earlier call in this response failed");
  EXPECT_EQ(t.error, "DeliveryError: the provider finished without pasting: giving up");
}

TEST(Job, CancelledBeforeAndDuring) {
  Harness h;
  std::atomic<bool> cancel{true};
  auto ctx = html_context(ballot());
  ScriptedProvider provider(happy_script());
  RunOptions opts;
  opts.cancel = &cancel;
  auto t = run_job(ctx, provider, h.env(), opts);
  EXPECT_EQ(t.outcome, Outcome::cancelled);
  EXPECT_TRUE(provider.requests().empty());

  cancel = false;
  ScriptedProvider p2(happy_script());
  opts.on_event = [&](const JobEvent& e) {
    if (e.kind == "tool_finished" && e.data["tool"] == "add_structured_data") cancel = true;
  };
  t = run_job(ctx, p2, h.env(), opts);
  EXPECT_EQ(t.outcome, Outcome::cancelled);
  EXPECT_TRUE(h.destination.deliveries().empty());
}

TEST(Job, TurnLimit) {
  Harness h;
  auto ctx = html_context(ballot());
  ScriptedProvider provider(std::vector<Json>(10, calls({tool_call_json("get_clipboard_summary", Json::object(), "s")})));
  RunOptions opts;
  opts.max_turns = 5;
  auto t = run_job(ctx, provider, h.env(), opts);
  EXPECT_EQ(t.outcome, Outcome::failed);
  EXPECT_EQ(t.error, "DeliveryError: turn limit of 5 reached");
}

TEST(Job, FailedPasteKeepsTransformations) {
  Harness h;
  h.destination.set_down("sim:overleaf", true);
  h.clipboard.set_available(false);
  auto ctx = html_context(ballot());
  auto script = happy_script();
  script.insert(script.end() - 1, 3, script[3]);
  ScriptedProvider provider(script);
  auto t = run_job(ctx, provider, h.env());
  EXPECT_EQ(t.outcome, Outcome::failed);
  EXPECT_EQ(t.retries_used, 3);
  EXPECT_EQ(t.error.rfind("DeliveryError: destination and clipboard both failed", 0), 0u);
  EXPECT_TRUE(ctx.transformations.find("out"));
}

TEST(Job, DeterministicReplay) {
  smartpaste::testing::TableGen gen(77);
  const std::vector<std::string> plans{"drop_cols [1]", "sort 1 desc", "dedupe", "",
                                       "style rows where col(1) != \"\" with bold"};
  for (int i = 0; i < 60; ++i) {
    auto table = gen.table({.allow_headers = false, .styles = true});
    std::string plan = plans[static_cast<std::size_t>(i) % plans.size()];
    if (plan == "drop_cols [1]" && table.column_count == 1) plan = "dedupe";
    auto script = happy_script(plan);
    if (i % 3 == 0) script.insert(script.begin() + 1, Json{{"transport_error", "flaky"}});
    if (i % 4 == 0)
      script.insert(script.begin() + 2, calls({tool_call_json("add_transformation", {{"key", "t1"}, {"plan", "drop_cols [99]"}}, "e")}));

    Harness h1, h2;
    auto ctx1 = html_context(table);
    auto ctx2 = html_context(table);
    ScriptedProvider provider(script);
    auto t1 = run_job(ctx1, provider, h1.env());
    ASSERT_EQ(t1.outcome, Outcome::pasted) << t1.error << " plan=" << plan;
    auto t2 = replay(t1, ctx2, h2.env());
    EXPECT_EQ(t2.outcome, t1.outcome);
    EXPECT_EQ(t2.retries_used, t1.retries_used);
    EXPECT_EQ(context_view(ctx2).dump(), context_view(ctx1).dump());
    EXPECT_EQ(*pasted_content(t2), *pasted_content(t1));
    EXPECT_EQ(to_json(t2).dump(), to_json(t1).dump());
  }
}

TEST(Job, TranscriptJson) {
  Harness h;
  auto ctx = html_context(ballot());
  ScriptedProvider provider(happy_script());
  auto j = to_json(run_job(ctx, provider, h.env()));
  EXPECT_EQ(j["outcome"], "pasted");
  EXPECT_EQ(j["retries_used"], 0);
  EXPECT_EQ(j["turns"][0]["role"], "provider");
  EXPECT_EQ(j["turns"][1]["results"][0]["ok"], true);
  EXPECT_EQ(j["receipts"][0]["key"], "out");
  EXPECT_FALSE(j["receipts"][0].contains("content"));
}
