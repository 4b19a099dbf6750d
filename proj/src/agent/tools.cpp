#include "smartpaste/agent.hpp"
#include "smartpaste/plan.hpp"
#include "smartpaste/text.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

namespace smartpaste::agent {

using namespace smartpaste::text;

namespace {

std::string shape(const StructuredTable& t) {
  return std::to_string(t.column_count) + " cols \xC3\x97 " + std::to_string(t.row_count()) +
         " rows";
}

std::string join(const std::vector<std::string>& items, std::string_view sep = ", ") {
  std::string out;
  for (const auto& s : items) {
    if (!out.empty()) out += sep;
    out += s;
  }
  return out;
}

std::string cut(std::string_view s, std::size_t max_chars, bool* truncated = nullptr) {
  std::size_t n = utf8_prefix_bytes(s, max_chars);
  if (truncated) *truncated = n < s.size();
  if (n >= s.size()) return std::string(s);
  return std::string(s.substr(0, n)) + std::string(kTruncatedMarker);
}

Json preview_warnings(const std::vector<std::string>& warnings) {
  Json out = Json::array();
  for (std::size_t i = 0; i < warnings.size() && i < 5; ++i) out.push_back(warnings[i]);
  return out;
}

const TransformResult& find_result(const ContextObject& ctx, const std::string& key) {
  if (const auto* r = ctx.transformations.find(key)) return *r;
  throw Error(ErrorCode::UnknownKey,
              "no transformation '" + key + "' (have: [" + join(ctx.transformations.keys()) + "])");
}

std::vector<StructuredTable> plan_input(const ContextObject& ctx, const Json& args) {
  if (auto it = args.find("source_key"); it != args.end()) {
    const auto& r = find_result(ctx, it->get<std::string>());
    if (r.kind != TransformResult::Kind::table)
      throw Error(ErrorCode::ToolArgs, "'" + it->get<std::string>() + "' is " +
                                           std::string(to_string(r.kind)) + ", not a table");
    return {*r.table};
  }
  if (!ctx.has_structured())
    throw Error(ErrorCode::MissingStructuredData, "no structured data; call add_structured_data first");
  return ctx.structured;
}

const RawPayload* richest(const ClipboardSnapshot& s) {
  for (auto k : {PayloadKind::html, PayloadKind::rtf, PayloadKind::text, PayloadKind::image})
    if (const auto* p = s.find(k)) return p;
  return nullptr;
}

std::string payload_kinds(const ClipboardSnapshot& s) {
  std::vector<std::string> kinds;
  for (const auto& p : s.payloads) kinds.emplace_back(to_string(p.kind));
  return join(kinds);
}

// --- sample_context paths ------------------------------------------------------------

struct Segment {
  std::optional<std::string> name;
  std::size_t index = 0;
};

std::vector<Segment> parse_path(std::string_view path) {
  auto bad = [&](const std::string& why) {
    return Error(ErrorCode::BadPath, "bad path '" + std::string(path) + "': " + why);
  };
  std::vector<Segment> out;
  std::size_t i = 0;
  auto read_name = [&] {
    std::size_t start = i;
    while (i < path.size() && path[i] != '.' && path[i] != '[') ++i;
    if (i == start) throw bad("empty name at " + std::to_string(start));
    return std::string(path.substr(start, i - start));
  };
  out.push_back({read_name()});
  while (i < path.size()) {
    if (path[i] == '.') {
      ++i;
      out.push_back({read_name()});
    } else {  // '['
      ++i;
      if (i < path.size() && path[i] == '"') {
        std::size_t close = path.find("\"]", i + 1);
        if (close == std::string_view::npos) throw bad("unterminated quoted key");
        out.push_back({std::string(path.substr(i + 1, close - i - 1))});
        i = close + 2;
        continue;
      }
      std::size_t close = path.find(']', i);
      std::string digits(path.substr(i, close == std::string_view::npos ? 0 : close - i));
      if (close == std::string_view::npos || digits.empty() ||
          digits.find_first_not_of("0123456789") != std::string::npos)
        throw bad("expected [index] at " + std::to_string(i - 1));
      out.push_back({std::nullopt, std::stoul(digits)});
      i = close + 1;
    }
  }
  return out;
}

std::string available(const Json& v) {
  if (v.is_object()) {
    std::vector<std::string> keys;
    for (const auto& [k, _] : v.items()) keys.push_back(k);
    return "[" + join(keys) + "]";
  }
  if (v.is_array()) return v.empty() ? "[]" : "[0.." + std::to_string(v.size() - 1) + "]";
  return "[] (not a container)";
}

Json resolve(const Json& view, std::string_view path) {
  auto segments = parse_path(path);
  Json roots = Json::object();
  for (const char* r : {"raw", "structured", "metadata", "transformations"}) roots[r] = view[r];
  const Json* cur = &roots;
  std::string walked;
  for (const auto& seg : segments) {
    if (cur->is_object() && seg.name && cur->contains(*seg.name)) {
      cur = &(*cur)[*seg.name];
      walked += walked.empty() ? *seg.name : "." + *seg.name;
      continue;
    }
    std::optional<std::size_t> index;
    if (!seg.name) index = seg.index;
    else if (seg.name->find_first_not_of("0123456789") == std::string::npos) index = std::stoul(*seg.name);
    if (cur->is_array() && index && *index < cur->size()) {
      cur = &(*cur)[*index];
      walked += "[" + std::to_string(*index) + "]";
      continue;
    }
    std::string wanted = seg.name ? "'" + *seg.name + "'" : "[" + std::to_string(seg.index) + "]";
    throw Error(ErrorCode::BadPath, "no " + wanted + " under " + (walked.empty() ? "context" : walked) +
                                        "; available: " + available(*cur));
  }
  return *cur;
}

std::string sanitize(std::string_view key) {
  std::string out;
  for (char c : key)
    out += (std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' || c == '.') ? c : '_';
  return out;
}

std::optional<FormatId> format_for_ext(std::string_view ext) {
  if (ext == "csv") return FormatId::csv;
  if (ext == "tsv") return FormatId::tsv;
  if (ext == "md") return FormatId::markdown_table;
  if (ext == "html" || ext == "htm") return FormatId::html_table;
  if (ext == "tex") return FormatId::latex_tabular;
  if (ext == "rtf") return FormatId::rtf_table;
  if (ext == "txt") return FormatId::aligned_text;
  return std::nullopt;
}

PayloadKind payload_for(ContentType t) {
  switch (t) {
    case ContentType::html: return PayloadKind::html;
    case ContentType::rtf: return PayloadKind::rtf;
    case ContentType::text: break;
  }
  return PayloadKind::text;
}

}  // namespace

Json to_json(const PasteReceipt& r) {
  Json j{{"delivered", r.delivered},
         {"fallback", r.fallback},
         {"route", r.route},
         {"app_name", r.app_name},
         {"content_type", std::string(to_string(r.content_type))},
         {"bytes", r.bytes},
         {"key", r.key}};
  if (!r.note.empty()) j["note"] = r.note;
  return j;
}

Sample raw_sample(const ClipboardSnapshot& snapshot) {
  Sample s;
  const RawPayload* p = richest(snapshot);
  if (!p) return s;
  s.kind = std::string(to_string(p->kind));
  if (p->kind == PayloadKind::image) {
    s.text = "<image " + std::to_string(p->bytes.size()) + " bytes>";
    return s;
  }
  s.text = cut(p->bytes, kSummarySampleChars, &s.truncated);
  return s;
}

std::string clipboard_summary(const ContextObject& ctx) {
  const auto& snap = ctx.snapshot;
  std::ostringstream out;
  out << "payloads: " << payload_kinds(snap) << "\n";
  out << "source: " << snap.source.app_name;
  if (!snap.source.window_title.empty()) out << " (window \"" << snap.source.window_title << "\")";
  out << "\n";
  if (ctx.destination) out << "destination: " << ctx.destination->app_name << "\n";
  if (ctx.instruction) out << "instruction: " << *ctx.instruction << "\n";
  if (const RawPayload* p = richest(snap); p && p->kind != PayloadKind::image) {
    try {
      out << "detected format: " << to_string(detect_format(*p, snap.source)) << "\n";
    } catch (const Error&) {
      out << "detected format: none\n";
    }
  }
  if (ctx.has_structured()) {
    std::vector<std::string> shapes;
    for (const auto& t : ctx.structured) shapes.push_back(shape(t));
    out << "structured: " << ctx.structured.size() << " table(s), " << join(shapes, "; ") << "\n";
  }
  if (!ctx.transformations.empty())
    out << "transformations: " << join(ctx.transformations.keys()) << "\n";
  Sample sample = raw_sample(snap);
  if (!sample.kind.empty()) {
    const RawPayload* p = snap.find(*payload_kind_from_string(sample.kind));
    out << "sample (" << sample.kind << ", " << utf8_length(p->bytes) << " chars"
        << (sample.truncated ? ", truncated" : "") << "):\n"
        << sample.text;
  }
  return out.str();
}

FormatId default_text_format(std::string_view app_name) {
  std::string app = lower(app_name);
  auto any = [&](std::initializer_list<std::string_view> needles) {
    for (auto n : needles)
      if (contains(app, n)) return true;
    return false;
  };
  if (any({"overleaf", "latex", "tex"})) return FormatId::latex_tabular;
  if (any({"excel", "sheets", "calc", "numbers"})) return FormatId::tsv;
  if (any({"jupyter", "notebook", "rstudio", "colab", "vscode"})) return FormatId::csv;
  return FormatId::markdown_table;
}

ToolResult Toolbox::execute(ContextObject& ctx, const ToolCall& call) {
  ToolResult r{call.call_id, call.tool, false, false, nullptr, {}};
  auto tool = tool_from_string(call.tool);
  if (!tool) {
    std::vector<std::string> names;
    for (auto t : all_tools()) names.emplace_back(to_string(t));
    r.error = "ToolArgsError: unknown tool '" + call.tool + "' (known: " + join(names) + ")";
    return r;
  }
  Json args = call.args.is_null() ? Json::object() : call.args;
  if (auto problem = validate_args(*tool, args)) {
    r.error = "ToolArgsError: " + *problem;
    return r;
  }
  r.executed = true;
  try {
    r.result = run(*tool, ctx, args);
    r.ok = true;
  } catch (const Error& e) {
    r.error = std::string(to_string(e.code())) + ": " + e.what();
  } catch (const std::exception& e) {
    r.error = std::string("Internal: ") + e.what();
  }
  return r;
}

Json Toolbox::run(ToolId tool, ContextObject& ctx, const Json& args) {
  switch (tool) {
    case ToolId::get_clipboard_summary:
      return Json{{"summary", clipboard_summary(ctx)}};

    case ToolId::add_structured_data: {
      std::string fmt_name = args["format"];
      const RawPayload* payload = nullptr;
      FormatId fmt{};
      if (fmt_name == "auto") {
        payload = richest(ctx.snapshot);
        if (!payload || payload->kind == PayloadKind::image)
          throw Error(ErrorCode::ImagePayloadUnsupported, "no text-like payload to parse");
        fmt = detect_format(*payload, ctx.snapshot.source);
      } else {
        fmt = format_from_string(fmt_name);
        PayloadKind need = fmt == FormatId::html_table   ? PayloadKind::html
                           : fmt == FormatId::rtf_table ? PayloadKind::rtf
                                                        : PayloadKind::text;
        payload = ctx.snapshot.find(need);
        if (!payload)
          throw Error(ErrorCode::ToolArgs, "format/payload mismatch: " + fmt_name + " needs a " +
                                               std::string(to_string(need)) + " payload (have: " +
                                               payload_kinds(ctx.snapshot) + ")");
      }
      ParseOptions opts;
      std::string header = args.value("options", Json::object()).value("header", "detect");
      if (header == "first_row") opts.header = ParseOptions::Header::first_row;
      if (header == "none") opts.header = ParseOptions::Header::none;

      auto tables = parse(*payload, fmt, opts);
      Json list = Json::array();
      std::vector<std::string> shapes;
      for (std::size_t i = 0; i < tables.size(); ++i) {
        Json t{{"index", i}, {"columns", tables[i].column_count}, {"rows", tables[i].row_count()},
               {"headers", tables[i].headers}};
        if (tables[i].caption) t["caption"] = *tables[i].caption;
        list.push_back(std::move(t));
        shapes.push_back(shape(tables[i]));
      }
      std::string summary = std::to_string(tables.size()) +
                            (tables.size() == 1 ? " table, " : " tables, ") + join(shapes, "; ");
      ctx.structured = std::move(tables);
      return Json{{"summary", summary}, {"format", std::string(to_string(fmt))}, {"tables", list}};
    }

    case ToolId::add_metadata: {
      if (!ctx.has_structured())
        throw Error(ErrorCode::MissingStructuredData, "no structured data; call add_structured_data first");
      std::string key = args["key"], extractor = args["extractor"];
      Json value = Json::array();
      std::size_t entries = 0;
      for (std::size_t ti = 0; ti < ctx.structured.size(); ++ti) {
        const auto& t = ctx.structured[ti];
        if (extractor == "caption") {
          value.push_back(t.caption ? Json(*t.caption) : Json(nullptr));
          entries += t.caption ? 1 : 0;
          continue;
        }
        for (std::size_t r = 0; r < t.rows.size(); ++r)
          for (std::size_t c = 0; c < t.rows[r].size(); ++c) {
            const Cell& cell = t.rows[r][c];
            if (extractor == "cell_styles" && !cell.style.is_plain()) {
              value.push_back({{"table", ti}, {"row", r}, {"col", c}, {"style", to_json(cell.style)}});
            } else if (extractor == "spans" && !cell.covered_by && cell.span != Span{}) {
              value.push_back({{"table", ti}, {"row", r}, {"col", c},
                               {"rowspan", cell.span.rowspan}, {"colspan", cell.span.colspan}});
            } else {
              continue;
            }
            ++entries;
          }
      }
      bool replaced = ctx.metadata.contains(key);
      ctx.metadata[key] = std::move(value);
      return Json{{"key", key}, {"extractor", extractor}, {"entries", entries}, {"replaced", replaced}};
    }

    case ToolId::sample_context: {
      std::string path = args["path"];
      Json value = resolve(context_view(ctx), path);
      Json out{{"path", path}};
      bool truncated = false;
      if (auto range = args.find("range"); range != args.end()) {
        if (!value.is_array()) throw Error(ErrorCode::ToolArgs, "range needs an array; " + path + " is not one");
        std::size_t from = (*range)["from"], to = (*range)["to"];
        if (to < from) throw Error(ErrorCode::ToolArgs, "range.to must be >= range.from");
        Json slice = Json::array();
        for (std::size_t i = from - 1; i < to && i < value.size(); ++i) slice.push_back(value[i]);
        value = std::move(slice);
      }
      if (value.is_array()) {
        out["total"] = value.size();
        if (value.size() > kSampleMaxRows) {
          value.erase(value.begin() + kSampleMaxRows, value.end());
          truncated = true;
        }
      }
      std::string text = value.is_string() ? value.get<std::string>() : value.dump();
      if (utf8_length(text) > kSampleMaxChars) {
        out["value"] = cut(text, kSampleMaxChars);
        truncated = true;
      } else {
        out["value"] = std::move(value);
      }
      out["truncated"] = truncated;
      return out;
    }

    case ToolId::add_transformation: {
      std::string key = args["key"];
      TransformResult result;
      Json summary{{"key", key}};
      if (args.contains("plan")) {
        auto plan = plan::parse_plan(args["plan"].get<std::string>());
        auto input = plan_input(ctx, args);
        auto eval = plan::evaluate(plan, input);
        summary["kind"] = "table";
        summary["shape"] = shape(eval.table);
        summary["headers"] = eval.table.headers;
        summary["warnings"] = preview_warnings(eval.warnings);
        summary["warning_count"] = eval.warnings.size();
        result = TransformResult::of_table(std::move(eval.table));
      } else if (args.contains("render")) {
        const Json& spec = args["render"];
        auto input = plan_input(ctx, spec);
        RenderOptions opts;
        const Json o = spec.value("opts", Json::object());
        opts.styles = o.value("styles", true);
        opts.booktabs = o.value("booktabs", false);
        auto rendered = render(input, format_from_string(spec["fmt"].get<std::string>()), opts);
        summary["kind"] = "rendered_text";
        summary["content_type"] = std::string(to_string(rendered.content_type));
        summary["chars"] = utf8_length(rendered.text);
        summary["preview"] = cut(rendered.text, 200);
        summary["warnings"] = preview_warnings(rendered.warnings);
        result = TransformResult::of_text(std::move(rendered.text), rendered.content_type);
      } else {
        const Json& spec = args["loader"];
        std::string source = spec["source_key"];
        auto input = plan_input(ctx, spec);
        std::optional<std::string> path;
        for (const auto& f : ctx.metadata.value("temp_files", Json::array()))
          if (f["key"] == source && f["ext"] == "csv") path = f["path"].get<std::string>();
        if (!path)
          throw Error(ErrorCode::ToolArgs, "no csv temp file for '" + source +
                                               "'; call write_temp_file with ext csv first");
        auto snippet = emit_loader_snippet(input.front(), loader_target_from_string(spec["target"].get<std::string>()), *path);
        summary["kind"] = "rendered_text";
        summary["content_type"] = "text";
        summary["preview"] = cut(snippet, 200);
        result = TransformResult::of_text(std::move(snippet), ContentType::text);
      }
      summary["replaced"] = ctx.transformations.put(key, std::move(result));
      return summary;
    }

    case ToolId::run_query: {
      auto plan = plan::parse_plan(args["plan"].get<std::string>());
      auto mode = plan::query_mode_from_string(args.value("mode", "scalar"));
      auto input = plan_input(ctx, args);
      auto q = plan::query(plan, input, *mode);
      std::size_t n = 1;
      for (const auto& k : ctx.transformations.keys()) n += k.rfind("query:", 0) == 0 ? 1 : 0;
      std::string key = "query:" + std::to_string(n);
      while (ctx.transformations.find(key)) key = "query:" + std::to_string(++n);
      Json out{{"key", key}, {"value", to_json(q.value)}, {"text", cell_text(q.value)},
               {"rows", q.table.row_count()}, {"warnings", preview_warnings(q.warnings)}};
      ctx.transformations.put(key, TransformResult::of_scalar(q.value));
      return out;
    }

    case ToolId::write_temp_file:
      return write_temp_file(ctx, args);

    case ToolId::paste_to_destination:
      return paste(ctx, args);
  }
  throw Error(ErrorCode::ToolArgs, "unhandled tool");
}

Json Toolbox::write_temp_file(ContextObject& ctx, const Json& args) {
  std::string key = args["key"];
  std::string ext = lower(args["ext"].get<std::string>());
  if (ext.find_first_not_of("abcdefghijklmnopqrstuvwxyz0123456789") != std::string::npos)
    throw Error(ErrorCode::ToolArgs, "ext must be alphanumeric");
  const auto& r = find_result(ctx, key);
  std::string content;
  switch (r.kind) {
    case TransformResult::Kind::rendered_text:
      content = *r.text;
      break;
    case TransformResult::Kind::table: {
      auto fmt = format_for_ext(ext);
      if (!fmt) throw Error(ErrorCode::ToolArgs, "no table format for ext '" + ext + "'");
      content = render(*r.table, *fmt).text;
      break;
    }
    case TransformResult::Kind::scalar:
      throw Error(ErrorCode::ToolArgs, "'" + key + "' is a scalar; only tables and text can be written");
  }

  std::error_code ec;
  std::filesystem::create_directories(env_.temp_dir, ec);
  if (ec) throw Error(ErrorCode::Io, "cannot create " + env_.temp_dir.string() + ": " + ec.message());
  std::string stem = sanitize(env_.job_id) + "-" + sanitize(key);
  auto path = std::filesystem::absolute(env_.temp_dir / (stem + "." + ext));
  for (int n = 2; std::filesystem::exists(path); ++n)
    path = std::filesystem::absolute(env_.temp_dir / (stem + "-" + std::to_string(n) + "." + ext));
  std::ofstream out(path, std::ios::binary);
  out << content;
  out.close();
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());

  if (!ctx.metadata.contains("temp_files")) ctx.metadata["temp_files"] = Json::array();
  ctx.metadata["temp_files"].push_back({{"key", key}, {"ext", ext}, {"path", path.string()}});
  return Json{{"path", path.string()}, {"bytes", content.size()}};
}

Json Toolbox::paste(ContextObject& ctx, const Json& args) {
  for (const auto& prior : receipts_)
    if (prior.delivered) throw Error(ErrorCode::ToolArgs, "this job already pasted once");
  if (!ctx.destination) throw Error(ErrorCode::ToolArgs, "no destination app is set for this context");
  std::string key = args["key"];
  ContentType type = *content_type_from_string(args["content_type"].get<std::string>());
  const auto& r = find_result(ctx, key);
  const AppContext& dest = *ctx.destination;

  std::string content;
  switch (r.kind) {
    case TransformResult::Kind::rendered_text:
      if (r.content_type != type)
        throw Error(ErrorCode::ToolArgs, "'" + key + "' holds " + std::string(to_string(r.content_type)) +
                                             ", not " + std::string(to_string(type)));
      content = *r.text;
      break;
    case TransformResult::Kind::table: {
      FormatId fmt = type == ContentType::html  ? FormatId::html_table
                     : type == ContentType::rtf ? FormatId::rtf_table
                                                : default_text_format(dest.app_name);
      content = render(*r.table, fmt).text;
      break;
    }
    case TransformResult::Kind::scalar:
      if (type != ContentType::text) throw Error(ErrorCode::ToolArgs, "a scalar can only be pasted as text");
      content = cell_text(*r.value);
      break;
  }

  PasteReceipt receipt;
  receipt.app_name = dest.app_name;
  receipt.content_type = type;
  receipt.bytes = content.size();
  receipt.key = key;
  receipt.content = content;
  bool try_direct = true;

  if (env_.plugins) {
    auto apis = env_.plugins->apis(dest.app_name);
    std::optional<std::string> api;
    if (auto a = args.find("api"); a != args.end()) {
      if (std::find(apis.begin(), apis.end(), a->get<std::string>()) == apis.end())
        throw Error(ErrorCode::ToolArgs, "no plugin API '" + a->get<std::string>() + "' for " +
                                             dest.app_name + " (have: [" + join(apis) + "])");
      api = a->get<std::string>();
    } else {
      for (const auto& name : apis)
        if (name.rfind("paste", 0) == 0) {
          api = name;
          break;
        }
    }
    if (api) {
      try {
        env_.plugins->invoke(dest.app_name, *api,
                             Json{{"content", content}, {"content_type", std::string(to_string(type))}});
        receipt.delivered = true;
        receipt.route = "plugin";
        receipts_.push_back(receipt);
        return to_json(receipt);
      } catch (const Error& e) {
        receipt.note = std::string(to_string(e.code())) + ": " + e.what();
        // A plugin that hung may still act on the request, so only the
        // clipboard is safe; any other plugin failure leaves the direct route.
        try_direct = e.code() != ErrorCode::PluginTimeout;
      }
    }
  }

  if (try_direct && env_.destination) {
    try {
      env_.destination->deliver(dest, content, type);
      receipt.delivered = true;
      receipt.route = "direct";
      receipts_.push_back(receipt);
      return to_json(receipt);
    } catch (const Error& e) {
      receipt.note = std::string(to_string(e.code())) + ": " + e.what();
    }
  }

  if (!env_.clipboard)
    throw Error(ErrorCode::Delivery, "delivery failed and no clipboard is available (" + receipt.note + ")");
  try {
    env_.clipboard->write(RawPayload{payload_for(type), content, "utf-8"});
  } catch (const Error& e) {
    throw Error(ErrorCode::Delivery,
                "destination and clipboard both failed (" + receipt.note + "; " + e.what() + ")");
  }
  receipt.delivered = true;
  receipt.fallback = true;
  receipt.route = "clipboard";
  receipts_.push_back(receipt);
  return to_json(receipt);
}

}  // namespace smartpaste::agent
