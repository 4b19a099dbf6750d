#include "smartpaste/clipboard.hpp"

#include "smartpaste/error.hpp"
#include "smartpaste/text.hpp"

#include <fstream>
#include <set>
#include <sstream>

namespace smartpaste {

std::string_view to_string(PayloadKind k) {
  switch (k) {
    case PayloadKind::text: return "text";
    case PayloadKind::html: return "html";
    case PayloadKind::rtf: return "rtf";
    case PayloadKind::image: return "image";
  }
  return "text";
}

std::string_view to_string(ContentType c) {
  switch (c) {
    case ContentType::text: return "text";
    case ContentType::html: return "html";
    case ContentType::rtf: return "rtf";
  }
  return "text";
}

std::optional<PayloadKind> payload_kind_from_string(std::string_view s) {
  if (s == "text") return PayloadKind::text;
  if (s == "html") return PayloadKind::html;
  if (s == "rtf") return PayloadKind::rtf;
  if (s == "image") return PayloadKind::image;
  return std::nullopt;
}

std::optional<ContentType> content_type_from_string(std::string_view s) {
  if (s == "text") return ContentType::text;
  if (s == "html") return ContentType::html;
  if (s == "rtf") return ContentType::rtf;
  return std::nullopt;
}

void RawPayload::validate() const {
  if (kind == PayloadKind::image) {
    static constexpr std::string_view kPng("\x89PNG\r\n\x1a\n", 8);
    static constexpr std::string_view kJpeg("\xFF\xD8\xFF", 3);
    std::string_view b(bytes);
    if (b.substr(0, kPng.size()) != kPng && b.substr(0, kJpeg.size()) != kJpeg)
      throw Error(ErrorCode::InvalidPayload, "image payload is not a PNG or JPEG container");
    return;
  }
  std::string enc = text::lower(encoding);
  if (enc != "utf-8" && enc != "utf8")
    throw Error(ErrorCode::InvalidPayload, "unsupported text encoding '" + encoding + "'");
  if (!text::is_valid_utf8(bytes))
    throw Error(ErrorCode::InvalidPayload,
                std::string(to_string(kind)) + " payload does not decode as UTF-8");
}

Json to_json(const AppContext& app) {
  Json j = {{"app_name", app.app_name},
                      {"process_id", app.process_id},
                      {"window_title", app.window_title}};
  if (app.icon) j["icon"] = text::base64_encode(*app.icon);
  return j;
}

AppContext app_context_from_json(const Json& j) {
  AppContext app;
  app.app_name = j.at("app_name").get<std::string>();
  app.process_id = j.value("process_id", std::int64_t{0});
  app.window_title = j.value("window_title", std::string{});
  if (app.process_id < 0) throw Error(ErrorCode::Schema, "process_id must be >= 0");
  if (j.contains("icon") && j["icon"].is_string()) {
    auto icon = text::base64_decode(j["icon"].get<std::string>());
    if (!icon) throw Error(ErrorCode::Schema, "icon is not valid base64");
    app.icon = std::move(*icon);
  }
  return app;
}

const RawPayload* ClipboardSnapshot::find(PayloadKind kind) const {
  for (const auto& p : payloads)
    if (p.kind == kind) return &p;
  return nullptr;
}

void ClipboardSnapshot::validate() const {
  if (payloads.empty()) throw Error(ErrorCode::EmptyFixture, "snapshot has no payloads");
  std::set<PayloadKind> seen;
  for (const auto& p : payloads) {
    if (!seen.insert(p.kind).second)
      throw Error(ErrorCode::DuplicateKind,
                  "more than one " + std::string(to_string(p.kind)) + " payload");
    p.validate();
  }
}

ClipboardSnapshot parse_sim_fixture(std::string_view json_text) {
  Json j;
  try {
    j = Json::parse(json_text);
  } catch (const Json::parse_error& e) {
    throw Error(ErrorCode::FixtureParse, std::string("fixture is not JSON: ") + e.what());
  }
  ClipboardSnapshot snap;
  try {
    if (!j.is_object() || !j.contains("source") || !j.contains("payloads") ||
        !j["payloads"].is_array())
      throw Error(ErrorCode::FixtureParse, "fixture needs 'source' and a 'payloads' array");
    snap.source = app_context_from_json(j["source"]);
    for (const auto& jp : j["payloads"]) {
      RawPayload p;
      auto kind = payload_kind_from_string(jp.at("kind").get<std::string>());
      if (!kind) throw Error(ErrorCode::FixtureParse, "unknown payload kind " + jp["kind"].dump());
      p.kind = *kind;
      std::string data = jp.at("data").get<std::string>();
      std::string enc = jp.value("encoding", std::string("utf8"));
      if (enc == "base64") {
        auto decoded = text::base64_decode(data);
        if (!decoded) throw Error(ErrorCode::FixtureParse, "payload data is not valid base64");
        p.bytes = std::move(*decoded);
      } else if (enc == "utf8") {
        p.bytes = std::move(data);
      } else {
        throw Error(ErrorCode::FixtureParse, "unknown payload encoding '" + enc + "'");
      }
      snap.payloads.push_back(std::move(p));
    }
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::FixtureParse, std::string("malformed fixture: ") + e.what());
  } catch (const Error& e) {
    if (e.code() == ErrorCode::Schema) throw Error(ErrorCode::FixtureParse, e.what());
    throw;
  }
  if (snap.payloads.empty()) throw Error(ErrorCode::EmptyFixture, "fixture has no payloads");
  try {
    snap.validate();
  } catch (const Error& e) {
    if (e.code() == ErrorCode::InvalidPayload) throw Error(ErrorCode::FixtureParse, e.what());
    throw;
  }
  snap.captured_at = std::chrono::steady_clock::now();
  return snap;
}

ClipboardSnapshot load_sim_fixture(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open fixture " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_sim_fixture(ss.str());
}

Json encode_sim_fixture(const ClipboardSnapshot& snapshot) {
  Json payloads = Json::array();
  for (const auto& p : snapshot.payloads) {
    bool as_text = p.kind != PayloadKind::image && text::is_valid_utf8(p.bytes);
    payloads.push_back({{"kind", to_string(p.kind)},
                        {"data", as_text ? p.bytes : text::base64_encode(p.bytes)},
                        {"encoding", as_text ? "utf8" : "base64"}});
  }
  Json source = {{"app_name", snapshot.source.app_name},
                           {"process_id", snapshot.source.process_id},
                           {"window_title", snapshot.source.window_title}};
  return {{"source", std::move(source)}, {"payloads", std::move(payloads)}};
}

TransformResult TransformResult::of_table(StructuredTable t) {
  TransformResult r;
  r.kind = Kind::table;
  r.table = std::move(t);
  return r;
}

TransformResult TransformResult::of_text(std::string text, ContentType type) {
  TransformResult r;
  r.kind = Kind::rendered_text;
  r.text = std::move(text);
  r.content_type = type;
  return r;
}

TransformResult TransformResult::of_scalar(CellValue v) {
  TransformResult r;
  r.kind = Kind::scalar;
  r.value = std::move(v);
  return r;
}

std::string_view to_string(TransformResult::Kind k) {
  switch (k) {
    case TransformResult::Kind::table: return "table";
    case TransformResult::Kind::rendered_text: return "rendered_text";
    case TransformResult::Kind::scalar: return "scalar";
  }
  return "table";
}

Json to_json(const TransformResult& r) {
  Json j = {{"kind", to_string(r.kind)}};
  switch (r.kind) {
    case TransformResult::Kind::table: j["table"] = to_json(*r.table); break;
    case TransformResult::Kind::rendered_text:
      j["text"] = *r.text;
      j["content_type"] = to_string(r.content_type);
      break;
    case TransformResult::Kind::scalar: j["value"] = to_json(*r.value); break;
  }
  return j;
}

ContextObject new_context(ClipboardSnapshot snapshot) {
  ContextObject ctx;
  ctx.snapshot = std::move(snapshot);
  return ctx;
}

ContextObject attach_destination(ContextObject ctx, AppContext dest,
                                 std::optional<std::string> instruction) {
  ctx.destination = std::move(dest);
  if (instruction && instruction->empty()) instruction.reset();
  ctx.instruction = std::move(instruction);
  return ctx;
}

Json context_view(const ContextObject& ctx) {
  Json raw = Json::object();
  for (const auto& p : ctx.snapshot.payloads)
    raw[std::string(to_string(p.kind))] =
        p.kind == PayloadKind::image ? "<image " + std::to_string(p.bytes.size()) + " bytes>"
                                     : p.bytes;
  Json structured = Json::array();
  for (const auto& t : ctx.structured) structured.push_back(to_json(t));
  Json transformations = Json::object();
  for (const auto& [k, v] : ctx.transformations) transformations[k] = to_json(v);
  Json view = {{"raw", std::move(raw)},
                                 {"structured", std::move(structured)},
                                 {"metadata", ctx.metadata},
                                 {"transformations", std::move(transformations)}};
  view["source"] = to_json(ctx.snapshot.source);
  if (ctx.destination) view["destination"] = to_json(*ctx.destination);
  if (ctx.instruction) view["instruction"] = *ctx.instruction;
  return view;
}

void SimulatedClipboard::load(ClipboardSnapshot snapshot) {
  std::lock_guard lock(mu_);
  current_ = std::move(snapshot);
}

std::optional<ClipboardSnapshot> SimulatedClipboard::capture() {
  std::lock_guard lock(mu_);
  return current_;
}

void SimulatedClipboard::write(const RawPayload& payload) {
  std::lock_guard lock(mu_);
  if (!available_) throw Error(ErrorCode::Delivery, "clipboard unavailable");
  writes_.push_back(payload);
  ClipboardSnapshot snap;
  snap.payloads.push_back(payload);
  snap.source.app_name = "sim:smartpaste";
  snap.captured_at = std::chrono::steady_clock::now();
  current_ = std::move(snap);
}

void SimulatedClipboard::set_available(bool available) {
  std::lock_guard lock(mu_);
  available_ = available;
}

std::vector<RawPayload> SimulatedClipboard::writes() const {
  std::lock_guard lock(mu_);
  return writes_;
}

void SimulatedDestination::deliver(const AppContext& dest, std::string_view content,
                                   ContentType type) {
  std::lock_guard lock(mu_);
  auto it = down_.find(dest.app_name);
  if (it != down_.end() && it->second)
    throw Error(ErrorCode::Delivery, "destination " + dest.app_name + " is not accepting pastes");
  deliveries_.push_back({dest, std::string(content), type});
}

void SimulatedDestination::set_down(const std::string& app_name, bool down) {
  std::lock_guard lock(mu_);
  down_[app_name] = down;
}

std::vector<Delivery> SimulatedDestination::deliveries() const {
  std::lock_guard lock(mu_);
  return deliveries_;
}

}  // namespace smartpaste
