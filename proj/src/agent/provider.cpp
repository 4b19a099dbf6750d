#include "smartpaste/agent.hpp"

#include <httplib.h>

#include <regex>

namespace smartpaste::agent {

namespace {

constexpr char kPrompt[] =
#include "prompt.inc"
    ;

ToolCall call_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("tool") || !j["tool"].is_string())
    throw Error(ErrorCode::Schema, "tool call needs a string 'tool'");
  ToolCall c;
  c.tool = j["tool"];
  c.call_id = j.value("id", std::string());
  c.args = j.value("args", Json::object());
  return c;
}

Json call_to_json(const ToolCall& c) {
  return Json{{"id", c.call_id}, {"tool", c.tool}, {"args", c.args}};
}

}  // namespace

std::string_view default_system_prompt() { return kPrompt; }

Json to_json(const ProviderRequest& r) {
  return Json{{"system", r.system}, {"messages", r.messages}, {"tools", r.tools}};
}

Json to_json(const ProviderResponse& r) {
  Json j = Json::object();
  if (r.text) j["text"] = *r.text;
  if (!r.tool_calls.empty()) {
    j["tool_calls"] = Json::array();
    for (const auto& c : r.tool_calls) j["tool_calls"].push_back(call_to_json(c));
  }
  return j;
}

ProviderResponse provider_response_from_json(const Json& j) {
  if (!j.is_object()) throw Error(ErrorCode::Schema, "provider response must be an object");
  ProviderResponse r;
  if (auto t = j.find("text"); t != j.end() && !t->is_null()) {
    if (!t->is_string()) throw Error(ErrorCode::Schema, "'text' must be a string");
    r.text = t->get<std::string>();
  }
  if (auto calls = j.find("tool_calls"); calls != j.end()) {
    if (!calls->is_array()) throw Error(ErrorCode::Schema, "'tool_calls' must be an array");
    for (const auto& c : *calls) r.tool_calls.push_back(call_from_json(c));
  }
  if (!r.text && r.tool_calls.empty())
    throw Error(ErrorCode::Schema, "provider response has neither text nor tool_calls");
  // Calls without ids get positional ones so results can still be matched.
  for (std::size_t i = 0; i < r.tool_calls.size(); ++i)
    if (r.tool_calls[i].call_id.empty()) r.tool_calls[i].call_id = "call-" + std::to_string(i + 1);
  return r;
}

ScriptedProvider ScriptedProvider::from_json(const Json& script) {
  const Json& list = script.is_array() ? script : script.at("responses");
  return ScriptedProvider(std::vector<Json>(list.begin(), list.end()));
}

ProviderResponse ScriptedProvider::complete(const ProviderRequest& request) {
  requests_.push_back(request);
  if (script_.empty())
    throw Error(ErrorCode::ProviderTransport, "scripted provider has no responses left");
  Json next = std::move(script_.front());
  script_.pop_front();
  if (auto e = next.find("transport_error"); e != next.end())
    throw Error(ErrorCode::ProviderTransport, e->get<std::string>());
  return provider_response_from_json(next);
}

std::vector<Json> load_scripts(const Json& file) {
  std::vector<Json> out;
  if (file.is_object() && file.contains("jobs")) {
    for (const auto& job : file["jobs"]) out.push_back(job.is_array() ? job : job.at("responses"));
  } else if (file.is_object() && file.contains("responses")) {
    out.push_back(file["responses"]);
  } else if (file.is_array()) {
    out.push_back(file);
  } else {
    throw Error(ErrorCode::Schema, "transcript needs 'jobs' or 'responses'");
  }
  return out;
}

HttpProvider::HttpProvider(std::string endpoint, std::chrono::seconds timeout)
    : endpoint_(std::move(endpoint)), timeout_(timeout) {
  static const std::regex url(R"(^http://[^/]+(/.*)?$)");
  if (!std::regex_match(endpoint_, url))
    throw Error(ErrorCode::Config, "provider endpoint must be an http:// URL: " + endpoint_);
}

ProviderResponse HttpProvider::complete(const ProviderRequest& request) {
  std::size_t slash = endpoint_.find('/', 7);
  std::string base = endpoint_.substr(0, slash);
  std::string path = slash == std::string::npos ? "/" : endpoint_.substr(slash);

  httplib::Client client(base);
  client.set_connection_timeout(timeout_);
  client.set_read_timeout(timeout_);
  client.set_write_timeout(timeout_);
  auto res = client.Post(path, to_json(request).dump(), "application/json");
  if (!res)
    throw Error(ErrorCode::ProviderTransport,
                "provider request failed: " + httplib::to_string(res.error()));
  if (res->status != 200)
    throw Error(ErrorCode::ProviderTransport, "provider answered HTTP " + std::to_string(res->status));
  try {
    return provider_response_from_json(Json::parse(res->body));
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::ProviderTransport, std::string("provider sent invalid JSON: ") + e.what());
  } catch (const Error& e) {
    throw Error(ErrorCode::ProviderTransport, std::string("provider sent a malformed response: ") + e.what());
  }
}

}  // namespace smartpaste::agent
