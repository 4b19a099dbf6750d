#pragma once

// The tool-calling loop: a provider proposes tool calls, the toolbox runs
// them against one ContextObject, and the retry budget decides when to stop.

#include "smartpaste/clipboard.hpp"
#include "smartpaste/codec.hpp"
#include "smartpaste/error.hpp"
#include "smartpaste/json.hpp"

#include <atomic>
#include <chrono>
#include <deque>
#include <filesystem>
#include <functional>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace smartpaste::agent {

enum class ToolId {
  get_clipboard_summary,
  add_structured_data,
  add_metadata,
  sample_context,
  add_transformation,
  run_query,
  write_temp_file,
  paste_to_destination,
};

std::string_view to_string(ToolId t);
std::optional<ToolId> tool_from_string(std::string_view name);
const std::vector<ToolId>& all_tools();

/// Tool descriptors in the provider wire shape: [{name, description, parameters}].
const Json& tool_schemas();

/// Validates `value` against the JSON-Schema subset the tool and plugin
/// descriptors use: type, enum, required, properties, additionalProperties,
/// minLength, minimum, items, oneOf. Returns the first problem, prefixed by `where`.
std::optional<std::string> check(const Json& schema, const Json& value, const std::string& where);

/// Checks `args` against the tool's parameter schema; returns the first
/// problem ("args.key: expected string") or nullopt.
std::optional<std::string> validate_args(ToolId tool, const Json& args);

/// A call as the provider sent it; the tool name is not trusted yet.
struct ToolCall {
  std::string call_id;
  std::string tool;
  Json args = Json::object();
  friend bool operator==(const ToolCall&, const ToolCall&) = default;
};

struct ToolResult {
  std::string call_id;
  std::string tool;
  bool ok = false;
  bool executed = false;  // false for rejected or skipped calls
  Json result;            // success payload
  std::string error;      // "<Code>: message" on failure
};

struct PasteReceipt {
  bool delivered = false;
  bool fallback = false;
  std::string route;  // "plugin", "direct" or "clipboard"
  std::string app_name;
  ContentType content_type = ContentType::text;
  std::size_t bytes = 0;
  std::string note;  // why a fallback happened
  std::string key;
  std::string content;  // not serialized
};
Json to_json(const PasteReceipt& r);

/// The paste APIs live plugins expose. Implemented by the daemon's registry.
class PluginGateway {
 public:
  virtual ~PluginGateway() = default;
  /// API names advertised by the live registration for `app_name`.
  virtual std::vector<std::string> apis(const std::string& app_name) = 0;
  /// Throws Error(NoPlugin) or Error(PluginTimeout).
  virtual Json invoke(const std::string& app_name, const std::string& api, const Json& args) = 0;
};

/// What the tools may touch besides the context.
struct ToolEnv {
  DestinationAdapter* destination = nullptr;
  ClipboardAdapter* clipboard = nullptr;
  PluginGateway* plugins = nullptr;
  std::filesystem::path temp_dir;
  std::string job_id = "job";
};

inline constexpr std::size_t kSummarySampleChars = 10000;
inline constexpr std::string_view kTruncatedMarker = "\xE2\x80\xA6[truncated]";
inline constexpr std::size_t kSampleMaxRows = 50;
inline constexpr std::size_t kSampleMaxChars = 4000;

struct Sample {
  std::string kind;  // payload kind the sample came from
  std::string text;  // at most kSummarySampleChars code points, plus marker when cut
  bool truncated = false;
};
Sample raw_sample(const ClipboardSnapshot& snapshot);
std::string clipboard_summary(const ContextObject& ctx);

/// Default text rendering for a destination app (latex for overleaf-like
/// editors, tsv for spreadsheets, csv for notebooks, markdown otherwise).
FormatId default_text_format(std::string_view app_name);

/// Runs one tool call. Arguments that fail validation are rejected before
/// anything runs; tool failures come back as ok=false with the error text.
class Toolbox {
 public:
  explicit Toolbox(ToolEnv env) : env_(std::move(env)) {}
  ToolResult execute(ContextObject& ctx, const ToolCall& call);
  const std::vector<PasteReceipt>& receipts() const { return receipts_; }

 private:
  Json run(ToolId tool, ContextObject& ctx, const Json& args);
  Json paste(ContextObject& ctx, const Json& args);
  Json write_temp_file(ContextObject& ctx, const Json& args);

  ToolEnv env_;
  std::vector<PasteReceipt> receipts_;
};

// --- provider --------------------------------------------------------------------

struct ProviderRequest {
  std::string system;
  Json messages = Json::array();
  Json tools = Json::array();
};
Json to_json(const ProviderRequest& r);

struct ProviderResponse {
  std::optional<std::string> text;
  std::vector<ToolCall> tool_calls;
};
Json to_json(const ProviderResponse& r);
/// Accepts {text} or {tool_calls:[{id, tool, args}]}; throws Error(Schema).
ProviderResponse provider_response_from_json(const Json& j);

class Provider {
 public:
  virtual ~Provider() = default;
  /// Throws Error(ProviderTransport) when the endpoint cannot be reached or
  /// answers garbage.
  virtual ProviderResponse complete(const ProviderRequest& request) = 0;
};

/// Replays fixed responses. A scripted entry {"transport_error": msg} throws
/// a transport error instead of answering.
class ScriptedProvider : public Provider {
 public:
  explicit ScriptedProvider(std::vector<Json> responses) : script_(responses.begin(), responses.end()) {}
  /// {"responses": [...]} for one job.
  static ScriptedProvider from_json(const Json& script);
  ProviderResponse complete(const ProviderRequest& request) override;
  const std::vector<ProviderRequest>& requests() const { return requests_; }
  std::size_t remaining() const { return script_.size(); }

 private:
  std::deque<Json> script_;
  std::vector<ProviderRequest> requests_;
};

/// A transcript file holds one script per job, in job order; a single-job
/// file may hold "responses" at top level.
std::vector<Json> load_scripts(const Json& transcript_file);

/// POSTs the request JSON to an http:// endpoint.
class HttpProvider : public Provider {
 public:
  HttpProvider(std::string endpoint, std::chrono::seconds timeout);
  ProviderResponse complete(const ProviderRequest& request) override;

 private:
  std::string endpoint_;
  std::chrono::seconds timeout_;
};

/// The versioned system prompt shipped with the library.
std::string_view default_system_prompt();

// --- job loop ----------------------------------------------------------------------

enum class Outcome { pasted, failed, cancelled };
std::string_view to_string(Outcome o);

struct Turn {
  std::string role;  // "provider" or "tool"
  std::string content;
  std::vector<ToolCall> tool_calls;
  std::vector<ToolResult> results;
  bool transport_error = false;
};

struct AgentTranscript {
  std::vector<Turn> turns;
  int retries_used = 0;
  Outcome outcome = Outcome::failed;
  std::string error;  // last error, kept for the UI
  std::vector<PasteReceipt> receipts;
  std::optional<std::string> final_text;
};
Json to_json(const AgentTranscript& t);

inline constexpr int kRetryBudget = 3;

struct JobEvent {
  std::string kind;  // provider_wait, tool_started, tool_finished, retry, provider_error
  Json data;
};

struct RunOptions {
  std::string system_prompt;  // empty = default_system_prompt()
  const std::atomic<bool>* cancel = nullptr;
  std::function<void(const JobEvent&)> on_event;
  int max_turns = 40;
};

/// Drives provider and tools until a paste is confirmed by final text, the
/// retry budget runs out, or the job is cancelled. Tool calls within a
/// response run in order; the first failing call stops the rest of that
/// response and costs one retry.
AgentTranscript run_job(ContextObject& ctx, Provider& provider, const ToolEnv& env,
                        const RunOptions& options = {});

/// Re-runs the provider side of `transcript` against `ctx`.
AgentTranscript replay(const AgentTranscript& transcript, ContextObject& ctx, const ToolEnv& env);

/// Content of the job's delivered paste, if any.
std::optional<std::string> pasted_content(const AgentTranscript& t);

}  // namespace smartpaste::agent
