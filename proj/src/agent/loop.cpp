#include "smartpaste/agent.hpp"

namespace smartpaste::agent {

namespace {

std::string opening_message(const ContextObject& ctx) {
  std::string msg = "Clipboard summary:\n" + clipboard_summary(ctx) + "\n\n";
  msg += ctx.instruction ? "Carry out the instruction, then paste the result."
                         : "No instruction was given; convert the data for the destination and paste it.";
  return msg;
}

bool cancelled(const RunOptions& o) { return o.cancel && o.cancel->load(); }

}  // namespace

std::string_view to_string(Outcome o) {
  switch (o) {
    case Outcome::pasted: return "pasted";
    case Outcome::failed: return "failed";
    case Outcome::cancelled: return "cancelled";
  }
  return "?";
}

Json to_json(const AgentTranscript& t) {
  Json turns = Json::array();
  for (const auto& turn : t.turns) {
    Json j{{"role", turn.role}};
    if (!turn.content.empty()) j["content"] = turn.content;
    if (turn.transport_error) j["transport_error"] = true;
    if (!turn.tool_calls.empty()) {
      j["tool_calls"] = Json::array();
      for (const auto& c : turn.tool_calls)
        j["tool_calls"].push_back({{"id", c.call_id}, {"tool", c.tool}, {"args", c.args}});
    }
    if (!turn.results.empty()) {
      j["results"] = Json::array();
      for (const auto& r : turn.results) {
        Json jr{{"id", r.call_id}, {"tool", r.tool}, {"ok", r.ok}};
        if (r.ok) jr["result"] = r.result;
        else jr["error"] = r.error;
        j["results"].push_back(std::move(jr));
      }
    }
    turns.push_back(std::move(j));
  }
  Json receipts = Json::array();
  for (const auto& r : t.receipts) receipts.push_back(to_json(r));
  Json j{{"outcome", std::string(to_string(t.outcome))},
         {"retries_used", t.retries_used},
         {"turns", std::move(turns)},
         {"receipts", std::move(receipts)}};
  if (!t.error.empty()) j["error"] = t.error;
  if (t.final_text) j["final_text"] = *t.final_text;
  return j;
}

AgentTranscript run_job(ContextObject& ctx, Provider& provider, const ToolEnv& env,
                        const RunOptions& options) {
  Toolbox box(env);
  AgentTranscript t;
  auto emit = [&](std::string kind, Json data) {
    if (options.on_event) options.on_event(JobEvent{std::move(kind), std::move(data)});
  };
  auto finish = [&](Outcome o) {
    t.outcome = o;
    t.receipts = box.receipts();
    return t;
  };
  // One budget for tool errors and transport failures alike.
  auto consume_retry = [&] {
    if (t.retries_used >= kRetryBudget) return false;
    ++t.retries_used;
    emit("retry", Json{{"retries_used", t.retries_used}, {"error", t.error}});
    return true;
  };

  ProviderRequest request;
  request.system = options.system_prompt.empty() ? std::string(default_system_prompt())
                                                 : options.system_prompt;
  request.tools = tool_schemas();
  request.messages.push_back({{"role", "user"}, {"content", opening_message(ctx)}});

  for (int turn = 0; turn < options.max_turns; ++turn) {
    if (cancelled(options)) return finish(Outcome::cancelled);

    ProviderResponse response;
    emit("provider_wait", Json{{"turn", turn + 1}});
    try {
      response = provider.complete(request);
    } catch (const Error& e) {
      t.error = std::string(to_string(e.code())) + ": " + e.what();
      t.turns.push_back(Turn{"provider", e.what(), {}, {}, true});
      emit("provider_error", Json{{"error", t.error}});
      if (!consume_retry()) return finish(Outcome::failed);
      continue;
    }
    if (cancelled(options)) return finish(Outcome::cancelled);

    t.turns.push_back(Turn{"provider", response.text.value_or(""), response.tool_calls, {}, false});
    if (response.tool_calls.empty()) {
      t.final_text = response.text;
      for (const auto& r : box.receipts())
        if (r.delivered) return finish(Outcome::pasted);
      t.error = "DeliveryError: the provider finished without pasting";
      if (response.text && !response.text->empty()) t.error += ": " + *response.text;
      return finish(Outcome::failed);
    }

    Json assistant{{"role", "assistant"}};
    if (response.text) assistant["content"] = *response.text;
    assistant["tool_calls"] = Json::array();
    for (const auto& c : response.tool_calls)
      assistant["tool_calls"].push_back({{"id", c.call_id}, {"tool", c.tool}, {"args", c.args}});
    request.messages.push_back(std::move(assistant));

    Turn tool_turn{"tool", {}, {}, {}, false};
    bool failed = false;
    for (const auto& call : response.tool_calls) {
      if (cancelled(options)) {
        t.turns.push_back(std::move(tool_turn));
        return finish(Outcome::cancelled);
      }
      ToolResult result;
      if (failed) {
        result = ToolResult{call.call_id, call.tool, false, false, nullptr,
                            "Skipped: an earlier call in this response failed"};
      } else {
        emit("tool_started", Json{{"id", call.call_id}, {"tool", call.tool}});
        result = box.execute(ctx, call);
        Json done{{"id", call.call_id}, {"tool", call.tool}, {"ok", result.ok}};
        if (!result.ok) done["error"] = result.error;
        emit("tool_finished", std::move(done));
        if (!result.ok) {
          failed = true;
          t.error = result.error;
        }
      }
      Json msg{{"role", "tool"}, {"id", call.call_id}, {"tool", call.tool}, {"ok", result.ok}};
      if (result.ok) msg["content"] = result.result;
      else msg["error"] = result.error;
      request.messages.push_back(std::move(msg));
      tool_turn.results.push_back(std::move(result));
    }
    t.turns.push_back(std::move(tool_turn));
    if (failed && !consume_retry()) return finish(Outcome::failed);
  }
  t.error = "DeliveryError: turn limit of " + std::to_string(options.max_turns) + " reached";
  return finish(Outcome::failed);
}

AgentTranscript replay(const AgentTranscript& transcript, ContextObject& ctx, const ToolEnv& env) {
  std::vector<Json> responses;
  for (const auto& turn : transcript.turns) {
    if (turn.role != "provider") continue;
    if (turn.transport_error) {
      responses.push_back(Json{{"transport_error", turn.content}});
      continue;
    }
    ProviderResponse r;
    if (!turn.content.empty() || turn.tool_calls.empty()) r.text = turn.content;
    r.tool_calls = turn.tool_calls;
    responses.push_back(to_json(r));
  }
  ScriptedProvider provider(std::move(responses));
  return run_job(ctx, provider, env);
}

std::optional<std::string> pasted_content(const AgentTranscript& t) {
  for (auto it = t.receipts.rbegin(); it != t.receipts.rend(); ++it)
    if (it->delivered) return it->content;
  return std::nullopt;
}

}  // namespace smartpaste::agent
