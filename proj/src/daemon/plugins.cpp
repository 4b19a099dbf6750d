#include "smartpaste/daemon.hpp"

#include <spdlog/spdlog.h>

namespace smartpaste::daemon {

namespace {

const Json& registration_schema() {
  static const Json schema = Json::parse(R"({
    "type": "object",
    "required": ["app_name", "capabilities"],
    "properties": {
      "app_name": {"type": "string", "minLength": 1},
      "capabilities": {
        "type": "array",
        "items": {
          "type": "object",
          "required": ["api_name"],
          "additionalProperties": false,
          "properties": {
            "api_name": {"type": "string", "minLength": 1},
            "params_schema": {"type": "object"},
            "description": {"type": "string"}
          }
        }
      }
    }
  })");
  return schema;
}

}  // namespace

void PluginRegistry::register_plugin(const Json& msg, std::shared_ptr<PluginConnection> conn) {
  if (auto problem = agent::check(registration_schema(), msg, "register_plugin"))
    throw Error(ErrorCode::Schema, *problem);
  std::string app = msg["app_name"];
  std::lock_guard lock(mu_);
  if (regs_.count(app)) throw Error(ErrorCode::DuplicateApp, "a plugin for " + app + " is already registered");
  regs_[app] = Registration{msg["capabilities"], std::move(conn)};
  spdlog::info("plugin registered for {} ({} apis)", app, msg["capabilities"].size());
}

void PluginRegistry::on_result(const Json& msg) {
  std::lock_guard lock(mu_);
  auto it = pending_.find(msg.value("call_id", std::string()));
  if (it == pending_.end()) return;  // late answer to a timed-out call
  it->second.done = true;
  it->second.ok = msg.value("ok", true);
  it->second.result = msg.value("result", Json());
  it->second.error = msg.value("error", std::string("plugin reported an error"));
  cv_.notify_all();
}

void PluginRegistry::drop(const PluginConnection* conn) {
  std::lock_guard lock(mu_);
  for (auto it = regs_.begin(); it != regs_.end();) {
    if (it->second.conn.get() == conn) {
      spdlog::info("plugin for {} disconnected", it->first);
      it = regs_.erase(it);
    } else {
      ++it;
    }
  }
  for (auto& [id, p] : pending_)
    if (p.conn == conn && !p.done) {
      p.done = true;
      p.dropped = true;
    }
  cv_.notify_all();
}

std::vector<std::string> PluginRegistry::apps() const {
  std::lock_guard lock(mu_);
  std::vector<std::string> out;
  for (const auto& [app, _] : regs_) out.push_back(app);
  return out;
}

std::vector<std::string> PluginRegistry::apis(const std::string& app_name) {
  std::lock_guard lock(mu_);
  std::vector<std::string> out;
  if (auto it = regs_.find(app_name); it != regs_.end())
    for (const auto& cap : it->second.capabilities) out.push_back(cap["api_name"]);
  return out;
}

Json PluginRegistry::invoke(const std::string& app_name, const std::string& api, const Json& args) {
  std::unique_lock lock(mu_);
  auto it = regs_.find(app_name);
  if (it == regs_.end()) throw Error(ErrorCode::NoPlugin, "no plugin registered for " + app_name);
  const Json* cap = nullptr;
  for (const auto& c : it->second.capabilities)
    if (c["api_name"] == api) cap = &c;
  if (!cap) throw Error(ErrorCode::NoPlugin, app_name + " does not advertise " + api);
  if (auto s = cap->find("params_schema"); s != cap->end())
    if (auto problem = agent::check(*s, args, "args")) throw Error(ErrorCode::Schema, *problem);

  std::string call_id = "pc-" + std::to_string(next_call_++);
  auto conn = it->second.conn;
  pending_[call_id].conn = conn.get();
  lock.unlock();
  conn->send(Json{{"type", "plugin_call"}, {"call_id", call_id}, {"app_name", app_name},
                  {"api", api}, {"args", args}});
  lock.lock();
  bool answered = cv_.wait_for(lock, timeout_, [&] { return pending_[call_id].done; });
  Pending p = std::move(pending_[call_id]);
  pending_.erase(call_id);
  if (!answered)
    throw Error(ErrorCode::PluginTimeout, app_name + "." + api + " did not answer within " +
                                              std::to_string(timeout_.count()) + " ms");
  if (p.dropped) throw Error(ErrorCode::NoPlugin, app_name + " disconnected");
  if (!p.ok) throw Error(ErrorCode::Delivery, app_name + "." + api + " failed: " + p.error);
  return p.result;
}

}  // namespace smartpaste::daemon
