#include "smartpaste/daemon.hpp"

#include <fstream>

namespace smartpaste::daemon {

namespace {

Error config_error(const std::string& what) { return Error(ErrorCode::Config, what); }

template <typename T>
T get(const Json& j, const char* key) {
  try {
    return j.at(key).get<T>();
  } catch (const Json::exception&) {
    throw config_error(std::string("config key '") + key + "' has the wrong type");
  }
}

}  // namespace

DaemonConfig config_from_json(const Json& j) {
  if (!j.is_object()) throw config_error("config must be a JSON object");
  DaemonConfig c;
  for (const auto& [key, value] : j.items()) {
    const char* k = key.c_str();
    if (key == "provider_endpoint") c.provider_endpoint = get<std::string>(j, k);
    else if (key == "provider_timeout_s") c.provider_timeout_s = get<int>(j, k);
    else if (key == "hotkey") c.hotkey = get<std::string>(j, k);
    else if (key == "temp_dir") c.temp_dir = get<std::string>(j, k);
    else if (key == "listen_port") c.listen_port = get<int>(j, k);
    else if (key == "log_level") c.log_level = get<std::string>(j, k);
    else if (key == "history_size") c.history_size = get<std::size_t>(j, k);
    else if (key == "max_concurrent_jobs") c.max_concurrent_jobs = get<std::size_t>(j, k);
    else if (key == "heartbeat_ms") c.heartbeat_ms = get<int>(j, k);
    else if (key == "scripted_provider") c.scripted_provider = get<std::string>(j, k);
    else if (key == "event_log") c.event_log = get<std::string>(j, k);
    else if (key == "system_prompt") c.system_prompt = get<std::string>(j, k);
    else if (key == "id_seed") c.id_seed = get<std::uint64_t>(j, k);
    else throw config_error("unknown config key '" + key + "'");
  }
  if (c.provider_timeout_s <= 0) throw config_error("provider_timeout_s must be positive");
  if (c.listen_port < 0 || c.listen_port > 65535) throw config_error("listen_port out of range");
  if (c.history_size == 0) throw config_error("history_size must be at least 1");
  if (c.max_concurrent_jobs == 0) throw config_error("max_concurrent_jobs must be at least 1");
  if (c.heartbeat_ms <= 0) throw config_error("heartbeat_ms must be positive");
  static const std::set<std::string> levels{"trace", "debug", "info", "warn", "error", "off"};
  if (!levels.count(c.log_level)) throw config_error("unknown log_level '" + c.log_level + "'");
  return c;
}

DaemonConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw config_error("cannot read config " + path.string());
  try {
    return config_from_json(Json::parse(in));
  } catch (const Json::parse_error& e) {
    throw config_error("config " + path.string() + " is not JSON: " + e.what());
  }
}

Json to_json(const DaemonConfig& c) {
  Json j{{"provider_endpoint", c.provider_endpoint},
         {"provider_timeout_s", c.provider_timeout_s},
         {"hotkey", c.hotkey},
         {"temp_dir", c.temp_dir.string()},
         {"listen_port", c.listen_port},
         {"log_level", c.log_level},
         {"history_size", c.history_size},
         {"max_concurrent_jobs", c.max_concurrent_jobs},
         {"heartbeat_ms", c.heartbeat_ms}};
  if (c.scripted_provider) j["scripted_provider"] = c.scripted_provider->string();
  if (c.event_log) j["event_log"] = c.event_log->string();
  if (c.system_prompt) j["system_prompt"] = c.system_prompt->string();
  if (c.id_seed) j["id_seed"] = *c.id_seed;
  return j;
}

void prepare(DaemonConfig& c) {
  if (c.temp_dir.empty()) c.temp_dir = std::filesystem::temp_directory_path() / "smartpaste";
  std::error_code ec;
  std::filesystem::create_directories(c.temp_dir, ec);
  if (ec) throw config_error("cannot create temp_dir " + c.temp_dir.string() + ": " + ec.message());
  auto probe = c.temp_dir / ".write-probe";
  {
    std::ofstream out(probe);
    out << "ok";
    if (!out) throw config_error("temp_dir " + c.temp_dir.string() + " is not writable");
  }
  std::filesystem::remove(probe, ec);
  if (!c.scripted_provider && c.provider_endpoint.empty())
    throw config_error("set provider_endpoint or scripted_provider");
}

}  // namespace smartpaste::daemon
