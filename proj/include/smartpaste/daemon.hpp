#pragma once

// The local service: context history, job scheduling, plugin registry and
// the wire/1 websocket protocol in front of them.

#include "smartpaste/agent.hpp"
#include "smartpaste/clipboard.hpp"
#include "smartpaste/json.hpp"

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <deque>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <thread>
#include <vector>

namespace smartpaste::daemon {

inline constexpr std::string_view kWireVersion = "wire/1";

struct DaemonConfig {
  std::string provider_endpoint;  // http:// URL; unused in scripted mode
  int provider_timeout_s = 60;    // provider calls and plugin calls
  std::string hotkey = "Ctrl+Shift+V";  // informational, bound by OS adapters
  std::filesystem::path temp_dir;
  int listen_port = 8765;
  std::string log_level = "info";
  std::size_t history_size = 20;
  std::size_t max_concurrent_jobs = 2;
  int heartbeat_ms = 5000;
  std::optional<std::filesystem::path> scripted_provider;
  std::optional<std::filesystem::path> event_log;  // append job events as JSON lines
  std::optional<std::filesystem::path> system_prompt;
  std::optional<std::uint64_t> id_seed;  // reproducible context/job ids
};

/// Unknown keys and wrong types raise Error(Config).
DaemonConfig config_from_json(const Json& j);
DaemonConfig load_config(const std::filesystem::path& path);
Json to_json(const DaemonConfig& c);
/// Fills defaults (temp_dir) and checks temp_dir can be created and written.
void prepare(DaemonConfig& c);

enum class JobState { pending, running, awaiting_provider, pasted, failed, cancelled };
std::string_view to_string(JobState s);
bool is_terminal(JobState s);

struct JobEvent {
  std::string job_id;
  std::size_t seq = 0;
  std::string kind;  // state, tool_started, tool_finished, retry, provider_error, pasted, failed, cancelled
  Json data = Json::object();
  bool terminal() const { return kind == "pasted" || kind == "failed" || kind == "cancelled"; }
};
Json to_wire(const JobEvent& e);

// --- plugins -----------------------------------------------------------------------------

class PluginConnection {
 public:
  virtual ~PluginConnection() = default;
  virtual void send(const Json& msg) = 0;
};

/// Live plugin registrations. Registrations die with their connection;
/// the transport reports drops (closed sockets, missed heartbeats).
class PluginRegistry : public agent::PluginGateway {
 public:
  explicit PluginRegistry(std::chrono::milliseconds call_timeout) : timeout_(call_timeout) {}

  /// Throws Error(Schema) for a malformed payload, Error(DuplicateApp) when
  /// the app already has a live registration.
  void register_plugin(const Json& msg, std::shared_ptr<PluginConnection> conn);
  void on_result(const Json& msg);
  /// Removes every registration on `conn` and fails its in-flight calls.
  void drop(const PluginConnection* conn);

  std::vector<std::string> apps() const;
  std::vector<std::string> apis(const std::string& app_name) override;
  /// Throws NoPlugin (no registration or unadvertised api), Schema (args do
  /// not match params_schema), PluginTimeout.
  Json invoke(const std::string& app_name, const std::string& api, const Json& args) override;

 private:
  struct Registration {
    Json capabilities;
    std::shared_ptr<PluginConnection> conn;
  };
  struct Pending {
    const PluginConnection* conn = nullptr;
    bool done = false;
    bool ok = false;
    bool dropped = false;
    Json result;
    std::string error;
  };

  std::chrono::milliseconds timeout_;
  mutable std::mutex mu_;
  std::condition_variable cv_;
  std::map<std::string, Registration> regs_;
  std::map<std::string, Pending> pending_;
  std::uint64_t next_call_ = 1;
};

// --- daemon --------------------------------------------------------------------------------

/// Builds the provider for one job; `index` counts jobs from 0 in creation order.
using ProviderFactory =
    std::function<std::unique_ptr<agent::Provider>(const std::string& job_id, std::size_t index)>;

/// Scripted mode: job i gets script i of the transcript file; an exhausted
/// file yields a provider that only fails.
ProviderFactory scripted_factory(std::vector<Json> scripts);
ProviderFactory http_factory(std::string endpoint, std::chrono::seconds timeout);
/// Picks scripted mode when config.scripted_provider is set.
ProviderFactory factory_for(const DaemonConfig& config);

class Daemon {
 public:
  Daemon(DaemonConfig config, ProviderFactory providers, DestinationAdapter& destination,
         ClipboardAdapter& clipboard);
  ~Daemon();
  Daemon(const Daemon&) = delete;
  Daemon& operator=(const Daemon&) = delete;

  /// Stores the snapshot as the current context. Snapshots with no payloads
  /// are ignored (nullopt).
  std::optional<std::string> on_copy(ClipboardSnapshot snapshot);

  /// Queues a job on the addressed (or current) context; returns its id.
  /// Throws Error(NoContext).
  std::string smart_paste(AppContext dest, std::optional<std::string> instruction,
                          std::optional<std::string> context_id = std::nullopt);

  /// Throws Error(UnknownJob).
  std::vector<JobEvent> job_events(const std::string& job_id) const;
  /// Replays the log, then forwards live events, in order, until the
  /// terminal one. `fn` runs on daemon threads and must not block.
  std::uint64_t subscribe(const std::string& job_id, std::function<void(const JobEvent&)> fn);
  void unsubscribe(std::uint64_t token);
  /// True once the job is terminal.
  bool wait(const std::string& job_id, std::chrono::milliseconds timeout) const;
  void cancel(const std::string& job_id);

  JobState state(const std::string& job_id) const;
  agent::AgentTranscript transcript(const std::string& job_id) const;
  std::string job_context(const std::string& job_id) const;
  std::optional<ContextObject> context(const std::string& context_id) const;
  std::optional<std::string> current_context() const;
  Json list_history() const;

  PluginRegistry& plugins() { return plugins_; }
  const DaemonConfig& config() const { return config_; }

  /// Cancels pending and running jobs and joins the workers.
  void stop();

 private:
  struct Entry;
  struct Job;

  void worker();
  void run(const std::shared_ptr<Job>& job);
  void emit(Job& job, std::string kind, Json data);
  void set_state(Job& job, JobState s);
  void finish(Job& job, JobState s, Json data);
  void retire(const std::shared_ptr<Entry>& entry);
  void maybe_cleanup(const std::shared_ptr<Entry>& entry);
  std::shared_ptr<Job> find_job(const std::string& job_id) const;
  std::string next_id();

  DaemonConfig config_;
  ProviderFactory providers_;
  DestinationAdapter& destination_;
  ClipboardAdapter& clipboard_;
  PluginRegistry plugins_;
  std::string system_prompt_;

  mutable std::mutex mu_;
  std::condition_variable work_cv_;
  mutable std::condition_variable done_cv_;
  std::deque<std::shared_ptr<Entry>> history_;  // front = current
  std::vector<std::shared_ptr<Entry>> retired_;
  std::map<std::string, std::shared_ptr<Job>> jobs_;
  std::deque<std::shared_ptr<Job>> queue_;
  std::set<std::string> busy_contexts_;
  std::map<std::uint64_t, std::string> subscriptions_;
  std::uint64_t next_token_ = 1;
  std::size_t job_count_ = 0;
  bool stopping_ = false;
  std::function<std::string()> ids_;
  std::mutex log_mu_;
  std::vector<std::thread> workers_;
};

// --- wire/1 over websockets -----------------------------------------------------------------

/// Serves wire/1 on a loopback port. Connections run with keep-alive pings
/// and drop after heartbeat_ms of silence.
class WireServer {
 public:
  WireServer(Daemon& daemon, unsigned short port);
  ~WireServer();
  unsigned short port() const { return port_; }
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  unsigned short port_ = 0;
};

/// Client side of wire/1; reads on a background thread.
class WireClient {
 public:
  WireClient(const std::string& host, unsigned short port);
  ~WireClient();

  /// Stamps "v" and sends.
  void send(Json msg);
  /// Next message, or nullopt on timeout. Throws Error(Io) once the
  /// connection is closed and drained.
  std::optional<Json> receive(std::chrono::milliseconds timeout);
  /// Sends with a fresh request_id and waits for the matching reply;
  /// other messages stay queued. Throws Error(Io) on timeout.
  Json request(Json msg, std::chrono::milliseconds timeout = std::chrono::seconds(10));
  void close();
  /// Stops answering pings without closing the socket (simulates a hung peer).
  void freeze();
  bool closed() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// A plugin that answers every plugin_call by echoing its args; used by tests
/// and the `plugin-echo` CLI command.
class EchoPlugin {
 public:
  EchoPlugin(const std::string& host, unsigned short port, std::string app_name,
             std::vector<std::string> apis, std::chrono::milliseconds delay = {});
  ~EchoPlugin();
  Json registration_reply() const { return reply_; }
  std::size_t calls() const { return calls_.load(); }
  WireClient& client() { return *client_; }
  void stop();

 private:
  std::unique_ptr<WireClient> client_;
  Json reply_;
  std::chrono::milliseconds delay_;
  std::atomic<bool> stop_{false};
  std::atomic<std::size_t> calls_{0};
  std::thread loop_;
};

}  // namespace smartpaste::daemon
