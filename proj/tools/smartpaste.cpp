// smartpaste: the daemon and its headless clients.
//
// Exit codes: 0 success, 1 infrastructure error (cannot connect, bad files),
// 2 the job or conversion failed, 3 usage error.

#include "smartpaste/codec.hpp"
#include "smartpaste/corpus.hpp"
#include "smartpaste/daemon.hpp"
#include "smartpaste/plan.hpp"

#include <CLI11.hpp>
#include <spdlog/spdlog.h>

#include <csignal>
#include <fstream>
#include <iostream>
#include <sstream>

using namespace smartpaste;
using namespace std::chrono_literals;

namespace {

constexpr int kOk = 0, kInfra = 1, kFailed = 2, kUsage = 3;

volatile std::sig_atomic_t g_stop = 0;
void on_signal(int) { g_stop = 1; }

void wait_for_signal() {
  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);
  while (!g_stop) std::this_thread::sleep_for(100ms);
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// Destination that writes pastes to stdout; the headless stand-in for OS paste.
class StdoutDestination : public DestinationAdapter {
 public:
  void deliver(const AppContext& dest, std::string_view content, ContentType type) override {
    std::lock_guard lock(mu_);
    spdlog::info("paste into {} ({}, {} bytes)", dest.app_name, to_string(type), content.size());
    std::cout << content << std::flush;
  }

 private:
  std::mutex mu_;
};

struct Endpoint {
  std::string host = "127.0.0.1";
  unsigned short port = 8765;
};

void add_endpoint(CLI::App* cmd, Endpoint& ep) {
  cmd->add_option("--host", ep.host, "daemon host");
  cmd->add_option("--port", ep.port, "daemon port");
}

int serve(const std::string& config_path, const std::optional<int>& port, const std::string& temp_dir,
          const std::string& endpoint, const std::string& scripted, const std::string& log_level) {
  daemon::DaemonConfig config;
  if (!config_path.empty()) config = daemon::load_config(config_path);
  if (port) config.listen_port = *port;
  if (!temp_dir.empty()) config.temp_dir = temp_dir;
  if (!endpoint.empty()) config.provider_endpoint = endpoint;
  if (!scripted.empty()) config.scripted_provider = scripted;  // forces offline mode
  if (!log_level.empty()) config.log_level = log_level;
  config = daemon::config_from_json(daemon::to_json(config));  // one validation path
  daemon::prepare(config);
  spdlog::set_level(spdlog::level::from_str(config.log_level));

  StdoutDestination destination;
  SimulatedClipboard clipboard;
  daemon::Daemon d(config, daemon::factory_for(config), destination, clipboard);
  daemon::WireServer server(d, static_cast<unsigned short>(config.listen_port));
  spdlog::info("serving {} (temp dir {}, {} mode)", daemon::kWireVersion, config.temp_dir.string(),
               config.scripted_provider ? "scripted" : "live");
  wait_for_signal();
  server.stop();
  d.stop();
  return kOk;
}

int copy_sim(const Endpoint& ep, const std::string& fixture) {
  auto snapshot = load_sim_fixture(fixture);  // validate locally first
  daemon::WireClient client(ep.host, ep.port);
  auto reply = client.request(Json{{"type", "copy_event"}, {"fixture", encode_sim_fixture(snapshot)}});
  if (!reply.value("ok", false)) {
    std::cerr << reply["error"].dump() << "\n";
    return kFailed;
  }
  std::cout << reply["context_id"].get<std::string>() << "\n";
  return kOk;
}

int paste_sim(const Endpoint& ep, const std::string& dest, const std::optional<std::string>& instruction,
              const std::string& context_id, bool wait) {
  daemon::WireClient client(ep.host, ep.port);
  Json msg{{"type", "smart_paste"}, {"dest", dest}, {"subscribe", wait}};
  if (instruction) msg["instruction"] = *instruction;
  if (!context_id.empty()) msg["context_id"] = context_id;
  auto reply = client.request(msg);
  if (!reply.value("ok", false)) {
    std::cerr << reply["error"].dump() << "\n";
    return kFailed;
  }
  std::string job = reply["job_id"];
  if (!wait) {
    std::cout << job << "\n";
    return kOk;
  }
  for (;;) {
    auto ev = client.receive(1s);
    if (!ev) continue;
    if (ev->value("type", std::string()) != "job_event") continue;
    std::cout << ev->dump() << "\n";
    std::string kind = (*ev)["kind"];
    if (kind == "pasted") return kOk;
    if (kind == "failed" || kind == "cancelled") {
      if (kind == "failed") std::cerr << (*ev)["data"].value("error", std::string()) << "\n";
      return kFailed;
    }
  }
}

int convert(const std::string& in, const std::string& from, const std::string& to, const std::string& plan_path,
            bool no_styles) {
  auto content = slurp(in);
  auto tables = parse_text(content, format_from_string(from));
  if (!plan_path.empty()) {
    auto plan = plan::parse_plan_file(slurp(plan_path));
    auto result = plan::evaluate(plan, tables);
    for (const auto& w : result.warnings) std::cerr << "warning: " << w << "\n";
    tables = {std::move(result.table)};
  }
  RenderOptions opts;
  opts.styles = !no_styles;
  auto rendered = render(tables, format_from_string(to), opts);
  for (const auto& w : rendered.warnings) std::cerr << "warning: " << w << "\n";
  std::cout << rendered.text;
  return kOk;
}

int run_corpus(const std::string& dir, const std::string& only, bool json, bool replay) {
  int failures = 0;
  std::size_t ran = 0;
  Json all = Json::array();
  for (const auto& path : corpus::list_cases(dir)) {
    if (!only.empty() && path.filename() != only) continue;
    ++ran;
    auto c = corpus::load_case(path);
    auto report = corpus::run_case(c);
    std::vector<std::string> replay_problems;
    if (replay && !report.infrastructure_error) replay_problems = corpus::replay_case(c, report);
    bool ok = report.passed() && replay_problems.empty();
    failures += ok ? 0 : 1;
    if (json) {
      auto j = corpus::to_json(report);
      if (replay) j["replay_problems"] = replay_problems;
      all.push_back(std::move(j));
      continue;
    }
    std::printf("%s %-40s %.2fs\n", ok ? "PASS" : "FAIL", c.name.c_str(), report.seconds);
    if (report.infrastructure_error) std::printf("    infrastructure: %s\n", report.infrastructure_error->c_str());
    for (const auto& job : report.jobs)
      for (const auto& check : job.checks)
        if (!check.ok) std::printf("    %s: %s\n", check.check.c_str(), check.detail.c_str());
    for (const auto& p : replay_problems) std::printf("    replay: %s\n", p.c_str());
  }
  if (json) std::cout << all.dump(2) << "\n";
  if (ran == 0) {
    std::cerr << "no case named '" << only << "'\n";
    return kUsage;
  }
  return failures ? kFailed : kOk;
}

int plugin_echo(const Endpoint& ep, const std::string& app, const std::vector<std::string>& apis, int delay_ms) {
  daemon::EchoPlugin plugin(ep.host, ep.port, app, apis, std::chrono::milliseconds(delay_ms));
  auto reply = plugin.registration_reply();
  if (!reply.value("ok", false)) {
    std::cerr << reply["error"].dump() << "\n";
    return kFailed;
  }
  std::cout << "registered " << app << "\n" << std::flush;
  wait_for_signal();
  plugin.stop();
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"smartpaste: smart copy-paste daemon and headless clients"};
  app.require_subcommand(1);
  spdlog::set_level(spdlog::level::warn);

  std::string config_path, temp_dir, endpoint, scripted, log_level;
  std::optional<int> port;
  auto* serve_cmd = app.add_subcommand("serve", "run the daemon");
  serve_cmd->add_option("--config", config_path, "JSON config file");
  serve_cmd->add_option("--port", port, "listen port (loopback)");
  serve_cmd->add_option("--temp-dir", temp_dir);
  serve_cmd->add_option("--provider-endpoint", endpoint, "http:// URL of the model provider");
  serve_cmd->add_option("--scripted-provider", scripted, "transcript file; forces offline mode");
  serve_cmd->add_option("--log-level", log_level)->check(CLI::IsMember({"trace", "debug", "info", "warn", "error", "off"}));

  Endpoint ep;
  std::string fixture;
  auto* copy_cmd = app.add_subcommand("copy-sim", "send a fixture as a copy event");
  copy_cmd->add_option("fixture", fixture)->required();
  add_endpoint(copy_cmd, ep);

  std::string dest, context_id;
  std::optional<std::string> instruction;
  bool wait = false;
  auto* paste_cmd = app.add_subcommand("paste-sim", "trigger a smart paste");
  paste_cmd->add_option("--dest", dest, "destination app name")->required();
  paste_cmd->add_option("--instruction", instruction);
  paste_cmd->add_option("--context", context_id, "context id (default: current)");
  paste_cmd->add_flag("--wait", wait, "stream events until the job ends");
  add_endpoint(paste_cmd, ep);

  std::string in, from, to, plan_path;
  bool no_styles = false;
  auto* convert_cmd = app.add_subcommand("convert", "convert a table file without the agent");
  convert_cmd->add_option("input", in)->required();
  convert_cmd->add_option("--from", from)->required();
  convert_cmd->add_option("--to", to)->required();
  convert_cmd->add_option("--plan", plan_path, "plan/1 file applied between parse and render");
  convert_cmd->add_flag("--no-styles", no_styles);

  std::string corpus_dir = SMARTPASTE_CORPUS_DIR, only;
  bool json = false, replay = false;
  auto* corpus_cmd = app.add_subcommand("run-corpus", "run the scripted fixture corpus");
  corpus_cmd->add_option("--case", only);
  corpus_cmd->add_option("--dir", corpus_dir);
  corpus_cmd->add_flag("--json", json);
  corpus_cmd->add_flag("--replay", replay, "also check deterministic replay");

  std::string plugin_app = "sim:excel";
  std::vector<std::string> apis{"paste_table_to_new_sheet"};
  int delay_ms = 0;
  auto* echo_cmd = app.add_subcommand("plugin-echo", "register an echoing plugin");
  echo_cmd->add_option("--app", plugin_app);
  echo_cmd->add_option("--api", apis);
  echo_cmd->add_option("--delay-ms", delay_ms);
  add_endpoint(echo_cmd, ep);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*serve_cmd) return serve(config_path, port, temp_dir, endpoint, scripted, log_level);
    if (*copy_cmd) return copy_sim(ep, fixture);
    if (*paste_cmd) return paste_sim(ep, dest, instruction, context_id, wait);
    if (*convert_cmd) return convert(in, from, to, plan_path, no_styles);
    if (*corpus_cmd) return run_corpus(corpus_dir, only, json, replay);
    if (*echo_cmd) return plugin_echo(ep, plugin_app, apis, delay_ms);
  } catch (const Error& e) {
    std::cerr << to_string(e.code()) << ": " << e.what() << "\n";
    switch (e.code()) {
      case ErrorCode::Io:
      case ErrorCode::Config:
      case ErrorCode::FixtureParse:
      case ErrorCode::EmptyFixture:
        return kInfra;
      case ErrorCode::UndetectableFormat:
        return kUsage;
      default:
        return kFailed;
    }
  } catch (const std::exception& e) {
    std::cerr << e.what() << "\n";
    return kInfra;
  }
  return kUsage;
}
