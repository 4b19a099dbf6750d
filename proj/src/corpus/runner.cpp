#include "smartpaste/corpus.hpp"

#include "smartpaste/codec.hpp"
#include "smartpaste/daemon.hpp"
#include "smartpaste/text.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>
#include <unistd.h>

namespace smartpaste::corpus {

namespace {

using namespace std::chrono_literals;

Json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot read " + path.string());
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw Error(ErrorCode::Schema, path.string() + ": " + e.what());
  }
}

std::filesystem::path work_dir(const std::string& case_name) {
  return std::filesystem::temp_directory_path() / ("smartpaste-corpus-" + std::to_string(::getpid())) / case_name;
}

std::size_t occurrences(const std::string& hay, const std::string& needle) {
  if (needle.empty()) return 0;
  std::size_t n = 0;
  for (auto at = hay.find(needle); at != std::string::npos; at = hay.find(needle, at + needle.size())) ++n;
  return n;
}

Json grid_of(const StructuredTable& t) {
  Json rows = Json::array();
  for (const auto& row : t.rows) {
    Json r = Json::array();
    for (const auto& cell : row) r.push_back(cell_text(cell.value));
    rows.push_back(std::move(r));
  }
  return rows;
}

std::string first_difference(const Json& want, const Json& got) {
  if (want.size() != got.size())
    return "expected " + std::to_string(want.size()) + " rows, got " + std::to_string(got.size());
  for (std::size_t r = 0; r < want.size(); ++r)
    if (want[r] != got[r]) return "row " + std::to_string(r + 1) + ": expected " + want[r].dump() + ", got " + got[r].dump();
  return {};
}

/// Cells whose style has `property` (bold, italic, bg_color, fg_color) set,
/// optionally to `value`.
std::set<std::pair<std::size_t, std::size_t>> styled(const StructuredTable& t, const std::string& property,
                                                     const std::optional<std::string>& value) {
  std::set<std::pair<std::size_t, std::size_t>> out;
  for (std::size_t r = 0; r < t.rows.size(); ++r)
    for (std::size_t c = 0; c < t.rows[r].size(); ++c) {
      const auto& s = t.rows[r][c].style;
      bool hit = false;
      if (property == "bold") hit = s.bold;
      else if (property == "italic") hit = s.italic;
      else if (property == "bg_color") hit = s.bg_color && (!value || text::lower(*s.bg_color) == text::lower(*value));
      else if (property == "fg_color") hit = s.fg_color && (!value || text::lower(*s.fg_color) == text::lower(*value));
      else throw Error(ErrorCode::Schema, "unknown style property '" + property + "'");
      if (hit) out.emplace(r, c);
    }
  return out;
}

std::string cells_text(const std::set<std::pair<std::size_t, std::size_t>>& cells) {
  std::string out;
  for (const auto& [r, c] : cells) out += (out.empty() ? "" : " ") + std::to_string(r) + ":" + std::to_string(c);
  return "{" + out + "}";
}

struct JobView {
  const Json& terminal;  // data of the terminal job event
  const ContextObject& ctx;
  const std::string& context_id;
  const std::optional<std::string>& previous_context;
};

const StructuredTable& table_at(const JobView& v, const Json& check) {
  std::string key = check.at("key");
  const auto* r = v.ctx.transformations.find(key);
  if (!r) throw Error(ErrorCode::UnknownKey, "no transformation '" + key + "'");
  if (r->kind != TransformResult::Kind::table) throw Error(ErrorCode::Type, "'" + key + "' is not a table");
  return *r->table;
}

std::string content_of(const JobView& v) {
  if (!v.terminal.contains("content")) throw Error(ErrorCode::Delivery, "nothing was pasted");
  return v.terminal["content"];
}

CheckResult evaluate(const Json& check, const JobView& v) {
  CheckResult res;
  res.check = check.value("check", std::string("?"));
  if (check.contains("label")) res.check += " (" + check["label"].get<std::string>() + ")";
  const std::string kind = check.value("check", std::string());
  auto fail = [&](std::string detail) {
    res.ok = false;
    res.detail = std::move(detail);
    return res;
  };
  try {
    if (kind == "outcome") {
      std::string got = v.terminal.contains("receipt") ? "pasted" : v.terminal.contains("error") ? "failed" : "cancelled";
      if (got != check["equals"]) return fail("outcome " + got + (v.terminal.contains("error") ? ": " + v.terminal["error"].get<std::string>() : ""));
    } else if (kind == "retries_used") {
      if (v.terminal.value("retries_used", -1) != check["equals"].get<int>())
        return fail("retries_used = " + v.terminal.value("retries_used", Json(-1)).dump());
    } else if (kind == "route" || kind == "content_type") {
      auto got = v.terminal.value("receipt", Json::object()).value(kind, std::string());
      if (got != check["equals"]) return fail(kind + " = '" + got + "'");
    } else if (kind == "same_context_as_previous") {
      if (!v.previous_context || *v.previous_context != v.context_id) return fail("ran on a different context");
    } else if (kind == "content_contains") {
      auto content = content_of(v);
      std::string needle = check["text"];
      auto n = occurrences(content, needle);
      if (check.contains("count") ? n != check["count"].get<std::size_t>() : n == 0)
        return fail("'" + needle + "' occurs " + std::to_string(n) + " times");
    } else if (kind == "content_absent") {
      auto content = content_of(v);
      std::string needle = check["text"];
      if (text::contains(text::lower(content), text::lower(needle))) return fail("found '" + needle + "'");
    } else if (kind == "color_counts") {
      // Each color must appear exactly once per cell carrying it.
      auto content = text::lower(content_of(v));
      for (const auto& [color, count] : check["counts"].items()) {
        auto n = occurrences(content, text::lower(color));
        if (n != count.get<std::size_t>())
          return fail(color + " occurs " + std::to_string(n) + " times, expected " + count.dump());
      }
    } else if (kind == "content_parses") {
      auto tables = parse_text(content_of(v), format_from_string(check["format"].get<std::string>()));
      if (tables.size() != 1) return fail("parsed into " + std::to_string(tables.size()) + " tables");
      if (check.contains("headers") && Json(tables[0].headers) != check["headers"])
        return fail("headers " + Json(tables[0].headers).dump());
      if (check.contains("rows")) {
        auto diff = first_difference(check["rows"], grid_of(tables[0]));
        if (!diff.empty()) return fail(diff);
      }
    } else if (kind == "table") {
      const auto& t = table_at(v, check);
      if (check.contains("columns") && t.column_count != check["columns"].get<std::size_t>())
        return fail("width " + std::to_string(t.column_count));
      if (check.contains("row_count") && t.rows.size() != check["row_count"].get<std::size_t>())
        return fail(std::to_string(t.rows.size()) + " rows");
      if (check.contains("headers") && Json(t.headers) != check["headers"]) return fail("headers " + Json(t.headers).dump());
      if (check.contains("rows")) {
        auto diff = first_difference(check["rows"], grid_of(t));
        if (!diff.empty()) return fail(diff);
      }
    } else if (kind == "styled_cells" || kind == "styled_rows") {
      const auto& t = table_at(v, check);
      std::optional<std::string> value;
      if (check.contains("value")) value = check["value"].get<std::string>();
      auto got = styled(t, check["property"], value);
      std::set<std::pair<std::size_t, std::size_t>> want;
      if (kind == "styled_cells") {
        for (const auto& cell : check["cells"]) want.emplace(cell[0].get<std::size_t>(), cell[1].get<std::size_t>());
      } else {
        for (const auto& r : check["rows"])
          for (std::size_t c = 0; c < t.column_count; ++c) want.emplace(r.get<std::size_t>(), c);
      }
      if (got != want) return fail("styled " + cells_text(got) + ", expected " + cells_text(want));
    } else if (kind == "temp_csv") {
      // The loader snippet must point at a csv holding the structured table.
      auto files = v.ctx.metadata.value("temp_files", Json::array());
      if (files.empty()) return fail("no temp file was written");
      std::string path = files.back()["path"];
      if (!text::contains(content_of(v), path)) return fail("pasted code does not reference " + path);
      std::ifstream in(path);
      if (!in) return fail("cannot read " + path);
      std::stringstream ss;
      ss << in.rdbuf();
      auto tables = parse_text(ss.str(), FormatId::csv);
      if (tables.size() != 1) return fail("csv holds " + std::to_string(tables.size()) + " tables");
      if (check.contains("headers") && Json(tables[0].headers) != check["headers"])
        return fail("csv headers " + Json(tables[0].headers).dump());
      auto diff = first_difference(check["rows"], grid_of(tables[0]));
      if (!diff.empty()) return fail("csv " + diff);
    } else {
      return fail("unknown check kind '" + kind + "'");
    }
  } catch (const Error& e) {
    return fail(std::string(to_string(e.code())) + ": " + e.what());
  } catch (const Json::exception& e) {
    return fail(std::string("malformed check: ") + e.what());
  }
  res.ok = true;
  return res;
}

}  // namespace

bool CaseReport::passed() const {
  if (infrastructure_error || jobs.empty()) return false;
  for (const auto& j : jobs)
    for (const auto& c : j.checks)
      if (!c.ok) return false;
  return true;
}

Json to_json(const CaseReport& r) {
  Json jobs = Json::array();
  for (const auto& j : r.jobs) {
    Json checks = Json::array();
    for (const auto& c : j.checks) {
      Json jc{{"check", c.check}, {"ok", c.ok}};
      if (!c.detail.empty()) jc["detail"] = c.detail;
      checks.push_back(std::move(jc));
    }
    Json jj{{"job_id", j.job_id}, {"outcome", j.outcome}, {"retries_used", j.retries_used}, {"checks", checks}};
    if (!j.error.empty()) jj["error"] = j.error;
    jobs.push_back(std::move(jj));
  }
  Json out{{"case", r.name}, {"passed", r.passed()}, {"seconds", r.seconds}, {"jobs", std::move(jobs)}};
  if (r.infrastructure_error) out["infrastructure_error"] = *r.infrastructure_error;
  return out;
}

TaskCase load_case(const std::filesystem::path& dir) {
  TaskCase c;
  c.dir = dir;
  c.name = dir.filename().string();
  c.fixture = read_json(dir / "fixture.json");
  c.transcript = read_json(dir / "transcript.json");
  c.assertions = read_json(dir / "assertions.json");
  if (!c.assertions.contains("jobs") || !c.assertions["jobs"].is_array() || c.assertions["jobs"].empty())
    throw Error(ErrorCode::Schema, c.name + ": assertions.json needs a non-empty 'jobs' array");
  return c;
}

std::vector<std::filesystem::path> list_cases(const std::filesystem::path& root) {
  std::vector<std::filesystem::path> out;
  if (!std::filesystem::is_directory(root)) throw Error(ErrorCode::Io, "no corpus at " + root.string());
  for (const auto& entry : std::filesystem::directory_iterator(root))
    if (entry.is_directory() && std::filesystem::exists(entry.path() / "assertions.json")) out.push_back(entry.path());
  std::sort(out.begin(), out.end());
  return out;
}

CaseReport run_case(const TaskCase& c) {
  CaseReport report;
  report.name = c.name;
  auto started = std::chrono::steady_clock::now();
  auto dir = work_dir(c.name);
  std::filesystem::remove_all(dir);

  try {
    daemon::DaemonConfig config;
    config.temp_dir = dir;
    config.id_seed = 1;
    config.scripted_provider = c.dir / "transcript.json";
    daemon::prepare(config);
    SimulatedDestination destination;
    SimulatedClipboard clipboard;
    daemon::Daemon d(config, daemon::scripted_factory(agent::load_scripts(c.transcript)), destination, clipboard);
    daemon::WireServer server(d, 0);
    daemon::WireClient client("127.0.0.1", server.port());

    auto copied = client.request(Json{{"type", "copy_event"}, {"fixture", c.fixture}});
    if (!copied.value("ok", false)) throw Error(ErrorCode::Io, "copy_event rejected: " + copied.dump());
    std::string context_id = copied["context_id"];
    std::optional<std::string> previous;

    for (const auto& job : c.assertions["jobs"]) {
      Json msg{{"type", "smart_paste"}, {"dest", job.at("dest")}, {"context_id", context_id}};
      if (job.contains("instruction")) msg["instruction"] = job["instruction"];
      auto reply = client.request(msg);
      if (!reply.value("ok", false)) throw Error(ErrorCode::Io, "smart_paste rejected: " + reply.dump());
      JobReport jr;
      jr.job_id = reply["job_id"];
      Json terminal;
      auto deadline = std::chrono::steady_clock::now() + 10s;
      while (terminal.is_null()) {
        if (std::chrono::steady_clock::now() > deadline) throw Error(ErrorCode::Io, "job " + jr.job_id + " did not finish");
        auto ev = client.receive(100ms);
        if (!ev || ev->value("type", std::string()) != "job_event" || (*ev)["job_id"] != jr.job_id) continue;
        std::string kind = (*ev)["kind"];
        if (kind == "pasted" || kind == "failed" || kind == "cancelled") {
          jr.outcome = kind;
          terminal = (*ev)["data"];
        }
      }
      jr.retries_used = terminal.value("retries_used", 0);
      jr.error = terminal.value("error", std::string());
      if (terminal.contains("content")) jr.content = terminal["content"].get<std::string>();
      jr.transcript = d.transcript(jr.job_id);
      std::string job_context = reply["context_id"];
      auto ctx = d.context(job_context);
      if (!ctx) throw Error(ErrorCode::Io, "context " + job_context + " left history during the case");
      JobView view{terminal, *ctx, job_context, previous};
      for (const auto& check : job.value("checks", Json::array())) jr.checks.push_back(evaluate(check, view));
      previous = job_context;
      report.jobs.push_back(std::move(jr));
    }
    client.close();
    server.stop();
    d.stop();
  } catch (const std::exception& e) {
    report.infrastructure_error = e.what();
  }
  std::filesystem::remove_all(dir);
  report.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return report;
}

std::vector<std::string> replay_case(const TaskCase& c, const CaseReport& report) {
  std::vector<std::string> problems;
  auto dir = work_dir(c.name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  auto ctx = new_context(parse_sim_fixture(c.fixture.dump()));
  const auto& jobs = c.assertions["jobs"];
  for (std::size_t i = 0; i < report.jobs.size() && i < jobs.size(); ++i) {
    const auto& recorded = report.jobs[i];
    std::optional<std::string> instruction;
    if (jobs[i].contains("instruction") && !jobs[i]["instruction"].is_null())
      instruction = jobs[i]["instruction"].get<std::string>();
    ctx = attach_destination(std::move(ctx), app_context_from_json(jobs[i]["dest"]), instruction);
    SimulatedDestination destination;
    SimulatedClipboard clipboard;
    agent::ToolEnv env{&destination, &clipboard, nullptr, dir, recorded.job_id};
    auto t = agent::replay(recorded.transcript, ctx, env);
    auto content = agent::pasted_content(t);
    if (content != recorded.content)
      problems.push_back(c.name + " job " + std::to_string(i + 1) + ": replayed paste differs (" +
                         std::to_string(content ? content->size() : 0) + " vs " +
                         std::to_string(recorded.content ? recorded.content->size() : 0) + " bytes)");
  }
  std::filesystem::remove_all(dir);
  return problems;
}

}  // namespace smartpaste::corpus
