#include "smartpaste/daemon.hpp"

#include <boost/uuid/random_generator.hpp>
#include <boost/uuid/uuid_io.hpp>
#include <spdlog/spdlog.h>

#include <fstream>
#include <random>

namespace smartpaste::daemon {

std::string_view to_string(JobState s) {
  switch (s) {
    case JobState::pending: return "pending";
    case JobState::running: return "running";
    case JobState::awaiting_provider: return "awaiting_provider";
    case JobState::pasted: return "pasted";
    case JobState::failed: return "failed";
    case JobState::cancelled: return "cancelled";
  }
  return "?";
}

bool is_terminal(JobState s) {
  return s == JobState::pasted || s == JobState::failed || s == JobState::cancelled;
}

Json to_wire(const JobEvent& e) {
  return Json{{"v", std::string(kWireVersion)}, {"type", "job_event"}, {"job_id", e.job_id},
              {"seq", e.seq},   {"kind", e.kind},                      {"data", e.data}};
}

// --- providers -------------------------------------------------------------------------------

ProviderFactory scripted_factory(std::vector<Json> scripts) {
  auto shared = std::make_shared<const std::vector<Json>>(std::move(scripts));
  return [shared](const std::string&, std::size_t index) -> std::unique_ptr<agent::Provider> {
    if (index >= shared->size()) return std::make_unique<agent::ScriptedProvider>(std::vector<Json>{});
    return std::make_unique<agent::ScriptedProvider>(agent::ScriptedProvider::from_json((*shared)[index]));
  };
}

ProviderFactory http_factory(std::string endpoint, std::chrono::seconds timeout) {
  // Constructing once up front surfaces a malformed endpoint at startup.
  agent::HttpProvider probe(endpoint, timeout);
  return [endpoint, timeout](const std::string&, std::size_t) -> std::unique_ptr<agent::Provider> {
    return std::make_unique<agent::HttpProvider>(endpoint, timeout);
  };
}

ProviderFactory factory_for(const DaemonConfig& config) {
  if (!config.scripted_provider)
    return http_factory(config.provider_endpoint, std::chrono::seconds(config.provider_timeout_s));
  std::ifstream in(*config.scripted_provider);
  if (!in) throw Error(ErrorCode::Config, "cannot read " + config.scripted_provider->string());
  try {
    return scripted_factory(agent::load_scripts(Json::parse(in)));
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::Config, config.scripted_provider->string() + ": " + e.what());
  }
}

// --- daemon ----------------------------------------------------------------------------------

struct Daemon::Entry {
  std::string id;
  ContextObject ctx;
  std::vector<std::string> job_ids;
  std::size_t outstanding = 0;  // pending or running jobs
  bool evicted = false;
  std::set<std::string> temp_files;
};

struct Daemon::Job {
  std::string id;
  std::size_t index = 0;
  std::shared_ptr<Entry> entry;
  AppContext dest;
  std::optional<std::string> instruction;
  JobState state = JobState::pending;
  std::vector<JobEvent> events;
  agent::AgentTranscript transcript;
  std::atomic<bool> cancel{false};
  std::map<std::uint64_t, std::function<void(const JobEvent&)>> subscribers;
};

Daemon::Daemon(DaemonConfig config, ProviderFactory providers, DestinationAdapter& destination,
               ClipboardAdapter& clipboard)
    : config_(std::move(config)),
      providers_(std::move(providers)),
      destination_(destination),
      clipboard_(clipboard),
      plugins_(std::chrono::seconds(config_.provider_timeout_s)) {
  if (config_.system_prompt) {
    std::ifstream in(*config_.system_prompt);
    if (!in) throw Error(ErrorCode::Config, "cannot read " + config_.system_prompt->string());
    system_prompt_.assign(std::istreambuf_iterator<char>(in), {});
  }
  if (config_.id_seed) {
    auto rng = std::make_shared<std::mt19937_64>(*config_.id_seed);
    ids_ = [rng] { return boost::uuids::to_string(boost::uuids::basic_random_generator(*rng)()); };
  } else {
    ids_ = [gen = std::make_shared<boost::uuids::random_generator>()] {
      return boost::uuids::to_string((*gen)());
    };
  }
  for (std::size_t i = 0; i < config_.max_concurrent_jobs; ++i) workers_.emplace_back([this] { worker(); });
}

Daemon::~Daemon() { stop(); }

std::string Daemon::next_id() { return ids_(); }

std::optional<std::string> Daemon::on_copy(ClipboardSnapshot snapshot) {
  if (snapshot.payloads.empty()) {
    spdlog::info("ignoring a copy from '{}' with no recognized payloads", snapshot.source.app_name);
    return std::nullopt;
  }
  if (snapshot.captured_at == std::chrono::steady_clock::time_point{})
    snapshot.captured_at = std::chrono::steady_clock::now();
  std::lock_guard lock(mu_);
  auto entry = std::make_shared<Entry>();
  entry->id = next_id();
  entry->ctx = new_context(std::move(snapshot));
  history_.push_front(entry);
  while (history_.size() > config_.history_size) {
    auto old = history_.back();
    history_.pop_back();
    retire(old);
  }
  spdlog::debug("context {} stored", entry->id);
  return entry->id;
}

void Daemon::retire(const std::shared_ptr<Entry>& entry) {
  entry->evicted = true;
  retired_.push_back(entry);
  maybe_cleanup(entry);
}

void Daemon::maybe_cleanup(const std::shared_ptr<Entry>& entry) {
  if (!entry->evicted || entry->outstanding > 0) return;
  for (const auto& path : entry->temp_files) {
    std::error_code ec;
    std::filesystem::remove(path, ec);
    if (ec) spdlog::warn("could not remove {}: {}", path, ec.message());
  }
  entry->temp_files.clear();
  std::erase(retired_, entry);
}

std::string Daemon::smart_paste(AppContext dest, std::optional<std::string> instruction,
                                std::optional<std::string> context_id) {
  std::lock_guard lock(mu_);
  if (stopping_) throw Error(ErrorCode::NoContext, "the daemon is shutting down");
  std::shared_ptr<Entry> entry;
  if (context_id) {
    for (const auto& e : history_)
      if (e->id == *context_id) entry = e;
    if (!entry) throw Error(ErrorCode::NoContext, "no context " + *context_id + " in history");
  } else {
    if (history_.empty()) throw Error(ErrorCode::NoContext, "nothing has been copied yet");
    entry = history_.front();
  }
  if (instruction && instruction->empty()) instruction.reset();

  auto job = std::make_shared<Job>();
  job->id = next_id();
  job->index = job_count_++;
  job->entry = entry;
  job->dest = std::move(dest);
  job->instruction = std::move(instruction);
  entry->job_ids.push_back(job->id);
  ++entry->outstanding;
  jobs_[job->id] = job;
  emit(*job, "state", Json{{"state", "pending"}, {"context_id", entry->id}});
  queue_.push_back(job);
  work_cv_.notify_one();
  return job->id;
}

void Daemon::worker() {
  for (;;) {
    std::shared_ptr<Job> job;
    {
      std::unique_lock lock(mu_);
      work_cv_.wait(lock, [&] {
        if (stopping_) return true;
        for (const auto& j : queue_)
          if (!busy_contexts_.count(j->entry->id)) return true;
        return false;
      });
      if (stopping_) return;
      // Jobs on one context run one at a time so follow-ups see earlier results.
      auto it = std::find_if(queue_.begin(), queue_.end(),
                             [&](const auto& j) { return !busy_contexts_.count(j->entry->id); });
      job = *it;
      queue_.erase(it);
      busy_contexts_.insert(job->entry->id);
      set_state(*job, JobState::running);
    }
    run(job);
  }
}

void Daemon::run(const std::shared_ptr<Job>& job) {
  ContextObject ctx;
  {
    std::lock_guard lock(mu_);
    ctx = attach_destination(job->entry->ctx, job->dest, job->instruction);
  }
  agent::ToolEnv env{&destination_, &clipboard_, &plugins_, config_.temp_dir, job->id};
  agent::RunOptions options;
  options.system_prompt = system_prompt_;
  options.cancel = &job->cancel;
  options.on_event = [&](const agent::JobEvent& e) {
    std::lock_guard lock(mu_);
    if (e.kind == "provider_wait") {
      set_state(*job, JobState::awaiting_provider);
      return;
    }
    set_state(*job, JobState::running);
    emit(*job, e.kind, e.data);
  };

  agent::AgentTranscript t;
  try {
    auto provider = providers_(job->id, job->index);
    t = agent::run_job(ctx, *provider, env, options);
  } catch (const std::exception& e) {
    t.outcome = agent::Outcome::failed;
    t.error = std::string("Internal: ") + e.what();
  }

  std::lock_guard lock(mu_);
  // Results stay on the context so a re-trigger can build on them, even
  // when this job failed to paste.
  job->entry->ctx = std::move(ctx);
  for (const auto& f : job->entry->ctx.metadata.value("temp_files", Json::array()))
    job->entry->temp_files.insert(f.value("path", std::string()));
  job->transcript = t;

  Json data{{"retries_used", t.retries_used}};
  JobState end = JobState::failed;
  if (t.outcome == agent::Outcome::pasted) {
    end = JobState::pasted;
    for (auto it = t.receipts.rbegin(); it != t.receipts.rend(); ++it)
      if (it->delivered) {
        data["receipt"] = agent::to_json(*it);
        data["content"] = it->content;
        data["content_type"] = it->content_type;
        break;
      }
    if (t.final_text) data["final_text"] = *t.final_text;
  } else if (t.outcome == agent::Outcome::cancelled) {
    end = JobState::cancelled;
  } else {
    data["error"] = t.error;
  }
  busy_contexts_.erase(job->entry->id);
  finish(*job, end, std::move(data));
  work_cv_.notify_all();
}

void Daemon::set_state(Job& job, JobState s) {
  if (job.state == s || is_terminal(job.state)) return;
  job.state = s;
  emit(job, "state", Json{{"state", std::string(to_string(s))}});
}

void Daemon::finish(Job& job, JobState s, Json data) {
  job.state = s;
  emit(job, std::string(to_string(s)), std::move(data));
  --job.entry->outstanding;
  maybe_cleanup(job.entry);
  done_cv_.notify_all();
}

void Daemon::emit(Job& job, std::string kind, Json data) {
  JobEvent e{job.id, job.events.size(), std::move(kind), std::move(data)};
  if (config_.event_log) {
    std::lock_guard log(log_mu_);
    std::ofstream out(*config_.event_log, std::ios::app);
    out << to_wire(e).dump() << '\n';
  }
  spdlog::debug("job {} #{} {}", e.job_id, e.seq, e.kind);
  job.events.push_back(e);
  for (const auto& [token, fn] : job.subscribers) fn(e);
  if (e.terminal()) {
    for (const auto& [token, fn] : job.subscribers) subscriptions_.erase(token);
    job.subscribers.clear();
  }
}

std::shared_ptr<Daemon::Job> Daemon::find_job(const std::string& job_id) const {
  auto it = jobs_.find(job_id);
  if (it == jobs_.end()) throw Error(ErrorCode::UnknownJob, "no job " + job_id);
  return it->second;
}

std::vector<JobEvent> Daemon::job_events(const std::string& job_id) const {
  std::lock_guard lock(mu_);
  return find_job(job_id)->events;
}

std::uint64_t Daemon::subscribe(const std::string& job_id, std::function<void(const JobEvent&)> fn) {
  std::lock_guard lock(mu_);
  auto job = find_job(job_id);
  // Replay and registration happen under one lock, so nothing slips between.
  for (const auto& e : job->events) fn(e);
  std::uint64_t token = next_token_++;
  if (!is_terminal(job->state)) {
    job->subscribers[token] = std::move(fn);
    subscriptions_[token] = job_id;
  }
  return token;
}

void Daemon::unsubscribe(std::uint64_t token) {
  std::lock_guard lock(mu_);
  auto it = subscriptions_.find(token);
  if (it == subscriptions_.end()) return;
  if (auto job = jobs_.find(it->second); job != jobs_.end()) job->second->subscribers.erase(token);
  subscriptions_.erase(it);
}

bool Daemon::wait(const std::string& job_id, std::chrono::milliseconds timeout) const {
  std::unique_lock lock(mu_);
  auto job = find_job(job_id);
  return done_cv_.wait_for(lock, timeout, [&] { return is_terminal(job->state); });
}

void Daemon::cancel(const std::string& job_id) {
  std::lock_guard lock(mu_);
  auto job = find_job(job_id);
  if (is_terminal(job->state)) return;
  job->cancel = true;
  if (auto it = std::find(queue_.begin(), queue_.end(), job); it != queue_.end()) {
    queue_.erase(it);
    finish(*job, JobState::cancelled, Json{{"retries_used", 0}});
  }
}

JobState Daemon::state(const std::string& job_id) const {
  std::lock_guard lock(mu_);
  return find_job(job_id)->state;
}

agent::AgentTranscript Daemon::transcript(const std::string& job_id) const {
  std::lock_guard lock(mu_);
  return find_job(job_id)->transcript;
}

std::string Daemon::job_context(const std::string& job_id) const {
  std::lock_guard lock(mu_);
  return find_job(job_id)->entry->id;
}

std::optional<ContextObject> Daemon::context(const std::string& context_id) const {
  std::lock_guard lock(mu_);
  for (const auto& e : history_)
    if (e->id == context_id) return e->ctx;
  return std::nullopt;
}

std::optional<std::string> Daemon::current_context() const {
  std::lock_guard lock(mu_);
  if (history_.empty()) return std::nullopt;
  return history_.front()->id;
}

Json Daemon::list_history() const {
  std::lock_guard lock(mu_);
  Json out = Json::array();
  for (const auto& e : history_) {
    Json kinds = Json::array();
    for (const auto& p : e->ctx.snapshot.payloads) kinds.push_back(std::string(to_string(p.kind)));
    out.push_back(Json{{"context_id", e->id},
                       {"current", e == history_.front()},
                       {"source", to_json(e->ctx.snapshot.source)},
                       {"payloads", std::move(kinds)},
                       {"tables", e->ctx.structured.size()},
                       {"transformations", e->ctx.transformations.keys()},
                       {"jobs", e->job_ids}});
  }
  return out;
}

void Daemon::stop() {
  {
    std::lock_guard lock(mu_);
    if (stopping_ && workers_.empty()) return;
    stopping_ = true;
    for (auto& job : queue_) finish(*job, JobState::cancelled, Json{{"retries_used", 0}});
    queue_.clear();
    for (auto& [id, job] : jobs_) job->cancel = true;
  }
  work_cv_.notify_all();
  for (auto& w : workers_)
    if (w.joinable()) w.join();
  workers_.clear();
}

}  // namespace smartpaste::daemon
