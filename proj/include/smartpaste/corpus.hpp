#pragma once

// Scripted end-to-end cases: a fixture, a provider transcript and the checks
// the final result must satisfy, run against an in-process daemon over the
// loopback wire protocol.

#include "smartpaste/agent.hpp"
#include "smartpaste/json.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace smartpaste::corpus {

struct TaskCase {
  std::string name;
  std::filesystem::path dir;
  Json fixture;      // fixture.json
  Json transcript;   // transcript.json, one script per job
  Json assertions;   // assertions.json: {description, jobs:[{dest, instruction?, checks:[...]}]}
};

/// Throws Error(Io) for missing files and Error(Schema) for malformed ones.
TaskCase load_case(const std::filesystem::path& dir);
/// Case directories under `root`, sorted by name.
std::vector<std::filesystem::path> list_cases(const std::filesystem::path& root);

struct CheckResult {
  std::string check;
  bool ok = false;
  std::string detail;
};

struct JobReport {
  std::string job_id;
  std::string outcome;
  int retries_used = 0;
  std::string error;
  std::optional<std::string> content;
  agent::AgentTranscript transcript;
  std::vector<CheckResult> checks;
};

struct CaseReport {
  std::string name;
  std::vector<JobReport> jobs;
  /// Set when the case could not be driven at all (as opposed to a failed check).
  std::optional<std::string> infrastructure_error;
  double seconds = 0;

  bool passed() const;
};

Json to_json(const CaseReport& r);

/// Starts a daemon in scripted mode, replays the case through copy_event and
/// smart_paste, and evaluates every check.
CaseReport run_case(const TaskCase& c);

/// Re-executes the recorded transcripts of `report` against a fresh context
/// built from the same fixture. Returns one message per job whose pasted
/// content differs (empty = byte-identical).
std::vector<std::string> replay_case(const TaskCase& c, const CaseReport& report);

}  // namespace smartpaste::corpus
