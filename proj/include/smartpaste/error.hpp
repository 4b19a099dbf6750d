#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace smartpaste {

enum class ErrorCode {
  // clipboard-model
  FixtureParse,
  EmptyFixture,
  DuplicateKind,
  InvalidPayload,
  // format-codec
  UndetectableFormat,
  ImagePayloadUnsupported,
  Parse,
  NoTablesFound,
  Render,
  UnknownTarget,
  // transform-plan
  PlanSyntax,
  UnknownColumn,
  Type,
  EmptyResult,
  NotScalarResult,
  // agent-core
  ToolArgs,
  MissingStructuredData,
  BadPath,
  UnknownKey,
  Io,
  Delivery,
  ProviderTransport,
  // service-daemon
  NoContext,
  UnknownJob,
  DuplicateApp,
  Schema,
  NoPlugin,
  PluginTimeout,
  Config,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Base for every error raised by the library. The code is stable and is what
/// crosses the wire; the message is for humans.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

class ParseError : public Error {
 public:
  ParseError(std::size_t position, const std::string& reason)
      : Error(ErrorCode::Parse,
              "parse error at byte " + std::to_string(position) + ": " + reason),
        position_(position),
        reason_(reason) {}

  std::size_t position() const noexcept { return position_; }
  const std::string& reason() const noexcept { return reason_; }

 private:
  std::size_t position_;
  std::string reason_;
};

class PlanSyntaxError : public Error {
 public:
  PlanSyntaxError(int line, int column, const std::string& expected)
      : Error(ErrorCode::PlanSyntax, "plan syntax error at " + std::to_string(line) +
                                         ":" + std::to_string(column) + ": expected " +
                                         expected),
        line_(line),
        column_(column),
        expected_(expected) {}

  int line() const noexcept { return line_; }
  int column() const noexcept { return column_; }
  const std::string& expected() const noexcept { return expected_; }

 private:
  int line_;
  int column_;
  std::string expected_;
};

class UnknownColumnError : public Error {
 public:
  UnknownColumnError(const std::string& ref, const std::string& available)
      : Error(ErrorCode::UnknownColumn,
              "unknown column " + ref + " (available: " + available + ")"),
        ref_(ref),
        available_(available) {}

  const std::string& ref() const noexcept { return ref_; }
  const std::string& available() const noexcept { return available_; }

 private:
  std::string ref_;
  std::string available_;
};

/// Evaluation-time type error; `statement` is the 1-based statement index.
class PlanTypeError : public Error {
 public:
  PlanTypeError(int statement, const std::string& detail)
      : Error(ErrorCode::Type,
              "type error in statement " + std::to_string(statement) + ": " + detail),
        statement_(statement) {}

  int statement() const noexcept { return statement_; }

 private:
  int statement_;
};

}  // namespace smartpaste
