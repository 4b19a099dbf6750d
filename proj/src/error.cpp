#include "smartpaste/error.hpp"

namespace smartpaste {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::FixtureParse: return "FixtureParseError";
    case ErrorCode::EmptyFixture: return "EmptyFixtureError";
    case ErrorCode::DuplicateKind: return "DuplicateKindError";
    case ErrorCode::InvalidPayload: return "InvalidPayload";
    case ErrorCode::UndetectableFormat: return "UndetectableFormat";
    case ErrorCode::ImagePayloadUnsupported: return "ImagePayloadUnsupported";
    case ErrorCode::Parse: return "ParseError";
    case ErrorCode::NoTablesFound: return "NoTablesFound";
    case ErrorCode::Render: return "RenderError";
    case ErrorCode::UnknownTarget: return "UnknownTarget";
    case ErrorCode::PlanSyntax: return "PlanSyntaxError";
    case ErrorCode::UnknownColumn: return "UnknownColumn";
    case ErrorCode::Type: return "TypeError";
    case ErrorCode::EmptyResult: return "EmptyResultError";
    case ErrorCode::NotScalarResult: return "NotScalarResult";
    case ErrorCode::ToolArgs: return "ToolArgsError";
    case ErrorCode::MissingStructuredData: return "MissingStructuredData";
    case ErrorCode::BadPath: return "BadPath";
    case ErrorCode::UnknownKey: return "UnknownKey";
    case ErrorCode::Io: return "IoError";
    case ErrorCode::Delivery: return "DeliveryError";
    case ErrorCode::ProviderTransport: return "ProviderTransportError";
    case ErrorCode::NoContext: return "NoContext";
    case ErrorCode::UnknownJob: return "UnknownJob";
    case ErrorCode::DuplicateApp: return "DuplicateApp";
    case ErrorCode::Schema: return "SchemaError";
    case ErrorCode::NoPlugin: return "NoPlugin";
    case ErrorCode::PluginTimeout: return "PluginTimeout";
    case ErrorCode::Config: return "ConfigError";
  }
  return "Error";
}

}  // namespace smartpaste
