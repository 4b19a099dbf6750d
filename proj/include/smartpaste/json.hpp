#pragma once

#include <nlohmann/json.hpp>

namespace smartpaste {

/// Insertion-ordered JSON everywhere, so views and wire messages keep the key
/// order they were built with.
using Json = nlohmann::ordered_json;

}  // namespace smartpaste
