#pragma once

#include "smartpaste/table.hpp"

#include "smartpaste/json.hpp"

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace smartpaste {

enum class PayloadKind { text, html, rtf, image };
enum class ContentType { text, html, rtf };

std::string_view to_string(PayloadKind k);
std::string_view to_string(ContentType c);
std::optional<PayloadKind> payload_kind_from_string(std::string_view s);
std::optional<ContentType> content_type_from_string(std::string_view s);

/// One clipboard flavor. Text-like kinds carry an encoding tag; only UTF-8 is
/// accepted by `validate`.
struct RawPayload {
  PayloadKind kind = PayloadKind::text;
  std::string bytes;
  std::string encoding = "utf-8";

  /// Throws Error(InvalidPayload) if text does not decode or an image is not
  /// a PNG/JPEG container.
  void validate() const;

  friend bool operator==(const RawPayload&, const RawPayload&) = default;
};

struct AppContext {
  std::string app_name;
  std::int64_t process_id = 0;
  std::string window_title;
  std::optional<std::string> icon;

  friend bool operator==(const AppContext&, const AppContext&) = default;
};

Json to_json(const AppContext& app);
AppContext app_context_from_json(const Json& j);

struct ClipboardSnapshot {
  std::vector<RawPayload> payloads;
  AppContext source;
  std::chrono::steady_clock::time_point captured_at{};

  const RawPayload* find(PayloadKind kind) const;
  /// Non-empty, one payload per kind, each payload valid.
  void validate() const;
};

/// Fixture <-> snapshot. `parse_sim_fixture` throws FixtureParse,
/// EmptyFixture or DuplicateKind; `encode_sim_fixture` picks base64 for
/// anything that is not valid UTF-8 text.
ClipboardSnapshot parse_sim_fixture(std::string_view json_text);
ClipboardSnapshot load_sim_fixture(const std::filesystem::path& path);
Json encode_sim_fixture(const ClipboardSnapshot& snapshot);

struct TransformResult {
  enum class Kind { table, rendered_text, scalar };

  Kind kind = Kind::table;
  std::optional<StructuredTable> table;
  std::optional<std::string> text;
  ContentType content_type = ContentType::text;
  std::optional<CellValue> value;

  static TransformResult of_table(StructuredTable t);
  static TransformResult of_text(std::string text, ContentType type);
  static TransformResult of_scalar(CellValue v);

  friend bool operator==(const TransformResult&, const TransformResult&) = default;
};

std::string_view to_string(TransformResult::Kind k);
Json to_json(const TransformResult& r);

/// Insertion-ordered string map; re-inserting a key replaces the value in
/// place.
template <typename V>
class OrderedMap {
 public:
  using value_type = std::pair<std::string, V>;

  const V* find(std::string_view key) const {
    for (const auto& [k, v] : items_)
      if (k == key) return &v;
    return nullptr;
  }
  V* find(std::string_view key) {
    for (auto& [k, v] : items_)
      if (k == key) return &v;
    return nullptr;
  }
  /// Returns true when an existing value was replaced.
  bool put(std::string key, V value) {
    if (V* existing = find(key)) {
      *existing = std::move(value);
      return true;
    }
    items_.emplace_back(std::move(key), std::move(value));
    return false;
  }
  std::size_t size() const { return items_.size(); }
  bool empty() const { return items_.empty(); }
  auto begin() const { return items_.begin(); }
  auto end() const { return items_.end(); }
  std::vector<std::string> keys() const {
    std::vector<std::string> out;
    for (const auto& [k, v] : items_) out.push_back(k);
    return out;
  }

  friend bool operator==(const OrderedMap&, const OrderedMap&) = default;

 private:
  std::vector<value_type> items_;
};

/// Working state for one transfer: raw snapshot, structured tables,
/// free-form metadata and named transformation results.
struct ContextObject {
  ClipboardSnapshot snapshot;
  std::vector<StructuredTable> structured;  // empty = not extracted yet
  Json metadata = Json::object();
  OrderedMap<TransformResult> transformations;
  std::optional<AppContext> destination;
  std::optional<std::string> instruction;

  bool has_structured() const { return !structured.empty(); }
};

ContextObject new_context(ClipboardSnapshot snapshot);

/// Sets destination and instruction, keeping everything already derived.
/// An empty instruction is stored as absent.
ContextObject attach_destination(ContextObject ctx, AppContext dest,
                                 std::optional<std::string> instruction);

/// JSON view used by sample_context and for replay comparisons.
Json context_view(const ContextObject& ctx);

// --- adapters ---------------------------------------------------------------

class ClipboardAdapter {
 public:
  virtual ~ClipboardAdapter() = default;
  virtual std::optional<ClipboardSnapshot> capture() = 0;
  /// Places content on the clipboard; throws Error(Delivery) on failure.
  virtual void write(const RawPayload& payload) = 0;
};

class DestinationAdapter {
 public:
  virtual ~DestinationAdapter() = default;
  /// Inserts content into the destination app; throws Error(Delivery).
  virtual void deliver(const AppContext& dest, std::string_view content, ContentType type) = 0;
};

/// In-memory clipboard standing in for the OS hooks.
class SimulatedClipboard : public ClipboardAdapter {
 public:
  void load(ClipboardSnapshot snapshot);
  std::optional<ClipboardSnapshot> capture() override;
  void write(const RawPayload& payload) override;

  void set_available(bool available);
  std::vector<RawPayload> writes() const;

 private:
  mutable std::mutex mu_;
  std::optional<ClipboardSnapshot> current_;
  std::vector<RawPayload> writes_;
  bool available_ = true;
};

struct Delivery {
  AppContext dest;
  std::string content;
  ContentType type;
};

/// Records deliveries; individual apps can be marked as down.
class SimulatedDestination : public DestinationAdapter {
 public:
  void deliver(const AppContext& dest, std::string_view content, ContentType type) override;

  void set_down(const std::string& app_name, bool down);
  std::vector<Delivery> deliveries() const;

 private:
  mutable std::mutex mu_;
  std::map<std::string, bool> down_;
  std::vector<Delivery> deliveries_;
};

}  // namespace smartpaste
