#include "smartpaste/agent.hpp"

#include <array>

namespace smartpaste::agent {

namespace {

constexpr std::array<std::pair<ToolId, std::string_view>, 8> kNames{{
    {ToolId::get_clipboard_summary, "get_clipboard_summary"},
    {ToolId::add_structured_data, "add_structured_data"},
    {ToolId::add_metadata, "add_metadata"},
    {ToolId::sample_context, "sample_context"},
    {ToolId::add_transformation, "add_transformation"},
    {ToolId::run_query, "run_query"},
    {ToolId::write_temp_file, "write_temp_file"},
    {ToolId::paste_to_destination, "paste_to_destination"},
}};

Json format_enum(bool with_auto) {
  Json e = Json::array();
  if (with_auto) e.push_back("auto");
  for (auto f : {FormatId::html_table, FormatId::markdown_table, FormatId::latex_tabular,
                 FormatId::csv, FormatId::tsv, FormatId::aligned_text, FormatId::rtf_table})
    e.push_back(std::string(to_string(f)));
  return e;
}

Json str(std::string_view description = {}) {
  Json j{{"type", "string"}, {"minLength", 1}};
  if (!description.empty()) j["description"] = description;
  return j;
}

Json object(Json properties, Json required = Json::array()) {
  return Json{{"type", "object"},
              {"properties", std::move(properties)},
              {"required", std::move(required)},
              {"additionalProperties", false}};
}

Json build_schemas() {
  Json tools = Json::array();
  auto add = [&](ToolId id, std::string_view description, Json parameters) {
    tools.push_back(Json{{"name", std::string(to_string(id))},
                         {"description", description},
                         {"parameters", std::move(parameters)}});
  };

  add(ToolId::get_clipboard_summary,
      "Payload kinds, source and destination apps, the user's instruction and a raw sample "
      "(cut at 10000 characters).",
      object(Json::object()));

  add(ToolId::add_structured_data,
      "Parse the clipboard into tables with the given format and store them as the "
      "structured data. Returns shapes and headers only.",
      object({{"format", Json{{"type", "string"}, {"enum", format_enum(true)}}},
              {"options",
               object({{"header", Json{{"type", "string"},
                                       {"enum", {"detect", "first_row", "none"}}}}})}},
             {"format"}));

  add(ToolId::add_metadata, "Extract cell styles, spans or captions into metadata[key].",
      object({{"key", str()},
              {"extractor",
               Json{{"type", "string"}, {"enum", {"cell_styles", "spans", "caption"}}}}},
             {"key", "extractor"}));

  add(ToolId::sample_context,
      "Read part of the context, e.g. structured[0].rows with a 1-based row range.",
      object({{"path", str("raw | structured | metadata | transformations, then .name or [i]")},
              {"range", object({{"from", Json{{"type", "integer"}, {"minimum", 1}}},
                                {"to", Json{{"type", "integer"}, {"minimum", 1}}}},
                               {"from", "to"})}},
             {"path"}));

  Json transformation = object(
      {{"key", str()},
       {"plan", Json{{"type", "string"}, {"description", "transformation plan text"}}},
       {"render",
        object({{"fmt", Json{{"type", "string"}, {"enum", format_enum(false)}}},
                {"opts", object({{"styles", Json{{"type", "boolean"}}},
                                 {"booktabs", Json{{"type", "boolean"}}}})},
                {"source_key", str()}},
               {"fmt"})},
       {"loader", object({{"target", Json{{"type", "string"},
                                          {"enum", {"notebook_dataframe", "r_dataframe"}}}},
                          {"source_key", str()}},
                         {"target", "source_key"})},
       {"source_key", str("plan input; defaults to the structured data")}},
      {"key"});
  transformation["oneOf"] = Json::array(
      {Json{{"required", {"plan"}}}, Json{{"required", {"render"}}}, Json{{"required", {"loader"}}}});
  add(ToolId::add_transformation,
      "Store a new result under key: evaluate a plan, render a table to a format, or emit "
      "dataframe loader code for a csv temp file of source_key.",
      std::move(transformation));

  add(ToolId::run_query,
      "Evaluate a plan and return a single value (mode scalar) or the row count (mode count).",
      object({{"plan", Json{{"type", "string"}}},
              {"mode", Json{{"type", "string"}, {"enum", {"scalar", "count"}}}},
              {"source_key", str()}},
             {"plan"}));

  add(ToolId::write_temp_file,
      "Write transformations[key] to a temp file; tables are rendered by extension.",
      object({{"key", str()}, {"ext", str("csv, tsv, md, html, tex, rtf or txt")}},
             {"key", "ext"}));

  add(ToolId::paste_to_destination,
      "Paste transformations[key] into the destination app. Tables render to the requested "
      "content type.",
      object({{"key", str()},
              {"content_type", Json{{"type", "string"}, {"enum", {"text", "html", "rtf"}}}},
              {"api", str("plugin API to use; defaults to the plugin's paste API")}},
             {"key", "content_type"}));
  return tools;
}

bool type_matches(const Json& v, std::string_view type) {
  if (type == "object") return v.is_object();
  if (type == "array") return v.is_array();
  if (type == "string") return v.is_string();
  if (type == "boolean") return v.is_boolean();
  if (type == "integer") return v.is_number_integer();
  if (type == "number") return v.is_number();
  return false;
}

}  // namespace

std::optional<std::string> check(const Json& schema, const Json& v, const std::string& where) {
  if (auto t = schema.find("type"); t != schema.end() && !type_matches(v, t->get<std::string>()))
    return where + ": expected " + t->get<std::string>();
  if (auto e = schema.find("enum"); e != schema.end()) {
    bool found = false;
    for (const auto& option : *e) found = found || option == v;
    if (!found) return where + ": must be one of " + e->dump();
  }
  if (auto m = schema.find("minLength"); m != schema.end() && v.is_string() &&
                                          v.get<std::string>().size() < m->get<std::size_t>())
    return where + ": must not be empty";
  if (auto m = schema.find("minimum"); m != schema.end() && v.is_number() &&
                                        v.get<double>() < m->get<double>())
    return where + ": must be >= " + m->dump();
  if (auto items = schema.find("items"); items != schema.end() && v.is_array())
    for (std::size_t i = 0; i < v.size(); ++i)
      if (auto err = check(*items, v[i], where + "[" + std::to_string(i) + "]")) return err;
  if (!v.is_object()) return std::nullopt;

  if (auto r = schema.find("required"); r != schema.end())
    for (const auto& name : *r)
      if (!v.contains(name.get<std::string>()))
        return where + "." + name.get<std::string>() + ": required";
  const Json* props = schema.contains("properties") ? &schema["properties"] : nullptr;
  for (const auto& [k, item] : v.items()) {
    if (props && props->contains(k)) {
      if (auto err = check((*props)[k], item, where + "." + k)) return err;
    } else if (schema.value("additionalProperties", true) == false) {
      return where + "." + k + ": unexpected argument";
    }
  }
  if (auto one = schema.find("oneOf"); one != schema.end()) {
    int matches = 0;
    std::vector<std::string> names;
    for (const auto& sub : *one) {
      matches += check(sub, v, where) ? 0 : 1;
      for (const auto& n : sub.value("required", Json::array())) names.push_back(n);
    }
    if (matches != 1) {
      std::string list;
      for (const auto& n : names) list += (list.empty() ? "" : ", ") + n;
      return where + ": exactly one of " + list + " is required";
    }
  }
  return std::nullopt;
}

std::string_view to_string(ToolId t) {
  for (const auto& [id, name] : kNames)
    if (id == t) return name;
  return "?";
}

std::optional<ToolId> tool_from_string(std::string_view name) {
  for (const auto& [id, n] : kNames)
    if (n == name) return id;
  return std::nullopt;
}

const std::vector<ToolId>& all_tools() {
  static const std::vector<ToolId> tools = [] {
    std::vector<ToolId> v;
    for (const auto& [id, name] : kNames) v.push_back(id);
    return v;
  }();
  return tools;
}

const Json& tool_schemas() {
  static const Json schemas = build_schemas();
  return schemas;
}

std::optional<std::string> validate_args(ToolId tool, const Json& args) {
  for (const auto& t : tool_schemas())
    if (t["name"] == to_string(tool)) return check(t["parameters"], args, "args");
  return "unknown tool";
}

}  // namespace smartpaste::agent
