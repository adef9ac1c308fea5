#include "mbplan/ingest.hpp"

#include <initializer_list>

#include <json.hpp>

#include "json_reader.hpp"

namespace mbplan::ingest {

using nlohmann::json;
using namespace mbplan::model;

std::pair<int, int> line_column(std::string_view text, std::size_t offset) {
  int line = 1, col = 1;
  for (std::size_t i = 0; i < offset && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

namespace {

class Reader : public detail::JsonReader {
 public:
  const json* array_field(const json& doc, const char* key) {
    return detail::JsonReader::array_field(doc, "", key);
  }

  std::optional<TagValue> tag_value(const json& v, const std::string& path) {
    if (v.is_string()) return TagValue{v.get<std::string>()};
    if (v.is_boolean()) return TagValue{v.get<bool>()};
    if (v.is_number()) return TagValue{v.get<double>()};
    if (v.is_array()) {
      NameList names;
      for (const auto& n : v) {
        if (!n.is_string()) {
          error("schema", path, "name lists must contain strings only");
          return std::nullopt;
        }
        names.push_back(n.get<std::string>());
      }
      return TagValue{std::move(names)};
    }
    if (v.is_object() && v.size() == 1 && v.contains("type_ref")) {
      if (!v["type_ref"].is_string()) {
        error("schema", path + "/type_ref", "expected a string");
        return std::nullopt;
      }
      return TagValue{TypeRef{ElementId{v["type_ref"].get<std::string>()}}};
    }
    if (v.is_object() && v.size() == 1 && v.contains("params")) {
      const json& ps = v["params"];
      if (!ps.is_array()) {
        error("schema", path + "/params", "expected an array");
        return std::nullopt;
      }
      ParameterList params;
      for (std::size_t i = 0; i < ps.size(); ++i) {
        const json& p = ps[i];
        if (!p.is_array() || p.size() != 2 || !p[0].is_string() || !p[1].is_string()) {
          error("schema", path + "/params/" + std::to_string(i), "expected [variable, type-id]");
          return std::nullopt;
        }
        params.push_back({p[0].get<std::string>(), ElementId{p[1].get<std::string>()}});
      }
      return TagValue{std::move(params)};
    }
    error("schema", path, "unsupported tag value");
    return std::nullopt;
  }
};

}  // namespace

Result<ModelGraph> load_model(std::string_view text) {
  Reader r;
  auto parsed = detail::parse_json(text, r.diags);
  if (!parsed) return r.diags;
  const json& doc = *parsed;

  if (!r.check_keys(doc, "", {"format_version", "elements", "flows", "generalizations",
                              "applications"})) {
    return r.diags;
  }
  auto version = r.string_field(doc, "", "format_version");
  if (version && *version != kFormatVersion) {
    r.error("version", "/format_version",
            "unsupported format_version '" + *version + "' (expected '" +
                std::string(kFormatVersion) + "')");
  }
  if (!r.diags.empty()) return r.diags;

  ModelBuilder builder;

  if (const json* elements = r.array_field(doc, "elements")) {
    for (std::size_t i = 0; i < elements->size(); ++i) {
      const json& e = (*elements)[i];
      std::string path = "/elements/" + std::to_string(i);
      if (!r.check_keys(e, path, {"id", "kind", "name", "owner"})) continue;
      auto id = r.string_field(e, path, "id");
      auto kind_text = r.string_field(e, path, "kind");
      auto name = r.string_field(e, path, "name", false);
      auto owner = r.string_field(e, path, "owner", false);
      if (!id || !kind_text) continue;
      auto kind = parse_element_kind(*kind_text);
      if (!kind) {
        r.error("schema", path + "/kind", "unknown element kind '" + *kind_text + "'", *id);
        continue;
      }
      builder.add_element(*id, *kind, name.value_or(""), owner);
    }
  }

  if (const json* flows = r.array_field(doc, "flows")) {
    for (std::size_t i = 0; i < flows->size(); ++i) {
      const json& f = (*flows)[i];
      std::string path = "/flows/" + std::to_string(i);
      if (!r.check_keys(f, path, {"id", "flavor", "source", "target"})) continue;
      auto id = r.string_field(f, path, "id");
      auto flavor_text = r.string_field(f, path, "flavor");
      auto source = r.string_field(f, path, "source");
      auto target = r.string_field(f, path, "target");
      if (!id || !flavor_text || !source || !target) continue;
      auto flavor = parse_flow_flavor(*flavor_text);
      if (!flavor) {
        r.error("schema", path + "/flavor", "unknown flow flavor '" + *flavor_text + "'", *id);
        continue;
      }
      builder.add_flow(Flow{ElementId{*id}, *flavor, ElementId{*source}, ElementId{*target}});
    }
  }

  if (const json* gens = r.array_field(doc, "generalizations")) {
    for (std::size_t i = 0; i < gens->size(); ++i) {
      const json& g = (*gens)[i];
      std::string path = "/generalizations/" + std::to_string(i);
      if (!r.check_keys(g, path, {"specific", "general"})) continue;
      auto specific = r.string_field(g, path, "specific");
      auto general = r.string_field(g, path, "general");
      if (specific && general) builder.add_generalization(*specific, *general);
    }
  }

  if (const json* apps = r.array_field(doc, "applications")) {
    for (std::size_t i = 0; i < apps->size(); ++i) {
      const json& a = (*apps)[i];
      std::string path = "/applications/" + std::to_string(i);
      if (!r.check_keys(a, path, {"element", "stereotype", "tags"})) continue;
      auto element = r.string_field(a, path, "element");
      auto st_text = r.string_field(a, path, "stereotype");
      if (!element || !st_text) continue;
      auto st = parse_stereotype(*st_text);
      if (!st) {
        r.error("schema", path + "/stereotype", "unknown stereotype '" + *st_text + "'", *element);
        continue;
      }
      TagMap tags;
      bool tags_ok = true;
      if (auto it = a.find("tags"); it != a.end()) {
        if (!it->is_object()) {
          r.error("schema", path + "/tags", "expected an object");
          continue;
        }
        for (const auto& [key, value] : it->items()) {
          auto v = r.tag_value(value, path + "/tags/" + key);
          if (!v) {
            tags_ok = false;
            continue;
          }
          tags.emplace(key, std::move(*v));
        }
      }
      if (tags_ok) builder.apply(*element, *st, std::move(tags));
    }
  }

  if (!r.diags.empty()) return r.diags;

  auto built = builder.build();
  if (built) return std::move(built).value();
  Diagnostics out;
  for (Diagnostic d : built.diagnostics()) {
    // model.<rule> -> ingest.<rule>
    d.rule = "ingest." + d.rule.substr(d.rule.find('.') + 1);
    out.push_back(std::move(d));
  }
  return out;
}

namespace {

nlohmann::ordered_json tag_to_json(const TagValue& v) {
  using oj = nlohmann::ordered_json;
  return std::visit(
      [](const auto& x) -> oj {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, TypeRef>) {
          oj o;
          o["type_ref"] = x.type.value;
          return o;
        } else if constexpr (std::is_same_v<T, ParameterList>) {
          oj arr = oj::array();
          for (const auto& p : x) arr.push_back(oj::array({p.variable, p.type.value}));
          oj o;
          o["params"] = std::move(arr);
          return o;
        } else if constexpr (std::is_same_v<T, NameList>) {
          oj arr = oj::array();
          for (const auto& n : x) arr.push_back(n);
          return arr;
        } else {
          return oj(x);
        }
      },
      v);
}

}  // namespace

std::string save_model(const ModelGraph& model) {
  using oj = nlohmann::ordered_json;
  oj doc;
  doc["format_version"] = std::string(kFormatVersion);
  if (!model.elements().empty()) {
    oj arr = oj::array();
    for (const auto& e : model.elements()) {
      oj o;
      o["id"] = e.id.value;
      o["kind"] = std::string(to_string(e.kind));
      o["name"] = e.name;
      if (e.owner) o["owner"] = e.owner->value;
      arr.push_back(std::move(o));
    }
    doc["elements"] = std::move(arr);
  }
  if (!model.flows().empty()) {
    oj arr = oj::array();
    for (const auto& f : model.flows()) {
      oj o;
      o["id"] = f.id.value;
      o["flavor"] = std::string(to_string(f.flavor));
      o["source"] = f.source.value;
      o["target"] = f.target.value;
      arr.push_back(std::move(o));
    }
    doc["flows"] = std::move(arr);
  }
  if (!model.generalizations().empty()) {
    oj arr = oj::array();
    for (const auto& g : model.generalizations()) {
      oj o;
      o["specific"] = g.specific.value;
      o["general"] = g.general.value;
      arr.push_back(std::move(o));
    }
    doc["generalizations"] = std::move(arr);
  }
  if (!model.applications().empty()) {
    oj arr = oj::array();
    for (const auto& a : model.applications()) {
      oj o;
      o["element"] = a.element.value;
      o["stereotype"] = std::string(to_string(a.stereotype));
      if (!a.tags.empty()) {
        oj tags;
        for (const auto& [key, value] : a.tags) tags[key] = tag_to_json(value);
        o["tags"] = std::move(tags);
      }
      arr.push_back(std::move(o));
    }
    doc["applications"] = std::move(arr);
  }
  return doc.dump(2, ' ', false, oj::error_handler_t::replace) + "\n";
}

}  // namespace mbplan::ingest

namespace mbplan::detail {

std::optional<nlohmann::json> parse_json(std::string_view text, Diagnostics& diags) {
  try {
    return nlohmann::json::parse(text.begin(), text.end());
  } catch (const nlohmann::json::parse_error& e) {
    Diagnostic d;
    d.rule = "ingest.syntax";
    auto [line, col] = ingest::line_column(text, e.byte == 0 ? 0 : e.byte - 1);
    d.line = line;
    d.column = col;
    d.path = "<document>";
    d.message = e.what();
    diags.push_back(std::move(d));
  } catch (const std::exception& e) {
    diags.push_back({"ingest.syntax", Severity::Error, "", "<document>", e.what()});
  }
  return std::nullopt;
}

}  // namespace mbplan::detail
