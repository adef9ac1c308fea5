#include <cmath>

#include <json.hpp>

#include "json_reader.hpp"
#include "mbplan/compiler.hpp"
#include "mbplan/ingest.hpp"

namespace mbplan::compiler {

using nlohmann::json;

namespace {

std::optional<GroundFact> fact(detail::JsonReader& r, const json& obj, const std::string& path,
                               const char* name_key) {
  auto name = r.string_field(obj, path, name_key);
  auto args = r.string_list(obj, path, "args");
  if (!name || !args) return std::nullopt;
  return GroundFact{*name, *args};
}

}  // namespace

Result<InstanceData> load_instance(std::string_view text) {
  detail::JsonReader r;
  auto parsed = detail::parse_json(text, r.diags);
  if (!parsed) return r.diags;
  const json& doc = *parsed;
  if (!r.check_keys(doc, "", {"format_version", "problem", "objects", "init", "values", "goal", "metric"})) {
    return r.diags;
  }
  auto version = r.string_field(doc, "", "format_version");
  if (version && *version != ingest::kFormatVersion) {
    r.error("version", "/format_version", "unsupported format_version '" + *version + "'");
  }
  InstanceData data;
  if (auto name = r.string_field(doc, "", "problem")) data.problem_name = *name;

  if (const json* objects = r.array_field(doc, "", "objects")) {
    for (std::size_t i = 0; i < objects->size(); ++i) {
      std::string path = "/objects/" + std::to_string(i);
      const json& o = (*objects)[i];
      if (!r.check_keys(o, path, {"name", "type"})) continue;
      auto name = r.string_field(o, path, "name");
      auto type = r.string_field(o, path, "type");
      if (name && type) data.objects.push_back({*name, *type});
    }
  }
  if (const json* init = r.array_field(doc, "", "init")) {
    for (std::size_t i = 0; i < init->size(); ++i) {
      std::string path = "/init/" + std::to_string(i);
      const json& f = (*init)[i];
      if (!r.check_keys(f, path, {"predicate", "args"})) continue;
      if (auto g = fact(r, f, path, "predicate")) data.init_predicates.push_back(std::move(*g));
    }
  }
  if (const json* values = r.array_field(doc, "", "values")) {
    for (std::size_t i = 0; i < values->size(); ++i) {
      std::string path = "/values/" + std::to_string(i);
      const json& v = (*values)[i];
      if (!r.check_keys(v, path, {"function", "args", "value"})) continue;
      auto term = fact(r, v, path, "function");
      auto it = v.find("value");
      if (it == v.end() || !it->is_number()) {
        r.error("schema", path + "/value", "expected a number");
        continue;
      }
      if (term) data.init_function_values.push_back({std::move(*term), it->get<double>()});
    }
  }
  if (const json* goal = r.array_field(doc, "", "goal")) {
    for (std::size_t i = 0; i < goal->size(); ++i) {
      std::string path = "/goal/" + std::to_string(i);
      const json& g = (*goal)[i];
      if (!r.check_keys(g, path, {"predicate", "args", "negated"})) continue;
      bool negated = false;
      if (auto it = g.find("negated"); it != g.end()) {
        if (!it->is_boolean()) {
          r.error("schema", path + "/negated", "expected a boolean");
          continue;
        }
        negated = it->get<bool>();
      }
      if (auto f = fact(r, g, path, "predicate")) data.goal.push_back({std::move(*f), negated});
    }
  }
  if (auto it = doc.find("metric"); it != doc.end()) {
    if (r.check_keys(*it, "/metric", {"minimize", "args"})) {
      if (auto m = fact(r, *it, "/metric", "minimize")) data.metric = std::move(*m);
    }
  }
  if (!r.diags.empty()) return r.diags;
  return data;
}

std::string save_instance(const InstanceData& data) {
  using oj = nlohmann::ordered_json;
  auto fact_json = [](const char* key, const GroundFact& f) {
    oj o;
    o[key] = f.name;
    o["args"] = f.args;
    return o;
  };
  oj doc;
  doc["format_version"] = std::string(ingest::kFormatVersion);
  doc["problem"] = data.problem_name;
  oj objects = oj::array();
  for (const auto& o : data.objects) objects.push_back(oj{{"name", o.name}, {"type", o.type}});
  if (!objects.empty()) doc["objects"] = std::move(objects);
  oj init = oj::array();
  for (const auto& f : data.init_predicates) init.push_back(fact_json("predicate", f));
  if (!init.empty()) doc["init"] = std::move(init);
  oj values = oj::array();
  for (const auto& v : data.init_function_values) {
    oj o = fact_json("function", v.term);
    if (std::floor(v.value) == v.value && std::fabs(v.value) < 1e15) {
      o["value"] = static_cast<long long>(v.value);
    } else {
      o["value"] = v.value;
    }
    values.push_back(std::move(o));
  }
  if (!values.empty()) doc["values"] = std::move(values);
  oj goal = oj::array();
  for (const auto& g : data.goal) {
    oj o = fact_json("predicate", g.atom);
    if (g.negated) o["negated"] = true;
    goal.push_back(std::move(o));
  }
  if (!goal.empty()) doc["goal"] = std::move(goal);
  if (data.metric) {
    oj m;
    m["minimize"] = data.metric->name;
    if (!data.metric->args.empty()) m["args"] = data.metric->args;
    doc["metric"] = std::move(m);
  }
  return doc.dump(2, ' ', false, oj::error_handler_t::replace) + "\n";
}

}  // namespace mbplan::compiler
