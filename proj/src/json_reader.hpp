#pragma once

// Strict JSON field access shared by the .pm1 and .pi1 loaders.

#include <initializer_list>
#include <optional>
#include <string>

#include <json.hpp>

#include "mbplan/diagnostic.hpp"

namespace mbplan::detail {

class JsonReader {
 public:
  using json = nlohmann::json;

  Diagnostics diags;

  void error(std::string rule, std::string path, std::string message, std::string element = {}) {
    Diagnostic d;
    d.rule = "ingest." + std::move(rule);
    d.path = std::move(path);
    d.element = std::move(element);
    d.message = std::move(message);
    diags.push_back(std::move(d));
  }

  /// Unknown keys are errors.
  bool check_keys(const json& obj, const std::string& path,
                  std::initializer_list<std::string_view> allowed) {
    if (!obj.is_object()) {
      error("schema", path.empty() ? "/" : path, "expected an object");
      return false;
    }
    bool ok = true;
    for (const auto& [key, _] : obj.items()) {
      bool known = false;
      for (auto a : allowed) known = known || key == a;
      if (!known) {
        error("unknown-key", path + "/" + key, "unknown key '" + key + "'");
        ok = false;
      }
    }
    return ok;
  }

  std::optional<std::string> string_field(const json& obj, const std::string& path, const char* key,
                                          bool required = true) {
    auto it = obj.find(key);
    if (it == obj.end()) {
      if (required) error("schema", path.empty() ? "/" : path, std::string("missing required key '") + key + "'");
      return std::nullopt;
    }
    if (!it->is_string()) {
      error("schema", path + "/" + key, "expected a string");
      return std::nullopt;
    }
    return it->get<std::string>();
  }

  const json* array_field(const json& obj, const std::string& path, const char* key) {
    auto it = obj.find(key);
    if (it == obj.end()) return nullptr;
    if (!it->is_array()) {
      error("schema", path + "/" + key, "expected an array");
      return nullptr;
    }
    return &*it;
  }

  std::optional<std::vector<std::string>> string_list(const json& obj, const std::string& path,
                                                      const char* key) {
    std::vector<std::string> out;
    const json* arr = array_field(obj, path, key);
    if (arr == nullptr) {
      if (obj.contains(key)) return std::nullopt;
      return out;
    }
    for (const auto& v : *arr) {
      if (!v.is_string()) {
        error("schema", path + "/" + key, "expected a list of strings");
        return std::nullopt;
      }
      out.push_back(v.get<std::string>());
    }
    return out;
  }
};

/// Parses JSON, turning parse failures into an `ingest.syntax` diagnostic.
std::optional<nlohmann::json> parse_json(std::string_view text, Diagnostics& diags);

}  // namespace mbplan::detail
