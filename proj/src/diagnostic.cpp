#include "mbplan/diagnostic.hpp"

#include <algorithm>
#include <sstream>

#include <json.hpp>

namespace mbplan {

std::string_view to_string(Severity s) { return s == Severity::Error ? "error" : "warning"; }

std::string render(const Diagnostic& d) {
  std::ostringstream os;
  os << to_string(d.severity) << ' ' << d.rule << ' ';
  os << (d.path.empty() ? (d.element.empty() ? std::string("<model>") : d.element) : d.path);
  if (d.line > 0) os << ':' << d.line << ':' << d.column;
  os << ": " << d.message;
  return os.str();
}

void render_all(std::ostream& os, const Diagnostics& ds) {
  for (const auto& d : ds) os << render(d) << '\n';
}

std::string render_json(const Diagnostics& ds) {
  auto arr = nlohmann::ordered_json::array();
  for (const auto& d : ds) {
    nlohmann::ordered_json j;
    j["severity"] = std::string(to_string(d.severity));
    j["rule"] = d.rule;
    j["element"] = d.element;
    j["path"] = d.path;
    j["message"] = d.message;
    if (d.line > 0) {
      j["line"] = d.line;
      j["column"] = d.column;
    }
    arr.push_back(std::move(j));
  }
  return arr.dump(2) + "\n";
}

bool has_errors(const Diagnostics& ds) {
  return std::any_of(ds.begin(), ds.end(),
                     [](const Diagnostic& d) { return d.severity == Severity::Error; });
}

}  // namespace mbplan
