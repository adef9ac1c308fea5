#pragma once

#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace mbplan {

enum class Severity { Error, Warning };

std::string_view to_string(Severity s);

/// A structured finding produced by ingestion, validation, parsing or
/// compilation. `rule` is a registered id such as "P02" or "ingest.dangling-ref".
struct Diagnostic {
  std::string rule;
  Severity severity = Severity::Error;
  std::string element;  // element id, or empty when not element-bound
  std::string path;     // human-readable location (qualified name, JSON path, ...)
  std::string message;
  int line = 0;  // 1-based; 0 when not text-bound
  int column = 0;

  friend bool operator==(const Diagnostic&, const Diagnostic&) = default;
};

using Diagnostics = std::vector<Diagnostic>;

/// `severity rule element-path: message`, with `:line:col` appended to the
/// path for text-bound findings.
std::string render(const Diagnostic& d);
void render_all(std::ostream& os, const Diagnostics& ds);
/// JSON array, one object per diagnostic.
std::string render_json(const Diagnostics& ds);

bool has_errors(const Diagnostics& ds);

/// Either a value or a non-empty list of diagnostics, never both.
template <typename T>
class Result {
 public:
  Result(T value) : data_(std::move(value)) {}  // NOLINT(google-explicit-constructor)
  Result(Diagnostics diags) : data_(std::move(diags)) {}  // NOLINT(google-explicit-constructor)
  Result(Diagnostic diag) : data_(Diagnostics{std::move(diag)}) {}  // NOLINT(google-explicit-constructor)

  bool ok() const { return std::holds_alternative<T>(data_); }
  explicit operator bool() const { return ok(); }

  T& value() & { return std::get<T>(data_); }
  const T& value() const& { return std::get<T>(data_); }
  T&& value() && { return std::get<T>(std::move(data_)); }
  T* operator->() { return &value(); }
  const T* operator->() const { return &value(); }
  T& operator*() & { return value(); }
  const T& operator*() const& { return value(); }

  const Diagnostics& diagnostics() const { return std::get<Diagnostics>(data_); }

 private:
  std::variant<T, Diagnostics> data_;
};

}  // namespace mbplan
