#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace mbplan::fixtures {

/// One directory under fixtures/: model.pm1, optional instance.pi1,
/// golden/{domain,problem}.pddl and expect.txt (key=value lines).
struct Fixture {
  std::string name;
  std::filesystem::path dir;
  std::filesystem::path model;
  std::optional<std::filesystem::path> instance;
  std::optional<std::filesystem::path> golden_domain;
  std::optional<std::filesystem::path> golden_problem;
  std::map<std::string, std::string> expect;

  bool negative() const { return get("kind") == "negative"; }
  std::optional<std::string> get(const std::string& key) const;
};

/// The committed fixtures directory of this source tree.
std::filesystem::path default_root();

/// Fixtures sorted by name. Directories without model.pm1 are skipped.
std::vector<Fixture> fixture_catalog(const std::filesystem::path& root = default_root());

}  // namespace mbplan::fixtures
