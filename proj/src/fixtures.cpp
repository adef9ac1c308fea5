#include "mbplan/fixtures.hpp"

#include <algorithm>
#include <fstream>

namespace mbplan::fixtures {

namespace fs = std::filesystem;

std::optional<std::string> Fixture::get(const std::string& key) const {
  auto it = expect.find(key);
  if (it == expect.end()) return std::nullopt;
  return it->second;
}

fs::path default_root() { return fs::path(MBPLAN_FIXTURE_DIR); }

namespace {

std::map<std::string, std::string> read_expect(const fs::path& path) {
  std::map<std::string, std::string> out;
  std::ifstream in(path);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    out[line.substr(0, eq)] = line.substr(eq + 1);
  }
  return out;
}

std::optional<fs::path> if_exists(const fs::path& p) {
  if (fs::exists(p)) return p;
  return std::nullopt;
}

}  // namespace

std::vector<Fixture> fixture_catalog(const fs::path& root) {
  std::vector<Fixture> out;
  std::error_code ec;
  for (const auto& entry : fs::directory_iterator(root, ec)) {
    if (!entry.is_directory()) continue;
    const fs::path dir = entry.path();
    if (!fs::exists(dir / "model.pm1")) continue;
    Fixture f;
    f.name = dir.filename().string();
    f.dir = dir;
    f.model = dir / "model.pm1";
    f.instance = if_exists(dir / "instance.pi1");
    f.golden_domain = if_exists(dir / "golden" / "domain.pddl");
    f.golden_problem = if_exists(dir / "golden" / "problem.pddl");
    f.expect = read_expect(dir / "expect.txt");
    out.push_back(std::move(f));
  }
  std::sort(out.begin(), out.end(), [](const Fixture& a, const Fixture& b) { return a.name < b.name; });
  return out;
}

}  // namespace mbplan::fixtures
