#include "mbplan/names.hpp"

#include <array>
#include <charconv>
#include <cmath>

namespace mbplan {
namespace {

bool is_letter(char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z'); }
bool is_digit(char c) { return c >= '0' && c <= '9'; }
char to_lower(char c) { return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c; }

}  // namespace

std::string lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = to_lower(c);
  return out;
}

bool iequals(std::string_view a, std::string_view b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (to_lower(a[i]) != to_lower(b[i])) return false;
  }
  return true;
}

bool name_less(std::string_view a, std::string_view b) {
  const std::size_t n = std::min(a.size(), b.size());
  for (std::size_t i = 0; i < n; ++i) {
    char ca = to_lower(a[i]), cb = to_lower(b[i]);
    if (ca != cb) return ca < cb;
  }
  if (a.size() != b.size()) return a.size() < b.size();
  return a < b;
}

bool is_pddl_name(std::string_view s) {
  if (s.empty() || !is_letter(s.front())) return false;
  for (char c : s.substr(1)) {
    if (!is_letter(c) && !is_digit(c) && c != '-' && c != '_') return false;
  }
  return true;
}

bool is_pddl_variable(std::string_view s) {
  return s.size() > 1 && s.front() == '?' && is_pddl_name(s.substr(1));
}

bool is_valid_domain_name(std::string_view s) {
  if (s.empty() || !is_letter(s.front())) return false;
  for (char c : s.substr(1)) {
    if (!is_letter(c) && !is_digit(c) && c != '_') return false;
  }
  return true;
}

bool is_reserved_word(std::string_view s) {
  static constexpr std::array<std::string_view, 14> kReserved = {
      "and",    "not",    "increase", "define", "domain", "problem", "object",
      "number", "either", "minimize", "maximize", "total-time", "or", "imply"};
  for (auto r : kReserved) {
    if (iequals(s, r)) return true;
  }
  return false;
}

std::string format_number(double v) {
  if (std::isfinite(v) && v == std::floor(v) && std::fabs(v) < 1e15) {
    if (v == 0) return "0";
    std::array<char, 32> buf{};
    auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), static_cast<long long>(v));
    return std::string(buf.data(), ptr);
  }
  std::array<char, 64> buf{};
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), ptr);
}

}  // namespace mbplan
