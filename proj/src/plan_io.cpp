#include <charconv>
#include <cmath>
#include <regex>

#include "mbplan/names.hpp"
#include "mbplan/planner.hpp"

namespace mbplan::planner {

std::string format_plan(const GroundTask& task, const Plan& plan) {
  std::string out;
  for (auto s : plan.steps) out += task.actions.at(s).label() + "\n";
  out += "; cost = " + format_number(plan.total_cost) + "\n";
  return out;
}

namespace {

Diagnostic plan_error(int line, std::string message) {
  Diagnostic d{"plan.syntax", Severity::Error, "", "<plan>", std::move(message)};
  d.line = line;
  d.column = 1;
  return d;
}

}  // namespace

Result<PlanFile> parse_plan(std::string_view text) {
  static const std::regex cost_re(R"(^\s*cost\s*=\s*([-+0-9.eE]+))", std::regex::icase);
  // optional "0:" or "0.000:" timestamp, one parenthesized action, optional "[d]"
  static const std::regex step_re(R"(^\s*(?:[0-9.]+\s*:\s*)?\(([^()]*)\)\s*(?:\[[^\]]*\])?\s*$)");

  PlanFile plan;
  Diagnostics diags;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string line(text.substr(pos, end - pos));
    pos = end + 1;
    ++line_no;

    std::string comment;
    if (auto semi = line.find(';'); semi != std::string::npos) {
      comment = line.substr(semi + 1);
      line.resize(semi);
    }
    std::smatch m;
    if (!comment.empty() && std::regex_search(comment, m, cost_re)) {
      std::string num = m[1].str();
      double v = 0;
      auto [ptr, ec] = std::from_chars(num.data(), num.data() + num.size(), v);
      if (ec != std::errc{} || ptr != num.data() + num.size() || !std::isfinite(v)) {
        diags.push_back(plan_error(line_no, "malformed cost '" + num + "'"));
      } else {
        plan.declared_cost = v;
      }
    }
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    if (!std::regex_match(line, m, step_re) || m[1].str().find_first_not_of(" \t\r") == std::string::npos) {
      diags.push_back(plan_error(line_no, "expected one (action arg...) per line"));
      continue;
    }
    std::string body = m[1].str();
    std::string norm = "(";
    std::size_t i = 0;
    while (i < body.size()) {
      while (i < body.size() && (body[i] == ' ' || body[i] == '\t' || body[i] == '\r')) ++i;
      std::size_t j = i;
      while (j < body.size() && body[j] != ' ' && body[j] != '\t' && body[j] != '\r') ++j;
      if (j > i) {
        if (norm.size() > 1) norm += ' ';
        norm += body.substr(i, j - i);
      }
      i = j;
    }
    plan.steps.push_back(norm + ")");
    plan.lines.push_back(line_no);
  }
  if (!diags.empty()) return diags;
  return plan;
}

PlanReport check_plan(const GroundTask& task, const PlanFile& file) {
  Plan plan;
  for (std::size_t i = 0; i < file.steps.size(); ++i) {
    auto idx = task.find_action(file.steps[i]);
    if (!idx) {
      PlanReport r;
      r.failed_step = i + 1;
      r.reason = "unknown action " + file.steps[i];
      for (auto s : plan.steps) r.total_cost += task.actions[s].cost;
      return r;
    }
    plan.steps.push_back(*idx);
  }
  plan = make_plan(task, std::move(plan.steps));
  if (file.declared_cost) plan.total_cost = *file.declared_cost;
  return validate_plan(task, plan);
}

}  // namespace mbplan::planner
