#include "mbplan/cli.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <random>
#include <sstream>

#include <CLI11.hpp>

#include "mbplan/compiler.hpp"
#include "mbplan/ingest.hpp"
#include "mbplan/names.hpp"
#include "mbplan/planner.hpp"
#include "mbplan/profile.hpp"

namespace mbplan::cli {

namespace fs = std::filesystem;

namespace {

struct Config {
  std::string model, instance, domain_file, problem_file, plan_file, input;
  std::string out;
  std::string rules = "all";
  std::string domain;
  std::string external;
  std::string heuristic = "none";
  std::size_t cap = 1'000'000;
  bool json = false;
  std::vector<std::string> inputs;
};

std::optional<std::string> read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) return std::nullopt;
  return ss.str();
}

std::string temp_suffix() {
  std::random_device rd;
  std::ostringstream ss;
  ss << ".tmp-" << std::hex << rd() << rd();
  return ss.str();
}

/// Stages every file next to its target, then renames them all. Nothing is
/// renamed if any write fails.
bool write_atomically(const std::vector<std::pair<fs::path, std::string>>& files, std::ostream& err) {
  std::vector<std::pair<fs::path, fs::path>> staged;
  auto cleanup = [&] {
    std::error_code ec;
    for (const auto& [tmp, target] : staged) fs::remove(tmp, ec);
  };
  for (const auto& [target, content] : files) {
    std::error_code ec;
    if (target.has_parent_path()) fs::create_directories(target.parent_path(), ec);
    fs::path tmp = target;
    tmp += temp_suffix();
    std::ofstream o(tmp, std::ios::binary | std::ios::trunc);
    if (o) {
      staged.emplace_back(tmp, target);
      o << content;
      o.close();
    }
    if (!o) {
      err << "error: cannot write '" << target.string() << "'\n";
      cleanup();
      return false;
    }
  }
  for (const auto& [tmp, target] : staged) {
    std::error_code ec;
    fs::rename(tmp, target, ec);
    if (ec) {
      err << "error: cannot replace '" << target.string() << "': " << ec.message() << "\n";
      cleanup();
      return false;
    }
  }
  return true;
}

void report(std::ostream& err, const std::string& path, const Diagnostics& ds) {
  for (Diagnostic d : ds) {
    if (d.path.empty() || d.path[0] == '<' || d.path[0] == '/') {
      d.path = path + (d.path.empty() || d.path[0] == '<' ? "" : "#" + d.path);
    }
    err << render(d) << "\n";
  }
}

std::optional<model::ModelGraph> load_model_file(const std::string& path, std::ostream& err) {
  auto text = read_file(path);
  if (!text) {
    err << "error: cannot read '" << path << "'\n";
    return std::nullopt;
  }
  auto m = ingest::load_model(*text);
  if (!m) {
    report(err, path, m.diagnostics());
    return std::nullopt;
  }
  return std::move(m).value();
}

int cmd_validate(const Config& c, std::ostream& out, std::ostream& err) {
  auto rules = profile::RuleSet::parse(c.rules);
  if (!rules) {
    report(err, "--rules", rules.diagnostics());
    return kInputError;
  }
  auto m = load_model_file(c.model, err);
  if (!m) return kInputError;
  Diagnostics ds = profile::validate(*m, *rules);
  if (c.json) {
    out << render_json(ds);
  } else {
    for (const auto& d : ds) err << render(d) << "\n";
  }
  return has_errors(ds) ? kFindings : kOk;
}

std::optional<model::ElementId> pick_domain(const model::ModelGraph& m, const std::string& wanted,
                                            std::ostream& err) {
  auto ds = model::domains(m);
  if (!wanted.empty()) {
    for (const auto* d : ds) {
      if (d->id.value == wanted || iequals(d->name, wanted)) return d->id;
    }
    err << "error: no Domain package '" << wanted << "'\n";
    return std::nullopt;
  }
  if (ds.size() != 1) {
    err << "error: model has " << ds.size() << " Domain packages; choose one with --domain\n";
    return std::nullopt;
  }
  return ds.front()->id;
}

int cmd_generate(const Config& c, std::ostream& out, std::ostream& err) {
  auto rules = profile::RuleSet::parse(c.rules);
  if (!rules) {
    report(err, "--rules", rules.diagnostics());
    return kInputError;
  }
  auto m = load_model_file(c.model, err);
  if (!m) return kInputError;
  std::optional<compiler::InstanceData> data;
  if (!c.instance.empty()) {
    auto text = read_file(c.instance);
    if (!text) {
      err << "error: cannot read '" << c.instance << "'\n";
      return kInputError;
    }
    auto inst = compiler::load_instance(*text);
    if (!inst) {
      report(err, c.instance, inst.diagnostics());
      return kInputError;
    }
    data = std::move(inst).value();
  }

  Diagnostics ds = profile::validate(*m, *rules, profile::Context::Generation);
  if (has_errors(ds)) {
    for (const auto& d : ds) err << render(d) << "\n";
    return kFindings;
  }
  auto id = pick_domain(*m, c.domain, err);
  if (!id) return kFindings;
  auto domain = compiler::compile_domain(*m, *id);
  if (!domain) {
    report(err, c.model, domain.diagnostics());
    return kFindings;
  }

  std::vector<std::pair<fs::path, std::string>> files;
  fs::path dir(c.out);
  files.emplace_back(dir / "domain.pddl", pddl::print_domain(*domain));
  if (data) {
    auto problem = compiler::compile_problem(*domain, *data, data->problem_name);
    if (!problem) {
      report(err, c.instance, problem.diagnostics());
      return kFindings;
    }
    files.emplace_back(dir / "problem.pddl", pddl::print_problem(*problem));
  }
  if (!write_atomically(files, err)) return kInputError;
  for (const auto& [path, content] : files) out << path.string() << "\n";
  return kOk;
}

struct Loaded {
  pddl::PddlDomain domain;
  pddl::PddlProblem problem;
  planner::GroundTask task;
};

std::optional<Loaded> load_task(const Config& c, std::ostream& err) {
  auto dtext = read_file(c.domain_file);
  if (!dtext) {
    err << "error: cannot read '" << c.domain_file << "'\n";
    return std::nullopt;
  }
  auto ptext = read_file(c.problem_file);
  if (!ptext) {
    err << "error: cannot read '" << c.problem_file << "'\n";
    return std::nullopt;
  }
  auto d = pddl::parse_domain(*dtext);
  if (!d) {
    report(err, c.domain_file, d.diagnostics());
    return std::nullopt;
  }
  auto p = pddl::parse_problem(*ptext, &*d);
  if (!p) {
    report(err, c.problem_file, p.diagnostics());
    return std::nullopt;
  }
  auto t = planner::ground(*d, *p);
  if (!t) {
    report(err, c.problem_file, t.diagnostics());
    return std::nullopt;
  }
  return Loaded{std::move(d).value(), std::move(p).value(), std::move(t).value()};
}

std::string shell_quote(const std::string& s) {
  std::string out = "'";
  for (char ch : s) {
    if (ch == '\'') {
      out += "'\\''";
    } else {
      out += ch;
    }
  }
  return out + "'";
}

std::string substitute(std::string tmpl, const std::string& key, const std::string& value) {
  for (std::size_t pos = tmpl.find(key); pos != std::string::npos; pos = tmpl.find(key, pos + value.size())) {
    tmpl.replace(pos, key.size(), value);
  }
  return tmpl;
}

int print_report(const planner::PlanReport& r, std::ostream& out, std::ostream& err) {
  if (r.accepted) {
    out << "accepted cost = " << format_number(r.total_cost) << "\n";
    return kOk;
  }
  err << "rejected at step " << r.failed_step << ": " << r.reason << "\n";
  for (const auto& u : r.unmet) err << "  unmet " << u << "\n";
  return kFindings;
}

int cmd_solve_external(const Config& c, const Loaded& l, std::ostream& out, std::ostream& err) {
  fs::path plan_path = fs::temp_directory_path() / ("mbplan-plan" + temp_suffix());
  std::string cmd = c.external;
  cmd = substitute(cmd, "{domain}", shell_quote(fs::absolute(c.domain_file).string()));
  cmd = substitute(cmd, "{problem}", shell_quote(fs::absolute(c.problem_file).string()));
  cmd = substitute(cmd, "{plan}", shell_quote(plan_path.string()));
  int status = std::system(cmd.c_str());
  auto text = read_file(plan_path.string());
  std::error_code ec;
  fs::remove(plan_path, ec);
  if (!text) {
    err << "error: external planner produced no plan (status " << status << ")\n";
    return kUnsolvable;
  }
  auto plan = planner::parse_plan(*text);
  if (!plan) {
    report(err, "<external plan>", plan.diagnostics());
    return kInputError;
  }
  auto r = planner::check_plan(l.task, *plan);
  if (!r.accepted) return print_report(r, out, err);
  std::vector<std::size_t> steps;
  for (const auto& s : plan->steps) steps.push_back(*l.task.find_action(s));
  std::string formatted = planner::format_plan(l.task, planner::make_plan(l.task, std::move(steps)));
  if (!c.out.empty() && !write_atomically({{fs::path(c.out), formatted}}, err)) return kInputError;
  out << formatted;
  return kOk;
}

int cmd_solve(const Config& c, std::ostream& out, std::ostream& err) {
  if (c.cap == 0) {
    err << "error: --cap must be positive\n";
    return kInputError;
  }
  auto l = load_task(c, err);
  if (!l) return kInputError;
  if (!c.external.empty()) return cmd_solve_external(c, *l, out, err);

  planner::SearchOptions opts;
  opts.expansion_cap = c.cap;
  opts.heuristic = c.heuristic == "hmax" ? planner::Heuristic::HMax : planner::Heuristic::None;
  auto r = planner::solve(l->task, opts);
  switch (r.status) {
    case planner::SolveStatus::Unsolvable:
      err << "unsolvable (" << r.expanded << " states expanded)\n";
      return kUnsolvable;
    case planner::SolveStatus::ResourceLimit:
      err << "resource limit: expansion cap " << c.cap << " reached\n";
      return kResourceLimit;
    case planner::SolveStatus::Solved:
      break;
  }
  std::string formatted = planner::format_plan(l->task, r.plan);
  if (!c.out.empty() && !write_atomically({{fs::path(c.out), formatted}}, err)) return kInputError;
  out << formatted;
  return kOk;
}

int cmd_check(const Config& c, std::ostream& out, std::ostream& err) {
  auto l = load_task(c, err);
  if (!l) return kInputError;
  auto text = read_file(c.plan_file);
  if (!text) {
    err << "error: cannot read '" << c.plan_file << "'\n";
    return kInputError;
  }
  auto plan = planner::parse_plan(*text);
  if (!plan) {
    report(err, c.plan_file, plan.diagnostics());
    return kInputError;
  }
  return print_report(planner::check_plan(l->task, *plan), out, err);
}

int cmd_fmt(const Config& c, std::ostream& out, std::ostream& err) {
  auto text = read_file(c.input);
  if (!text) {
    err << "error: cannot read '" << c.input << "'\n";
    return kInputError;
  }
  std::string printed;
  switch (pddl::sniff_kind(*text)) {
    case pddl::FileKind::Domain: {
      auto d = pddl::parse_domain(*text);
      if (!d) {
        report(err, c.input, d.diagnostics());
        return kInputError;
      }
      printed = pddl::print_domain(*d);
      break;
    }
    case pddl::FileKind::Problem: {
      std::optional<pddl::PddlDomain> domain;
      if (!c.domain_file.empty()) {
        auto dtext = read_file(c.domain_file);
        if (!dtext) {
          err << "error: cannot read '" << c.domain_file << "'\n";
          return kInputError;
        }
        auto d = pddl::parse_domain(*dtext);
        if (!d) {
          report(err, c.domain_file, d.diagnostics());
          return kInputError;
        }
        domain = std::move(d).value();
      }
      auto p = pddl::parse_problem(*text, domain ? &*domain : nullptr);
      if (!p) {
        report(err, c.input, p.diagnostics());
        return kInputError;
      }
      printed = pddl::print_problem(*p);
      break;
    }
    case pddl::FileKind::Unknown:
      err << c.input << ": not a PDDL domain or problem\n";
      return kInputError;
  }
  if (c.out.empty()) {
    out << printed;
    return kOk;
  }
  return write_atomically({{fs::path(c.out), printed}}, err) ? kOk : kInputError;
}

int cmd_parse(const Config& c, std::ostream& out, std::ostream& err) {
  int status = kOk;
  for (const auto& path : c.inputs) {
    auto text = read_file(path);
    if (!text) {
      err << "error: cannot read '" << path << "'\n";
      status = kInputError;
      continue;
    }
    pddl::ParseOptions syntax_only{false};
    Diagnostics ds;
    switch (pddl::sniff_kind(*text)) {
      case pddl::FileKind::Domain:
        if (auto d = pddl::parse_domain(*text, syntax_only); !d) ds = d.diagnostics();
        break;
      case pddl::FileKind::Problem:
        if (auto p = pddl::parse_problem(*text, nullptr, syntax_only); !p) ds = p.diagnostics();
        break;
      case pddl::FileKind::Unknown:
        ds.push_back({"pddl.syntax", Severity::Error, "", "", "not a PDDL domain or problem"});
        break;
    }
    if (ds.empty()) {
      out << path << ": ok\n";
    } else {
      report(err, path, ds);
      status = kInputError;
    }
  }
  return status;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Config c;
  CLI::App app{"Model-based PDDL generation and planning", "mbplan"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Show help for all subcommands");

  auto* validate = app.add_subcommand("validate", "Check a model against the profile rules");
  validate->add_option("model", c.model, "Model file (.pm1)")->required();
  validate->add_option("--rules", c.rules, "Rule selection, e.g. all, P01,P02 or -P10");
  validate->add_flag("--json", c.json, "Print findings as JSON on standard output");

  auto* generate = app.add_subcommand("generate", "Write domain.pddl (and problem.pddl)");
  generate->add_option("model", c.model, "Model file (.pm1)")->required();
  generate->add_option("--instance", c.instance, "Instance file (.pi1)");
  generate->add_option("--out", c.out, "Output directory")->required();
  generate->add_option("--domain", c.domain, "Domain package id or name");
  generate->add_option("--rules", c.rules, "Rule selection");

  auto* solve = app.add_subcommand("solve", "Find a cost-optimal plan");
  solve->add_option("domain", c.domain_file, "Domain file")->required();
  solve->add_option("problem", c.problem_file, "Problem file")->required();
  solve->add_option("--out", c.out, "Plan output file");
  solve->add_option("--cap", c.cap, "Expansion cap");
  solve->add_option("--heuristic", c.heuristic, "none or hmax")
      ->check(CLI::IsMember({"none", "hmax"}));
  solve->add_option("--external-planner", c.external,
                    "Command template with {domain} {problem} {plan} placeholders");

  auto* check = app.add_subcommand("check", "Validate a plan file");
  check->add_option("domain", c.domain_file, "Domain file")->required();
  check->add_option("problem", c.problem_file, "Problem file")->required();
  check->add_option("plan", c.plan_file, "Plan file")->required();

  auto* fmt = app.add_subcommand("fmt", "Print a PDDL file canonically");
  fmt->add_option("file", c.input, "PDDL file")->required();
  fmt->add_option("--out", c.out, "Output file");
  fmt->add_option("--domain", c.domain_file, "Domain file used to check a problem");

  auto* parse = app.add_subcommand("parse", "Syntax check only");
  parse->add_option("files", c.inputs, "PDDL files")->required();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kInputError;
  }

  if (validate->parsed()) return cmd_validate(c, out, err);
  if (generate->parsed()) return cmd_generate(c, out, err);
  if (solve->parsed()) return cmd_solve(c, out, err);
  if (check->parsed()) return cmd_check(c, out, err);
  if (fmt->parsed()) return cmd_fmt(c, out, err);
  return cmd_parse(c, out, err);
}

}  // namespace mbplan::cli
