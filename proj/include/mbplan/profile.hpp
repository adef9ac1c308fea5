#pragma once

#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "mbplan/diagnostic.hpp"
#include "mbplan/model.hpp"

namespace mbplan::profile {

struct RuleInfo {
  std::string_view id;
  std::string_view name;
  std::string_view summary;
};

/// P01..P10 in id order.
const std::vector<RuleInfo>& registered_rules();
bool is_registered(std::string_view id);

class RuleSet {
 public:
  static RuleSet all();
  static RuleSet none() { return RuleSet{}; }
  /// Comma-separated ids ("P01,P02"); "all" selects everything and a leading
  /// '-' disables a rule from the full set ("-P10").
  static Result<RuleSet> parse(std::string_view spec);

  RuleSet& enable(std::string_view id);
  RuleSet& disable(std::string_view id);
  bool enabled(std::string_view id) const { return enabled_.count(std::string(id)) != 0; }
  const std::set<std::string>& ids() const { return enabled_; }

 private:
  std::set<std::string> enabled_;
};

/// P10 only applies when PDDL is about to be generated.
enum class Context { Modeling, Generation };

/// Runs the enabled rules (in parallel when built with OpenMP) and returns
/// findings ordered by (rule, element name, element id, message).
Diagnostics validate(const model::ModelGraph& model, const RuleSet& rules,
                     Context context = Context::Modeling);

/// Single-threaded reference; same result as validate().
Diagnostics validate_serial(const model::ModelGraph& model, const RuleSet& rules,
                            Context context = Context::Modeling);

/// `sub` equals `super` or reaches it through generalizations.
bool is_subclass(const model::ModelGraph& model, const model::ElementId& sub,
                 const model::ElementId& super);

}  // namespace mbplan::profile
