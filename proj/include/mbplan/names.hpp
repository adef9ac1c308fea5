#pragma once

#include <string>
#include <string_view>

namespace mbplan {

// PDDL identifiers are case-insensitive. Names keep their spelling for
// printing; comparisons go through these helpers.

std::string lower(std::string_view s);
bool iequals(std::string_view a, std::string_view b);
/// Case-insensitive order with a byte-wise tie break, so distinct spellings
/// still sort deterministically.
bool name_less(std::string_view a, std::string_view b);

/// PDDL `<name>`: a letter followed by letters, digits, '-' or '_'.
bool is_pddl_name(std::string_view s);
/// `?` followed by a PDDL name.
bool is_pddl_variable(std::string_view s);
/// Strict domain-identifier rule: ^[a-zA-Z][a-zA-Z0-9_]*$
bool is_valid_domain_name(std::string_view s);
/// Words that cannot be used as type/predicate/function/action names because
/// the grammar gives them a fixed meaning.
bool is_reserved_word(std::string_view s);

/// Shortest decimal text that reads back to the same double; integral values
/// print without a fraction.
std::string format_number(double v);

}  // namespace mbplan
