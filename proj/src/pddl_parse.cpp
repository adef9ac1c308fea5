#include <charconv>
#include <cmath>

#include "mbplan/names.hpp"
#include "mbplan/pddl.hpp"

namespace mbplan::pddl {
namespace {

constexpr int kMaxDepth = 256;

struct Token {
  enum class Kind { LParen, RParen, Name, Variable, Keyword, Number, Dash, Equals };
  Kind kind;
  std::string text;
  int line;
  int column;
};

bool name_start(char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z'); }
bool name_char(char c) {
  return name_start(c) || (c >= '0' && c <= '9') || c == '-' || c == '_';
}
bool digit(char c) { return c >= '0' && c <= '9'; }

Diagnostic diag(std::string_view rule, std::string message, int line = 0, int column = 0) {
  Diagnostic d;
  d.rule = std::string("pddl.") + std::string(rule);
  d.message = std::move(message);
  d.line = line;
  d.column = column;
  return d;
}

/// Returns false and sets `error` at the first offending character.
bool lex(std::string_view text, std::vector<Token>& out, Diagnostic& error) {
  int line = 1, col = 1;
  std::size_t i = 0;
  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n; ++k) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
      ++i;
    }
  };
  auto scan_name = [&](std::size_t from) {
    std::size_t j = from;
    while (j < text.size() && name_char(text[j])) ++j;
    return j;
  };
  auto scan_number = [&](std::size_t from) {
    std::size_t j = from;
    if (j < text.size() && text[j] == '-') ++j;
    while (j < text.size() && digit(text[j])) ++j;
    if (j + 1 < text.size() && text[j] == '.' && digit(text[j + 1])) {
      ++j;
      while (j < text.size() && digit(text[j])) ++j;
    }
    if (j < text.size() && (text[j] == 'e' || text[j] == 'E')) {
      std::size_t k = j + 1;
      if (k < text.size() && (text[k] == '+' || text[k] == '-')) ++k;
      if (k < text.size() && digit(text[k])) {
        j = k;
        while (j < text.size() && digit(text[j])) ++j;
      }
    }
    return j;
  };

  while (i < text.size()) {
    const char c = text[i];
    const int tl = line, tc = col;
    if (c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '\f' || c == '\v') {
      advance(1);
    } else if (c == ';') {
      while (i < text.size() && text[i] != '\n') advance(1);
    } else if (c == '(' || c == ')') {
      out.push_back({c == '(' ? Token::Kind::LParen : Token::Kind::RParen, std::string(1, c), tl, tc});
      advance(1);
    } else if (c == '=') {
      out.push_back({Token::Kind::Equals, "=", tl, tc});
      advance(1);
    } else if (c == '?' || c == ':') {
      if (i + 1 >= text.size() || !name_start(text[i + 1])) {
        error = diag("lexical", std::string("'") + c + "' must be followed by a name", tl, tc);
        return false;
      }
      std::size_t end = scan_name(i + 1);
      out.push_back({c == '?' ? Token::Kind::Variable : Token::Kind::Keyword,
                     std::string(text.substr(i, end - i)), tl, tc});
      advance(end - i);
    } else if (name_start(c)) {
      std::size_t end = scan_name(i);
      out.push_back({Token::Kind::Name, std::string(text.substr(i, end - i)), tl, tc});
      advance(end - i);
    } else if (digit(c) || (c == '-' && i + 1 < text.size() && digit(text[i + 1]))) {
      std::size_t end = scan_number(i);
      if (end < text.size() && name_char(text[end])) {
        error = diag("lexical", "malformed number", tl, tc);
        return false;
      }
      out.push_back({Token::Kind::Number, std::string(text.substr(i, end - i)), tl, tc});
      advance(end - i);
    } else if (c == '-') {
      out.push_back({Token::Kind::Dash, "-", tl, tc});
      advance(1);
    } else {
      std::string shown = (static_cast<unsigned char>(c) < 0x20 || static_cast<unsigned char>(c) >= 0x7f)
                              ? "byte 0x" + std::to_string(static_cast<unsigned char>(c))
                              : std::string("'") + c + "'";
      error = diag("lexical", "unexpected character " + shown, tl, tc);
      return false;
    }
  }
  return true;
}

struct Node {
  bool is_list = false;
  Token token{Token::Kind::Name, "", 0, 0};  // atom token, or the '(' of a list
  std::vector<Node> items;

  bool is(Token::Kind k) const { return !is_list && token.kind == k; }
  bool is_name(std::string_view n) const { return is(Token::Kind::Name) && iequals(token.text, n); }
  bool is_keyword(std::string_view k) const { return is(Token::Kind::Keyword) && iequals(token.text, k); }
  bool head_is(std::string_view n) const {
    return is_list && !items.empty() && items[0].is_name(n);
  }
};

struct SyntaxError {
  Diagnostic d;
};

[[noreturn]] void fail(const Node& at, std::string message) {
  throw SyntaxError{diag("syntax", std::move(message), at.token.line, at.token.column)};
}

class TreeBuilder {
 public:
  explicit TreeBuilder(const std::vector<Token>& toks) : toks_(toks) {}

  Node top() {
    if (toks_.empty()) throw SyntaxError{diag("syntax", "empty input", 1, 1)};
    Node n = node(0);
    if (pos_ != toks_.size()) {
      const Token& t = toks_[pos_];
      throw SyntaxError{diag("syntax", "unexpected '" + t.text + "' after the top-level form", t.line, t.column)};
    }
    return n;
  }

 private:
  Node node(int depth) {
    const Token& t = toks_[pos_++];
    if (t.kind == Token::Kind::RParen) {
      throw SyntaxError{diag("syntax", "unbalanced ')'", t.line, t.column)};
    }
    Node n;
    n.token = t;
    if (t.kind != Token::Kind::LParen) return n;
    if (depth > kMaxDepth) throw SyntaxError{diag("syntax", "nesting too deep", t.line, t.column)};
    n.is_list = true;
    while (true) {
      if (pos_ >= toks_.size()) {
        throw SyntaxError{diag("syntax", "missing ')' for '(' opened here", t.line, t.column)};
      }
      if (toks_[pos_].kind == Token::Kind::RParen) {
        ++pos_;
        return n;
      }
      n.items.push_back(node(depth + 1));
    }
  }

  const std::vector<Token>& toks_;
  std::size_t pos_ = 0;
};

const Node& expect_list(const Node& n, std::string_view what) {
  if (!n.is_list) fail(n, "expected " + std::string(what));
  return n;
}

std::string expect_name(const Node& n, std::string_view what) {
  if (!n.is(Token::Kind::Name)) fail(n, "expected " + std::string(what));
  return n.token.text;
}

/// `a b - t c` or `?x ?y - t ?z`.
TypedList parse_typed_list(const Node& list, std::size_t start, bool variables) {
  TypedList out;
  std::size_t pending = 0;
  const auto item_kind = variables ? Token::Kind::Variable : Token::Kind::Name;
  for (std::size_t i = start; i < list.items.size(); ++i) {
    const Node& n = list.items[i];
    if (n.is(item_kind)) {
      out.push_back({n.token.text, std::string(kObjectType)});
      ++pending;
    } else if (n.is(Token::Kind::Dash)) {
      if (pending == 0) fail(n, "'-' without preceding entries");
      if (i + 1 >= list.items.size()) fail(n, "'-' must be followed by a type");
      const Node& t = list.items[++i];
      if (t.head_is("either")) fail(t, "either-types are not supported");
      std::string type = expect_name(t, "a type name");
      for (std::size_t k = out.size() - pending; k < out.size(); ++k) out[k].type = type;
      pending = 0;
    } else {
      fail(n, variables ? "expected a variable" : "expected a name");
    }
  }
  return out;
}

Atom parse_atom(const Node& n, bool allow_equals = false) {
  expect_list(n, "an atom");
  if (n.items.empty()) fail(n, "empty atom");
  Atom a;
  if (!(allow_equals && n.items[0].is(Token::Kind::Equals))) {
    a.name = expect_name(n.items[0], "a predicate or function name");
  }
  for (std::size_t i = 1; i < n.items.size(); ++i) {
    const Node& t = n.items[i];
    if (!t.is(Token::Kind::Name) && !t.is(Token::Kind::Variable)) fail(t, "expected a term");
    a.terms.push_back(t.token.text);
  }
  return a;
}

void reject_unsupported(const Node& n) {
  static constexpr std::string_view kUnsupported[] = {
      "or", "imply", "forall", "exists", "when", "decrease", "assign", "scale-up",
      "scale-down", "preference", "at", "over", "either"};
  if (!n.is_list || n.items.empty()) return;
  if (n.items[0].is(Token::Kind::Equals)) fail(n, "'=' is not supported here");
  for (auto kw : kUnsupported) {
    if (n.items[0].is_name(kw)) fail(n, "'" + std::string(kw) + "' is outside the supported fragment");
  }
}

Condition parse_condition(const Node& n) {
  expect_list(n, "a condition");
  if (n.items.empty()) fail(n, "empty condition");
  reject_unsupported(n);
  if (n.head_is("and")) {
    std::vector<Condition> cs;
    for (std::size_t i = 1; i < n.items.size(); ++i) cs.push_back(parse_condition(n.items[i]));
    return Condition::make_and(std::move(cs));
  }
  if (n.head_is("not")) {
    if (n.items.size() != 2) fail(n, "'not' takes exactly one atom");
    const Node& inner = n.items[1];
    if (inner.head_is("and") || inner.head_is("not")) fail(inner, "'not' applies to atoms only");
    reject_unsupported(inner);
    return Condition::make_not(parse_atom(inner));
  }
  return Condition::make_atom(parse_atom(n));
}

Effect parse_effect(const Node& n) {
  expect_list(n, "an effect");
  if (n.items.empty()) fail(n, "empty effect");
  reject_unsupported(n);
  if (n.head_is("and")) {
    std::vector<Effect> es;
    for (std::size_t i = 1; i < n.items.size(); ++i) es.push_back(parse_effect(n.items[i]));
    return Effect::make_and(std::move(es));
  }
  if (n.head_is("not")) {
    if (n.items.size() != 2) fail(n, "'not' takes exactly one atom");
    const Node& inner = n.items[1];
    if (inner.head_is("and") || inner.head_is("not") || inner.head_is("increase")) {
      fail(inner, "'not' applies to atoms only");
    }
    reject_unsupported(inner);
    return Effect::make_delete(parse_atom(inner));
  }
  if (n.head_is("increase")) {
    if (n.items.size() != 3) fail(n, "'increase' takes a function term and a value");
    FunctionTerm target = parse_atom(n.items[1]);
    NumericExpr value;
    const Node& v = n.items[2];
    if (v.is(Token::Kind::Number)) {
      auto r = std::from_chars(v.token.text.data(), v.token.text.data() + v.token.text.size(), value.number);
      if (r.ec != std::errc()) fail(v, "number out of range");
    } else {
      reject_unsupported(v);
      value.term = parse_atom(v);
    }
    return Effect::make_increase(std::move(target), std::move(value));
  }
  return Effect::make_add(parse_atom(n));
}

double parse_number(const Node& n) {
  if (!n.is(Token::Kind::Number)) fail(n, "expected a number");
  double v = 0;
  auto r = std::from_chars(n.token.text.data(), n.token.text.data() + n.token.text.size(), v);
  if (r.ec != std::errc() || !std::isfinite(v)) fail(n, "number out of range");
  return v;
}

ActionDef parse_action(const Node& n) {
  if (n.items.size() < 2) fail(n, "action needs a name");
  ActionDef a;
  a.name = expect_name(n.items[1], "an action name");
  bool seen_params = false, seen_pre = false, seen_eff = false;
  std::size_t i = 2;
  while (i < n.items.size()) {
    const Node& key = n.items[i];
    if (i + 1 >= n.items.size()) fail(key, "missing value after '" + key.token.text + "'");
    const Node& value = n.items[i + 1];
    if (key.is_keyword(":parameters")) {
      if (seen_params) fail(key, "duplicate :parameters");
      seen_params = true;
      a.params = parse_typed_list(expect_list(value, "a parameter list"), 0, true);
    } else if (key.is_keyword(":precondition")) {
      if (seen_pre) fail(key, "duplicate :precondition");
      seen_pre = true;
      if (!(value.is_list && value.items.empty())) a.precondition = parse_condition(value);
    } else if (key.is_keyword(":effect")) {
      if (seen_eff) fail(key, "duplicate :effect");
      seen_eff = true;
      if (!(value.is_list && value.items.empty())) a.effect = parse_effect(value);
    } else {
      fail(key, "unexpected '" + key.token.text + "' in action");
    }
    i += 2;
  }
  if (!seen_params) fail(n, "action '" + a.name + "' lacks :parameters");
  return a;
}

std::string parse_header(const Node& root, std::string_view kind) {
  if (!root.is_list || root.items.empty() || !root.items[0].is_name("define")) {
    fail(root, "expected (define (" + std::string(kind) + " <name>) ...)");
  }
  if (root.items.size() < 2) fail(root, "missing (" + std::string(kind) + " <name>)");
  const Node& head = root.items[1];
  if (!head.head_is(kind) || head.items.size() != 2) {
    fail(head, "expected (" + std::string(kind) + " <name>)");
  }
  return expect_name(head.items[1], std::string(kind) + " name");
}

Requirement parse_requirement(const Node& n) {
  for (auto r : {Requirement::Typing, Requirement::NegativePreconditions, Requirement::ActionCosts}) {
    if (n.is_keyword(to_string(r))) return r;
  }
  fail(n, "unsupported requirement '" + n.token.text + "'");
}

PddlDomain build_domain(const Node& root) {
  PddlDomain d;
  d.name = parse_header(root, "domain");
  std::set<std::string> seen;
  for (std::size_t i = 2; i < root.items.size(); ++i) {
    const Node& sec = root.items[i];
    if (!sec.is_list || sec.items.empty() || !sec.items[0].is(Token::Kind::Keyword)) {
      fail(sec, "expected a domain section");
    }
    const std::string key = lower(sec.items[0].token.text);
    if (key != ":action" && !seen.insert(key).second) fail(sec, "duplicate section " + key);
    if (key == ":requirements") {
      for (std::size_t k = 1; k < sec.items.size(); ++k) {
        if (sec.items[k].is_keyword(":strips")) continue;  // implied
        d.requirements.insert(parse_requirement(sec.items[k]));
      }
    } else if (key == ":types") {
      d.types = parse_typed_list(sec, 1, false);
    } else if (key == ":predicates") {
      for (std::size_t k = 1; k < sec.items.size(); ++k) {
        const Node& p = expect_list(sec.items[k], "a predicate declaration");
        if (p.items.empty()) fail(p, "empty predicate declaration");
        d.predicates.push_back({expect_name(p.items[0], "a predicate name"), parse_typed_list(p, 1, true)});
      }
    } else if (key == ":functions") {
      for (std::size_t k = 1; k < sec.items.size(); ++k) {
        const Node& f = sec.items[k];
        if (f.is(Token::Kind::Dash)) {
          if (k + 1 >= sec.items.size() || !sec.items[k + 1].is_name("number")) {
            fail(f, "only numeric functions are supported");
          }
          ++k;
          continue;
        }
        expect_list(f, "a function declaration");
        if (f.items.empty()) fail(f, "empty function declaration");
        d.functions.push_back({expect_name(f.items[0], "a function name"), parse_typed_list(f, 1, true)});
      }
    } else if (key == ":action") {
      d.actions.push_back(parse_action(sec));
    } else {
      fail(sec, "section " + key + " is outside the supported fragment");
    }
  }
  return d;
}

PddlProblem build_problem(const Node& root) {
  PddlProblem p;
  p.name = parse_header(root, "problem");
  std::set<std::string> seen;
  bool have_goal = false, have_domain = false;
  for (std::size_t i = 2; i < root.items.size(); ++i) {
    const Node& sec = root.items[i];
    if (!sec.is_list || sec.items.empty() || !sec.items[0].is(Token::Kind::Keyword)) {
      fail(sec, "expected a problem section");
    }
    const std::string key = lower(sec.items[0].token.text);
    if (!seen.insert(key).second) fail(sec, "duplicate section " + key);
    if (key == ":domain") {
      if (sec.items.size() != 2) fail(sec, "expected (:domain <name>)");
      p.domain_name = expect_name(sec.items[1], "a domain name");
      have_domain = true;
    } else if (key == ":objects") {
      p.objects = parse_typed_list(sec, 1, false);
    } else if (key == ":init") {
      for (std::size_t k = 1; k < sec.items.size(); ++k) {
        const Node& f = expect_list(sec.items[k], "an init fact");
        if (!f.items.empty() && f.items[0].is(Token::Kind::Equals)) {
          if (f.items.size() != 3) fail(f, "expected (= <function-term> <number>)");
          p.init_values.push_back({parse_atom(f.items[1]), parse_number(f.items[2])});
        } else {
          reject_unsupported(f);
          if (f.head_is("not") || f.head_is("and")) fail(f, "init facts must be atoms");
          p.init_atoms.push_back(parse_atom(f));
        }
      }
    } else if (key == ":goal") {
      if (sec.items.size() != 2) fail(sec, "expected (:goal <condition>)");
      const Node& g = sec.items[1];
      p.goal = (g.is_list && g.items.empty()) ? Condition::make_and({}) : parse_condition(g);
      have_goal = true;
    } else if (key == ":metric") {
      if (sec.items.size() != 3 || !sec.items[1].is_name("minimize")) {
        fail(sec, "expected (:metric minimize <function-term>)");
      }
      p.metric = Metric{parse_atom(sec.items[2])};
    } else {
      fail(sec, "section " + key + " is outside the supported fragment");
    }
  }
  if (!have_domain) fail(root, "problem lacks (:domain <name>)");
  if (!have_goal) fail(root, "problem lacks (:goal ...)");
  return p;
}

template <typename Build>
auto parse_with(std::string_view text, Build build) -> Result<decltype(build(std::declval<const Node&>()))> {
  std::vector<Token> toks;
  Diagnostic error;
  if (!lex(text, toks, error)) return error;
  try {
    TreeBuilder tb(toks);
    Node root = tb.top();
    return build(root);
  } catch (const SyntaxError& e) {
    return e.d;
  }
}

void collect_ground_errors(const Condition& c, Diagnostics& out) {
  if (c.kind == Condition::Kind::And) {
    for (const auto& ch : c.children) collect_ground_errors(ch, out);
    return;
  }
  for (const auto& t : c.atom.terms) {
    if (!t.empty() && t[0] == '?') {
      out.push_back(diag("semantic", "goal atom " + print_atom(c.atom) + " is not ground"));
    }
  }
}

}  // namespace

std::string_view to_string(Requirement r) {
  switch (r) {
    case Requirement::Typing: return ":typing";
    case Requirement::NegativePreconditions: return ":negative-preconditions";
    case Requirement::ActionCosts: return ":action-costs";
  }
  return "?";
}

Result<PddlDomain> parse_domain(std::string_view text, ParseOptions options) {
  auto r = parse_with(text, build_domain);
  if (!r || !options.semantic) return r;
  Diagnostics ds = check_domain(*r);
  if (!ds.empty()) return ds;
  return r;
}

Result<PddlProblem> parse_problem(std::string_view text, const PddlDomain* domain,
                                  ParseOptions options) {
  auto r = parse_with(text, build_problem);
  if (!r || !options.semantic) return r;
  Diagnostics ds;
  if (domain != nullptr) {
    ds = check_problem(*domain, *r);
  } else {
    collect_ground_errors(r->goal, ds);
    for (const auto& a : r->init_atoms) {
      collect_ground_errors(Condition::make_atom(a), ds);
    }
    std::set<std::string> names;
    for (const auto& o : r->objects) {
      if (!names.insert(lower(o.name)).second) {
        ds.push_back(diag("semantic", "duplicate object '" + o.name + "'"));
      }
    }
  }
  if (!ds.empty()) return ds;
  return r;
}

FileKind sniff_kind(std::string_view text) {
  auto t = tokens(text);
  if (t.size() >= 4 && t[0] == "(" && iequals(t[1], "define") && t[2] == "(") {
    if (iequals(t[3], "domain")) return FileKind::Domain;
    if (iequals(t[3], "problem")) return FileKind::Problem;
  }
  return FileKind::Unknown;
}

std::vector<std::string> tokens(std::string_view text) {
  std::vector<Token> toks;
  Diagnostic error;
  std::vector<std::string> out;
  if (!lex(text, toks, error)) return out;
  out.reserve(toks.size());
  for (auto& t : toks) out.push_back(std::move(t.text));
  return out;
}

}  // namespace mbplan::pddl
