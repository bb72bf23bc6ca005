#pragma once

#include <memory>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "chainforge/model.hpp"

namespace chainforge::chain {

// Largest branch count a parallel module may request. The grammar needs a
// finite numeral alphabet; anything above this is rejected at parse time.
inline constexpr long kMaxBranches = 64;

enum class TokenKind {
  Symbol,
  Number,
  Dot,
  Comma,
  Semicolon,
  LParen,
  RParen,
  LBracket,
  RBracket,
  LBrace,
  RBrace,
};

struct Token {
  TokenKind kind;
  std::string text;
  int line;
  int col;
};

// Splits input into symbols, numerals and the delimiters . , ; ( ) [ ] { }.
// Whitespace separates tokens and is otherwise ignored.
// Throws SyntaxError on any other character.
std::vector<Token> tokenize(std::string_view input);

struct Module;

using ModuleSeq = std::vector<Module>;

struct Term {
  std::string symbol;
  bool operator==(const Term&) const = default;
};

// A set of functions the operator may traverse in any order.
struct OptOrder {
  std::vector<Term> terms;
  bool operator==(const OptOrder&) const = default;
};

// A function that splits flows into branches carrying distinct sub-chains.
struct Split {
  Term splitter;
  std::vector<ModuleSeq> branches;
  bool operator==(const Split&) const = default;
};

// A function that splits flows into `count` branches all carrying the same
// body. The preamble lists functions (the splitter among them) that run
// before the branches and may be ordered arbitrarily.
struct Parallel {
  Term splitter;
  std::vector<Term> preamble;
  ModuleSeq body;
  long count = 1;
  bool operator==(const Parallel&) const = default;
};

struct Module {
  std::variant<Term, OptOrder, Split, Parallel> node;
  bool operator==(const Module&) const = default;
};

struct ChainAst {
  ModuleSeq root;
  bool operator==(const ChainAst&) const = default;
};

// Recursive-descent parse of a token stream. Grammar errors raise
// SyntaxError naming the expected rule; symbols outside the request's
// declared uses and endpoints raise SemanticError. Structural rules that
// go beyond the grammar (splitter listed in its preamble, one occurrence
// per symbol, ...) are checked at expansion, not here.
ChainAst parse(const std::vector<Token>& tokens,
               const DeploymentRequest& request);

// tokenize + parse in one call.
ChainAst parseChain(std::string_view text, const DeploymentRequest& request);

// Renders the AST back to chain text; parse(unparse(ast)) == ast.
std::string unparse(const ChainAst& ast);

}  // namespace chainforge::chain
