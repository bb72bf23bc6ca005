#include "chainforge/chain_lang.hpp"

#include <string>
#include <vector>

#include "chainforge/errors.hpp"
#include "doctest.h"
#include "gen.hpp"

using namespace chainforge;
using namespace chainforge::chain;

namespace {

// Request declaring symbols s1..s9 as uses plus endpoints a and b, enough
// for every hand-written expression below.
DeploymentRequest wideRequest() {
  DeploymentRequest req;
  req.id = "t";
  for (int k = 1; k <= 9; ++k)
    req.uses.push_back({"s" + std::to_string(k), "f", {Rational(1)}});
  req.endpoints.push_back({"a", "n1"});
  req.endpoints.push_back({"b", "n1"});
  req.chain = "a . b";
  req.initialRate = 1;
  return req;
}

}  // namespace

TEST_CASE("tokenize classifies every token kind with 1-based positions") {
  const auto toks = tokenize("ab1 42 .\n, ; ( ) [ ] { }");
  REQUIRE(toks.size() == 11);
  CHECK(toks[0].kind == TokenKind::Symbol);
  CHECK(toks[0].text == "ab1");
  CHECK(toks[0].line == 1);
  CHECK(toks[0].col == 1);
  CHECK(toks[1].kind == TokenKind::Number);
  CHECK(toks[1].text == "42");
  CHECK(toks[1].col == 5);
  CHECK(toks[2].kind == TokenKind::Dot);
  CHECK(toks[3].kind == TokenKind::Comma);
  CHECK(toks[3].line == 2);
  CHECK(toks[3].col == 1);
  CHECK(toks[4].kind == TokenKind::Semicolon);
  CHECK(toks[5].kind == TokenKind::LParen);
  CHECK(toks[6].kind == TokenKind::RParen);
  CHECK(toks[7].kind == TokenKind::LBracket);
  CHECK(toks[8].kind == TokenKind::RBracket);
  CHECK(toks[9].kind == TokenKind::LBrace);
  CHECK(toks[10].kind == TokenKind::RBrace);

  CHECK(tokenize("").empty());
  CHECK_THROWS_AS(tokenize("a ? b"), SyntaxError);
  CHECK_THROWS_AS(tokenize("a-b"), SyntaxError);
}

TEST_CASE("parse covers every production") {
  const DeploymentRequest req = wideRequest();

  SUBCASE("single term and chained terms") {
    const ChainAst one = parseChain("s1", req);
    REQUIRE(one.root.size() == 1);
    CHECK(std::get<Term>(one.root[0].node).symbol == "s1");

    const ChainAst three = parseChain("a . s1 . b", req);
    REQUIRE(three.root.size() == 3);
    CHECK(std::get<Term>(three.root[2].node).symbol == "b");
  }

  SUBCASE("optional order lists one or more terms") {
    const ChainAst ast = parseChain("(s1, s2, s3)", req);
    REQUIRE(ast.root.size() == 1);
    const auto& oo = std::get<OptOrder>(ast.root[0].node);
    REQUIRE(oo.terms.size() == 3);
    CHECK(oo.terms[1].symbol == "s2");
    CHECK_NOTHROW(parseChain("(s1)", req));
  }

  SUBCASE("split carries one module sequence per branch") {
    const ChainAst ast = parseChain("s1[s2 . s3, s4]", req);
    const auto& sp = std::get<Split>(ast.root[0].node);
    CHECK(sp.splitter.symbol == "s1");
    REQUIRE(sp.branches.size() == 2);
    CHECK(sp.branches[0].size() == 2);
    CHECK(sp.branches[1].size() == 1);
  }

  SUBCASE("parallel records preamble, body and count") {
    const ChainAst ast = parseChain("s1{s1, s2; s3 . s4; 3}", req);
    const auto& par = std::get<Parallel>(ast.root[0].node);
    CHECK(par.splitter.symbol == "s1");
    REQUIRE(par.preamble.size() == 2);
    CHECK(par.preamble[1].symbol == "s2");
    CHECK(par.body.size() == 2);
    CHECK(par.count == 3);
  }

  SUBCASE("parallel count accepts 1 through the branch cap") {
    CHECK_NOTHROW(parseChain("s1{s1; s2; 1}", req));
    CHECK_NOTHROW(parseChain("s1{s1; s2; 64}", req));
    CHECK_THROWS_AS(parseChain("s1{s1; s2; 0}", req), SyntaxError);
    CHECK_THROWS_AS(parseChain("s1{s1; s2; 65}", req), SyntaxError);
    CHECK(kMaxBranches == 64);
  }

  SUBCASE("modules nest through split and parallel bodies") {
    CHECK_NOTHROW(parseChain("a . s1[(s2, s3), s4{s4; s5; 2}] . b", req));
  }
}

TEST_CASE("parse rejects grammar breaks with SyntaxError") {
  const DeploymentRequest req = wideRequest();
  CHECK_THROWS_AS(parseChain("", req), SyntaxError);
  CHECK_THROWS_AS(parseChain("(s1, s2", req), SyntaxError);
  CHECK_THROWS_AS(parseChain("s1 .", req), SyntaxError);
  CHECK_THROWS_AS(parseChain(". s1", req), SyntaxError);
  CHECK_THROWS_AS(parseChain("s1 s2", req), SyntaxError);
  CHECK_THROWS_AS(parseChain("s1[s2,]", req), SyntaxError);
  CHECK_THROWS_AS(parseChain("s1{s2; s3}", req), SyntaxError);
  CHECK_THROWS_AS(parseChain("s1{s2; s3; s4}", req), SyntaxError);
  CHECK_THROWS_AS(parseChain("42", req), SyntaxError);
  CHECK_THROWS_AS(parseChain("()", req), SyntaxError);
}

TEST_CASE("parse rejects undeclared symbols with SemanticError") {
  const DeploymentRequest req = wideRequest();
  CHECK_THROWS_AS(parseChain("ghost", req), SemanticError);
  CHECK_THROWS_AS(parseChain("s1 . ghost . b", req), SemanticError);
  CHECK_THROWS_AS(parseChain("s1{s1; ghost; 2}", req), SemanticError);
}

TEST_CASE("unparse inverts parse on hand-written chains") {
  const DeploymentRequest req = wideRequest();
  const std::vector<std::string> chains = {
      "s1",
      "a . s1 . b",
      "(s1, s2)",
      "s1[s2, s3 . s4]",
      "s1{s1, s2; s3; 4}",
      "a . (s1, s2) . s3[s4, s5{s5; s6; 2}] . b",
  };
  for (const std::string& text : chains) {
    CAPTURE(text);
    const ChainAst ast = parseChain(text, req);
    CHECK(parseChain(unparse(ast), req) == ast);
  }
}

TEST_CASE("unparse inverts parse on random chains") {
  testgen::Rng rng(20260817);
  for (int k = 0; k < 300; ++k) {
    const testgen::GeneratedChain gen = testgen::randomChain(rng);
    CAPTURE(gen.text);
    const ChainAst ast = parseChain(gen.text, gen.request);
    CHECK(parseChain(unparse(ast), gen.request) == ast);
  }
}

TEST_CASE("single delimiter edits always break the grammar") {
  testgen::Rng rng(811);
  for (int k = 0; k < 300; ++k) {
    const testgen::GeneratedChain gen = testgen::randomChain(rng);
    const std::string broken = testgen::mutateDelimiters(rng, gen.text);
    CAPTURE(broken);
    CHECK_THROWS_AS(parseChain(broken, gen.request), SyntaxError);
  }
}
