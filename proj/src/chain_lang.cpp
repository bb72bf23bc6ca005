#include "chainforge/chain_lang.hpp"

#include <cctype>
#include <sstream>

#include "chainforge/errors.hpp"

namespace chainforge::chain {

namespace {

bool isSymbolStart(char c) {
  return std::isalpha(static_cast<unsigned char>(c)) || c == '_';
}

bool isSymbolChar(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
}

const char* kindLabel(TokenKind k) {
  switch (k) {
    case TokenKind::Symbol: return "symbol";
    case TokenKind::Number: return "number";
    case TokenKind::Dot: return "'.'";
    case TokenKind::Comma: return "','";
    case TokenKind::Semicolon: return "';'";
    case TokenKind::LParen: return "'('";
    case TokenKind::RParen: return "')'";
    case TokenKind::LBracket: return "'['";
    case TokenKind::RBracket: return "']'";
    case TokenKind::LBrace: return "'{'";
    case TokenKind::RBrace: return "'}'";
  }
  return "?";
}

class Parser {
 public:
  Parser(const std::vector<Token>& tokens, const DeploymentRequest& request)
      : tokens_(tokens), request_(request) {}

  ChainAst run() {
    ChainAst ast;
    ast.root = parseModules();
    if (pos_ < tokens_.size()) {
      fail("end of chain");
    }
    return ast;
  }

 private:
  const std::vector<Token>& tokens_;
  const DeploymentRequest& request_;
  size_t pos_ = 0;

  bool atEnd() const { return pos_ >= tokens_.size(); }

  const Token* peek(size_t ahead = 0) const {
    return pos_ + ahead < tokens_.size() ? &tokens_[pos_ + ahead] : nullptr;
  }

  bool peekIs(TokenKind k, size_t ahead = 0) const {
    const Token* t = peek(ahead);
    return t != nullptr && t->kind == k;
  }

  const Token& expect(TokenKind k, const char* what) {
    if (!peekIs(k)) fail(what);
    return tokens_[pos_++];
  }

  [[noreturn]] void fail(const std::string& expected) const {
    if (atEnd()) {
      int line = 1;
      int col = 1;
      if (!tokens_.empty()) {
        const Token& last = tokens_.back();
        line = last.line;
        col = last.col + static_cast<int>(last.text.size());
      }
      throw SyntaxError("expected " + expected + ", found end of input", line,
                        col);
    }
    const Token& t = tokens_[pos_];
    throw SyntaxError("expected " + expected + ", found " +
                          kindLabel(t.kind) + " '" + t.text + "'",
                      t.line, t.col);
  }

  // modules ::= order modules | mod, where order ::= mod '.'.
  // A '.' is therefore a separator that must be followed by more modules.
  ModuleSeq parseModules() {
    ModuleSeq seq;
    seq.push_back(parseMod());
    while (peekIs(TokenKind::Dot)) {
      ++pos_;
      seq.push_back(parseMod());
    }
    return seq;
  }

  Module parseMod() {
    if (peekIs(TokenKind::LParen)) {
      return Module{parseOptOrder()};
    }
    if (peekIs(TokenKind::Symbol)) {
      if (peekIs(TokenKind::LBracket, 1)) {
        return Module{parseSplit()};
      }
      if (peekIs(TokenKind::LBrace, 1)) {
        return Module{parseParallel()};
      }
      return Module{parseTerm()};
    }
    fail("<mod>");
  }

  Term parseTerm() {
    const Token& t = expect(TokenKind::Symbol, "<term>");
    if (!request_.isUse(t.text) && !request_.isEndpoint(t.text)) {
      throw SemanticError("unknown symbol '" + t.text + "' at line " +
                          std::to_string(t.line) + ", column " +
                          std::to_string(t.col) + " (not a declared use or "
                          "endpoint of request '" + request_.id + "')");
    }
    return Term{t.text};
  }

  std::vector<Term> parseTermList() {
    std::vector<Term> terms;
    terms.push_back(parseTerm());
    while (peekIs(TokenKind::Comma)) {
      ++pos_;
      terms.push_back(parseTerm());
    }
    return terms;
  }

  OptOrder parseOptOrder() {
    expect(TokenKind::LParen, "'('");
    OptOrder opt{parseTermList()};
    expect(TokenKind::RParen, "')' closing <optorder>");
    return opt;
  }

  Split parseSplit() {
    Split split;
    split.splitter = parseTerm();
    expect(TokenKind::LBracket, "'['");
    split.branches.push_back(parseModules());
    while (peekIs(TokenKind::Comma)) {
      ++pos_;
      split.branches.push_back(parseModules());
    }
    expect(TokenKind::RBracket, "']' closing <split>");
    return split;
  }

  Parallel parseParallel() {
    Parallel par;
    par.splitter = parseTerm();
    expect(TokenKind::LBrace, "'{'");
    par.preamble = parseTermList();
    expect(TokenKind::Semicolon, "';' after <parallel> preamble");
    par.body = parseModules();
    expect(TokenKind::Semicolon, "';' after <parallel> body");
    const Token& n = expect(TokenKind::Number, "<num>");
    par.count = std::stol(n.text);
    if (par.count < 1 || par.count > kMaxBranches) {
      throw SyntaxError("expected <num> in 1.." +
                            std::to_string(kMaxBranches) + ", found '" +
                            n.text + "'",
                        n.line, n.col);
    }
    expect(TokenKind::RBrace, "'}' closing <parallel>");
    return par;
  }
};

class Unparser {
 public:
  std::string run(const ChainAst& ast) {
    writeSeq(ast.root);
    return out_.str();
  }

 private:
  std::ostringstream out_;

  void writeSeq(const ModuleSeq& seq) {
    for (size_t i = 0; i < seq.size(); ++i) {
      if (i > 0) out_ << " . ";
      writeMod(seq[i]);
    }
  }

  void writeMod(const Module& mod) {
    std::visit([this](const auto& m) { write(m); }, mod.node);
  }

  void write(const Term& t) { out_ << t.symbol; }

  void write(const OptOrder& o) {
    out_ << "(";
    for (size_t i = 0; i < o.terms.size(); ++i) {
      if (i > 0) out_ << ", ";
      out_ << o.terms[i].symbol;
    }
    out_ << ")";
  }

  void write(const Split& s) {
    out_ << s.splitter.symbol << "[";
    for (size_t i = 0; i < s.branches.size(); ++i) {
      if (i > 0) out_ << ", ";
      writeSeq(s.branches[i]);
    }
    out_ << "]";
  }

  void write(const Parallel& p) {
    out_ << p.splitter.symbol << "{";
    for (size_t i = 0; i < p.preamble.size(); ++i) {
      if (i > 0) out_ << ", ";
      out_ << p.preamble[i].symbol;
    }
    out_ << "; ";
    writeSeq(p.body);
    out_ << "; " << p.count << "}";
  }
};

}  // namespace

std::vector<Token> tokenize(std::string_view input) {
  std::vector<Token> tokens;
  int line = 1;
  int col = 1;
  size_t i = 0;
  auto advance = [&](size_t n) {
    for (size_t k = 0; k < n; ++k) {
      if (input[i + k] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    i += n;
  };

  while (i < input.size()) {
    char c = input[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      advance(1);
      continue;
    }
    TokenKind kind;
    switch (c) {
      case '.': kind = TokenKind::Dot; break;
      case ',': kind = TokenKind::Comma; break;
      case ';': kind = TokenKind::Semicolon; break;
      case '(': kind = TokenKind::LParen; break;
      case ')': kind = TokenKind::RParen; break;
      case '[': kind = TokenKind::LBracket; break;
      case ']': kind = TokenKind::RBracket; break;
      case '{': kind = TokenKind::LBrace; break;
      case '}': kind = TokenKind::RBrace; break;
      default: {
        if (std::isdigit(static_cast<unsigned char>(c))) {
          size_t len = 1;
          while (i + len < input.size() &&
                 std::isdigit(static_cast<unsigned char>(input[i + len]))) {
            ++len;
          }
          tokens.push_back({TokenKind::Number,
                            std::string(input.substr(i, len)), line, col});
          advance(len);
          continue;
        }
        if (isSymbolStart(c)) {
          size_t len = 1;
          while (i + len < input.size() && isSymbolChar(input[i + len])) {
            ++len;
          }
          tokens.push_back({TokenKind::Symbol,
                            std::string(input.substr(i, len)), line, col});
          advance(len);
          continue;
        }
        throw SyntaxError(std::string("unexpected character '") + c + "'",
                          line, col);
      }
    }
    tokens.push_back({kind, std::string(1, c), line, col});
    advance(1);
  }
  return tokens;
}

ChainAst parse(const std::vector<Token>& tokens,
               const DeploymentRequest& request) {
  if (tokens.empty()) {
    throw SyntaxError("expected <modules>, found empty chain", 1, 1);
  }
  return Parser(tokens, request).run();
}

ChainAst parseChain(std::string_view text, const DeploymentRequest& request) {
  return parse(tokenize(text), request);
}

std::string unparse(const ChainAst& ast) { return Unparser().run(ast); }

}  // namespace chainforge::chain
