#include "chorex/parser.hpp"

#include <cctype>
#include <vector>

namespace chorex {

namespace {

struct Token {
  enum class Kind { Ident, Punct, End };
  Kind kind;
  std::string text;
  int line;
  int column;
};

bool ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '*';
}

std::vector<Token> tokenize(const std::string& src) {
  std::vector<Token> out;
  int line = 1, col = 1;
  std::size_t i = 0;
  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n; ++k) {
      if (src[i + k] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    i += n;
  };
  while (i < src.size()) {
    char c = src[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      advance(1);
      continue;
    }
    if (c == '/' && i + 1 < src.size() && src[i + 1] == '/') {
      while (i < src.size() && src[i] != '\n') advance(1);
      continue;
    }
    if (ident_char(c)) {
      std::size_t j = i;
      while (j < src.size() && ident_char(src[j])) ++j;
      out.push_back({Token::Kind::Ident, src.substr(i, j - i), line, col});
      advance(j - i);
      continue;
    }
    // Two-character punctuation, longest match first.
    static const char* two[] = {"->", "==", "!=", "<=", ">=", "&&", "||"};
    bool matched = false;
    if (i + 1 < src.size()) {
      std::string pair = src.substr(i, 2);
      for (const char* t : two) {
        if (pair == t) {
          out.push_back({Token::Kind::Punct, pair, line, col});
          advance(2);
          matched = true;
          break;
        }
      }
    }
    if (matched) continue;
    static const std::string singles = "{}|!<>;?+&:,.[]-/%=";
    if (singles.find(c) != std::string::npos) {
      out.push_back({Token::Kind::Punct, std::string(1, c), line, col});
      advance(1);
      continue;
    }
    throw ParseError(line, col, std::string("unexpected character '") + c + "'");
  }
  out.push_back({Token::Kind::End, "<end of input>", line, col});
  return out;
}

bool is_infix(const std::string& t) {
  static const char* ops[] = {"+", "-", "/", "%", "==", "!=", "<=", ">=", "&&"};
  for (const char* o : ops)
    if (t == o) return true;
  return false;
}

class Parser {
 public:
  explicit Parser(const std::string& text) : tokens_(tokenize(text)) {}

  Network network() {
    std::map<ProcessName, ProcessTerm> procs;
    while (true) {
      auto [name, term] = procdecl();
      if (procs.count(name))
        throw ParseError(peek().line, peek().column, "duplicate process '" + name + "'");
      procs.emplace(std::move(name), std::move(term));
      if (!accept_punct("|")) break;
    }
    expect_end();
    return make_network(std::move(procs));
  }

  Program program() {
    std::vector<Choreography> comps;
    comps.push_back(chor());
    while (accept_punct("||")) comps.push_back(chor());
    expect_end();
    return make_program(std::move(comps));
  }

 private:
  const Token& peek(std::size_t ahead = 0) const {
    std::size_t i = pos_ + ahead;
    return i < tokens_.size() ? tokens_[i] : tokens_.back();
  }

  const Token& next() { return tokens_[pos_ < tokens_.size() - 1 ? pos_++ : pos_]; }

  [[noreturn]] void fail(const std::string& expected) const {
    const Token& t = peek();
    throw ParseError(t.line, t.column, "expected " + expected + ", found '" + t.text + "'");
  }

  bool at_punct(const std::string& p, std::size_t ahead = 0) const {
    const Token& t = peek(ahead);
    return t.kind == Token::Kind::Punct && t.text == p;
  }

  bool at_ident(const std::string& s, std::size_t ahead = 0) const {
    const Token& t = peek(ahead);
    return t.kind == Token::Kind::Ident && t.text == s;
  }

  bool accept_punct(const std::string& p) {
    if (!at_punct(p)) return false;
    next();
    return true;
  }

  void expect_punct(const std::string& p) {
    if (!accept_punct(p)) fail("'" + p + "'");
  }

  void expect_keyword(const std::string& kw) {
    if (!at_ident(kw)) fail("'" + kw + "'");
    next();
  }

  void expect_end() {
    if (peek().kind != Token::Kind::End) fail("end of input");
  }

  std::string identifier(const char* what) {
    const Token& t = peek();
    if (t.kind != Token::Kind::Ident || is_reserved_word(t.text)) fail(what);
    return next().text;
  }

  // Labels admit the reserved words `then` / `else` (used by amendment).
  Label label_token() {
    const Token& t = peek();
    if (t.kind != Token::Kind::Ident) fail("label");
    if (is_reserved_word(t.text) && t.text != "then" && t.text != "else") fail("label");
    return next().text;
  }

  Expression expression() {
    Expression e = identifier("expression");
    while (peek().kind == Token::Kind::Punct && is_infix(peek().text)) {
      // `p + l; B` in behaviours is a selection, never an infix expression;
      // expressions only occur bracketed (!<...>), after '.', or before 'then'.
      std::string op = next().text;
      e += " " + op + " " + identifier("expression");
    }
    return e;
  }

  std::pair<ProcessName, ProcessTerm> procdecl() {
    ProcessName name = identifier("process name");
    expect_punct("{");
    BehaviourDefs defs;
    while (at_ident("def")) {
      next();
      ProcedureName x = identifier("procedure name");
      expect_punct("{");
      BehaviourPtr body = behaviour();
      expect_punct("}");
      if (defs.count(x))
        throw ParseError(peek().line, peek().column, "duplicate procedure '" + x + "'");
      defs.emplace(std::move(x), std::move(body));
    }
    expect_keyword("main");
    expect_punct("{");
    BehaviourPtr main = behaviour();
    expect_punct("}");
    expect_punct("}");
    return {std::move(name), make_process_term(std::move(defs), std::move(main))};
  }

  BehaviourPtr behaviour() {
    if (at_ident("stop")) {
      next();
      return done_b();
    }
    if (at_ident("if")) {
      next();
      Expression e = expression();
      expect_keyword("then");
      expect_punct("{");
      BehaviourPtr t = behaviour();
      expect_punct("}");
      expect_keyword("else");
      expect_punct("{");
      BehaviourPtr f = behaviour();
      expect_punct("}");
      return cond_b(std::move(e), std::move(t), std::move(f));
    }
    std::string name = identifier("behaviour");
    if (accept_punct("!")) {
      expect_punct("<");
      Expression e = expression();
      expect_punct(">");
      expect_punct(";");
      return send_b(std::move(name), std::move(e), behaviour());
    }
    if (accept_punct("?")) {
      expect_punct(";");
      return recv_b(std::move(name), behaviour());
    }
    if (accept_punct("+")) {
      Label l = label_token();
      expect_punct(";");
      return select_b(std::move(name), std::move(l), behaviour());
    }
    if (accept_punct("&")) {
      expect_punct("{");
      std::vector<std::pair<Label, BehaviourPtr>> branches;
      while (true) {
        Label l = label_token();
        expect_punct(":");
        branches.emplace_back(std::move(l), behaviour());
        if (!accept_punct(",")) break;
      }
      expect_punct("}");
      return offer_b(std::move(name), std::move(branches));
    }
    return call_b(std::move(name));
  }

  Choreography chor() {
    ChorDefs defs;
    while (at_ident("def")) {
      next();
      ProcedureName x = identifier("procedure name");
      expect_punct("{");
      ChorBodyPtr body = cbody();
      expect_punct("}");
      if (defs.count(x))
        throw ParseError(peek().line, peek().column, "duplicate procedure '" + x + "'");
      defs.emplace(std::move(x), std::move(body));
    }
    expect_keyword("main");
    expect_punct("{");
    ChorBodyPtr main = cbody();
    expect_punct("}");
    return make_choreography(std::move(defs), std::move(main));
  }

  ChorBodyPtr cbody() {
    if (at_ident("stop")) {
      next();
      return done_c();
    }
    if (at_ident("if")) {
      next();
      ProcessName p = identifier("process name");
      expect_punct(".");
      Expression e = expression();
      expect_keyword("then");
      expect_punct("{");
      ChorBodyPtr t = cbody();
      expect_punct("}");
      expect_keyword("else");
      expect_punct("{");
      ChorBodyPtr f = cbody();
      expect_punct("}");
      return cond_c(std::move(p), std::move(e), std::move(t), std::move(f));
    }
    std::string name = identifier("choreography body");
    if (accept_punct(".")) {
      Expression e = expression();
      expect_punct("->");
      ProcessName q = identifier("process name");
      expect_punct(";");
      return com_c(std::move(name), std::move(e), std::move(q), cbody());
    }
    if (accept_punct("->")) {
      ProcessName q = identifier("process name");
      expect_punct("[");
      Label l = label_token();
      expect_punct("]");
      expect_punct(";");
      return sel_c(std::move(name), std::move(q), std::move(l), cbody());
    }
    return call_c(std::move(name));
  }

  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
};

}  // namespace

Network parse_network(const std::string& text) { return Parser(text).network(); }

Program parse_choreography(const std::string& text) { return Parser(text).program(); }

}  // namespace chorex
