#include "asptk/parser.hpp"

#include <cctype>
#include <sstream>

namespace asptk {

ParseError::ParseError(ParseErrorKind k, const std::string& msg, int l, int c)
    : std::runtime_error("line " + std::to_string(l) + ", column " + std::to_string(c) +
                         ": " + msg),
      kind(k), message(msg), line(l), column(c) {}

namespace {

/////////////////////////////////////////////////////////////////////////////
// Lexer
/////////////////////////////////////////////////////////////////////////////

enum class Tok {
  Ident, Var, Int,
  Dot, Comma, Semi, Colon, If,
  LParen, RParen, LBrace, RBrace,
  Cmp, Count,
  // recognized but rejected constructs; kept as tokens so the parser can
  // report them with a targeted message wherever they appear
  WeakIf, Pipe, DotDot, Arith, HashOther,
  Eof,
};

struct Token {
  Tok kind;
  std::string text;     // identifier / variable / directive name
  long long value = 0;  // integer payload
  CmpOp op = CmpOp::Lt; // comparison payload
  int line = 1;
  int column = 1;
};

class Lexer {
public:
  explicit Lexer(std::string_view text) : src_(text) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    for (;;) {
      Token t = next();
      out.push_back(t);
      if (t.kind == Tok::Eof) return out;
    }
  }

private:
  std::string_view src_;
  size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;

  [[noreturn]] void fail(ParseErrorKind kind, const std::string& msg, int l, int c) {
    throw ParseError(kind, msg, l, c);
  }

  char peek(size_t ahead = 0) const {
    return pos_ + ahead < src_.size() ? src_[pos_ + ahead] : '\0';
  }

  char advance() {
    char c = src_[pos_++];
    if (c == '\n') { ++line_; col_ = 1; } else { ++col_; }
    return c;
  }

  void skip_space_and_comments() {
    while (pos_ < src_.size()) {
      char c = peek();
      if (std::isspace(static_cast<unsigned char>(c))) { advance(); continue; }
      if (c == '%') {
        while (pos_ < src_.size() && peek() != '\n') advance();
        continue;
      }
      return;
    }
  }

  Token make(Tok kind, int l, int c) { Token t; t.kind = kind; t.line = l; t.column = c; return t; }

  Token next() {
    skip_space_and_comments();
    int l = line_, c = col_;
    if (pos_ >= src_.size()) return make(Tok::Eof, l, c);

    char ch = advance();
    if (std::isdigit(static_cast<unsigned char>(ch)) ||
        (ch == '-' && std::isdigit(static_cast<unsigned char>(peek())))) {
      std::string digits(1, ch);
      while (std::isdigit(static_cast<unsigned char>(peek()))) digits.push_back(advance());
      Token t = make(Tok::Int, l, c);
      t.value = std::stoll(digits);
      return t;
    }
    if (std::isalpha(static_cast<unsigned char>(ch)) || ch == '_') {
      std::string word(1, ch);
      while (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_')
        word.push_back(advance());
      if (word == "_") fail(ParseErrorKind::Unsupported, "anonymous variables are not supported", l, c);
      Token t = make(std::isupper(static_cast<unsigned char>(word[0])) || word[0] == '_'
                         ? Tok::Var : Tok::Ident, l, c);
      t.text = std::move(word);
      return t;
    }

    auto cmp = [&](CmpOp op) { Token t = make(Tok::Cmp, l, c); t.op = op; return t; };
    switch (ch) {
      case '(': return make(Tok::LParen, l, c);
      case ')': return make(Tok::RParen, l, c);
      case '{': return make(Tok::LBrace, l, c);
      case '}': return make(Tok::RBrace, l, c);
      case ',': return make(Tok::Comma, l, c);
      case ';': return make(Tok::Semi, l, c);
      case '|': return make(Tok::Pipe, l, c);
      case '.':
        if (peek() == '.') { advance(); return make(Tok::DotDot, l, c); }
        return make(Tok::Dot, l, c);
      case ':':
        if (peek() == '-') { advance(); return make(Tok::If, l, c); }
        if (peek() == '~') { advance(); return make(Tok::WeakIf, l, c); }
        return make(Tok::Colon, l, c);
      case '<':
        if (peek() == '=') { advance(); return cmp(CmpOp::Le); }
        if (peek() == '>') { advance(); return cmp(CmpOp::Ne); }
        return cmp(CmpOp::Lt);
      case '>':
        if (peek() == '=') { advance(); return cmp(CmpOp::Ge); }
        return cmp(CmpOp::Gt);
      case '=':
        if (peek() == '=') advance();
        return cmp(CmpOp::Eq);
      case '!':
        if (peek() == '=') { advance(); return cmp(CmpOp::Ne); }
        fail(ParseErrorKind::Syntax, "unexpected character '!'", l, c);
      case '+': case '*': case '/': case '-': {
        Token t = make(Tok::Arith, l, c);
        t.text = std::string(1, ch);
        return t;
      }
      case '#': {
        std::string word;
        while (std::isalpha(static_cast<unsigned char>(peek()))) word.push_back(advance());
        if (word == "count") return make(Tok::Count, l, c);
        Token t = make(Tok::HashOther, l, c);
        t.text = "#" + word;
        return t;
      }
      case '"':
        fail(ParseErrorKind::Unsupported, "string terms are not supported", l, c);
      case '[': case ']': case '@':
        // only weak constraint annotations use these
        fail(ParseErrorKind::Unsupported, "weak constraints are not supported", l, c);
      default:
        fail(ParseErrorKind::Syntax, std::string("unexpected character '") + ch + "'", l, c);
    }
  }
};

/////////////////////////////////////////////////////////////////////////////
// Parser
/////////////////////////////////////////////////////////////////////////////

class Parser {
public:
  explicit Parser(std::string_view text) : toks_(Lexer(text).run()) {}

  Program program() {
    Program p;
    while (peek().kind != Tok::Eof) statement(p);
    return p;
  }

  std::vector<Atom> atom_list() {
    std::vector<Atom> out;
    while (peek().kind != Tok::Eof) {
      if (peek().kind != Tok::Ident)
        fail(ParseErrorKind::Syntax, "expected an atom", peek());
      out.push_back(atom());
      if (peek().kind == Tok::Dot || peek().kind == Tok::Comma) advance();
    }
    return out;
  }

private:
  std::vector<Token> toks_;
  size_t pos_ = 0;

  const Token& peek(size_t ahead = 0) const {
    size_t i = pos_ + ahead;
    return i < toks_.size() ? toks_[i] : toks_.back();
  }

  const Token& advance() { return toks_[pos_ < toks_.size() - 1 ? pos_++ : pos_]; }

  [[noreturn]] void fail(ParseErrorKind kind, const std::string& msg, const Token& at) {
    throw ParseError(kind, msg, at.line, at.column);
  }

  // Reports rejected-fragment tokens with their own message so that callers
  // see "unsupported" rather than a generic syntax error.
  void reject_unsupported(const Token& t) {
    switch (t.kind) {
      case Tok::WeakIf:
        fail(ParseErrorKind::Unsupported, "weak constraints are not supported", t);
      case Tok::Pipe:
        fail(ParseErrorKind::Unsupported, "disjunction is not supported", t);
      case Tok::DotDot:
        fail(ParseErrorKind::Unsupported, "interval terms are not supported", t);
      case Tok::Arith:
        fail(ParseErrorKind::Unsupported, "arithmetic ('" + t.text + "') is not supported", t);
      case Tok::HashOther:
        fail(ParseErrorKind::Unsupported, "'" + t.text + "' is not supported; only #count is", t);
      default: return;
    }
  }

  void expect(Tok kind, const char* what) {
    reject_unsupported(peek());
    if (peek().kind != kind) fail(ParseErrorKind::Syntax, std::string("expected ") + what, peek());
    advance();
  }

  void statement(Program& p) {
    reject_unsupported(peek());
    if (peek().kind == Tok::LBrace)
      fail(ParseErrorKind::Unsupported, "choice rules are not supported", peek());
    Rule r;
    if (peek().kind == Tok::If) {
      advance();
      r.body = body();
    } else {
      if (peek().kind != Tok::Ident)
        fail(ParseErrorKind::Syntax, "expected a rule head or ':-'", peek());
      r.head = atom();
      if (peek().kind == Tok::Pipe || peek().kind == Tok::Semi)
        fail(ParseErrorKind::Unsupported, "disjunction is not supported", peek());
      if (peek().kind == Tok::If) {
        advance();
        r.body = body();
      }
    }
    expect(Tok::Dot, "'.'");
    if (r.head && r.body.empty() && r.head->is_ground())
      p.facts.push_back(std::move(*r.head));
    else
      p.rules.push_back(std::move(r));
  }

  std::vector<Literal> body() {
    std::vector<Literal> out;
    out.push_back(literal());
    while (peek().kind == Tok::Comma) {
      advance();
      out.push_back(literal());
    }
    return out;
  }

  Literal literal() {
    reject_unsupported(peek());
    const Token& t = peek();
    switch (t.kind) {
      case Tok::Ident:
        if (t.text == "not") {
          advance();
          reject_unsupported(peek());
          if (peek().kind == Tok::Count || peek().kind == Tok::Int || peek().kind == Tok::Var)
            fail(ParseErrorKind::Unsupported,
                 "'not' in front of aggregates or builtins is not supported", peek());
          if (peek().kind != Tok::Ident)
            fail(ParseErrorKind::Syntax, "expected an atom after 'not'", peek());
          return AtomLiteral{true, atom()};
        }
        // a bare symbol followed by a comparison is a builtin, anything else
        // is a positive atom
        if (peek(1).kind == Tok::Cmp) return builtin(term());
        return AtomLiteral{false, atom()};
      case Tok::Var:
      case Tok::Int: {
        Term lhs = term();
        reject_unsupported(peek());
        if (peek().kind != Tok::Cmp)
          fail(ParseErrorKind::Syntax, "expected a comparison operator", peek());
        if (peek(1).kind == Tok::Count) {
          CmpOp op = advance().op;
          return aggregate(Guard{lhs, op});
        }
        return builtin(lhs);
      }
      case Tok::Count:
        return aggregate(std::nullopt);
      case Tok::LBrace:
        fail(ParseErrorKind::Unsupported, "choice rules are not supported", t);
      default:
        fail(ParseErrorKind::Syntax, "expected a literal", t);
    }
  }

  Literal builtin(Term lhs) {
    if (peek().kind != Tok::Cmp)
      fail(ParseErrorKind::Syntax, "expected a comparison operator", peek());
    CmpOp op = advance().op;
    return BuiltinLiteral{lhs, op, term()};
  }

  // '#count { elements }' with the leading guard already consumed. A guard
  // following the closing brace is kept when a left guard exists, otherwise
  // it is mirrored onto the left so that every single guard prints there.
  Literal aggregate(std::optional<Guard> left) {
    AggregateAtom agg;
    agg.left = std::move(left);
    expect(Tok::Count, "#count");
    expect(Tok::LBrace, "'{'");
    if (peek().kind != Tok::RBrace) {
      agg.elements.push_back(element());
      while (peek().kind == Tok::Semi) {
        advance();
        agg.elements.push_back(element());
      }
    }
    expect(Tok::RBrace, "'}'");
    if (peek().kind == Tok::Cmp) {
      CmpOp op = advance().op;
      Guard right{term(), op};
      if (agg.left)
        agg.right = std::move(right);
      else
        agg.left = Guard{std::move(right.bound), mirror_cmp(right.op)};
    }
    return agg;
  }

  AggregateElement element() {
    AggregateElement e;
    e.tuple.push_back(term());
    while (peek().kind == Tok::Comma) {
      advance();
      e.tuple.push_back(term());
    }
    if (peek().kind == Tok::Colon) {
      advance();
      e.condition.push_back(condition_literal());
      while (peek().kind == Tok::Comma) {
        advance();
        e.condition.push_back(condition_literal());
      }
    }
    return e;
  }

  ConditionLiteral condition_literal() {
    reject_unsupported(peek());
    const Token& t = peek();
    if (t.kind == Tok::Count)
      fail(ParseErrorKind::Syntax, "aggregates cannot be nested", t);
    if (t.kind == Tok::Ident && t.text == "not") {
      advance();
      if (peek().kind != Tok::Ident)
        fail(ParseErrorKind::Syntax, "expected an atom after 'not'", peek());
      return AtomLiteral{true, atom()};
    }
    if (t.kind == Tok::Ident && peek(1).kind != Tok::Cmp) return AtomLiteral{false, atom()};
    Term lhs = term();
    if (peek().kind != Tok::Cmp)
      fail(ParseErrorKind::Syntax, "expected a comparison operator", peek());
    CmpOp op = advance().op;
    return BuiltinLiteral{lhs, op, term()};
  }

  Atom atom() {
    if (peek().kind != Tok::Ident)
      fail(ParseErrorKind::Syntax, "expected a predicate name", peek());
    Atom a;
    a.predicate = advance().text;
    if (peek().kind == Tok::LParen) {
      advance();
      a.args.push_back(term());
      while (peek().kind == Tok::Comma) {
        advance();
        a.args.push_back(term());
      }
      expect(Tok::RParen, "')'");
    }
    return a;
  }

  Term term() {
    reject_unsupported(peek());
    const Token& t = peek();
    switch (t.kind) {
      case Tok::Int:
        advance();
        return Term::integer(t.value);
      case Tok::Var:
        advance();
        return Term::variable(t.text);
      case Tok::Ident: {
        if (t.text == "not")
          fail(ParseErrorKind::Syntax, "'not' cannot be used as a term", t);
        advance();
        if (peek().kind == Tok::LParen)
          fail(ParseErrorKind::Unsupported, "function terms are not supported", peek());
        return Term::symbol(t.text);
      }
      default:
        fail(ParseErrorKind::Syntax, "expected a term", t);
    }
  }
};

} // namespace

Program parse_program(std::string_view text) { return Parser(text).program(); }

std::vector<Atom> parse_atom_list(std::string_view text) { return Parser(text).atom_list(); }

} // namespace asptk
